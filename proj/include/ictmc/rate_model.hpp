#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ictmc/dense_matrix.hpp"
#include "ictmc/rate.hpp"
#include "ictmc/state_space.hpp"

namespace ictmc {

/// Invalid rate model input. `row`, `column` and `candidate` locate the
/// offending entry when there is one.
class ModelError : public std::invalid_argument {
 public:
  ModelError(const std::string& what, std::optional<std::size_t> row = {},
             std::optional<std::size_t> column = {},
             std::optional<std::size_t> candidate = {})
      : std::invalid_argument(what), row(row), column(column), candidate(candidate) {}

  std::optional<std::size_t> row;
  std::optional<std::size_t> column;
  std::optional<std::size_t> candidate;
};

enum class RateModelKind { precise, interval, rowsets };

const char* to_string(RateModelKind kind);

using RateMatrix = std::vector<std::vector<Rate>>;
/// candidates[x] is the list of admissible rows for state x.
using RowCandidates = std::vector<std::vector<std::vector<Rate>>>;

/// Certified upper bound on the operator norm of a lower rate operator,
/// 2 max_x |Q(1_x)(x)|.
struct RateNormBound {
  double value = 0.0;
};

/// The linear generator picked by the lower envelope at some gamble g,
/// together with how long the Euler product may run with this generator
/// frozen before another selection could become the minimiser.
struct LinearPiece {
  DenseMatrix generator;
  /// Time horizon over which the frozen selection stays optimal along its own
  /// trajectory. Infinity when it can never change; zero when it must be
  /// re-evaluated after every step.
  double stable_duration = std::numeric_limits<double>::infinity();
};

/// Lower transition rate operator given as the lower envelope of a set of
/// intensity matrices with separately specified rows: a single intensity
/// matrix, interval bounds on each off-diagonal rate, or a finite list of
/// candidate rows per state.
///
/// Evaluation uses the difference form (Qf)(x) = min over rows r of
/// sum_{y != x} r(y) (f(y) - f(x)), so Q(mu) = 0 holds exactly.
class LowerRateModel {
 public:
  static LowerRateModel precise(StateSpace states, RateMatrix matrix);
  static LowerRateModel precise(StateSpace states, const DenseMatrix& matrix);
  /// Diagonal entries of `lower` and `upper` must be zero; they are ignored.
  static LowerRateModel interval(StateSpace states, RateMatrix lower, RateMatrix upper);
  static LowerRateModel interval(StateSpace states, const DenseMatrix& lower,
                                 const DenseMatrix& upper);
  static LowerRateModel row_sets(StateSpace states, RowCandidates candidates);
  static LowerRateModel row_sets(StateSpace states,
                                 const std::vector<std::vector<std::vector<double>>>& candidates);
  static LowerRateModel zero(StateSpace states);

  RateModelKind kind() const noexcept { return kind_; }
  const StateSpace& states() const noexcept { return states_; }
  std::size_t size() const noexcept { return states_.size(); }

  /// Precise matrix (kind precise), bounds (kind interval) or candidate rows
  /// (kind rowsets, also populated for precise with one row per state).
  const RateMatrix& matrix() const noexcept { return matrix_; }
  const RateMatrix& lower_bounds() const noexcept { return lower_; }
  const RateMatrix& upper_bounds() const noexcept { return upper_; }
  const RowCandidates& candidates() const noexcept { return candidates_; }

  Gamble lower_apply(const Gamble& f) const;
  Gamble upper_apply(const Gamble& f) const;
  RateNormBound norm_bound() const noexcept { return bound_; }

  /// Exact sign test for Qbar(1_to)(from) > 0 with from != to.
  bool upper_indicator_positive(std::size_t to, std::size_t from) const;
  /// Exact sign test for Q(1_A)(y) > 0 with y outside A.
  bool lower_indicator_positive(const StateSet& members, std::size_t y) const;

  /// Linear generator selected by the envelope at g. See LinearPiece.
  LinearPiece linear_piece(const Gamble& g) const;

  /// Number of intensity matrices obtained by choosing one extreme row per
  /// state (interval rows contribute their corner selections).
  std::uint64_t extreme_count() const;
  /// Every extreme intensity matrix; throws if more than `limit` exist.
  std::vector<DenseMatrix> extreme_matrices(std::uint64_t limit) const;

  OperatorEvaluation as_operator() const;

  bool operator==(const LowerRateModel& other) const;

  // Packed numeric form used by the kernels. Rows have stride `stride()` and a
  // zero diagonal.
  std::size_t stride() const noexcept { return stride_; }
  const std::vector<double>& packed_rows() const noexcept { return rows_; }
  const std::vector<std::uint32_t>& row_begin() const noexcept { return row_begin_; }
  const std::vector<double>& packed_lower() const noexcept { return lo_; }
  const std::vector<double>& packed_upper() const noexcept { return hi_; }

 private:
  LowerRateModel(StateSpace states, RateModelKind kind);
  void pack();
  void apply_into(const double* f, double* out) const;

  StateSpace states_;
  RateModelKind kind_;
  RateMatrix matrix_;
  RateMatrix lower_;
  RateMatrix upper_;
  RowCandidates candidates_;
  RateNormBound bound_;

  std::size_t stride_ = 0;
  std::vector<double> rows_;
  std::vector<std::uint32_t> row_begin_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<bool> interval_free_;  // lo < hi, per (x, y)
};

/// f -> f + delta Q f. Requires delta * norm_bound <= 1.
OperatorEvaluation induced_transition_step(const LowerRateModel& model, double delta);

/// f -> (T f - f) / delta. Requires delta > 0.
OperatorEvaluation rate_from_transition(OperatorEvaluation transition, double delta);

struct AxiomViolation {
  std::string axiom;
  std::string witness;
  double magnitude = 0.0;
  bool structural = false;
};

struct AxiomReport {
  std::vector<AxiomViolation> violations;
  std::size_t checks = 0;
  double max_numerical = 0.0;

  /// No structural violations.
  bool passed() const;
  void record(std::string axiom, std::string witness, double magnitude);
};

/// Magnitude above which a violation counts as structural rather than
/// floating-point noise.
inline constexpr double kNumericalViolationThreshold = 1e-9;

/// Randomised check of R1-R8 and of R9 against `bound` on `trials` seeded
/// gamble pairs.
AxiomReport check_rate_axioms(const OperatorEvaluation& q, double bound, std::size_t trials,
                              std::uint64_t seed);
AxiomReport check_rate_axioms(const LowerRateModel& model, std::size_t trials, std::uint64_t seed);

}  // namespace ictmc
