#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "ictmc/dense_matrix.hpp"
#include "ictmc/rate_model.hpp"
#include "ictmc/state_space.hpp"

namespace ictmc {

struct SolverOptions {
  double tolerance = 1e-9;
  std::uint32_t max_doublings = 30;
};

struct SolverResult {
  Gamble value;
  /// Euler steps behind `value`, summed over time segments.
  std::uint64_t steps_used = 1;
  /// Sum over segments of the last ||g_2n - g_n||. Not a certified bound.
  double est_error = 0.0;
  /// False when some segment exhausted the doubling budget.
  bool converged = true;
};

/// Lower transition operator: an evaluation satisfying L1-L3, optionally
/// carrying its stochastic matrix when it is linear.
class DiscreteLTO {
 public:
  /// Spot-checks L1-L3 on the standard probe set; throws std::invalid_argument
  /// on a structural violation.
  static DiscreteLTO certify(OperatorEvaluation eval, std::optional<DenseMatrix> matrix = {},
                             bool semigroup_generated = false);
  static DiscreteLTO identity(std::size_t n);
  /// Row-stochastic matrix; rows are checked.
  static DiscreteLTO stochastic(const DenseMatrix& matrix);

  std::size_t size() const noexcept { return eval_.dimension; }
  Gamble operator()(const Gamble& f) const { return eval_(f); }
  Gamble upper(const Gamble& f) const { return -eval_(-f); }
  const OperatorEvaluation& evaluation() const noexcept { return eval_; }
  const std::optional<DenseMatrix>& matrix() const noexcept { return matrix_; }
  /// True when this operator is some T_t of a lower rate operator.
  bool semigroup_generated() const noexcept { return semigroup_generated_; }

  friend DiscreteLTO compose(const DiscreteLTO& a, const DiscreteLTO& b);

 private:
  DiscreteLTO(OperatorEvaluation eval, std::optional<DenseMatrix> matrix, bool semigroup)
      : eval_(std::move(eval)), matrix_(std::move(matrix)), semigroup_generated_(semigroup) {}

  OperatorEvaluation eval_;
  std::optional<DenseMatrix> matrix_;
  bool semigroup_generated_ = false;
};

/// f -> a(b(f)).
DiscreteLTO compose(const DiscreteLTO& a, const DiscreteLTO& b);

/// Indicators, pairwise indicator sums, constants +-1 and 16 seeded random
/// gambles.
std::vector<Gamble> probe_set(std::size_t n);

/// Computes T_t f = lim (I + t/n Q)^n f. Time is split into unit segments;
/// on each segment the step count doubles from the admissibility floor
/// until two successive Euler products agree within the tolerance.
class TransitionSolver {
 public:
  explicit TransitionSolver(LowerRateModel model, SolverOptions options = {});

  const LowerRateModel& model() const noexcept { return *model_; }
  const SolverOptions& options() const noexcept { return options_; }

  SolverResult evolve(const Gamble& f, double t) const;
  /// -T_t(-f)
  SolverResult evolve_upper(const Gamble& f, double t) const;

  /// T_t as an operator with a step plan fixed per time segment (the largest
  /// count any probe needed), so that every evaluation is one and the same
  /// Euler product. Plans are cached per t.
  DiscreteLTO evolve_operator(double t) const;

  /// (I + t/steps Q)^steps f, computed exactly as the product it names.
  Gamble euler_product(const Gamble& f, double t, std::uint64_t steps) const;

  /// Step counts per segment for evolve_operator(t).
  std::vector<std::uint64_t> step_plan(double t) const;

 private:
  struct Segment {
    Gamble value;
    std::uint64_t steps = 0;
    double est_error = 0.0;
    bool converged = true;
  };
  Segment run_segment(const Gamble& f, double tau) const;
  std::uint64_t initial_steps(double tau) const;

  struct PlanCache {
    std::mutex mutex;
    std::map<double, std::vector<std::uint64_t>> plans;
  };

  std::shared_ptr<const LowerRateModel> model_;
  SolverOptions options_;
  std::shared_ptr<PlanCache> cache_;
};

/// Split [0, t] into unit segments plus a trailing remainder.
std::vector<double> unit_segments(double t);

/// || (T_{t+h} f - T_{t-h} f) / 2h - Q T_t f ||, or the forward difference
/// when t < h.
double derivative_check(const TransitionSolver& solver, const Gamble& f, double t, double h);

/// Randomised check of L1-L8 and L10 on `trials` seeded gamble pairs.
AxiomReport check_lto_axioms(const DiscreteLTO& op, std::size_t trials, std::uint64_t seed);

enum class Envelope { lower, upper };

/// States x with T_t f(x) > min f (or Tbar_t for Envelope::upper), decided
/// on the translated gamble f - min f so that the comparison is a sign test
/// against exact zero.
StateSet above_minimum_pattern(const TransitionSolver& solver, const Gamble& f, double t,
                               Envelope envelope = Envelope::lower);
/// States x with T_t f(x) < max f (or Tbar_t), via the conjugate applied to
/// max f - f.
StateSet below_maximum_pattern(const TransitionSolver& solver, const Gamble& f, double t,
                               Envelope envelope = Envelope::lower);

}  // namespace ictmc
