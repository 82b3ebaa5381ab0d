#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ictmc/rate_model.hpp"
#include "ictmc/semigroup.hpp"
#include "ictmc/state_space.hpp"

namespace ictmc {

/// Digraph with an edge y -> x iff x != y and Qbar(1_x)(y) > 0.
class ReachabilityGraph {
 public:
  explicit ReachabilityGraph(std::size_t n) : n_(n), adj_(n * n, false) {}

  std::size_t size() const noexcept { return n_; }
  bool has_edge(std::size_t from, std::size_t to) const { return adj_[from * n_ + to]; }
  void add_edge(std::size_t from, std::size_t to);
  std::vector<std::size_t> successors(std::size_t from) const;
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

 private:
  std::size_t n_;
  std::vector<bool> adj_;
};

ReachabilityGraph build_graph(const LowerRateModel& model);

/// Directed path (possibly empty) from `from` to `to`.
bool upper_reachable(const ReachabilityGraph& g, std::size_t from, std::size_t to);
/// Shortest path from `from` to `to`, both endpoints included; empty when none.
std::vector<std::size_t> upper_path(const ReachabilityGraph& g, std::size_t from, std::size_t to);

/// States upper reachable from every state.
StateSet top_class(const ReachabilityGraph& g);

struct LowerReachTrace {
  /// A_0 = A, A_1, ..., A_n with A_n = A_{n+1}.
  std::vector<StateSet> sets;
  std::size_t terminal() const { return sets.empty() ? 0 : sets.size() - 1; }
  const StateSet& closure() const { return sets.back(); }
};

/// Fixed point A_{k+1} = A_k u {y not in A_k : Q(1_{A_k})(y) > 0}.
LowerReachTrace lower_reach_trace(const LowerRateModel& model, const StateSet& members);
/// Whether `x` lower-reaches `members`, plus the trace. Throws on empty A.
std::pair<bool, LowerReachTrace> lower_reach(const LowerRateModel& model, const StateSet& members,
                                             std::size_t x);

enum class ErgodicityFailure { none, top_class_empty, not_lower_reachable };

struct ErgodicityReport {
  bool ergodic = false;
  StateSet top_class;
  ErgodicityFailure failure = ErgodicityFailure::none;
  /// top_class_empty: y cannot upper-reach x.
  std::optional<std::pair<std::size_t, std::size_t>> unreachable_pair;
  /// not_lower_reachable: a state outside the lower-reach closure.
  std::optional<std::size_t> failing_state;
  /// Lower-reach trace from the top class (when it is nonempty).
  std::optional<LowerReachTrace> trace;
  /// For ergodic verdicts: one upper path per state into the top class.
  std::vector<std::vector<std::size_t>> paths;
};

/// Exact, qualitative decision from the reachability graph and the
/// lower-reach fixed point. No time integration.
ErgodicityReport decide_ergodic(const LowerRateModel& model);

/// X_1A = {x : min Tbar 1_x > 0}; true iff nonempty and T 1_{X_1A}(x) > 0
/// for all x outside it.
std::pair<bool, StateSet> one_step_absorbing(const DiscreteLTO& op);

enum class Verdict { yes, no, unknown };
const char* to_string(Verdict v);

/// Regular absorption decided on positivity supports, iterating at most
/// `n_cap` powers. Semigroup-generated operators take the one-step route.
std::pair<Verdict, StateSet> regularly_absorbing(const DiscreteLTO& op, std::size_t n_cap);

struct LimitResult {
  bool converged = false;
  /// Midpoint of the final range when converged.
  double value = 0.0;
  /// Half of the final span.
  double half_span = 0.0;
  Gamble final_gamble;
  double t_reached = 0.0;
  std::uint64_t steps_used = 0;
};

/// Evaluate T_t f at t = t0, 2 t0, 4 t0, ... (t0 = 1 / norm bound) until
/// the span drops to `span_tol` or t exceeds `t_cap`.
LimitResult limit_lower_expectation(const TransitionSolver& solver, const Gamble& f,
                                    double span_tol, double t_cap);

}  // namespace ictmc
