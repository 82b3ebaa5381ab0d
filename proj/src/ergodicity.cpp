#include "ictmc/ergodicity.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

namespace ictmc {
namespace {

StateSet support(const Gamble& g) {
  StateSet s(g.size());
  for (std::size_t x = 0; x < g.size(); ++x) s[x] = g[x] > 0.0;
  return s;
}

bool all_of(const StateSet& s) { return std::all_of(s.begin(), s.end(), [](bool b) { return b; }); }
bool none_of(const StateSet& s) { return std::none_of(s.begin(), s.end(), [](bool b) { return b; }); }

// Shortest-path predecessor map by breadth-first search from `from`.
std::vector<std::size_t> bfs_parents(const ReachabilityGraph& g, std::size_t from) {
  const std::size_t none = g.size();
  std::vector<std::size_t> parent(g.size(), none);
  parent[from] = from;
  std::deque<std::size_t> queue{from};
  while (!queue.empty()) {
    const std::size_t y = queue.front();
    queue.pop_front();
    for (std::size_t x : g.successors(y))
      if (parent[x] == none) {
        parent[x] = y;
        queue.push_back(x);
      }
  }
  return parent;
}

enum class SupportOutcome { full, cycle, capped };

// Iterates S -> supp(step(1_S)) from `start`, recording every set visited,
// until `done` holds, a set repeats, or `cap` iterations have run.
template <class Step, class Done>
SupportOutcome iterate_supports(StateSet start, std::size_t cap, Step step, Done done,
                                std::vector<StateSet>* visited = nullptr) {
  std::map<StateSet, std::size_t> seen;
  StateSet current = std::move(start);
  for (std::size_t k = 1; k <= cap; ++k) {
    current = support(step(Gamble::indicator(current)));
    if (visited) visited->push_back(current);
    if (done(current)) return SupportOutcome::full;
    if (!seen.emplace(current, k).second) return SupportOutcome::cycle;
  }
  return SupportOutcome::capped;
}

}  // namespace

void ReachabilityGraph::add_edge(std::size_t from, std::size_t to) {
  if (from >= n_ || to >= n_) throw std::out_of_range("state index out of range");
  if (from == to) throw std::invalid_argument("reachability graphs have no self-loops");
  adj_[from * n_ + to] = true;
}

std::vector<std::size_t> ReachabilityGraph::successors(std::size_t from) const {
  std::vector<std::size_t> out;
  for (std::size_t to = 0; to < n_; ++to)
    if (adj_[from * n_ + to]) out.push_back(to);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> ReachabilityGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t from = 0; from < n_; ++from)
    for (std::size_t to = 0; to < n_; ++to)
      if (adj_[from * n_ + to]) out.emplace_back(from, to);
  return out;
}

ReachabilityGraph build_graph(const LowerRateModel& model) {
  ReachabilityGraph g(model.size());
  for (std::size_t y = 0; y < model.size(); ++y)
    for (std::size_t x = 0; x < model.size(); ++x)
      if (x != y && model.upper_indicator_positive(x, y)) g.add_edge(y, x);
  return g;
}

bool upper_reachable(const ReachabilityGraph& g, std::size_t from, std::size_t to) {
  if (from >= g.size() || to >= g.size()) throw std::out_of_range("state index out of range");
  return bfs_parents(g, from)[to] != g.size();
}

std::vector<std::size_t> upper_path(const ReachabilityGraph& g, std::size_t from, std::size_t to) {
  if (from >= g.size() || to >= g.size()) throw std::out_of_range("state index out of range");
  const auto parent = bfs_parents(g, from);
  if (parent[to] == g.size()) return {};
  std::vector<std::size_t> path{to};
  while (path.back() != from) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

StateSet top_class(const ReachabilityGraph& g) {
  const std::size_t n = g.size();
  StateSet top(n, false);
  for (std::size_t x = 0; x < n; ++x) {
    // Reverse search: which states reach x?
    StateSet reaches(n, false);
    reaches[x] = true;
    std::deque<std::size_t> queue{x};
    while (!queue.empty()) {
      const std::size_t to = queue.front();
      queue.pop_front();
      for (std::size_t from = 0; from < n; ++from)
        if (!reaches[from] && g.has_edge(from, to)) {
          reaches[from] = true;
          queue.push_back(from);
        }
    }
    top[x] = all_of(reaches);
  }
  return top;
}

LowerReachTrace lower_reach_trace(const LowerRateModel& model, const StateSet& members) {
  if (members.size() != model.size()) throw DimensionError("state set size mismatch");
  LowerReachTrace trace;
  trace.sets.push_back(members);
  while (true) {
    const StateSet& current = trace.sets.back();
    StateSet next = current;
    bool grew = false;
    for (std::size_t y = 0; y < model.size(); ++y)
      if (!current[y] && model.lower_indicator_positive(current, y)) {
        next[y] = true;
        grew = true;
      }
    if (!grew) break;
    trace.sets.push_back(std::move(next));
  }
  return trace;
}

std::pair<bool, LowerReachTrace> lower_reach(const LowerRateModel& model, const StateSet& members,
                                             std::size_t x) {
  if (members.size() != model.size()) throw DimensionError("state set size mismatch");
  if (x >= model.size()) throw std::out_of_range("state index out of range");
  if (none_of(members)) throw std::invalid_argument("lower reachability needs a nonempty target set");
  LowerReachTrace trace = lower_reach_trace(model, members);
  const bool reached = trace.closure()[x];
  return {reached, std::move(trace)};
}

ErgodicityReport decide_ergodic(const LowerRateModel& model) {
  const std::size_t n = model.size();
  const ReachabilityGraph g = build_graph(model);
  ErgodicityReport report;
  report.top_class = top_class(g);
  if (none_of(report.top_class)) {
    report.failure = ErgodicityFailure::top_class_empty;
    for (std::size_t x = 0; x < n && !report.unreachable_pair; ++x) {
      for (std::size_t y = 0; y < n; ++y)
        if (!upper_reachable(g, y, x)) {
          report.unreachable_pair = std::make_pair(y, x);
          break;
        }
    }
    return report;
  }
  report.trace = lower_reach_trace(model, report.top_class);
  const StateSet& closure = report.trace->closure();
  for (std::size_t x = 0; x < n; ++x)
    if (!closure[x]) {
      report.failure = ErgodicityFailure::not_lower_reachable;
      report.failing_state = x;
      return report;
    }
  report.ergodic = true;
  const std::size_t target =
      static_cast<std::size_t>(std::find(report.top_class.begin(), report.top_class.end(), true) -
                               report.top_class.begin());
  for (std::size_t y = 0; y < n; ++y) report.paths.push_back(upper_path(g, y, target));
  return report;
}

std::pair<bool, StateSet> one_step_absorbing(const DiscreteLTO& op) {
  const std::size_t n = op.size();
  StateSet absorbing(n, false);
  for (std::size_t x = 0; x < n; ++x) absorbing[x] = op.upper(Gamble::indicator(n, x)).min() > 0.0;
  if (none_of(absorbing)) return {false, absorbing};
  const Gamble reach = op(Gamble::indicator(absorbing));
  for (std::size_t x = 0; x < n; ++x)
    if (!absorbing[x] && !(reach[x] > 0.0)) return {false, absorbing};
  return {true, absorbing};
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "true";
    case Verdict::no: return "false";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

std::pair<Verdict, StateSet> regularly_absorbing(const DiscreteLTO& op, std::size_t n_cap) {
  if (n_cap < 1) throw std::invalid_argument("n_cap must be at least 1");
  if (op.semigroup_generated()) {
    auto [yes, set] = one_step_absorbing(op);
    return {yes ? Verdict::yes : Verdict::no, std::move(set)};
  }
  const std::size_t n = op.size();
  // Positivity of Tbar^k 1_x and T^k 1_A depends only on the support of the
  // previous iterate, so both conditions reduce to iterating supports.
  auto upper = [&](const Gamble& g) { return op.upper(g); };
  auto lower = [&](const Gamble& g) { return op(g); };

  StateSet absorbing(n, false);
  bool undecided = false;
  for (std::size_t x = 0; x < n; ++x) {
    StateSet start(n, false);
    start[x] = true;
    switch (iterate_supports(start, n_cap, upper, all_of)) {
      case SupportOutcome::full: absorbing[x] = true; break;
      case SupportOutcome::cycle: break;
      case SupportOutcome::capped: undecided = true; break;
    }
  }
  if (none_of(absorbing)) return {undecided ? Verdict::unknown : Verdict::no, absorbing};

  // Every state outside must be hit by some T^k 1_{X_RA}. Enlarging X_RA by
  // undecided states could only help, so a covering certifies yes.
  StateSet covered = absorbing;
  std::vector<StateSet> visited;
  auto covers = [&](const StateSet& s) {
    for (std::size_t x = 0; x < n; ++x) covered[x] = covered[x] || s[x];
    return all_of(covered);
  };
  const SupportOutcome outcome = iterate_supports(absorbing, n_cap, lower, covers, &visited);
  if (outcome == SupportOutcome::full) return {Verdict::yes, absorbing};
  if (outcome == SupportOutcome::cycle && !undecided) return {Verdict::no, absorbing};
  return {Verdict::unknown, absorbing};
}

LimitResult limit_lower_expectation(const TransitionSolver& solver, const Gamble& f,
                                    double span_tol, double t_cap) {
  if (!(span_tol > 0.0)) throw std::invalid_argument("span_tol must be positive");
  if (!(t_cap > 0.0)) throw std::invalid_argument("t_cap must be positive");
  const double bound = solver.model().norm_bound().value;
  double t = bound > 0.0 ? 1.0 / bound : 1.0;
  SolverResult r = solver.evolve(f, t);
  LimitResult out;
  out.steps_used = r.steps_used;
  Gamble g = std::move(r.value);
  // g = T_t f; T_{2t} f = T_t T_t f.
  while (g.span() > span_tol && 2.0 * t <= t_cap) {
    SolverResult next = solver.evolve(g, t);
    out.steps_used += next.steps_used;
    g = std::move(next.value);
    t *= 2.0;
  }
  out.t_reached = t;
  out.converged = g.span() <= span_tol;
  out.half_span = g.span() / 2.0;
  out.value = (g.max() + g.min()) / 2.0;
  out.final_gamble = std::move(g);
  return out;
}

}  // namespace ictmc
