#include <doctest.h>

#include "ictmc/ergodicity.hpp"
#include "ictmc/oracle.hpp"
#include "ictmc/selftest.hpp"

using namespace ictmc;

namespace {

LowerRateModel precise(const DenseMatrix& q) {
  return LowerRateModel::precise(StateSpace::numbered(q.size()), q);
}

LowerRateModel symmetric() { return precise(DenseMatrix{{-1, 1}, {1, -1}}); }
LowerRateModel absorbing() { return precise(DenseMatrix{{0, 0}, {1, -1}}); }
LowerRateModel zero(std::size_t n) { return LowerRateModel::zero(StateSpace::numbered(n)); }

LowerRateModel interval_pair() {
  return LowerRateModel::interval(StateSpace::numbered(2), DenseMatrix{{0, 1}, {1, 0}},
                                  DenseMatrix{{0, 2}, {3, 0}});
}

// Moves 2 -> 1 -> 0 at lower rate 1; 0 -> 1 and 1 -> 2 only possibly.
LowerRateModel chain() {
  return LowerRateModel::interval(StateSpace::numbered(3), DenseMatrix{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}},
                                  DenseMatrix{{0, 1, 0}, {1, 0, 1}, {0, 1, 0}});
}

}  // namespace

TEST_CASE("reachability graph examples") {
  CHECK(build_graph(zero(3)).edges().empty());
  using Edges = std::vector<std::pair<std::size_t, std::size_t>>;
  CHECK(build_graph(symmetric()).edges() == Edges{{0, 1}, {1, 0}});
  CHECK(build_graph(absorbing()).edges() == Edges{{1, 0}});
}

TEST_CASE("upper reachability examples") {
  const auto g = build_graph(absorbing());
  CHECK(upper_reachable(g, 1, 1));
  CHECK(upper_reachable(build_graph(zero(2)), 0, 0));
  CHECK_FALSE(upper_reachable(g, 0, 1));
  CHECK(upper_reachable(build_graph(symmetric()), 0, 1));
  CHECK(upper_path(g, 1, 0) == std::vector<std::size_t>{1, 0});
  CHECK(upper_path(g, 0, 1).empty());
}

TEST_CASE("top class examples") {
  CHECK(top_class(build_graph(symmetric())) == StateSet{true, true});
  CHECK(top_class(build_graph(absorbing())) == StateSet{true, false});
  CHECK(top_class(build_graph(zero(3))) == StateSet{false, false, false});
  CHECK(top_class(build_graph(zero(1))) == StateSet{true});
}

TEST_CASE("lower reach examples") {
  const auto [in, trace0] = lower_reach(chain(), StateSet{true, false, true}, 2);
  CHECK(in);
  const auto [ok, trace] = lower_reach(chain(), StateSet{true, false, false}, 2);
  CHECK(ok);
  REQUIRE(trace.sets.size() >= 3);
  CHECK(trace.sets[0] == StateSet{true, false, false});
  CHECK(trace.sets[1] == StateSet{true, true, false});
  CHECK(trace.sets[2] == StateSet{true, true, true});
  const auto [none, empty_trace] = lower_reach(zero(2), StateSet{true, false}, 1);
  CHECK_FALSE(none);
  CHECK(empty_trace.terminal() == 0);
  CHECK_THROWS(lower_reach(zero(2), StateSet{false, false}, 1));
}

TEST_CASE("property: lower reach trace is monotone and short") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 2 + seed % 4;
    const LowerRateModel m = random_mixed_model(n, seed, {0.0, 2.0, 0.5});
    StateSet a(n, false);
    a[seed % n] = true;
    const LowerReachTrace t = lower_reach_trace(m, a);
    CHECK(t.terminal() <= n - 1);
    for (std::size_t k = 1; k < t.sets.size(); ++k)
      for (std::size_t x = 0; x < n; ++x)
        if (t.sets[k - 1][x]) CHECK(t.sets[k][x]);
  }
}

TEST_CASE("decide_ergodic examples") {
  const ErgodicityReport s = decide_ergodic(symmetric());
  CHECK(s.ergodic);
  CHECK(s.top_class == StateSet{true, true});
  const ErgodicityReport z = decide_ergodic(zero(2));
  CHECK_FALSE(z.ergodic);
  CHECK(z.failure == ErgodicityFailure::top_class_empty);
  CHECK(z.unreachable_pair.has_value());
  const ErgodicityReport a = decide_ergodic(absorbing());
  CHECK(a.ergodic);
  CHECK(a.top_class == StateSet{true, false});
  CHECK(decide_ergodic(interval_pair()).ergodic);
  CHECK(decide_ergodic(chain()).ergodic);
  // Two absorbing states reachable from a third: top class empty.
  CHECK_FALSE(decide_ergodic(precise(DenseMatrix{{0, 0, 0}, {0, 0, 0}, {1, 1, -2}})).ergodic);
  // Top class {0} exists but state 1 only possibly moves towards it.
  const auto weak = LowerRateModel::interval(StateSpace::numbered(2), DenseMatrix{{0, 0}, {0, 0}},
                                             DenseMatrix{{0, 0}, {1, 0}});
  const ErgodicityReport w = decide_ergodic(weak);
  CHECK_FALSE(w.ergodic);
  CHECK(w.failure == ErgodicityFailure::not_lower_reachable);
  CHECK(w.failing_state == 1u);
}

TEST_CASE("decide_ergodic agrees with the limit of the exact semigroup") {
  // e^{Qt} rows tend to (0.5, 0.5) and (1, 0) for the two ergodic examples.
  const DenseMatrix es = oracle::expm(DenseMatrix{{-1, 1}, {1, -1}}, 30.0);
  CHECK(es(1, 0) == doctest::Approx(0.5));
  const DenseMatrix ea = oracle::expm(DenseMatrix{{0, 0}, {1, -1}}, 30.0);
  CHECK(ea(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("one-step absorbing examples") {
  const auto [id_ok, id_set] = one_step_absorbing(DiscreteLTO::identity(3));
  CHECK_FALSE(id_ok);
  CHECK(id_set == StateSet{false, false, false});
  const auto [d_ok, d_set] = one_step_absorbing(DiscreteLTO::stochastic(DenseMatrix{{0.5, 0.5}, {0.1, 0.9}}));
  CHECK(d_ok);
  CHECK(d_set == StateSet{true, true});
  const TransitionSolver s(absorbing());
  const auto [a_ok, a_set] = one_step_absorbing(s.evolve_operator(1.0));
  CHECK(a_ok);
  CHECK(a_set == StateSet{true, false});
}

TEST_CASE("regularly absorbing examples") {
  const auto [v, set] = regularly_absorbing(DiscreteLTO::identity(3), 10);
  CHECK(v == Verdict::no);
  CHECK(set == StateSet{false, false, false});
  // 0 -> 1 -> 2 -> 2: state 2 is reached from every state within two steps.
  const DenseMatrix p{{0, 1, 0}, {0, 0, 1}, {0, 0, 1}};
  const DiscreteLTO op = DiscreteLTO::stochastic(p);
  CHECK_FALSE(one_step_absorbing(op).first);
  const auto two = oracle::discrete_power_positivity(p, 2);
  CHECK(two[0][2]);
  CHECK(two[1][2]);
  const auto [v2, set2] = regularly_absorbing(op, 4);
  CHECK(v2 == Verdict::yes);
  CHECK(set2[2]);
  CHECK(std::string(to_string(Verdict::unknown)) == "unknown");
}

TEST_CASE("property: regular absorption agrees with one-step absorption for semigroups") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TransitionSolver s(random_mixed_model(3, seed, {0.0, 2.0, 0.5}));
    const DiscreteLTO op = s.evolve_operator(1.0);
    const bool one = one_step_absorbing(op).first;
    CHECK((regularly_absorbing(op, 6).first == Verdict::yes) == one);
  }
}

TEST_CASE("limit examples") {
  const LimitResult s = limit_lower_expectation(TransitionSolver(symmetric()), Gamble{0, 1}, 1e-6, 1e3);
  CHECK(s.converged);
  CHECK(s.value == doctest::Approx(0.5).epsilon(1e-6));
  const LimitResult i = limit_lower_expectation(TransitionSolver(interval_pair()), Gamble{0, 1}, 1e-6, 1e3);
  CHECK(i.converged);
  CHECK(i.value == doctest::Approx(0.25).epsilon(1e-6));
  const LimitResult z = limit_lower_expectation(TransitionSolver(zero(2)), Gamble{0, 1}, 1e-6, 1e3);
  CHECK_FALSE(z.converged);
  CHECK(z.final_gamble == Gamble{0, 1});
}

TEST_CASE("property: exact decisions match positivity of the semigroup") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 2 + seed % 3;
    const LowerRateModel m = random_mixed_model(n, seed, {0.0, 2.0, 0.5});
    const TransitionSolver s(m);
    const ReachabilityGraph g = build_graph(m);
    for (std::size_t x = 0; x < n; ++x) {
      const Gamble ind = Gamble::indicator(n, x);
      const StateSet upper_pos = above_minimum_pattern(s, ind, 1.0, Envelope::upper);
      const StateSet lower_pos = above_minimum_pattern(s, ind, 1.0, Envelope::lower);
      StateSet a(n, false);
      a[x] = true;
      for (std::size_t y = 0; y < n; ++y) {
        CAPTURE(seed);
        CHECK(upper_reachable(g, y, x) == upper_pos[y]);
        CHECK(lower_reach(m, a, y).first == lower_pos[y]);
      }
    }
    for (double t : {0.5, 1.0, 2.0})
      CHECK(decide_ergodic(m).ergodic == one_step_absorbing(s.evolve_operator(t)).first);
  }
}

TEST_CASE("property: ergodic models converge and identity dynamics do not") {
  std::size_t tried = 0;
  for (std::uint64_t seed = 0; tried < 5 && seed < 50; ++seed) {
    const LowerRateModel m = random_mixed_model(3, seed, {0.5, 2.0, 0.2});
    if (!decide_ergodic(m).ergodic) continue;
    ++tried;
    const TransitionSolver s(m);
    for (std::uint64_t k = 0; k < 20; ++k)
      CHECK(limit_lower_expectation(s, random_gamble(3, k), 1e-6, 1e3).converged);
  }
  CHECK(tried == 5);
  const LimitResult z = limit_lower_expectation(TransitionSolver(zero(3)), Gamble{0, 1, 2}, 1e-6, 1e2);
  CHECK_FALSE(z.converged);
  CHECK(z.final_gamble.span() > 1e-6);
}
