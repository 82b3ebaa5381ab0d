#include <doctest.h>

#include <algorithm>
#include <limits>

#include "ictmc/oracle.hpp"
#include "ictmc/rate_model.hpp"
#include "ictmc/selftest.hpp"

using namespace ictmc;

namespace {

LowerRateModel symmetric() {
  return LowerRateModel::precise(StateSpace::numbered(2), DenseMatrix{{-1, 1}, {1, -1}});
}

// Rate 0 -> 1 in [1, 2], rate 1 -> 0 in [1, 3].
LowerRateModel interval_pair() {
  return LowerRateModel::interval(StateSpace::numbered(2), DenseMatrix{{0, 1}, {1, 0}},
                                  DenseMatrix{{0, 2}, {3, 0}});
}

Gamble min_over_extremes(const LowerRateModel& m, const Gamble& f) {
  Gamble best = Gamble::constant(f.size(), 1e300);
  for (const DenseMatrix& q : m.extreme_matrices(1u << 20)) {
    const Gamble v = q * f;
    for (std::size_t x = 0; x < f.size(); ++x) best[x] = std::min(best[x], v[x]);
  }
  return best;
}

}  // namespace

TEST_CASE("rate literals") {
  CHECK(Rate::parse("2/7").exact() == Rational(2, 7));
  CHECK(Rate::parse("-0.25").value() == -0.25);
  CHECK(Rate::parse("1e-3").exact() == Rational(1, 1000));
  CHECK(Rate::parse("0").sign() == 0);
  CHECK(Rate::parse("1e-400").sign() == 1);
  CHECK(Rate::parse("3").is_literal());
  CHECK_FALSE(Rate(0.5).is_literal());
  CHECK_THROWS(Rate::parse("abc"));
  CHECK_THROWS(Rate::parse("1/0"));
}

TEST_CASE("lower_apply examples") {
  CHECK(symmetric().lower_apply(Gamble{0, 1}) == Gamble{1, -1});
  CHECK(interval_pair().lower_apply(Gamble{0, 1}) == Gamble{1, -3});
  CHECK(interval_pair().lower_apply(Gamble{0, 1}) == min_over_extremes(interval_pair(), Gamble{0, 1}));
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const LowerRateModel m = random_mixed_model(2 + seed % 4, seed);
    CHECK(m.lower_apply(Gamble::constant(m.size(), 1.7 - seed)) == Gamble::zero(m.size()));
  }
}

TEST_CASE("upper_apply examples") {
  const Gamble f{0.3, -2};
  CHECK(symmetric().upper_apply(f) == symmetric().lower_apply(f));
  CHECK(interval_pair().upper_apply(Gamble{0, 1})[0] == 2);
  CHECK(interval_pair().upper_apply(Gamble::constant(2, 5)) == Gamble::zero(2));
}

TEST_CASE("norm bound examples") {
  CHECK(symmetric().norm_bound().value == 2);
  CHECK(LowerRateModel::zero(StateSpace::numbered(3)).norm_bound().value == 0);
  CHECK(interval_pair().norm_bound().value == 6);
  CHECK(min_over_extremes(interval_pair(), Gamble::indicator(2, 1))[1] == -3);
}

TEST_CASE("induced transition step examples") {
  const auto id = induced_transition_step(symmetric(), 0.0);
  CHECK(id(Gamble{0.25, -4}) == Gamble{0.25, -4});
  CHECK(induced_transition_step(symmetric(), 0.5)(Gamble{0, 1}) == Gamble{0.5, 0.5});
  const Gamble v = induced_transition_step(interval_pair(), 1.0 / 6)(Gamble{0, 1});
  CHECK(v[0] == doctest::Approx(1.0 / 6));
  CHECK(v[1] == doctest::Approx(0.5));
  CHECK_THROWS(induced_transition_step(interval_pair(), 0.2));
}

TEST_CASE("rate_from_transition examples") {
  const auto zero = rate_from_transition(OperatorEvaluation::identity(2), 0.3);
  CHECK(zero(Gamble{1, -2}) == Gamble{0, 0});
  const DenseMatrix t{{1, 0}, {0.5, 0.5}};
  const OperatorEvaluation step{2, [t](const Gamble& f) { return t * f; }};
  CHECK(rate_from_transition(step, 1.0)(Gamble{0, 1}) == Gamble{0, -0.5});
  CHECK_THROWS(rate_from_transition(step, 0.0));
}

TEST_CASE("rate_from_transition inverts the induced step on indicators") {
  // Dyadic step and integer rates keep every intermediate exactly representable.
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 2 + seed % 4;
    std::vector<std::vector<std::vector<double>>> rows(n);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t c = 0; c < 1 + (seed + x) % 3; ++c) {
        std::vector<double> r(n, 0.0);
        double s = 0;
        for (std::size_t y = 0; y < n; ++y)
          if (y != x) s += r[y] = static_cast<double>((seed * 7 + x * 3 + y + c * 5) % 3);
        r[x] = -s;
        rows[x].push_back(r);
      }
    const LowerRateModel m = LowerRateModel::row_sets(StateSpace::numbered(n), rows);
    const double delta = 1.0 / 32;
    REQUIRE(delta * m.norm_bound().value <= 1.0);
    const auto q = rate_from_transition(induced_transition_step(m, delta), delta);
    for (std::size_t y = 0; y < n; ++y)
      CHECK(q(Gamble::indicator(n, y)) == m.lower_apply(Gamble::indicator(n, y)));
  }
}

TEST_CASE("model validation names the offending entry") {
  const auto s = StateSpace::numbered(2);
  try {
    LowerRateModel::precise(s, DenseMatrix{{1, -1}, {1, -1}});
    FAIL("accepted a negative off-diagonal rate");
  } catch (const ModelError& e) {
    CHECK(e.row == 0u);
    CHECK(e.column == 1u);
  }
  CHECK_THROWS_AS(LowerRateModel::row_sets(s, {{{-1, 1.1}}, {{1, -1}}}), ModelError);
  CHECK_THROWS_AS(LowerRateModel::interval(s, DenseMatrix{{0, 3}, {1, 0}}, DenseMatrix{{0, 2}, {3, 0}}),
                  ModelError);
  CHECK_THROWS_AS(LowerRateModel::precise(StateSpace::numbered(3), DenseMatrix{{-1, 1}, {1, -1}}),
                  std::exception);
  CHECK_THROWS_AS(LowerRateModel::precise(s, RateMatrix{{Rate::parse("-1/3"), Rate::parse("0.3333333333")},
                                                        {Rate::parse("0"), Rate::parse("0")}}),
                  ModelError);
  CHECK_NOTHROW(LowerRateModel::precise(s, RateMatrix{{Rate::parse("-1/3"), Rate::parse("1/3")},
                                                      {Rate::parse("0"), Rate::parse("0")}}));
}

TEST_CASE("envelope equals brute force over full selections") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const std::size_t n = 2 + seed % 3;
    const LowerRateModel m = random_rowset_model(n, seed, {0.0, 2.0, seed % 2 ? 0.4 : 0.0}, 3);
    for (std::uint64_t k = 0; k < 5; ++k) {
      const Gamble f = random_gamble(n, seed * 13 + k, -2, 2);
      const Gamble a = m.lower_apply(f), b = min_over_extremes(m, f);
      for (std::size_t x = 0; x < n; ++x) CHECK(a[x] == doctest::Approx(b[x]).epsilon(1e-12));
    }
  }
}

TEST_CASE("interval corner rule equals brute force over corners") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 2 + seed % 4;
    const LowerRateModel m = random_interval_model(n, seed, {0.0, 2.0, seed % 2 ? 0.4 : 0.0});
    for (std::uint64_t k = 0; k < 5; ++k) {
      const Gamble f = random_gamble(n, seed * 17 + k, -2, 2);
      const Gamble a = m.lower_apply(f), b = min_over_extremes(m, f);
      for (std::size_t x = 0; x < n; ++x) CHECK(a[x] == doctest::Approx(b[x]).epsilon(1e-12));
    }
  }
}

TEST_CASE("extreme matrices") {
  CHECK(interval_pair().extreme_count() == 4);
  CHECK(symmetric().extreme_count() == 1);
  CHECK_THROWS(random_interval_model(5, 3).extreme_matrices(8));
}

TEST_CASE("exact indicator signs") {
  const auto m = LowerRateModel::precise(StateSpace::numbered(2), RateMatrix{{Rate::parse("0"), Rate::parse("0")},
                                                                             {Rate::parse("1e-300"), Rate::parse("-1e-300")}});
  CHECK(m.upper_indicator_positive(0, 1));
  CHECK_FALSE(m.upper_indicator_positive(1, 0));
  CHECK_FALSE(m.upper_indicator_positive(1, 1));
  CHECK(m.lower_indicator_positive(StateSet{true, false}, 1));
  CHECK_FALSE(m.lower_indicator_positive(StateSet{false, true}, 0));
  CHECK_FALSE(m.lower_indicator_positive(StateSet{true, false}, 0));
}

TEST_CASE("linear piece selects the minimising generator") {
  const LinearPiece p = interval_pair().linear_piece(Gamble{0, 1});
  CHECK(p.generator == DenseMatrix{{-1, 1}, {3, -3}});
  CHECK(p.stable_duration > 0);
  const LinearPiece q = symmetric().linear_piece(Gamble{0, 1});
  CHECK(q.stable_duration == std::numeric_limits<double>::infinity());
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const LowerRateModel m = random_mixed_model(2 + seed % 4, seed);
    const Gamble g = random_gamble(m.size(), seed);
    const Gamble a = m.lower_apply(g), b = m.linear_piece(g).generator * g;
    for (std::size_t x = 0; x < m.size(); ++x) CHECK(a[x] == doctest::Approx(b[x]).epsilon(1e-12));
  }
}

TEST_CASE("property: rate operator axioms on random models") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const LowerRateModel m = random_mixed_model(2 + seed % 4, seed, {0.0, 2.0, seed % 2 ? 0.4 : 0.0});
    const AxiomReport r = check_rate_axioms(m, 12, seed);
    CAPTURE(seed);
    CHECK(r.passed());
    CHECK(r.max_numerical < 1e-12);
  }
}

TEST_CASE("rate axiom battery flags a corrupted operator") {
  const LowerRateModel m = symmetric();
  OperatorEvaluation q = m.as_operator();
  auto inner = q.apply;
  q.apply = [inner](const Gamble& f) { return inner(f) + 1.0; };
  const AxiomReport r = check_rate_axioms(q, 2.0, 5, 1);
  CHECK_FALSE(r.passed());
  CHECK(std::any_of(r.violations.begin(), r.violations.end(), [](const AxiomViolation& v) {
    return v.axiom == "R1" && v.structural;
  }));
}
