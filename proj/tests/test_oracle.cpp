#include <doctest.h>

#include <cmath>

#include "ictmc/oracle.hpp"
#include "ictmc/selftest.hpp"
#include "ictmc/semigroup.hpp"

using namespace ictmc;

TEST_CASE("expm examples") {
  CHECK(oracle::expm(DenseMatrix(3), 2.0) == DenseMatrix::identity(3));
  const DenseMatrix e = oracle::expm(DenseMatrix{{-1, 1}, {1, -1}}, 1.0);
  const double a = (1 + std::exp(-2.0)) / 2, b = (1 - std::exp(-2.0)) / 2;
  CHECK(e(0, 0) == doctest::Approx(a).epsilon(1e-14));
  CHECK(e(0, 1) == doctest::Approx(b).epsilon(1e-14));
  CHECK(e(1, 0) == doctest::Approx(b).epsilon(1e-14));
  CHECK(e(1, 1) == doctest::Approx(a).epsilon(1e-14));
  CHECK_THROWS_AS(oracle::expm(DenseMatrix{{-1, 1}, {1, -1}}, 1e4), oracle::BudgetError);
  CHECK_THROWS(oracle::expm(DenseMatrix{{-1, 1}, {1, -1}}, -1.0));
}

TEST_CASE("property: expm is stochastic and a semigroup") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t n = 2 + seed % 5;
    const LowerRateModel m = random_precise_model(n, seed, {0.0, 3.0, 0.3});
    const DenseMatrix q = m.extreme_matrices(1).front();
    const DenseMatrix e = oracle::expm(q, 1.3);
    for (std::size_t x = 0; x < n; ++x) {
      double s = 0;
      for (std::size_t y = 0; y < n; ++y) {
        CHECK(e(x, y) >= -1e-12);
        s += e(x, y);
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK((oracle::expm(q, 0.5) * oracle::expm(q, 0.8)).max_abs_diff(e) < 1e-12);
  }
}

TEST_CASE("brute-force envelope examples") {
  const DenseMatrix q{{-1, 1}, {2, -2}};
  const LowerRateModel p = LowerRateModel::precise(StateSpace::numbered(2), q);
  const Gamble f{0, 1};
  CHECK(oracle::envelope_bruteforce(p, f, 0.7, 1) == oracle::expm(q, 0.7) * f);
  const Gamble sliced = oracle::envelope_bruteforce(p, f, 0.7, 3), whole = oracle::expm(q, 0.7) * f;
  CHECK(max_norm(sliced - whole) < 1e-14);
  CHECK(oracle::envelope_bruteforce(p, f, 0.0, 3) == f);

  const LowerRateModel iv = LowerRateModel::interval(StateSpace::numbered(2), DenseMatrix{{0, 1}, {1, 0}},
                                                     DenseMatrix{{0, 2}, {3, 0}});
  const Gamble g4 = oracle::envelope_bruteforce(iv, f, 5.0, 4);
  const Gamble g6 = oracle::envelope_bruteforce(iv, f, 5.0, 6);
  const TransitionSolver s(iv);
  const Gamble v = s.evolve(f, 5.0).value;
  for (std::size_t x = 0; x < 2; ++x) {
    CHECK(std::abs(g4[x] - g6[x]) <= 5e-3);
    CHECK(g4[x] >= v[x] - s.options().tolerance);
    CHECK(g6[x] >= v[x] - s.options().tolerance);
  }
  CHECK_THROWS_AS(oracle::envelope_bruteforce(iv, f, 1.0, 7), oracle::BudgetError);
  CHECK_THROWS_AS(oracle::envelope_bruteforce(random_interval_model(4, 1), Gamble{0, 1, 2, 3}, 1.0, 2),
                  oracle::BudgetError);
}

TEST_CASE("boolean power examples") {
  using oracle::BoolMatrix;
  const BoolMatrix id{{true, false}, {false, true}};
  for (std::size_t k : {1u, 2u, 5u}) CHECK(oracle::discrete_power_positivity(DenseMatrix::identity(2), k) == id);
  const BoolMatrix full{{true, true}, {true, true}};
  CHECK(oracle::discrete_power_positivity(DenseMatrix{{0.5, 0.5}, {1, 0}}, 2) == full);
  CHECK(oracle::discrete_power_positivity(DenseMatrix{{0, 1}, {1, 0}}, 2) == id);
  CHECK_THROWS(oracle::discrete_power_positivity(DenseMatrix::identity(2), 0));
}
