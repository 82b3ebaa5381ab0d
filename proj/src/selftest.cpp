#include "ictmc/selftest.hpp"

#include <random>
#include <sstream>

#include "ictmc/ergodicity.hpp"
#include "ictmc/semigroup.hpp"

namespace ictmc {
namespace {

struct Draw {
  explicit Draw(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  bool coin(double p) { return uniform(0.0, 1.0) < p; }
  std::size_t pick(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  }
  std::mt19937_64 rng;
};

std::vector<double> random_row(Draw& d, std::size_t n, std::size_t x, const RandomRates& rates) {
  std::vector<double> row(n, 0.0);
  double off = 0.0;
  for (std::size_t y = 0; y < n; ++y) {
    if (y == x) continue;
    const double r = d.uniform(rates.min_rate, rates.max_rate);
    row[y] = d.coin(rates.sparsity) ? 0.0 : r;
    off += row[y];
  }
  row[x] = -off;
  return row;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

}  // namespace

LowerRateModel random_precise_model(std::size_t n, std::uint64_t seed, RandomRates rates) {
  Draw d(seed);
  DenseMatrix q(n);
  for (std::size_t x = 0; x < n; ++x) {
    const auto row = random_row(d, n, x, rates);
    for (std::size_t y = 0; y < n; ++y) q(x, y) = row[y];
  }
  return LowerRateModel::precise(StateSpace::numbered(n), q);
}

LowerRateModel random_interval_model(std::size_t n, std::uint64_t seed, RandomRates rates) {
  Draw d(seed);
  DenseMatrix lo(n), hi(n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      if (x == y) continue;
      const double a = d.uniform(rates.min_rate, rates.max_rate);
      const double b = d.uniform(rates.min_rate, rates.max_rate);
      const bool upper_zero = d.coin(rates.sparsity);
      const bool lower_zero = d.coin(rates.sparsity);
      hi(x, y) = upper_zero ? 0.0 : std::max(a, b);
      lo(x, y) = upper_zero || lower_zero ? 0.0 : std::min(a, b);
    }
  return LowerRateModel::interval(StateSpace::numbered(n), lo, hi);
}

LowerRateModel random_rowset_model(std::size_t n, std::uint64_t seed, RandomRates rates,
                                   std::size_t max_candidates) {
  Draw d(seed);
  std::vector<std::vector<std::vector<double>>> rows(n);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t count = d.pick(1, std::max<std::size_t>(1, max_candidates));
    for (std::size_t c = 0; c < count; ++c) rows[x].push_back(random_row(d, n, x, rates));
  }
  return LowerRateModel::row_sets(StateSpace::numbered(n), rows);
}

LowerRateModel random_mixed_model(std::size_t n, std::uint64_t seed, RandomRates rates) {
  switch (seed % 3) {
    case 0: return random_precise_model(n, seed, rates);
    case 1: return random_interval_model(n, seed, rates);
    default: return random_rowset_model(n, seed, rates);
  }
}

SelftestResult run_selftest(const SelftestOptions& options) {
  if (options.trials < 1) throw std::invalid_argument("trials must be at least 1");
  SelftestResult result;
  auto note = [&](bool ok, const std::string& check, const std::string& detail) {
    ++result.checks;
    if (!ok) result.failures.push_back({check, detail});
  };

  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    const std::uint64_t seed = options.seed + 7919 * trial;
    const std::size_t n = 2 + trial % 3;
    const LowerRateModel model = random_mixed_model(n, seed, {0.0, 2.0, trial % 2 ? 0.4 : 0.0});
    const std::string tag = std::string(to_string(model.kind())) + " model, " + std::to_string(n) +
                            " states, seed " + hex(seed);
    ++result.models;

    const AxiomReport rates = check_rate_axioms(model, 10, seed);
    for (const auto& v : rates.violations)
      note(!v.structural, "rate axioms " + v.axiom, tag + ": " + v.witness);
    note(rates.passed(), "rate axioms", tag);

    const TransitionSolver solver(model, {1e-7, 30});
    const DiscreteLTO op = solver.evolve_operator(1.0);
    const AxiomReport lto = check_lto_axioms(op, 5, seed);
    for (const auto& v : lto.violations)
      note(!v.structural, "transition axioms " + v.axiom, tag + ": " + v.witness);
    note(lto.passed(), "transition axioms", tag);

    const Gamble f = random_gamble(n, seed + 1);
    const double derivative = derivative_check(solver, f, 1.0, 1e-3);
    note(derivative <= 1e-3, "backward equation",
         tag + ": residual " + std::to_string(derivative));

    const bool ergodic = decide_ergodic(model).ergodic;
    const bool absorbing = one_step_absorbing(op).first;
    note(ergodic == absorbing, "decision consistency",
         tag + ": reachability says " + (ergodic ? "ergodic" : "not ergodic") +
             ", T_1 is " + (absorbing ? "" : "not ") + "1-step absorbing");
  }

  if (options.inject_corruption) {
    // Negative control: Q(f) + 1 violates Q(mu) = 0 and homogeneity, so the
    // battery has to flag it.
    const LowerRateModel model = random_precise_model(3, options.seed);
    OperatorEvaluation q = model.as_operator();
    auto inner = q.apply;
    q.apply = [inner](const Gamble& f) { return inner(f) + 1.0; };
    const AxiomReport report = check_rate_axioms(q, model.norm_bound().value, 10, options.seed);
    ++result.models;
    for (const auto& v : report.violations)
      note(!v.structural, "rate axioms " + v.axiom, "corrupted operator: " + v.witness);
  }
  return result;
}

}  // namespace ictmc
