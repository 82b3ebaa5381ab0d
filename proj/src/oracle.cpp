#include "ictmc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace ictmc::oracle {
namespace {

constexpr int kTaylorDegree = 18;

}  // namespace

DenseMatrix expm(const DenseMatrix& q, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("expm: t must be finite and >= 0");
  if (!q.all_finite()) throw std::invalid_argument("expm: matrix has non-finite entries");
  const std::size_t n = q.size();
  DenseMatrix a = q;
  a *= t;
  const double norm = a.inf_norm();
  if (norm > kExpmNormLimit)
    throw BudgetError("expm: ||Q t|| = " + std::to_string(norm) + " exceeds " +
                      std::to_string(kExpmNormLimit));
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  a *= std::ldexp(1.0, -squarings);

  // Horner form of the truncated Taylor series.
  DenseMatrix result = DenseMatrix::identity(n);
  for (int k = kTaylorDegree; k >= 1; --k) {
    result = a * result;
    result *= 1.0 / k;
    result += DenseMatrix::identity(n);
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

Gamble envelope_bruteforce(const LowerRateModel& model, const Gamble& f, double t,
                           std::size_t grid) {
  if (f.size() != model.size()) throw DimensionError("gamble size does not match the model");
  if (grid < 1 || grid > kMaxGrid)
    throw BudgetError("grid must be between 1 and " + std::to_string(kMaxGrid));
  if (model.extreme_count() > kMaxExtremeMatrices)
    throw BudgetError("model has " + std::to_string(model.extreme_count()) +
                      " extreme matrices; the oracle handles at most " +
                      std::to_string(kMaxExtremeMatrices));
  if (!(t >= 0.0)) throw std::invalid_argument("t must be non-negative");
  if (t == 0.0) return f;

  const double slice = t / static_cast<double>(grid);
  std::vector<DenseMatrix> steps;
  for (const DenseMatrix& q : model.extreme_matrices(kMaxExtremeMatrices))
    steps.push_back(expm(q, slice));

  // Depth-first over schedules, applying slices from the last one backwards
  // so that shared suffixes are computed once.
  Gamble best = Gamble::constant(f.size(), std::numeric_limits<double>::max());
  std::function<void(const Gamble&, std::size_t)> walk = [&](const Gamble& v, std::size_t depth) {
    if (depth == grid) {
      for (std::size_t x = 0; x < v.size(); ++x) best[x] = std::min(best[x], v[x]);
      return;
    }
    for (const DenseMatrix& p : steps) walk(p * v, depth + 1);
  };
  walk(f, 0);
  return best;
}

BoolMatrix discrete_power_positivity(const DenseMatrix& t, std::size_t k) {
  if (k < 1) throw std::invalid_argument("power must be at least 1");
  const std::size_t n = t.size();
  BoolMatrix base(n, std::vector<bool>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) base[i][j] = t(i, j) > 0.0;
  BoolMatrix result = base;
  for (std::size_t p = 1; p < k; ++p) {
    BoolMatrix next(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t m = 0; m < n; ++m)
        if (result[i][m])
          for (std::size_t j = 0; j < n; ++j)
            if (base[m][j]) next[i][j] = true;
    result = std::move(next);
  }
  return result;
}

}  // namespace ictmc::oracle
