#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ictmc/kernels.hpp"
#include "ictmc/rate_model.hpp"
#include "ictmc/selftest.hpp"

using namespace ictmc;
namespace k = ictmc::kernels;

namespace {

// Padded intensity rows: off-diagonal in [0, 2), zero diagonal, zero padding.
std::vector<double> random_rows(std::mt19937_64& rng, std::size_t rows, std::size_t n,
                                std::size_t stride, double sparsity) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out(rows * stride, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t y = 0; y < n; ++y)
      if (y != r % n && u(rng) >= sparsity) out[r * stride + y] = 2.0 * u(rng);
  return out;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, std::size_t stride) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> out(stride, 0.0);
  for (std::size_t i = 0; i < n; ++i) out[i] = u(rng);
  return out;
}

// B-form matrix: non-negative off-diagonal entries, diagonal minus their sum,
// scaled so that I + B stays non-negative.
std::vector<double> random_bform(std::mt19937_64& rng, std::size_t n, std::size_t stride) {
  std::vector<double> b = random_rows(rng, n, n, stride, 0.3);
  const double scale = 0.45 / static_cast<double>(n);
  for (std::size_t x = 0; x < n; ++x) {
    double s = 0.0;
    for (std::size_t y = 0; y < n; ++y) s += b[x * stride + y] *= scale;
    b[x * stride + x] = -s;
  }
  return b;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])));
  return m;
}

int sign(double v) { return (v > 0) - (v < 0); }

}  // namespace

TEST_CASE("active kernel table follows the selection") {
  CHECK(k::select("scalar"));
  CHECK(std::string(k::active().name) == "scalar");
  CHECK_FALSE(k::select("sse9"));
  if (k::avx2()) {
    CHECK(k::select("avx2"));
    CHECK(std::string(k::active().name) == "avx2");
  }
  k::select("scalar");
}

TEST_CASE("padded stride") {
  CHECK(k::padded_stride(1) == 4);
  CHECK(k::padded_stride(4) == 4);
  CHECK(k::padded_stride(5) == 8);
}

TEST_CASE("scalar kernels on a hand example") {
  // Rows for state 0: (0, 1) and (0, 2); state 1: (3, 0).
  const std::size_t stride = k::padded_stride(2);
  std::vector<double> rows(3 * stride, 0.0);
  rows[0 * stride + 1] = 1;
  rows[1 * stride + 1] = 2;
  rows[2 * stride + 0] = 3;
  const std::uint32_t begin[] = {0, 2, 3};
  const double f[4] = {0, 1, 0, 0};
  double out[2];
  std::uint32_t arg[2];
  k::scalar().rowset_lower(rows.data(), begin, 2, stride, f, out, arg);
  CHECK(out[0] == 1);
  CHECK(out[1] == -3);
  CHECK(arg[0] == 0);
  CHECK(arg[1] == 2);

  std::vector<double> lo(2 * stride, 0.0), hi(2 * stride, 0.0);
  lo[1] = 1, hi[1] = 2, lo[stride] = 1, hi[stride] = 3;
  k::scalar().interval_lower(lo.data(), hi.data(), 2, stride, f, out);
  CHECK(out[0] == 1);
  CHECK(out[1] == -3);
}

TEST_CASE("avx2 kernels match the scalar reference") {
  const k::KernelTable* fast = k::avx2();
  if (!fast) {
    MESSAGE("AVX2 unavailable; equivalence not exercised");
    return;
  }
  const k::KernelTable& ref = k::scalar();
  std::mt19937_64 rng(0xa5a5);
  for (std::size_t n = 1; n <= 19; ++n) {
    const std::size_t stride = k::padded_stride(n);
    for (int rep = 0; rep < 20; ++rep) {
      const double sparsity = rep % 2 ? 0.4 : 0.0;
      CAPTURE(n);
      CAPTURE(rep);

      std::vector<std::uint32_t> begin{0};
      std::vector<double> rows;
      for (std::size_t x = 0; x < n; ++x) {
        const std::size_t c = 1 + rng() % 3;
        for (std::size_t i = 0; i < c; ++i) {
          auto r = random_rows(rng, 1, n, stride, sparsity);
          r[x] = 0.0;
          rows.insert(rows.end(), r.begin(), r.end());
        }
        begin.push_back(begin.back() + static_cast<std::uint32_t>(c));
      }
      const auto f = random_vector(rng, n, stride);
      std::vector<double> a(n), b(n);
      std::vector<std::uint32_t> ia(n), ib(n);
      ref.rowset_lower(rows.data(), begin.data(), n, stride, f.data(), a.data(), ia.data());
      fast->rowset_lower(rows.data(), begin.data(), n, stride, f.data(), b.data(), ib.data());
      CHECK(max_rel_diff(a, b) <= 1e-14);

      const auto lo = random_rows(rng, n, n, stride, sparsity);
      auto hi = lo;
      for (double& v : hi) v *= 1.5;
      ref.interval_lower(lo.data(), hi.data(), n, stride, f.data(), a.data());
      fast->interval_lower(lo.data(), hi.data(), n, stride, f.data(), b.data());
      CHECK(max_rel_diff(a, b) <= 1e-14);

      const auto x = random_bform(rng, n, stride);
      const auto y = random_bform(rng, n, stride);
      std::vector<double> za(n * stride, 0.0), zb(n * stride, 0.0);
      ref.bform_product(x.data(), y.data(), za.data(), n, stride);
      fast->bform_product(x.data(), y.data(), zb.data(), n, stride);
      CHECK(max_rel_diff(za, zb) <= 1e-14);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) {
            CHECK(za[i * stride + j] >= 0.0);
            CHECK(sign(za[i * stride + j]) == sign(zb[i * stride + j]));
          }

      std::vector<double> ga(stride, 0.0), gb(stride, 0.0);
      ref.bform_apply(x.data(), n, stride, f.data(), ga.data());
      fast->bform_apply(x.data(), n, stride, f.data(), gb.data());
      CHECK(max_rel_diff(ga, gb) <= 1e-14);
    }
  }
}

TEST_CASE("model evaluation agrees across kernel tables") {
  if (!k::avx2()) return;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const LowerRateModel m = random_mixed_model(2 + seed % 7, seed, {0.0, 2.0, 0.3});
    const Gamble f = random_gamble(m.size(), seed);
    k::select("scalar");
    const Gamble a = m.lower_apply(f);
    k::select("avx2");
    const Gamble b = m.lower_apply(f);
    for (std::size_t x = 0; x < m.size(); ++x) CHECK(a[x] == doctest::Approx(b[x]).epsilon(1e-13));
  }
  k::select("scalar");
}
