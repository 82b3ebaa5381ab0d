// Compiled with -mavx2 -mfma; only reached after the CPUID check in dispatch.cpp.

#include <immintrin.h>

#include <limits>
#include <vector>

#include "ictmc/kernels.hpp"

namespace ictmc::kernels {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

// Lane mask for the last, partial block of a row of n entries.
inline __m256i tail_mask(std::size_t n) {
  const std::size_t rem = n & 3;
  const long long m0 = rem > 0 ? -1 : 0, m1 = rem > 1 ? -1 : 0, m2 = rem > 2 ? -1 : 0;
  return _mm256_setr_epi64x(m0, m1, m2, 0);
}

// Loads f[y..y+3]; lanes past n read as zero.
inline __m256d load_gamble(const double* f, std::size_t y, std::size_t n, __m256i tail) {
  return y + 4 <= n ? _mm256_loadu_pd(f + y) : _mm256_maskload_pd(f + y, tail);
}

void rowset_lower_avx2(const double* rows, const std::uint32_t* row_begin, std::size_t n,
                       std::size_t stride, const double* f, double* out, std::uint32_t* argmin) {
  const __m256i tail = tail_mask(n);
  for (std::size_t x = 0; x < n; ++x) {
    const __m256d fx = _mm256_set1_pd(f[x]);
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t arg = row_begin[x];
    for (std::uint32_t c = row_begin[x]; c < row_begin[x + 1]; ++c) {
      const double* r = rows + c * stride;
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t y = 0; y < n; y += 4) {
        const __m256d d = _mm256_sub_pd(load_gamble(f, y, n, tail), fx);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(r + y), d, acc);
      }
      const double s = hsum(acc);
      if (s < best) {
        best = s;
        arg = c;
      }
    }
    out[x] = best;
    if (argmin) argmin[x] = arg;
  }
}

void interval_lower_avx2(const double* lo, const double* hi, std::size_t n, std::size_t stride,
                         const double* f, double* out) {
  const __m256i tail = tail_mask(n);
  for (std::size_t x = 0; x < n; ++x) {
    const __m256d fx = _mm256_set1_pd(f[x]);
    const double* l = lo + x * stride;
    const double* h = hi + x * stride;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t y = 0; y < n; y += 4) {
      const __m256d d = _mm256_sub_pd(load_gamble(f, y, n, tail), fx);
      const __m256d up = _mm256_cmp_pd(d, _mm256_setzero_pd(), _CMP_GE_OQ);
      const __m256d r = _mm256_blendv_pd(_mm256_loadu_pd(h + y), _mm256_loadu_pd(l + y), up);
      acc = _mm256_fmadd_pd(r, d, acc);
    }
    out[x] = hsum(acc);
  }
}

void bform_product_avx2(const double* xm, const double* ym, double* zm, std::size_t n,
                        std::size_t stride) {
  thread_local std::vector<double> yhat_storage;
  yhat_storage.assign(ym, ym + n * stride);
  double* yhat = yhat_storage.data();
  for (std::size_t i = 0; i < n; ++i) yhat[i * stride + i] = 1.0 + ym[i * stride + i];

  for (std::size_t x = 0; x < n; ++x) {
    double* z = zm + x * stride;
    for (std::size_t y = 0; y < stride; y += 4) _mm256_storeu_pd(z + y, _mm256_setzero_pd());
    for (std::size_t k = 0; k < n; ++k) {
      const double a = k == x ? 1.0 + xm[x * stride + x] : xm[x * stride + k];
      if (a == 0.0) continue;
      const __m256d av = _mm256_set1_pd(a);
      const double* yr = yhat + k * stride;
      for (std::size_t y = 0; y < stride; y += 4)
        _mm256_storeu_pd(z + y, _mm256_fmadd_pd(av, _mm256_loadu_pd(yr + y), _mm256_loadu_pd(z + y)));
    }
    double off = 0.0;
    for (std::size_t y = 0; y < n; ++y)
      if (y != x) off += z[y];
    z[x] = -off;
  }
}

void bform_apply_avx2(const double* b, std::size_t n, std::size_t stride, const double* g,
                      double* out) {
  const __m256i tail = tail_mask(n);
  for (std::size_t x = 0; x < n; ++x) {
    const __m256d gx = _mm256_set1_pd(g[x]);
    const double* r = b + x * stride;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t y = 0; y < n; y += 4) {
      const __m256d d = _mm256_sub_pd(load_gamble(g, y, n, tail), gx);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(r + y), d, acc);
    }
    // The diagonal term multiplies g[x] - g[x] = 0 and drops out.
    out[x] = g[x] + hsum(acc);
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", rowset_lower_avx2, interval_lower_avx2,
                                 bform_product_avx2, bform_apply_avx2};
  return table;
}

}  // namespace ictmc::kernels
