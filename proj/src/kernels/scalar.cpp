#include <limits>
#include <vector>

#include "ictmc/kernels.hpp"

namespace ictmc::kernels {
namespace {

void rowset_lower_scalar(const double* rows, const std::uint32_t* row_begin, std::size_t n,
                         std::size_t stride, const double* f, double* out, std::uint32_t* argmin) {
  for (std::size_t x = 0; x < n; ++x) {
    const double fx = f[x];
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t arg = row_begin[x];
    for (std::uint32_t c = row_begin[x]; c < row_begin[x + 1]; ++c) {
      const double* r = rows + c * stride;
      double acc = 0.0;
      for (std::size_t y = 0; y < n; ++y) acc += r[y] * (f[y] - fx);
      if (acc < best) {
        best = acc;
        arg = c;
      }
    }
    out[x] = best;
    if (argmin) argmin[x] = arg;
  }
}

void interval_lower_scalar(const double* lo, const double* hi, std::size_t n, std::size_t stride,
                           const double* f, double* out) {
  for (std::size_t x = 0; x < n; ++x) {
    const double fx = f[x];
    const double* l = lo + x * stride;
    const double* h = hi + x * stride;
    double acc = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      const double d = f[y] - fx;
      acc += (d >= 0.0 ? l[y] : h[y]) * d;
    }
    out[x] = acc;
  }
}

void bform_product_scalar(const double* xm, const double* ym, double* zm, std::size_t n,
                          std::size_t stride) {
  thread_local std::vector<double> yhat;
  yhat.assign(ym, ym + n * stride);
  for (std::size_t i = 0; i < n; ++i) yhat[i * stride + i] = 1.0 + ym[i * stride + i];

  for (std::size_t x = 0; x < n; ++x) {
    double* z = zm + x * stride;
    for (std::size_t y = 0; y < stride; ++y) z[y] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double a = k == x ? 1.0 + xm[x * stride + x] : xm[x * stride + k];
      if (a == 0.0) continue;
      const double* yr = yhat.data() + k * stride;
      for (std::size_t y = 0; y < n; ++y) z[y] += a * yr[y];
    }
    double off = 0.0;
    for (std::size_t y = 0; y < n; ++y)
      if (y != x) off += z[y];
    z[x] = -off;
  }
}

void bform_apply_scalar(const double* b, std::size_t n, std::size_t stride, const double* g,
                        double* out) {
  for (std::size_t x = 0; x < n; ++x) {
    const double gx = g[x];
    const double* r = b + x * stride;
    double acc = 0.0;
    for (std::size_t y = 0; y < n; ++y)
      if (y != x) acc += r[y] * (g[y] - gx);
    out[x] = gx + acc;
  }
}

}  // namespace

const KernelTable& scalar() {
  static const KernelTable table{"scalar", rowset_lower_scalar, interval_lower_scalar,
                                 bform_product_scalar, bform_apply_scalar};
  return table;
}

}  // namespace ictmc::kernels
