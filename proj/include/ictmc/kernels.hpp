#pragma once

// Inner loops of the envelope evaluation and of the Euler-product powering.
// Every kernel has a portable scalar reference and an AVX2+FMA variant; the
// variant is picked once at startup from CPUID, or forced through the
// ICTMC_KERNELS environment variable ("scalar" or "avx2").

#include <cstddef>
#include <cstdint>

namespace ictmc::kernels {

struct KernelTable {
  const char* name;

  /// out[x] = min over candidate rows c in [row_begin[x], row_begin[x+1]) of
  /// sum_y rows[c*stride + y] * (f[y] - f[x]). The diagonal entry of every
  /// packed row is zero. `argmin` (may be null) receives the winning row.
  void (*rowset_lower)(const double* rows, const std::uint32_t* row_begin, std::size_t n,
                       std::size_t stride, const double* f, double* out, std::uint32_t* argmin);

  /// out[x] = sum_y r_xy (f[y] - f[x]) with r_xy = lo_xy where f[y] >= f[x]
  /// and hi_xy otherwise.
  void (*interval_lower)(const double* lo, const double* hi, std::size_t n, std::size_t stride,
                         const double* f, double* out);

  /// Z = (I + X)(I + Y) - I for matrices whose rows sum to zero and whose
  /// off-diagonal entries are non-negative. Off-diagonal entries of Z are
  /// accumulated from non-negative terms only; the diagonal is minus the
  /// off-diagonal row sum. Z must not alias X or Y.
  void (*bform_product)(const double* x, const double* y, double* z, std::size_t n,
                        std::size_t stride);

  /// out[x] = g[x] + sum_{y != x} b[x*stride + y] (g[y] - g[x]).
  void (*bform_apply)(const double* b, std::size_t n, std::size_t stride, const double* g,
                      double* out);
};

const KernelTable& scalar();
/// Null when the CPU (or the build) lacks AVX2/FMA.
const KernelTable* avx2();
/// The table used by the library.
const KernelTable& active();

/// Override the active table; returns false if the requested ISA is
/// unavailable. Intended for tests and benchmarking.
bool select(const char* name);

/// Padded row stride for n states (multiple of 4 doubles).
constexpr std::size_t padded_stride(std::size_t n) { return (n + 3) & ~std::size_t{3}; }

}  // namespace ictmc::kernels
