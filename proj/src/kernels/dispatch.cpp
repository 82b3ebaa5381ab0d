#include <cstdlib>
#include <cstring>

#include "ictmc/kernels.hpp"

namespace ictmc::kernels {

#if defined(ICTMC_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

const KernelTable* avx2() {
#if defined(ICTMC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* initial_table() {
  if (const char* forced = std::getenv("ICTMC_KERNELS")) {
    if (std::strcmp(forced, "scalar") == 0) return &scalar();
    if (std::strcmp(forced, "avx2") == 0 && avx2()) return avx2();
  }
  if (const KernelTable* t = avx2()) return t;
  return &scalar();
}

const KernelTable*& current() {
  static const KernelTable* table = initial_table();
  return table;
}

}  // namespace

const KernelTable& active() { return *current(); }

bool select(const char* name) {
  if (std::strcmp(name, "scalar") == 0) {
    current() = &scalar();
    return true;
  }
  if (std::strcmp(name, "avx2") == 0 && avx2()) {
    current() = avx2();
    return true;
  }
  return false;
}

}  // namespace ictmc::kernels
