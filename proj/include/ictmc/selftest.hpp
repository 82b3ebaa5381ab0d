#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ictmc/rate_model.hpp"

namespace ictmc {

/// Shape of the random models below: off-diagonal rates uniform in
/// [min_rate, max_rate], each zeroed with probability `sparsity`, which
/// produces non-ergodic structure regularly.
struct RandomRates {
  double min_rate = 0.0;
  double max_rate = 2.0;
  double sparsity = 0.0;
};

LowerRateModel random_precise_model(std::size_t n, std::uint64_t seed, RandomRates rates = {});
/// Interval bounds from two draws per entry; the lower bound is zeroed
/// separately with probability `sparsity`.
LowerRateModel random_interval_model(std::size_t n, std::uint64_t seed, RandomRates rates = {});
/// Between 1 and `max_candidates` candidate rows per state.
LowerRateModel random_rowset_model(std::size_t n, std::uint64_t seed, RandomRates rates = {},
                                   std::size_t max_candidates = 3);
/// Cycles precise / interval / rowsets with the seed.
LowerRateModel random_mixed_model(std::size_t n, std::uint64_t seed, RandomRates rates = {});

struct SelftestOptions {
  std::uint64_t seed = 20170401;
  std::size_t trials = 20;
  /// Negative control: feed a rate operator that breaks homogeneity into the
  /// axiom battery.
  bool inject_corruption = false;
};

struct SelftestFinding {
  std::string check;
  std::string detail;
};

struct SelftestResult {
  std::size_t models = 0;
  std::size_t checks = 0;
  std::vector<SelftestFinding> failures;
  bool passed() const { return failures.empty(); }
};

SelftestResult run_selftest(const SelftestOptions& options);

}  // namespace ictmc
