#pragma once

// Brute-force references for tests: a dense matrix exponential and an
// enumeration of piecewise-constant schedules of extreme matrices. These use
// a different discretisation family than the solver on purpose.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ictmc/dense_matrix.hpp"
#include "ictmc/rate_model.hpp"
#include "ictmc/state_space.hpp"

namespace ictmc::oracle {

class BudgetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Largest ||Q t||_inf accepted by expm.
inline constexpr double kExpmNormLimit = 1024.0;
inline constexpr std::uint64_t kMaxExtremeMatrices = 8;
inline constexpr std::size_t kMaxGrid = 6;

/// e^{Qt} by scaling and squaring with a degree-18 Taylor kernel.
DenseMatrix expm(const DenseMatrix& q, double t);

/// Minimum over every schedule that holds one extreme matrix on each of
/// `grid` equal time slices of the expectation of f. An upper bound on
/// T_t f that tightens as the grid is refined.
Gamble envelope_bruteforce(const LowerRateModel& model, const Gamble& f, double t,
                           std::size_t grid);

using BoolMatrix = std::vector<std::vector<bool>>;

/// Sign pattern of T^k from boolean matrix powers.
BoolMatrix discrete_power_positivity(const DenseMatrix& t, std::size_t k);

}  // namespace ictmc::oracle
