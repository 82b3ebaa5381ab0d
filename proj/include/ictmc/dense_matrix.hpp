#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "ictmc/state_space.hpp"

namespace ictmc {

/// Square row-major matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  const double* row(std::size_t r) const { return data_.data() + r * n_; }
  double* row(std::size_t r) { return data_.data() + r * n_; }

  DenseMatrix operator*(const DenseMatrix& rhs) const;
  Gamble operator*(const Gamble& f) const;
  DenseMatrix& operator+=(const DenseMatrix& rhs);
  DenseMatrix& operator*=(double s);
  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

  /// Max absolute row sum (the operator norm induced by the max norm).
  double inf_norm() const;
  double max_abs_diff(const DenseMatrix& other) const;
  bool all_finite() const;

  bool operator==(const DenseMatrix& other) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

}  // namespace ictmc
