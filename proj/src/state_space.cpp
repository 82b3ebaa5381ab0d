#include "ictmc/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "ictmc/dense_matrix.hpp"

namespace ictmc {

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw std::invalid_argument("state space must contain at least one state");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], i).second)
      throw std::invalid_argument("duplicate state label '" + labels_[i] + "'");
  }
}

StateSpace StateSpace::numbered(std::size_t n) {
  std::vector<std::string> labels;
  labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));
  return StateSpace(std::move(labels));
}

std::size_t StateSpace::index(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) throw std::out_of_range("unknown state '" + label + "'");
  return it->second;
}

Gamble::Gamble(std::vector<double> values) : values_(std::move(values)) {
  if (!is_finite()) throw std::invalid_argument("gamble entries must be finite");
}

Gamble::Gamble(std::initializer_list<double> values) : Gamble(std::vector<double>(values)) {}

Gamble Gamble::constant(std::size_t n, double value) {
  return Gamble(std::vector<double>(n, value));
}

Gamble Gamble::indicator(std::size_t n, std::size_t state) {
  std::vector<double> v(n, 0.0);
  v.at(state) = 1.0;
  return Gamble(std::move(v));
}

Gamble Gamble::indicator(const StateSet& members) {
  std::vector<double> v(members.size(), 0.0);
  for (std::size_t i = 0; i < members.size(); ++i)
    if (members[i]) v[i] = 1.0;
  return Gamble(std::move(v));
}

double Gamble::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Gamble::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool Gamble::is_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Gamble Gamble::operator-() const {
  Gamble out = *this;
  for (double& v : out.values_) v = -v;
  return out;
}

Gamble& Gamble::operator+=(const Gamble& other) {
  if (other.size() != size()) throw DimensionError("gamble size mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Gamble& Gamble::operator-=(const Gamble& other) {
  if (other.size() != size()) throw DimensionError("gamble size mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Gamble& Gamble::operator+=(double mu) {
  for (double& v : values_) v += mu;
  return *this;
}

Gamble& Gamble::operator*=(double lambda) {
  for (double& v : values_) v *= lambda;
  return *this;
}

Gamble abs(const Gamble& f) {
  Gamble out = f;
  for (double& v : out.values()) v = std::fabs(v);
  return out;
}

double max_norm(const Gamble& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::fabs(v));
  return m;
}

Gamble OperatorEvaluation::operator()(const Gamble& f) const {
  if (f.size() != dimension)
    throw DimensionError("operator of dimension " + std::to_string(dimension) +
                         " applied to gamble of size " + std::to_string(f.size()));
  Gamble out = apply(f);
  if (out.size() != dimension) throw DimensionError("operator returned a gamble of wrong size");
  return out;
}

OperatorEvaluation OperatorEvaluation::conjugate() const {
  auto inner = apply;
  return {dimension, [inner](const Gamble& f) { return -inner(-f); }, nonneg_homogeneous};
}

OperatorEvaluation OperatorEvaluation::identity(std::size_t n) {
  return {n, [](const Gamble& f) { return f; }, true};
}

Gamble random_gamble(std::size_t n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return Gamble(std::move(v));
}

double operator_norm_estimate(const OperatorEvaluation& op, std::size_t samples,
                              std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("operator_norm_estimate: samples must be positive");
  if (!op.nonneg_homogeneous)
    throw std::invalid_argument("operator_norm_estimate: operator must be non-negatively homogeneous");
  const std::size_t n = op.dimension;
  double best = 0.0;
  auto probe = [&](const Gamble& g) { best = std::max(best, max_norm(op(g))); };

  for (std::size_t x = 0; x < n; ++x) {
    Gamble e = Gamble::indicator(n, x);
    probe(e);
    probe(-e);
  }
  probe(Gamble::constant(n, 1.0));
  probe(Gamble::constant(n, -1.0));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    std::vector<double> v(n);
    for (double& x : v) x = dist(rng);
    // Pin one coordinate to +-1 so the sample lies on the unit sphere.
    v[pick(rng)] = dist(rng) < 0.0 ? -1.0 : 1.0;
    double norm = 0.0;
    for (double x : v) norm = std::max(norm, std::fabs(x));
    for (double& x : v) x /= norm;
    probe(Gamble(std::move(v)));
  }
  return best;
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : n_(rows.size()), data_() {
  data_.reserve(n_ * n_);
  for (const auto& r : rows) {
    if (r.size() != n_) throw DimensionError("DenseMatrix must be square");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& rhs) const {
  if (rhs.n_ != n_) throw DimensionError("matrix size mismatch");
  DenseMatrix out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < n_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < n_; ++j) out(i, j) += a * rhs(k, j);
    }
  return out;
}

Gamble DenseMatrix::operator*(const Gamble& f) const {
  if (f.size() != n_) throw DimensionError("matrix-gamble size mismatch");
  std::vector<double> out(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) acc += (*this)(i, j) * f[j];
    out[i] = acc;
  }
  return Gamble(std::move(out));
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& rhs) {
  if (rhs.n_ != n_) throw DimensionError("matrix size mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

double DenseMatrix::inf_norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n_; ++j) row += std::fabs((*this)(i, j));
    best = std::max(best, row);
  }
  return best;
}

double DenseMatrix::max_abs_diff(const DenseMatrix& other) const {
  if (other.n_ != n_) throw DimensionError("matrix size mismatch");
  double best = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i)
    best = std::max(best, std::fabs(data_[i] - other.data_[i]));
  return best;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace ictmc
