#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ictmc {

/// Raised when gambles, operators or models are combined across state spaces
/// of different sizes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Membership flags over state indices.
using StateSet = std::vector<bool>;

/// Ordered set of distinct state labels.
class StateSpace {
 public:
  explicit StateSpace(std::vector<std::string> labels);

  /// States named "s0", "s1", ...
  static StateSpace numbered(std::size_t n);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t index(const std::string& label) const;

  bool operator==(const StateSpace& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Real-valued function on a finite state space. All entries are finite.
class Gamble {
 public:
  Gamble() = default;
  explicit Gamble(std::vector<double> values);
  Gamble(std::initializer_list<double> values);

  static Gamble constant(std::size_t n, double value);
  static Gamble zero(std::size_t n) { return constant(n, 0.0); }
  static Gamble indicator(std::size_t n, std::size_t state);
  /// Indicator of the states flagged in `members`.
  static Gamble indicator(const StateSet& members);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const double* data() const noexcept { return values_.data(); }
  double* data() noexcept { return values_.data(); }

  double min() const;
  double max() const;
  double span() const { return max() - min(); }
  bool is_finite() const;

  Gamble operator-() const;
  Gamble& operator+=(const Gamble& other);
  Gamble& operator-=(const Gamble& other);
  Gamble& operator+=(double mu);
  Gamble& operator*=(double lambda);

  friend Gamble operator+(Gamble a, const Gamble& b) { return a += b; }
  friend Gamble operator-(Gamble a, const Gamble& b) { return a -= b; }
  friend Gamble operator+(Gamble a, double mu) { return a += mu; }
  friend Gamble operator-(Gamble a, double mu) { return a += -mu; }
  friend Gamble operator*(double lambda, Gamble a) { return a *= lambda; }

  bool operator==(const Gamble& other) const = default;

 private:
  std::vector<double> values_;
};

/// Componentwise absolute value.
Gamble abs(const Gamble& f);

double max_norm(const Gamble& f);

/// A map from gambles to gambles on a state space of fixed size.
struct OperatorEvaluation {
  std::size_t dimension = 0;
  std::function<Gamble(const Gamble&)> apply;
  bool nonneg_homogeneous = true;

  Gamble operator()(const Gamble& f) const;
  /// f -> -A(-f)
  OperatorEvaluation conjugate() const;

  static OperatorEvaluation identity(std::size_t n);
};

/// Lower bound on the induced operator norm by evaluating `samples` seeded
/// random unit-norm gambles plus every signed indicator and the constants +-1.
double operator_norm_estimate(const OperatorEvaluation& op, std::size_t samples,
                              std::uint64_t seed);

/// Seeded gamble with entries uniform in [lo, hi].
Gamble random_gamble(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0);

}  // namespace ictmc
