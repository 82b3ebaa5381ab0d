#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace ictmc {

using Rational = boost::multiprecision::cpp_rational;

/// A single rate entry. Entries parsed from text ("3", "-0.25", "1e-3",
/// "2/7") keep their literal and an exact rational value; entries built from
/// a double are exact for that double and serialize as a number.
class Rate {
 public:
  Rate() : Rate(0.0) {}
  explicit Rate(double value);

  /// Decimal or "p/q" literal. Throws std::invalid_argument on bad syntax.
  static Rate parse(std::string_view text);

  double value() const noexcept { return value_; }
  const Rational& exact() const noexcept { return exact_; }
  /// -1, 0 or +1, decided on the exact value.
  int sign() const;
  /// True when the entry came from a text literal (decimal or rational).
  bool is_literal() const noexcept { return literal_; }
  /// Literal text, or the shortest round-trip decimal for double entries.
  const std::string& text() const noexcept { return text_; }

  bool operator==(const Rate& other) const {
    return literal_ == other.literal_ && exact_ == other.exact_ && value_ == other.value_;
  }

 private:
  double value_ = 0.0;
  Rational exact_;
  std::string text_;
  bool literal_ = false;
};

}  // namespace ictmc
