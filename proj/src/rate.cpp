#include "ictmc/rate.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ictmc {
namespace {

using boost::multiprecision::cpp_int;

constexpr int kMaxDecimalExponent = 400;

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

[[noreturn]] void bad_literal(std::string_view text, const char* why) {
  throw std::invalid_argument("invalid rate literal '" + std::string(text) + "': " + why);
}

cpp_int pow10(int e) {
  cpp_int r = 1;
  for (int i = 0; i < e; ++i) r *= 10;
  return r;
}

Rational parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string_view exponent_part;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    exponent_part = s.substr(e + 1);
    s = s.substr(0, e);
  }
  std::string_view int_part = s, frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) bad_literal(text, "no digits");
  if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)))
    bad_literal(text, "unexpected character");

  int exponent = 0;
  if (!exponent_part.empty() || text.find_first_of("eE") != std::string_view::npos) {
    std::string_view digits = exponent_part;
    bool exp_negative = false;
    if (!digits.empty() && (digits.front() == '+' || digits.front() == '-')) {
      exp_negative = digits.front() == '-';
      digits.remove_prefix(1);
    }
    if (!all_digits(digits) || digits.size() > 4) bad_literal(text, "bad exponent");
    exponent = std::stoi(std::string(digits));
    if (exp_negative) exponent = -exponent;
  }
  exponent -= static_cast<int>(frac_part.size());
  if (std::abs(exponent) > kMaxDecimalExponent) bad_literal(text, "exponent out of range");

  cpp_int mantissa(std::string(int_part.empty() ? "0" : int_part) + std::string(frac_part));
  if (negative) mantissa = -mantissa;
  if (exponent >= 0) return Rational(mantissa * pow10(exponent));
  return Rational(mantissa, pow10(-exponent));
}

Rational parse_fraction(std::string_view text, std::size_t slash) {
  std::string_view num = text.substr(0, slash);
  std::string_view den = text.substr(slash + 1);
  bool negative = false;
  if (!num.empty() && (num.front() == '+' || num.front() == '-')) {
    negative = num.front() == '-';
    num.remove_prefix(1);
  }
  if (!all_digits(num) || !all_digits(den)) bad_literal(text, "expected p/q with integer p, q");
  cpp_int p(std::string{num}), q(std::string{den});
  if (q == 0) bad_literal(text, "zero denominator");
  if (negative) p = -p;
  return Rational(p, q);
}

std::string shortest_repr(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

}  // namespace

Rate::Rate(double value) : value_(value) {
  if (!std::isfinite(value)) throw std::invalid_argument("rate must be finite");
  if (value == 0.0) value_ = 0.0;  // drop the sign of -0.0
  exact_ = Rational(value_);
  text_ = shortest_repr(value_);
}

Rate Rate::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) bad_literal(text, "empty");

  Rate r;
  r.literal_ = true;
  r.text_ = std::string(text);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    r.exact_ = parse_fraction(text, slash);
    r.value_ = r.exact_.convert_to<double>();
  } else {
    r.exact_ = parse_decimal(text);
    const char* first = text.data();
    if (*first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), v);
    if (ec == std::errc::result_out_of_range) {
      // Underflow: keep the exact value, round to the nearest representable.
      v = r.exact_.convert_to<double>();
    } else if (ec != std::errc() || ptr != text.data() + text.size()) {
      bad_literal(text, "not a number");
    }
    r.value_ = v;
  }
  if (!std::isfinite(r.value_)) bad_literal(text, "out of double range");
  if (r.value_ == 0.0) r.value_ = 0.0;
  return r;
}

int Rate::sign() const { return exact_.sign(); }

}  // namespace ictmc
