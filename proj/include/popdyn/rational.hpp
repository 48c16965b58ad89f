#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace popdyn {

using Rational = boost::multiprecision::mpq_rational;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Accepts "p/q", integers, and decimals with optional exponent ("26.8", "1e-4").
// The value is exact: "0.1" is 1/10.
Rational parse_rational(std::string_view text);

// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& q);

std::int64_t floor_int(const Rational& q);
std::int64_t ceil_int(const Rational& q);
bool is_integer(const Rational& q);
double to_double(const Rational& q);

// A rational extended with -infinity, for suprema over empty sets.
class ExtendedRational {
 public:
  ExtendedRational() = default;
  explicit ExtendedRational(Rational v) : value_(std::move(v)) {}

  static ExtendedRational negative_infinity() { return {}; }

  bool is_finite() const { return value_.has_value(); }
  const Rational& value() const { return *value_; }

  // Keeps the larger of the two.
  void raise_to(const Rational& v) {
    if (!value_ || v > *value_) value_ = v;
  }

  friend bool operator==(const ExtendedRational& a, const ExtendedRational& b) {
    return a.value_ == b.value_;
  }
  friend bool operator<(const ExtendedRational& a, const ExtendedRational& b) {
    if (!b.value_) return false;
    if (!a.value_) return true;
    return *a.value_ < *b.value_;
  }
  friend bool operator>(const ExtendedRational& a, const ExtendedRational& b) { return b < a; }
  friend bool operator<=(const ExtendedRational& a, const ExtendedRational& b) { return !(b < a); }
  friend bool operator>=(const ExtendedRational& a, const ExtendedRational& b) { return !(a < b); }

  std::string str() const { return value_ ? to_string(*value_) : "-inf"; }

 private:
  std::optional<Rational> value_;
};

}  // namespace popdyn
