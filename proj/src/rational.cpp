#include "popdyn/rational.hpp"

#include <cctype>

namespace popdyn {

namespace {

using boost::multiprecision::mpz_int;

mpz_int parse_digits(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw ParseError("malformed number: '" + std::string(whole) + "'");
  for (char ch : digits)
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw ParseError("malformed number: '" + std::string(whole) + "'");
  // a leading 0 would select octal
  std::size_t first = digits.find_first_not_of('0');
  if (first == std::string_view::npos) return 0;
  return mpz_int(std::string(digits.substr(first)));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    if (exp_part.empty() || exp_part.size() > 6)
      throw ParseError("malformed exponent: '" + std::string(whole) + "'");
    exponent = parse_digits(exp_part, whole).convert_to<long long>();
    if (exp_negative) exponent = -exponent;
    s = s.substr(0, e);
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty())
      throw ParseError("malformed number: '" + std::string(whole) + "'");
    digits = std::string(int_part) + std::string(frac_part);
    exponent -= static_cast<long long>(frac_part.size());
  } else {
    digits = std::string(s);
  }
  mpz_int mantissa = parse_digits(digits, whole);
  mpz_int scale = 1;
  for (long long i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) scale *= 10;
  Rational q = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
  return negative ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw ParseError("empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(trim(s.substr(0, slash)), text);
    Rational den = parse_decimal(trim(s.substr(slash + 1)), text);
    if (den == 0) throw ParseError("zero denominator: '" + std::string(text) + "'");
    return num / den;
  }
  return parse_decimal(s, text);
}

std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

std::int64_t floor_int(const Rational& q) {
  boost::multiprecision::mpz_int num = numerator(q), den = denominator(q);
  boost::multiprecision::mpz_int quot = num / den;
  if (num < 0 && quot * den != num) quot -= 1;
  return quot.convert_to<std::int64_t>();
}

std::int64_t ceil_int(const Rational& q) { return -floor_int(-q); }

bool is_integer(const Rational& q) { return denominator(q) == 1; }

double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace popdyn
