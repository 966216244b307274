#include "sudakov/numeric.hpp"

#include <cctype>
#include <cstdio>

namespace sudakov {

namespace {

Rational parse_decimal(std::string_view s, std::string_view whole) {
  if (s.empty()) throw InputError("empty number");
  bool negative = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') {
    negative = s[pos] == '-';
    ++pos;
  }
  boost::multiprecision::mpz_int mantissa = 0;
  long long exponent = 0;
  bool digits = false;
  bool after_point = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mantissa = mantissa * 10 + (c - '0');
      if (after_point) --exponent;
      digits = true;
    } else if (c == '.' && !after_point) {
      after_point = true;
    } else if (c == 'e' || c == 'E') {
      break;
    } else {
      throw InputError("invalid number '" + std::string(whole) + "'");
    }
  }
  if (!digits) throw InputError("invalid number '" + std::string(whole) + "'");
  if (pos < s.size()) {
    std::string_view exp = s.substr(pos + 1);
    if (exp.empty()) throw InputError("invalid exponent in '" + std::string(whole) + "'");
    long long e = 0;
    bool eneg = false;
    std::size_t k = 0;
    if (exp[0] == '+' || exp[0] == '-') {
      eneg = exp[0] == '-';
      ++k;
    }
    if (k == exp.size()) throw InputError("invalid exponent in '" + std::string(whole) + "'");
    for (; k < exp.size(); ++k) {
      if (!std::isdigit(static_cast<unsigned char>(exp[k])))
        throw InputError("invalid exponent in '" + std::string(whole) + "'");
      e = e * 10 + (exp[k] - '0');
      if (e > 4000) throw InputError("exponent out of range in '" + std::string(whole) + "'");
    }
    exponent += eneg ? -e : e;
  }
  Rational r(mantissa);
  boost::multiprecision::mpz_int p10 = 1;
  for (long long i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) p10 *= 10;
  if (exponent < 0)
    r /= Rational(p10);
  else
    r *= Rational(p10);
  return negative ? Rational(-r) : r;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_decimal(s, s);
  Rational num = parse_decimal(trim(s.substr(0, slash)), s);
  Rational den = parse_decimal(trim(s.substr(slash + 1)), s);
  if (den == 0) throw InputError("zero denominator in '" + std::string(s) + "'");
  return num / den;
}

std::string format_rational(const Rational& r) {
  if (boost::multiprecision::denominator(r) == 1) return boost::multiprecision::numerator(r).str();
  return r.str();
}

template <>
std::string format_scalar<double>(const double& x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <>
std::string format_scalar<Rational>(const Rational& x) {
  return format_rational(x);
}

}  // namespace sudakov
