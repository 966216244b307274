#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sudakov {

using Rational = boost::multiprecision::mpq_rational;

template <typename T>
using Vec = std::vector<T>;

enum class Mode { Rational, Float };

/// Raised for malformed user input (files, parameters, dimension mismatches).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when text cannot be parsed; carries a 1-based line/column.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, int line, int column)
      : InputError(what + " at line " + std::to_string(line) + ", column " +
                   std::to_string(column)),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Arithmetic policy. Exact types decide signs exactly; double uses an
/// absolute tolerance.
template <typename T>
struct Num;

template <>
struct Num<double> {
  static constexpr bool exact = false;
  static constexpr double tol = 1e-9;
  static int sign(double x) { return x > tol ? 1 : (x < -tol ? -1 : 0); }
  static double to_double(double x) { return x; }
  static double from_rational(const Rational& r) { return r.convert_to<double>(); }
  static double from_double(double x) { return x; }
  static double abs(double x) { return std::fabs(x); }
};

template <>
struct Num<Rational> {
  static constexpr bool exact = true;
  static int sign(const Rational& x) { return x.sign(); }
  static double to_double(const Rational& x) { return x.convert_to<double>(); }
  static Rational from_rational(const Rational& r) { return r; }
  static Rational from_double(double x) { return Rational(x); }
  static Rational abs(const Rational& x) { return x.sign() < 0 ? Rational(-x) : x; }
};

template <typename T>
bool is_zero(const T& x) {
  return Num<T>::sign(x) == 0;
}
template <typename T>
bool approx_eq(const T& a, const T& b) {
  return Num<T>::sign(T(a - b)) == 0;
}
template <typename T>
bool approx_less(const T& a, const T& b) {
  return Num<T>::sign(T(a - b)) < 0;
}
template <typename T>
double to_double(const T& x) {
  return Num<T>::to_double(x);
}

template <typename T>
T dot(const Vec<T>& a, const Vec<T>& b) {
  T s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
template <typename T>
Vec<T> sub(const Vec<T>& a, const Vec<T>& b) {
  Vec<T> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}
template <typename T>
Vec<T> add(const Vec<T>& a, const Vec<T>& b) {
  Vec<T> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}
template <typename T>
Vec<T> scale(const Vec<T>& a, const T& s) {
  Vec<T> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}
template <typename T>
bool vec_approx_eq(const Vec<T>& a, const Vec<T>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!approx_eq(a[i], b[i])) return false;
  return true;
}
template <typename T>
bool vec_is_zero(const Vec<T>& a) {
  for (const auto& v : a)
    if (!is_zero(v)) return false;
  return true;
}
template <typename T>
double norm2(const Vec<T>& a) {
  double s = 0;
  for (const auto& v : a) s += to_double(v) * to_double(v);
  return std::sqrt(s);
}

/// Parses `p/q`, integers and decimals (with optional exponent) exactly.
Rational parse_rational(std::string_view text);

/// Shortest exact text form: integers as `n`, otherwise `p/q`.
std::string format_rational(const Rational& r);

template <typename T>
T parse_scalar(std::string_view text) {
  return Num<T>::from_rational(parse_rational(text));
}

template <typename T>
std::string format_scalar(const T& x);

template <typename To, typename From>
To convert_scalar(const From& x) {
  if constexpr (std::is_same_v<To, From>) {
    return x;
  } else if constexpr (std::is_same_v<To, double>) {
    return Num<From>::to_double(x);
  } else {
    return Num<To>::from_double(x);
  }
}

template <typename To, typename From>
Vec<To> convert_vec(const Vec<From>& v) {
  Vec<To> r;
  r.reserve(v.size());
  for (const auto& x : v) r.push_back(convert_scalar<To>(x));
  return r;
}

}  // namespace sudakov
