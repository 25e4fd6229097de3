#pragma once

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace gbd {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Vertex = std::int64_t;

// Natural logarithm of a positive big integer, valid far beyond the double range.
double log_big(const BigInt& x);

// x^(1/n) computed through logarithms; x must be positive.
double nth_root_big(const BigInt& x, int n);

// x / y as a double without overflowing either operand.
double ratio_big(const BigInt& x, const BigInt& y);

double to_double(const Rational& r);
std::string to_string(const Rational& r);

Rational pow_rational(const Rational& base, int exponent);

// Best rational approximation with denominator <= max_den (continued fractions).
Rational rational_approx(double x, std::int64_t max_den);

// Element p + q*sqrt(d) of the quadratic field Q(sqrt d); d is a positive
// integer, and q == 0 means the value is rational (d is then irrelevant).
class Surd {
 public:
  Surd() = default;
  Surd(int v) : p_(v) {}  // NOLINT(google-explicit-constructor)
  Surd(Rational p) : p_(std::move(p)) {}  // NOLINT(google-explicit-constructor)
  Surd(Rational p, Rational q, BigInt d);

  static Surd sqrt_of(const BigInt& d);

  const Rational& rational_part() const { return p_; }
  const Rational& surd_part() const { return q_; }
  const BigInt& radicand() const { return d_; }
  bool is_rational() const { return q_ == 0; }

  Surd operator+(const Surd& o) const;
  Surd operator-(const Surd& o) const;
  Surd operator*(const Surd& o) const;
  Surd operator/(const Surd& o) const;
  Surd operator-() const;
  Surd& operator+=(const Surd& o) { return *this = *this + o; }
  Surd& operator-=(const Surd& o) { return *this = *this - o; }
  Surd& operator*=(const Surd& o) { return *this = *this * o; }

  Surd pow(int n) const;
  int sign() const;
  bool is_zero() const { return p_ == 0 && q_ == 0; }
  bool operator==(const Surd& o) const { return (*this - o).is_zero(); }
  bool operator<(const Surd& o) const { return (*this - o).sign() < 0; }
  double value() const;
  std::string str() const;

 private:
  static BigInt common_radicand(const Surd& a, const Surd& b);

  Rational p_{0};
  Rational q_{0};
  BigInt d_{0};
};

}  // namespace gbd
