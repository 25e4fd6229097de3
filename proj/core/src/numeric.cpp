#include "gbd/numeric.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gbd {

namespace mp = boost::multiprecision;

double log_big(const BigInt& x) {
  if (x <= 0) throw std::domain_error("log_big: non-positive argument");
  const unsigned bits = mp::msb(x) + 1;
  if (bits <= 1000) return std::log(x.convert_to<double>());
  const unsigned shift = bits - 64;
  BigInt top = x >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

double nth_root_big(const BigInt& x, int n) { return std::exp(log_big(x) / n); }

double ratio_big(const BigInt& x, const BigInt& y) {
  if (x == 0) return 0.0;
  return std::exp(log_big(x) - log_big(y));
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << mp::numerator(r);
  if (mp::denominator(r) != 1) os << "/" << mp::denominator(r);
  return os.str();
}

Rational pow_rational(const Rational& base, int exponent) {
  if (exponent < 0) return Rational(1) / pow_rational(base, -exponent);
  Rational result = 1, b = base;
  while (exponent > 0) {
    if (exponent & 1) result *= b;
    b *= b;
    exponent >>= 1;
  }
  return result;
}

Rational rational_approx(double x, std::int64_t max_den) {
  BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    double a = std::floor(r);
    BigInt ai(static_cast<long long>(a));
    BigInt p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double frac = r - a;
    if (std::abs(frac) < 1e-15) break;
    r = 1.0 / frac;
  }
  if (q1 == 0) return Rational(static_cast<long long>(std::llround(x)));
  return Rational(p1, q1);
}

Surd::Surd(Rational p, Rational q, BigInt d) : p_(std::move(p)), q_(std::move(q)), d_(std::move(d)) {
  if (q_ == 0) d_ = 0;
  else if (d_ <= 0) throw std::domain_error("Surd: radicand must be positive");
}

Surd Surd::sqrt_of(const BigInt& d) { return Surd(0, 1, d); }

BigInt Surd::common_radicand(const Surd& a, const Surd& b) {
  if (a.q_ == 0) return b.d_;
  if (b.q_ == 0) return a.d_;
  if (a.d_ != b.d_) throw std::domain_error("Surd: mixing different quadratic fields");
  return a.d_;
}

Surd Surd::operator+(const Surd& o) const { return Surd(p_ + o.p_, q_ + o.q_, common_radicand(*this, o)); }
Surd Surd::operator-(const Surd& o) const { return Surd(p_ - o.p_, q_ - o.q_, common_radicand(*this, o)); }
Surd Surd::operator-() const { return Surd(-p_, -q_, d_); }

Surd Surd::operator*(const Surd& o) const {
  BigInt d = common_radicand(*this, o);
  return Surd(p_ * o.p_ + q_ * o.q_ * Rational(d), p_ * o.q_ + q_ * o.p_, d);
}

Surd Surd::operator/(const Surd& o) const {
  BigInt d = common_radicand(*this, o);
  Rational norm = o.p_ * o.p_ - o.q_ * o.q_ * Rational(d);
  if (norm == 0) throw std::domain_error("Surd: division by zero");
  Surd conj(o.p_, -o.q_, d);
  Surd num = *this * conj;
  return Surd(num.p_ / norm, num.q_ / norm, d);
}

Surd Surd::pow(int n) const {
  if (n < 0) return Surd(1) / pow(-n);
  Surd result(1), b = *this;
  while (n > 0) {
    if (n & 1) result = result * b;
    b = b * b;
    n >>= 1;
  }
  return result;
}

int Surd::sign() const {
  auto sgn = [](const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); };
  const int sp = sgn(p_), sq = sgn(q_);
  if (sq == 0) return sp;
  if (sp == 0) return sq;
  if (sp == sq) return sp;
  Rational diff = p_ * p_ - q_ * q_ * Rational(d_);
  return sp > 0 ? sgn(diff) : -sgn(diff);
}

double Surd::value() const {
  if (q_ == 0) return to_double(p_);
  return to_double(p_) + to_double(q_) * std::sqrt(d_.convert_to<double>());
}

std::string Surd::str() const {
  if (q_ == 0) return to_string(p_);
  std::ostringstream os;
  os << to_string(p_) << (q_ >= 0 ? " + " : " - ") << to_string(q_ >= 0 ? q_ : Rational(-q_)) << "*sqrt(" << d_ << ")";
  return os.str();
}

}  // namespace gbd
