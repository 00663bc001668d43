#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>

#include "quasimean/decimal.hpp"
#include "quasimean/error.hpp"

namespace quasimean {

namespace detail {

/// Exact rational value of a finite double (every finite double is dyadic).
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("non-finite value has no exact rational form");
  if (x == 0.0) return Rational(0);
  int e = 0;
  const double f = std::frexp(x, &e);  // x = f * 2^e, 0.5 <= |f| < 1
  const auto m = static_cast<std::int64_t>(std::ldexp(f, 53));
  e -= 53;
  Integer num(m);
  if (e >= 0) return Rational(num << e);
  return Rational(num, Integer(1) << -e);
}

inline double rational_to_double(const Rational& q) { return q.convert_to<double>(); }

inline std::size_t bit_size(const Rational& q) {
  const Integer& n = boost::multiprecision::numerator(q);
  const Integer& d = boost::multiprecision::denominator(q);
  const std::size_t nb = n.is_zero() ? 0 : boost::multiprecision::msb(boost::multiprecision::abs(n));
  return nb + boost::multiprecision::msb(d);
}

/// floor(x^(1/n)) for x >= 0 by Newton iteration.
inline Integer integer_root(const Integer& x, unsigned n) {
  if (x < 2 || n == 1) return x;
  const std::size_t bits = boost::multiprecision::msb(x) + 1;
  Integer r = Integer(1) << ((bits + n - 1) / n);  // r >= root
  while (true) {
    const Integer rn1 = boost::multiprecision::pow(r, n - 1);
    const Integer next = ((n - 1) * r + x / rn1) / n;
    if (next >= r) break;
    r = next;
  }
  while (boost::multiprecision::pow(r + 1, n) <= x) ++r;
  while (boost::multiprecision::pow(r, n) > x) --r;
  return r;
}

/// Exact n-th root of a non-negative rational, when it is rational.
inline std::optional<Rational> exact_root(const Rational& q, unsigned n) {
  if (q.sign() < 0) return std::nullopt;
  if (bit_size(q) > 4096) return std::nullopt;
  const Integer& num = boost::multiprecision::numerator(q);
  const Integer& den = boost::multiprecision::denominator(q);
  const Integer rn = integer_root(num, n);
  if (boost::multiprecision::pow(rn, n) != num) return std::nullopt;
  const Integer rd = integer_root(den, n);
  if (boost::multiprecision::pow(rd, n) != den) return std::nullopt;
  return Rational(rn, rd);
}

/// Decimal rendering of |q| rounded to `digits` significant digits, trailing zeros trimmed.
inline std::string render_significant(const Rational& q, int digits) {
  if (q.is_zero()) return "0";
  std::string sign = q.sign() < 0 ? "-" : "";
  const Rational a = boost::multiprecision::abs(q);
  // Decimal exponent E with 10^E <= a < 10^(E+1).
  const Integer& num = boost::multiprecision::numerator(a);
  const Integer& den = boost::multiprecision::denominator(a);
  long e = static_cast<long>(num.str().size()) - static_cast<long>(den.str().size());
  while (a < pow10_rational(static_cast<int>(e))) --e;
  while (a >= pow10_rational(static_cast<int>(e + 1))) ++e;
  // Round a * 10^(digits-1-E) to nearest integer.
  const Rational scaled = a * pow10_rational(static_cast<int>(digits - 1 - e));
  Integer n = floor_div(boost::multiprecision::numerator(scaled), boost::multiprecision::denominator(scaled));
  if (scaled - Rational(n) >= Rational(1, 2)) ++n;
  std::string ds = n.str();
  if (static_cast<int>(ds.size()) > digits) {  // rounding carried into a new digit
    ds.pop_back();
    ++e;
  }
  while (ds.size() > 1 && ds.back() == '0') ds.pop_back();
  const long len = static_cast<long>(ds.size());
  std::string out = sign;
  if (e >= 0 && e < digits) {
    if (len <= e + 1) {
      out += ds;
      out.append(static_cast<std::size_t>(e + 1 - len), '0');
    } else {
      out += ds.substr(0, static_cast<std::size_t>(e + 1)) + "." + ds.substr(static_cast<std::size_t>(e + 1));
    }
  } else if (e < 0 && e >= -6) {
    out += "0.";
    out.append(static_cast<std::size_t>(-e - 1), '0');
    out += ds;
  } else {
    out += ds.substr(0, 1);
    if (len > 1) out += "." + ds.substr(1);
    out += "e" + std::to_string(e);
  }
  return out;
}

}  // namespace detail

/// A real number that is either an exact rational or a flagged-inexact double.
///
/// Arithmetic between exact operands stays exact; anything touching an inexact
/// operand (or a transcendental function) becomes inexact. Exact results whose
/// numerator and denominator together exceed `kExactBitLimit` bits are demoted
/// to doubles so that long iterations cannot blow up.
class Real {
 public:
  static constexpr std::size_t kExactBitLimit = 8192;

  Real() : value_(Rational(0)) {}
  Real(int v) : value_(Rational(v)) {}                // NOLINT(google-explicit-constructor)
  Real(long v) : value_(Rational(v)) {}               // NOLINT(google-explicit-constructor)
  Real(long long v) : value_(Rational(v)) {}          // NOLINT(google-explicit-constructor)
  Real(Integer v) : value_(Rational(std::move(v))) {}  // NOLINT(google-explicit-constructor)
  Real(Rational v) : value_(std::move(v)) { demote_if_huge(); }  // NOLINT(google-explicit-constructor)
  Real(const ExactDecimal& d) : value_(d.to_rational()) {}      // NOLINT(google-explicit-constructor)

  static Real ratio(long long num, long long den) {
    if (den == 0) throw DomainError("division by zero");
    return Real(Rational(num, den));
  }

  /// An inexact value. NaN is rejected; infinities are allowed (extended reals).
  static Real approx(double v) {
    if (std::isnan(v)) throw DomainError("NaN result");
    Real r;
    r.value_ = v;
    return r;
  }

  static Real parse(std::string_view text) { return Real(ExactDecimal::parse(text)); }

  bool exact() const noexcept { return std::holds_alternative<Rational>(value_); }
  bool finite() const noexcept { return exact() || std::isfinite(std::get<double>(value_)); }

  /// The exact value; for an inexact finite double this is its dyadic value.
  Rational rational() const {
    if (exact()) return std::get<Rational>(value_);
    return detail::rational_from_double(std::get<double>(value_));
  }

  double to_double() const {
    if (exact()) return detail::rational_to_double(std::get<Rational>(value_));
    return std::get<double>(value_);
  }

  int sign() const {
    if (exact()) return std::get<Rational>(value_).sign();
    const double d = std::get<double>(value_);
    return (d > 0) - (d < 0);
  }

  bool is_zero() const { return sign() == 0; }

  /// floor(10^m * x), exact with respect to the stored value.
  Integer floor_at_scale(int m) const {
    if (!finite()) throw DomainError("floor of a non-finite value");
    return quasimean::floor_at_scale(rational(), m);
  }

  Integer ceil_at_scale(int m) const {
    if (!finite()) throw DomainError("ceil of a non-finite value");
    return quasimean::ceil_at_scale(rational(), m);
  }

  /// Exact terminating values print as decimals; anything else as an
  /// 18-significant-digit approximation prefixed with "≈".
  std::string render() const {
    if (exact()) {
      if (auto d = ExactDecimal::from_rational(std::get<Rational>(value_))) return d->render();
      return "≈" + detail::render_significant(std::get<Rational>(value_), 18);
    }
    const double d = std::get<double>(value_);
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    return "≈" + detail::render_significant(detail::rational_from_double(d), 18);
  }

  /// Exact "p/q" for rationals, otherwise the same as render().
  std::string render_rational() const {
    if (!exact()) return render();
    const Rational& q = std::get<Rational>(value_);
    if (boost::multiprecision::denominator(q) == 1) return boost::multiprecision::numerator(q).str();
    return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
  }

  Real operator-() const {
    if (exact()) return Real(Rational(-std::get<Rational>(value_)));
    return approx(-std::get<double>(value_));
  }

  friend Real operator+(const Real& a, const Real& b) {
    if (a.exact() && b.exact()) return Real(Rational(a.q() + b.q()));
    return approx(a.to_double() + b.to_double());
  }
  friend Real operator-(const Real& a, const Real& b) {
    if (a.exact() && b.exact()) return Real(Rational(a.q() - b.q()));
    return approx(a.to_double() - b.to_double());
  }
  friend Real operator*(const Real& a, const Real& b) {
    if (a.exact() && b.exact()) return Real(Rational(a.q() * b.q()));
    return approx(a.to_double() * b.to_double());
  }
  friend Real operator/(const Real& a, const Real& b) {
    if (b.is_zero()) throw DomainError("division by zero");
    if (a.exact() && b.exact()) return Real(Rational(a.q() / b.q()));
    return approx(a.to_double() / b.to_double());
  }
  Real& operator+=(const Real& b) { return *this = *this + b; }
  Real& operator-=(const Real& b) { return *this = *this - b; }
  Real& operator*=(const Real& b) { return *this = *this * b; }
  Real& operator/=(const Real& b) { return *this = *this / b; }

  /// Total order: exact whenever both sides are finite.
  friend int compare(const Real& a, const Real& b) {
    if (a.exact() && b.exact()) return compare_rational(a.q(), b.q());
    if (!a.finite() || !b.finite()) {
      const double x = a.to_double(), y = b.to_double();
      return x < y ? -1 : (y < x ? 1 : 0);
    }
    return compare_rational(a.rational(), b.rational());
  }

  friend bool operator==(const Real& a, const Real& b) { return compare(a, b) == 0; }
  friend std::strong_ordering operator<=>(const Real& a, const Real& b) {
    const int c = compare(a, b);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  /// Same representation and value (exact vs inexact matters).
  friend bool identical(const Real& a, const Real& b) {
    if (a.exact() != b.exact()) return false;
    if (a.exact()) return a.q() == b.q();
    return std::get<double>(a.value_) == std::get<double>(b.value_);
  }

  friend std::ostream& operator<<(std::ostream& os, const Real& r) { return os << r.render(); }

 private:
  const Rational& q() const { return std::get<Rational>(value_); }

  // Cross-multiplication; much cheaper than the library's continued-fraction comparison.
  static int compare_rational(const Rational& x, const Rational& y) {
    const int sx = x.sign(), sy = y.sign();
    if (sx != sy) return sx < sy ? -1 : 1;
    const Integer l = boost::multiprecision::numerator(x) * boost::multiprecision::denominator(y);
    const Integer r = boost::multiprecision::numerator(y) * boost::multiprecision::denominator(x);
    return l < r ? -1 : (r < l ? 1 : 0);
  }

  void demote_if_huge() {
    const auto& r = std::get<Rational>(value_);
    if (detail::bit_size(r) > kExactBitLimit) value_ = detail::rational_to_double(r);
  }

  std::variant<Rational, double> value_;
};

inline Real abs(const Real& x) { return x.sign() < 0 ? -x : x; }
inline const Real& min(const Real& a, const Real& b) { return compare(b, a) < 0 ? b : a; }
inline const Real& max(const Real& a, const Real& b) { return compare(b, a) > 0 ? b : a; }

/// True when |a - b| <= rel * max(1, |b|); exact equality when both are exact.
inline bool approx_equal(const Real& a, const Real& b, double rel) {
  if (a.exact() && b.exact()) return a == b;
  const double x = a.to_double(), y = b.to_double();
  if (std::isinf(x) || std::isinf(y)) return x == y;
  return std::abs(x - y) <= rel * std::max(1.0, std::abs(y));
}

/// a <= b, exactly when both are exact, otherwise with relative slack `tol`.
inline bool leq_tol(const Real& a, const Real& b, double tol) {
  if (a.exact() && b.exact()) return compare(a, b) <= 0;
  const double x = a.to_double(), y = b.to_double();
  if (std::isinf(x) || std::isinf(y)) return x <= y;
  return x <= y + tol * std::max(1.0, std::abs(y));
}

/// Real n-th root. Odd roots of negatives are real; even roots of negatives are errors.
inline Real nth_root(const Real& x, unsigned n) {
  if (n == 0) throw DomainError("0-th root");
  if (n == 1) return x;
  if (x.sign() < 0) {
    if (n % 2 == 0) throw DomainError("even root of a negative number");
    return -nth_root(-x, n);
  }
  if (x.exact()) {
    if (auto r = detail::exact_root(x.rational(), n)) return Real(*r);
  }
  const double d = x.to_double();
  if (n == 2) return Real::approx(std::sqrt(d));
  if (n == 3) return Real::approx(std::cbrt(d));
  return Real::approx(std::pow(d, 1.0 / static_cast<double>(n)));
}

inline Real sqrt(const Real& x) { return nth_root(x, 2); }

/// x^e for a rational exponent. Negative bases only allow integer exponents.
inline Real pow(const Real& base, const Rational& e) {
  const Integer& p = boost::multiprecision::numerator(e);
  const Integer& q = boost::multiprecision::denominator(e);
  if (base.is_zero()) {
    if (e.sign() < 0) throw DomainError("zero raised to a negative power");
    return e.is_zero() ? Real(1) : Real(0);
  }
  if (q != 1 && base.sign() < 0) throw DomainError("negative base with non-integer exponent");
  if (base.exact() && boost::multiprecision::abs(p) <= 4096 &&
      detail::bit_size(base.rational()) * static_cast<std::size_t>(boost::multiprecision::abs(p)) <= Real::kExactBitLimit) {
    const Rational b = base.rational();
    const unsigned k = static_cast<unsigned>(boost::multiprecision::abs(p));
    Rational powered(boost::multiprecision::pow(boost::multiprecision::numerator(b), k),
                     boost::multiprecision::pow(boost::multiprecision::denominator(b), k));
    if (p.sign() < 0) powered = Rational(1) / powered;
    if (q == 1) return Real(powered);
    if (q <= 64) {
      if (auto r = detail::exact_root(powered, static_cast<unsigned>(q))) return Real(*r);
    }
  }
  return Real::approx(std::pow(base.to_double(), detail::rational_to_double(e)));
}

inline Real pow(const Real& base, const Real& e) {
  if (e.exact()) return pow(base, e.rational());
  if (base.sign() < 0) throw DomainError("negative base with non-integer exponent");
  if (base.is_zero()) {
    if (e.sign() < 0) throw DomainError("zero raised to a negative power");
    return e.is_zero() ? Real(1) : Real(0);
  }
  return Real::approx(std::pow(base.to_double(), e.to_double()));
}

inline Real log(const Real& x) {
  if (x.sign() <= 0) throw DomainError("logarithm of a non-positive number");
  if (x.exact() && x == Real(1)) return Real(0);
  return Real::approx(std::log(x.to_double()));
}

inline Real exp(const Real& x) {
  if (x.exact() && x.is_zero()) return Real(1);
  return Real::approx(std::exp(x.to_double()));
}

inline Real floor_scaled(const Real& x, int m) {
  return Real(Rational(Rational(x.floor_at_scale(m)) / pow10_rational(m)));
}

inline Real ceil_scaled(const Real& x, int m) {
  return Real(Rational(Rational(x.ceil_at_scale(m)) / pow10_rational(m)));
}

}  // namespace quasimean
