#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quasimean/error.hpp"

namespace quasimean {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// 10^k for k >= 0. Small powers are cached.
inline Integer pow10(unsigned k) {
  static const std::vector<Integer> cache = [] {
    std::vector<Integer> v(64);
    v[0] = 1;
    for (std::size_t i = 1; i < v.size(); ++i) v[i] = v[i - 1] * 10;
    return v;
  }();
  if (k < cache.size()) return cache[k];
  return boost::multiprecision::pow(Integer(10), k);
}

/// 10^m as an exact rational, m of any sign.
inline Rational pow10_rational(int m) {
  if (m >= 0) return Rational(pow10(static_cast<unsigned>(m)));
  return Rational(Integer(1), pow10(static_cast<unsigned>(-m)));
}

/// floor(a / b) for b > 0 (cpp_int division truncates toward zero).
inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if (a.sign() < 0 && q * b != a) --q;
  return q;
}

inline Integer ceil_div(const Integer& a, const Integer& b) {
  Integer q = a / b;
  if (a.sign() > 0 && q * b != a) ++q;
  return q;
}

/// floor(10^m * q), exact.
inline Integer floor_at_scale(const Rational& q, int m) {
  const Rational scaled = q * pow10_rational(m);
  return floor_div(boost::multiprecision::numerator(scaled), boost::multiprecision::denominator(scaled));
}

/// ceil(10^m * q), exact.
inline Integer ceil_at_scale(const Rational& q, int m) {
  const Rational scaled = q * pow10_rational(m);
  return ceil_div(boost::multiprecision::numerator(scaled), boost::multiprecision::denominator(scaled));
}

/// sign * mantissa * 10^exponent, kept canonical: zero has sign 0 and
/// exponent 0, and a nonzero mantissa is never divisible by 10.
class ExactDecimal {
 public:
  ExactDecimal() = default;

  ExactDecimal(int sign, Integer mantissa, long exponent)
      : sign_(sign), mantissa_(std::move(mantissa)), exponent_(exponent) {
    if (mantissa_.sign() < 0) throw DomainError("ExactDecimal mantissa must be non-negative");
    if (sign_ < -1 || sign_ > 1) throw DomainError("ExactDecimal sign must be -1, 0 or +1");
    canonicalize();
  }

  static ExactDecimal from_integer(const Integer& v) {
    return ExactDecimal(v.sign(), boost::multiprecision::abs(v), 0);
  }

  /// Grammar: [+-] digits [. digits] [(e|E) [+-] digits]. At least one digit is
  /// required before the exponent; ".5" and "5." are accepted.
  static ExactDecimal parse(std::string_view text) {
    std::size_t i = 0;
    int sign = 1;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      if (text[i] == '-') sign = -1;
      ++i;
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    for (; i < text.size(); ++i) {
      const char c = text[i];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits.push_back(c);
        if (seen_point) ++frac_digits;
      } else if (c == '.' && !seen_point) {
        seen_point = true;
      } else {
        break;
      }
    }
    if (digits.empty()) throw ParseError("expected digits in decimal '" + std::string(text) + "'", i);
    long exponent = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
      ++i;
      int esign = 1;
      if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        if (text[i] == '-') esign = -1;
        ++i;
      }
      const std::size_t start = i;
      long e = 0;
      for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
        if (e > 100000000) throw ParseError("exponent out of range", i);
        e = e * 10 + (text[i] - '0');
      }
      if (i == start) throw ParseError("expected exponent digits in '" + std::string(text) + "'", i);
      exponent = esign * e;
    }
    if (i != text.size()) throw ParseError("unexpected character in decimal '" + std::string(text) + "'", i);
    // A leading zero would make the integer parser read octal.
    const auto nz = digits.find_first_not_of('0');
    Integer mantissa(nz == std::string::npos ? std::string("0") : digits.substr(nz));
    return ExactDecimal(mantissa.is_zero() ? 0 : sign, std::move(mantissa), exponent - frac_digits);
  }

  /// Exact rational value.
  Rational to_rational() const {
    if (sign_ == 0) return Rational(0);
    Rational r = Rational(mantissa_) * pow10_rational(static_cast<int>(exponent_));
    return sign_ < 0 ? Rational(-r) : r;
  }

  /// The decimal equal to q, if q has a terminating expansion (denominator 2^a 5^b).
  static std::optional<ExactDecimal> from_rational(const Rational& q) {
    if (q.is_zero()) return ExactDecimal();
    Integer num = boost::multiprecision::numerator(q);
    Integer den = boost::multiprecision::denominator(q);
    unsigned twos = 0, fives = 0;
    while ((den & 1) == 0) {
      den >>= 1;
      ++twos;
    }
    while (den % 5 == 0) {
      den /= 5;
      ++fives;
    }
    if (den != 1) return std::nullopt;
    const unsigned k = std::max(twos, fives);
    // q = num / (2^twos 5^fives) = num * 2^(k-twos) * 5^(k-fives) / 10^k
    Integer m = num;
    m *= boost::multiprecision::pow(Integer(2), k - twos);
    m *= boost::multiprecision::pow(Integer(5), k - fives);
    return ExactDecimal(m.sign(), boost::multiprecision::abs(m), -static_cast<long>(k));
  }

  /// Exact floor(10^m * value).
  Integer floor_at_scale(int m) const {
    if (sign_ == 0) return 0;
    const long e = exponent_ + m;
    if (e >= 0) return Integer(sign_) * mantissa_ * pow10(static_cast<unsigned>(e));
    const Integer p = pow10(static_cast<unsigned>(-e));
    return floor_div(Integer(sign_) * mantissa_, p);
  }

  /// Exact ceil(10^m * value).
  Integer ceil_at_scale(int m) const {
    if (sign_ == 0) return 0;
    const long e = exponent_ + m;
    if (e >= 0) return Integer(sign_) * mantissa_ * pow10(static_cast<unsigned>(e));
    const Integer p = pow10(static_cast<unsigned>(-e));
    return ceil_div(Integer(sign_) * mantissa_, p);
  }

  /// Plain positional notation for moderate exponents, scientific otherwise.
  std::string render() const {
    if (sign_ == 0) return "0";
    std::string digits = mantissa_.str();
    std::string out = sign_ < 0 ? "-" : "";
    const long len = static_cast<long>(digits.size());
    if (exponent_ >= 0 && len + exponent_ <= 24) {
      out += digits;
      out.append(static_cast<std::size_t>(exponent_), '0');
    } else if (exponent_ < 0 && -exponent_ < len) {
      out += digits.substr(0, static_cast<std::size_t>(len + exponent_));
      out += '.';
      out += digits.substr(static_cast<std::size_t>(len + exponent_));
    } else if (exponent_ < 0 && -exponent_ - len <= 12) {
      out += "0.";
      out.append(static_cast<std::size_t>(-exponent_ - len), '0');
      out += digits;
    } else {
      out += digits.substr(0, 1);
      if (len > 1) {
        out += '.';
        out += digits.substr(1);
      }
      out += 'e';
      out += std::to_string(exponent_ + len - 1);
    }
    return out;
  }

  int sign() const noexcept { return sign_; }
  const Integer& mantissa() const noexcept { return mantissa_; }
  long exponent() const noexcept { return exponent_; }

  friend bool operator==(const ExactDecimal& a, const ExactDecimal& b) {
    return a.sign_ == b.sign_ && a.exponent_ == b.exponent_ && a.mantissa_ == b.mantissa_;
  }

 private:
  void canonicalize() {
    if (mantissa_.is_zero()) {
      sign_ = 0;
      exponent_ = 0;
      return;
    }
    if (sign_ == 0) throw DomainError("nonzero ExactDecimal mantissa requires a sign");
    while (mantissa_ % 10 == 0) {
      mantissa_ /= 10;
      ++exponent_;
    }
  }

  int sign_ = 0;
  Integer mantissa_ = 0;
  long exponent_ = 0;
};

}  // namespace quasimean
