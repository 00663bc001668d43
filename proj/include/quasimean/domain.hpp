#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string_view>
#include <string>

#include "quasimean/error.hpp"
#include "quasimean/tuple.hpp"

namespace quasimean {

/// Either exactly n arguments, or any count >= n.
struct Arity {
  std::size_t n = 2;
  bool variadic = false;

  static constexpr Arity fixed(std::size_t n) { return Arity{n, false}; }
  static constexpr Arity at_least(std::size_t n) { return Arity{n, true}; }

  bool accepts(std::size_t count) const { return variadic ? count >= n : count == n; }

  std::string describe() const {
    return variadic ? "variadic(" + std::to_string(n) + ")" : "fixed(" + std::to_string(n) + ")";
  }

  friend bool operator==(const Arity&, const Arity&) = default;
};

/// Shortest decimal that round-trips to `x`, as an exact value ("0.1" -> 1/10).
inline Real decimal_from_double(double x) {
  if (!std::isfinite(x)) return Real::approx(x);
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return Real::parse(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
}

/// Per-coordinate interval constraint plus an arity. Bounds are exact
/// decimals or infinities.
struct DomainBox {
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  Real lower = Real::approx(-kInf);
  Real upper = Real::approx(kInf);
  bool lower_open = false;
  bool upper_open = false;
  Arity arity = Arity::at_least(2);

  static DomainBox make(double lo, double hi, bool lo_open, bool hi_open, Arity arity) {
    return checked({decimal_from_double(lo), decimal_from_double(hi), lo_open, hi_open, arity});
  }
  static DomainBox closed(double lo, double hi, Arity arity = Arity::at_least(2)) {
    return make(lo, hi, false, false, arity);
  }
  /// (lo, hi]
  static DomainBox left_open(double lo, double hi, Arity arity = Arity::at_least(2)) {
    return make(lo, hi, true, false, arity);
  }
  /// [lo, hi)
  static DomainBox right_open(double lo, double hi, Arity arity = Arity::at_least(2)) {
    return make(lo, hi, false, true, arity);
  }
  static DomainBox open(double lo, double hi, Arity arity = Arity::at_least(2)) {
    return make(lo, hi, true, true, arity);
  }
  static DomainBox whole_line(Arity arity = Arity::at_least(2)) { return make(-kInf, kInf, true, true, arity); }

  static DomainBox checked(DomainBox b) {
    if (compare(b.lower, b.upper) > 0) throw UsageError("domain box requires lower <= upper");
    return b;
  }

  bool degenerate() const { return compare(lower, upper) == 0; }
  bool bounded() const { return lower.finite() && upper.finite(); }

  DomainBox with_arity(Arity a) const {
    DomainBox b = *this;
    b.arity = a;
    return b;
  }

  bool contains(const Real& x) const {
    if (lower.finite()) {
      const int c = compare(x, lower);
      if (c < 0 || (c == 0 && lower_open)) return false;
    }
    if (upper.finite()) {
      const int c = compare(x, upper);
      if (c > 0 || (c == 0 && upper_open)) return false;
    }
    return true;
  }

  bool contains(const RealTuple& t) const {
    if (!arity.accepts(t.size())) return false;
    for (const auto& v : t) {
      if (!contains(v)) return false;
    }
    return true;
  }

  std::string describe() const {
    auto bound = [](const Real& r) { return r.finite() ? r.render() : (r.sign() < 0 ? "-inf" : "inf"); };
    return std::string(lower_open ? "(" : "[") + bound(lower) + ", " + bound(upper) + (upper_open ? ")" : "]") +
           "^n, n " + arity.describe();
  }
};

}  // namespace quasimean
