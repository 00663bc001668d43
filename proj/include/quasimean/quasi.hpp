#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "quasimean/decimal.hpp"
#include "quasimean/domain.hpp"
#include "quasimean/error.hpp"
#include "quasimean/generator.hpp"
#include "quasimean/mean_function.hpp"
#include "quasimean/means.hpp"
#include "quasimean/real.hpp"
#include "quasimean/tuple.hpp"

// Concrete quasi-means and quasi-mean-like functions.

namespace quasimean {

namespace detail {

inline Real count(std::size_t n) { return Real(static_cast<long long>(n)); }

inline void require_at_least(const RealTuple& t, std::size_t n, const char* what) {
  if (t.size() < n) {
    throw ArityError(std::string(what) + " needs at least " + std::to_string(n) + " arguments, got " +
                     std::to_string(t.size()));
  }
}

inline bool all_negative(const RealTuple& t) {
  return std::all_of(t.begin(), t.end(), [](const Real& v) { return v.sign() < 0; });
}

inline bool all_nonnegative(const RealTuple& t) {
  return std::all_of(t.begin(), t.end(), [](const Real& v) { return v.sign() >= 0; });
}

inline std::vector<Real> sorted_values(const RealTuple& t) {
  std::vector<Real> v(t.begin(), t.end());
  std::stable_sort(v.begin(), v.end(), [](const Real& a, const Real& b) { return compare(a, b) < 0; });
  return v;
}

/// Box [1, 3] * 10^-m, exact.
inline DomainBox scaled_box(int m, Arity arity = Arity::at_least(2)) {
  DomainBox b;
  b.lower = Real(pow10_rational(-m));
  b.upper = Real(Rational(3 * pow10_rational(-m)));
  b.arity = arity;
  return b;
}

}  // namespace detail

// Bessel family.

/// sum / (n - 1), any reals.
inline Real bessel_value(const RealTuple& t) {
  detail::require_at_least(t, 2, "Bessel-corrected sum");
  return sum_of(t) / detail::count(t.size() - 1);
}

inline Real bessel_plus(const RealTuple& t) {
  detail::require_positive(t, "B+");
  return bessel_value(t);
}

inline Real bessel_minus(const RealTuple& t) {
  if (!detail::all_negative(t)) throw DomainError("B- needs negative entries, got " + t.render());
  return bessel_value(t);
}

/// sqrt(sum a_i^2 / (n - 1)).
inline Real unbiased_deviation(const RealTuple& t) {
  detail::require_at_least(t, 2, "unbiased deviation");
  detail::require_positive(t, "unbiased deviation");
  Real s = 0;
  for (const auto& v : t) s += v * v;
  return sqrt(s / detail::count(t.size() - 1));
}

enum class Trim { Smallest, Largest, Both };

/// Sum without the smallest and/or largest entry, divided by the full n.
inline Real trimmed(const RealTuple& t, Trim which) {
  detail::require_at_least(t, 3, "trimmed mean");
  detail::require_positive(t, "trimmed mean");
  const auto v = detail::sorted_values(t);
  const std::size_t first = which == Trim::Largest ? 0 : 1;
  const std::size_t last = which == Trim::Smallest ? v.size() : v.size() - 1;
  Real s = 0;
  for (std::size_t i = first; i < last; ++i) s += v[i];
  return s / detail::count(v.size());
}

// Decimal truncation family.

inline bool floor_arith_domain(const RealTuple& t, int m) {
  return std::any_of(t.begin(), t.end(), [m](const Real& v) { return v.floor_at_scale(m) != 0; });
}

inline bool ceil_arith_domain(const RealTuple& t, int m) {
  return std::any_of(t.begin(), t.end(), [m](const Real& v) { return v.ceil_at_scale(m) != 0; });
}

/// A_m: arithmetic mean of the 10^-m floors.
inline Real floor_arith(const RealTuple& t, int m) {
  if (!floor_arith_domain(t, m)) throw DomainError(t.render() + " floors to all zeros at m=" + std::to_string(m));
  Integer s = 0;
  for (const auto& v : t) s += v.floor_at_scale(m);
  return Real(Rational(Rational(s) / (Rational(static_cast<long long>(t.size())) * pow10_rational(m))));
}

/// A+_m: arithmetic mean of the 10^-m ceilings.
inline Real ceil_arith(const RealTuple& t, int m) {
  if (!ceil_arith_domain(t, m)) throw DomainError(t.render() + " ceils to all zeros at m=" + std::to_string(m));
  Integer s = 0;
  for (const auto& v : t) s += v.ceil_at_scale(m);
  return Real(Rational(Rational(s) / (Rational(static_cast<long long>(t.size())) * pow10_rational(m))));
}

inline Real shifted_floor(const RealTuple& t, int m) { return floor_arith(t, m) + Real(pow10_rational(-m)); }
inline Real shifted_ceil(const RealTuple& t, int m) { return ceil_arith(t, m) - Real(pow10_rational(-m)); }
inline Real star_arith(const RealTuple& t, int m) { return (floor_arith(t, m) + ceil_arith(t, m)) / Real(2); }

inline bool floor_geometric_domain(const RealTuple& t, int m) {
  return std::all_of(t.begin(), t.end(), [m](const Real& v) { return v.sign() > 0 && v.floor_at_scale(m) != 0; });
}

/// G_m: geometric mean of the 10^-m floors; every floor must be nonzero.
inline Real floor_geometric(const RealTuple& t, int m) {
  if (!floor_geometric_domain(t, m)) {
    throw DomainError(t.render() + " has a non-positive entry or one flooring to 0 at m=" + std::to_string(m));
  }
  std::vector<Real> v;
  v.reserve(t.size());
  for (const auto& x : t) v.push_back(floor_scaled(x, m));
  return geometric_mean(RealTuple(std::move(v)));
}

// Other quasi-means.

/// 1 / (1/a_1 + ... + 1/a_n).
inline Real parallel_resistance(const RealTuple& t) {
  detail::require_positive(t, "parallel resistance");
  Real s = 0;
  for (const auto& v : t) s += Real(1) / v;
  return Real(1) / s;
}

/// (sum a_i^x / (n - 1))^(1/x); x = 0 gives (prod a_i)^(1/(n-1)).
inline Real power_quasi(const RealTuple& t, const Rational& x) {
  detail::require_at_least(t, 2, "power quasi-mean");
  detail::require_positive(t, "power quasi-mean");
  if (x.is_zero()) {
    Real p = 1;
    for (const auto& v : t) p *= v;
    return nth_root(p, static_cast<unsigned>(t.size() - 1));
  }
  Real s = 0;
  for (const auto& v : t) s += pow(v, x);
  return pow(s / detail::count(t.size() - 1), Rational(1 / x));
}

/// M applied to the positive entries only; 0 when there are none.
inline Real positive_filter(const RealTuple& t, const MeanFunction& m) {
  std::vector<Real> pos;
  for (const auto& v : t) {
    if (v.sign() > 0) pos.push_back(v);
  }
  if (pos.empty()) return Real(0);
  return m(RealTuple(std::move(pos)));
}

/// sqrt(a^2 + b^2) / 2.
inline Real half_quadratic(const RealTuple& t) {
  if (t.size() != 2) throw ArityError("half-quadratic takes exactly 2 arguments");
  detail::require_positive(t, "half-quadratic");
  return sqrt(t[0] * t[0] + t[1] * t[1]) / Real(2);
}

inline bool half_quadratic_mean_region(const RealTuple& t) {
  if (t.size() != 2) return false;
  const Real a2 = t[0] * t[0], b2 = t[1] * t[1];
  return compare(Real(3) * a2, b2) <= 0 || compare(Real(3) * b2, a2) <= 0;
}

/// (a_1 + a_1 a_2 + ... + a_1...a_n) / n; order-sensitive.
inline Real product_chain(const RealTuple& t) {
  if (!detail::all_nonnegative(t)) throw DomainError("product chain needs non-negative entries, got " + t.render());
  Real s = 0, p = 1;
  for (const auto& v : t) {
    p *= v;
    s += p;
  }
  return s / detail::count(t.size());
}

inline Real product_chain_root(const RealTuple& t) {
  return nth_root(product_chain(t), static_cast<unsigned>(t.size()));
}

/// (a + b) / (2 + max - min).
inline Real range_penalized_a(const RealTuple& t) {
  if (t.size() != 2) throw ArityError("range-penalized mean takes exactly 2 arguments");
  detail::require_positive(t, "range-penalized mean");
  return (t[0] + t[1]) / (Real(2) + abs(t[0] - t[1]));
}

/// (a + b) / (2 + 1/(max - min)) off the diagonal, a on it.
inline Real range_penalized_b(const RealTuple& t) {
  if (t.size() != 2) throw ArityError("range-penalized mean takes exactly 2 arguments");
  detail::require_positive(t, "range-penalized mean");
  if (t[0] == t[1]) return t[0];
  return (t[0] + t[1]) / (Real(2) + Real(1) / abs(t[0] - t[1]));
}

/// Symmetric, continuous, quasi-monotone but not monotone right-mean on [0,1]^2.
inline Real quasi_monotone_example(const RealTuple& t) {
  if (t.size() != 2) throw ArityError("quasi-monotone example takes exactly 2 arguments");
  const Real& a = min(t[0], t[1]);
  const Real& b = max(t[0], t[1]);
  if (b.is_zero()) return Real(0);
  const Real r = a / b;
  if (compare(Real(2) * a, b) <= 0) return b * Real(2) * r * r;
  const Real u = Real(1) - r;
  return b * (Real(1) - Real(2) * u * u);
}

/// a - ab + a^2 b.
inline Real fixed_point_example(const RealTuple& t) {
  if (t.size() != 2) throw ArityError("fixed-point example takes exactly 2 arguments");
  const Real& a = t[0];
  const Real& b = t[1];
  return a - a * b + a * a * b;
}

/// min(a^2, b).
inline Real min_square(const RealTuple& t) {
  if (t.size() != 2) throw ArityError("min-square takes exactly 2 arguments");
  return min(t[0] * t[0], t[1]);
}

inline Real max_plus_one(const RealTuple& t) { return max_of(t) + Real(1); }
inline Real twice_max(const RealTuple& t) { return Real(2) * max_of(t); }

// Combinators.

/// f^{-1}(L(f(a_1), ..., f(a_n))).
inline MeanFunction conjugate(const GeneratorFunction& f, const MeanFunction& l, std::string id, DomainBox box) {
  auto image = [f](const RealTuple& t) {
    std::vector<Real> v;
    v.reserve(t.size());
    for (const auto& x : t) v.push_back(f(x));
    return RealTuple(std::move(v));
  };
  return MeanFunction(
      std::move(id), l.arity(), std::move(box),
      [f, l, image](const RealTuple& t) {
        for (const auto& x : t) {
          if (!f.in_bracket(x)) return false;
        }
        try {
          return l.in_domain(image(t));
        } catch (const DomainError&) {
          return false;
        }
      },
      [f, l, image](const RealTuple& t) {
        return f.inverse(l(image(t)), min_of(t).to_double(), max_of(t).to_double());
      });
}

/// K_{f,m} = f^{-1}(A_m(f(a_1), ..., f(a_n))).
inline Real conjugate_floor(const RealTuple& t, const GeneratorFunction& f, int m) {
  std::vector<Real> v;
  v.reserve(t.size());
  for (const auto& x : t) v.push_back(f(x));
  const Real y = floor_arith(RealTuple(std::move(v)), m);
  return f.inverse(y, std::nullopt, max_of(t).to_double());
}

inline bool conjugate_floor_domain(const RealTuple& t, const GeneratorFunction& f, int m) {
  bool some = false;
  for (const auto& x : t) {
    if (!f.in_bracket(x)) return false;
    if (f(x).floor_at_scale(m) != 0) some = true;
  }
  return some;
}

enum class ApproxRule { Floor, Identity };

/// K applied to per-coordinate approximations from below at resolution m.
inline MeanFunction approx_mean(const MeanFunction& k, ApproxRule rule, int m, std::string id) {
  auto approximate = [rule, m](const RealTuple& t) {
    if (rule == ApproxRule::Identity) return t;
    std::vector<Real> v;
    v.reserve(t.size());
    for (const auto& x : t) v.push_back(floor_scaled(x, m));
    return RealTuple(std::move(v));
  };
  return MeanFunction(
      std::move(id), k.arity(), k.box(), [k, approximate](const RealTuple& t) { return k.in_domain(approximate(t)); },
      [k, approximate](const RealTuple& t) { return k(approximate(t)); });
}

}  // namespace quasimean
