#pragma once

#include <algorithm>
#include <string>

#include "quasimean/domain.hpp"
#include "quasimean/error.hpp"
#include "quasimean/generator.hpp"
#include "quasimean/mean_function.hpp"
#include "quasimean/real.hpp"
#include "quasimean/tuple.hpp"

namespace quasimean {

/// Comparison slack used whenever an inexact value is involved.
inline constexpr double kMeanLikeTol = 1e-12;

inline Real min_of(const RealTuple& t) {
  Real m = t[0];
  for (const auto& v : t) m = min(m, v);
  return m;
}

inline Real max_of(const RealTuple& t) {
  Real m = t[0];
  for (const auto& v : t) m = max(m, v);
  return m;
}

inline Real sum_of(const RealTuple& t) {
  Real s = 0;
  for (const auto& v : t) s += v;
  return s;
}

inline Real arithmetic_mean(const RealTuple& t) { return sum_of(t) / Real(static_cast<long long>(t.size())); }

namespace detail {

inline void require_positive(const RealTuple& t, const char* what) {
  for (const auto& v : t) {
    if (v.sign() <= 0) throw DomainError(std::string(what) + " needs positive entries, got " + t.render());
  }
}

}  // namespace detail

inline Real geometric_mean(const RealTuple& t) {
  detail::require_positive(t, "geometric mean");
  Real p = 1;
  for (const auto& v : t) p *= v;
  return nth_root(p, static_cast<unsigned>(t.size()));
}

inline Real harmonic_mean(const RealTuple& t) {
  detail::require_positive(t, "harmonic mean");
  Real s = 0;
  for (const auto& v : t) s += Real(1) / v;
  return Real(static_cast<long long>(t.size())) / s;
}

/// (sum a_i^x / n)^(1/x); x = 0 is the geometric mean.
inline Real power_mean(const RealTuple& t, const Rational& x) {
  if (x.is_zero()) return geometric_mean(t);
  if (x.sign() < 0) detail::require_positive(t, "power mean with x <= 0");
  for (const auto& v : t) {
    if (v.sign() < 0) throw DomainError("power mean needs non-negative entries, got " + t.render());
  }
  Real s = 0;
  for (const auto& v : t) s += pow(v, x);
  return pow(s / Real(static_cast<long long>(t.size())), Rational(1 / x));
}

/// f^{-1}((f(a_1) + ... + f(a_n)) / n).
inline Real quasi_arithmetic_mean(const RealTuple& t, const GeneratorFunction& f) {
  if (f.is_identity()) return arithmetic_mean(t);
  Real s = 0;
  for (const auto& v : t) s += f(v);
  const Real y = s / Real(static_cast<long long>(t.size()));
  return f.inverse(y, min_of(t).to_double(), max_of(t).to_double());
}

/// min(t) <= v <= max(t), exactly when everything is exact.
inline bool is_mean_like_value(const RealTuple& t, const Real& v) {
  return leq_tol(min_of(t), v, kMeanLikeTol) && leq_tol(v, max_of(t), kMeanLikeTol);
}

inline bool is_mean_like(const MeanFunction& k, const RealTuple& t) { return is_mean_like_value(t, k(t)); }

/// Clamps K into [min(t), max(t)].
inline MeanFunction truncate_to_mean(const MeanFunction& k) {
  return MeanFunction(
      "truncate(" + k.id() + ")", k.arity(), k.box(), [k](const RealTuple& t) { return k.in_domain(t); },
      [k](const RealTuple& t) { return min(max(min_of(t), k(t)), max_of(t)); });
}

// Ordinary means as MeanFunctions.

inline MeanFunction arith_function() {
  return MeanFunction("arith", Arity::at_least(1), DomainBox::closed(-10, 10), [](const RealTuple& t) {
    return arithmetic_mean(t);
  });
}

inline bool all_positive(const RealTuple& t) {
  return std::all_of(t.begin(), t.end(), [](const Real& v) { return v.sign() > 0; });
}

inline MeanFunction geo_function() {
  return MeanFunction("geo", Arity::at_least(1), DomainBox::left_open(0, 10), all_positive,
                      [](const RealTuple& t) { return geometric_mean(t); });
}

inline MeanFunction harm_function() {
  return MeanFunction("harm", Arity::at_least(1), DomainBox::left_open(0, 10), all_positive,
                      [](const RealTuple& t) { return harmonic_mean(t); });
}

inline MeanFunction power_function(const Rational& x) {
  const std::string id = "power?x=" + Real(x).render_rational();
  if (x.sign() > 0) {
    return MeanFunction(
        id, Arity::at_least(1), DomainBox::closed(0, 10),
        [](const RealTuple& t) { return std::all_of(t.begin(), t.end(), [](const Real& v) { return v.sign() >= 0; }); },
        [x](const RealTuple& t) { return power_mean(t, x); });
  }
  return MeanFunction(id, Arity::at_least(1), DomainBox::left_open(0, 10), all_positive,
                      [x](const RealTuple& t) { return power_mean(t, x); });
}

inline MeanFunction quasi_arith_function(const GeneratorFunction& f, const DomainBox& box) {
  return MeanFunction(
      "quasi-arith?f=" + f.name(), Arity::at_least(1), box,
      [f](const RealTuple& t) { return std::all_of(t.begin(), t.end(), [&](const Real& v) { return f.in_bracket(v); }); },
      [f](const RealTuple& t) { return quasi_arithmetic_mean(t, f); });
}

inline MeanFunction min_function() {
  return MeanFunction("min", Arity::at_least(1), DomainBox::closed(-10, 10), [](const RealTuple& t) { return min_of(t); });
}

inline MeanFunction max_function() {
  return MeanFunction("max", Arity::at_least(1), DomainBox::closed(-10, 10), [](const RealTuple& t) { return max_of(t); });
}

}  // namespace quasimean
