#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "quasimean/decimal.hpp"
#include "quasimean/domain.hpp"
#include "quasimean/error.hpp"
#include "quasimean/mean_function.hpp"
#include "quasimean/means.hpp"
#include "quasimean/quasi.hpp"
#include "quasimean/real.hpp"
#include "quasimean/sampling.hpp"
#include "quasimean/tuple.hpp"

namespace quasimean {

inline constexpr double kDivergenceThreshold = 1e6;

/// Largest witnessed value of a supremum.
struct SupEstimate {
  Real lower_bound = 0;
  std::optional<RealTuple> witness;
  std::size_t budget = 0;
  std::size_t evaluated = 0;
  std::uint64_t seed = 0;
  bool diverging = false;
};

/// Sampled proportion with a 95% normal-approximation half width.
struct MeasureEstimate {
  Real value = 0;
  double half_width = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t above = 0;
  std::size_t below = 0;
};

/// Value of K at t, or nullopt outside the domain.
inline std::optional<Real> safe_eval(const MeanFunction& k, const RealTuple& t) {
  try {
    return k.try_eval(t);
  } catch (const BracketError&) {
    return std::nullopt;
  }
}

/// Positive part of K - max(t).
inline Real excess_above(const RealTuple& t, const Real& v) {
  const Real d = v - max_of(t);
  return d.sign() > 0 ? d : Real(0);
}

/// Positive part of min(t) - K.
inline Real excess_below(const RealTuple& t, const Real& v) {
  const Real d = min_of(t) - v;
  return d.sign() > 0 ? d : Real(0);
}

namespace detail {

using Objective = std::function<std::optional<Real>(const RealTuple&, const Real&)>;

struct Best {
  Real value = 0;
  std::optional<RealTuple> witness;
};

inline std::optional<Real> objective_at(const MeanFunction& k, const DomainBox& box, const Objective& obj,
                                        const RealTuple& t, std::size_t& evaluated) {
  if (!box.contains(t)) return std::nullopt;
  const auto v = safe_eval(k, t);
  ++evaluated;
  if (!v || !v->finite()) return std::nullopt;
  return obj(t, *v);
}

/// Coordinate-wise golden-section ascent around `start`, 64 evaluations per
/// coordinate and three shrinking radii. Candidate points are rounded to the
/// shortest decimal of their double so that witnesses replay exactly.
inline Best refine(const MeanFunction& k, const DomainBox& box, const Objective& obj, Best start,
                   std::size_t& evaluated) {
  constexpr double kPhi = 0.6180339887498949;
  constexpr int kSteps = 64;
  if (!start.witness) return start;
  RealTuple s = *start.witness;
  Real fs = start.value;
  const double lo_box = box.lower.finite() ? box.lower.to_double() : -1e300;
  const double hi_box = box.upper.finite() ? box.upper.to_double() : 1e300;
  for (int round = 0; round < 3; ++round) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double x0 = s[i].to_double();
      const double unit = box.bounded() ? (box.upper - box.lower).to_double() : std::max(1.0, std::abs(x0));
      const double radius = unit * 0.05 * std::pow(10.0, -2.0 * round);
      double a = std::max(lo_box, x0 - radius), b = std::min(hi_box, x0 + radius);
      if (!(a < b)) continue;
      auto at = [&](double x) -> std::pair<std::optional<Real>, RealTuple> {
        std::vector<Real> v(s.begin(), s.end());
        v[i] = decimal_from_double(x);
        RealTuple t(std::move(v));
        return {objective_at(k, box, obj, t, evaluated), t};
      };
      auto consider = [&](const std::pair<std::optional<Real>, RealTuple>& r) {
        if (r.first && compare(*r.first, fs) > 0) {
          fs = *r.first;
          s = r.second;
        }
      };
      auto score = [](const std::optional<Real>& v) { return v ? v->to_double() : -1e300; };
      double c = b - kPhi * (b - a), d = a + kPhi * (b - a);
      auto rc = at(c), rd = at(d);
      consider(rc);
      consider(rd);
      for (int step = 2; step < kSteps; ++step) {
        if (score(rc.first) >= score(rd.first)) {
          b = d;
          d = c;
          rd = std::move(rc);
          c = b - kPhi * (b - a);
          rc = at(c);
          consider(rc);
        } else {
          a = c;
          c = d;
          rc = std::move(rd);
          d = a + kPhi * (b - a);
          rd = at(d);
          consider(rd);
        }
      }
    }
  }
  return {fs, s};
}

/// Raw sampling followed by refinement from every raw improvement. The
/// improvements seen in the first N samples do not depend on the budget, so
/// doubling the budget never lowers the result.
inline std::vector<SupEstimate> sup_search(const MeanFunction& k, const DomainBox& box, std::size_t budget,
                                           std::uint64_t seed, const std::vector<Objective>& objectives,
                                           bool near_diagonal, bool with_refinement = true) {
  const DomainBox b = box.with_arity(k.arity());
  TupleSampler sampler(b, derive_seed(seed, "sup"));
  std::vector<Best> best(objectives.size());
  std::vector<std::vector<Best>> improvements(objectives.size());
  std::size_t evaluated = 0, accepted = 0;
  for (std::size_t i = 0; i < budget; ++i) {
    const std::size_t n = sampler.draw_arity(k.arity().variadic ? 2 : k.arity().n);
    RealTuple t = near_diagonal && sampler.rng().chance(0.5) ? sampler.near_diagonal(n) : sampler.tuple(n);
    if (!k.in_domain(t)) continue;
    const auto v = safe_eval(k, t);
    ++evaluated;
    if (!v || !v->finite()) continue;
    ++accepted;
    for (std::size_t j = 0; j < objectives.size(); ++j) {
      const auto f = objectives[j](t, *v);
      if (f && compare(*f, best[j].value) > 0) {
        best[j] = {*f, t};
        improvements[j].push_back(best[j]);
      }
    }
  }
  if (accepted == 0) throw EmptyDomain("no sampled tuple of " + b.describe() + " lies in Dom " + k.id());
  std::vector<SupEstimate> out;
  for (std::size_t j = 0; j < objectives.size(); ++j) {
    Best result = best[j];
    if (with_refinement) {
      for (const auto& start : improvements[j]) {
        Best r = refine(k, b, objectives[j], start, evaluated);
        if (compare(r.value, result.value) > 0) result = r;
      }
    }
    SupEstimate e;
    e.lower_bound = result.value;
    e.witness = result.witness;
    e.budget = budget;
    e.evaluated = evaluated;
    e.seed = seed;
    e.diverging = result.value.to_double() > kDivergenceThreshold;
    out.push_back(e);
  }
  return out;
}

inline Real spread(const RealTuple& t) { return max_of(t) - min_of(t); }

inline Real max_abs(const RealTuple& t) {
  Real m = 0;
  for (const auto& v : t) m = max(m, abs(v));
  return m;
}

inline SupEstimate combine(const std::vector<SupEstimate>& parts) {
  SupEstimate s = parts[0];
  s.lower_bound = parts[0].lower_bound + parts[1].lower_bound;
  s.witness = compare(parts[1].lower_bound, parts[0].lower_bound) > 0 ? parts[1].witness : parts[0].witness;
  s.diverging = parts[0].diverging || parts[1].diverging || s.lower_bound.to_double() > kDivergenceThreshold;
  return s;
}

}  // namespace detail

/// sup (K - max)+ + sup (min - K)+.
inline SupEstimate mdist(const MeanFunction& k, const DomainBox& box, std::size_t budget, std::uint64_t seed) {
  const std::vector<detail::Objective> obj{
      [](const RealTuple& t, const Real& v) -> std::optional<Real> { return excess_above(t, v); },
      [](const RealTuple& t, const Real& v) -> std::optional<Real> { return excess_below(t, v); }};
  return detail::combine(detail::sup_search(k, box, budget, seed, obj, false));
}

/// The two suprema normalized by max - min, over non-constant tuples.
inline SupEstimate mdistp(const MeanFunction& k, const DomainBox& box, std::size_t budget, std::uint64_t seed) {
  auto normalized = [](Real (*part)(const RealTuple&, const Real&)) {
    return [part](const RealTuple& t, const Real& v) -> std::optional<Real> {
      const Real r = detail::spread(t);
      if (r.is_zero()) return std::nullopt;
      return part(t, v) / r;
    };
  };
  const std::vector<detail::Objective> obj{normalized(excess_above), normalized(excess_below)};
  return detail::combine(detail::sup_search(k, box, budget, seed, obj, true));
}

/// Proportion of uniform samples of the box with K > max plus the proportion
/// with K < min. Coordinates are exact dyadic rationals.
inline MeasureEstimate mdista(const MeanFunction& k, const DomainBox& box, std::size_t samples, std::uint64_t seed) {
  if (box.arity.variadic) throw UsageError("mdista needs a fixed arity");
  if (!box.bounded()) throw UsageError("mdista needs a bounded box");
  if (!k.arity().accepts(box.arity.n)) throw ArityError(k.id() + " does not take " + std::to_string(box.arity.n) + " arguments");
  Rng rng(derive_seed(seed, "mdista"));
  const Rational lo = box.lower.rational();
  const Rational width = box.upper.rational() - lo;
  const Rational denom = Rational(Integer(1) << 53);
  MeasureEstimate out;
  out.seed = seed;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    std::vector<Real> v;
    v.reserve(box.arity.n);
    for (std::size_t j = 0; j < box.arity.n; ++j) {
      v.push_back(Real(Rational(lo + width * (Rational(Integer(rng.next() >> 11)) / denom))));
    }
    RealTuple t(std::move(v));
    const auto val = safe_eval(k, t);
    if (!val) continue;
    ++inside;
    if (!leq_tol(*val, max_of(t), kMeanLikeTol)) ++out.above;
    if (!leq_tol(min_of(t), *val, kMeanLikeTol)) ++out.below;
  }
  out.samples = samples;
  if (inside == 0) throw EmptyDomain("no sampled tuple of " + box.describe() + " lies in Dom " + k.id());
  const double p = static_cast<double>(out.above + out.below) / static_cast<double>(samples);
  out.value = Real(Rational(static_cast<long long>(out.above + out.below), static_cast<long long>(samples)));
  out.half_width = 1.96 * std::sqrt(std::max(p * (1 - p), 0.0) / static_cast<double>(samples));
  return out;
}

/// Closed form (4/10^m)(1 - 1/10^m) stated for A_m on [1,2]^2.
inline Real mdista_exact_floor(int m) {
  const Rational s = pow10_rational(-m);
  return Real(Rational(4 * s * (1 - s)));
}

/// Exact violation area of A_m (or A+_m) on [1,2]^2, by summing over the
/// cells of the 10^-m lattice, where the function is constant.
inline Real mdista_cell_count(int m, bool ceiling = false) {
  if (m < 0 || m > 3) throw UsageError("cell count supports 0 <= m <= 3");
  const Integer cells = pow10(static_cast<unsigned>(m));
  const Rational h = pow10_rational(-m);
  Rational area = 0;
  for (Integer i = 0; i < cells; ++i) {
    for (Integer j = 0; j < cells; ++j) {
      const Rational x0 = 1 + Rational(i) * h, y0 = 1 + Rational(j) * h;
      const Rational c = ceiling ? Rational((x0 + h + y0 + h) / 2) : Rational((x0 + y0) / 2);
      // Inside the open cell (x0, x0+h) x (y0, y0+h) the value is c.
      auto clip = [&](const Rational& a, const Rational& b, const Rational& t, bool above) -> Rational {
        // length of {x in (a,b): x > t} or {x < t}
        if (above) return t <= a ? Rational(b - a) : t >= b ? Rational(0) : Rational(b - t);
        return t >= b ? Rational(b - a) : t <= a ? Rational(0) : Rational(t - a);
      };
      if (ceiling) {
        area += clip(x0, x0 + h, c, false) * clip(y0, y0 + h, c, false);  // max < c
      } else {
        area += clip(x0, x0 + h, c, true) * clip(y0, y0 + h, c, true);  // min > c
      }
    }
  }
  return Real(area);
}

/// Smallest witnessed additive envelope constant.
inline SupEstimate a_quasi_constant(const MeanFunction& k, const DomainBox& box, std::size_t budget, std::uint64_t seed) {
  const std::vector<detail::Objective> obj{[](const RealTuple& t, const Real& v) -> std::optional<Real> {
    return max(excess_above(t, v), excess_below(t, v));
  }};
  return detail::sup_search(k, box, budget, seed, obj, false)[0];
}

/// Smallest witnessed envelope constant relative to max |a_i|.
inline SupEstimate m_quasi_constant(const MeanFunction& k, const DomainBox& box, std::size_t budget, std::uint64_t seed) {
  const std::vector<detail::Objective> obj{[](const RealTuple& t, const Real& v) -> std::optional<Real> {
    const Real n = detail::max_abs(t);
    if (n.is_zero()) return std::nullopt;
    return max(excess_above(t, v), excess_below(t, v)) / n;
  }};
  return detail::sup_search(k, box, budget, seed, obj, false)[0];
}

}  // namespace quasimean
