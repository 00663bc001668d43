#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quasimean/catalog.hpp"
#include "quasimean/domain.hpp"
#include "quasimean/error.hpp"
#include "quasimean/mean_function.hpp"
#include "quasimean/means.hpp"
#include "quasimean/measures.hpp"
#include "quasimean/real.hpp"
#include "quasimean/sampling.hpp"
#include "quasimean/tuple.hpp"

namespace quasimean {

enum class Status { HoldsOnSample, Falsified, Inconclusive };

inline std::string status_name(Status s) {
  switch (s) {
    case Status::HoldsOnSample: return "holds-on-sample";
    case Status::Falsified: return "falsified";
    case Status::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

struct PropertyVerdict {
  Property property;
  Status status = Status::Inconclusive;
  /// Tuples that replay the violation (one, or an ordered pair).
  std::vector<RealTuple> witness;
  std::string detail;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  /// Witnessed envelope constant for a-/m-quasi checks.
  std::optional<Real> constant;
};

/// Side from which continuity probes approach a point.
enum class Approach { Full, Left, Right };

/// Everything a property check needs beyond the function itself.
struct CheckContext {
  DomainBox box;
  std::size_t budget = 10000;
  std::uint64_t seed = 0;
  Side side = Side::Both;
  DeclaredClass declared_class = DeclaredClass::None;
  std::optional<Rational> quasi_constant;
  std::vector<RealTuple> probes;
  std::vector<std::pair<RealTuple, RealTuple>> probe_pairs;

  static CheckContext for_entry(const CatalogEntry& e, std::size_t budget, std::uint64_t seed) {
    CheckContext c;
    c.box = e.function.box();
    c.budget = budget;
    c.seed = seed;
    c.side = e.side;
    c.declared_class = e.declared_class;
    c.quasi_constant = e.quasi_constant;
    c.probes = e.probes;
    c.probe_pairs = e.probe_pairs;
    return c;
  }

  static CheckContext plain(const MeanFunction& k, std::size_t budget, std::uint64_t seed, Side side = Side::Both) {
    CheckContext c;
    c.box = k.box();
    c.budget = budget;
    c.seed = seed;
    c.side = side;
    return c;
  }
};

inline constexpr double kContinuityTol = 1e-6;
inline constexpr double kSequenceTol = 1e-12;
inline constexpr double kInjectiveTol = 1e-12;

namespace detail {

inline PropertyVerdict verdict(Property p, const CheckContext& c) {
  PropertyVerdict v;
  v.property = p;
  v.seed = c.seed;
  return v;
}

inline PropertyVerdict falsified(PropertyVerdict v, std::vector<RealTuple> w, std::string detail) {
  v.status = Status::Falsified;
  v.witness = std::move(w);
  v.detail = std::move(detail);
  return v;
}

inline PropertyVerdict finish(PropertyVerdict v, std::size_t tested, std::string what) {
  v.samples = tested;
  if (tested == 0) {
    v.status = Status::Inconclusive;
    v.detail = "no admissible " + what;
  } else {
    v.status = Status::HoldsOnSample;
    v.detail = "no violation on " + std::to_string(tested) + " " + what;
  }
  return v;
}

/// Tuples of arity >= 2 drawn from the box, probes first.
class Stream {
 public:
  Stream(const MeanFunction& k, const CheckContext& c, std::string_view label)
      : k_(k), c_(c), sampler_(c.box.with_arity(k.arity()), derive_seed(c.seed, label)) {}

  TupleSampler& sampler() { return sampler_; }

  std::size_t arity() { return sampler_.draw_arity(2); }

  /// Next probe of arity >= 2 accepted by K, else nullopt once probes run out.
  std::optional<RealTuple> probe() {
    while (next_probe_ < c_.probes.size()) {
      const RealTuple& t = c_.probes[next_probe_++];
      if (t.size() >= 2 && k_.in_domain(t)) return t;
    }
    return std::nullopt;
  }

  /// A domain tuple of the given arity, by rejection; nullopt if none found.
  std::optional<RealTuple> draw(std::size_t n, bool diagonal = false) {
    for (int i = 0; i < 200; ++i) {
      RealTuple t = diagonal ? sampler_.diagonal(n) : sampler_.tuple(n);
      if (k_.in_domain(t)) return t;
    }
    return std::nullopt;
  }

  std::optional<RealTuple> next() {
    if (auto p = probe()) return p;
    return draw(arity());
  }

 private:
  const MeanFunction& k_;
  const CheckContext& c_;
  TupleSampler sampler_;
  std::size_t next_probe_ = 0;
};

inline std::string show(const RealTuple& t, const Real& v) { return "K" + t.render() + " = " + v.render(); }

inline bool degenerate(const CheckContext& c) { return c.box.degenerate(); }

inline PropertyVerdict degenerate_verdict(Property p, const CheckContext& c) {
  auto v = verdict(p, c);
  v.status = Status::Inconclusive;
  v.detail = "degenerate box: no non-constant tuples";
  return v;
}

inline Real unit_of(const DomainBox& box, const RealTuple& t) {
  if (box.bounded()) {
    const Real w = box.upper - box.lower;
    return w.is_zero() ? Real(1) : w;
  }
  Real m = 1;
  for (const auto& x : t) m = max(m, abs(x));
  return m;
}

inline RealTuple shifted(const RealTuple& t, const std::vector<Rational>& dir, const Real& h) {
  std::vector<Real> v;
  v.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) v.push_back(dir[i].is_zero() ? t[i] : t[i] + h * Real(dir[i]));
  return RealTuple(std::move(v));
}

/// Probe directions: the whole one-sided orthant diagonal, a graded mixed
/// direction and each coordinate axis.
inline std::vector<std::vector<Rational>> directions(std::size_t n, Approach a) {
  std::vector<std::vector<Rational>> out;
  std::vector<int> signs;
  if (a != Approach::Right) signs.push_back(-1);
  if (a != Approach::Left) signs.push_back(1);
  for (int s : signs) {
    out.emplace_back(n, Rational(s));
    std::vector<Rational> graded(n);
    for (std::size_t i = 0; i < n; ++i) graded[i] = Rational(s, static_cast<long long>(i + 1));
    out.push_back(graded);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Rational> e(n, Rational(0));
      e[i] = s;
      out.push_back(e);
    }
  }
  if (a == Approach::Full && n >= 2) {
    std::vector<Rational> alt(n);
    for (std::size_t i = 0; i < n; ++i) alt[i] = i % 2 ? -1 : 1;
    out.push_back(alt);
  }
  return out;
}

inline double gap(const Real& a, const Real& b) {
  if (a.exact() && b.exact()) return std::abs((a - b).to_double());
  return std::abs(a.to_double() - b.to_double());
}

}  // namespace detail

// Envelope checks.

inline PropertyVerdict check_envelope(const MeanFunction& k, const CheckContext& c, Property p) {
  const bool lower = p == Property::LeftMean || p == Property::Mean;
  const bool upper = p == Property::RightMean || p == Property::Mean;
  auto v = detail::verdict(p, c);
  detail::Stream s(k, c, property_name(p));
  std::size_t tested = 0;
  for (std::size_t i = 0; i < c.budget; ++i) {
    const auto t = s.next();
    if (!t) continue;
    const auto val = safe_eval(k, *t);
    if (!val) continue;
    ++tested;
    if (lower && !leq_tol(min_of(*t), *val, kMeanLikeTol)) {
      v.samples = tested;
      return detail::falsified(v, {*t}, detail::show(*t, *val) + " < min " + min_of(*t).render());
    }
    if (upper && !leq_tol(*val, max_of(*t), kMeanLikeTol)) {
      v.samples = tested;
      return detail::falsified(v, {*t}, detail::show(*t, *val) + " > max " + max_of(*t).render());
    }
  }
  return detail::finish(v, tested, "tuples");
}

inline PropertyVerdict check_left_mean(const MeanFunction& k, const CheckContext& c) {
  return check_envelope(k, c, Property::LeftMean);
}
inline PropertyVerdict check_right_mean(const MeanFunction& k, const CheckContext& c) {
  return check_envelope(k, c, Property::RightMean);
}
inline PropertyVerdict check_mean(const MeanFunction& k, const CheckContext& c) {
  return check_envelope(k, c, Property::Mean);
}

/// Strict inequality on the envelope side(s) of the context, for non-constant tuples.
inline PropertyVerdict check_strict(const MeanFunction& k, const CheckContext& c) {
  if (detail::degenerate(c)) return detail::degenerate_verdict(Property::Strict, c);
  auto v = detail::verdict(Property::Strict, c);
  detail::Stream s(k, c, "strict");
  // Means are strict on both sides whatever side their strong variant uses.
  const bool mean = c.declared_class == DeclaredClass::Mean;
  const bool lower = mean || c.side != Side::Right, upper = mean || c.side != Side::Left;
  std::size_t tested = 0;
  for (std::size_t i = 0; i < c.budget; ++i) {
    const auto t = s.next();
    if (!t || t->constant()) continue;
    const auto val = safe_eval(k, *t);
    if (!val) continue;
    ++tested;
    if (lower && compare(min_of(*t), *val) >= 0) {
      v.samples = tested;
      return detail::falsified(v, {*t}, detail::show(*t, *val) + " is not above min " + min_of(*t).render());
    }
    if (upper && compare(*val, max_of(*t)) >= 0) {
      v.samples = tested;
      return detail::falsified(v, {*t}, detail::show(*t, *val) + " is not below max " + max_of(*t).render());
    }
  }
  return detail::finish(v, tested, "non-constant tuples");
}

/// Right side: K <= min; left side: K >= max.
inline PropertyVerdict check_strong(const MeanFunction& k, const CheckContext& c) {
  auto v = detail::verdict(Property::Strong, c);
  detail::Stream s(k, c, "strong");
  const bool right = c.side != Side::Left, left = c.side != Side::Right;
  std::size_t tested = 0;
  for (std::size_t i = 0; i < c.budget; ++i) {
    const auto t = s.next();
    if (!t) continue;
    const auto val = safe_eval(k, *t);
    if (!val) continue;
    ++tested;
    if (right && !leq_tol(*val, min_of(*t), kMeanLikeTol)) {
      v.samples = tested;
      return detail::falsified(v, {*t}, detail::show(*t, *val) + " > min " + min_of(*t).render());
    }
    if (left && !leq_tol(max_of(*t), *val, kMeanLikeTol)) {
      v.samples = tested;
      return detail::falsified(v, {*t}, detail::show(*t, *val) + " < max " + max_of(*t).render());
    }
  }
  return detail::finish(v, tested, "tuples");
}

// Structural checks.

/// K(t) <= K(t') for coordinate-wise ordered pairs t <= t'.
inline PropertyVerdict check_monotone(const MeanFunction& k, const CheckContext& c) {
  auto v = detail::verdict(Property::Monotone, c);
  detail::Stream s(k, c, "monotone");
  std::size_t tested = 0;
  auto test = [&](const RealTuple& a, const RealTuple& b) -> std::optional<PropertyVerdict> {
    const auto ka = safe_eval(k, a), kb = safe_eval(k, b);
    if (!ka || !kb) return std::nullopt;
    ++tested;
    if (!leq_tol(*ka, *kb, kMeanLikeTol)) {
      v.samples = tested;
      return detail::falsified(v, {a, b}, detail::show(a, *ka) + " > " + detail::show(b, *kb));
    }
    return std::nullopt;
  };
  for (const auto& [a, b] : c.probe_pairs) {
    if (k.in_domain(a) && k.in_domain(b)) {
      if (auto f = test(a, b)) return *f;
    }
  }
  auto& smp = s.sampler();
  for (std::size_t i = 0; i < c.budget; ++i) {
    const auto t = s.draw(s.arity());
    if (!t) continue;
    std::vector<Real> up(t->begin(), t->end());
    bool moved = false;
    for (auto& x : up) {
      const double u = smp.rng().unit();
      if (u < 0.4) {
        const Real y = smp.coordinate();
        if (compare(y, x) > 0) {
          x = y;
          moved = true;
        }
      } else if (u < 0.7) {
        const int e = static_cast<int>(smp.rng().between(1, 9));
        const Real y = x + detail::unit_of(c.box, *t) * Real(pow10_rational(-e));
        if (c.box.contains(y)) {
          x = y;
          moved = true;
        }
      }
    }
    if (!moved) continue;
    RealTuple b(std::move(up));
    if (!k.in_domain(b)) continue;
    if (auto f = test(*t, b)) return *f;
  }
  return detail::finish(v, tested, "ordered pairs");
}

inline PropertyVerdict check_symmetric(const MeanFunction& k, const CheckContext& c) {
  auto v = detail::verdict(Property::Symmetric, c);
  detail::Stream s(k, c, "symmetric");
  std::size_t tested = 0;
  for (std::size_t i = 0; i < c.budget; ++i) {
    const auto t = s.next();
    if (!t || t->constant()) continue;
    std::vector<Real> p(t->begin(), t->end());
    for (std::size_t j = p.size() - 1; j > 0; --j) std::swap(p[j], p[s.sampler().rng().below(j + 1)]);
    RealTuple pt(std::move(p));
    if (pt == *t) {
      std::vector<Real> q(t->begin(), t->end());
      std::reverse(q.begin(), q.end());
      pt = RealTuple(std::move(q));
    }
    if (!k.in_domain(pt)) continue;
    const auto a = safe_eval(k, *t), b = safe_eval(k, pt);
    if (!a || !b) continue;
    ++tested;
    if (!approx_equal(*a, *b, kMeanLikeTol)) {
      v.samples = tested;
      return detail::falsified(v, {*t, pt}, detail::show(*t, *a) + " != " + detail::show(pt, *b));
    }
  }
  return detail::finish(v, tested, "permutations");
}

inline PropertyVerdict check_reflexive(const MeanFunction& k, const CheckContext& c) {
  auto v = detail::verdict(Property::Reflexive, c);
  detail::Stream s(k, c, "reflexive");
  std::size_t tested = 0;
  auto test = [&](const RealTuple& t) -> std::optional<PropertyVerdict> {
    const auto val = safe_eval(k, t);
    if (!val) return std::nullopt;
    ++tested;
    if (!approx_equal(*val, t[0], kMeanLikeTol)) {
      v.samples = tested;
      return detail::falsified(v, {t}, detail::show(t, *val) + " != " + t[0].render());
    }
    return std::nullopt;
  };
  for (const auto& p : c.probes) {
    if (p.size() < 2 || !p.constant() || !k.in_domain(p)) continue;
    if (auto f = test(p)) return *f;
  }
  for (std::size_t i = 0; i < c.budget; ++i) {
    const auto t = s.draw(s.arity(), true);
    if (!t) continue;
    if (auto f = test(*t)) return *f;
  }
  return detail::finish(v, tested, "diagonal tuples");
}

/// b = K(a..a) implies K(b..b) = b; skipped when (b..b) leaves the domain.
inline PropertyVerdict check_semi_reflexive(const MeanFunction& k, const CheckContext& c) {
  auto v = detail::verdict(Property::SemiReflexive, c);
  detail::Stream s(k, c, "semi-reflexive");
  std::size_t tested = 0;
  auto test = [&](const RealTuple& t) -> std::optional<PropertyVerdict> {
    const auto b = safe_eval(k, t);
    if (!b) return std::nullopt;
    RealTuple bb(std::vector<Real>(t.size(), *b));
    const auto kb = safe_eval(k, bb);
    if (!kb) return std::nullopt;
    ++tested;
    if (!approx_equal(*kb, *b, kMeanLikeTol)) {
      v.samples = tested;
      return detail::falsified(v, {t, bb}, detail::show(t, *b) + " but " + detail::show(bb, *kb));
    }
    return std::nullopt;
  };
  for (const auto& p : c.probes) {
    if (p.size() < 2 || !p.constant() || !k.in_domain(p)) continue;
    if (auto f = test(p)) return *f;
  }
  for (std::size_t i = 0; i < c.budget; ++i) {
    const auto t = s.draw(s.arity(), true);
    if (!t) continue;
    if (auto f = test(*t)) return *f;
  }
  return detail::finish(v, tested, "diagonal tuples");
}

// Continuity.

/// Evaluates K along one-sided geometric grids t + h d, h = u * 10^-k,
/// k = 1..scales. Falsified when K stays farther than 1e-6 from `target`
/// (K(t) unless given) at both of the two finest scales along some direction
/// and the gap no longer shrinks between them.
inline PropertyVerdict continuity_probe(const MeanFunction& k, const RealTuple& t, Approach a,
                                        const DomainBox& box, std::optional<Real> target, Property p,
                                        int scales = 9, bool punctured = false) {
  PropertyVerdict v;
  v.property = p;
  const auto base = punctured ? target : safe_eval(k, t);
  if (!base) {
    v.detail = "base point outside the domain";
    return v;
  }
  const Real goal = target.value_or(*base);
  const Real unit = detail::unit_of(box, t);
  std::size_t tested = 0;
  for (const auto& dir : detail::directions(t.size(), a)) {
    std::optional<RealTuple> last;
    std::optional<Real> last_val;
    int seen = 0;
    double gaps[2] = {0, 0};
    for (int s = scales - 1; s <= scales; ++s) {
      const Real h = unit * Real(pow10_rational(-s));
      RealTuple q = detail::shifted(t, dir, h);
      if (!box.contains(q)) break;
      const auto val = safe_eval(k, q);
      if (!val) break;
      gaps[seen++] = detail::gap(*val, goal);
      last = q;
      last_val = val;
    }
    if (seen < 2) continue;
    ++tested;
    // A gap still shrinking by a tenth per decade is a slow (Hoelder) approach, not a jump.
    if (gaps[0] > kContinuityTol && gaps[1] > kContinuityTol && gaps[1] >= 0.9 * gaps[0]) {
      v.samples = tested;
      return detail::falsified(v, {t, *last},
                               detail::show(*last, *last_val) + " stays away from " + goal.render() + " near " +
                                   t.render());
    }
  }
  return detail::finish(v, tested, "probe directions");
}

inline PropertyVerdict check_continuity_at(const MeanFunction& k, const RealTuple& t, Approach a,
                                           const DomainBox& box, int scales = 9) {
  const Property p = a == Approach::Left    ? Property::LeftContinuous
                     : a == Approach::Right ? Property::RightContinuous
                                                    : Property::Continuous;
  return continuity_probe(k, t, a, box, std::nullopt, p, scales);
}

/// Punctured approach to (a, ..., a): K must tend to a.
inline PropertyVerdict check_mean_continuity_at(const MeanFunction& k, const Real& a, std::size_t n,
                                                const DomainBox& box, int scales = 9) {
  const RealTuple t(std::vector<Real>(n, a));
  return continuity_probe(k, t, Approach::Full, box, a, Property::MeanContinuous, scales, true);
}

inline PropertyVerdict check_continuity(const MeanFunction& k, const CheckContext& c, Property p) {
  if (detail::degenerate(c)) return detail::degenerate_verdict(p, c);
  const auto a = p == Property::LeftContinuous    ? Approach::Left
                 : p == Property::RightContinuous ? Approach::Right
                                                  : Approach::Full;
  auto v = detail::verdict(p, c);
  detail::Stream s(k, c, property_name(p));
  const std::size_t points = std::max<std::size_t>(50, c.budget / 100);
  const DomainBox box = c.box.with_arity(k.arity());
  std::size_t tested = 0;
  for (std::size_t i = 0; i < points + c.probes.size(); ++i) {
    const auto t = s.next();
    if (!t) continue;
    auto r = check_continuity_at(k, *t, a, box);
    if (r.status == Status::Falsified) {
      r.seed = c.seed;
      r.samples = tested + 1;
      return r;
    }
    if (r.status == Status::HoldsOnSample) ++tested;
  }
  return detail::finish(v, tested, "base points");
}

inline PropertyVerdict check_mean_continuity(const MeanFunction& k, const CheckContext& c) {
  if (detail::degenerate(c)) return detail::degenerate_verdict(Property::MeanContinuous, c);
  auto v = detail::verdict(Property::MeanContinuous, c);
  detail::Stream s(k, c, "mean-continuous");
  const DomainBox box = c.box.with_arity(k.arity());
  const std::size_t points = std::max<std::size_t>(50, c.budget / 100);
  std::size_t tested = 0;
  auto test = [&](const Real& a, std::size_t n) -> std::optional<PropertyVerdict> {
    auto r = check_mean_continuity_at(k, a, n, box);
    if (r.status == Status::Falsified) {
      r.seed = c.seed;
      r.samples = tested + 1;
      return r;
    }
    if (r.status == Status::HoldsOnSample) ++tested;
    return std::nullopt;
  };
  for (const auto& p : c.probes) {
    if (p.size() < 2 || !p.constant()) continue;
    if (auto f = test(p[0], p.size())) return *f;
  }
  for (std::size_t i = 0; i < points; ++i) {
    if (auto f = test(s.sampler().coordinate(), s.arity())) return *f;
  }
  return detail::finish(v, tested, "diagonal points");
}

// Two-variable analysis.

/// Whether K accepts two arguments; the checks below need that.
inline bool binary(const MeanFunction& k) { return k.arity().accepts(2); }

/// One-sided orbit a_{n+1} = K(a_n, b) (or b_{n+1} = K(a, b_n) when
/// `iterate_right` is false), stopped at a fixed point or a domain exit.
inline std::vector<Real> orbit(const MeanFunction& k, const Real& a, const Real& b, bool iterate_first,
                               std::size_t max_iter) {
  std::vector<Real> seq{iterate_first ? a : b};
  for (std::size_t i = 0; i < max_iter; ++i) {
    const Real& x = seq.back();
    const auto next = safe_eval(k, iterate_first ? RealTuple{x, b} : RealTuple{a, x});
    if (!next || !next->finite()) break;
    const bool fixed = identical(*next, x) || detail::gap(*next, x) <= 1e-15 * std::max(1.0, std::abs(x.to_double()));
    seq.push_back(*next);
    if (fixed) break;
  }
  return seq;
}

inline bool monotone_sequence(const std::vector<Real>& s) {
  bool up = true, down = true;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double d = s[i].exact() && s[i - 1].exact() ? (s[i] - s[i - 1]).to_double()
                                                        : s[i].to_double() - s[i - 1].to_double();
    if (d < -kSequenceTol) up = false;
    if (d > kSequenceTol) down = false;
  }
  return up || down;
}

inline PropertyVerdict check_quasi_monotone(const MeanFunction& k, const CheckContext& c, std::size_t max_iter = 50) {
  auto v = detail::verdict(Property::QuasiMonotone, c);
  if (!binary(k)) {
    v.detail = "needs a 2-variable function";
    return v;
  }
  const MeanFunction k2 = k.restricted(2);
  std::vector<bool> variants;
  if (c.declared_class == DeclaredClass::LeftMean) {
    variants = {false};
  } else if (c.declared_class == DeclaredClass::Mean) {
    variants = {true, false};
  } else {
    variants = {true};
  }
  detail::Stream s(k2, c, "quasi-monotone");
  const std::size_t pairs = std::max<std::size_t>(20, c.budget / 50);
  std::size_t tested = 0;
  for (std::size_t i = 0; i < pairs + c.probes.size(); ++i) {
    auto t = s.next();
    if (!t || t->size() != 2) continue;
    const Real a = min((*t)[0], (*t)[1]), b = max((*t)[0], (*t)[1]);
    for (bool first : variants) {
      const auto seq = orbit(k2, a, b, first, max_iter);
      if (seq.size() < 3) continue;
      ++tested;
      if (!monotone_sequence(seq)) {
        v.samples = tested;
        std::string head;
        for (std::size_t j = 0; j < std::min<std::size_t>(seq.size(), 5); ++j) head += (j ? ", " : "") + seq[j].render();
        return detail::falsified(v, {RealTuple{a, b}},
                                 std::string(first ? "a" : "b") + "-orbit is not monotone: " + head);
      }
    }
  }
  return detail::finish(v, tested, "orbits");
}

/// K(x, b) = K(y, b) implies x = y, on a grid of [lower, b].
inline PropertyVerdict check_right_injective(const MeanFunction& k, const Real& b, const DomainBox& box,
                                             std::size_t grid) {
  PropertyVerdict v;
  v.property = Property::RightInjective;
  if (!binary(k) || !box.lower.finite() || compare(b, box.lower) <= 0) {
    v.detail = "needs a 2-variable function and b above a finite lower bound";
    return v;
  }
  std::vector<std::pair<Real, Real>> values;
  for (std::size_t i = 0; i <= grid; ++i) {
    const Real x = box.lower + (b - box.lower) * Real(Rational(static_cast<long long>(i), static_cast<long long>(grid)));
    if (auto val = safe_eval(k, RealTuple{x, b})) values.emplace_back(*val, x);
  }
  std::sort(values.begin(), values.end(), [](const auto& p, const auto& q) { return compare(p.first, q.first) < 0; });
  for (std::size_t i = 1; i < values.size(); ++i) {
    const auto& [v0, x0] = values[i - 1];
    const auto& [v1, x1] = values[i];
    if (detail::gap(v0, v1) <= kInjectiveTol * std::max(1.0, std::abs(v0.to_double())) && !(x0 == x1)) {
      return detail::falsified(v, {RealTuple{x0, b}, RealTuple{x1, b}},
                               "K(" + x0.render() + ", " + b.render() + ") = K(" + x1.render() + ", " + b.render() +
                                   ") = " + v0.render());
    }
  }
  return detail::finish(v, values.size(), "grid points");
}

/// K(a, x) = K(a, y) implies x = y, on a grid of [a, upper].
inline PropertyVerdict check_left_injective(const MeanFunction& k, const Real& a, const DomainBox& box,
                                            std::size_t grid) {
  PropertyVerdict v;
  v.property = Property::LeftInjective;
  if (!binary(k) || !box.upper.finite() || compare(a, box.upper) >= 0) {
    v.detail = "needs a 2-variable function and a below a finite upper bound";
    return v;
  }
  std::vector<std::pair<Real, Real>> values;
  for (std::size_t i = 0; i <= grid; ++i) {
    const Real x = a + (box.upper - a) * Real(Rational(static_cast<long long>(i), static_cast<long long>(grid)));
    if (auto val = safe_eval(k, RealTuple{a, x})) values.emplace_back(*val, x);
  }
  std::sort(values.begin(), values.end(), [](const auto& p, const auto& q) { return compare(p.first, q.first) < 0; });
  for (std::size_t i = 1; i < values.size(); ++i) {
    const auto& [v0, x0] = values[i - 1];
    const auto& [v1, x1] = values[i];
    if (detail::gap(v0, v1) <= kInjectiveTol * std::max(1.0, std::abs(v0.to_double())) && !(x0 == x1)) {
      return detail::falsified(v, {RealTuple{a, x0}, RealTuple{a, x1}},
                               "K(" + a.render() + ", " + x0.render() + ") = K(" + a.render() + ", " + x1.render() +
                                   ") = " + v0.render());
    }
  }
  return detail::finish(v, values.size(), "grid points");
}

inline PropertyVerdict check_injective(const MeanFunction& k, const CheckContext& c, Property p) {
  auto v = detail::verdict(p, c);
  if (!binary(k)) {
    v.detail = "needs a 2-variable function";
    return v;
  }
  const MeanFunction k2 = k.restricted(2);
  const DomainBox box = c.box.with_arity(Arity::fixed(2));
  if (!box.bounded()) {
    v.detail = "needs a bounded box";
    return v;
  }
  const bool right = p == Property::RightInjective;
  TupleSampler smp(box, derive_seed(c.seed, property_name(p)));
  std::vector<Real> anchors{right ? box.upper : box.lower};
  for (int i = 0; i < 4; ++i) anchors.push_back(smp.coordinate());
  const std::size_t grid = std::clamp<std::size_t>(c.budget / 10, 100, 2000);
  std::size_t tested = 0;
  for (const auto& x : anchors) {
    auto r = right ? check_right_injective(k2, x, box, grid) : check_left_injective(k2, x, box, grid);
    if (r.status == Status::Falsified) {
      r.seed = c.seed;
      r.samples = tested + r.witness.size();
      return r;
    }
    tested += r.samples;
  }
  return detail::finish(v, tested, "grid points");
}

// Quasi-mean constants.

inline PropertyVerdict check_quasi_constant(const MeanFunction& k, const CheckContext& c, Property p) {
  auto v = detail::verdict(p, c);
  const SupEstimate e = p == Property::AQuasi ? a_quasi_constant(k, c.box, c.budget, derive_seed(c.seed, "a-quasi"))
                                              : m_quasi_constant(k, c.box, c.budget, derive_seed(c.seed, "m-quasi"));
  v.samples = e.evaluated;
  v.constant = e.lower_bound;
  if (e.diverging) {
    return detail::falsified(v, e.witness ? std::vector<RealTuple>{*e.witness} : std::vector<RealTuple>{},
                             "witnessed constant " + e.lower_bound.render() + " exceeds the divergence threshold");
  }
  if (c.quasi_constant && !leq_tol(e.lower_bound, Real(*c.quasi_constant), kMeanLikeTol)) {
    return detail::falsified(v, e.witness ? std::vector<RealTuple>{*e.witness} : std::vector<RealTuple>{},
                             "witnessed constant " + e.lower_bound.render() + " exceeds the declared " +
                                 Real(*c.quasi_constant).render());
  }
  v.status = Status::HoldsOnSample;
  v.detail = "witnessed constant " + e.lower_bound.render();
  return v;
}

/// Dispatches to the property's check.
inline PropertyVerdict check_property(const MeanFunction& k, const CheckContext& c, Property p) {
  CheckContext cc = c;
  cc.seed = derive_seed(c.seed, property_name(p));
  PropertyVerdict v = [&] {
    switch (p) {
      case Property::LeftMean:
      case Property::RightMean:
      case Property::Mean: return check_envelope(k, cc, p);
      case Property::Strict: return check_strict(k, cc);
      case Property::Monotone: return check_monotone(k, cc);
      case Property::Symmetric: return check_symmetric(k, cc);
      case Property::Reflexive: return check_reflexive(k, cc);
      case Property::SemiReflexive: return check_semi_reflexive(k, cc);
      case Property::Continuous:
      case Property::LeftContinuous:
      case Property::RightContinuous: return check_continuity(k, cc, p);
      case Property::MeanContinuous: return check_mean_continuity(k, cc);
      case Property::Strong: return check_strong(k, cc);
      case Property::QuasiMonotone: return check_quasi_monotone(k, cc);
      case Property::LeftInjective:
      case Property::RightInjective: return check_injective(k, cc, p);
      case Property::AQuasi:
      case Property::MQuasi: return check_quasi_constant(k, cc, p);
    }
    return detail::verdict(p, cc);
  }();
  v.seed = c.seed;
  return v;
}

// Reports.

struct MatrixRow {
  Property property;
  bool declared_holds;
  PropertyVerdict verdict;
  bool agrees() const {
    return declared_holds ? verdict.status == Status::HoldsOnSample : verdict.status == Status::Falsified;
  }
};

struct ClassificationReport {
  std::string id;
  std::string box;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  std::vector<PropertyVerdict> verdicts;
  std::vector<MatrixRow> matrix;
  /// Informational check of the alternate class reading, if any.
  std::optional<std::pair<DeclaredClass, PropertyVerdict>> alternate;

  bool declared_falsified() const {
    return std::any_of(matrix.begin(), matrix.end(),
                       [](const MatrixRow& r) { return r.declared_holds && r.verdict.status == Status::Falsified; });
  }
  bool matrix_agrees() const {
    return std::all_of(matrix.begin(), matrix.end(), [](const MatrixRow& r) { return r.agrees(); });
  }
};

inline Property class_property(DeclaredClass c) {
  switch (c) {
    case DeclaredClass::LeftMean: return Property::LeftMean;
    case DeclaredClass::RightMean: return Property::RightMean;
    case DeclaredClass::AQuasi: return Property::AQuasi;
    case DeclaredClass::MQuasi: return Property::MQuasi;
    default: return Property::Mean;
  }
}

/// Declared-vs-tested matrix only.
inline ClassificationReport declared_matrix(const CatalogEntry& e, std::size_t budget, std::uint64_t seed,
                                            std::optional<DomainBox> box = std::nullopt) {
  CheckContext c = CheckContext::for_entry(e, budget, seed);
  if (box) c.box = box->with_arity(e.function.arity());
  ClassificationReport r{e.id, c.box.describe(), budget, seed, {}, {}, std::nullopt};
  for (const auto& d : e.claims()) r.matrix.push_back({d.property, d.holds, check_property(e.function, c, d.property)});
  if (e.alternate_class) {
    r.alternate = std::make_pair(*e.alternate_class, check_property(e.function, c, class_property(*e.alternate_class)));
  }
  return r;
}

/// Every property plus the declared-vs-tested matrix.
inline ClassificationReport classify(const CatalogEntry& e, std::size_t budget, std::uint64_t seed,
                                     std::optional<DomainBox> box = std::nullopt) {
  ClassificationReport r = declared_matrix(e, budget, seed, box);
  CheckContext c = CheckContext::for_entry(e, budget, seed);
  if (box) c.box = box->with_arity(e.function.arity());
  for (Property p : kAllProperties) {
    const auto it = std::find_if(r.matrix.begin(), r.matrix.end(), [p](const MatrixRow& m) { return m.property == p; });
    r.verdicts.push_back(it != r.matrix.end() ? it->verdict : check_property(e.function, c, p));
  }
  return r;
}

// Fixed points of f_b(x) = K(x, b).

struct Gap {
  Real lower;
  Real upper;
  int sign;
};

struct FixedPointDecomposition {
  Real b;
  Real scan_lower;
  Real scan_upper;
  /// Closed pieces of Z_b, isolated points having lower == upper.
  std::vector<std::pair<Real, Real>> fixed;
  std::vector<Gap> gaps;
  /// Pairs (i, j) with f_b(N_i) meeting N_j and s(i) != s(j).
  std::vector<std::pair<std::size_t, std::size_t>> sign_conflicts;
};

/// Scans g(x) = K(x, b) - x over [lo, hi] (default [0, b]), bisects sign
/// changes to 1e-10 and tags each gap by the sign of g at three interior probes.
inline FixedPointDecomposition fixed_point_decomposition(const MeanFunction& k, const Real& b, std::size_t grid,
                                                         std::optional<Real> lo = std::nullopt,
                                                         std::optional<Real> hi = std::nullopt) {
  if (!binary(k)) throw ArityError(k.id() + " is not a 2-variable function");
  const Real a0 = lo.value_or(Real(0));
  const Real a1 = hi.value_or(b);
  if (compare(a0, a1) > 0) throw UsageError("empty scan interval");
  constexpr double kZeroTol = 1e-12;
  auto g = [&](const Real& x) {
    const auto v = safe_eval(k, RealTuple{x, b});
    if (!v) throw DomainError("(" + x.render() + ", " + b.render() + ") is outside Dom " + k.id());
    return *v - x;
  };
  auto sgn = [&](const Real& x) {
    const Real d = g(x);
    if (d.exact()) return d.sign();
    const double y = d.to_double();
    return std::abs(y) <= kZeroTol ? 0 : (y > 0 ? 1 : -1);
  };
  FixedPointDecomposition out{b, a0, a1, {}, {}, {}};
  if (compare(a0, a1) == 0) {
    if (sgn(a0) == 0) out.fixed.emplace_back(a0, a0);
    return out;
  }
  const std::size_t n = std::max<std::size_t>(grid, 2);
  std::vector<Real> xs;
  std::vector<int> ss;
  for (std::size_t i = 0; i <= n; ++i) {
    xs.push_back(a0 + (a1 - a0) * Real(Rational(static_cast<long long>(i), static_cast<long long>(n))));
    ss.push_back(sgn(xs.back()));
  }
  // Root between two grid points of opposite sign.
  auto bisect = [&](Real l, Real r, int sl) {
    for (int i = 0; i < 200 && (r - l).to_double() > 1e-10; ++i) {
      const Real m = decimal_from_double(((l + r) / Real(2)).to_double());
      if (compare(m, l) <= 0 || compare(m, r) >= 0) break;
      const int sm = sgn(m);
      if (sm == 0) return std::make_pair(m, m);
      if (sm == sl) {
        l = m;
      } else {
        r = m;
      }
    }
    return std::make_pair(l, r);
  };
  // Fixed pieces: maximal runs of zero signs, and bisected crossings.
  std::vector<std::pair<Real, Real>> pieces;
  for (std::size_t i = 0; i <= n; ++i) {
    if (ss[i] == 0) {
      std::size_t j = i;
      while (j + 1 <= n && ss[j + 1] == 0) ++j;
      pieces.emplace_back(xs[i], xs[j]);
      i = j;
    } else if (i < n && ss[i + 1] != 0 && ss[i + 1] != ss[i]) {
      auto [l, r] = bisect(xs[i], xs[i + 1], ss[i]);
      const Real root = decimal_from_double(((l + r) / Real(2)).to_double());
      pieces.emplace_back(root, root);
    }
  }
  out.fixed = pieces;
  // Gaps: complements of the fixed pieces inside [a0, a1].
  Real cursor = a0;
  std::vector<std::pair<Real, Real>> holes;
  for (const auto& [l, r] : pieces) {
    if (compare(cursor, l) < 0) holes.emplace_back(cursor, l);
    cursor = r;
  }
  if (compare(cursor, a1) < 0) holes.emplace_back(cursor, a1);
  for (const auto& [l, r] : holes) {
    const Real w = r - l;
    int tag = 0;
    bool consistent = true;
    for (int q = 1; q <= 3; ++q) {
      const int s = sgn(l + w * Real(Rational(q, 4)));
      if (tag == 0) tag = s;
      if (s != tag) consistent = false;
    }
    if (!consistent) throw ContractViolation("sign of K(x,b) - x changes inside a gap; refine the grid");
    out.gaps.push_back({l, r, tag});
  }
  // Images of gaps meeting other gaps must carry the same tag.
  for (std::size_t i = 0; i < out.gaps.size(); ++i) {
    const Gap& gi = out.gaps[i];
    for (int q = 1; q <= 3; ++q) {
      const Real x = gi.lower + (gi.upper - gi.lower) * Real(Rational(q, 4));
      const auto fx = safe_eval(k, RealTuple{x, b});
      if (!fx) continue;
      for (std::size_t j = 0; j < out.gaps.size(); ++j) {
        const Gap& gj = out.gaps[j];
        if (j == i || compare(*fx, gj.lower) <= 0 || compare(*fx, gj.upper) >= 0) continue;
        if (gi.sign != gj.sign) out.sign_conflicts.emplace_back(i, j);
      }
    }
  }
  return out;
}

}  // namespace quasimean
