#pragma once

#include <algorithm>
#include <charconv>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quasimean/decimal.hpp"
#include "quasimean/domain.hpp"
#include "quasimean/error.hpp"
#include "quasimean/generator.hpp"
#include "quasimean/mean_function.hpp"
#include "quasimean/means.hpp"
#include "quasimean/quasi.hpp"
#include "quasimean/real.hpp"
#include "quasimean/tuple.hpp"

namespace quasimean {

enum class DeclaredClass { LeftMean, RightMean, Mean, AQuasi, MQuasi, None };

inline std::string class_name(DeclaredClass c) {
  switch (c) {
    case DeclaredClass::LeftMean: return "left-mean";
    case DeclaredClass::RightMean: return "right-mean";
    case DeclaredClass::Mean: return "mean";
    case DeclaredClass::AQuasi: return "a-quasi";
    case DeclaredClass::MQuasi: return "m-quasi";
    case DeclaredClass::None: return "none";
  }
  return "none";
}

enum class Property {
  LeftMean,
  RightMean,
  Mean,
  Strict,
  Monotone,
  Symmetric,
  Reflexive,
  SemiReflexive,
  Continuous,
  LeftContinuous,
  RightContinuous,
  MeanContinuous,
  Strong,
  QuasiMonotone,
  LeftInjective,
  RightInjective,
  AQuasi,
  MQuasi,
};

inline constexpr Property kAllProperties[] = {
    Property::LeftMean,       Property::RightMean,      Property::Mean,          Property::Strict,
    Property::Monotone,       Property::Symmetric,      Property::Reflexive,     Property::SemiReflexive,
    Property::Continuous,     Property::LeftContinuous, Property::RightContinuous, Property::MeanContinuous,
    Property::Strong,         Property::QuasiMonotone,  Property::LeftInjective, Property::RightInjective,
    Property::AQuasi,         Property::MQuasi,
};

inline std::string property_name(Property p) {
  switch (p) {
    case Property::LeftMean: return "left-mean";
    case Property::RightMean: return "right-mean";
    case Property::Mean: return "mean";
    case Property::Strict: return "strict";
    case Property::Monotone: return "monotone";
    case Property::Symmetric: return "symmetric";
    case Property::Reflexive: return "reflexive";
    case Property::SemiReflexive: return "semi-reflexive";
    case Property::Continuous: return "continuous";
    case Property::LeftContinuous: return "left-continuous";
    case Property::RightContinuous: return "right-continuous";
    case Property::MeanContinuous: return "mean-continuous";
    case Property::Strong: return "strong";
    case Property::QuasiMonotone: return "quasi-monotone";
    case Property::LeftInjective: return "left-injective";
    case Property::RightInjective: return "right-injective";
    case Property::AQuasi: return "a-quasi";
    case Property::MQuasi: return "m-quasi";
  }
  return "?";
}

inline std::optional<Property> property_from_name(const std::string& s) {
  for (Property p : kAllProperties) {
    if (property_name(p) == s) return p;
  }
  return std::nullopt;
}

/// Envelope side a strict/strong claim refers to.
enum class Side { Left, Right, Both };

inline std::string side_name(Side s) {
  switch (s) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Both: return "both";
  }
  return "both";
}

struct DeclaredProperty {
  Property property;
  bool holds;
};

/// A registered function with its claimed classification.
struct CatalogEntry {
  std::string id;
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;
  MeanFunction function;
  DeclaredClass declared_class = DeclaredClass::None;
  /// Explicit claims beyond the ones implied by the class.
  std::vector<DeclaredProperty> declared;
  Side side = Side::Both;
  /// Envelope constant for a-/m-quasi claims.
  std::optional<Rational> quasi_constant;
  /// Points tried before random samples.
  std::vector<RealTuple> probes;
  /// Ordered pairs t <= t' tried first by the monotonicity checks.
  std::vector<std::pair<RealTuple, RealTuple>> probe_pairs;
  /// A second reading of the class, reported but not gating.
  std::optional<DeclaredClass> alternate_class;
  std::string note;

  /// Class-implied claims followed by the explicit ones.
  std::vector<DeclaredProperty> claims() const {
    std::vector<DeclaredProperty> out;
    switch (declared_class) {
      case DeclaredClass::LeftMean: out.push_back({Property::LeftMean, true}); break;
      case DeclaredClass::RightMean: out.push_back({Property::RightMean, true}); break;
      case DeclaredClass::Mean: out.push_back({Property::Mean, true}); break;
      case DeclaredClass::AQuasi: out.push_back({Property::AQuasi, true}); break;
      case DeclaredClass::MQuasi: out.push_back({Property::MQuasi, true}); break;
      case DeclaredClass::None: break;
    }
    for (const auto& d : declared) {
      const bool dup = std::any_of(out.begin(), out.end(), [&](const DeclaredProperty& o) { return o.property == d.property; });
      if (!dup) out.push_back(d);
    }
    return out;
  }

  std::optional<bool> claim(Property p) const {
    for (const auto& c : claims()) {
      if (c.property == p) return c.holds;
    }
    return std::nullopt;
  }
};

// Id grammar: name[?key=value(&key=value)*]; values holding '?' or '&' are
// wrapped in parentheses.

struct ParsedId {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;
};

inline ParsedId parse_id(const std::string& text) {
  ParsedId out;
  const auto q = text.find('?');
  out.name = text.substr(0, q);
  if (out.name.empty()) throw UsageError("empty mean id");
  if (q == std::string::npos) return out;
  const std::string rest = text.substr(q + 1);
  std::size_t start = 0;
  int depth = 0;
  auto flush = [&](std::size_t end) {
    const std::string item = rest.substr(start, end - start);
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("malformed parameter '" + item + "' in " + text);
    std::string value = item.substr(eq + 1);
    if (value.size() >= 2 && value.front() == '(' && value.back() == ')') value = value.substr(1, value.size() - 2);
    if (value.empty()) throw UsageError("empty value for parameter '" + item.substr(0, eq) + "' in " + text);
    out.params.emplace_back(item.substr(0, eq), value);
  };
  for (std::size_t i = 0; i < rest.size(); ++i) {
    if (rest[i] == '(') ++depth;
    if (rest[i] == ')') {
      if (--depth < 0) throw UsageError("unbalanced ')' in " + text);
    }
    if (rest[i] == '&' && depth == 0) {
      flush(i);
      start = i + 1;
    }
  }
  if (depth != 0) throw UsageError("unbalanced '(' in " + text);
  flush(rest.size());
  return out;
}

inline std::string wrap_param(const std::string& v) {
  return v.find_first_of("?&") == std::string::npos ? v : "(" + v + ")";
}

inline std::string format_id(const std::string& name, const std::vector<std::pair<std::string, std::string>>& params) {
  std::string s = name;
  for (std::size_t i = 0; i < params.size(); ++i) s += (i ? "&" : "?") + params[i].first + "=" + wrap_param(params[i].second);
  return s;
}

namespace detail {

class Params {
 public:
  Params(std::string id, std::vector<std::pair<std::string, std::string>> raw)
      : id_(std::move(id)), raw_(std::move(raw)) {}

  std::string text(const std::string& key) {
    used_.push_back(key);
    for (const auto& [k, v] : raw_) {
      if (k == key) return v;
    }
    throw UsageError(id_ + " requires parameter '" + key + "'");
  }

  int integer(const std::string& key) {
    const std::string v = text(key);
    int out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw UsageError("parameter " + key + " must be an integer, got " + v);
    if (out < -30 || out > 30) throw UsageError("parameter " + key + " is out of range [-30, 30]");
    return out;
  }

  Rational rational(const std::string& key) {
    const std::string v = text(key);
    try {
      const auto slash = v.find('/');
      if (slash == std::string::npos) return Real::parse(v).rational();
      const Rational p = Real::parse(v.substr(0, slash)).rational();
      const Rational q = Real::parse(v.substr(slash + 1)).rational();
      if (q.is_zero()) throw UsageError("zero denominator");
      return Rational(p / q);
    } catch (const Error&) {
      throw UsageError("parameter " + key + " must be a decimal or p/q, got " + v);
    }
  }

  /// Rejects keys that no accessor asked for.
  void finish() const {
    for (const auto& [k, v] : raw_) {
      if (std::find(used_.begin(), used_.end(), k) == used_.end()) {
        throw UsageError("unknown parameter '" + k + "' for " + id_);
      }
    }
    for (std::size_t i = 0; i < raw_.size(); ++i) {
      for (std::size_t j = i + 1; j < raw_.size(); ++j) {
        if (raw_[i].first == raw_[j].first) throw UsageError("duplicate parameter '" + raw_[i].first + "' in " + id_);
      }
    }
  }

 private:
  std::string id_;
  std::vector<std::pair<std::string, std::string>> raw_;
  std::vector<std::string> used_;
};

inline RealTuple tup(std::initializer_list<const char*> xs) {
  std::vector<Real> v;
  for (const char* x : xs) v.push_back(Real::parse(x));
  return RealTuple(std::move(v));
}

inline RealTuple scaled_tup(std::initializer_list<const char*> xs, int m) {
  std::vector<Real> v;
  for (const char* x : xs) v.push_back(Real::parse(x) * Real(pow10_rational(-m)));
  return RealTuple(std::move(v));
}

inline std::string render_param(const Rational& q) { return Real(q).render_rational(); }

}  // namespace detail

CatalogEntry make_entry(const std::string& id);

namespace detail {

using P = Property;

inline CatalogEntry base_entry(const std::string& name, std::vector<std::pair<std::string, std::string>> params,
                               MeanFunction f, DeclaredClass c, std::vector<DeclaredProperty> d) {
  const std::string id = format_id(name, params);
  return CatalogEntry{id, name, std::move(params), f.renamed(id), c, std::move(d), Side::Both, std::nullopt, {}, {},
                      std::nullopt, {}};
}

inline Side class_side(DeclaredClass c) {
  if (c == DeclaredClass::LeftMean) return Side::Left;
  if (c == DeclaredClass::RightMean) return Side::Right;
  return Side::Both;
}

inline CatalogEntry ordinary_mean(const std::string& name, std::vector<std::pair<std::string, std::string>> params,
                                  MeanFunction f) {
  auto e = base_entry(name, std::move(params), std::move(f), DeclaredClass::Mean,
                      {{P::Strict, true}, {P::Monotone, true}, {P::Symmetric, true}, {P::Reflexive, true},
                       {P::Continuous, true}, {P::MeanContinuous, true}, {P::QuasiMonotone, true}});
  e.side = Side::Both;
  return e;
}

inline CatalogEntry build(const ParsedId& pid) {
  Params p(format_id(pid.name, pid.params), pid.params);
  const std::string& n = pid.name;
  CatalogEntry e = [&]() -> CatalogEntry {
    if (n == "arith") return ordinary_mean(n, {}, arith_function());
    if (n == "geo") return ordinary_mean(n, {}, geo_function());
    if (n == "harm") return ordinary_mean(n, {}, harm_function());
    if (n == "power") {
      const Rational x = p.rational("x");
      return ordinary_mean(n, {{"x", render_param(x)}}, power_function(x));
    }
    if (n == "quasi-arith") {
      const auto f = GeneratorFunction::named(p.text("f"));
      const auto box = f.in_bracket(Real(-1)) ? DomainBox::closed(-10, 10) : DomainBox::left_open(0, 10);
      return ordinary_mean(n, {{"f", f.name()}}, quasi_arith_function(f, box));
    }
    if (n == "min" || n == "max") {
      const bool is_min = n == "min";
      auto e = base_entry(n, {}, is_min ? min_function() : max_function(), DeclaredClass::Mean,
                          {{P::Monotone, true}, {P::Symmetric, true}, {P::Reflexive, true}, {P::Continuous, true},
                           {P::Strong, true}, {P::Strict, false}});
      e.side = is_min ? Side::Right : Side::Left;
      return e;
    }
    if (n == "bessel-plus" || n == "bessel-minus") {
      const bool plus = n == "bessel-plus";
      MeanFunction f = plus ? MeanFunction(n, Arity::at_least(2), DomainBox::left_open(0, 10), all_positive, bessel_plus)
                            : MeanFunction(n, Arity::at_least(2), DomainBox::right_open(-10, 0), all_negative, bessel_minus);
      auto e = base_entry(n, {}, f, plus ? DeclaredClass::LeftMean : DeclaredClass::RightMean,
                          {{P::Strict, true}, {P::Monotone, true}, {P::Symmetric, true}, {P::Continuous, true},
                           {P::Reflexive, false}, {plus ? P::RightMean : P::LeftMean, false}});
      e.probes = plus ? std::vector<RealTuple>{tup({"1", "2"})} : std::vector<RealTuple>{tup({"-1", "-2"})};
      return e;
    }
    if (n == "unbiased-deviation") {
      return base_entry(n, {}, MeanFunction(n, Arity::at_least(2), DomainBox::left_open(0, 10), all_positive, unbiased_deviation),
                        DeclaredClass::LeftMean,
                        {{P::Strict, true}, {P::Monotone, true}, {P::Symmetric, true}, {P::Continuous, true},
                         {P::Reflexive, false}, {P::RightMean, false}});
    }
    if (n == "trimmed-k1" || n == "trimmed-k2" || n == "trimmed-k3") {
      const Trim which = n == "trimmed-k1" ? Trim::Smallest : n == "trimmed-k2" ? Trim::Largest : Trim::Both;
      auto f = MeanFunction(n, Arity::at_least(3), DomainBox::left_open(0, 10, Arity::at_least(3)), all_positive,
                            [which](const RealTuple& t) { return trimmed(t, which); });
      auto e = base_entry(n, {}, f, DeclaredClass::RightMean, {{P::Symmetric, true}, {P::LeftMean, false}});
      e.probes = {tup({"10", "11", "12"}) };
      return e;
    }
    if (n == "floor-arith" || n == "ceil-arith" || n == "shifted-floor" || n == "shifted-ceil") {
      const int m = p.integer("m");
      const bool floor_based = n == "floor-arith" || n == "shifted-floor";
      std::function<Real(const RealTuple&, int)> g = n == "floor-arith"     ? floor_arith
                                                     : n == "ceil-arith"    ? ceil_arith
                                                     : n == "shifted-floor" ? shifted_floor
                                                                            : shifted_ceil;
      auto dom = floor_based ? floor_arith_domain : ceil_arith_domain;
      MeanFunction f(n, Arity::at_least(1), scaled_box(m), [m, dom](const RealTuple& t) { return dom(t, m); },
                     [m, g](const RealTuple& t) { return g(t, m); });
      // A-_m and A+-_m are right-means; A+_m and A-+_m left-means. Floors are
      // right-continuous, ceilings left-continuous.
      const bool right = n == "floor-arith" || n == "shifted-ceil";
      const bool semi = n == "floor-arith" || n == "ceil-arith";
      auto e = base_entry(n, {{"m", std::to_string(m)}}, f, right ? DeclaredClass::RightMean : DeclaredClass::LeftMean,
                          {{P::Strict, true},
                           {P::Monotone, true},
                           {P::Symmetric, true},
                           {floor_based ? P::RightContinuous : P::LeftContinuous, true},
                           {floor_based ? P::LeftContinuous : P::RightContinuous, false},
                           {P::Continuous, false},
                           {P::Reflexive, false},
                           {P::MeanContinuous, false},
                           {P::SemiReflexive, semi},
                           {right ? P::LeftMean : P::RightMean, false}});
      if (n == "floor-arith") e.declared.push_back({P::Strong, false});
      e.side = right ? Side::Right : Side::Left;
      e.probes = {scaled_tup({"2.1", "2.1"}, m), scaled_tup({"2", "2"}, m), scaled_tup({"1.9", "2.1"}, m),
                  scaled_tup({"2.1", "3"}, m)};
      return e;
    }
    if (n == "star-arith") {
      const int m = p.integer("m");
      MeanFunction f(n, Arity::at_least(1), scaled_box(m),
                     [m](const RealTuple& t) { return floor_arith_domain(t, m) && ceil_arith_domain(t, m); },
                     [m](const RealTuple& t) { return star_arith(t, m); });
      auto e = base_entry(n, {{"m", std::to_string(m)}}, f, DeclaredClass::AQuasi,
                          {{P::LeftMean, false}, {P::RightMean, false}});
      e.quasi_constant = Rational(1) / (2 * pow10_rational(m));
      e.probes = {scaled_tup({"2", "2.1"}, m), scaled_tup({"1.9", "2"}, m)};
      return e;
    }
    if (n == "floor-geometric") {
      const int m = p.integer("m");
      MeanFunction f(n, Arity::at_least(1), scaled_box(m), [m](const RealTuple& t) { return floor_geometric_domain(t, m); },
                     [m](const RealTuple& t) { return floor_geometric(t, m); });
      auto e = base_entry(n, {{"m", std::to_string(m)}}, f, DeclaredClass::RightMean, {{P::LeftMean, false}});
      e.probes = {scaled_tup({"1.5", "2.5"}, m), scaled_tup({"1.5", "1.9"}, m)};
      return e;
    }
    if (n == "parallel-resistance") {
      auto e = base_entry(n, {}, MeanFunction(n, Arity::at_least(1), DomainBox::left_open(0, 10), all_positive, parallel_resistance),
                          DeclaredClass::RightMean,
                          {{P::Strong, true}, {P::Symmetric, true}, {P::Continuous, true}, {P::Monotone, true},
                           {P::Reflexive, false}, {P::LeftMean, false}});
      e.side = Side::Right;
      return e;
    }
    if (n == "conjugate") {
      const auto f = GeneratorFunction::named(p.text("f"));
      const CatalogEntry l = make_entry(p.text("L"));
      const auto box = f.in_bracket(Real(-1)) ? l.function.box() : DomainBox::left_open(0, 10, l.function.arity());
      const std::string id = format_id(n, {{"f", f.name()}, {"L", l.id}});
      auto e = base_entry(n, {{"f", f.name()}, {"L", l.id}}, conjugate(f, l.function, id, box), l.declared_class, {});
      for (const auto& d : l.declared) {
        if (d.property == P::Strict || d.property == P::Monotone || d.property == P::Symmetric ||
            d.property == P::Continuous || d.property == P::Reflexive || d.property == P::LeftMean ||
            d.property == P::RightMean) {
          e.declared.push_back(d);
        }
      }
      e.side = l.side;
      return e;
    }
    if (n == "power-quasi") {
      const Rational x = p.rational("x");
      MeanFunction f(n, Arity::at_least(2), DomainBox::left_open(0, 10), all_positive,
                     [x](const RealTuple& t) { return power_quasi(t, x); });
      const std::vector<std::pair<std::string, std::string>> ps{{"x", render_param(x)}};
      if (x.is_zero()) {
        auto e = base_entry(n, ps, f, DeclaredClass::None,
                            {{P::Symmetric, true}, {P::Continuous, true}, {P::Monotone, true}, {P::LeftMean, false},
                             {P::RightMean, false}});
        e.probes = {tup({"0.5", "0.5"}), tup({"2", "2"})};
        return e;
      }
      const bool left = x.sign() > 0;
      auto e = base_entry(n, ps, f, left ? DeclaredClass::LeftMean : DeclaredClass::RightMean,
                          {{P::Strict, true}, {P::Monotone, true}, {P::Symmetric, true}, {P::Continuous, true},
                           {P::Reflexive, false}, {left ? P::RightMean : P::LeftMean, false}});
      e.side = left ? Side::Left : Side::Right;
      return e;
    }
    if (n == "conjugate-floor") {
      const auto f = GeneratorFunction::named(p.text("f"));
      const int m = p.integer("m");
      const int shift = std::max(0, -m);
      DomainBox box;
      box.lower = Real(pow10_rational(shift));
      box.upper = Real(Rational(3 * pow10_rational(shift)));
      MeanFunction fn(n, Arity::at_least(1), box, [f, m](const RealTuple& t) { return conjugate_floor_domain(t, f, m); },
                      [f, m](const RealTuple& t) { return conjugate_floor(t, f, m); });
      auto e = base_entry(n, {{"f", f.name()}, {"m", std::to_string(m)}}, fn, DeclaredClass::RightMean,
                          {{P::Strict, true},
                           {P::Monotone, true},
                           {P::Symmetric, true},
                           {P::RightContinuous, true},
                           {P::Reflexive, false},
                           {P::LeftContinuous, false},
                           {P::Continuous, false},
                           {P::LeftMean, false}});
      e.side = Side::Right;
      e.probes = {tup({"1.5", "1.5"}), tup({"2", "2"}), tup({"1.5", "2.5"})};
      return e;
    }
    if (n == "positive-filter") {
      const CatalogEntry inner = make_entry(p.text("M"));
      const MeanFunction mf = inner.function;
      MeanFunction f(n, Arity::at_least(1), DomainBox::closed(-3, 3),
                     [](const RealTuple&) { return true; },
                     [mf](const RealTuple& t) { return positive_filter(t, mf); });
      auto e = base_entry(n, {{"M", inner.id}}, f, DeclaredClass::LeftMean,
                          {{P::LeftContinuous, true}, {P::RightContinuous, false}, {P::Monotone, false},
                           {P::RightMean, false}});
      e.probes = {tup({"-1", "-2"}), tup({"0", "1"})};
      e.probe_pairs = {{tup({"-1", "2", "3"}), tup({"1", "2", "3"})}};
      return e;
    }
    if (n == "half-quadratic") {
      auto e = base_entry(n, {}, MeanFunction(n, Arity::fixed(2), DomainBox::left_open(0, 10), all_positive, half_quadratic),
                          DeclaredClass::RightMean,
                          {{P::Strict, true}, {P::Monotone, true}, {P::Symmetric, true}, {P::Continuous, true},
                           {P::Reflexive, false}, {P::LeftMean, false}});
      e.side = Side::Right;
      e.probes = {tup({"1", "1"})};
      return e;
    }
    if (n == "half-quadratic-restricted") {
      MeanFunction f(n, Arity::fixed(2), DomainBox::left_open(0, 10),
                     [](const RealTuple& t) { return all_positive(t) && half_quadratic_mean_region(t); }, half_quadratic);
      auto e = base_entry(n, {}, f, DeclaredClass::Mean, {{P::Symmetric, true}});
      e.probes = {tup({"1", "2"})};
      return e;
    }
    if (n == "product-chain" || n == "product-chain-root") {
      const std::string r = p.text("restrict");
      const bool root = n == "product-chain-root";
      DomainBox box;
      std::function<bool(const Real&)> ok;
      if (r == "upper") {
        box = DomainBox::closed(1, 3);
        ok = [](const Real& v) { return compare(v, Real(1)) >= 0; };
      } else if (r == "lower") {
        box = DomainBox::closed(0, 1);
        ok = [](const Real& v) { return v.sign() >= 0 && compare(v, Real(1)) <= 0; };
      } else if (r == "none") {
        box = DomainBox::closed(0, 3);
        ok = [](const Real& v) { return v.sign() >= 0; };
      } else {
        throw UsageError("parameter restrict must be upper, lower or none, got " + r);
      }
      MeanFunction f(n, Arity::at_least(2), box,
                     [ok](const RealTuple& t) { return std::all_of(t.begin(), t.end(), ok); },
                     root ? MeanFunction::Eval(product_chain_root) : MeanFunction::Eval(product_chain));
      // On [1, inf) every chain term is at least the first entry; on [0, 1] at
      // most the largest. The n-th root reverses both sides.
      DeclaredClass c = DeclaredClass::None;
      std::optional<DeclaredClass> alt;
      if (r == "upper") {
        c = root ? DeclaredClass::RightMean : DeclaredClass::LeftMean;
        alt = root ? DeclaredClass::LeftMean : DeclaredClass::RightMean;
      } else if (r == "lower") {
        c = root ? DeclaredClass::LeftMean : DeclaredClass::RightMean;
        alt = root ? DeclaredClass::RightMean : DeclaredClass::LeftMean;
      }
      std::vector<DeclaredProperty> d;
      if (c == DeclaredClass::LeftMean) d.push_back({P::RightMean, false});
      if (c == DeclaredClass::RightMean) d.push_back({P::LeftMean, false});
      if (c == DeclaredClass::None) {
        d = {{P::LeftMean, false}, {P::RightMean, false}};
      }
      d.push_back({P::Reflexive, false});
      auto e = base_entry(n, {{"restrict", r}}, f, c, d);
      e.alternate_class = alt;
      if (alt) e.note = "an alternative reading classifies this restriction as " + class_name(*alt) + "; not gating";
      e.probes = {tup({"2", "2"}), tup({"0.5", "0.5"})};
      return e;
    }
    if (n == "range-penalized-a") {
      auto e = base_entry(n, {}, MeanFunction(n, Arity::fixed(2), DomainBox::left_open(0, 10), all_positive, range_penalized_a),
                          DeclaredClass::RightMean,
                          {{P::Strict, true}, {P::Symmetric, true}, {P::Continuous, true}, {P::Reflexive, true},
                           {P::MeanContinuous, true}, {P::Monotone, false}, {P::LeftMean, false}});
      e.side = Side::Right;
      e.probes = {tup({"2", "4"})};
      e.probe_pairs = {{tup({"2", "3"}), tup({"2", "4"})}};
      return e;
    }
    if (n == "range-penalized-b") {
      auto e = base_entry(n, {}, MeanFunction(n, Arity::fixed(2), DomainBox::left_open(0, 10), all_positive, range_penalized_b),
                          DeclaredClass::RightMean,
                          {{P::Strict, true}, {P::Symmetric, true}, {P::Reflexive, true}, {P::Continuous, false},
                           {P::MeanContinuous, false}, {P::LeftMean, false}});
      e.side = Side::Right;
      e.probes = {tup({"10", "10"}), tup({"10", "11"})};
      return e;
    }
    if (n == "bessel-unrestricted") {
      auto e = base_entry(n, {}, MeanFunction(n, Arity::at_least(2), DomainBox::closed(-10, 10), bessel_value),
                          DeclaredClass::MQuasi, {{P::LeftMean, false}, {P::RightMean, false}});
      e.quasi_constant = Rational(1);
      e.probes = {tup({"1", "2"}), tup({"-1", "-2"})};
      return e;
    }
    if (n == "approx-mean") {
      const CatalogEntry k = make_entry(p.text("K"));
      const std::string rule = p.text("rule");
      const int m = p.integer("m");
      ApproxRule ar;
      if (rule == "floor") {
        ar = ApproxRule::Floor;
      } else if (rule == "identity") {
        ar = ApproxRule::Identity;
      } else {
        throw UsageError("parameter rule must be floor or identity, got " + rule);
      }
      const std::vector<std::pair<std::string, std::string>> ps{{"K", k.id}, {"rule", rule}, {"m", std::to_string(m)}};
      auto e = base_entry(n, ps, approx_mean(k.function, ar, m, format_id(n, ps)), DeclaredClass::RightMean, {});
      if (ar == ApproxRule::Floor) e.declared.push_back({P::LeftMean, false});
      e.side = Side::Right;
      e.probes = {tup({"1.5", "1.5"})};
      return e;
    }
    if (n == "quasi-monotone-example") {
      auto e = base_entry(n, {}, MeanFunction(n, Arity::fixed(2), DomainBox::closed(0, 1), quasi_monotone_example),
                          DeclaredClass::RightMean,
                          {{P::Continuous, true}, {P::QuasiMonotone, true}, {P::Symmetric, true},
                           {P::RightInjective, true}, {P::Monotone, false}, {P::LeftInjective, false},
                           {P::LeftMean, false}});
      e.side = Side::Right;
      e.probes = {tup({"0.2", "1"}), tup({"0", "0.4"})};
      e.probe_pairs = {{tup({"0.2", "0.4"}), tup({"0.2", "1"})}};
      return e;
    }
    if (n == "fixed-point-example") {
      return base_entry(n, {}, MeanFunction(n, Arity::fixed(2), DomainBox::closed(0, 1), fixed_point_example),
                        DeclaredClass::RightMean, {{P::Continuous, true}});
    }
    if (n == "min-square") {
      return base_entry(n, {}, MeanFunction(n, Arity::fixed(2), DomainBox::closed(0, 2), min_square),
                        DeclaredClass::RightMean, {{P::Continuous, true}});
    }
    if (n == "max-plus-one") {
      auto e = base_entry(n, {}, MeanFunction(n, Arity::fixed(2), DomainBox::closed(-1, 1), max_plus_one),
                          DeclaredClass::AQuasi, {{P::MQuasi, false}});
      e.quasi_constant = Rational(1);
      e.probes = {tup({"0", "0.000001"})};
      return e;
    }
    if (n == "twice-max") {
      DomainBox box;
      box.lower = Real(1);
      auto e = base_entry(n, {}, MeanFunction(n, Arity::fixed(2), box, twice_max), DeclaredClass::MQuasi,
                          {{P::AQuasi, false}});
      e.quasi_constant = Rational(1);
      return e;
    }
    if (n == "truncate") {
      const CatalogEntry k = make_entry(p.text("K"));
      return base_entry(n, {{"K", k.id}}, truncate_to_mean(k.function), DeclaredClass::Mean, {});
    }
    throw UsageError("unknown mean id '" + n + "'");
  }();
  p.finish();
  if (e.side == Side::Both) e.side = class_side(e.declared_class);
  return e;
}

}  // namespace detail

/// Builds the catalog entry for an id such as "floor-arith?m=1". Unknown names
/// and unknown or missing parameters are usage errors.
inline CatalogEntry make_entry(const std::string& id) { return detail::build(parse_id(id)); }

inline MeanFunction make_mean(const std::string& id) { return make_entry(id).function; }

/// Catalog names with their parameter keys.
inline std::vector<std::pair<std::string, std::vector<std::string>>> catalog_names() {
  return {{"arith", {}},
          {"geo", {}},
          {"harm", {}},
          {"power", {"x"}},
          {"quasi-arith", {"f"}},
          {"min", {}},
          {"max", {}},
          {"bessel-plus", {}},
          {"bessel-minus", {}},
          {"unbiased-deviation", {}},
          {"trimmed-k1", {}},
          {"trimmed-k2", {}},
          {"trimmed-k3", {}},
          {"floor-arith", {"m"}},
          {"ceil-arith", {"m"}},
          {"shifted-floor", {"m"}},
          {"shifted-ceil", {"m"}},
          {"star-arith", {"m"}},
          {"floor-geometric", {"m"}},
          {"parallel-resistance", {}},
          {"conjugate", {"f", "L"}},
          {"power-quasi", {"x"}},
          {"conjugate-floor", {"f", "m"}},
          {"positive-filter", {"M"}},
          {"half-quadratic", {}},
          {"half-quadratic-restricted", {}},
          {"product-chain", {"restrict"}},
          {"product-chain-root", {"restrict"}},
          {"range-penalized-a", {}},
          {"range-penalized-b", {}},
          {"bessel-unrestricted", {}},
          {"approx-mean", {"K", "rule", "m"}},
          {"quasi-monotone-example", {}},
          {"fixed-point-example", {}},
          {"min-square", {}},
          {"max-plus-one", {}},
          {"twice-max", {}},
          {"truncate", {"K"}}};
}

/// One concrete instance per catalog entry (several for parameter families).
inline std::vector<std::string> standard_instances() {
  return {"arith",
          "geo",
          "harm",
          "power?x=2",
          "power?x=-1",
          "quasi-arith?f=ln",
          "min",
          "max",
          "bessel-plus",
          "bessel-minus",
          "unbiased-deviation",
          "trimmed-k1",
          "trimmed-k2",
          "trimmed-k3",
          "floor-arith?m=0",
          "floor-arith?m=1",
          "ceil-arith?m=0",
          "ceil-arith?m=1",
          "shifted-floor?m=0",
          "shifted-floor?m=1",
          "shifted-ceil?m=0",
          "shifted-ceil?m=1",
          "star-arith?m=0",
          "floor-geometric?m=0",
          "parallel-resistance",
          "conjugate?f=square&L=bessel-plus",
          "power-quasi?x=1",
          "power-quasi?x=-1",
          "power-quasi?x=0",
          "conjugate-floor?f=square&m=0",
          "positive-filter?M=arith",
          "half-quadratic",
          "half-quadratic-restricted",
          "product-chain?restrict=upper",
          "product-chain?restrict=lower",
          "product-chain-root?restrict=upper",
          "product-chain-root?restrict=lower",
          "range-penalized-a",
          "range-penalized-b",
          "bessel-unrestricted",
          "approx-mean?K=arith&rule=floor&m=0",
          "quasi-monotone-example",
          "fixed-point-example",
          "min-square",
          "max-plus-one",
          "twice-max",
          "truncate?K=bessel-plus"};
}

}  // namespace quasimean
