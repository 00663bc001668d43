#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "quasimean/error.hpp"
#include "quasimean/expr.hpp"
#include "quasimean/real.hpp"

namespace quasimean {

/// A strictly increasing one-variable function f with a numeric inverse.
///
/// Named generators carry closed-form inverses (exact when the result is
/// rational); expression generators are inverted by bisection. `lower`/`upper`
/// delimit where f is defined and increasing; inversion searches inside it.
class GeneratorFunction {
 public:
  using Fn = std::function<Real(const Real&)>;

  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr int kBisectionSteps = 200;
  static constexpr double kBisectionTol = 1e-12;

  GeneratorFunction(std::string name, Fn f, std::optional<Fn> inverse, double lower, double upper, bool lower_open,
                    std::optional<Expr> expr = std::nullopt)
      : name_(std::move(name)), f_(std::move(f)), inverse_(std::move(inverse)), lower_(lower), upper_(upper),
        lower_open_(lower_open), expr_(std::move(expr)) {
    validate();
  }

  static GeneratorFunction identity() {
    return {"identity", [](const Real& x) { return x; }, [](const Real& y) { return y; }, -kInf, kInf, false,
            expr::var(1)};
  }
  static GeneratorFunction square() {
    return {"square", [](const Real& x) { return x * x; }, [](const Real& y) { return nth_root(y, 2); }, 0, kInf, false,
            parse_expr("pow(2, a1)")};
  }
  static GeneratorFunction cube() {
    return {"cube", [](const Real& x) { return x * x * x; }, [](const Real& y) { return nth_root(y, 3); }, -kInf, kInf,
            false, parse_expr("pow(3, a1)")};
  }
  static GeneratorFunction sqrt() {
    return {"sqrt", [](const Real& x) { return nth_root(x, 2); }, [](const Real& y) { return y * y; }, 0, kInf, false,
            parse_expr("root(2, a1)")};
  }
  static GeneratorFunction ln() {
    return {"ln", [](const Real& x) { return log(x); }, [](const Real& y) { return exp(y); }, 0, kInf, true};
  }
  static GeneratorFunction exp_gen() {
    return {"exp", [](const Real& x) { return exp(x); }, [](const Real& y) { return log(y); }, -kInf, kInf, false};
  }
  /// t^x for rational x > 0 on [0, inf).
  static GeneratorFunction power(const Rational& x) {
    if (x.sign() <= 0) throw GeneratorError("power generator t^x needs x > 0 to be increasing");
    const Rational inv = 1 / x;
    return {"power(" + render_rational(x) + ")", [x](const Real& t) { return pow(t, x); },
            [inv](const Real& y) { return pow(y, inv); }, 0, kInf, false, expr::pow_x(expr::var(1), x)};
  }

  /// A one-variable expression in a1, inverted numerically on [lower, upper].
  static GeneratorFunction from_expr(const Expr& e, double lower, double upper, bool lower_open = false) {
    if (expr_arity(e) != 1) throw GeneratorError("a generator expression must use exactly the variable a1");
    auto f = [e](const Real& x) { return evaluate(e, RealTuple{x}); };
    return {render(e), f, std::nullopt, lower, upper, lower_open, e};
  }

  /// Named generator ("identity", "square", "cube", "sqrt", "ln", "exp",
  /// "reciprocal") or an expression in a1.
  static GeneratorFunction named(const std::string& name) {
    if (name == "identity") return identity();
    if (name == "square") return square();
    if (name == "cube") return cube();
    if (name == "sqrt") return sqrt();
    if (name == "ln" || name == "log") return ln();
    if (name == "exp") return exp_gen();
    if (name == "reciprocal") {
      return {"reciprocal", [](const Real& x) { return Real(1) / x; }, std::nullopt, 0, kInf, true,
              parse_expr("pow(-1, a1)")};
    }
    return from_expr(parse_expr(name), 0, kInf, false);
  }

  const std::string& name() const noexcept { return name_; }
  bool is_identity() const noexcept { return name_ == "identity"; }
  const std::optional<Expr>& expression() const noexcept { return expr_; }

  bool in_bracket(const Real& x) const {
    const double d = x.to_double();
    if (lower_open_ ? d <= lower_ : d < lower_) return false;
    return d <= upper_;
  }

  Real operator()(const Real& x) const {
    if (!in_bracket(x)) throw DomainError(x.render() + " is outside the bracket of generator " + name_);
    return f_(x);
  }

  /// f^{-1}(y). `lo_hint`/`hi_hint` seed the bisection bracket, which is widened
  /// inside [lower, upper] until it encloses y.
  Real inverse(const Real& y, std::optional<double> lo_hint = std::nullopt,
               std::optional<double> hi_hint = std::nullopt) const {
    if (inverse_) {
      Real x = [&] {
        try {
          return (*inverse_)(y);
        } catch (const DomainError&) {
          throw BracketError(y.render() + " is outside the range of generator " + name_);
        }
      }();
      if (!in_bracket(x)) throw BracketError(y.render() + " is outside the range of generator " + name_);
      return x;
    }
    return bisect(y, lo_hint, hi_hint);
  }

 private:
  double eval_d(double x) const { return f_(Real::approx(x)).to_double(); }

  Real bisect(const Real& y, std::optional<double> lo_hint, std::optional<double> hi_hint) const {
    const double target = y.to_double();
    const double floor_lo = lower_open_ ? std::nextafter(lower_, kInf) : lower_;
    double lo = std::max(lo_hint.value_or(std::isfinite(lower_) ? floor_lo : -1.0), floor_lo);
    double hi = std::min(hi_hint.value_or(std::isfinite(upper_) ? upper_ : 1.0), upper_);
    if (hi < lo) std::swap(lo, hi);
    // Widen geometrically toward the bracket ends.
    for (int i = 0; i < 2100 && eval_d(lo) > target; ++i) {
      if (lo <= floor_lo) throw BracketError(y.render() + " is below the range of generator " + name_);
      const double step = std::max(1.0, std::abs(lo));
      lo = std::isfinite(lower_) ? std::max(floor_lo, lower_ + (lo - lower_) / 2) : lo - step;
      if (std::isfinite(lower_) && lo - lower_ < 1e-300) lo = floor_lo;
    }
    for (int i = 0; i < 2100 && eval_d(hi) < target; ++i) {
      if (hi >= upper_ || !std::isfinite(hi)) throw BracketError(y.render() + " is above the range of generator " + name_);
      hi = std::min(upper_, hi + std::max(1.0, std::abs(hi)));
    }
    if (eval_d(lo) > target || eval_d(hi) < target) {
      throw BracketError(y.render() + " is outside the range of generator " + name_);
    }
    for (int i = 0; i < kBisectionSteps; ++i) {
      const double mid = lo + (hi - lo) / 2;
      if (mid <= lo || mid >= hi) break;
      if (eval_d(mid) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
      if (hi - lo <= kBisectionTol * std::max(1.0, std::abs(hi)) * 1e-3) break;
    }
    const double flo = eval_d(lo), fhi = eval_d(hi);
    return Real::approx(std::abs(fhi - target) < std::abs(flo - target) ? hi : lo);
  }

  /// Strict increase on a finite probe grid, by finite differences.
  void validate() const {
    const double a = std::isfinite(lower_) ? lower_ : -50.0;
    const double b = std::isfinite(upper_) ? std::min(upper_, std::max(a, 0.0) + 50.0) : std::max(a, 0.0) + 50.0;
    constexpr int kProbes = 257;
    double prev_x = 0, prev_y = 0;
    bool have_prev = false;
    for (int i = 0; i <= kProbes; ++i) {
      double x = a + (b - a) * static_cast<double>(i) / kProbes;
      if (i == 0 && lower_open_) x = a + (b - a) * 1e-6;
      double y;
      try {
        y = eval_d(x);
      } catch (const DomainError&) {
        throw GeneratorError("generator " + name_ + " is undefined at " + std::to_string(x) + " inside its bracket");
      }
      if (have_prev && !(y > prev_y)) {
        throw GeneratorError("generator " + name_ + " is not strictly increasing (f(" + std::to_string(prev_x) +
                             ") >= f(" + std::to_string(x) + "))");
      }
      prev_x = x;
      prev_y = y;
      have_prev = true;
    }
  }

  std::string name_;
  Fn f_;
  std::optional<Fn> inverse_;
  double lower_, upper_;
  bool lower_open_;
  std::optional<Expr> expr_;
};

}  // namespace quasimean
