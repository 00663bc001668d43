#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quasimean/error.hpp"
#include "quasimean/mean_function.hpp"
#include "quasimean/means.hpp"
#include "quasimean/quasi.hpp"
#include "quasimean/real.hpp"
#include "quasimean/tuple.hpp"

namespace quasimean {

enum class TraceVerdict { Converged, ConstantAfter, Diverged, BudgetExhausted, DomainExit };

inline std::string trace_verdict_name(TraceVerdict v) {
  switch (v) {
    case TraceVerdict::Converged: return "converged";
    case TraceVerdict::ConstantAfter: return "constant-after";
    case TraceVerdict::Diverged: return "diverged";
    case TraceVerdict::BudgetExhausted: return "budget-exhausted";
    case TraceVerdict::DomainExit: return "domain-exit";
  }
  return "budget-exhausted";
}

struct IterationTrace {
  std::vector<RealTuple> rows;
  TraceVerdict verdict = TraceVerdict::BudgetExhausted;
  std::optional<Real> limit;
  /// Row index N with rows N and N+1 identical, for constant-after.
  std::size_t constant_after = 0;
  /// Bound on the limit when the iteration left the domain.
  std::optional<Real> upper_bound;
  double tol = 1e-12;
  std::size_t max_steps = 10000;
  std::string detail;
};

inline constexpr double kDefaultTol = 1e-12;
inline constexpr std::size_t kDefaultMaxSteps = 10000;
inline constexpr double kDivergenceFloor = -1e9;

namespace detail {

inline bool rows_identical(const RealTuple& a, const RealTuple& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!identical(a[i], b[i])) return false;
  }
  return true;
}

inline bool rows_close(const RealTuple& a, const RealTuple& b, double tol) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].to_double() - b[i].to_double()) > tol) return false;
  }
  return true;
}

inline std::optional<Real> eval2(const MeanFunction& k, const Real& x, const Real& y) {
  try {
    return k(RealTuple{x, y});
  } catch (const DomainError&) {
    return std::nullopt;
  } catch (const BracketError&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// t -> K0(K1(t), ..., Kn(t)).
inline MeanFunction compose(const MeanFunction& k0, const std::vector<MeanFunction>& ks) {
  if (ks.empty()) throw ArityError("compose needs at least one inner function");
  if (!k0.arity().accepts(ks.size())) {
    throw ArityError(k0.id() + " does not take " + std::to_string(ks.size()) + " arguments");
  }
  const Arity arity = ks[0].arity();
  std::string id = "compose(" + k0.id() + ";";
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(ks[i].arity() == arity)) throw ArityError("inner functions of compose must share one arity");
    id += (i ? "," : "") + ks[i].id();
  }
  id += ")";
  auto inner = [ks](const RealTuple& t) {
    std::vector<Real> v;
    v.reserve(ks.size());
    for (const auto& k : ks) v.push_back(k(t));
    return RealTuple(std::move(v));
  };
  return MeanFunction(
      id, arity, ks[0].box(),
      [ks, k0, inner](const RealTuple& t) {
        for (const auto& k : ks) {
          if (!k.in_domain(t)) return false;
        }
        try {
          return k0.in_domain(inner(t));
        } catch (const DomainError&) {
          return false;
        }
      },
      [k0, inner](const RealTuple& t) { return k0(inner(t)); });
}

/// a_{n+1} = K(a_n, b_n), b_{n+1} = M(a_n, b_n) from a <= b.
///
/// Exact rows stop when two consecutive rows coincide; otherwise the trace
/// converges once |b_n - a_n| < tol with a_n != b_n. If K leaves its domain
/// the trace ends with domain-exit and `upper_bound` = M(a_n, b_n) (or b_n).
inline IterationTrace compound(const MeanFunction& k, const MeanFunction& m, Real a, Real b, double tol = kDefaultTol,
                               std::size_t max_steps = kDefaultMaxSteps) {
  if (compare(a, b) > 0) std::swap(a, b);
  IterationTrace tr;
  tr.tol = tol;
  tr.max_steps = max_steps;
  tr.rows.push_back(RealTuple{a, b});
  for (std::size_t step = 0; step < max_steps; ++step) {
    const Real& x = tr.rows.back()[0];
    const Real& y = tr.rows.back()[1];
    const auto kx = detail::eval2(k, x, y);
    const auto mx = detail::eval2(m, x, y);
    if (!kx || !mx) {
      tr.verdict = TraceVerdict::DomainExit;
      tr.upper_bound = mx ? *mx : y;
      tr.detail = "(" + x.render() + ", " + y.render() + ") left Dom " + (kx ? m.id() : k.id());
      return tr;
    }
    if (!leq_tol(*kx, *mx, kMeanLikeTol)) {
      throw ContractViolation(k.id() + "(" + x.render() + ", " + y.render() + ") = " + kx->render() + " exceeds " +
                              m.id() + " = " + mx->render());
    }
    RealTuple next{*kx, *mx};
    if (!leq_tol(*mx, y, kMeanLikeTol)) {
      tr.rows.push_back(next);
      tr.verdict = TraceVerdict::Diverged;
      tr.detail = "b_n increased";
      return tr;
    }
    const bool same = detail::rows_identical(next, tr.rows.back());
    tr.rows.push_back(next);
    if (same) {
      tr.verdict = TraceVerdict::ConstantAfter;
      tr.constant_after = tr.rows.size() - 2;
      tr.limit = *mx;
      return tr;
    }
    const double width = std::abs(mx->to_double() - kx->to_double());
    if (!(kx->exact() && mx->exact() && *kx == *mx) && width < tol) {
      tr.verdict = TraceVerdict::Converged;
      tr.limit = *mx;
      return tr;
    }
  }
  tr.verdict = TraceVerdict::BudgetExhausted;
  return tr;
}

/// K^(n)(a, b): K^(0) = K, K^(n+1)(a, b) = K(K^(n)(a, b), b).
inline Real iterated(const MeanFunction& k, std::size_t n, const Real& a, const Real& b) {
  Real x = k(RealTuple{a, b});
  for (std::size_t i = 0; i < n; ++i) x = k(RealTuple{x, b});
  return x;
}

/// lim K^(n)(a, b). Rows are (K^(n)(a, b), b).
inline IterationTrace idempotent_closure(const MeanFunction& k, const Real& a, const Real& b, double tol = kDefaultTol,
                                         std::size_t max_steps = kDefaultMaxSteps) {
  IterationTrace tr;
  tr.tol = tol;
  tr.max_steps = max_steps;
  Real x = k(RealTuple{a, b});
  tr.rows.push_back(RealTuple{x, b});
  for (std::size_t step = 0; step < max_steps; ++step) {
    const auto y = detail::eval2(k, x, b);
    if (!y) {
      tr.verdict = TraceVerdict::DomainExit;
      tr.detail = "(" + x.render() + ", " + b.render() + ") left Dom " + k.id();
      return tr;
    }
    tr.rows.push_back(RealTuple{*y, b});
    if (identical(*y, x)) {
      tr.verdict = TraceVerdict::ConstantAfter;
      tr.constant_after = tr.rows.size() - 2;
      tr.limit = *y;
      return tr;
    }
    if (std::abs(y->to_double() - x.to_double()) < tol) {
      tr.verdict = TraceVerdict::Converged;
      tr.limit = *y;
      const auto check = detail::eval2(k, *y, b);
      if (!check || std::abs(check->to_double() - y->to_double()) > tol) {
        tr.detail = "K(limit, b) differs from the limit by more than tol";
      }
      return tr;
    }
    x = *y;
  }
  tr.verdict = TraceVerdict::BudgetExhausted;
  return tr;
}

namespace detail {

/// True when c_n keeps falling by a non-shrinking amount per quarter of the
/// trace while the spread c_n - a_n stays open: a drift to minus infinity
/// rather than a slow approach to a limit.
inline bool steady_descent(const std::vector<RealTuple>& rows) {
  const std::size_t n = rows.size() - 1;
  const double c0 = rows[n / 2][2].to_double(), c1 = rows[3 * n / 4][2].to_double(), c2 = rows[n][2].to_double();
  const double early = c0 - c1, late = c1 - c2;
  const double spread0 = (rows[n / 2][2] - rows[n / 2][0]).to_double(), spread2 = (rows[n][2] - rows[n][0]).to_double();
  return late > 0 && late >= 0.9 * early && spread2 >= 0.9 * spread0;
}

}  // namespace detail

/// a' = K(a, b), b' = K(a, c), c' = K(b, c) from sorted (a, b, c).
///
/// c_n increasing aborts with ContractViolation; c_n below `floor`, or
/// falling at a steady rate, is divergence.
inline IterationTrace extend3(const MeanFunction& k, Real a, Real b, Real c, double tol = kDefaultTol,
                              std::size_t max_steps = kDefaultMaxSteps, double floor = kDivergenceFloor) {
  std::vector<Real> s{a, b, c};
  std::sort(s.begin(), s.end(), [](const Real& x, const Real& y) { return compare(x, y) < 0; });
  IterationTrace tr;
  tr.tol = tol;
  tr.max_steps = max_steps;
  tr.rows.push_back(RealTuple(s));
  for (std::size_t step = 0; step < max_steps; ++step) {
    const RealTuple& r = tr.rows.back();
    const auto na = detail::eval2(k, r[0], r[1]);
    const auto nb = detail::eval2(k, r[0], r[2]);
    const auto nc = detail::eval2(k, r[1], r[2]);
    if (!na || !nb || !nc) {
      tr.verdict = TraceVerdict::DomainExit;
      tr.upper_bound = nc ? *nc : r[2];
      tr.detail = "row " + r.render() + " left Dom " + k.id();
      return tr;
    }
    if (!leq_tol(*nc, r[2], kMeanLikeTol)) {
      throw ContractViolation("c_n increased from " + r[2].render() + " to " + nc->render());
    }
    RealTuple next{*na, *nb, *nc};
    const bool same = detail::rows_identical(next, r);
    const bool close = detail::rows_close(next, r, tol);
    tr.rows.push_back(next);
    if (same) {
      tr.verdict = TraceVerdict::ConstantAfter;
      tr.constant_after = tr.rows.size() - 2;
      tr.limit = next[1];
      return tr;
    }
    if (nc->to_double() < floor) {
      tr.verdict = TraceVerdict::Diverged;
      tr.detail = "c_n fell below " + std::to_string(floor);
      return tr;
    }
    const std::size_t len = tr.rows.size() - 1;
    if (len >= 64 && (len & (len - 1)) == 0 && detail::steady_descent(tr.rows)) {
      tr.verdict = TraceVerdict::Diverged;
      tr.detail = "c_n falling at a steady rate after " + std::to_string(len) + " steps";
      return tr;
    }
    if (close) {
      tr.verdict = TraceVerdict::Converged;
      tr.limit = next[1];
      return tr;
    }
  }
  tr.verdict = TraceVerdict::BudgetExhausted;
  return tr;
}

struct OnsetResult {
  /// Smallest N with B+(a_1..a_N) mean-like.
  std::optional<std::size_t> index;
  /// Whether every longer prefix in the data stays mean-like.
  bool persists = false;
};

/// First prefix length N >= 2 at which B+ is mean-like, tested exactly.
/// With `assume_divergent` the scan stops at N and persistence is taken for
/// granted; otherwise the rest of the data is checked too.
inline OnsetResult bessel_onset(std::span<const Real> seq, bool assume_divergent = false) {
  OnsetResult out;
  Real sum = 0, lo = 0, hi = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const Real& x = seq[i];
    if (x.sign() <= 0) throw DomainError("Bessel onset needs positive entries, got " + x.render());
    sum += x;
    lo = i == 0 ? x : min(lo, x);
    hi = i == 0 ? x : max(hi, x);
    if (i == 0) continue;
    const Real b = sum / Real(static_cast<long long>(i));
    const bool like = leq_tol(lo, b, kMeanLikeTol) && leq_tol(b, hi, kMeanLikeTol);
    if (like && !out.index) {
      out.index = i + 1;
      out.persists = true;
      if (assume_divergent) return out;
    } else if (!like && out.index) {
      out.persists = false;
    }
  }
  return out;
}

}  // namespace quasimean
