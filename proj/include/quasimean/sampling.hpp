#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "quasimean/domain.hpp"
#include "quasimean/error.hpp"
#include "quasimean/mean_function.hpp"
#include "quasimean/real.hpp"
#include "quasimean/tuple.hpp"

namespace quasimean {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a; stable across platforms, unlike std::hash.
inline std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of an independent stream derived from a user seed and a label.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  return splitmix64(seed ^ splitmix64(stable_hash(label)));
}

/// Deterministic RNG. The integer and real mappings are written out here so
/// that streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Seeded tuple generator over a DomainBox.
///
/// Coordinates are exact decimals drawn from a mixture: a fine grid of the box
/// (10^6 steps), decimal lattices at the box's own scale (where A_m-style
/// functions jump), integers, and near-zero magnitudes 10^-k. Unbounded sides
/// are sampled log-uniformly in magnitude over 1e-9..1e9.
class TupleSampler {
 public:
  static constexpr std::int64_t kFineSteps = 1000000;

  TupleSampler(DomainBox box, std::uint64_t seed) : box_(std::move(box)), rng_(seed) {
    if (compare(box_.lower, box_.upper) > 0) throw UsageError("empty sampling box");
    if (box_.bounded()) {
      width_ = box_.upper - box_.lower;
      if (!width_.is_zero()) {
        const int e = static_cast<int>(std::floor(std::log10(width_.to_double()))) - 1;
        lattice_exp_ = e;
      }
    }
  }

  Rng& rng() { return rng_; }
  const DomainBox& box() const { return box_; }

  /// Number of coordinates for the next tuple: fixed n, or min..min+3 for
  /// variadic arities (never below `floor_n`).
  std::size_t draw_arity(std::size_t floor_n = 2) {
    const std::size_t lo = std::max(box_.arity.n, floor_n);
    if (!box_.arity.variadic) return box_.arity.n;
    return lo + static_cast<std::size_t>(rng_.below(4));
  }

  Real coordinate() {
    for (int attempt = 0; attempt < 64; ++attempt) {
      Real x = raw_coordinate();
      if (box_.contains(x)) return x;
    }
    // Open bounds with a tiny box: fall back to the midpoint-ish fine grid.
    for (int attempt = 0; attempt < 4096; ++attempt) {
      Real x = fine();
      if (box_.contains(x)) return x;
    }
    throw EmptyDomain("no sample point inside " + box_.describe());
  }

  /// Independent coordinates, with occasional repeated or all-equal entries.
  RealTuple tuple(std::size_t n) {
    std::vector<Real> v;
    v.reserve(n);
    const double u = rng_.unit();
    if (u < 0.08) {
      const Real a = coordinate();
      v.assign(n, a);
    } else if (u < 0.16 && n >= 2) {
      for (std::size_t i = 0; i < n; ++i) {
        if (i > 0 && rng_.chance(0.5)) {
          v.push_back(v[static_cast<std::size_t>(rng_.below(i))]);
        } else {
          v.push_back(coordinate());
        }
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) v.push_back(coordinate());
    }
    return RealTuple(std::move(v));
  }

  RealTuple tuple() { return tuple(draw_arity()); }

  RealTuple diagonal(std::size_t n) { return RealTuple(std::vector<Real>(n, coordinate())); }

  /// A base point plus offsets of magnitude 10^-U(1,9) around it.
  RealTuple near_diagonal(std::size_t n) {
    const Real a = coordinate();
    std::vector<Real> v;
    v.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const int k = static_cast<int>(rng_.between(1, 9));
      const std::int64_t digits = rng_.between(0, 99);
      Real off = Real(Rational(digits, 10)) * Real(pow10_rational(-k));
      if (rng_.chance(0.5)) off = -off;
      Real x = a + off;
      v.push_back(box_.contains(x) ? x : a);
    }
    return RealTuple(std::move(v));
  }

  /// Uniform point of [lower, upper] on a 10^-9-relative dyadic-free grid.
  Real uniform_fine(std::int64_t steps) {
    if (!box_.bounded()) return coordinate();
    return box_.lower + width_ * Real(Rational(rng_.between(0, steps), steps));
  }

  /// Tuple sampled from the conditional on `accept`, by rejection.
  template <class Accept>
  RealTuple tuple_where(Accept&& accept, std::size_t max_attempts, std::size_t n = 0) {
    for (std::size_t i = 0; i < max_attempts; ++i) {
      RealTuple t = n ? tuple(n) : tuple();
      if (accept(t)) return t;
    }
    throw EmptyDomain("rejection sampling found no admissible tuple in " + box_.describe());
  }

 private:
  Real fine() {
    if (!box_.bounded()) return unbounded();
    return box_.lower + width_ * Real(Rational(rng_.between(0, kFineSteps), kFineSteps));
  }

  Real lattice(int exp) {
    // multiples of 10^exp inside [lower, upper]
    const Integer lo = box_.lower.ceil_at_scale(-exp);
    const Integer hi = box_.upper.floor_at_scale(-exp);
    if (hi < lo) return fine();
    const Integer span = hi - lo;
    Integer k;
    if (span > Integer(1) << 62) {
      k = lo + Integer(rng_.next() >> 2);
    } else {
      k = lo + Integer(rng_.below(static_cast<std::uint64_t>(span) + 1));
    }
    return Real(Rational(k) * pow10_rational(exp));
  }

  Real near_zero() {
    const int k = static_cast<int>(rng_.between(1, 9));
    Real x = Real(Rational(rng_.between(1, 9))) * Real(pow10_rational(-k));
    const bool neg_ok = box_.contains(-x), pos_ok = box_.contains(x);
    if (neg_ok && (!pos_ok || rng_.chance(0.5))) return -x;
    return x;
  }

  Real unbounded() {
    // magnitude log-uniform in [1e-9, 1e9], six significant digits
    const double mag_exp = -9.0 + 18.0 * rng_.unit();
    const int e10 = static_cast<int>(std::floor(mag_exp));
    const std::int64_t mant = rng_.between(100000, 999999);
    const Real mag = Real(Rational(mant)) * Real(pow10_rational(e10 - 5));
    const bool lo_inf = !box_.lower.finite(), hi_inf = !box_.upper.finite();
    if (lo_inf && hi_inf) return rng_.chance(0.5) ? mag : -mag;
    if (hi_inf) return box_.lower + mag;
    return box_.upper - mag;
  }

  Real raw_coordinate() {
    const double u = rng_.unit();
    if (!box_.bounded()) {
      if (u < 0.15) return Real(rng_.between(-1000, 1000)) + (box_.lower.finite() ? Real(Integer(box_.lower.floor_at_scale(0))) : Real(0));
      if (u < 0.25 && box_.contains(Real(Rational(1, 1000)))) return near_zero();
      return unbounded();
    }
    if (u < 0.50 || width_.is_zero()) return fine();
    if (u < 0.62) return lattice(lattice_exp_);
    if (u < 0.76) return lattice(lattice_exp_ + 1);
    if (u < 0.84) return lattice(lattice_exp_ + 2);
    if (u < 0.90) return lattice(0);
    if (u < 0.95) return lattice(-1);
    return near_zero();
  }

  DomainBox box_;
  Rng rng_;
  Real width_ = 0;
  int lattice_exp_ = 0;
};

}  // namespace quasimean
