#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "quasimean/catalog.hpp"
#include "quasimean/means.hpp"
#include "quasimean/quasi.hpp"
#include "test_util.hpp"

using namespace quasimean;
using qmtest::Q;

namespace {

// Floor of q * 10^m as an exact rational, computed from numerator and denominator.
Rational floor_at(const Rational& q, int m) {
  const Rational scaled = q * pow10_rational(m);
  const Integer num = boost::multiprecision::numerator(scaled), den = boost::multiprecision::denominator(scaled);
  Integer f = num / den;
  if (num < 0 && f * den != num) f -= 1;
  return Rational(f) * pow10_rational(-m);
}

Rational ceil_at(const Rational& q, int m) { return -floor_at(-q, m); }

Rational mean_of(const std::vector<Rational>& v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s / Rational(static_cast<long long>(v.size()));
}

std::vector<Rational> random_decimals(std::mt19937_64& gen, std::size_t n, long long lo, long long hi, long long den) {
  std::vector<Rational> v;
  for (std::size_t i = 0; i < n; ++i) {
    v.push_back(Rational(lo + static_cast<long long>(gen() % static_cast<std::uint64_t>(hi - lo + 1)), den));
  }
  return v;
}

RealTuple as_tuple(const std::vector<Rational>& v) {
  std::vector<Real> r;
  for (const auto& x : v) r.push_back(Real(x));
  return RealTuple(std::move(r));
}

// Tuples whose coordinates all floor (or all ceil) to zero lie outside the family's domain.
bool in_floor_domain(const std::vector<Rational>& v, int m) {
  return std::any_of(v.begin(), v.end(), [m](const Rational& x) { return floor_at(x, m) != 0; }) &&
         std::any_of(v.begin(), v.end(), [m](const Rational& x) { return ceil_at(x, m) != 0; });
}

bool envelope_holds(const std::vector<Rational>& v, const Rational& x) {
  return *std::min_element(v.begin(), v.end()) <= x && x <= *std::max_element(v.begin(), v.end());
}

}  // namespace

TEST(FloorFamily, ChainInequalityIsExact) {
  std::mt19937_64 gen(1);
  for (int m : {-1, 0, 1, 2}) {
    const Real unit(pow10_rational(-m));
    for (int i = 0; i < 2500; ++i) {
      const auto v = random_decimals(gen, 2 + gen() % 5, -100000, 100000, 1000);
      if (!in_floor_domain(v, m)) continue;
      const RealTuple t = as_tuple(v);
      const Real a = arithmetic_mean(t);
      const Real chain[] = {a - unit,          shifted_ceil(t, m), floor_arith(t, m), a,
                            ceil_arith(t, m),  shifted_floor(t, m), a + unit};
      for (std::size_t k = 0; k + 1 < std::size(chain); ++k) {
        ASSERT_LE(compare(chain[k], chain[k + 1]), 0) << "m=" << m << " link " << k << " at " << t.render();
      }
    }
  }
}

TEST(FloorFamily, MatchesTheCoordinatewiseDefinition) {
  std::mt19937_64 gen(2);
  for (int i = 0; i < 3000; ++i) {
    const int m = static_cast<int>(gen() % 4) - 1;
    const auto v = random_decimals(gen, 2 + gen() % 4, -50000, 50000, 1000);
    if (!in_floor_domain(v, m)) continue;
    std::vector<Rational> lo, hi;
    for (const auto& x : v) {
      lo.push_back(floor_at(x, m));
      hi.push_back(ceil_at(x, m));
    }
    EXPECT_EQ(floor_arith(as_tuple(v), m), Real(mean_of(lo)));
    EXPECT_EQ(ceil_arith(as_tuple(v), m), Real(mean_of(hi)));
  }
}

TEST(FloorFamily, RefinesWithTheScale) {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 3000; ++i) {
    const int m = static_cast<int>(gen() % 4) - 1;
    const auto v = random_decimals(gen, 2 + gen() % 4, -50000, 50000, 10000);
    if (!in_floor_domain(v, m) || !in_floor_domain(v, m + 1)) continue;
    const RealTuple t = as_tuple(v);
    EXPECT_LE(compare(floor_arith(t, m), floor_arith(t, m + 1)), 0);
    EXPECT_LE(compare(ceil_arith(t, m + 1), ceil_arith(t, m)), 0);
    const Real a = arithmetic_mean(t), unit(pow10_rational(-m));
    EXPECT_LE(compare(a - floor_arith(t, m), unit), 0);
    EXPECT_LE(compare(ceil_arith(t, m) - a, unit), 0);
  }
}

TEST(FloorFamily, RangeIsTheScaledLattice) {
  std::mt19937_64 gen(4);
  for (int i = 0; i < 3000; ++i) {
    const int m = static_cast<int>(gen() % 4) - 1;
    const std::size_t n = 2 + gen() % 5;
    const auto t = random_decimals(gen, n, -50000, 50000, 1000);
    if (!in_floor_domain(t, m)) continue;
    const Real v = floor_arith(as_tuple(t), m);
    const Rational k = v.rational() * Rational(static_cast<long long>(n)) * pow10_rational(m);
    EXPECT_EQ(boost::multiprecision::denominator(k), 1) << v.render();
  }
  for (int m : {-1, 0, 1, 2}) {
    for (long long n = 2; n <= 5; ++n) {
      for (long long k = -50; k <= 50; ++k) {
        std::vector<Rational> t(static_cast<std::size_t>(n - 1), pow10_rational(-m));
        t.push_back(Rational(k - n + 1) * pow10_rational(-m));
        EXPECT_EQ(floor_arith(as_tuple(t), m).rational(), Rational(k, n) * pow10_rational(-m)) << m << " " << n << " " << k;
      }
    }
  }
}

TEST(FloorFamily, RegroupingNeverIncreases) {
  std::mt19937_64 gen(5);
  bool strict_seen = false;
  for (int i = 0; i < 3000; ++i) {
    const int m = static_cast<int>(gen() % 3) - 1;
    const std::size_t n = 3 + gen() % 4, k = 2 + gen() % (n - 2);
    const auto v = random_decimals(gen, n, 0, 100000, 1000);
    const std::vector<Rational> head(v.begin(), v.begin() + static_cast<long>(k));
    if (!in_floor_domain(head, m) || !in_floor_domain(v, m)) continue;
    std::vector<Rational> outer(k, floor_arith(as_tuple(head), m).rational());
    outer.insert(outer.end(), v.begin() + static_cast<long>(k), v.end());
    if (!in_floor_domain(outer, m)) continue;
    const int c = compare(floor_arith(as_tuple(outer), m), floor_arith(as_tuple(v), m));
    EXPECT_LE(c, 0);
    strict_seen = strict_seen || c < 0;
  }
  EXPECT_TRUE(strict_seen);
}

TEST(FloorFamily, FineEnoughScaleIsMeanLike) {
  std::mt19937_64 gen(6);
  int checked = 0;
  for (int i = 0; i < 5000; ++i) {
    const std::size_t n = 2 + gen() % 6;
    auto v = random_decimals(gen, n, 0, 1000000, 100000);
    std::sort(v.begin(), v.end());
    if (v.front() == v.back()) continue;
    const double bound = std::log10(static_cast<double>(n) / static_cast<double>(v.back() - v.front())) + 1;
    if (std::abs(bound - std::round(bound)) < 1e-9) continue;
    const int m = static_cast<int>(std::floor(bound)) + 1;
    EXPECT_TRUE(envelope_holds(v, floor_arith(as_tuple(v), m).rational())) << "m=" << m;
    ++checked;
  }
  EXPECT_GT(checked, 4000);
}

TEST(Bessel, MeanLikeIffTheShorterPrefixStaysBelowTheLast) {
  std::mt19937_64 gen(7);
  int yes = 0, no = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t n = 3 + gen() % 6;
    auto v = random_decimals(gen, n, 1, 10000, 100);
    std::sort(v.begin(), v.end());
    Rational s = 0;
    for (const auto& x : v) s += x;
    const Rational full = s / Rational(static_cast<long long>(n - 1));
    const Rational prefix = (s - v.back()) / Rational(static_cast<long long>(n - 2));
    const bool mean_like = is_mean_like(make_mean("bessel-plus"), as_tuple(v));
    EXPECT_EQ(mean_like, envelope_holds(v, full));
    EXPECT_EQ(mean_like, prefix <= v.back());
    (mean_like ? yes : no)++;
  }
  EXPECT_GT(yes, 100);
  EXPECT_GT(no, 100);
}

TEST(Bessel, MeanLikenessPersistsUnderExtension) {
  std::mt19937_64 gen(8);
  const MeanFunction b = make_mean("bessel-plus");
  int extended = 0;
  for (int i = 0; i < 10000; ++i) {
    auto v = random_decimals(gen, 2 + gen() % 6, 1, 10000, 100);
    if (!is_mean_like(b, as_tuple(v))) {
      v.push_back(*std::max_element(v.begin(), v.end()) * 2);
    }
    if (!is_mean_like(b, as_tuple(v))) continue;
    v.push_back(random_decimals(gen, 1, 1, 20000, 100)[0]);
    EXPECT_TRUE(is_mean_like(b, as_tuple(v)));
    ++extended;
  }
  EXPECT_GT(extended, 5000);
}

TEST(PowerQuasi, DecreasingInTheExponent) {
  std::mt19937_64 gen(9);
  for (int i = 0; i < 1000; ++i) {
    Rational u(1 + static_cast<long long>(gen() % 400), 100), v(1 + static_cast<long long>(gen() % 400), 100);
    if (u == v) continue;
    if (u < v) std::swap(u, v);
    const RealTuple t = as_tuple(random_decimals(gen, 2, 1, 10000, 1000));
    EXPECT_LT(power_quasi(t, u).to_double(), power_quasi(t, v).to_double())
        << "u=" << u << " v=" << v << " at " << t.render();
  }
}
