#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "quasimean/catalog.hpp"
#include "quasimean/decimal.hpp"
#include "quasimean/domain.hpp"
#include "quasimean/generator.hpp"
#include "quasimean/mean_function.hpp"
#include "quasimean/means.hpp"
#include "quasimean/quasi.hpp"
#include "quasimean/real.hpp"
#include "quasimean/tuple.hpp"
#include "test_util.hpp"

using namespace quasimean;
using qmtest::Q;
using qmtest::R;
using qmtest::T;

TEST(ExactDecimal, ParsesCanonicalForm) {
  const auto d = ExactDecimal::parse("12.500");
  EXPECT_EQ(d.sign(), 1);
  EXPECT_EQ(d.mantissa(), Integer(125));
  EXPECT_EQ(d.exponent(), -1);
  EXPECT_EQ(ExactDecimal::parse("-0.000").sign(), 0);
  EXPECT_EQ(ExactDecimal::parse("3e2").render(), "300");
  EXPECT_EQ(ExactDecimal::parse("-1.5E-3").render(), "-0.0015");
}

TEST(ExactDecimal, LeadingZerosAreDecimalNotOctal) {
  EXPECT_EQ(ExactDecimal::parse("0.010").to_rational(), Rational(1, 100));
  EXPECT_EQ(ExactDecimal::parse("0.08").to_rational(), Rational(2, 25));
  EXPECT_EQ(ExactDecimal::parse("007").to_rational(), Rational(7));
}

TEST(ExactDecimal, RejectsMalformedText) {
  for (const char* bad : {"", "-", ".", "1.2.3", "1e", "abc", "1,5", "1 2"}) {
    EXPECT_THROW(ExactDecimal::parse(bad), ParseError) << bad;
  }
}

TEST(ExactDecimal, RenderParseRoundTrip) {
  std::mt19937_64 gen(7);
  for (int i = 0; i < 2000; ++i) {
    const long long mant = static_cast<long long>(gen() % 2000001) - 1000000;
    const long exp = static_cast<long>(gen() % 21) - 10;
    const ExactDecimal d(mant < 0 ? -1 : (mant > 0 ? 1 : 0), Integer(mant < 0 ? -mant : mant), exp);
    const ExactDecimal back = ExactDecimal::parse(d.render());
    EXPECT_EQ(back.to_rational(), d.to_rational());
    EXPECT_EQ(back.exponent(), d.exponent());
  }
}

TEST(ExactDecimal, FloorAndCeilAtScaleBracketTheValue) {
  std::mt19937_64 gen(11);
  for (int i = 0; i < 10000; ++i) {
    const long long mant = static_cast<long long>(gen() % 20000001) - 10000000;
    const long exp = static_cast<long>(gen() % 13) - 8;
    const ExactDecimal d(mant < 0 ? -1 : (mant > 0 ? 1 : 0), Integer(mant < 0 ? -mant : mant), exp);
    const int m = static_cast<int>(gen() % 10) - 3;
    const Rational v = d.to_rational();
    const Rational step = pow10_rational(-m);
    const Integer f = d.floor_at_scale(m);
    const Integer c = d.ceil_at_scale(m);
    EXPECT_LE(Rational(f) * step, v);
    EXPECT_LT(v, Rational(f + 1) * step);
    EXPECT_GE(Rational(c) * step, v);
    EXPECT_GT(v, Rational(c - 1) * step);
  }
}

TEST(ExactDecimal, FloorAtScaleHandExamples) {
  EXPECT_EQ(ExactDecimal::parse("2.1").floor_at_scale(0), Integer(2));
  EXPECT_EQ(ExactDecimal::parse("-2.1").floor_at_scale(0), Integer(-3));
  EXPECT_EQ(ExactDecimal::parse("-2.1").ceil_at_scale(0), Integer(-2));
  EXPECT_EQ(ExactDecimal::parse("0.29").floor_at_scale(1), Integer(2));
  EXPECT_EQ(ExactDecimal::parse("129").floor_at_scale(-1), Integer(12));
  EXPECT_EQ(ExactDecimal::parse("129").ceil_at_scale(-2), Integer(2));
}

TEST(Real, ExactArithmeticAndRendering) {
  EXPECT_EQ((R("2.1") + R("3")).render(), "5.1");
  EXPECT_EQ((R("1") / R("3")).render_rational(), "1/3");
  EXPECT_FALSE((R("1") / R("3")).render().empty());
  EXPECT_EQ((R("1") / R("3")).render().rfind("\xE2\x89\x88", 0), 0u);  // approximate marker
  EXPECT_TRUE((R("1") / R("3")).exact());
  EXPECT_FALSE(Real::approx(0.5).exact());
  EXPECT_EQ(Real::approx(0.5).render().rfind("\xE2\x89\x88", 0), 0u);
}

TEST(Real, ExactRootsStayExact) {
  const Real r = sqrt(R("2.25"));
  EXPECT_TRUE(r.exact());
  EXPECT_EQ(r.render(), "1.5");
  const Real s = sqrt(R("2"));
  EXPECT_FALSE(s.exact());
  EXPECT_NEAR(s.to_double(), std::sqrt(2.0), 1e-15);
}

TEST(Real, ScaledFloorAndCeil) {
  EXPECT_EQ(floor_scaled(R("2.19"), 1).render(), "2.1");
  EXPECT_EQ(ceil_scaled(R("2.11"), 1).render(), "2.2");
  EXPECT_EQ(floor_scaled(Q(23, 3), 0).render(), "7");
}

TEST(Tuple, MinMax) {
  EXPECT_EQ(min_of(T({"1", "2", "3"})).render(), "1");
  EXPECT_EQ(max_of(T({"1", "2", "3"})).render(), "3");
  EXPECT_EQ(min_of(T({"5"})).render(), "5");
  EXPECT_EQ(max_of(T({"5"})).render(), "5");
  EXPECT_EQ(min_of(T({"-1", "-2"})).render(), "-2");
  EXPECT_EQ(max_of(T({"-1", "-2"})).render(), "-1");
}

TEST(Domain, BoxMembershipRespectsOpenEnds) {
  const auto box = DomainBox::left_open(0, 1);
  EXPECT_FALSE(box.contains(R("0")));
  EXPECT_TRUE(box.contains(R("1")));
  EXPECT_TRUE(box.contains(T({"0.5", "1"})));
  EXPECT_FALSE(box.contains(T({"0.5"})));
  EXPECT_FALSE(box.contains(T({"0.5", "1.0001"})));
  EXPECT_TRUE(DomainBox::whole_line().contains(R("-1e30")));
  EXPECT_THROW(DomainBox::closed(2, 1), UsageError);
}

TEST(Domain, ArityAcceptance) {
  EXPECT_TRUE(Arity::fixed(2).accepts(2));
  EXPECT_FALSE(Arity::fixed(2).accepts(3));
  EXPECT_TRUE(Arity::at_least(2).accepts(7));
  EXPECT_FALSE(Arity::at_least(2).accepts(1));
}

TEST(MeanFunction, RejectsOutsideDomain) {
  const MeanFunction g = geo_function();
  EXPECT_THROW(g(T({"-1", "2"})), DomainError);
  EXPECT_FALSE(g.try_eval(T({"-1", "2"})).has_value());
  const MeanFunction a2 = arith_function().restricted(2);
  EXPECT_THROW(a2(T({"1", "2", "3"})), ArityError);
}

TEST(Means, Arithmetic) {
  EXPECT_EQ(arithmetic_mean(T({"2.1", "3"})).render(), "2.55");
  EXPECT_EQ(arithmetic_mean(T({"7.25", "7.25", "7.25"})).render(), "7.25");
  EXPECT_EQ(arithmetic_mean(T({"1", "2", "3", "6"})).render(), "3");
  EXPECT_EQ(arithmetic_mean(T({"1", "2", "2"})), Q(5, 3));
}

TEST(Means, GeometricHarmonicPower) {
  EXPECT_NEAR(geometric_mean(T({"100", "1"})).to_double(), 10.0, 1e-12);
  EXPECT_EQ(power_mean(T({"2", "3", "4"}), Rational(1)).render(), "3");
  EXPECT_NEAR(power_mean(T({"2", "3", "4"}), Rational(2)).to_double(), std::sqrt(29.0 / 3.0), 1e-12);
  EXPECT_NEAR(harmonic_mean(T({"1", "4", "4"})).to_double(), 3.0 / (1.0 + 0.25 + 0.25), 1e-12);
  EXPECT_NEAR(power_mean(T({"2", "8"}), Rational(0)).to_double(), 4.0, 1e-12);
  EXPECT_THROW(geometric_mean(T({"0", "1"})), DomainError);
  EXPECT_THROW(harmonic_mean(T({"-1", "1"})), DomainError);
}

TEST(Means, PowerMeanMonotoneInExponent) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  const Rational xs[] = {Rational(-3), Rational(-1), Rational(-1, 2), Rational(0), Rational(1, 3), Rational(1),
                         Rational(2), Rational(5)};
  for (int i = 0; i < 200; ++i) {
    std::vector<Real> v;
    for (int j = 0; j < 4; ++j) v.push_back(decimal_from_double(std::round(u(gen) * 1000) / 1000));
    const RealTuple t(v);
    for (std::size_t k = 0; k + 1 < std::size(xs); ++k) {
      EXPECT_LE(power_mean(t, xs[k]).to_double(), power_mean(t, xs[k + 1]).to_double() + 1e-10);
    }
  }
}

TEST(Means, QuasiArithmetic) {
  EXPECT_EQ(quasi_arithmetic_mean(T({"1", "2", "3"}), GeneratorFunction::identity()).render(), "2");
  EXPECT_NEAR(quasi_arithmetic_mean(T({"2", "3", "4"}), GeneratorFunction::square()).to_double(),
              std::sqrt(29.0 / 3.0), 1e-10);
  EXPECT_NEAR(quasi_arithmetic_mean(T({"1", "4"}), GeneratorFunction::ln()).to_double(), 2.0, 1e-10);
}

TEST(Means, QuasiArithmeticIdentityMatchesArithmetic) {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 500; ++i) {
    std::vector<Real> v;
    for (int j = 0; j < 3; ++j) v.push_back(Q(static_cast<long long>(gen() % 20001) - 10000, 1000));
    const RealTuple t(v);
    EXPECT_TRUE(approx_equal(quasi_arithmetic_mean(t, GeneratorFunction::identity()), arithmetic_mean(t), 1e-12));
  }
}

TEST(Generator, InverseWithinTolerance) {
  const auto f = GeneratorFunction::cube();
  for (double y : {-8.0, -0.3, 0.0, 2.0, 27.0, 1000.0}) {
    const Real x = f.inverse(Real::approx(y));
    EXPECT_LE(std::abs(f(x).to_double() - y), 1e-10 * std::max(1.0, std::abs(y))) << y;
  }
  EXPECT_THROW(GeneratorFunction::named("reciprocal"), GeneratorError);
}

TEST(MeanLike, Predicate) {
  EXPECT_FALSE(is_mean_like(make_mean("bessel-plus"), T({"1", "2"})));
  EXPECT_TRUE(is_mean_like(arith_function(), T({"-3", "8.5", "1"})));
  EXPECT_FALSE(is_mean_like(make_mean("trimmed-k1"), T({"10", "11", "12"})));
}

TEST(Truncate, ClampsToTheEnvelope) {
  EXPECT_EQ(truncate_to_mean(make_mean("bessel-plus"))(T({"1", "2"})).render(), "2");
  EXPECT_EQ(truncate_to_mean(make_mean("parallel-resistance"))(T({"3", "6"})).render(), "3");
  const MeanFunction a = arith_function();
  const MeanFunction ta = truncate_to_mean(a);
  std::mt19937_64 gen(9);
  for (int i = 0; i < 500; ++i) {
    const RealTuple t({Q(static_cast<long long>(gen() % 2001) - 1000, 100), Q(static_cast<long long>(gen() % 2001) - 1000, 100)});
    EXPECT_EQ(ta(t), a(t));
  }
}
