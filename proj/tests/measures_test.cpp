#include <cmath>

#include <gtest/gtest.h>

#include "quasimean/catalog.hpp"
#include "quasimean/means.hpp"
#include "quasimean/measures.hpp"
#include "test_util.hpp"

using namespace quasimean;
using qmtest::Q;
using qmtest::R;

namespace {

SupEstimate mdist_of(const std::string& id, std::size_t budget = 4000) {
  const MeanFunction k = make_mean(id);
  return mdist(k, k.box(), budget, 0);
}

}  // namespace

TEST(Mdist, FloorArithApproachesOneOverTenToTheM) {
  for (int m : {0, 1}) {
    const double expected = std::pow(10.0, -m);
    const auto s = mdist_of("floor-arith?m=" + std::to_string(m));
    EXPECT_NEAR(s.lower_bound.to_double(), expected, 0.02 * expected) << m;
    EXPECT_LE(s.lower_bound.to_double(), expected);
    EXPECT_FALSE(s.diverging);
  }
}

TEST(Mdist, CeilArithApproachesOneOverTenToTheM) {
  const auto s = mdist_of("ceil-arith?m=0");
  EXPECT_NEAR(s.lower_bound.to_double(), 1.0, 0.02);
}

TEST(Mdist, TrueMeanHasZeroDefect) {
  EXPECT_TRUE(mdist_of("arith", 2000).lower_bound.is_zero());
  const MeanFunction a = arith_function();
  EXPECT_TRUE(mdistp(a, a.box(), 2000, 0).lower_bound.is_zero());
  EXPECT_TRUE(a_quasi_constant(a, a.box(), 2000, 0).lower_bound.is_zero());
  EXPECT_TRUE(m_quasi_constant(a, a.box(), 2000, 0).lower_bound.is_zero());
}

TEST(Mdist, WitnessReplaysExactly) {
  for (const char* id : {"floor-arith?m=0", "star-arith?m=0", "bessel-plus"}) {
    const MeanFunction k = make_mean(id);
    const auto s = a_quasi_constant(k, k.box(), 2000, 3);
    ASSERT_TRUE(s.witness.has_value()) << id;
    const Real v = k(*s.witness);
    EXPECT_TRUE(identical(max(excess_above(*s.witness, v), excess_below(*s.witness, v)), s.lower_bound)) << id;
  }
}

TEST(Mdistp, FloorArithDiverges) {
  const MeanFunction k = make_mean("floor-arith?m=0");
  const auto s = mdistp(k, k.box(), 4000, 0);
  EXPECT_TRUE(s.diverging);
  EXPECT_GT(s.lower_bound.to_double(), kDivergenceThreshold);
}

TEST(Mdistp, BesselPlusAtLeastOne) {
  const MeanFunction k = make_mean("bessel-plus").restricted(2);
  const auto s = mdistp(k, DomainBox::left_open(0, 1, Arity::fixed(2)), 2000, 0);
  EXPECT_GE(s.lower_bound.to_double(), 1.0);
}

TEST(Mdista, ExactFormulaInstances) {
  EXPECT_EQ(mdista_exact_floor(1).render(), "0.36");
  EXPECT_EQ(mdista_exact_floor(2).render(), "0.0396");
  for (int m = 1; m < 8; ++m) EXPECT_LT(compare(mdista_exact_floor(m + 1), mdista_exact_floor(m)), 0);
}

TEST(Mdista, CellCountMatchesClosedForm) {
  // (2 * 10^m - 1) / 10^(2m): diagonal cells fully violate, their neighbours by half.
  for (int m = 0; m <= 3; ++m) {
    const long long p = static_cast<long long>(std::llround(std::pow(10.0, m)));
    EXPECT_EQ(mdista_cell_count(m), Q(2 * p - 1, p * p)) << m;
    EXPECT_EQ(mdista_cell_count(m, true), Q(2 * p - 1, p * p)) << m;
  }
}

TEST(Mdista, EstimatorBracketsTheCellCount) {
  const MeanFunction k = make_mean("floor-arith?m=1").restricted(2);
  const auto est = mdista(k, DomainBox::closed(1, 2, Arity::fixed(2)), 100000, 0);
  EXPECT_NEAR(est.value.to_double(), mdista_cell_count(1).to_double(), 3 * est.half_width);
  EXPECT_EQ(est.above, 0u);
  const MeanFunction a = arith_function().restricted(2);
  EXPECT_TRUE(mdista(a, DomainBox::closed(1, 2, Arity::fixed(2)), 20000, 0).value.is_zero());
}

TEST(Mdista, RequiresFixedArityAndBoundedBox) {
  const MeanFunction k = make_mean("floor-arith?m=1");
  EXPECT_THROW(mdista(k, DomainBox::closed(1, 2), 10, 0), UsageError);
  EXPECT_THROW(mdista(k, DomainBox::whole_line(Arity::fixed(2)), 10, 0), UsageError);
}

TEST(QuasiConstants, StarArith) {
  const MeanFunction k = make_mean("star-arith?m=0");
  const auto s = a_quasi_constant(k, k.box(), 4000, 0);
  EXPECT_LE(s.lower_bound.to_double(), 0.5);
  EXPECT_GE(s.lower_bound.to_double(), 0.225);
}

TEST(QuasiConstants, MaxPlusOneIsExactlyOne) {
  const MeanFunction k = make_mean("max-plus-one");
  EXPECT_EQ(a_quasi_constant(k, k.box(), 1000, 0).lower_bound.render(), "1");
}

TEST(QuasiConstants, BesselUnrestrictedPerArity) {
  const MeanFunction k = make_mean("bessel-unrestricted").restricted(2);
  const auto s = m_quasi_constant(k, k.box().with_arity(Arity::fixed(2)), 4000, 0);
  EXPECT_GE(s.lower_bound.to_double(), 0.5);
  EXPECT_LE(s.lower_bound.to_double(), 1.0);
}

TEST(QuasiConstants, TwiceMaxIsMultiplicativeNotAdditive) {
  const MeanFunction k = make_mean("twice-max");
  const auto m = m_quasi_constant(k, k.box(), 2000, 0);
  EXPECT_EQ(m.lower_bound.render(), "1");
  EXPECT_FALSE(m.diverging);
  EXPECT_TRUE(a_quasi_constant(k, k.box(), 2000, 0).diverging);
}

TEST(QuasiConstants, DoublingBudgetNeverLowersTheBound) {
  const MeanFunction k = make_mean("star-arith?m=0");
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    const auto small = a_quasi_constant(k, k.box(), 500, seed);
    const auto large = a_quasi_constant(k, k.box(), 1000, seed);
    EXPECT_LE(compare(small.lower_bound, large.lower_bound), 0) << seed;
  }
}

TEST(QuasiConstants, EmptyDomainIsReported) {
  const MeanFunction k = make_mean("floor-arith?m=0");
  EXPECT_THROW(mdist(k, DomainBox::closed(0, 0.5), 100, 0), EmptyDomain);
}
