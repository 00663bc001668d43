#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "quasimean/catalog.hpp"
#include "quasimean/iterate.hpp"
#include "quasimean/means.hpp"
#include "test_util.hpp"

using namespace quasimean;
using qmtest::Q;
using qmtest::R;
using qmtest::T;

namespace {

MeanFunction two(const std::string& id) { return make_mean(id).restricted(2); }

void expect_rows(const IterationTrace& tr, const std::vector<RealTuple>& rows) {
  ASSERT_GE(tr.rows.size(), rows.size() + 1);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(tr.rows[i + 1], rows[i]) << "row " << i + 1;
}

}  // namespace

TEST(Compose, Examples) {
  const MeanFunction a = arith_function();
  const MeanFunction c = compose(a, {a, a});
  EXPECT_EQ(c(T({"1", "2.5", "4"})).render(), "2.5");
  const MeanFunction f = compose(make_mean("min"), {make_mean("min"), make_mean("floor-arith?m=0")});
  EXPECT_EQ(f(T({"1.9", "2.1"})).render(), "1.5");
  const MeanFunction g = compose(make_mean("floor-arith?m=0"), {make_mean("floor-arith?m=0"), make_mean("floor-arith?m=0")});
  std::mt19937_64 gen(1);
  for (int i = 0; i < 1000; ++i) {
    const RealTuple t({Q(1000 + static_cast<long long>(gen() % 2001), 1000), Q(1000 + static_cast<long long>(gen() % 2001), 1000)});
    EXPECT_LE(compare(g(t), max_of(t)), 0) << t.render();
  }
}

TEST(Compound, ArithmeticWithItself) {
  const auto tr = compound(two("arith"), two("arith"), R("1"), R("3"));
  EXPECT_EQ(tr.verdict, TraceVerdict::ConstantAfter);
  EXPECT_EQ(tr.rows[1], T({"2", "2"}));
  EXPECT_EQ(tr.limit->render(), "2");
}

TEST(Compound, FloorArithPairFromOneTwo) {
  const auto tr = compound(two("floor-arith?m=0"), two("floor-arith?m=1"), R("1"), R("2"));
  expect_rows(tr, {T({"1.5", "1.5"}), T({"1", "1.5"}), T({"1", "1.25"}), T({"1", "1.1"}), T({"1", "1.05"}),
                   T({"1", "1"})});
  EXPECT_EQ(tr.verdict, TraceVerdict::ConstantAfter);
  EXPECT_GE(compare(*tr.limit, R("1")), 0);
}

TEST(Compound, FloorArithPairLeavesTheDomain) {
  const auto tr = compound(two("floor-arith?m=0"), two("floor-arith?m=1"), R("0.9"), R("1.9"));
  expect_rows(tr, {T({"0.5", "1.4"}), T({"0.5", "0.95"})});
  EXPECT_EQ(tr.verdict, TraceVerdict::DomainExit);
  ASSERT_TRUE(tr.upper_bound.has_value());
  EXPECT_LT(compare(*tr.upper_bound, R("0.75")), 0);
}

TEST(Compound, ArithmeticGeometricMean) {
  double a = 1, b = 2;
  for (int i = 0; i < 60; ++i) {
    const double g = std::sqrt(a * b), m = (a + b) / 2;
    a = g;
    b = m;
  }
  const auto tr = compound(two("geo"), two("arith"), R("1"), R("2"));
  ASSERT_TRUE(tr.limit.has_value());
  EXPECT_NEAR(tr.limit->to_double(), b, 1e-11);
  EXPECT_NEAR(tr.limit->to_double(), 1.45679, 1e-5);
}

TEST(Compound, TraceInvariants) {
  std::mt19937_64 gen(2);
  for (int i = 0; i < 200; ++i) {
    const Real a = Q(static_cast<long long>(gen() % 5000), 1000), b = a + Q(1 + static_cast<long long>(gen() % 5000), 1000);
    const auto tr = compound(two("geo"), two("arith"), a, b);
    for (std::size_t j = 1; j < tr.rows.size(); ++j) {
      EXPECT_TRUE(leq_tol(tr.rows[j][0], tr.rows[j][1], 1e-12));
      EXPECT_TRUE(leq_tol(tr.rows[j][1], tr.rows[j - 1][1], 1e-12));
    }
    ASSERT_TRUE(tr.limit.has_value());
    EXPECT_LT(compare(*tr.limit, b), 0);
  }
}

TEST(Compound, KAboveMIsAContractViolation) {
  EXPECT_THROW(compound(two("max"), two("min"), R("1"), R("2")), ContractViolation);
}

TEST(Iterated, Examples) {
  EXPECT_EQ(iterated(two("max"), 5, R("1"), R("3")).render(), "3");
  EXPECT_EQ(iterated(two("arith"), 1, R("1"), R("3")).render(), "2.5");
  EXPECT_EQ(iterated(two("min"), 4, R("1"), R("3")), two("min")(T({"1", "3"})));
}

TEST(Closure, MinSquare) {
  const MeanFunction k = make_mean("min-square");
  const auto one = idempotent_closure(k, R("1"), R("2"));
  ASSERT_TRUE(one.limit.has_value());
  EXPECT_EQ(one.limit->render(), "1");
  const auto below = idempotent_closure(k, R("0.999"), R("2"));
  ASSERT_TRUE(below.limit.has_value());
  EXPECT_NEAR(below.limit->to_double(), 0.0, 1e-12);
}

TEST(Closure, ArithmeticTendsToB) {
  const auto tr = idempotent_closure(two("arith"), R("1"), R("3"), 1e-12);
  ASSERT_TRUE(tr.limit.has_value());
  EXPECT_NEAR(tr.limit->to_double(), 3.0, 1e-11);
  EXPECT_TRUE(tr.detail.empty());
}

TEST(Extend3, FloorArithFromOnePointOne) {
  const auto tr = extend3(two("floor-arith?m=0"), R("1.1"), R("2.1"), R("3.1"));
  expect_rows(tr, {T({"1.5", "2", "2.5"}), T({"1.5", "1.5", "2"}), T({"1", "1.5", "1.5"}), T({"1", "1", "1"})});
  EXPECT_EQ(tr.verdict, TraceVerdict::ConstantAfter);
  EXPECT_EQ(tr.constant_after, 4u);
  EXPECT_EQ(tr.limit->render(), "1");
}

TEST(Extend3, FloorArithFromOne) {
  const auto tr = extend3(two("floor-arith?m=0"), R("3"), R("1"), R("2"));
  EXPECT_EQ(tr.rows[0], T({"1", "2", "3"}));
  EXPECT_EQ(tr.limit->render(), "1");
}

TEST(Extend3, ApproximatedMeanReachesZero) {
  const auto tr = extend3(two("approx-mean?K=arith&rule=floor&m=0"), R("0.9"), R("1.9"), R("2.9"));
  expect_rows(tr, {T({"0.5", "1", "1.5"}), T({"0.5", "0.5", "1"}), T({"0", "0.5", "0.5"}), T({"0", "0", "0"})});
  EXPECT_EQ(tr.limit->render(), "0");
}

TEST(Extend3, ArithmeticGivesBackTheThreeVariableMean) {
  const auto tr = extend3(two("arith"), R("1.1"), R("2.1"), R("3.1"));
  ASSERT_TRUE(tr.limit.has_value());
  EXPECT_NEAR(tr.limit->to_double(), 2.1, 1e-10);
}

TEST(Extend3, ShiftedArithmeticDiverges) {
  const MeanFunction k("arith-minus-one", Arity::fixed(2), DomainBox::whole_line(Arity::fixed(2)),
                       [](const RealTuple& t) { return arithmetic_mean(t) - Real(1); });
  const auto tr = extend3(k, R("0"), R("1"), R("2"));
  EXPECT_EQ(tr.verdict, TraceVerdict::Diverged);
}

TEST(Extend3, TraceInvariantsAndFiniteTermination) {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 300; ++i) {
    std::vector<Real> v;
    for (int j = 0; j < 3; ++j) v.push_back(Q(1000 + static_cast<long long>(gen() % 9000), 1000));
    const auto tr = extend3(two("floor-arith?m=0"), v[0], v[1], v[2]);
    EXPECT_EQ(tr.verdict, TraceVerdict::ConstantAfter);
    for (std::size_t j = 0; j < tr.rows.size(); ++j) {
      EXPECT_LE(compare(tr.rows[j][0], tr.rows[j][1]), 0);
      EXPECT_LE(compare(tr.rows[j][1], tr.rows[j][2]), 0);
      if (j) {
        EXPECT_LE(compare(tr.rows[j][2], tr.rows[j - 1][2]), 0);
      }
    }
  }
}

TEST(Extend3, LimitIsMonotone) {
  std::mt19937_64 gen(4);
  const MeanFunction k = two("geo");
  for (int i = 0; i < 1000; ++i) {
    std::vector<Real> hi, lo;
    for (int j = 0; j < 3; ++j) {
      const long long x = 1000 + static_cast<long long>(gen() % 9000);
      hi.push_back(Q(x, 1000));
      lo.push_back(Q(x - static_cast<long long>(gen() % 1000), 1000));
    }
    std::sort(hi.begin(), hi.end());
    std::sort(lo.begin(), lo.end());
    const auto th = extend3(k, hi[0], hi[1], hi[2], 1e-12);
    const auto tl = extend3(k, lo[0], lo[1], lo[2], 1e-12);
    ASSERT_TRUE(th.limit && tl.limit);
    EXPECT_LE(tl.limit->to_double(), th.limit->to_double() + 1e-10);
  }
}

TEST(BesselOnset, Examples) {
  std::vector<Real> naturals;
  for (int i = 1; i <= 20; ++i) naturals.push_back(Real(i));
  const auto r = bessel_onset(naturals);
  ASSERT_TRUE(r.index.has_value());
  EXPECT_EQ(*r.index, 3u);
  EXPECT_TRUE(r.persists);

  std::vector<Real> flat{Real(1)};
  for (int i = 0; i < 500; ++i) flat.push_back(Real(2));
  EXPECT_FALSE(bessel_onset(flat).index.has_value());

  std::vector<Real> approach{Real(1)};
  Rational p(1);
  for (int n = 2; n <= 200; ++n) {
    p /= 2;
    approach.push_back(Real(Rational(2 - p)));
  }
  EXPECT_FALSE(bessel_onset(approach).index.has_value());
  EXPECT_THROW(bessel_onset(std::vector<Real>{Real(1), Real(-1)}), DomainError);
}
