#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include <rdsio/rdsio.hpp>

using namespace rdsio;

namespace {

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST(Fiber, ShiftAdvancesOffset) {
  const Fiber w{7, 0.25};
  EXPECT_EQ(shift(w, 1.5), (Fiber{7, 1.75}));
  EXPECT_EQ(shift(w, 0.0), w);
}

TEST(Fiber, SemigroupExactOnIntegerOffsets) {
  Sampler s(1);
  for (int k = 0; k < 1000; ++k) {
    const Fiber w{s.bits(), double(s.integer(-1000, 1000))};
    const double a = double(s.integer(-50, 50));
    const double b = double(s.integer(-50, 50));
    EXPECT_EQ(shift(shift(w, a), b), shift(w, a + b));
  }
}

TEST(Fiber, SemigroupWithinOneAdditionOnRealOffsets) {
  Sampler s(2);
  for (int k = 0; k < 1000; ++k) {
    const Fiber w{s.bits(), s.uniform(-1000, 1000)};
    const double a = s.uniform(-50, 50);
    const double b = s.uniform(-50, 50);
    const double lhs = shift(shift(w, a), b).offset;
    const double rhs = shift(w, a + b).offset;
    const double scale = std::fabs(w.offset) + std::fabs(a) + std::fabs(b);
    EXPECT_LE(std::fabs(lhs - rhs), 2 * std::numeric_limits<double>::epsilon() * scale);
  }
}

TEST(Fiber, MakeFibersIsReproducible) {
  EXPECT_EQ(make_fibers(9, 20, TimeKind::discrete), make_fibers(9, 20, TimeKind::discrete));
  for (const Fiber& w : make_fibers(9, 20, TimeKind::discrete)) EXPECT_EQ(w.offset, std::floor(w.offset));
}

TEST(RandomVariable, ConstantIsConstant) {
  const RandomVariable c = RandomVariable::constant({1.5, -2.0});
  for (const Fiber& w : make_fibers(3, 10, TimeKind::continuous)) EXPECT_EQ(c(w), (Vec{1.5, -2.0}));
}

TEST(RandomVariable, EvaluationIsBitIdentical) {
  const RandomVariable r = RandomVariable::cell(law::Uniform{{-1, 0}, {1, 5}}, 17);
  for (const Fiber& w : make_fibers(4, 50, TimeKind::continuous)) {
    const Vec a = r(w);
    const Vec b = r(w);
    EXPECT_EQ(0, std::memcmp(a.data(), b.data(), a.size() * sizeof(double)));
  }
}

TEST(RandomVariable, CellValueDependsOnlyOnCell) {
  const CellNoise noise(law::Uniform{{0}, {1}}, 5);
  const RandomVariable r = RandomVariable::cell(noise);
  EXPECT_EQ(r(Fiber{3, 10.1}), r(Fiber{3, 10.9}));
  EXPECT_EQ(r(Fiber{3, 10.1}), noise.value(3, 10));
  EXPECT_NE(r(Fiber{3, 10.1}), r(Fiber{3, 11.0}));
  EXPECT_EQ(noise.value(3, -4), noise.value(3, -4));
}

TEST(RandomVariable, MonteCarloMeanAlongOrbit) {
  const RandomVariable r = RandomVariable::cell(law::Uniform{{-2.0}, {-0.5}}, 23);
  const Fiber w{12345, 0.0};
  const int n = 100001;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += r.scalar(shift(w, k));
  const double mean = sum / n;
  const double se = (1.5 / std::sqrt(12.0)) / std::sqrt(double(n));
  EXPECT_NEAR(mean, -1.25, 3 * se);
}

TEST(RandomVariable, DiscreteLawRespectsWeights) {
  const RandomVariable r = RandomVariable::cell(law::Discrete{{{0.0}, {1.0}}, {0.25, 0.75}}, 29);
  const Fiber w{77, 0.0};
  const int n = 40000;
  int ones = 0;
  for (int k = 0; k < n; ++k) ones += r.scalar(shift(w, k)) == 1.0;
  const double p = double(ones) / n;
  EXPECT_NEAR(p, 0.75, 3 * std::sqrt(0.75 * 0.25 / n));
}

TEST(RandomVariable, WindowStatisticsAreShiftInvariant) {
  const RandomVariable r = RandomVariable::cell(law::Uniform{{-2.0}, {-0.5}}, 31);
  const Fiber w{999, 0.0};
  std::vector<double> a, b;
  for (int k = 0; k < 5000; ++k) {
    a.push_back(r.scalar(shift(w, k)));
    b.push_back(r.scalar(shift(w, 20000 + k)));
  }
  // Critical value at significance 0.01.
  const double crit = 1.628 * std::sqrt(2.0 / 5000);
  EXPECT_LT(ks_statistic(a, b), crit);
}

TEST(RandomVariable, LawValidation) {
  EXPECT_THROW(CellNoise(law::Uniform{{1.0}, {0.0}}, 1), Error);
  EXPECT_THROW(CellNoise(law::Discrete{{}, {}}, 1), Error);
  EXPECT_THROW(CellNoise(law::Discrete{{{1.0}, {1.0, 2.0}}, {}}, 1), Error);
  EXPECT_THROW(CellNoise(law::Exponential{{-1.0}}, 1), Error);
}

TEST(RandomVariable, ArithmeticPropagatesRange) {
  const RandomVariable a = RandomVariable::cell(law::Uniform{{-1}, {2}}, 1);
  const RandomVariable b = RandomVariable::cell(law::Uniform{{3}, {4}}, 2);
  const auto sum = (a + b).range();
  ASSERT_TRUE(sum);
  EXPECT_EQ(sum->lo[0], 2.0);
  EXPECT_EQ(sum->hi[0], 6.0);
  const auto prod = (a * b).range();
  ASSERT_TRUE(prod);
  EXPECT_EQ(prod->lo[0], -4.0);
  EXPECT_EQ(prod->hi[0], 8.0);
  EXPECT_EQ((a * b).regularity(), Regularity::cell_constant);
  EXPECT_EQ(shifted(a, 0.5).regularity(), Regularity::cell_smooth);
}

TEST(Tempered, BoundedVariableScoresBelowBound) {
  const RandomVariable r = RandomVariable::cell(law::Uniform{{-3}, {3}}, 41);
  const TemperedReport rep = temperedness_report(r, Fiber{5, 0.3}, {});
  for (double s : rep.scores) EXPECT_LE(s, 3.0);
  EXPECT_TRUE(rep.tempered_consistent);
}

TEST(Tempered, ExponentialGrowthIsFlagged) {
  const RandomVariable r(1, [](const Fiber& w) { return Vec{std::exp(std::fabs(w.offset))}; });
  TemperedOptions opts;
  opts.gammas = {0.5};
  const TemperedReport rep = temperedness_report(r, Fiber{0, 0.0}, opts);
  EXPECT_FALSE(rep.tempered_consistent);
  EXPECT_NEAR(rep.growth_slope, 1.0, 0.05);
}

TEST(Tempered, ProductOfTemperedIsTempered) {
  const RandomVariable r1 = RandomVariable::cell(law::Uniform{{-3}, {3}}, 43);
  const RandomVariable r2 = RandomVariable::cell(law::Exponential{{1.0}}, 47);
  for (const Fiber& w : make_fibers(8, 10, TimeKind::continuous)) {
    EXPECT_TRUE(temperedness_report(r1, w, {}).tempered_consistent);
    EXPECT_TRUE(temperedness_report(r2, w, {}).tempered_consistent);
    EXPECT_TRUE(temperedness_report(r1 * r2, w, {}).tempered_consistent);
    EXPECT_TRUE(temperedness_report(r1 + r2, w, {}).tempered_consistent);
  }
}

TEST(Tempered, RejectsBadInput) {
  const RandomVariable nan_rv(1, [](const Fiber&) { return Vec{NAN}; });
  EXPECT_THROW(temperedness_report(nan_rv, Fiber{}, {}), NonFiniteError);
  TemperedOptions opts;
  opts.gammas = {};
  EXPECT_THROW(temperedness_report(RandomVariable::constant({1}), Fiber{}, opts), Error);
  opts.gammas = {0.1};
  opts.horizon = 0;
  EXPECT_THROW(temperedness_report(RandomVariable::constant({1}), Fiber{}, opts), Error);
}
