#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mkews/errors.hpp"
#include "mkews/mann_kendall.hpp"
#include "oracles.hpp"

using namespace mkews;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

std::int64_t brute_s(const VectorXd& x) {
  std::int64_t s = 0;
  for (Index i = 0; i < x.size(); ++i)
    for (Index j = i + 1; j < x.size(); ++j) s += x(j) > x(i) ? 1 : -1;
  return s;
}

}  // namespace

TEST(SStatistic, Examples) {
  EXPECT_EQ(s_statistic(vec({1, 2, 3})), 3);
  EXPECT_EQ(s_statistic(vec({3, 1, 2})), -1);
  EXPECT_THROW(s_statistic(vec({1, 1, 2})), TieError);
  EXPECT_THROW(s_statistic(vec({1})), RangeError);
}

TEST(SStatistic, PropertyReversalAndBruteForce) {
  std::mt19937_64 rng(201);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + static_cast<Index>(rng() % 60);
    const VectorXd x = oracle::white_noise(n, rng);
    const std::int64_t s = s_statistic(x);
    EXPECT_EQ(s, brute_s(x));
    EXPECT_EQ(s_statistic(VectorXd(x.reverse())), -s);
    EXPECT_LE(std::llabs(s), n * (n - 1) / 2);
    EXPECT_EQ((s - n * (n - 1) / 2) % 2, 0);
  }
}

TEST(MkTau, ExamplesAndRankInvariance) {
  EXPECT_DOUBLE_EQ(mk_tau(vec({1, 2, 3})), 1.0);
  EXPECT_NEAR(mk_tau(vec({3, 1, 2})), -1.0 / 3.0, 1e-15);
  std::mt19937_64 rng(202);
  for (int trial = 0; trial < 100; ++trial) {
    const VectorXd x = oracle::white_noise(30, rng);
    const VectorXd monotone = x.array().exp() * 3.0 + 1.0;
    const VectorXd r = ranks(x).cast<double>();
    EXPECT_EQ(mk_tau(x), mk_tau(monotone));
    EXPECT_EQ(mk_tau(x), mk_tau(r));
    EXPECT_EQ(normalized_tau(x), normalized_tau(r));
    const auto a = mk_test(x, Method::original), b = mk_test(r, Method::original);
    EXPECT_EQ(a.s, b.s);
    EXPECT_EQ(a.z, b.z);
    EXPECT_EQ(a.p, b.p);
  }
}

TEST(KendallTau, Examples) {
  const VectorXd x = vec({1, 2, 3});
  EXPECT_DOUBLE_EQ(kendall_tau(x, x), 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau(x, VectorXd(x.reverse())), -1.0);
  EXPECT_NEAR(kendall_tau(x, vec({1, 3, 2})), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(kendall_tau(x, vec({1, 2})), LengthMismatch);
}

TEST(KendallTau, AgainstTimeEqualsMkTau) {
  std::mt19937_64 rng(203);
  const VectorXd x = oracle::white_noise(40, rng);
  const VectorXd t = VectorXd::LinSpaced(40, 1, 40);
  EXPECT_DOUBLE_EQ(kendall_tau(t, x), mk_tau(x));
}

TEST(VarSIid, MatchesEnumeration) {
  EXPECT_NEAR(var_s_iid(3), 11.0 / 3.0, 1e-12);
  EXPECT_NEAR(var_s_iid(5), 50.0 / 3.0, 1e-12);
  EXPECT_NEAR(var_s_iid(10), 125.0, 1e-12);
  for (int n = 2; n <= 8; ++n) EXPECT_NEAR(var_s_iid(n), oracle::enumerated_var_s(n), 1e-9) << n;
  for (int n = 2; n <= 200; ++n) EXPECT_NEAR(var_s_iid(n), oracle::var_s_from_inversions(n), 1e-9 * n * n * n);
}

TEST(ZStatistic, ContinuityCorrection) {
  EXPECT_EQ(z_statistic(0, 5.0), 0.0);
  EXPECT_NEAR(z_statistic(3, 11.0 / 3.0), 2.0 / std::sqrt(11.0 / 3.0), 1e-12);
  EXPECT_NEAR(z_statistic(3, 11.0 / 3.0), 1.0445, 1e-4);
  EXPECT_DOUBLE_EQ(z_statistic(-3, 11.0 / 3.0), -z_statistic(3, 11.0 / 3.0));
  EXPECT_THROW(z_statistic(1, 0.0), RangeError);
}

TEST(PTwoTailed, Values) {
  EXPECT_EQ(p_two_tailed(0.0), 1.0);
  EXPECT_NEAR(p_two_tailed(1.959964), 0.05, 1e-5);
  EXPECT_EQ(p_two_tailed(2.3), p_two_tailed(-2.3));
}

TEST(EssCorrection, HandArithmetic) {
  const VectorXd acf = vec({0.25, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(detail::yue_wang_correction(4, acf, {1}), 1.375);
  const VectorXd acf_s = vec({0.5, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(detail::hamed_rao_correction(4, acf_s, {1}), 1.25);
  EXPECT_DOUBLE_EQ(detail::yue_wang_correction(10, VectorXd(VectorXd::Zero(3)), {1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(detail::hamed_rao_correction(10, VectorXd(VectorXd::Zero(3)), {1, 2, 3}), 1.0);
}

TEST(EssYueWang, MatchesIndependentComputation) {
  std::mt19937_64 rng(204);
  for (int trial = 0; trial < 30; ++trial) {
    const VectorXd x = oracle::ar1(40, 0.4, rng);
    // Theil-Sen residuals by hand, then the biased lag-1 estimator
    std::vector<double> slopes;
    for (Index i = 0; i < 40; ++i)
      for (Index j = i + 1; j < 40; ++j) slopes.push_back((x(j) - x(i)) / static_cast<double>(j - i));
    std::sort(slopes.begin(), slopes.end());
    const double beta = 0.5 * (slopes[slopes.size() / 2 - 1] + slopes[slopes.size() / 2]);
    VectorXd d(40);
    for (Index i = 0; i < 40; ++i) d(i) = x(i) - beta * (i + 1);
    const double expected = 1.0 + 2.0 / 40.0 * 39.0 * oracle::lag1(d);
    EXPECT_NEAR(ess_ratio_yue_wang(x, LagPolicy::fixed(1)), std::max(expected, kEssFloor), 1e-10);
  }
}

TEST(EssYueWang, PositiveAutocorrelationInflates) {
  std::mt19937_64 rng(205);
  double mean_ratio = 0.0;
  for (int trial = 0; trial < 100; ++trial) mean_ratio += ess_ratio_yue_wang(oracle::ar1(500, 0.5, rng));
  EXPECT_GT(mean_ratio / 100.0, 1.0);
  EXPECT_GT(ess_ratio_yue_wang(oracle::ar1(5000, 0.5, rng)), 1.0);
}

TEST(EssHamedRao, NegativeRankAutocorrelationDeflates) {
  VectorXd alternating(40);
  for (Index i = 0; i < 40; ++i) alternating(i) = (i % 2 ? 1.0 : -1.0) * (1.0 + 0.01 * i);
  EXPECT_LT(ess_ratio_hamed_rao(alternating, LagPolicy::fixed(1)), 1.0);
}

TEST(EssHamedRao, TiedDetrendedValuesAreAccepted) {
  // Theil-Sen leaves the median pair level, so detrended values tie exactly.
  EXPECT_NO_THROW(ess_ratio_hamed_rao(vec({1, 3, 2, 5, 4, 6})));
}

TEST(EssFloor, ClampFlagged) {
  VectorXd alternating(12);
  for (Index i = 0; i < 12; ++i) alternating(i) = (i % 2 ? 1.0 : -1.0) * (1.0 + 0.001 * i);
  const auto out = mk_test(alternating, Method::yue_wang, LagPolicy::fixed(1));
  EXPECT_TRUE(out.ess_clamped);
  EXPECT_EQ(out.ess_ratio, kEssFloor);
  EXPECT_NEAR(out.var_s, var_s_iid(12) * kEssFloor, 1e-15);
  EXPECT_FALSE(mk_test(vec({0.3, -1.2, 0.8, 2.1, -0.4, 0.9, 1.7, -2.2}), Method::yue_wang).ess_clamped);
  // an exact line detrends to a constant, whose autocorrelation is undefined
  VectorXd line(12);
  for (Index i = 0; i < 12; ++i) line(i) = 2.0 * (i + 1);
  EXPECT_THROW(mk_test(line, Method::yue_wang), DegenerateError);
}

TEST(LagPolicy, SignificantSelectsOnlyLargeLags) {
  const VectorXd acf = vec({0.5, 0.1, -0.45, 0.0});
  const auto lags = detail::select_lags(acf, 25, LagPolicy::significant(0.05));  // bound 1.96/5
  EXPECT_EQ(lags, (std::vector<Index>{1, 3}));
  EXPECT_EQ(detail::select_lags(acf, 25, LagPolicy::fixed(2)), (std::vector<Index>{1, 2}));
}

TEST(LagPolicy, ParseAndPrint) {
  EXPECT_EQ(LagPolicy::parse("3").max_lag, 3);
  EXPECT_EQ(LagPolicy::parse("significant").mode, LagPolicy::Mode::significant);
  EXPECT_DOUBLE_EQ(LagPolicy::parse("significant:0.01").level, 0.01);
  EXPECT_EQ(LagPolicy::parse(LagPolicy::fixed(4).to_string()).max_lag, 4);
  EXPECT_THROW(LagPolicy::parse("abc"), Error);
  EXPECT_THROW(mk_test(vec({1, 2, 3, 4}), Method::hamed_rao, LagPolicy::fixed(4)), RangeError);
}

TEST(MkTest, StrictlyIncreasing) {
  const VectorXd x = VectorXd::LinSpaced(20, 1, 20);
  const auto out = mk_test(x, Method::original);
  EXPECT_EQ(out.s, 190);
  EXPECT_EQ(out.trend, Trend::increasing);
  EXPECT_LT(out.p, 1e-4);
  EXPECT_NEAR(out.z, 189.0 / std::sqrt(var_s_iid(20)), 1e-12);
  EXPECT_EQ(mk_test(VectorXd(x.reverse())).trend, Trend::decreasing);
}

TEST(MkTest, OutcomeInvariants) {
  std::mt19937_64 rng(206);
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 4 + static_cast<Index>(rng() % 80);
    const VectorXd x = (trial % 3 == 0) ? oracle::ar1(n, 0.6, rng) : oracle::white_noise(n, rng);
    for (Method m : {Method::original, Method::yue_wang, Method::hamed_rao}) {
      const auto o = mk_test(x, m);
      EXPECT_NEAR(o.tau, static_cast<double>(o.s) / (0.5 * n * (n - 1)), 1e-12);
      // the continuity correction maps |S| = 1 to z = 0
      if (std::llabs(o.s) <= 1) {
        EXPECT_EQ(o.z, 0.0);
      } else {
        EXPECT_EQ((o.z > 0) - (o.z < 0), (o.s > 0) - (o.s < 0));
      }
      EXPECT_GE(o.p, 0.0);
      EXPECT_LE(o.p, 1.0);
      if (o.s == 0) EXPECT_EQ(o.p, 1.0);
      EXPECT_GE(o.ess_ratio, kEssFloor);
      EXPECT_NEAR(o.var_s, var_s_iid(n) * o.ess_ratio, 1e-9 * o.var_s);
      if (m == Method::original) EXPECT_EQ(o.ess_ratio, 1.0);
      EXPECT_EQ(o.trend != Trend::no_trend, o.p < 0.05);
    }
  }
}

TEST(MkTest, Validation) {
  EXPECT_THROW(mk_test(vec({1, 2, 3})), RangeError);
  EXPECT_THROW(mk_test(vec({1, 2, 3, 4}), Method::original, LagPolicy::fixed(1), 1.5), RangeError);
  EXPECT_THROW(mk_test(vec({1, 2, 2, 4})), TieError);
}

TEST(NormalizedTau, Examples) {
  EXPECT_NEAR(normalized_tau(vec({1, 2, 3})), 3.0 / std::sqrt(11.0 / 3.0), 1e-12);
  EXPECT_NEAR(normalized_tau(vec({1, 2, 3})), 1.567, 1e-3);
  EXPECT_EQ(normalized_tau(vec({2, 1, 3, 4, 0})), 0.0);  // S = 0
}

TEST(ExactNull, SmallCases) {
  const auto d2 = exact_null_distribution(2);
  EXPECT_EQ(d2.support, (std::vector<std::int64_t>{-1, 1}));
  EXPECT_DOUBLE_EQ(d2.probabilities[0], 0.5);
  const auto d3 = exact_null_distribution(3);
  EXPECT_EQ(d3.support, (std::vector<std::int64_t>{-3, -1, 1, 3}));
  EXPECT_DOUBLE_EQ(d3.probabilities[0], 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(d3.probabilities[1], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(d3.probabilities[2], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(d3.probabilities[3], 1.0 / 6.0);
  EXPECT_NEAR(exact_null_distribution(10).variance(), 125.0, 1e-9);
}

TEST(ExactNull, EnumerationAndMoments) {
  for (int n = 2; n <= 9; ++n) {
    const auto counts = oracle::enumerate_s_counts(n);
    const auto d = exact_null_distribution(n);
    for (std::size_t k = 0; k < d.support.size(); ++k) {
      const auto it = counts.find(d.support[k]);
      ASSERT_NE(it, counts.end());
      EXPECT_EQ(d.probabilities[k], static_cast<double>(it->second) / oracle::factorial(n));
    }
  }
  for (int n : {2, 15, 20, 21, 35, 60}) {
    const auto d = exact_null_distribution(n);
    double total = 0.0;
    for (std::size_t k = 0; k < d.support.size(); ++k) {
      total += d.probabilities[k];
      EXPECT_NEAR(d.probabilities[k], d.probabilities[d.support.size() - 1 - k], 1e-15);
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(d.mean(), 0.0, 1e-9);
    EXPECT_NEAR(d.variance(), var_s_iid(n), 1e-9 * var_s_iid(n)) << n;
  }
  EXPECT_THROW(exact_null_distribution(1), RangeError);
  EXPECT_THROW(exact_null_distribution(61), RangeError);
}

TEST(ExactNull, InversionCountsAreMahonian) {
  const auto c4 = inversion_counts(4);
  EXPECT_EQ(c4, (std::vector<std::uint64_t>{1, 3, 5, 6, 5, 3, 1}));
  const auto c20 = inversion_counts(20);
  long double total = 0;
  for (auto c : c20) total += c;
  EXPECT_EQ(static_cast<double>(total), oracle::factorial(20));
}
