#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "regenbound/empirics.hpp"
#include "regenbound/error.hpp"
#include "regenbound/random.hpp"

using namespace regenbound;

namespace {

std::vector<double> draws(const Distribution& d, int n, std::uint64_t seed) {
  const UniformStream s(seed, Domain::independent, 0);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(d.quantile(s(static_cast<std::uint64_t>(i), Slot::U)));
  return out;
}

}  // namespace

TEST(EmpiricalTv, SelfSampleIsSmall) {
  const Distribution e(Exponential{1.0});
  const TvEstimate t = empirical_tv(draws(e, 100000, 1), e, 50);
  EXPECT_LT(t.estimate, 0.05);
  EXPECT_GT(t.ci, 0.0);
}

TEST(EmpiricalTv, Extremes) {
  const Distribution u(Uniform{0.0, 1.0});
  EXPECT_NEAR(empirical_tv(std::vector<double>(100, 0.1), u, 2).estimate, 1.0, 1e-15);
  EXPECT_NEAR(empirical_tv(std::vector<double>(100, 5.0), u, 10).estimate, 2.0, 1e-15);
  EXPECT_THROW(empirical_tv(std::vector<double>(40, 0.1), u, 10), InvalidArgument);
  EXPECT_THROW(empirical_tv({}, u, 2), InvalidArgument);
}

TEST(EmpiricalTv, RefinementNeverDecreases) {
  const Distribution g(Gamma{2.0, 1.0});
  const Distribution e(Exponential{0.5});
  const std::vector<double> x = draws(g, 50000, 2);
  double prev = 0.0;
  for (int bins : {5, 10, 20, 40, 80, 160}) {
    const double est = empirical_tv(x, e, bins).estimate;
    EXPECT_GE(est, prev - 1e-12) << bins;
    prev = est;
  }
}

TEST(EmpiricalTv, BootstrapDeterministic) {
  const Distribution e(Exponential{1.0});
  const auto x = draws(e, 5000, 4);
  EXPECT_EQ(empirical_tv(x, e, 20, 9).ci, empirical_tv(x, e, 20, 9).ci);
}

TEST(Ks, Stratified) {
  const Distribution e(Exponential{1.0});
  const int n = 1000;
  std::vector<double> x;
  for (int i = 1; i <= n; ++i) x.push_back(e.quantile((i - 0.5) / n));
  EXPECT_NEAR(ks_statistic(x, [&](double s) { return e.cdf(s); }).statistic, 0.5 / n, 1e-12);
}

TEST(Ks, PowerAndSize) {
  const Distribution e1(Exponential{1.0});
  const Distribution e2(Exponential{2.0});
  const auto x = draws(e1, 100000, 5);
  const KsResult same = ks_statistic(x, [&](double s) { return e1.cdf(s); });
  EXPECT_TRUE(same.pass_1());
  EXPECT_NEAR(same.critical_1, 1.63 / std::sqrt(1e5), 1e-15);
  const KsResult wrong = ks_statistic(x, [&](double s) { return e2.cdf(s); });
  EXPECT_NEAR(wrong.statistic, 0.25, 0.01);
  EXPECT_FALSE(wrong.pass_1());
  EXPECT_TRUE(ks_two_sample(draws(e1, 20000, 6), draws(e1, 20000, 7)).pass_1());
  EXPECT_FALSE(ks_two_sample(draws(e1, 20000, 6), draws(e2, 20000, 7)).pass_1());
}

TEST(ChiSquare, GeometricFit) {
  std::vector<double> p;
  for (int n = 0; n < 10; ++n) p.push_back(0.5 * std::pow(0.5, n));
  std::vector<std::int64_t> exact;
  for (double x : p) exact.push_back(static_cast<std::int64_t>(std::llround(x * 1024)));
  exact.push_back(1);
  const ChiSquareResult ok = chi_square_gof(exact, p);
  EXPECT_GT(ok.p_value, 0.5);
  std::vector<std::int64_t> skew = exact;
  skew[0] += 400;
  EXPECT_LT(chi_square_gof(skew, p).p_value, 1e-6);
  EXPECT_THROW(chi_square_gof({1, 2}, {0.5, 0.3, 0.2, 0.0}), InvalidArgument);
}

TEST(Verify, Rules) {
  TvCurve c;
  c.t = {1.0, 2.0};
  c.estimate = {1.0, 0.2};
  c.ci = {0.01, 0.01};
  c.bound = {0.5, 2.5};
  const VerifyReport r = verify(c);
  EXPECT_FALSE(r.ok);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].t, 1.0);
  c.bound = {2.0, 2.0};
  EXPECT_TRUE(verify(c).ok);
  EXPECT_EQ(verify(c).to_json(), verify(c).to_json());
}

TEST(TvCurve, UniformDecaysBelowBound) {
  const Distribution u(Uniform{0.0, 1.0});
  const SplitDecomposition s = compute_split(validate(u));
  const Delay delay(u, FixedAge{0.0});
  const std::vector<BoundReport> reports{polynomial_bound(s, delay, 1.0), polynomial_bound(s, delay, 2.0)};
  const TvCurve c = tv_curve(s, delay, {0.0, 0.5, 5.0, 10.0}, 40000, 42, reports);
  EXPECT_NEAR(c.estimate[0], 2.0 * (1 - 1.0 / 50), 1e-12);
  EXPECT_LT(c.estimate[2] + 3 * c.ci[2], c.estimate[1]);
  EXPECT_TRUE(verify(c).ok);
  for (double e : c.estimate) {
    EXPECT_GE(e, 0.0);
    EXPECT_LE(e, 2.0);
  }
  const std::string csv = c.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,tv_estimate,ci,bound,bound_poly_k1,bound_poly_k2");
}

TEST(TvCurve, StationaryStartStaysAtNoiseFloor) {
  const Distribution e(Exponential{1.0});
  const SplitDecomposition s = compute_split(validate(e));
  const TvCurve c = tv_curve(s, Delay(e, StationaryDelay{}), {0.5, 2.0, 8.0}, 40000, 1, {});
  for (std::size_t g = 0; g < c.t.size(); ++g) EXPECT_LT(c.estimate[g], 2 * c.ci[g]);
}

TEST(TvCurve, GridValidation) {
  const Distribution e(Exponential{1.0});
  const SplitDecomposition s = compute_split(validate(e));
  EXPECT_THROW(tv_curve(s, Delay(e, FixedAge{0.0}), {1.0, 1.0}, 100, 1, {}, 2), InvalidArgument);
  EXPECT_THROW(tv_curve(s, Delay(e, FixedAge{0.0}), {}, 100, 1, {}, 2), InvalidArgument);
}

TEST(AltTvCurve, BelowTransferredBound) {
  const AlternatingSpec spec{Distribution(Uniform{0.0, 1.0}), Distribution(Exponential{2.0})};
  const SplitDecomposition s = compute_split(validate(spec.f1));
  const TvCurve c = alt_tv_curve(spec, {1.0, 5.0, 20.0}, 40000, 42, {alt_polynomial_bound(spec, s, 1.0)});
  EXPECT_TRUE(verify(c).ok);
  EXPECT_GT(c.estimate[0], c.estimate[2]);
}
