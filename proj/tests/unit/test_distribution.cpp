#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "regenbound/distribution.hpp"
#include "regenbound/error.hpp"

using namespace regenbound;

namespace {

std::vector<Distribution> families() {
  return {Distribution(Exponential{1.5}),
          Distribution(Gamma{2.0, 1.0}),
          Distribution(Gamma{0.7, 2.0}),
          Distribution(Weibull{1.7, 2.0}),
          Distribution(Weibull{0.8, 1.0}),
          Distribution(Uniform{0.0, 1.0}),
          Distribution(Uniform{0.5, 2.0}),
          Distribution(HyperExponential{{0.3, 0.7}, {0.5, 3.0}}),
          Distribution::from_json(nlohmann::json::parse(
              R"({"kind":"tabulated","points":[[0,0],[1,0.4],[2,0.4,0.6],[3,0.9]],"tail":{"kind":"exponential","rate":1}})"))};
}

}  // namespace

TEST(DistributionOracle, Gamma21) {
  const Distribution g(Gamma{2.0, 1.0});
  EXPECT_NEAR(g.cdf(1.0), 0.26424111765711535681, 1e-15);
  EXPECT_NEAR(*g.density(1.0), 0.3678794411714423216, 1e-15);
  EXPECT_NEAR(g.raw_moment(3.0).value, 24.0, 1e-9);
  EXPECT_NEAR(g.equilibrium().mean(), 1.5, 1e-9);
}

TEST(DistributionOracle, UniformEquilibriumMgf) {
  const Distribution eq = Distribution(Uniform{0.0, 1.0}).equilibrium();
  EXPECT_NEAR(eq.mgf(1.0).value, 1.4365636569180904707, 1e-9);
  // F~(s) = 2s - s^2 on [0, 1].
  for (double s : {0.1, 0.5, 0.9}) EXPECT_NEAR(eq.cdf(s), 2 * s - s * s, 1e-12);
}

TEST(DistributionProperty, QuantileInvertsCdf) {
  for (const auto& d : families()) {
    for (double y : {1e-6, 0.01, 0.2, 0.5, 0.77, 0.99, 0.999999}) {
      const double x = d.quantile(y);
      EXPECT_GE(d.cdf(x), y - 1e-10) << d.describe() << " y=" << y;
      if (x > 1e-9) EXPECT_LE(d.cdf(x * (1 - 1e-7) - 1e-12), y + 1e-10) << d.describe();
    }
  }
}

TEST(DistributionProperty, SurvivalComplementsCdf) {
  for (const auto& d : families()) {
    double prev = 0.0;
    for (double s = 0.0; s < 10.0; s += 0.37) {
      EXPECT_NEAR(d.cdf(s) + d.survival(s), 1.0, 1e-12) << d.describe();
      EXPECT_GE(d.cdf(s), prev - 1e-15);
      prev = d.cdf(s);
    }
  }
}

TEST(DistributionProperty, EquilibriumMatchesIntegratedSurvival) {
  for (const auto& d : families()) {
    const Distribution eq = d.equilibrium();
    for (double s : {0.3, 1.0, 2.5}) EXPECT_NEAR(eq.cdf(s), d.integrated_survival(s) / d.mean(), 1e-9) << d.describe();
  }
}

TEST(DistributionProperty, OvershootIsConditionalLaw) {
  for (const auto& d : families()) {
    const double a = d.quantile(0.3);
    const Distribution o = d.overshoot(a);
    for (double s : {0.1, 0.6, 1.4})
      EXPECT_NEAR(o.survival(s), d.survival(a + s) / d.survival(a), 1e-10) << d.describe();
    EXPECT_NEAR(o.quantile(0.4), d.residual_quantile(a, 0.4), 1e-8) << d.describe();
  }
}

TEST(DistributionProperty, ExponentialIsMemoryless) {
  const Distribution e(Exponential{2.0});
  EXPECT_TRUE(e.is_exponential());
  EXPECT_NEAR(e.overshoot(3.0).cdf(0.5), e.cdf(0.5), 1e-14);
  EXPECT_NEAR(e.equilibrium().cdf(0.5), e.cdf(0.5), 1e-14);
}

TEST(DistributionProperty, MeanFromSurvivalIntegral) {
  EXPECT_NEAR(Distribution(Weibull{1.7, 2.0}).mean(), 2.0 * std::tgamma(1 + 1 / 1.7), 1e-9);
  EXPECT_NEAR(Distribution(HyperExponential{{0.3, 0.7}, {0.5, 3.0}}).mean(), 0.3 / 0.5 + 0.7 / 3.0, 1e-12);
  EXPECT_NEAR(Distribution(Uniform{0.5, 2.0}).raw_moment(2.0).value, (8.0 - 0.125) / 4.5, 1e-10);
}

TEST(DistributionProperty, JsonRoundTrip) {
  for (const auto& d : families()) {
    const Distribution back = Distribution::from_json(d.to_json());
    EXPECT_EQ(back.to_json(), d.to_json());
    EXPECT_DOUBLE_EQ(back.cdf(0.8), d.cdf(0.8));
  }
}

TEST(DistributionErrors, InvalidParameters) {
  EXPECT_THROW(Distribution(Exponential{-1.0}), InvalidArgument);
  EXPECT_THROW(Distribution(Uniform{1.0, 0.0}), InvalidArgument);
  EXPECT_THROW(Distribution(HyperExponential{{0.5, 0.2}, {1.0, 2.0}}), InvalidArgument);
  EXPECT_THROW(Distribution::from_json(nlohmann::json{{"kind", "nope"}}), InvalidArgument);
  EXPECT_THROW(Distribution(Exponential{1.0}).quantile(1.0), DomainError);
}

TEST(DistributionErrors, ValidationConditions) {
  const Distribution atom = Distribution::from_json(nlohmann::json::parse(R"({"kind":"tabulated","points":[[0.5,0,1]]})"));
  EXPECT_THROW(validate(atom), ConditionViolated);
  const Distribution heavy = Distribution::from_json(
      nlohmann::json::parse(R"({"kind":"tabulated","points":[[0,0],[1,0.5]],"tail":{"kind":"pareto","index":0.8}})"));
  EXPECT_THROW(validate(heavy), ConditionViolated);
  EXPECT_NO_THROW(validate(Distribution(Uniform{0.0, 1.0})));
}

TEST(Delay, Conventions) {
  const Distribution u(Uniform{0.0, 1.0});
  const Delay fixed(u, FixedAge{0.25});
  EXPECT_NEAR(fixed.first_period().cdf(0.25), (0.5 - 0.25) / 0.75, 1e-12);
  EXPECT_EQ(fixed.initial_age(0.3, 0.5), 0.25);
  const Delay stationary(u, StationaryDelay{});
  EXPECT_NEAR(stationary.first_period().cdf(0.5), 0.75, 1e-12);
  EXPECT_THROW(Delay(u, FixedAge{1.0}), DomainError);
  const Delay from_json(u, delay_from_json(nlohmann::json{{"kind", "fixed_age"}, {"age", 0.0}}));
  EXPECT_NEAR(from_json.first_period().cdf(0.4), 0.4, 1e-14);
}
