#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "regenbound/coupling.hpp"
#include "regenbound/empirics.hpp"
#include "regenbound/error.hpp"

using namespace regenbound;

namespace {

const Distribution kUniform(Uniform{0.0, 1.0});

SplitDecomposition uniform_split() { return compute_split(validate(kUniform)); }

}  // namespace

TEST(PairSampler, Examples) {
  const SplitDecomposition s = uniform_split();
  const XiPair low = sample_xi_pair(s, 0.0, 0.4, 0.9);
  EXPECT_TRUE(low.coincided);
  EXPECT_EQ(low.xi, low.xi_tilde);
  EXPECT_NEAR(low.xi, s.inverse_of(Component::Phi, 0.75 * 0.4), 1e-15);
  const XiPair high = sample_xi_pair(s, 0.9, 0.4, 0.25);
  EXPECT_FALSE(high.coincided);
  EXPECT_NEAR(high.xi, 0.75, 1e-9);

  const SplitDecomposition e = compute_split(validate(Distribution(Exponential{1.0})));
  const XiPair ex = sample_xi_pair(e, 0.999, 0.3, 0.9);
  EXPECT_TRUE(ex.coincided);
  EXPECT_NEAR(ex.xi, -std::log(0.7), 1e-9);
}

TEST(PairSampler, MarginalsAndCoincidence) {
  for (const Distribution& d : {kUniform, Distribution(Gamma{2.0, 1.0})}) {
    const SplitDecomposition s = compute_split(validate(d));
    const UniformStream stream(11, Domain::coupling, 0);
    const int n = 20000;
    std::vector<double> xi(n);
    std::vector<double> xt(n);
    int same = 0;
    for (int i = 0; i < n; ++i) {
      const auto step = static_cast<std::uint64_t>(i);
      const XiPair p = sample_xi_pair(s, stream(step, Slot::U), stream(step, Slot::U1), stream(step, Slot::U2));
      xi[static_cast<std::size_t>(i)] = p.xi;
      xt[static_cast<std::size_t>(i)] = p.xi_tilde;
      same += p.coincided;
    }
    const Distribution eq = s.equilibrium();
    EXPECT_TRUE(ks_statistic(xi, [&](double x) { return d.cdf(x); }).pass_1());
    EXPECT_TRUE(ks_statistic(xt, [&](double x) { return eq.cdf(x); }).pass_1());
    const double k = s.kappa();
    EXPECT_NEAR(static_cast<double>(same) / n, k, 3 * std::sqrt(k * (1 - k) / n));
  }
}

TEST(IndependentPair, StationaryStartHasEquilibriumAge) {
  const Delay delay(kUniform, FixedAge{0.0});
  std::vector<double> z0;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const IndependentPair p = simulate_independent_pair(kUniform, delay, 1e-9, UniformStream(3, Domain::independent, i));
    z0.push_back(p.stationary.initial_age);
  }
  EXPECT_TRUE(ks_statistic(z0, [](double s) { return 2 * s - s * s; }).pass_1());
}

TEST(Coupling, ExponentialMergesAtFirstRenewal) {
  const Distribution e(Exponential{1.0});
  const SplitDecomposition s = compute_split(validate(e));
  const Delay delay(e, FixedAge{0.0});
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const CouplingTrace tr = simulate_coupling(s, delay, UniformStream(5, Domain::coupling, i));
    ASSERT_TRUE(tr.tau.has_value());
    ASSERT_GE(tr.theta.size(), 2u);
    EXPECT_EQ(*tr.tau, tr.theta[1]);
    EXPECT_EQ(tr.attempts, 1);
  }
}

TEST(Coupling, TraceInvariants) {
  const SplitDecomposition s = compute_split(validate(Distribution(Gamma{2.0, 1.0})));
  const Delay delay(s.period(), FixedAge{0.5});
  CouplingOptions opts;
  opts.horizon = 30.0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    const CouplingTrace tr = simulate_coupling(s, delay, UniformStream(9, Domain::coupling, i), opts);
    ASSERT_TRUE(tr.tau.has_value());
    for (std::size_t j = 1; j < tr.events.size(); ++j) EXPECT_LT(tr.events[j - 1].time, tr.events[j].time);
    for (std::size_t j = 1; j < tr.theta.size(); ++j) EXPECT_GE(tr.theta[j], tr.theta[j - 1]);
    const auto first_merge = std::find_if(tr.events.begin(), tr.events.end(),
                                          [](const CouplingEvent& e) { return e.kind == EventCase::coincide; });
    ASSERT_NE(first_merge, tr.events.end());
    EXPECT_EQ(first_merge->time, *tr.tau);
    // Absorption: equal ages at every probe after tau.
    for (double t = *tr.tau; t <= std::min(tr.valid_until, 30.0); t += 0.173) {
      const AgePair a = state_at(tr, t);
      EXPECT_EQ(a.z, a.zt);
    }
    EXPECT_THROW(state_at(tr, tr.valid_until + 1.0), DomainError);
  }
}

TEST(Coupling, StateAtInitialCondition) {
  const SplitDecomposition s = uniform_split();
  const CouplingTrace tr = simulate_coupling(s, Delay(kUniform, FixedAge{0.3}), UniformStream(1, Domain::coupling, 0));
  const AgePair a = state_at(tr, 0.0);
  EXPECT_EQ(a.z, 0.3);
  EXPECT_EQ(a.zt, tr.zt_initial_age);
}

TEST(Coupling, DeterministicPerReplica) {
  const SplitDecomposition s = uniform_split();
  const Delay delay(kUniform, FixedAge{0.0});
  const UniformStream stream(77, Domain::coupling, 12);
  EXPECT_EQ(simulate_coupling(s, delay, stream).to_json(), simulate_coupling(s, delay, stream).to_json());
  const TauSummary a = sample_tau(s, delay, 1, 42);
  const TauSummary b = sample_tau(s, delay, 1, 42);
  EXPECT_EQ(a.tau, b.tau);
}

// Z is never overwritten, so its age at t must match an uncoupled path.
TEST(Coupling, OriginalMarginalPreserved) {
  const SplitDecomposition s = uniform_split();
  const Delay delay(kUniform, FixedAge{0.0});
  const double t = 1.5;
  std::vector<double> coupled;
  std::vector<double> free;
  CouplingOptions opts;
  opts.horizon = t;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const CouplingTrace tr = simulate_coupling(s, delay, UniformStream(21, Domain::coupling, i), opts);
    coupled.push_back(state_at(tr, t).z);
    free.push_back(simulate_renewal_path(kUniform, delay, t, UniformStream(21, Domain::independent, i)).age_at(t));
  }
  EXPECT_TRUE(ks_two_sample(coupled, free).pass_1());
}

TEST(Coupling, StationaryCopyStartsInEquilibrium) {
  const SplitDecomposition s = compute_split(validate(Distribution(Gamma{2.0, 1.0})));
  const Distribution eq = s.equilibrium();
  std::vector<double> zt;
  for (std::uint64_t i = 0; i < 20000; ++i)
    zt.push_back(simulate_coupling(s, Delay(s.period(), FixedAge{0.0}), UniformStream(4, Domain::coupling, i)).zt_initial_age);
  EXPECT_TRUE(ks_statistic(zt, [&](double x) { return eq.cdf(x); }).pass_1());
}

TEST(SampleTau, MeanBelowBoundAndExponentialCase) {
  const SplitDecomposition s = uniform_split();
  const TauSummary t = sample_tau(s, Delay(kUniform, FixedAge{0.0}), 20000, 8, {0.5, 1.0, 2.0});
  EXPECT_EQ(t.censored, 0);
  EXPECT_LE(t.mean, 11.0 / 6 + 3 * t.se);
  EXPECT_GE(t.tail[0], t.tail[1]);
  EXPECT_GE(t.tail[1], t.tail[2]);

  const Distribution e(Exponential{1.0});
  const TauSummary te = sample_tau(compute_split(validate(e)), Delay(e, FixedAge{0.0}), 20000, 8);
  EXPECT_NEAR(te.mean, 2.0, 3 * te.se);
}

TEST(SampleTau, CensoringIsReported) {
  const SplitDecomposition s = uniform_split();
  const TauSummary t = sample_tau(s, Delay(kUniform, FixedAge{0.0}), 2000, 3, {}, 1);
  EXPECT_GT(t.censored, 0);
  EXPECT_EQ(t.tau.size(), 2000u);
}
