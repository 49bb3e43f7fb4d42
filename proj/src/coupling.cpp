#include "regenbound/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regenbound/error.hpp"
#include "regenbound/parallel.hpp"

namespace regenbound {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Age given the residual time, i.e. a draw from F_residual. Guards the
// measure-zero case of a residual at the very end of the support.
double age_given_residual(const Distribution& period, double residual, double u) {
  if (!(period.survival(residual) > 0.0)) return 0.0;
  return period.residual_quantile(residual, u);
}

double age_from(double t, double initial_age, const std::vector<double>& epochs) {
  auto it = std::upper_bound(epochs.begin(), epochs.end(), t);
  if (it == epochs.begin()) return initial_age + t;
  return t - *std::prev(it);
}

}  // namespace

XiPair sample_xi_pair(const SplitDecomposition& split, double u, double u1, double u2) {
  if (u < split.kappa()) {
    const double x = split.inverse_of(Component::Phi, split.kappa() * u1);
    return {x, x, true};
  }
  return {split.inverse_of(Component::Psi, split.mass(Component::Psi) * u2),
          split.inverse_of(Component::PsiTilde, split.mass(Component::PsiTilde) * u2), false};
}

double RenewalPath::age_at(double t) const {
  if (t > valid_until) throw DomainError("age_at: time beyond the simulated horizon");
  return age_from(t, initial_age, epochs);
}

RenewalPath simulate_renewal_path(const Distribution& period, const Delay& delay, double horizon,
                                  const UniformStream& stream) {
  RenewalPath path;
  double theta = delay.first_period().quantile(stream(0, Slot::U));
  path.initial_age = delay.initial_age(theta, stream(0, Slot::U3));
  path.epochs.push_back(theta);
  for (std::uint64_t i = 1; theta <= horizon; ++i) {
    theta += period.quantile(stream(i, Slot::U));
    path.epochs.push_back(theta);
  }
  path.valid_until = theta;
  return path;
}

IndependentPair simulate_independent_pair(const Distribution& period, const Delay& delay, double horizon,
                                          const UniformStream& stream) {
  IndependentPair out;
  out.original = simulate_renewal_path(period, delay, horizon, stream);
  RenewalPath& st = out.stationary;
  double theta = period.equilibrium().quantile(stream(0, Slot::U1));
  st.initial_age = age_given_residual(period, theta, stream(0, Slot::U2));
  st.epochs.push_back(theta);
  for (std::uint64_t i = 1; theta <= horizon; ++i) {
    theta += period.quantile(stream(i, Slot::U1));
    st.epochs.push_back(theta);
  }
  st.valid_until = theta;
  return out;
}

const char* to_string(EventCase c) {
  switch (c) {
    case EventCase::coincide:
      return "coincide";
    case EventCase::stationary_first:
      return "stationary_first";
    case EventCase::original_first:
      return "original_first";
  }
  return "?";
}

CouplingTrace simulate_coupling(const SplitDecomposition& split, const Delay& delay, const UniformStream& stream,
                                const CouplingOptions& options) {
  const Distribution& period = split.period();
  CouplingTrace tr;
  tr.replica = stream.replica();

  // Basis.
  double theta = delay.first_period().quantile(stream(0, Slot::U));
  double theta_t = split.equilibrium().quantile(stream(0, Slot::U1));
  tr.zeta0 = theta;
  tr.z_initial_age = delay.initial_age(theta, stream(0, Slot::U3));
  tr.zt_initial_age = age_given_residual(period, theta_t, stream(0, Slot::U2));

  bool pending = false;  // the last joint redraw coincided
  bool merged = false;
  std::int64_t epochs = 0;
  for (std::uint64_t n = 1;; ++n) {
    if (merged && theta > options.horizon) break;
    if (epochs >= options.max_epochs) break;
    ++epochs;
    const double u = stream(n, Slot::U);
    if (merged || (pending && theta == theta_t)) {
      // Case 1: common renewal, shared draws from here on.
      if (!merged) {
        merged = true;
        tr.tau = theta;
      }
      if (options.record) {
        tr.theta.push_back(theta);
        tr.theta_tilde.push_back(theta);
        tr.events.push_back({theta, EventCase::coincide, 0.0, 0.0});
      }
      theta += period.quantile(u);
      theta_t = theta;
    } else if (theta_t < theta) {
      // Case 2: the stationary copy renews alone.
      if (options.record) {
        tr.theta_tilde.push_back(theta_t);
        const double z = tr.events.empty() ? tr.z_initial_age + theta_t
                                           : tr.events.back().z_age + (theta_t - tr.events.back().time);
        tr.events.push_back({theta_t, EventCase::stationary_first, z, 0.0});
      }
      theta_t += period.quantile(u);
    } else {
      // Case 3 (also exact ties without a pending coincidence): joint redraw;
      // the stationary schedule is overwritten.
      const XiPair pair = sample_xi_pair(split, u, stream(n, Slot::U1), stream(n, Slot::U2));
      ++tr.attempts;
      if (options.record) {
        tr.theta.push_back(theta);
        const double zt = age_given_residual(period, pair.xi_tilde, stream(n, Slot::U3));
        tr.events.push_back({theta, EventCase::original_first, 0.0, zt});
      }
      theta_t = theta + pair.xi_tilde;
      theta += pair.xi;
      pending = pair.coincided;
    }
  }
  tr.valid_until = std::min(theta, theta_t);
  return tr;
}

AgePair state_at(const CouplingTrace& trace, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("state_at: t must be >= 0");
  if (t > trace.valid_until) throw DomainError("state_at: time beyond the simulated horizon");
  auto it = std::upper_bound(trace.events.begin(), trace.events.end(), t,
                             [](double v, const CouplingEvent& e) { return v < e.time; });
  if (it == trace.events.begin()) return {trace.z_initial_age + t, trace.zt_initial_age + t};
  const CouplingEvent& e = *std::prev(it);
  return {e.z_age + (t - e.time), e.zt_age + (t - e.time)};
}

nlohmann::json CouplingTrace::to_json() const {
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : events) ev.push_back({{"t", e.time}, {"case", static_cast<int>(e.kind)}});
  nlohmann::json j = {{"replica", replica},
                      {"zeta0", zeta0},
                      {"z_initial_age", z_initial_age},
                      {"zt_initial_age", zt_initial_age},
                      {"theta", theta},
                      {"theta_tilde", theta_tilde},
                      {"events", ev},
                      {"attempts", attempts},
                      {"valid_until", valid_until}};
  j["tau"] = tau ? nlohmann::json(*tau) : nlohmann::json(nullptr);
  return j;
}

TauSummary sample_tau(const SplitDecomposition& split, const Delay& delay, std::int64_t n_replicas,
                      std::uint64_t seed, const std::vector<double>& tail_grid, std::int64_t max_epochs) {
  if (n_replicas < 1) throw InvalidArgument("sample_tau: n_replicas must be >= 1");
  TauSummary out;
  const auto n = static_cast<std::size_t>(n_replicas);
  out.tau.assign(n, kNaN);
  out.attempts.assign(n, 0);
  CouplingOptions opts;
  opts.record = false;
  opts.max_epochs = max_epochs;
  parallel_for(n, [&](std::size_t i) {
    const UniformStream stream(seed, Domain::coupling, i);
    const CouplingTrace tr = simulate_coupling(split, delay, stream, opts);
    if (tr.tau) out.tau[i] = *tr.tau;
    out.attempts[i] = tr.attempts;
  });

  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t m = 0;
  for (double t : out.tau) {
    if (std::isnan(t)) {
      ++out.censored;
      continue;
    }
    sum += t;
    sum_sq += t * t;
    ++m;
  }
  if (m > 0) {
    out.mean = sum / static_cast<double>(m);
    const double var = m > 1 ? (sum_sq - sum * out.mean) / static_cast<double>(m - 1) : 0.0;
    out.se = std::sqrt(std::max(var, 0.0) / static_cast<double>(m));
  }
  out.tail_grid = tail_grid;
  for (double g : tail_grid) {
    std::int64_t above = 0;
    for (double t : out.tau)
      if (std::isnan(t) || t > g) ++above;
    const double p = static_cast<double>(above) / static_cast<double>(n);
    out.tail.push_back(p);
    out.tail_se.push_back(std::sqrt(p * (1.0 - p) / static_cast<double>(n)));
  }
  return out;
}

nlohmann::json TauSummary::to_json() const {
  return {{"replicas", tau.size()}, {"censored", censored}, {"mean", mean}, {"se", se},
          {"tail_grid", tail_grid}, {"tail", tail},         {"tail_se", tail_se}};
}

}  // namespace regenbound
