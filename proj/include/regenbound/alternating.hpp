#pragma once

// Alternating renewal processes: periods in state 1 (law F1) and state 2
// (law F2) alternate. Coupling is attempted each time the original process
// enters state 1.

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "regenbound/bounds.hpp"
#include "regenbound/distribution.hpp"
#include "regenbound/random.hpp"
#include "regenbound/splitting.hpp"

namespace regenbound {

// What is known about F2 when its law is not: an upper bound m2 on the mean,
// optionally bounds on higher moments E zeta^k and on E e^{a zeta}.
struct IdleBounds {
  double mean_bound = 0.0;
  std::map<double, double> moment_bounds;
  std::map<double, double> mgf_bounds;
};

struct AlternatingSpec {
  Distribution f1;
  std::variant<Distribution, IdleBounds> f2;
  int initial_state = 1;
  double initial_age = 0.0;

  bool has_idle_law() const { return std::holds_alternative<Distribution>(f2); }
  const Distribution& idle_law() const;
  // mu2 for a full law, m2 otherwise.
  double idle_mean() const;

  nlohmann::json to_json() const;
  static AlternatingSpec from_json(const nlohmann::json& j);
};

// Checks F1 against the coupling regularity and the initial condition.
void validate(const AlternatingSpec& spec);

struct Occupancy {
  std::optional<double> p;    // mu1 / (mu1 + mu2)
  std::optional<double> rho;  // mu1 / (mu1 + m2)
};

Occupancy occupancy(const AlternatingSpec& spec);
// p when the idle law is known, rho otherwise.
double effective_occupancy(const AlternatingSpec& spec);

// Raw moment of the time until the original process first enters state 1.
double first_entry_moment(const AlternatingSpec& spec, double k);
double first_entry_mgf(const AlternatingSpec& spec, double a);

// Constants for the alternating process. Polynomial: series with kappa
// replaced by p kappa and the period moments by those of one full cycle.
// Exponential: p'_a = E e^{a zeta2} (q E e^{a zeta1} + p P_a) replaces P_a.
BoundReport alt_polynomial_bound(const AlternatingSpec& spec, const SplitDecomposition& split1, double k);
BoundReport alt_exponential_bound(const AlternatingSpec& spec, const SplitDecomposition& split1, double a);

struct AltEvent {
  double time = 0.0;
  int y_state = 1;
  double y_age = 0.0;
  int w_state = 1;  // stationary copy
  double w_age = 0.0;
};

struct AltTrace {
  std::uint64_t replica = 0;
  AltEvent initial;
  std::vector<AltEvent> events;
  std::optional<double> tau;
  int nu = 0;  // coupling attempts up to and including the successful one
  double valid_until = 0.0;

  bool censored() const { return !tau.has_value(); }
  nlohmann::json to_json() const;
};

struct AltState {
  int y_state = 1;
  double y_age = 0.0;
  int w_state = 1;
  double w_age = 0.0;
};

AltTrace simulate_alt_coupling(const AlternatingSpec& spec, const SplitDecomposition& split1,
                               const UniformStream& stream, double horizon = 0.0,
                               std::int64_t max_cycles = 1'000'000);
AltState alt_state_at(const AltTrace& trace, double t);

// Uncoupled original process: transition epochs and the state entered at each.
struct AltPath {
  int initial_state = 1;
  double initial_age = 0.0;
  std::vector<double> epochs;
  std::vector<int> states;
  double valid_until = 0.0;

  std::pair<int, double> at(double t) const;
  double time_in_state1(double horizon) const;
};

AltPath simulate_alt_path(const AlternatingSpec& spec, double horizon, const UniformStream& stream);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

// Mean fraction of [0, horizon] spent in state 1 over independent replicas.
Estimate occupancy_estimate(const AlternatingSpec& spec, double horizon, std::int64_t replicas, std::uint64_t seed);

struct AltCheckReport {
  double tau_mean = 0.0;
  double tau_se = 0.0;
  double tau_mean_bound = 0.0;
  bool tau_ok = false;
  double coupling_probability = 0.0;  // p kappa (rho kappa without an idle law)
  std::vector<double> nu_tail;        // P{nu > n}, n = 0..20
  std::vector<double> nu_tail_bound;  // (1 - p kappa)^n
  std::vector<double> nu_tail_se;
  bool nu_ok = false;
  std::int64_t censored = 0;

  bool ok() const { return tau_ok && nu_ok; }
  nlohmann::json to_json() const;
};

// E tau <= E theta'_1 + mu1 / (p kappa) + (1 / (p kappa) - 1) mu2, and
// P{nu > n} <= (1 - p kappa)^n, each with 3-SE slack.
AltCheckReport alt_tau_bound_check(const AlternatingSpec& spec, double kappa, const std::vector<double>& tau,
                                   const std::vector<int>& nu);

}  // namespace regenbound
