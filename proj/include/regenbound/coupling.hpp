#pragma once

// Successful coupling of a backward renewal process Z (started from a delay)
// with a stationary copy Z~, built from one split decomposition.

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "regenbound/distribution.hpp"
#include "regenbound/random.hpp"
#include "regenbound/splitting.hpp"

namespace regenbound {

struct XiPair {
  double xi = 0.0;        // ~ F
  double xi_tilde = 0.0;  // ~ F~
  bool coincided = false;
};

// Both values come from the same Phi inverse when u < kappa, so a coincided
// pair is bit-identical.
XiPair sample_xi_pair(const SplitDecomposition& split, double u, double u1, double u2);

// Age path of one renewal process: age initial_age + t before the first
// epoch, time since the last epoch afterwards.
struct RenewalPath {
  double initial_age = 0.0;
  std::vector<double> epochs;
  double valid_until = 0.0;

  double age_at(double t) const;
};

// First cycle from the delay, then i.i.d. F cycles, until past `horizon`.
RenewalPath simulate_renewal_path(const Distribution& period, const Delay& delay, double horizon,
                                  const UniformStream& stream);

struct IndependentPair {
  RenewalPath original;
  RenewalPath stationary;
};

IndependentPair simulate_independent_pair(const Distribution& period, const Delay& delay, double horizon,
                                          const UniformStream& stream);

enum class EventCase : int { coincide = 1, stationary_first = 2, original_first = 3 };

const char* to_string(EventCase c);

struct CouplingEvent {
  double time = 0.0;
  EventCase kind = EventCase::original_first;
  // Ages immediately after the event.
  double z_age = 0.0;
  double zt_age = 0.0;
};

struct CouplingTrace {
  std::uint64_t replica = 0;
  double zeta0 = 0.0;
  double z_initial_age = 0.0;
  double zt_initial_age = 0.0;
  std::vector<double> theta;        // renewal epochs of Z
  std::vector<double> theta_tilde;  // renewal epochs of Z~ that took place
  std::vector<CouplingEvent> events;
  std::optional<double> tau;  // empty when censored
  int attempts = 0;           // joint redraws up to and including the coinciding one
  double valid_until = 0.0;

  bool censored() const { return !tau.has_value(); }
  nlohmann::json to_json() const;
};

struct CouplingOptions {
  double horizon = 0.0;         // keep simulating shared epochs up to here after tau
  std::int64_t max_epochs = 1'000'000;
  bool record = true;           // store epochs and events
};

CouplingTrace simulate_coupling(const SplitDecomposition& split, const Delay& delay, const UniformStream& stream,
                                const CouplingOptions& options = {});

struct AgePair {
  double z = 0.0;
  double zt = 0.0;
};

// Throws DomainError past valid_until.
AgePair state_at(const CouplingTrace& trace, double t);

struct TauSummary {
  std::vector<double> tau;  // NaN for censored replicas
  std::vector<int> attempts;
  std::int64_t censored = 0;
  double mean = 0.0;  // over uncensored replicas
  double se = 0.0;
  std::vector<double> tail_grid;
  std::vector<double> tail;     // P{tau > t}, censored replicas counted as > t
  std::vector<double> tail_se;

  nlohmann::json to_json() const;
};

TauSummary sample_tau(const SplitDecomposition& split, const Delay& delay, std::int64_t n_replicas,
                      std::uint64_t seed, const std::vector<double>& tail_grid = {},
                      std::int64_t max_epochs = 1'000'000);

}  // namespace regenbound
