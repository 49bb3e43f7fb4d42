#pragma once

// Regeneration-period laws on [0, inf): parametric families, tabulated CDFs,
// and the two derived laws the coupling needs (equilibrium and overshoot).

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace regenbound {

struct Exponential {
  double rate = 1.0;
};

struct Gamma {
  double shape = 1.0;
  double rate = 1.0;
};

struct Weibull {
  double shape = 1.0;
  double scale = 1.0;
};

struct Uniform {
  double lo = 0.0;
  double hi = 1.0;
};

struct HyperExponential {
  std::vector<double> weights;
  std::vector<double> rates;
};

// One breakpoint of a tabulated CDF: `left` is F(s-), `right` is F(s). They
// differ only where the law puts an atom at s.
struct CdfPoint {
  double s = 0.0;
  double left = 0.0;
  double right = 0.0;
};

enum class TailKind { none, exponential, pareto };

// Continuation of a tabulated CDF past its last breakpoint when F has not yet
// reached 1 there. Exponential: 1-F decays at `parameter` (rate). Pareto:
// 1-F ~ s^-parameter.
struct TabulatedTail {
  TailKind kind = TailKind::none;
  double parameter = 0.0;
};

// Piecewise-linear CDF between breakpoints.
struct Tabulated {
  std::vector<CdfPoint> points;
  TabulatedTail tail;
};

using DistributionSpec =
    std::variant<Exponential, Gamma, Weibull, Uniform, HyperExponential, Tabulated>;

struct Atom {
  double at = 0.0;
  double mass = 0.0;
};

// A moment-type quantity; `value` is +inf when the integral diverges.
struct Moment {
  double value = 0.0;
  double abs_error = 0.0;

  bool finite() const { return std::isfinite(value); }
};

namespace detail {
class DistributionNode;
}

// Immutable handle to a law on [0, inf). Cheap to copy; safe to share across
// threads.
class Distribution {
 public:
  // Checks the type invariants of `spec`; throws InvalidArgument.
  explicit Distribution(DistributionSpec spec);

  static Distribution from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::string describe() const;

  double cdf(double s) const;
  double survival(double s) const;
  // a.e. derivative of the CDF; empty at breakpoints and atoms.
  std::optional<double> density(double s) const;
  // Generalized inverse inf{x : F(x) >= y}, y in [0, 1).
  double quantile(double y) const;
  // Quantile of the overshoot law F_age without building the derived node.
  double residual_quantile(double age, double y) const;
  // Integral of 1 - F over [0, s].
  double integrated_survival(double s) const;

  Moment raw_moment(double k) const;
  Moment mgf(double a) const;
  // sup{a : E e^{a zeta} < inf}; zero for heavy tails, +inf for light ones.
  double mgf_abscissa() const;
  double mean() const;

  double continuous_mass_above(double s) const;
  double absolutely_continuous_mass() const { return continuous_mass_above(0.0); }
  std::vector<Atom> atoms() const;
  // Interior points where the CDF may fail to be smooth (kinks, atoms,
  // support edges).
  std::vector<double> breakpoints() const;
  double support_end() const;
  double scale() const;

  // F~(s) = int_0^s (1 - F(u)) du / mu. Requires a finite mean.
  Distribution equilibrium() const;
  // F_a(s) = (F(s + a) - F(a)) / (1 - F(a)). Requires F(a) < 1.
  Distribution overshoot(double age) const;

  bool is_exponential() const;

 protected:
  explicit Distribution(std::shared_ptr<const detail::DistributionNode> node);

  std::shared_ptr<const detail::DistributionNode> node_;

  friend class detail::DistributionNode;
};

// A law that satisfies the regularity the coupling needs: a nontrivial
// absolutely continuous component and a finite mean.
class ValidatedDistribution : public Distribution {
 public:
  double mean() const { return mean_; }

 private:
  ValidatedDistribution(const Distribution& d, double mean) : Distribution(d), mean_(mean) {}

  double mean_;

  friend ValidatedDistribution validate(const Distribution& d);
};

// Throws ConditionViolated when the absolutely continuous mass is zero or the
// mean diverges.
ValidatedDistribution validate(const Distribution& d);
inline ValidatedDistribution validate(const DistributionSpec& spec) {
  return validate(Distribution(spec));
}

struct MomentSummary {
  double mean = 0.0;
  std::map<double, Moment> raw_moments;
  std::map<double, Moment> mgf_values;
};

MomentSummary summarize_moments(const Distribution& d, const std::vector<double>& ks,
                                const std::vector<double>& rates);

// --- Delay (first cycle) -------------------------------------------------

// The process starts at age `age` inside a period of law F, so the first
// renewal arrives after an overshoot draw from F_age.
struct FixedAge {
  double age = 0.0;
};

// The first renewal arrives after a draw from an arbitrary law; age 0 at t=0.
struct DelayLaw {
  Distribution law;
};

// The process starts in equilibrium: first renewal ~ F~, age drawn from the
// overshoot law at that residual.
struct StationaryDelay {};

using DelaySpec = std::variant<FixedAge, DelayLaw, StationaryDelay>;

// A delay resolved against a period law.
class Delay {
 public:
  Delay(const Distribution& period, DelaySpec spec);

  const Distribution& first_period() const { return first_; }
  const DelaySpec& spec() const { return spec_; }
  // Age at t = 0 given the first-period draw and a spare uniform.
  double initial_age(double first_period, double u) const;
  nlohmann::json to_json() const;

 private:
  Distribution period_;
  DelaySpec spec_;
  Distribution first_;
};

DelaySpec delay_from_json(const nlohmann::json& j);

}  // namespace regenbound
