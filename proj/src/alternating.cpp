#include "regenbound/alternating.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/distributions/binomial.hpp>

#include "regenbound/coupling.hpp"
#include "regenbound/error.hpp"
#include "regenbound/parallel.hpp"

namespace regenbound {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_integer(double k) { return k == std::floor(k) && k <= 64.0; }

double binomial(int n, int j) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0)); }

// E (X + Y)^k for independent X, Y given their moment functions. Exact for
// integer k; for other k the bound (x + y)^k <= 2^{k-1} (x^k + y^k).
template <class A, class B>
double sum_moment(double k, A&& mx, B&& my) {
  if (is_integer(k)) {
    const int n = static_cast<int>(k);
    double acc = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double a = j == 0 ? 1.0 : mx(static_cast<double>(j));
      const double b = j == n ? 1.0 : my(static_cast<double>(n - j));
      acc += binomial(n, j) * a * b;
    }
    return acc;
  }
  return std::pow(2.0, k - 1.0) * (mx(k) + my(k));
}

double moment_value(const Distribution& d, double k) { return d.raw_moment(k).value; }

double idle_moment(const AlternatingSpec& spec, double k) {
  if (spec.has_idle_law()) return moment_value(spec.idle_law(), k);
  const auto& b = std::get<IdleBounds>(spec.f2);
  if (k == 1.0) return b.mean_bound;
  if (auto it = b.moment_bounds.find(k); it != b.moment_bounds.end()) return it->second;
  // Lyapunov: E X^j <= (E X^k)^{j/k} for j < k.
  for (const auto& [order, value] : b.moment_bounds)
    if (order > k) return std::pow(value, k / order);
  if (k < 1.0) return std::pow(b.mean_bound, k);
  throw NotAdmissible("idle period: no bound on moment of order " + std::to_string(k));
}

double idle_mgf(const AlternatingSpec& spec, double a) {
  if (spec.has_idle_law()) return spec.idle_law().mgf(a).value;
  const auto& b = std::get<IdleBounds>(spec.f2);
  if (auto it = b.mgf_bounds.find(a); it != b.mgf_bounds.end()) return it->second;
  throw NotAdmissible("idle period: no mgf bound at this rate");
}

double age_given_residual(const Distribution& law, double residual, double u) {
  if (!(law.survival(residual) > 0.0)) return 0.0;
  return law.residual_quantile(residual, u);
}

}  // namespace

const Distribution& AlternatingSpec::idle_law() const {
  if (!has_idle_law()) throw InvalidArgument("alternating: the idle law is not available (bounds-only mode)");
  return std::get<Distribution>(f2);
}

double AlternatingSpec::idle_mean() const {
  if (has_idle_law()) return idle_law().mean();
  return std::get<IdleBounds>(f2).mean_bound;
}

nlohmann::json AlternatingSpec::to_json() const {
  nlohmann::json j = {{"f1", f1.to_json()}, {"initial", {{"state", initial_state}, {"age", initial_age}}}};
  if (has_idle_law()) {
    j["f2"] = idle_law().to_json();
  } else {
    const auto& b = std::get<IdleBounds>(f2);
    nlohmann::json mb = nlohmann::json::object();
    for (const auto& [k, v] : b.moment_bounds) mb[std::to_string(k)] = v;
    nlohmann::json gb = nlohmann::json::object();
    for (const auto& [a, v] : b.mgf_bounds) gb[std::to_string(a)] = v;
    j["f2"] = {{"mean_bound", b.mean_bound}, {"moment_bounds", mb}, {"mgf_bounds", gb}};
  }
  return j;
}

AlternatingSpec AlternatingSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("f1")) throw InvalidArgument("alternating.f1: missing");
  if (!j.contains("f2")) throw InvalidArgument("alternating.f2: missing");
  AlternatingSpec spec{Distribution::from_json(j.at("f1")), Distribution(Exponential{1.0})};
  const auto& f2 = j.at("f2");
  if (f2.is_object() && f2.contains("mean_bound")) {
    IdleBounds b;
    if (!f2.at("mean_bound").is_number()) throw InvalidArgument("alternating.f2.mean_bound: expected a number");
    b.mean_bound = f2.at("mean_bound").get<double>();
    auto read_map = [&](const char* key, std::map<double, double>& out) {
      if (!f2.contains(key)) return;
      for (const auto& [k, v] : f2.at(key).items()) {
        try {
          out[std::stod(k)] = v.get<double>();
        } catch (const std::exception&) {
          throw InvalidArgument(std::string("alternating.f2.") + key + ": bad entry '" + k + "'");
        }
      }
    };
    read_map("moment_bounds", b.moment_bounds);
    read_map("mgf_bounds", b.mgf_bounds);
    spec.f2 = b;
  } else {
    spec.f2 = Distribution::from_json(f2);
  }
  if (j.contains("initial")) {
    const auto& init = j.at("initial");
    if (init.contains("state")) spec.initial_state = init.at("state").get<int>();
    if (init.contains("age")) spec.initial_age = init.at("age").get<double>();
  }
  return spec;
}

void validate(const AlternatingSpec& spec) {
  (void)validate(spec.f1);
  if (spec.initial_state != 1 && spec.initial_state != 2)
    throw InvalidArgument("alternating.initial.state must be 1 or 2");
  if (!(spec.initial_age >= 0.0)) throw InvalidArgument("alternating.initial.age must be >= 0");
  if (spec.has_idle_law()) {
    const Moment m = spec.idle_law().raw_moment(1.0);
    if (!m.finite()) throw ConditionViolated("alternating: idle mean diverges");
  } else {
    const double m2 = std::get<IdleBounds>(spec.f2).mean_bound;
    if (!(std::isfinite(m2) && m2 >= 0.0)) throw InvalidArgument("alternating.f2.mean_bound must be finite and >= 0");
  }
  const Distribution& current = spec.initial_state == 1 ? spec.f1 : spec.idle_law();
  if (!(current.survival(spec.initial_age) > 0.0)) throw DomainError("alternating: initial age beyond support");
}

Occupancy occupancy(const AlternatingSpec& spec) {
  const double mu1 = spec.f1.mean();
  Occupancy out;
  if (spec.has_idle_law()) {
    out.p = mu1 / (mu1 + spec.idle_law().mean());
  } else {
    out.rho = mu1 / (mu1 + std::get<IdleBounds>(spec.f2).mean_bound);
  }
  return out;
}

double effective_occupancy(const AlternatingSpec& spec) {
  const Occupancy o = occupancy(spec);
  return o.p ? *o.p : *o.rho;
}

double first_entry_moment(const AlternatingSpec& spec, double k) {
  if (spec.initial_state == 2) return moment_value(spec.idle_law().overshoot(spec.initial_age), k);
  const Distribution residual = spec.f1.overshoot(spec.initial_age);
  return sum_moment(
      k, [&](double j) { return moment_value(residual, j); }, [&](double j) { return idle_moment(spec, j); });
}

double first_entry_mgf(const AlternatingSpec& spec, double a) {
  if (spec.initial_state == 2) return spec.idle_law().overshoot(spec.initial_age).mgf(a).value;
  return spec.f1.overshoot(spec.initial_age).mgf(a).value * idle_mgf(spec, a);
}

BoundReport alt_polynomial_bound(const AlternatingSpec& spec, const SplitDecomposition& split1, double k) {
  const double occ = effective_occupancy(spec);
  BoundReport r;
  r.mode = BoundMode::polynomial;
  r.order = k;
  r.kappa = occ * split1.kappa();
  r.kappa_error = occ * split1.kappa_error();
  if (!(r.kappa > 0.0)) throw NotAdmissible("alternating: effective coupling probability vanishes");
  r.input0 = first_entry_moment(spec, k);
  r.input1 = sum_moment(
      k, [&](double j) { return moment_value(spec.f1, j); }, [&](double j) { return idle_moment(spec, j); });
  const SeriesSum sum = poly_constant_series(r.kappa, r.input0, r.input1, k);
  r.constant = sum.value();
  r.terms = sum.terms;
  r.tail_bound = sum.tail_bound;
  r.notes.push_back(spec.has_idle_law() ? "kappa is p * kappa(F1)" : "kappa is rho * kappa(F1) (idle bounds only)");
  return r;
}

BoundReport alt_exponential_bound(const AlternatingSpec& spec, const SplitDecomposition& split1, double a) {
  if (!(a > 0.0)) throw InvalidArgument("alternating exponential bound: rate must be positive");
  const double occ = effective_occupancy(spec);
  BoundReport r;
  r.mode = BoundMode::exponential;
  r.order = a;
  r.kappa = occ * split1.kappa();
  r.kappa_error = occ * split1.kappa_error();
  const double m1 = spec.f1.mgf(a).value;
  const double m2 = idle_mgf(spec, a);
  const double p_a = m2 * ((1.0 - occ) * m1 + occ * split1.laplace_psi(a));
  r.input0 = std::isfinite(p_a) ? p_a : std::numeric_limits<double>::infinity();
  r.input1 = first_entry_mgf(spec, a);
  r.constant = exp_constant(p_a, r.input1);
  r.notes.push_back("laplace_psi input is the per-cycle failure transform E e^{a zeta2} (q E e^{a zeta1} + p P_a)");
  return r;
}

AltTrace simulate_alt_coupling(const AlternatingSpec& spec, const SplitDecomposition& split1,
                               const UniformStream& stream, double horizon, std::int64_t max_cycles) {
  const Distribution& f1 = spec.f1;
  const Distribution& f2 = spec.idle_law();
  const double p = effective_occupancy(spec);
  const Distribution e1 = split1.equilibrium();
  const std::optional<Distribution> e2 = p < 1.0 ? std::optional<Distribution>(f2.equilibrium()) : std::nullopt;
  auto law = [&](int state) -> const Distribution& { return state == 1 ? f1 : f2; };

  AltTrace tr;
  tr.replica = stream.replica();
  AltEvent cur;
  cur.y_state = spec.initial_state;
  cur.y_age = spec.initial_age;
  double y_next = law(cur.y_state).residual_quantile(spec.initial_age, stream(0, Slot::U));
  cur.w_state = (p >= 1.0 || stream(0, Slot::U1) < p) ? 1 : 2;
  const double w_res = (cur.w_state == 1 ? e1 : *e2).quantile(stream(0, Slot::U2));
  cur.w_age = age_given_residual(law(cur.w_state), w_res, stream(0, Slot::U3));
  double w_next = w_res;
  tr.initial = cur;

  bool pending = false;
  bool merged = false;
  auto advance = [&](double t) {
    cur.y_age += t - cur.time;
    cur.w_age += t - cur.time;
    cur.time = t;
  };
  constexpr std::int64_t kMaxEvents = 100'000'000;
  for (std::uint64_t n = 1; static_cast<std::int64_t>(n) < kMaxEvents; ++n) {
    if (merged && y_next > horizon) break;
    if (!merged && tr.nu >= max_cycles) break;
    const double u = stream(n, Slot::U);
    if (merged || (pending && y_next == w_next)) {
      advance(y_next);
      if (!merged) {
        merged = true;
        tr.tau = y_next;
      }
      cur.y_state = cur.w_state = 3 - cur.y_state;
      cur.y_age = cur.w_age = 0.0;
      y_next += law(cur.y_state).quantile(u);
      w_next = y_next;
    } else if (w_next < y_next) {
      advance(w_next);
      cur.w_state = 3 - cur.w_state;
      cur.w_age = 0.0;
      w_next += law(cur.w_state).quantile(u);
    } else {
      advance(y_next);
      cur.y_age = 0.0;
      if (cur.y_state == 1) {
        cur.y_state = 2;
        y_next += f2.quantile(u);
      } else {
        // Entry into state 1: coupling attempt.
        cur.y_state = 1;
        ++tr.nu;
        if (stream(n, Slot::Gate) < p) {
          const XiPair pair = sample_xi_pair(split1, u, stream(n, Slot::U1), stream(n, Slot::U2));
          cur.w_state = 1;
          cur.w_age = age_given_residual(f1, pair.xi_tilde, stream(n, Slot::U3));
          w_next = y_next + pair.xi_tilde;
          y_next += pair.xi;
          pending = pair.coincided;
        } else {
          // Prolong the stationary copy through an idle period.
          const double res = e2->quantile(stream(n, Slot::U1));
          cur.w_state = 2;
          cur.w_age = age_given_residual(f2, res, stream(n, Slot::U3));
          w_next = y_next + res;
          y_next += f1.quantile(u);
          pending = false;
        }
      }
    }
    tr.events.push_back(cur);
  }
  tr.valid_until = std::min(y_next, w_next);
  return tr;
}

AltState alt_state_at(const AltTrace& trace, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("alt_state_at: t must be >= 0");
  if (t > trace.valid_until) throw DomainError("alt_state_at: time beyond the simulated horizon");
  auto it = std::upper_bound(trace.events.begin(), trace.events.end(), t,
                             [](double v, const AltEvent& e) { return v < e.time; });
  const AltEvent& e = it == trace.events.begin() ? trace.initial : *std::prev(it);
  const double dt = t - e.time;
  return {e.y_state, e.y_age + dt, e.w_state, e.w_age + dt};
}

nlohmann::json AltTrace::to_json() const {
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& e : events)
    ev.push_back({{"t", e.time}, {"y", e.y_state}, {"w", e.w_state}});
  nlohmann::json j = {{"replica", replica}, {"nu", nu}, {"events", ev}, {"valid_until", valid_until}};
  j["tau"] = tau ? nlohmann::json(*tau) : nlohmann::json(nullptr);
  return j;
}

std::pair<int, double> AltPath::at(double t) const {
  if (t > valid_until) throw DomainError("alternating path: time beyond the simulated horizon");
  auto it = std::upper_bound(epochs.begin(), epochs.end(), t);
  if (it == epochs.begin()) return {initial_state, initial_age + t};
  const auto i = static_cast<std::size_t>(std::distance(epochs.begin(), it)) - 1;
  return {states[i], t - epochs[i]};
}

double AltPath::time_in_state1(double horizon) const {
  double acc = 0.0;
  double start = 0.0;
  int state = initial_state;
  for (std::size_t i = 0; i < epochs.size() && start < horizon; ++i) {
    const double end = std::min(epochs[i], horizon);
    if (state == 1) acc += end - start;
    start = end;
    state = states[i];
  }
  if (start < horizon && state == 1) acc += horizon - start;
  return acc;
}

AltPath simulate_alt_path(const AlternatingSpec& spec, double horizon, const UniformStream& stream) {
  const Distribution& f1 = spec.f1;
  const Distribution& f2 = spec.idle_law();
  AltPath path;
  path.initial_state = spec.initial_state;
  path.initial_age = spec.initial_age;
  int state = spec.initial_state;
  double t = (state == 1 ? f1 : f2).residual_quantile(spec.initial_age, stream(0, Slot::U));
  for (std::uint64_t n = 1;; ++n) {
    state = 3 - state;
    path.epochs.push_back(t);
    path.states.push_back(state);
    if (t > horizon) break;
    t += (state == 1 ? f1 : f2).quantile(stream(n, Slot::U));
  }
  path.valid_until = t;
  return path;
}

Estimate occupancy_estimate(const AlternatingSpec& spec, double horizon, std::int64_t replicas, std::uint64_t seed) {
  if (replicas < 2) throw InvalidArgument("occupancy_estimate: need at least 2 replicas");
  if (!(horizon > 0.0)) throw InvalidArgument("occupancy_estimate: horizon must be positive");
  std::vector<double> frac(static_cast<std::size_t>(replicas));
  parallel_for(frac.size(), [&](std::size_t i) {
    const UniformStream stream(seed, Domain::occupancy, i);
    frac[i] = simulate_alt_path(spec, horizon, stream).time_in_state1(horizon) / horizon;
  });
  double mean = 0.0;
  for (double f : frac) mean += f;
  mean /= static_cast<double>(frac.size());
  double var = 0.0;
  for (double f : frac) var += (f - mean) * (f - mean);
  var /= static_cast<double>(frac.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(frac.size()))};
}

namespace {

// With few expected exceedances the normal approximation behind the 3-SE rule
// breaks down; use the exact binomial upper tail at the same one-sided level.
bool sparse_tail_ok(std::int64_t above, double n_total, double bound) {
  if (n_total * bound >= 10.0 || bound <= 0.0) return false;
  if (bound >= 1.0) return true;
  const boost::math::binomial_distribution<double> law(n_total, bound);
  return boost::math::cdf(boost::math::complement(law, static_cast<double>(above) - 1.0)) >= 0.00135;
}

}  // namespace

AltCheckReport alt_tau_bound_check(const AlternatingSpec& spec, double kappa, const std::vector<double>& tau,
                                   const std::vector<int>& nu) {
  if (tau.empty() || tau.size() != nu.size()) throw InvalidArgument("alt_tau_bound_check: need matching samples");
  AltCheckReport r;
  const double pk = effective_occupancy(spec) * kappa;
  r.coupling_probability = pk;
  const double mu1 = spec.f1.mean();
  const double mu2 = spec.idle_mean();
  r.tau_mean_bound = first_entry_moment(spec, 1.0) + mu1 / pk + (1.0 / pk - 1.0) * mu2;

  double sum = 0.0;
  double sum_sq = 0.0;
  std::int64_t m = 0;
  for (double t : tau) {
    if (std::isnan(t)) {
      ++r.censored;
      continue;
    }
    sum += t;
    sum_sq += t * t;
    ++m;
  }
  if (m > 0) {
    r.tau_mean = sum / static_cast<double>(m);
    const double var = m > 1 ? (sum_sq - sum * r.tau_mean) / static_cast<double>(m - 1) : 0.0;
    r.tau_se = std::sqrt(std::max(var, 0.0) / static_cast<double>(m));
  }
  r.tau_ok = m > 0 && r.tau_mean <= r.tau_mean_bound + 3.0 * r.tau_se;

  const double n_total = static_cast<double>(nu.size());
  r.nu_ok = true;
  for (int n = 0; n <= 20; ++n) {
    std::int64_t above = 0;
    for (std::size_t i = 0; i < nu.size(); ++i)
      if (std::isnan(tau[i]) || nu[i] > n) ++above;
    const double emp = static_cast<double>(above) / n_total;
    const double bound = std::pow(1.0 - pk, n);
    const double se = std::sqrt(bound * (1.0 - bound) / n_total);
    r.nu_tail.push_back(emp);
    r.nu_tail_bound.push_back(bound);
    r.nu_tail_se.push_back(se);
    if (emp > bound + 3.0 * se + 1e-12 && !sparse_tail_ok(above, n_total, bound)) r.nu_ok = false;
  }
  return r;
}

nlohmann::json AltCheckReport::to_json() const {
  return {{"tau_mean", tau_mean},
          {"tau_se", tau_se},
          {"tau_mean_bound", tau_mean_bound},
          {"tau_ok", tau_ok},
          {"coupling_probability", coupling_probability},
          {"nu_tail", nu_tail},
          {"nu_tail_bound", nu_tail_bound},
          {"nu_tail_se", nu_tail_se},
          {"nu_ok", nu_ok},
          {"censored", censored}};
}

}  // namespace regenbound
