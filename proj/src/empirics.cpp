#include "regenbound/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/distributions/chi_squared.hpp>

#include "regenbound/coupling.hpp"
#include "regenbound/error.hpp"
#include "regenbound/parallel.hpp"
#include "regenbound/random.hpp"

namespace regenbound {

TvEstimate binned_tv(const std::vector<double>& pit, int bins, std::uint64_t seed, int resamples) {
  if (bins < 2) throw InvalidArgument("empirical_tv: bins must be >= 2");
  if (pit.empty()) throw InvalidArgument("empirical_tv: no samples");
  if (static_cast<double>(bins) > static_cast<double>(pit.size()) / 5.0)
    throw InvalidArgument("empirical_tv: under-resolved (bins > samples / 5)");
  const auto cells = static_cast<std::size_t>(bins) + 1;  // last one is overflow
  std::vector<std::int64_t> counts(cells, 0);
  for (double u : pit) {
    std::size_t c;
    if (!(u < 1.0)) {
      c = cells - 1;
    } else {
      c = static_cast<std::size_t>(std::max(0.0, std::floor(u * bins)));
      c = std::min(c, cells - 2);
    }
    ++counts[c];
  }
  const double n = static_cast<double>(pit.size());
  const double ref = 1.0 / bins;
  std::vector<double> phat(cells);
  TvEstimate out;
  out.bins = bins;
  out.n = pit.size();
  for (std::size_t c = 0; c < cells; ++c) {
    phat[c] = static_cast<double>(counts[c]) / n;
    out.estimate += std::abs(phat[c] - (c + 1 == cells ? 0.0 : ref));
  }

  // Multinomial bootstrap by sequential binomials.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<double> dev(static_cast<std::size_t>(std::max(resamples, 1)));
  for (auto& d : dev) {
    auto left = static_cast<std::int64_t>(pit.size());
    double mass_left = 1.0;
    double acc = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      std::int64_t k = 0;
      if (c + 1 == cells || mass_left <= phat[c]) {
        k = left;
      } else if (left > 0 && phat[c] > 0.0) {
        std::binomial_distribution<std::int64_t> bin(left, std::min(1.0, phat[c] / mass_left));
        k = bin(rng);
      }
      left -= k;
      mass_left -= phat[c];
      acc += std::abs(static_cast<double>(k) / n - phat[c]);
    }
    d = acc;
  }
  std::sort(dev.begin(), dev.end());
  const auto idx = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(dev.size()))) - 1;
  out.ci = dev[std::min(idx, dev.size() - 1)];
  return out;
}

TvEstimate empirical_tv(const std::vector<double>& samples, const Distribution& reference, int bins,
                        std::uint64_t seed, int resamples) {
  std::vector<double> pit(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    pit[i] = reference.survival(samples[i]) <= 0.0 ? 1.0 : reference.cdf(samples[i]);
  return binned_tv(pit, bins, seed, resamples);
}

namespace {

KsResult ks_critical(double stat, double n_eff, std::size_t n) {
  return {stat, 1.63 / std::sqrt(n_eff), 1.36 / std::sqrt(n_eff), n};
}

}  // namespace

KsResult ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw InvalidArgument("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return ks_critical(d, n, samples.size());
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample: no samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return ks_critical(d, na * nb / (na + nb), a.size() + b.size());
}

ChiSquareResult chi_square_gof(const std::vector<std::int64_t>& observed, const std::vector<double>& probs,
                               double min_expected) {
  std::vector<double> p = probs;
  if (observed.size() == probs.size() + 1) {
    double s = 0.0;
    for (double x : probs) s += x;
    p.push_back(std::max(0.0, 1.0 - s));
  } else if (observed.size() != probs.size()) {
    throw InvalidArgument("chi_square_gof: observed and probs sizes disagree");
  }
  double n = 0.0;
  for (auto o : observed) n += static_cast<double>(o);
  if (!(n > 0.0)) throw InvalidArgument("chi_square_gof: no observations");

  std::vector<std::pair<double, double>> groups;  // (observed, expected)
  double go = 0.0;
  double ge = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    go += static_cast<double>(observed[i]);
    ge += n * p[i];
    if (ge >= min_expected) {
      groups.emplace_back(go, ge);
      go = ge = 0.0;
    }
  }
  if (go > 0.0 || ge > 0.0) {
    if (groups.empty()) {
      groups.emplace_back(go, ge);
    } else {
      groups.back().first += go;
      groups.back().second += ge;
    }
  }
  ChiSquareResult out;
  out.cells = static_cast<int>(groups.size());
  out.dof = out.cells - 1;
  for (const auto& [o, e] : groups) {
    if (e > 0.0) {
      out.statistic += (o - e) * (o - e) / e;
    } else if (o > 0.0) {
      out.statistic = std::numeric_limits<double>::infinity();
    }
  }
  if (out.dof < 1) {
    out.p_value = 1.0;
  } else if (!std::isfinite(out.statistic)) {
    out.p_value = 0.0;
  } else {
    const boost::math::chi_squared dist(out.dof);
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  }
  return out;
}

std::string bound_column_name(const BoundReport& r) {
  if (r.mode == BoundMode::exponential) return "bound_exp";
  std::ostringstream os;
  os << "bound_poly_k" << r.order;
  return os.str();
}

namespace {

void check_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw InvalidArgument("t grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0)) throw InvalidArgument("t grid values must be >= 0");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw InvalidArgument("t grid must be strictly increasing");
  }
}

// Fill estimates and bounds from per-replica pit values (pit[g][i]).
TvCurve finish_curve(const std::vector<double>& t_grid, const std::vector<std::vector<double>>& pit,
                     std::int64_t n_replicas, std::uint64_t seed, const std::vector<BoundReport>& reports, int bins) {
  TvCurve c;
  c.t = t_grid;
  c.replicas = n_replicas;
  c.bins = bins;
  c.seed = seed;
  for (const auto& r : reports) {
    c.bound_names.push_back(bound_column_name(r));
    c.bound_columns.emplace_back();
  }
  for (std::size_t g = 0; g < t_grid.size(); ++g) {
    const TvEstimate e = binned_tv(pit[g], bins, seed + g);
    c.estimate.push_back(e.estimate);
    c.ci.push_back(e.ci);
    double best = 2.0;
    for (std::size_t r = 0; r < reports.size(); ++r) {
      const double b = reports[r].at(t_grid[g]).clamped;
      c.bound_columns[r].push_back(b);
      best = std::min(best, b);
    }
    c.bound.push_back(best);
  }
  return c;
}

}  // namespace

TvCurve tv_curve(const SplitDecomposition& split, const Delay& delay, const std::vector<double>& t_grid,
                 std::int64_t n_replicas, std::uint64_t seed, const std::vector<BoundReport>& reports, int bins) {
  check_grid(t_grid);
  if (n_replicas < 1) throw InvalidArgument("tv_curve: replicas must be >= 1");
  const Distribution& period = split.period();
  const Distribution& eq = split.equilibrium();
  const auto n = static_cast<std::size_t>(n_replicas);
  std::vector<std::vector<double>> pit(t_grid.size(), std::vector<double>(n));
  const double horizon = t_grid.back();
  parallel_for(n, [&](std::size_t i) {
    const UniformStream stream(seed, Domain::independent, i);
    const RenewalPath path = simulate_renewal_path(period, delay, horizon, stream);
    for (std::size_t g = 0; g < t_grid.size(); ++g) {
      const double age = path.age_at(t_grid[g]);
      pit[g][i] = eq.survival(age) <= 0.0 ? 1.0 : eq.cdf(age);
    }
  });
  return finish_curve(t_grid, pit, n_replicas, seed, reports, bins);
}

TvCurve alt_tv_curve(const AlternatingSpec& spec, const std::vector<double>& t_grid, std::int64_t n_replicas,
                     std::uint64_t seed, const std::vector<BoundReport>& reports, int bins) {
  check_grid(t_grid);
  if (n_replicas < 1) throw InvalidArgument("alt_tv_curve: replicas must be >= 1");
  const double p = effective_occupancy(spec);
  const Distribution e1 = spec.f1.equilibrium();
  const std::optional<Distribution> e2 =
      p < 1.0 ? std::optional<Distribution>(spec.idle_law().equilibrium()) : std::nullopt;
  const auto n = static_cast<std::size_t>(n_replicas);
  std::vector<std::vector<double>> pit(t_grid.size(), std::vector<double>(n));
  const double horizon = t_grid.back();
  parallel_for(n, [&](std::size_t i) {
    const UniformStream stream(seed, Domain::alternating, i);
    const AltPath path = simulate_alt_path(spec, horizon, stream);
    for (std::size_t g = 0; g < t_grid.size(); ++g) {
      const auto [state, age] = path.at(t_grid[g]);
      if (state == 1) {
        pit[g][i] = e1.survival(age) <= 0.0 ? 1.0 : p * e1.cdf(age);
      } else {
        pit[g][i] = (!e2 || e2->survival(age) <= 0.0) ? 1.0 : p + (1.0 - p) * e2->cdf(age);
      }
    }
  });
  return finish_curve(t_grid, pit, n_replicas, seed, reports, bins);
}

std::string TvCurve::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "t,tv_estimate,ci,bound";
  for (const auto& name : bound_names) os << ',' << name;
  os << '\n';
  for (std::size_t g = 0; g < t.size(); ++g) {
    os << t[g] << ',' << estimate[g] << ',' << ci[g] << ',' << bound[g];
    for (const auto& col : bound_columns) os << ',' << col[g];
    os << '\n';
  }
  return os.str();
}

nlohmann::json TvCurve::to_json() const {
  nlohmann::json cols = nlohmann::json::object();
  for (std::size_t r = 0; r < bound_names.size(); ++r) cols[bound_names[r]] = bound_columns[r];
  return {{"t", t},     {"tv_estimate", estimate}, {"ci", ci},     {"bound", bound},
          {"bounds", cols}, {"replicas", replicas}, {"bins", bins}, {"seed", seed}};
}

VerifyReport verify(const TvCurve& curve) {
  VerifyReport r;
  for (std::size_t g = 0; g < curve.t.size(); ++g) {
    const double b = std::min(2.0, curve.bound[g]);
    if (curve.estimate[g] - curve.ci[g] > b) {
      r.ok = false;
      r.violations.push_back({curve.t[g], curve.estimate[g], curve.ci[g], b});
    }
  }
  return r;
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : violations) v.push_back({{"t", x.t}, {"estimate", x.estimate}, {"ci", x.ci}, {"bound", x.bound}});
  return {{"ok", ok}, {"violations", v}};
}

}  // namespace regenbound
