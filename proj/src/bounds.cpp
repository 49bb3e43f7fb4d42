#include "regenbound/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "regenbound/error.hpp"
#include "regenbound/numeric.hpp"

namespace regenbound {

using numeric::kInf;

namespace {

constexpr long kMaxSeriesTerms = 100'000'000;

void check_series_inputs(double kappa, double m0k, double m1k, double k) {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw InvalidArgument("poly_constant: kappa must lie in (0, 1]");
  if (!(k >= 1.0)) throw InvalidArgument("poly_constant: k must be >= 1");
  if (!(std::isfinite(m0k) && m0k >= 0.0)) throw NotAdmissible("poly_constant: delay moment diverges");
  if (!(std::isfinite(m1k) && m1k >= 0.0)) throw NotAdmissible("poly_constant: period moment diverges");
}

double series_term(double kappa, double m0k, double m1k, double k, long n) {
  const double q = 1.0 - kappa;
  const double nn = static_cast<double>(n);
  const double geo = n == 1 ? 0.0 : (nn - 1.0) * std::log(q);
  const double a = std::exp((k - 1.0) * std::log(nn + 1.0) + geo);
  const double b = kappa * nn * std::exp((k - 1.0) * std::log(nn + 2.0) + geo);
  return m0k * kappa * a + m1k * (b + a);
}

// Bound on t_{m+1} / t_m valid for every m >= n.
double ratio_bound(double q, double k, long n) {
  const double nn = static_cast<double>(n);
  const double r1 = std::pow((nn + 2.0) / (nn + 1.0), k - 1.0);
  const double r2 = (nn + 1.0) / nn * std::pow((nn + 3.0) / (nn + 2.0), k - 1.0);
  return q * std::max(r1, r2);
}

}  // namespace

const char* to_string(BoundMode m) { return m == BoundMode::polynomial ? "polynomial" : "exponential"; }

SeriesSum poly_constant_series(double kappa, double m0k, double m1k, double k, double rel_tol) {
  check_series_inputs(kappa, m0k, m1k, k);
  SeriesSum out;
  const double q = 1.0 - kappa;
  for (long n = 1; n <= kMaxSeriesTerms; ++n) {
    const double t = series_term(kappa, m0k, m1k, k, n);
    out.partial += t;
    out.terms = static_cast<int>(n);
    if (q == 0.0 || t == 0.0) {
      out.tail_bound = 0.0;
      return out;
    }
    const double r = ratio_bound(q, k, n);
    if (r < 1.0) {
      out.tail_bound = t * r / (1.0 - r);
      if (out.tail_bound <= rel_tol * out.partial) return out;
    }
  }
  throw NotAdmissible("poly_constant: series did not settle within the term budget");
}

double poly_constant(double kappa, double m0k, double m1k, double k) {
  return poly_constant_series(kappa, m0k, m1k, k).value();
}

double poly_constant_partial(double kappa, double m0k, double m1k, double k, int n_terms) {
  check_series_inputs(kappa, m0k, m1k, k);
  double acc = 0.0;
  for (long n = 1; n <= n_terms; ++n) {
    if (n > 1 && kappa == 1.0) break;
    acc += series_term(kappa, m0k, m1k, k, n);
  }
  return acc;
}

double exp_constant(double p_a, double mgf0) {
  if (!(p_a >= 0.0)) throw InvalidArgument("exp_constant: p_a must be >= 0");
  if (!(p_a < 1.0)) throw NotAdmissible("rate not admissible: laplace_psi >= 1");
  if (!std::isfinite(mgf0)) throw NotAdmissible("rate not admissible: delay mgf diverges");
  return p_a * mgf0 / (1.0 - p_a);
}

TvBound tv_bound(BoundMode mode, double constant, double order, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("tv_bound: t must be >= 0");
  double raw = 0.0;
  if (mode == BoundMode::polynomial) {
    raw = t == 0.0 ? (constant > 0.0 ? kInf : 0.0) : 2.0 * constant / std::pow(t, order);
  } else {
    raw = 2.0 * constant * std::exp(-order * t);
  }
  return {raw, std::min(raw, 2.0)};
}

RateChoice find_rate(const SplitDecomposition& split, const Delay& delay, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("find_rate: delta must lie in (0, 1)");
  const Distribution& first = delay.first_period();
  const double abscissa = std::min(split.period().mgf_abscissa(), first.mgf_abscissa());
  if (!(abscissa > 0.0)) throw NotAdmissible("exponential mode unavailable: no finite exponential moment");
  const double level = 1.0 - delta;
  if (split.laplace_psi(0.0) > level) throw NotAdmissible("exponential mode unavailable: kappa below delta");

  auto admissible = [&](double a) { return split.laplace_psi(a) <= level && first.mgf(a).finite(); };

  double lo = 0.0;
  double hi = 0.0;
  std::string limited_by = "laplace_psi";
  if (std::isfinite(abscissa)) {
    const double cap = abscissa * (1.0 - delta);
    if (admissible(cap)) {
      lo = cap;
      hi = cap;
      limited_by = "mgf_abscissa";
    } else {
      hi = cap;
    }
  } else {
    const double start = 1.0 / split.period().scale();
    hi = numeric::grow_until([&](double a) { return !admissible(a); }, start, 60);
    if (!std::isfinite(hi)) {
      lo = hi = start * std::ldexp(1.0, 60);
      limited_by = "search_cap";
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (admissible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!(lo > 0.0)) throw NotAdmissible("exponential mode unavailable: no admissible rate");
  RateChoice out;
  out.a = lo;
  out.p_a = split.laplace_psi(lo);
  out.mgf0 = first.mgf(lo).value;
  out.constant = exp_constant(out.p_a, out.mgf0);
  out.limited_by = limited_by;
  return out;
}

namespace {

double used_kappa(const SplitDecomposition& split, bool widen) {
  if (!widen || split.kappa_error() <= 0.0) return split.kappa();
  return std::max(split.kappa() - split.kappa_error(), split.tolerance());
}

}  // namespace

BoundReport polynomial_bound(const SplitDecomposition& split, const Delay& delay, double k, bool widen) {
  BoundReport r;
  r.mode = BoundMode::polynomial;
  r.order = k;
  r.kappa = used_kappa(split, widen);
  r.kappa_error = split.kappa_error();
  r.input0 = delay.first_period().raw_moment(k).value;
  r.input1 = split.period().raw_moment(k).value;
  const SeriesSum sum = poly_constant_series(r.kappa, r.input0, r.input1, k);
  r.constant = sum.value();
  r.terms = sum.terms;
  r.tail_bound = sum.tail_bound;
  if (widen && r.kappa != split.kappa()) r.notes.push_back("kappa lowered by its error bar");
  return r;
}

BoundReport exponential_bound(const SplitDecomposition& split, const Delay& delay, double a, bool widen) {
  if (!(a > 0.0)) throw InvalidArgument("exponential bound: rate must be positive");
  BoundReport r;
  r.mode = BoundMode::exponential;
  r.order = a;
  r.kappa = split.kappa();
  r.kappa_error = split.kappa_error();
  double p_a = split.laplace_psi(a);
  if (widen) p_a += split.kappa_error();
  const Moment mgf0 = delay.first_period().mgf(a);
  r.input0 = p_a;
  r.input1 = mgf0.value;
  r.constant = exp_constant(p_a, mgf0.value);
  const Moment mgf1 = split.period().mgf(a);
  r.floor_constant = mgf0.value * mgf1.value;
  if (split.trivial())
    r.notes.push_back("kappa = 1: the constant vanishes; floor_constant gives the diagnostic scale");
  return r;
}

BoundReport exponential_bound_auto(const SplitDecomposition& split, const Delay& delay, bool widen) {
  const RateChoice rate = find_rate(split, delay);
  BoundReport r = exponential_bound(split, delay, rate.a, widen);
  r.notes.push_back("rate chosen automatically, limited by " + rate.limited_by);
  return r;
}

nlohmann::json BoundReport::to_json() const {
  nlohmann::json j = {{"mode", to_string(mode)}, {"constant", constant}, {"kappa", kappa},
                      {"kappa_error", kappa_error}};
  if (mode == BoundMode::polynomial) {
    j["k"] = order;
    j["inputs"] = {{"delay_moment", input0}, {"period_moment", input1}};
    j["terms"] = terms;
    j["tail_bound"] = tail_bound;
  } else {
    j["a"] = order;
    j["inputs"] = {{"laplace_psi", input0}, {"delay_mgf", input1}};
    if (floor_constant) j["floor_constant"] = *floor_constant;
  }
  j["notes"] = notes;
  return j;
}

}  // namespace regenbound
