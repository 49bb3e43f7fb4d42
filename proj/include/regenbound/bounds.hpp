#pragma once

// Convergence-rate constants and the total-variation bounds built on them.
//
//   polynomial:  ||P_t - P||  <=  2 C / t^k
//   exponential: ||P_t - P||  <=  2 C' e^{-a t}

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "regenbound/distribution.hpp"
#include "regenbound/splitting.hpp"

namespace regenbound {

enum class BoundMode { polynomial, exponential };

const char* to_string(BoundMode m);

struct SeriesSum {
  double partial = 0.0;     // sum of the first `terms` terms
  double tail_bound = 0.0;  // certified bound on the remainder
  int terms = 0;

  double value() const { return partial + tail_bound; }
};

// C = m0k kappa sum_n (n+1)^{k-1} q^{n-1}
//   + m1k sum_n (kappa n (n+2)^{k-1} + (n+1)^{k-1}) q^{n-1},   q = 1 - kappa,
// summed until the certified tail drops below rel_tol times the partial sum.
SeriesSum poly_constant_series(double kappa, double m0k, double m1k, double k, double rel_tol = 1e-11);
double poly_constant(double kappa, double m0k, double m1k, double k);
// Partial sum of the same series over exactly n_terms terms.
double poly_constant_partial(double kappa, double m0k, double m1k, double k, int n_terms);

// p_a mgf0 / (1 - p_a). Throws NotAdmissible when p_a >= 1 or mgf0 diverges.
double exp_constant(double p_a, double mgf0);

struct TvBound {
  double raw = 0.0;
  double clamped = 0.0;  // min(raw, 2)
};

// `order` is k for the polynomial mode and a for the exponential one.
TvBound tv_bound(BoundMode mode, double constant, double order, double t);

struct RateChoice {
  double a = 0.0;
  double p_a = 0.0;
  double mgf0 = 1.0;
  double constant = 0.0;
  std::string limited_by;  // "laplace_psi" or "mgf_abscissa"
};

// Largest a (to bisection accuracy) with laplace_psi(a) <= 1 - delta and a
// finite delay mgf. Throws NotAdmissible("exponential mode unavailable") for
// heavy tails.
RateChoice find_rate(const SplitDecomposition& split, const Delay& delay, double delta = 1e-3);

struct BoundReport {
  BoundMode mode = BoundMode::polynomial;
  double order = 1.0;  // k or a
  double constant = 0.0;
  double kappa = 1.0;
  double kappa_error = 0.0;
  // Polynomial: m0k, m1k. Exponential: p_a, mgf0.
  double input0 = 0.0;
  double input1 = 0.0;
  int terms = 0;
  double tail_bound = 0.0;
  // Exponential mode only: E e^{a zeta_0} E e^{a zeta_1}, a diagnostic scale
  // that stays positive when the constant itself is zero.
  std::optional<double> floor_constant;
  std::vector<std::string> notes;

  TvBound at(double t) const { return tv_bound(mode, constant, order, t); }
  nlohmann::json to_json() const;
};

// With `widen`, kappa is lowered by its error bar (and p_a raised by it) so
// that the constant can only grow.
BoundReport polynomial_bound(const SplitDecomposition& split, const Delay& delay, double k, bool widen = false);
BoundReport exponential_bound(const SplitDecomposition& split, const Delay& delay, double a, bool widen = false);
BoundReport exponential_bound_auto(const SplitDecomposition& split, const Delay& delay, bool widen = false);

}  // namespace regenbound
