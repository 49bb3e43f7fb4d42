#pragma once

// Estimators used to check simulations against the theory: binned total
// variation with a bootstrap interval, Kolmogorov-Smirnov, chi-square, and
// the TV-versus-bound curve.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "regenbound/alternating.hpp"
#include "regenbound/bounds.hpp"
#include "regenbound/distribution.hpp"
#include "regenbound/splitting.hpp"

namespace regenbound {

struct TvEstimate {
  double estimate = 0.0;  // sum |p_i - 1/bins|, in [0, 2]
  double ci = 0.0;        // 99% bootstrap half-width
  int bins = 0;
  std::size_t n = 0;
};

// `pit` holds reference-cdf values of the samples; values >= 1 land in an
// overflow cell that has reference mass zero.
TvEstimate binned_tv(const std::vector<double>& pit, int bins, std::uint64_t seed = 0, int resamples = 200);

TvEstimate empirical_tv(const std::vector<double>& samples, const Distribution& reference, int bins = 50,
                        std::uint64_t seed = 0, int resamples = 200);

struct KsResult {
  double statistic = 0.0;
  double critical_1 = 0.0;
  double critical_5 = 0.0;
  std::size_t n = 0;

  bool pass_1() const { return statistic < critical_1; }
  bool pass_5() const { return statistic < critical_5; }
};

KsResult ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int cells = 0;  // after pooling
};

// Goodness of fit of observed counts against cell probabilities (which need
// not sum to one; the remainder forms an extra cell). Trailing cells with
// expected count below `min_expected` are pooled.
ChiSquareResult chi_square_gof(const std::vector<std::int64_t>& observed, const std::vector<double>& probs,
                               double min_expected = 5.0);

struct TvCurve {
  std::vector<double> t;
  std::vector<double> estimate;
  std::vector<double> ci;
  std::vector<double> bound;  // tightest clamped bound over the columns
  std::vector<std::string> bound_names;
  std::vector<std::vector<double>> bound_columns;  // clamped, one per report
  std::int64_t replicas = 0;
  int bins = 0;
  std::uint64_t seed = 0;

  std::string to_csv() const;
  nlohmann::json to_json() const;
};

// Column name for a report: bound_poly_k<k> or bound_exp.
std::string bound_column_name(const BoundReport& r);

// Ages B_t of independent (uncoupled) renewal paths from `delay`, binned
// against the equilibrium law, with the reports' bounds attached.
TvCurve tv_curve(const SplitDecomposition& split, const Delay& delay, const std::vector<double>& t_grid,
                 std::int64_t n_replicas, std::uint64_t seed, const std::vector<BoundReport>& reports, int bins = 50);

// Same for the alternating process: (state, age) against its stationary law,
// mapped to [0, 1) as p F~1(age) in state 1 and p + q F~2(age) in state 2.
TvCurve alt_tv_curve(const AlternatingSpec& spec, const std::vector<double>& t_grid, std::int64_t n_replicas,
                     std::uint64_t seed, const std::vector<BoundReport>& reports, int bins = 50);

struct Violation {
  double t = 0.0;
  double estimate = 0.0;
  double ci = 0.0;
  double bound = 0.0;
};

struct VerifyReport {
  bool ok = true;
  std::vector<Violation> violations;

  nlohmann::json to_json() const;
};

// Per grid point: estimate - ci <= min(2, bound).
VerifyReport verify(const TvCurve& curve);

}  // namespace regenbound
