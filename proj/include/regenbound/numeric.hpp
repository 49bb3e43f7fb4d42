#pragma once

// Small numerical kernels shared by the distribution and splitting code:
// adaptive Simpson quadrature, bracket growth and monotone inversion.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace regenbound::numeric {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

template <class F>
double simpson_refine(F& f, double a, double b, double fa, double fm, double fb,
                      double whole, double tol, int depth, double& err) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol ||
      (m - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(m)) {
    err += std::abs(delta) / 15.0;
    return left + right + delta / 15.0;
  }
  return simpson_refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, err) +
         simpson_refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, err);
}

}  // namespace detail

// Adaptive Simpson with Richardson correction on [a, b].
template <class F>
Integral adaptive_simpson(F&& f, double a, double b, double abs_tol, int max_depth = 40) {
  if (!(b > a)) return {};
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  Integral out;
  out.value = detail::simpson_refine(f, a, b, fa, fm, fb, whole, abs_tol, max_depth, out.error);
  return out;
}

// Sums adaptive Simpson over consecutive knots; the integrand only has to be
// smooth between knots. The tolerance is split evenly over the pieces.
template <class F>
Integral integrate_pieces(F&& f, std::span<const double> knots, double abs_tol) {
  Integral total;
  if (knots.size() < 2) return total;
  const double piece_tol = abs_tol / static_cast<double>(knots.size() - 1);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const Integral part = adaptive_simpson(f, knots[i], knots[i + 1], piece_tol);
    total.value += part.value;
    total.error += part.error;
  }
  return total;
}

// Sorted, de-duplicated knot list restricted to [lo, hi], always containing
// both ends. Long ranges get extra geometric knots so Simpson never has to
// bisect its way down from a huge initial panel.
inline std::vector<double> make_knots(std::vector<double> interior, double lo, double hi,
                                      double scale) {
  std::vector<double> knots{lo, hi};
  for (double x : interior) {
    if (x > lo && x < hi) knots.push_back(x);
  }
  if (scale > 0.0 && std::isfinite(hi)) {
    for (double x = lo + scale; x < hi; x = lo + 2.0 * (x - lo)) knots.push_back(x);
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  return knots;
}

// Smallest start * 2^j (j >= 0) satisfying pred, or +inf if none within the
// doubling budget.
template <class P>
double grow_until(P&& pred, double start, int max_doublings = 200) {
  double x = start;
  for (int i = 0; i <= max_doublings; ++i, x *= 2.0) {
    if (pred(x)) return x;
  }
  return kInf;
}

// inf{x in (lo, hi] : g(x) >= y} for nondecreasing g with g(lo) < y <= g(hi).
// Safeguarded Newton: takes the derivative step when it stays inside the
// bracket and falls back to bisection otherwise. dg may return NaN to force
// bisection.
template <class G, class D>
double invert_nondecreasing(G&& g, D&& dg, double y, double lo, double hi, double x_tol) {
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    if (hi - lo <= x_tol) break;
    const double gx = g(x);
    if (gx >= y) {
      hi = x;
    } else {
      lo = x;
    }
    const double slope = dg(x);
    double next = x;
    if (std::isfinite(slope) && slope > 0.0) next = x - (gx - y) / slope;
    if (!(next > lo && next < hi) || next == x) {
      next = 0.5 * (lo + hi);
    } else if (std::abs(next - x) <= 0.5 * x_tol) {
      // Newton has converged; probe just either side to close the bracket.
      const double below = std::max(lo, next - 0.5 * x_tol);
      const double above = std::min(hi, next + 0.5 * x_tol);
      if (g(above) >= y) hi = above;
      if (g(below) < y) lo = below;
      next = 0.5 * (lo + hi);
    }
    x = next;
  }
  return hi;
}

}  // namespace regenbound::numeric
