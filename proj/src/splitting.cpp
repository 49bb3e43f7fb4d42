#include "regenbound/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "regenbound/error.hpp"
#include "regenbound/numeric.hpp"

namespace regenbound {

using numeric::kInf;

namespace {

constexpr int kSamplesPerPiece = 256;
constexpr double kTieRel = 1e-12;

double density_or(const Distribution& d, double s, double fallback) {
  const auto f = d.density(s);
  return f ? *f : fallback;
}

// Sign of F' - F~' at s, zero on (numerical) ties.
int density_sign(const Distribution& f, const Distribution& g, double s) {
  const double a = density_or(f, s, 0.0);
  const double b = density_or(g, s, 0.0);
  const double diff = a - b;
  if (std::abs(diff) <= kTieRel * std::max(a, b)) return 0;
  return diff > 0.0 ? 1 : -1;
}

// Sign changes of F' - F~' strictly inside (lo, hi), each located by bisection.
void find_crossings(const Distribution& f, const Distribution& g, double lo, double hi,
                    std::vector<double>& out) {
  std::vector<double> xs;
  const double width = hi - lo;
  for (int j = 0; j < kSamplesPerPiece; ++j) xs.push_back(lo + width * (j + 0.5) / kSamplesPerPiece);
  // Densities may blow up at the left end of a piece; probe geometrically.
  for (int m = 10; m <= 40; ++m) xs.push_back(lo + width * std::ldexp(1.0, -m));
  std::sort(xs.begin(), xs.end());

  double prev_x = xs.front();
  int prev_sign = density_sign(f, g, prev_x);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const int sign = density_sign(f, g, xs[i]);
    if (sign == 0) continue;
    if (prev_sign != 0 && sign != prev_sign) {
      double a = prev_x;
      double b = xs[i];
      for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, b); ++it) {
        const double m = 0.5 * (a + b);
        const int sm = density_sign(f, g, m);
        if (sm == prev_sign) {
          a = m;
        } else if (sm == sign) {
          b = m;
        } else {
          a = b = m;
        }
      }
      out.push_back(0.5 * (a + b));
    }
    prev_x = xs[i];
    prev_sign = sign;
  }
}

double atom_at(const std::vector<Atom>& atoms, double s) {
  for (const Atom& a : atoms)
    if (a.at == s) return a.mass;
  return 0.0;
}

const char* branch_name(Branch b) { return b == Branch::period_min ? "period_min" : "equilibrium_min"; }

}  // namespace

double phi_at(const Distribution& d, double s) {
  if (s < 0.0) return 0.0;
  const auto f = d.density(s);
  if (!f) return 0.0;
  const auto g = d.equilibrium().density(s);
  if (!g) return 0.0;
  return std::min(*f, *g);
}

SplitDecomposition compute_split(const ValidatedDistribution& d, double tol) {
  if (!(tol > 0.0)) throw InvalidArgument("split tolerance must be positive");
  SplitDecomposition out(d, d.equilibrium());
  out.tol_ = tol;
  const Distribution& f = out.period_;
  const Distribution& g = out.equilibrium_;

  if (f.is_exponential()) {
    out.cells_.push_back({0.0, kInf, Branch::period_min, 0.0, 0.0, 0.0, 0.0});
    return out;
  }

  const double end = f.support_end();
  double horizon = end;
  if (!std::isfinite(horizon)) {
    horizon = numeric::grow_until(
        [&](double t) { return f.survival(t) <= 0.1 * tol && g.survival(t) <= 0.1 * tol; }, f.scale());
    if (!std::isfinite(horizon)) throw ConditionViolated("splitting: tail too heavy to truncate");
  }

  std::vector<double> knots{0.0};
  for (double b : f.breakpoints())
    if (b > 0.0 && b <= horizon) knots.push_back(b);
  std::vector<double> pieces = knots;
  pieces.push_back(horizon);
  std::sort(pieces.begin(), pieces.end());
  pieces.erase(std::unique(pieces.begin(), pieces.end()), pieces.end());
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) find_crossings(f, g, pieces[i], pieces[i + 1], knots);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  const auto atoms = f.atoms();
  double phi = 0.0;
  double psi = 0.0;
  double psi_tilde = 0.0;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const double lo = knots[i];
    const bool last = i + 1 == knots.size();
    const double hi = last ? kInf : knots[i + 1];
    const double probe_hi = last ? std::max(horizon, lo + f.scale()) : hi;
    const int sign = density_sign(f, g, 0.5 * (lo + probe_hi));
    SplitCell cell;
    cell.lo = lo;
    cell.hi = hi;
    cell.branch = sign > 0 ? Branch::equilibrium_min : Branch::period_min;
    cell.atom = atom_at(atoms, lo);
    psi += cell.atom;
    cell.phi = phi;
    cell.psi = psi;
    cell.psi_tilde = psi_tilde;
    out.cells_.push_back(cell);

    const double d_f = last ? f.survival(lo) : f.survival(lo) - f.survival(hi) - atom_at(atoms, hi);
    const double d_g = last ? g.survival(lo) : g.survival(lo) - g.survival(hi);
    if (cell.branch == Branch::period_min) {
      phi += d_f;
      psi_tilde += std::max(0.0, d_g - d_f);
    } else {
      phi += d_g;
      psi += std::max(0.0, d_f - d_g);
    }
  }

  out.kappa_ = phi;
  out.psi_total_ = psi;
  out.psi_tilde_total_ = psi_tilde;
  double tail = 0.0;
  if (!std::isfinite(end)) tail = std::min(f.survival(horizon), g.survival(horizon));
  out.kappa_error_ = tail + std::abs(psi - psi_tilde) + std::abs(phi + psi - 1.0);

  if (out.kappa_ <= tol) throw ConditionViolated("splitting degenerate: kappa vanishes at working precision");
  if (1.0 - out.kappa_ <= tol) {
    out.kappa_ = 1.0;
    out.psi_total_ = out.psi_tilde_total_ = 0.0;
  }
  return out;
}

std::size_t SplitDecomposition::cell_index(double s) const {
  auto it = std::upper_bound(cells_.begin(), cells_.end(), s,
                             [](double v, const SplitCell& c) { return v < c.lo; });
  return static_cast<std::size_t>(std::distance(cells_.begin(), it)) - 1;
}

double SplitDecomposition::cell_increment(const SplitCell& c, Component comp, double s) const {
  if (s <= c.lo) return 0.0;
  const double d_f = period_.survival(c.lo) - period_.survival(s);
  const double d_g = equilibrium_.survival(c.lo) - equilibrium_.survival(s);
  switch (comp) {
    case Component::Phi:
      return c.branch == Branch::period_min ? d_f : d_g;
    case Component::Psi:
      return c.branch == Branch::equilibrium_min ? std::max(0.0, d_f - d_g) : 0.0;
    case Component::PsiTilde:
      return c.branch == Branch::period_min ? std::max(0.0, d_g - d_f) : 0.0;
  }
  return 0.0;
}

double SplitDecomposition::component_density(const SplitCell& c, Component comp, double s) const {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const double f = density_or(period_, s, nan);
  const double g = density_or(equilibrium_, s, nan);
  switch (comp) {
    case Component::Phi:
      return c.branch == Branch::period_min ? f : g;
    case Component::Psi:
      return c.branch == Branch::equilibrium_min ? f - g : 0.0;
    case Component::PsiTilde:
      return c.branch == Branch::period_min ? g - f : 0.0;
  }
  return nan;
}

static double start_value(const SplitCell& c, Component comp) {
  switch (comp) {
    case Component::Phi:
      return c.phi;
    case Component::Psi:
      return c.psi;
    case Component::PsiTilde:
      return c.psi_tilde;
  }
  return 0.0;
}

double SplitDecomposition::cell_end(std::size_t i, Component comp) const {
  if (i + 1 == cells_.size()) return mass(comp);
  const SplitCell& next = cells_[i + 1];
  return start_value(next, comp) - (comp == Component::Psi ? next.atom : 0.0);
}

double SplitDecomposition::mass(Component c) const {
  switch (c) {
    case Component::Phi:
      return kappa_;
    case Component::Psi:
      return psi_total_;
    case Component::PsiTilde:
      return psi_tilde_total_;
  }
  return 0.0;
}

double SplitDecomposition::value(Component c, double s) const {
  if (s < 0.0) return 0.0;
  if (trivial()) return c == Component::Phi ? period_.cdf(s) : 0.0;
  const std::size_t i = cell_index(s);
  const SplitCell& cell = cells_[i];
  const double v = start_value(cell, c) + cell_increment(cell, c, s);
  return std::min(v, mass(c));
}

double SplitDecomposition::inverse_of(Component c, double y) const {
  if (trivial() && c != Component::Phi) return 0.0;
  if (!(y >= 0.0 && y < mass(c))) throw DomainError("inverse_of: level outside [0, total mass)");
  if (trivial()) return period_.quantile(y);
  const double x_tol = 1e-12 * std::max(1.0, period_.scale());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const SplitCell& cell = cells_[i];
    const double start = start_value(cell, c);
    if (start >= y) return cell.lo;
    if (cell_end(i, c) < y) continue;
    auto g = [&](double x) { return start + cell_increment(cell, c, x); };
    auto dg = [&](double x) { return component_density(cell, c, x); };
    double hi = cell.hi;
    if (!std::isfinite(hi)) {
      const double step = numeric::grow_until([&](double t) { return g(cell.lo + t) >= y; }, period_.scale());
      if (!std::isfinite(step)) throw DomainError("inverse_of: level not reached");
      hi = cell.lo + step;
    } else if (g(hi) < y) {
      // The level is reached only as the left limit at hi.
      return hi;
    }
    return numeric::invert_nondecreasing(g, dg, y, cell.lo, hi, x_tol);
  }
  return cells_.back().lo;
}

double SplitDecomposition::laplace_psi(double a) const {
  if (!(a >= 0.0)) throw InvalidArgument("laplace_psi: rate must be >= 0");
  if (trivial()) return 0.0;
  if (a == 0.0) return psi_total_;
  double total = 0.0;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const SplitCell& cell = cells_[i];
    if (cell.atom > 0.0) total += cell.atom * std::exp(a * cell.lo);
    if (cell.branch != Branch::equilibrium_min) continue;
    const bool last = i + 1 == cells_.size();
    const double s_f_hi = last ? 0.0 : period_.survival(cell.hi) + cells_[i + 1].atom;
    const double s_g_hi = last ? 0.0 : equilibrium_.survival(cell.hi);
    // Psi mass still to come inside the cell, right of s.
    auto remaining = [&](double s) {
      return std::max(0.0, (period_.survival(s) - s_f_hi) - (equilibrium_.survival(s) - s_g_hi));
    };
    const double r0 = remaining(cell.lo);
    if (r0 <= 0.0) continue;
    double upper = cell.hi;
    if (last) {
      const double end = period_.support_end();
      if (std::isfinite(end)) {
        upper = std::max(end, cell.lo);
      } else {
        if (a >= period_.mgf_abscissa()) return kInf;
        const double step = numeric::grow_until(
            [&](double t) {
              const double s = cell.lo + t;
              return a * s + std::log(std::max(period_.survival(s), 1e-300)) < std::log(1e-15);
            },
            period_.scale());
        if (!std::isfinite(step)) return kInf;
        upper = cell.lo + step;
      }
    }
    // int_(lo,hi) e^{as} dPsi = e^{a lo} R(lo) + a int_lo^hi e^{as} R(s) ds.
    const auto knots = numeric::make_knots({}, cell.lo, upper, period_.scale());
    const auto part = numeric::integrate_pieces([&](double s) { return std::exp(a * s) * remaining(s); }, knots,
                                                1e-12 * std::exp(a * cell.lo));
    total += std::exp(a * cell.lo) * r0 + a * part.value;
  }
  return total;
}

nlohmann::json SplitDecomposition::to_json() const {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : cells_) {
    cells.push_back({{"lo", c.lo},
                     {"hi", std::isfinite(c.hi) ? nlohmann::json(c.hi) : nlohmann::json(nullptr)},
                     {"branch", branch_name(c.branch)},
                     {"phi", c.phi},
                     {"psi", c.psi},
                     {"psi_tilde", c.psi_tilde},
                     {"atom", c.atom}});
  }
  return {{"kappa", kappa_},
          {"kappa_error", kappa_error_},
          {"tolerance", tol_},
          {"psi_mass", psi_total_},
          {"psi_tilde_mass", psi_tilde_total_},
          {"period", period_.to_json()},
          {"cells", cells}};
}

SplitDecomposition SplitDecomposition::from_json(const nlohmann::json& j, const Distribution& d) {
  SplitDecomposition out(d, d.equilibrium());
  try {
    out.kappa_ = j.at("kappa").get<double>();
    out.kappa_error_ = j.at("kappa_error").get<double>();
    out.tol_ = j.at("tolerance").get<double>();
    out.psi_total_ = j.at("psi_mass").get<double>();
    out.psi_tilde_total_ = j.at("psi_tilde_mass").get<double>();
    for (const auto& c : j.at("cells")) {
      SplitCell cell;
      cell.lo = c.at("lo").get<double>();
      cell.hi = c.at("hi").is_null() ? kInf : c.at("hi").get<double>();
      cell.branch = c.at("branch").get<std::string>() == "period_min" ? Branch::period_min : Branch::equilibrium_min;
      cell.phi = c.at("phi").get<double>();
      cell.psi = c.at("psi").get<double>();
      cell.psi_tilde = c.at("psi_tilde").get<double>();
      cell.atom = c.at("atom").get<double>();
      out.cells_.push_back(cell);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("split decomposition: ") + e.what());
  }
  if (out.cells_.empty()) throw InvalidArgument("split decomposition: no cells");
  return out;
}

}  // namespace regenbound
