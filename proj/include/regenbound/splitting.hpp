#pragma once

// Common-part decomposition of a period law F and its equilibrium law F~:
// Phi collects min(F', F~'), Psi and PsiTilde the two remainders.
//
// The half-line is cut into cells at the breakpoints of F and at the points
// where F' - F~' changes sign. Inside a cell one density is the smaller one
// throughout, so every component is an exact difference of F and F~ values
// there and needs no tabulation.

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "regenbound/distribution.hpp"

namespace regenbound {

enum class Component { Phi, Psi, PsiTilde };

// Which density is the minimum inside a cell.
enum class Branch { period_min, equilibrium_min };

struct SplitCell {
  double lo = 0.0;
  double hi = 0.0;  // +inf for the last cell
  Branch branch = Branch::period_min;
  // Component values at lo, atoms at lo included.
  double phi = 0.0;
  double psi = 0.0;
  double psi_tilde = 0.0;
  double atom = 0.0;  // mass of F at lo, all of it in Psi
};

// min(F'(s), F~'(s)) where F' exists, 0 otherwise.
double phi_at(const Distribution& d, double s);

class SplitDecomposition {
 public:
  // Default tolerance for compute_split.
  static constexpr double kDefaultTol = 1e-10;

  double kappa() const { return kappa_; }
  double kappa_error() const { return kappa_error_; }
  double tolerance() const { return tol_; }
  bool trivial() const { return kappa_ == 1.0; }

  const Distribution& period() const { return period_; }
  const Distribution& equilibrium() const { return equilibrium_; }
  const std::vector<SplitCell>& cells() const { return cells_; }

  double Phi(double s) const { return value(Component::Phi, s); }
  double Psi(double s) const { return value(Component::Psi, s); }
  double PsiTilde(double s) const { return value(Component::PsiTilde, s); }
  double value(Component c, double s) const;
  // Phi(inf) = kappa, Psi(inf) = PsiTilde(inf) = 1 - kappa.
  double mass(Component c) const;

  // inf{x : component(x) >= y} for y in [0, mass). With kappa = 1 the Psi
  // inverses return 0 for any y.
  double inverse_of(Component c, double y) const;

  // int_0^inf e^{a s} dPsi(s); +inf when divergent.
  double laplace_psi(double a) const;

  nlohmann::json to_json() const;
  static SplitDecomposition from_json(const nlohmann::json& j, const Distribution& d);

  friend SplitDecomposition compute_split(const ValidatedDistribution& d, double tol);

 private:
  SplitDecomposition(Distribution period, Distribution equilibrium)
      : period_(std::move(period)), equilibrium_(std::move(equilibrium)) {}

  std::size_t cell_index(double s) const;
  double cell_increment(const SplitCell& c, Component comp, double s) const;
  double cell_end(std::size_t i, Component comp) const;
  double component_density(const SplitCell& c, Component comp, double s) const;

  Distribution period_;
  Distribution equilibrium_;
  std::vector<SplitCell> cells_;
  double kappa_ = 1.0;
  double kappa_error_ = 0.0;
  double tol_ = kDefaultTol;
  double psi_total_ = 0.0;
  double psi_tilde_total_ = 0.0;
};

// Throws ConditionViolated("splitting degenerate") when kappa <= tol.
SplitDecomposition compute_split(const ValidatedDistribution& d, double tol = SplitDecomposition::kDefaultTol);

}  // namespace regenbound
