#include <limits>
#include <optional>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "regenbound/alternating.hpp"
#include "regenbound/bounds.hpp"
#include "regenbound/coupling.hpp"
#include "regenbound/distribution.hpp"
#include "regenbound/empirics.hpp"
#include "regenbound/error.hpp"
#include "regenbound/splitting.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace regenbound;

namespace {

// Dicts cross the boundary as JSON text; the Python side does the dumps/loads.
json parse(const std::string& text) { return json::parse(text); }

Delay make_delay(const Distribution& d, const std::string& delay_json) { return Delay(d, delay_from_json(parse(delay_json))); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "regenbound C++ core";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<ConditionViolated>(m, "ConditionViolated", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NotAdmissible>(m, "NotAdmissible", PyExc_ArithmeticError);

  py::class_<Distribution>(m, "Distribution")
      .def(py::init([](const std::string& j) { return Distribution::from_json(parse(j)); }), py::arg("spec_json"))
      .def("cdf", &Distribution::cdf)
      .def("survival", &Distribution::survival)
      .def("quantile", &Distribution::quantile)
      .def("mean", &Distribution::mean)
      .def("raw_moment", [](const Distribution& d, double k) { return d.raw_moment(k).value; })
      .def("mgf", [](const Distribution& d, double a) { return d.mgf(a).value; })
      .def("equilibrium", &Distribution::equilibrium)
      .def("overshoot", &Distribution::overshoot)
      .def("to_json", [](const Distribution& d) { return d.to_json().dump(); })
      .def("__repr__", &Distribution::describe);

  py::class_<SplitDecomposition>(m, "SplitDecomposition")
      .def_property_readonly("kappa", &SplitDecomposition::kappa)
      .def_property_readonly("kappa_error", &SplitDecomposition::kappa_error)
      .def("Phi", &SplitDecomposition::Phi)
      .def("Psi", &SplitDecomposition::Psi)
      .def("PsiTilde", &SplitDecomposition::PsiTilde)
      .def("Psi_inverse", [](const SplitDecomposition& s, double y) { return s.inverse_of(Component::Psi, y); })
      .def("Phi_inverse", [](const SplitDecomposition& s, double y) { return s.inverse_of(Component::Phi, y); })
      .def("laplace_psi", &SplitDecomposition::laplace_psi)
      .def("to_json", [](const SplitDecomposition& s) { return s.to_json().dump(); });

  m.def("compute_split", [](const Distribution& d, double tol) { return compute_split(validate(d), tol); },
        py::arg("dist"), py::arg("tol") = SplitDecomposition::kDefaultTol);

  m.def("poly_constant", &poly_constant, py::arg("kappa"), py::arg("m0k"), py::arg("m1k"), py::arg("k"));
  m.def("exp_constant", &exp_constant, py::arg("p_a"), py::arg("mgf0"));
  m.def("tv_bound", [](const std::string& mode, double constant, double order, double t) {
    return tv_bound(mode == "exponential" ? BoundMode::exponential : BoundMode::polynomial, constant, order, t).clamped;
  });

  m.def(
      "polynomial_bound",
      [](const SplitDecomposition& s, const std::string& delay, double k) {
        return polynomial_bound(s, make_delay(s.period(), delay), k).to_json().dump();
      },
      py::arg("split"), py::arg("delay_json"), py::arg("k"));
  m.def(
      "exponential_bound",
      [](const SplitDecomposition& s, const std::string& delay, std::optional<double> a) {
        const Delay d = make_delay(s.period(), delay);
        return (a ? exponential_bound(s, d, *a) : exponential_bound_auto(s, d)).to_json().dump();
      },
      py::arg("split"), py::arg("delay_json"), py::arg("a") = py::none());

  m.def(
      "sample_xi_pair",
      [](const SplitDecomposition& s, double u, double u1, double u2) {
        const XiPair p = sample_xi_pair(s, u, u1, u2);
        return py::make_tuple(p.xi, p.xi_tilde, p.coincided);
      },
      py::arg("split"), py::arg("u"), py::arg("u1"), py::arg("u2"));
  m.def(
      "sample_tau",
      [](const SplitDecomposition& s, const std::string& delay, std::int64_t n, std::uint64_t seed) {
        TauSummary t;
        {
          py::gil_scoped_release release;
          t = sample_tau(s, make_delay(s.period(), delay), n, seed);
        }
        return py::make_tuple(t.tau, t.attempts, t.to_json().dump());
      },
      py::arg("split"), py::arg("delay_json"), py::arg("n"), py::arg("seed"));
  m.def(
      "tv_curve",
      [](const SplitDecomposition& s, const std::string& delay, const std::vector<double>& grid, std::int64_t n,
         std::uint64_t seed, const std::vector<double>& ks, int bins) {
        const Delay d = make_delay(s.period(), delay);
        std::vector<BoundReport> reports;
        for (double k : ks) reports.push_back(polynomial_bound(s, d, k));
        const TvCurve c = tv_curve(s, d, grid, n, seed, reports, bins);
        return py::make_tuple(c.to_json().dump(), verify(c).ok);
      },
      py::arg("split"), py::arg("delay_json"), py::arg("t_grid"), py::arg("n"), py::arg("seed"),
      py::arg("k") = std::vector<double>{1.0}, py::arg("bins") = 50);

  m.def(
      "empirical_tv",
      [](const std::vector<double>& x, const Distribution& ref, int bins, std::uint64_t seed) {
        const TvEstimate e = empirical_tv(x, ref, bins, seed);
        return py::make_tuple(e.estimate, e.ci);
      },
      py::arg("samples"), py::arg("reference"), py::arg("bins") = 50, py::arg("seed") = 0);
  m.def(
      "ks_statistic",
      [](const std::vector<double>& x, const Distribution& ref) {
        const KsResult r = ks_statistic(x, [&](double s) { return ref.cdf(s); });
        return py::make_tuple(r.statistic, r.critical_1, r.critical_5);
      },
      py::arg("samples"), py::arg("reference"));

  m.def("occupancy", [](const std::string& spec) {
    const Occupancy o = occupancy(AlternatingSpec::from_json(parse(spec)));
    return py::make_tuple(o.p ? py::cast(*o.p) : py::none(), o.rho ? py::cast(*o.rho) : py::none());
  });
  m.def(
      "alt_check",
      [](const std::string& spec_json, std::int64_t n, std::uint64_t seed) {
        const AlternatingSpec spec = AlternatingSpec::from_json(parse(spec_json));
        validate(spec);
        const SplitDecomposition split = compute_split(validate(spec.f1));
        std::vector<double> tau(static_cast<std::size_t>(n));
        std::vector<int> nu(tau.size());
        for (std::size_t i = 0; i < tau.size(); ++i) {
          const AltTrace tr = simulate_alt_coupling(spec, split, UniformStream(seed, Domain::alternating, i));
          tau[i] = tr.tau ? *tr.tau : std::numeric_limits<double>::quiet_NaN();
          nu[i] = tr.nu;
        }
        return alt_tau_bound_check(spec, split.kappa(), tau, nu).to_json().dump();
      },
      py::arg("spec_json"), py::arg("n"), py::arg("seed"));
  m.def(
      "alt_polynomial_bound",
      [](const std::string& spec_json, double k) {
        const AlternatingSpec spec = AlternatingSpec::from_json(parse(spec_json));
        return alt_polynomial_bound(spec, compute_split(validate(spec.f1)), k).to_json().dump();
      },
      py::arg("spec_json"), py::arg("k"));
}
