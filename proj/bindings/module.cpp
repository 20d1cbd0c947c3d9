#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <utility>
#include <vector>

#include "ptdqd/cmat2.hpp"
#include "ptdqd/dynamics.hpp"
#include "ptdqd/inout.hpp"
#include "ptdqd/ness.hpp"
#include "ptdqd/nh.hpp"
#include "ptdqd/params.hpp"
#include "ptdqd/version.hpp"

namespace py = pybind11;
using namespace ptdqd;

namespace {

std::vector<std::vector<cplx>> to_list(const CMat2& m) {
  return {{m.a, m.b}, {m.c, m.d}};
}

SteadyModel steady_model_from(const std::string& name) {
  if (name == "eom") return SteadyModel::eom;
  if (name == "lindblad_micro") return SteadyModel::lindblad_micro;
  if (name == "lindblad_phen") return SteadyModel::lindblad_phen;
  throw std::invalid_argument("model must be eom, lindblad_micro or lindblad_phen");
}

py::dict trajectory_to_dict(const Trajectory& tr) {
  std::vector<cplx> b1, b2;
  std::vector<double> fluct1, fluct2;
  std::vector<std::vector<std::vector<cplx>>> corr;
  b1.reserve(tr.times.size());
  b2.reserve(tr.times.size());
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    b1.push_back(tr.quad[i].first);
    b2.push_back(tr.quad[i].second);
    fluct1.push_back(tr.n1[i] - std::norm(tr.quad[i].first));
    fluct2.push_back(tr.n2[i] - std::norm(tr.quad[i].second));
    corr.push_back(to_list(tr.corr[i]));
  }
  py::dict out;
  out["t"] = tr.times;
  out["b1"] = b1;
  out["b2"] = b2;
  out["n1"] = tr.n1;
  out["n2"] = tr.n2;
  out["fluct1"] = fluct1;
  out["fluct2"] = fluct2;
  out["corr"] = corr;
  out["current"] = tr.current;
  out["validity"] = tr.validity_flag;
  out["first_invalid_index"] = tr.first_invalid_index;
  return out;
}

}  // namespace

PYBIND11_MODULE(_ptdqd, m) {
  m.doc() = "Coupled microwave cavities with a voltage-biased double-dot "
            "gain medium: steady states, non-Hermitian dynamics, "
            "transmission (GHz/ns units)";
  m.attr("__version__") = PTDQD_VERSION;

  py::class_<SetupParams>(m, "SetupParams")
      .def(py::init<>())
      .def_readwrite("omega0", &SetupParams::omega0)
      .def_readwrite("lambda_", &SetupParams::lambda)
      .def_readwrite("kappa1", &SetupParams::kappa1)
      .def_readwrite("kappa2", &SetupParams::kappa2)
      .def_readwrite("kappa_extra", &SetupParams::kappa_extra)
      .def_readwrite("g0", &SetupParams::g0)
      .def_readwrite("Gamma", &SetupParams::Gamma)
      .def_readwrite("eps", &SetupParams::eps)
      .def_readwrite("tc", &SetupParams::tc)
      .def_readwrite("V", &SetupParams::V)
      .def_readwrite("mu1", &SetupParams::mu1)
      .def_readwrite("mu2", &SetupParams::mu2)
      .def_readwrite("beta", &SetupParams::beta)
      .def_readwrite("gamma_b", &SetupParams::gamma_b)
      .def_readwrite("omega_c", &SetupParams::omega_c)
      .def_readwrite("omega_max", &SetupParams::omega_max)
      .def_readwrite("omega_cut", &SetupParams::omega_cut)
      .def_readwrite("lamb_shift", &SetupParams::lamb_shift)
      .def("validate", &SetupParams::validate);

  py::class_<RotatedDqd>(m, "RotatedDqd")
      .def_readonly("theta", &RotatedDqd::theta)
      .def_readonly("omega_q", &RotatedDqd::omega_q)
      .def_readonly("g", &RotatedDqd::g);

  py::class_<DqdSteadyState>(m, "DqdSteadyState")
      .def_readonly("n1", &DqdSteadyState::n1)
      .def_readonly("n2", &DqdSteadyState::n2)
      .def_readonly("coh", &DqdSteadyState::coh)
      .def_readonly("dn", &DqdSteadyState::dn)
      .def_readonly("delta", &DqdSteadyState::delta)
      .def_readonly("condition_estimate", &DqdSteadyState::condition_estimate);

  py::class_<BalanceRoot>(m, "BalanceRoot")
      .def_readonly("theta", &BalanceRoot::theta)
      .def_readonly("eps", &BalanceRoot::eps)
      .def_readonly("tc", &BalanceRoot::tc)
      .def_readonly("dn", &BalanceRoot::dn);

  m.def("rotated_dqd", &rotated_dqd, py::arg("params"));
  m.def("solve_ness", &solve_ness, py::arg("params"),
        "Stationary populations/coherence of the biased double dot");
  m.def("phonon_half_ft", &phonon_half_ft, py::arg("delta_omega"),
        py::arg("params"));
  m.def("tune_balance", &tune_balance, py::arg("params"),
        py::arg("n_grid") = 200,
        "Roots of the gain-loss balance condition on the resonance ellipse");
  m.def("lambda_ep", &lambda_ep, py::arg("params"), py::arg("ss"),
        py::arg("balanced") = true);
  m.def(
      "kappa2_thresholds",
      [](const SetupParams& p, const DqdSteadyState& ss) {
        const Kappa2Thresholds th = kappa2_thresholds(p, ss);
        py::dict out;
        out["kappa2_ep"] = th.kappa2_ep;
        out["kappa2_th"] = th.kappa2_th;
        return out;
      },
      py::arg("params"), py::arg("ss"));
  m.def(
      "build_heff",
      [](const SetupParams& p, const DqdSteadyState& ss) {
        return to_list(build_heff(p, ss));
      },
      py::arg("params"), py::arg("ss"));
  m.def(
      "heff_eigenvalues",
      [](const SetupParams& p, const DqdSteadyState& ss) {
        const EigenInfo e = eig2(build_heff(p, ss));
        return std::make_pair(e.lam_plus, e.lam_minus);
      },
      py::arg("params"), py::arg("ss"));
  m.def(
      "pt_operator",
      [](const SetupParams& p, const DqdSteadyState& ss) {
        const PtOperator op = pt_operator(p, ss);
        py::dict out;
        out["phi"] = op.phi;
        out["linear_part"] = to_list(op.linear_part);
        return out;
      },
      py::arg("params"), py::arg("ss"));
  m.def(
      "evolve",
      [](const SetupParams& p, const std::vector<double>& times,
         std::pair<cplx, cplx> init, const std::string& method, bool noise,
         double e0, double omega_d, double photon_bound) {
        const DqdSteadyState ss = solve_ness(p);
        const CMat2 H = build_heff(p, ss);
        NoiseKernelSpec spec = make_noise_kernel_spec(p, ss);
        if (!noise) spec.amp = 0.0;
        const CorrMethod cm = (method == "quadrature")
                                  ? CorrMethod::quadrature
                                  : CorrMethod::eigenbasis;
        const Trajectory tr = evolve_correlations(
            H, spec, init, times, cm, DriveSpec{e0, omega_d}, photon_bound);
        return trajectory_to_dict(tr);
      },
      py::arg("params"), py::arg("times"),
      py::arg("init") = std::pair<cplx, cplx>{1.0, 0.0},
      py::arg("method") = "eigenbasis", py::arg("noise") = true,
      py::arg("e0") = 0.0, py::arg("omega_d") = 0.0,
      py::arg("photon_bound") = 50.0,
      "Quadratures and correlation matrix over a time grid");
  m.def(
      "transmission",
      [](const SetupParams& p, double omega_d) {
        const DqdSteadyState ss = solve_ness(p);
        const TransmissionPoint tp = transmission(p, ss, omega_d);
        py::dict out;
        out["t1"] = tp.t1;
        out["t2"] = tp.t2;
        out["amp1"] = tp.amp1;
        out["amp2"] = tp.amp2;
        out["phase1"] = tp.phase1;
        out["phase2"] = tp.phase2;
        return out;
      },
      py::arg("params"), py::arg("omega_d"));
  m.def(
      "steady_photons",
      [](const SetupParams& p, const std::string& model) {
        const DqdSteadyState ss = solve_ness(p);
        const SteadyPhotons ph =
            steady_state_photons(p, ss, steady_model_from(model));
        return std::make_tuple(ph.n1, ph.n2, ph.current);
      },
      py::arg("params"), py::arg("model") = "eom");
}
