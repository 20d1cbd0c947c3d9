#include "ptdqd/inout.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "ptdqd/nh.hpp"

namespace ptdqd {

namespace {

constexpr cplx kI{0.0, 1.0};

struct ReducedRates {
  double k1eff;  ///< 2*Gamma*delta - kappa1
  double e;      ///< k1eff - kappa_extra
  double kC;     ///< (kappa2 - k1eff)/2 + kappa_extra
  double G2;     ///< lambda^2 (1-delta) - ((kappa2 + k1eff)/4)^2
};

ReducedRates reduced_rates(const SetupParams& p, const DqdSteadyState& ss) {
  ReducedRates r;
  r.k1eff = 2.0 * p.Gamma * ss.delta - p.kappa1;
  r.e = r.k1eff - p.kappa_extra;
  r.kC = 0.5 * (p.kappa2 - r.k1eff) + p.kappa_extra;
  const double kt = 0.5 * (p.kappa2 + r.k1eff);
  r.G2 = p.lambda * p.lambda * (1.0 - ss.delta) - 0.25 * kt * kt;
  return r;
}

void require_dissipative(const CMat2& H, const char* caller) {
  const EigenInfo eig = eig2(H);
  if (eig.lam_plus.imag() >= 0.0 || eig.lam_minus.imag() >= 0.0) {
    throw std::domain_error(
        std::string(caller) +
        ": cavities are not overall dissipative (an eigenvalue of the "
        "effective Hamiltonian does not decay); consult kappa2_thresholds "
        "for the lasing/EP boundaries");
  }
}

double principal_phase(cplx z) {
  double ph = std::arg(z);  // (-pi, pi]
  if (ph <= -M_PI) ph = M_PI;
  return ph;
}

/// Unwraps ph into the branch nearest to prev.
double unwrap_step(double prev, double ph) {
  double out = ph;
  while (out - prev > M_PI) out -= 2.0 * M_PI;
  while (out - prev < -M_PI) out += 2.0 * M_PI;
  return out;
}

std::vector<double> local_extrema(const std::vector<double>& x,
                                  const std::vector<double>& y, bool maxima) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    const bool hit = maxima ? (y[i] > y[i - 1] && y[i] >= y[i + 1])
                            : (y[i] < y[i - 1] && y[i] <= y[i + 1]);
    if (hit) out.push_back(x[i]);
  }
  return out;
}

double nearest_gap(double v, const std::vector<double>& refs) {
  double best = std::numeric_limits<double>::infinity();
  for (double r : refs) best = std::min(best, std::abs(v - r));
  return best;
}

}  // namespace

TransmissionPoint transmission(const SetupParams& p, const DqdSteadyState& ss,
                               double omega_d) {
  const CMat2 H = build_heff(p, ss);
  require_dissipative(H, "transmission");
  const CMat2 A = H - cplx(omega_d, 0.0) * CMat2::identity();
  const CVec2 sol = A.inverse() * CVec2{cplx{0.0, 0.0}, cplx{1.0, 0.0}};
  TransmissionPoint out;
  out.omega_d = omega_d;
  out.t1 = (p.kappa1 + p.kappa_extra) * kI * sol.x;
  out.t2 = (p.kappa2 + p.kappa_extra) * kI * sol.y;
  out.amp1 = std::abs(out.t1);
  out.amp2 = std::abs(out.t2);
  out.phase1 = principal_phase(out.t1);
  out.phase2 = principal_phase(out.t2);
  return out;
}

TransmissionClosedForm transmission_closed_form(const SetupParams& p,
                                                const DqdSteadyState& ss,
                                                double omega_d) {
  const ReducedRates r = reduced_rates(p, ss);
  const double D = p.omega0 - omega_d;
  const double X = D * D - 0.25 * r.kC * r.kC - r.G2;
  const double absdet = std::hypot(X, r.kC * D);
  TransmissionClosedForm out;
  out.amp1 =
      (p.kappa1 + p.kappa_extra) * p.lambda * (1.0 - ss.delta) / absdet;
  out.amp2 = (p.kappa2 + p.kappa_extra) * std::hypot(D, 0.5 * r.e) / absdet;
  out.tan_phi1 = r.kC * D / X;
  out.tan_phi2 = (r.e * X + 2.0 * r.kC * D * D) /
                 (2.0 * D * (X - 0.5 * r.e * r.kC));
  return out;
}

SweepResult sweep_transmission(const SetupParams& p, const DqdSteadyState& ss,
                               SweepAxis axis, const std::vector<double>& grid,
                               const std::vector<double>& omega_d_grid,
                               int threads) {
  const std::size_t na = grid.size();
  const std::size_t nw = omega_d_grid.size();
  SweepResult result;
  result.rows.resize(na * nw);
  result.peaks.resize(na);

  auto run_axis_value = [&](std::size_t ai) {
    SetupParams pa = p;
    if (axis == SweepAxis::lambda) {
      pa.lambda = grid[ai];
    } else {
      pa.kappa2 = grid[ai];
    }
    const CMat2 H = build_heff(pa, ss);
    const EigenInfo eig = eig2(H);

    std::vector<double> amp2(nw, 0.0), absdet(nw, 0.0);
    bool any_error = false;
    double prev_unwrapped = 0.0;
    for (std::size_t wi = 0; wi < nw; ++wi) {
      SweepRow& row = result.rows[ai * nw + wi];
      row.axis_value = grid[ai];
      row.omega_d = omega_d_grid[wi];
      row.re_lam_plus = eig.lam_plus.real();
      row.im_lam_plus = eig.lam_plus.imag();
      row.re_lam_minus = eig.lam_minus.real();
      row.im_lam_minus = eig.lam_minus.imag();
      const CMat2 A =
          H - cplx(omega_d_grid[wi], 0.0) * CMat2::identity();
      row.abs_det = std::abs(A.det());
      absdet[wi] = row.abs_det;
      try {
        const TransmissionPoint tp = transmission(pa, ss, omega_d_grid[wi]);
        row.amp1 = tp.amp1;
        row.phase1 = tp.phase1;
        row.amp2 = tp.amp2;
        row.phase2 = tp.phase2;
        row.phase2_unwrapped =
            (wi == 0) ? tp.phase2 : unwrap_step(prev_unwrapped, tp.phase2);
        prev_unwrapped = row.phase2_unwrapped;
        const TransmissionClosedForm cf =
            transmission_closed_form(pa, ss, omega_d_grid[wi]);
        row.closed_form_dev =
            std::abs(tp.amp2 - cf.amp2) / std::max(cf.amp2, 1e-300);
        amp2[wi] = tp.amp2;
      } catch (const std::exception& ex) {
        row.error = true;
        row.error_msg = ex.what();
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.amp1 = row.phase1 = row.amp2 = row.phase2 = nan;
        row.phase2_unwrapped = row.closed_form_dev = nan;
        amp2[wi] = nan;
        any_error = true;
      }
    }

    SweepPeakSummary& peak = result.peaks[ai];
    peak.axis_value = grid[ai];
    peak.re_lam_plus = eig.lam_plus.real();
    peak.re_lam_minus = eig.lam_minus.real();
    const cplx split = eig.lam_plus - eig.lam_minus;
    peak.cand_minus = p.omega0 - split.real();
    peak.cand_plus = p.omega0 + split.real();
    peak.detmin_omega_d = local_extrema(omega_d_grid, absdet, false);
    if (!any_error) {
      peak.peak_omega_d = local_extrema(omega_d_grid, amp2, true);
      peak.max_peak_detmin_gap = 0.0;
      peak.max_peak_relam_gap = 0.0;
      for (double pk : peak.peak_omega_d) {
        peak.max_peak_detmin_gap = std::max(
            peak.max_peak_detmin_gap, nearest_gap(pk, peak.detmin_omega_d));
        peak.max_peak_relam_gap = std::max(
            peak.max_peak_relam_gap,
            nearest_gap(pk, {peak.re_lam_plus, peak.re_lam_minus}));
      }
    } else {
      peak.max_peak_detmin_gap = std::numeric_limits<double>::quiet_NaN();
      peak.max_peak_relam_gap = std::numeric_limits<double>::quiet_NaN();
    }
  };

  const int n_workers =
      std::max(1, std::min<int>(threads, static_cast<int>(na)));
  if (n_workers == 1) {
    for (std::size_t ai = 0; ai < na; ++ai) run_axis_value(ai);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t ai = next.fetch_add(1); ai < na;
             ai = next.fetch_add(1)) {
          run_axis_value(ai);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return result;
}

PhaseLandmarks phase_landmarks(const SetupParams& p,
                               const DqdSteadyState& ss) {
  const ReducedRates r = reduced_rates(p, ss);
  if (r.k1eff <= 0.0) {
    throw std::domain_error(
        "phase_landmarks: requires the loss-induced regime "
        "kappa1 < 2*Gamma*delta");
  }
  PhaseLandmarks out;
  out.pi_flips.push_back(p.omega0);
  const double df2 =
      p.lambda * p.lambda * (1.0 - ss.delta) - 0.25 * r.e * r.e;
  if (df2 > 0.0) {
    const double df = std::sqrt(df2);
    out.pi_flips.push_back(p.omega0 - df);
    out.pi_flips.push_back(p.omega0 + df);
  }
  if (r.e > 0.0) {
    const double dz2 = r.e * (0.25 * r.kC * r.kC + r.G2) /
                       (p.kappa2 + p.kappa_extra);
    if (dz2 > 0.0) {
      const double dz = std::sqrt(dz2);
      out.zero_phase.push_back(p.omega0 - dz);
      out.zero_phase.push_back(p.omega0 + dz);
    }
  }
  std::sort(out.pi_flips.begin(), out.pi_flips.end());
  return out;
}

SteadyPhotons steady_state_photons(const SetupParams& p,
                                   const DqdSteadyState& ss,
                                   SteadyModel model) {
  if (model != SteadyModel::eom) {
    const LindbladModel lm = (model == SteadyModel::lindblad_micro)
                                 ? LindbladModel::microscopic
                                 : LindbladModel::phenomenological;
    const CMat2 C = lindblad_stationary(p, ss, lm);
    return {C.a.real(), C.d.real(), p.lambda * C.c.imag()};
  }
  const CMat2 H = build_heff(p, ss);
  require_dissipative(H, "steady_state_photons");
  const EigenInfo eig = eig2(H);
  const double decay =
      std::min(-eig.lam_plus.imag(), -eig.lam_minus.imag());
  const double t_eval = 20.0 / decay;
  const NoiseKernelSpec spec = make_noise_kernel_spec(p, ss);
  CMat2 C;
  try {
    C = correlation_noise_part(H, spec, t_eval, CorrMethod::eigenbasis);
  } catch (const std::domain_error&) {
    C = correlation_noise_part(H, spec, t_eval, CorrMethod::quadrature);
  }
  return {C.a.real(), C.d.real(), p.lambda * C.c.imag()};
}

}  // namespace ptdqd
