#pragma once

#include <string>
#include <vector>

#include "ptdqd/cmat2.hpp"
#include "ptdqd/dynamics.hpp"
#include "ptdqd/ness.hpp"
#include "ptdqd/params.hpp"

namespace ptdqd {

/// Transmission response at one drive frequency.
struct TransmissionPoint {
  double omega_d;
  cplx t1, t2;              ///< complex transmissions
  double amp1, amp2;        ///< |T_l|
  double phase1, phase2;    ///< arg T_l in (-pi, pi]
};

/// Steady transmitted signals under a coherent drive at cavity 2:
///   (T1/(kappa1+kappa_extra), T2/(kappa2+kappa_extra))^T
///     = i (H_eff - omega_d I)^{-1} (0, 1)^T.
/// Requires the coupled cavities overall dissipative (all Im eigenvalues of
/// H_eff < 0); otherwise throws std::domain_error naming the thresholds to
/// consult.
TransmissionPoint transmission(const SetupParams& p, const DqdSteadyState& ss,
                               double omega_d);

/// Closed-form transmission amplitudes/phases used as an independent check
/// of the matrix-inverse route. Returns (amp1, amp2, tan_phi1, tan_phi2)
/// in the drive-phase convention where tan_phi_l describes arg T_l - pi/2.
struct TransmissionClosedForm {
  double amp1, amp2;
  double tan_phi1, tan_phi2;
};
TransmissionClosedForm transmission_closed_form(const SetupParams& p,
                                                const DqdSteadyState& ss,
                                                double omega_d);

enum class SweepAxis { lambda, kappa2 };

struct SweepRow {
  double axis_value;
  double omega_d;
  double amp1, phase1;
  double amp2, phase2;
  double phase2_unwrapped;
  double abs_det;      ///< |det(H_eff - omega_d I)|
  double re_lam_plus, im_lam_plus, re_lam_minus, im_lam_minus;
  double closed_form_dev;  ///< relative deviation of amp2 from the closed form
  bool error = false;
  std::string error_msg;
};

/// Per-axis-value summary of the transmission landscape.
struct SweepPeakSummary {
  double axis_value;
  std::vector<double> peak_omega_d;     ///< local maxima of amp2 over omega_d
  std::vector<double> detmin_omega_d;   ///< local minima of |det(H-w I)|
  double re_lam_plus, re_lam_minus;     ///< eigenvalue tracks
  double cand_minus, cand_plus;         ///< omega0 -/+ (Lam+ - Lam-) candidates
  double max_peak_detmin_gap;           ///< max |peak - nearest det minimum|
  double max_peak_relam_gap;            ///< max |peak - nearest Re eigenvalue|
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepPeakSummary> peaks;
};

/// Sweeps transmission over an axis grid x an omega_d grid. Per-point errors
/// are recorded in the row and the sweep continues. The peak summaries
/// report amp2 maxima, |det| minima, both eigenvalue-based peak candidates,
/// and their discrepancies, so conflicting peak-location conventions are
/// surfaced rather than hidden.
SweepResult sweep_transmission(const SetupParams& p, const DqdSteadyState& ss,
                               SweepAxis axis, const std::vector<double>& grid,
                               const std::vector<double>& omega_d_grid,
                               int threads = 1);

struct PhaseLandmarks {
  std::vector<double> pi_flips;    ///< drive frequencies with a pi phase jump
  std::vector<double> zero_phase;  ///< drive frequencies with zero phase
};

/// Landmark drive frequencies of the phase response in the loss-induced
/// regime (requires kappa1 - 2*Gamma*delta < 0). With
/// k1eff = 2*Gamma*delta - kappa1, e = k1eff - kappa_extra,
/// kC = (kappa2 - k1eff)/2 + kappa_extra and
/// G^2 = lambda^2(1-delta) - ((kappa2 + k1eff)/4)^2:
/// pi-flips (zeros of Im T2) at omega0 and, when real, at
/// omega0 +/- sqrt(lambda^2(1-delta) - e^2/4); zero phase (zeros of Re T2)
/// at omega0 +/- sqrt(e*((kC/2)^2 + G^2)/(kappa2 + kappa_extra)), present
/// only for e > 0.
PhaseLandmarks phase_landmarks(const SetupParams& p, const DqdSteadyState& ss);

enum class SteadyModel { eom, lindblad_micro, lindblad_phen };

struct SteadyPhotons {
  double n1, n2;
  double current;
};

/// Steady-state photon numbers and intercavity current without a drive.
/// eom: noise integral of the full correlation dynamics evaluated at
/// t = 20/min|Im eigenvalue|; lindblad_*: stationary 4x4 solve. Requires a
/// dissipative Hamiltonian; throws std::domain_error otherwise.
SteadyPhotons steady_state_photons(const SetupParams& p,
                                   const DqdSteadyState& ss, SteadyModel model);

}  // namespace ptdqd
