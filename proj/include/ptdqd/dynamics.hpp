#pragma once

#include <utility>
#include <vector>

#include "ptdqd/cmat2.hpp"
#include "ptdqd/ness.hpp"
#include "ptdqd/params.hpp"

namespace ptdqd {

/// Coherent drive applied to cavity 2.
struct DriveSpec {
  double e0 = 0.0;       ///< drive strength (field units); 0 disables the drive
  double omega_d = 0.0;  ///< drive frequency (GHz)
};

/// Time-resolved quadratures and equal-time correlation matrix.
struct Trajectory {
  std::vector<double> times;                      ///< ns grid
  std::vector<std::pair<cplx, cplx>> quad;        ///< (<b1>, <b2>) per time
  std::vector<CMat2> corr;                        ///< C(t), C_{lm} = <b_l^dag b_m>
  std::vector<double> n1, n2;                     ///< photon numbers diag(C)
  std::vector<double> current;                    ///< lambda * Im C_21
  std::vector<int> validity_flag;                 ///< 1 while n1+n2 <= photon_bound
  double photon_bound = 50.0;
  int first_invalid_index = -1;                   ///< -1 if never exceeded
};

/// e^{-i H t} via the uniform closed form
///   e^{-i mu t} [cos(s t) I - i t sinc(s t) (H - mu I)],
/// mu = tr(H)/2, s^2 the discriminant. Away from eigenvalue coalescence this
/// equals the eigendecomposition result; at an exceptional point (s = 0) it
/// reduces exactly to the degenerate form e^{-i mu t}[I - i (H - mu I) t],
/// so no branch switch is needed (ep_tol is accepted for interface
/// stability and ignored).
CMat2 propagator(const CMat2& H, double t, double ep_tol = 1e-9);

/// Quadrature evolution under H with an optional coherent drive on cavity 2:
/// homogeneous term e^{-iHt} init plus
///   E0 e^{-i w_d t} (1 - e^{-i(H - w_d I) t}) (H - w_d I)^{-1} (0,1)^T.
/// Throws std::runtime_error if (H - w_d I) is singular while e0 > 0.
std::vector<std::pair<cplx, cplx>> evolve_quadratures(
    const CMat2& H, const DriveSpec& drive, std::pair<cplx, cplx> init,
    const std::vector<double>& times);

enum class CorrMethod { quadrature, eigenbasis };

/// Evolves the full correlation matrix from a coherent initial state
/// (C(0) = outer(conj(init), init)): classical part from the driven
/// quadratures plus the noise double integral with kernel M_11 = noise_kernel.
///
/// method quadrature: 2-D triangle-split trapezoid over (t', t'') with
/// Richardson extrapolation, step <= min(0.1/gamma, 0.05*T_osc); valid at
/// exceptional points. method eigenbasis: closed-form inner integrals in the
/// eigenbasis of H^T; throws std::domain_error at an exceptional point.
Trajectory evolve_correlations(const CMat2& H, const NoiseKernelSpec& spec,
                               std::pair<cplx, cplx> init_quad,
                               const std::vector<double>& times,
                               CorrMethod method,
                               const DriveSpec& drive = {},
                               double photon_bound = 50.0);

/// Noise part of C(t) alone (zero initial state, no drive).
CMat2 correlation_noise_part(const CMat2& H, const NoiseKernelSpec& spec,
                             double t, CorrMethod method);

/// Correlation matrix in the skewed (eigen) basis: Ctilde(t) = R^dag C(t) R
/// with R the unit-column right-eigenvector matrix of H^T. Evaluated in
/// closed form: Ctilde(t) = e^{i Lam* t} (R^dag C0 R) e^{-i Lam t} +
/// mtilde o W(t), where mtilde = R^dag e1 e1^T R and W are the analytic
/// double integrals of the noise kernel. Throws std::domain_error at an
/// exceptional point.
CMat2 skewed_correlations(const CMat2& H, const NoiseKernelSpec& spec,
                          const CMat2& C0, double t);

/// Diagonal weights mtilde_{ll} = |R_{1l}|^2 of the skewed noise source.
std::pair<double, double> skewed_mtilde_diag(const CMat2& H);

enum class LindbladModel { microscopic, phenomenological };

/// Fluctuation source matrix S of the local-Lindblad models:
/// microscopic (g^2 <N1>_ss / Gamma) * (I + sigma_z);
/// phenomenological (Gamma*delta - kappa1/2) * (I + sigma_z).
CMat2 lindblad_source(const SetupParams& p, const DqdSteadyState& ss,
                      LindbladModel model);

/// Evolution under the local-Lindblad reduction: quadratures follow
/// H_eff^(2) (symmetric off-diagonals) for both models; C obeys
/// dC/dt = i H^dag C - i C H + S, integrated in closed form through the
/// eigendecomposition of H (numeric fallback at its exceptional point).
Trajectory lindblad_evolve(const SetupParams& p, const DqdSteadyState& ss,
                           LindbladModel model, const DriveSpec& drive,
                           std::pair<cplx, cplx> init,
                           const std::vector<double>& times,
                           double photon_bound = 50.0);

/// Stationary correlation matrix of a Lindblad model: solves
/// i H^dag C - i C H + S = 0 as a 4x4 linear system. Requires all
/// eigenvalues of H strictly decaying; throws std::domain_error otherwise.
CMat2 lindblad_stationary(const SetupParams& p, const DqdSteadyState& ss,
                          LindbladModel model);

}  // namespace ptdqd
