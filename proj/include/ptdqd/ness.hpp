#pragma once

#include <complex>

#include "ptdqd/params.hpp"

namespace ptdqd {

/// Steady state of the isolated voltage-biased DQD.
struct DqdSteadyState {
  double n1;                  ///< <N_1>_ss, occupation of the upper DQD mode
  double n2;                  ///< <N_2>_ss, occupation of the lower DQD mode
  std::complex<double> coh;   ///< <A_2^dag A_1>_ss
  double dn;                  ///< population inversion n1 - n2
  double delta;               ///< gain parameter g^2 * dn / Gamma^2
  double condition_estimate;  ///< Frobenius condition estimate of the solve
};

/// Lorentzian quantum-noise kernel parameters fed to the correlation
/// dynamics: amp = g^2 * <N_1>_ss, gamma = Gamma, centered at omega0.
struct NoiseKernelSpec {
  double amp;     ///< kernel value at equal times (GHz^2)
  double gamma;   ///< kernel decay rate (GHz)
  double omega0;  ///< kernel center frequency (GHz)
};

/// Phonon-bath half-range Fourier transform F_B(delta_omega).
///
/// Real part: J(|d|)*n_B(|d|)/2 for d > 0 (absorption), J(|d|)*(n_B+1)/2
/// for d < 0 (emission), 0 at d = 0; satisfies the detailed-balance ratio
/// Re F_B(d)/Re F_B(-d) = e^{-beta d}. Imaginary part: principal-value
/// frequency integral (Lamb-type shift), dropped when p.lamb_shift is false.
std::complex<double> phonon_half_ft(double delta_omega, const SetupParams& p);

/// Lead hybridization functions for mode indices alpha, nu in {1, 2}.
struct FermiSpectralParts {
  std::complex<double> FF;  ///< occupied-band part F + i*F^Delta
  std::complex<double> ff;  ///< full-band part f + i*f^Delta
};

/// Wide-band lead spectral functions in the rotated DQD basis:
///   F_{an}(w) = Gamma * sum_l Phi_{al} Phi_{nl} n_F(w - mu_l)
///   f_{an}(w) = Gamma * delta_{an}
/// plus their principal-value partners over the band (-omega_cut, omega_cut).
/// Imaginary parts are zeroed when p.lamb_shift is false.
FermiSpectralParts fermi_spectral(int alpha, int nu, double omega,
                                  const SetupParams& p);

/// Solves the stationary kinetic equations of the DQD (populations and
/// interlevel coherence) as a real 4x4 linear system with full pivoting.
/// Throws std::runtime_error when the system is numerically singular.
DqdSteadyState solve_ness(const SetupParams& p);

/// Builds the noise-kernel parameters from a solved steady state.
NoiseKernelSpec make_noise_kernel_spec(const SetupParams& p,
                                       const DqdSteadyState& ss);

/// Two-time noise correlation <xi^dag(t1) xi(t2)>: the Fourier transform of
/// the Lorentzian power spectrum,
///   amp * exp(-gamma*|t1-t2|) * exp(+i*omega0*(t1-t2)),
/// Hermitian under (t1, t2) exchange.
std::complex<double> noise_kernel(double t1, double t2,
                                  const NoiseKernelSpec& spec);

}  // namespace ptdqd
