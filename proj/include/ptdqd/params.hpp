#pragma once

#include <string>
#include <vector>

namespace ptdqd {

/// Physical parameters of the two-cavity + double-quantum-dot setup.
///
/// Units: every rate/frequency is in GHz, every time in ns, with hbar = 1
/// (so 1 GHz^-1 = 1 ns and omega*t is a phase). Defaults are the reference
/// operating point used throughout the test suite.
struct SetupParams {
  double omega0 = 8.0;        ///< cavity frequency (GHz)
  double lambda = 0.010;      ///< intercavity coupling (GHz)
  double kappa1 = 0.002;      ///< loss rate of cavity 1 (GHz)
  double kappa2 = 0.002;      ///< loss rate of cavity 2 (GHz)
  double kappa_extra = 0.0;   ///< additional common loss added to both cavities (GHz)
  double g0 = 0.06;           ///< bare DQD-cavity coupling (GHz)
  double Gamma = 0.09;        ///< lead spectral constant (GHz)
  double eps = 7.760;         ///< DQD detuning (GHz)
  double tc = 0.973;          ///< DQD interdot hopping (GHz)
  double V = 300.0;           ///< DQD charging energy (GHz)
  double mu1 = 30.0;          ///< source lead chemical potential (GHz)
  double mu2 = -30.0;         ///< drain lead chemical potential (GHz)
  double beta = 10.0;         ///< inverse temperature (1/GHz)
  double gamma_b = 5e-3;      ///< dimensionless phonon coupling (calibration input)
  double omega_c = 20.0;      ///< phonon spectral-density frequency scale (GHz)
  double omega_max = 200.0;   ///< phonon Gaussian cutoff, default 10*omega_c (GHz)
  double omega_cut = 800.0;   ///< lead band half-width for principal-value shifts,
                              ///< default 100*omega0 (GHz)
  bool lamb_shift = true;     ///< keep principal-value (Lamb-type) shifts

  /// Throws std::invalid_argument if any structural invariant is violated:
  /// omega0, Gamma, beta, tc > 0; kappa1, kappa2, kappa_extra, gamma_b >= 0;
  /// V > mu1 > 0 > mu2; omega_c, omega_max, omega_cut > 0.
  void validate() const;
};

/// DQD eigenbasis quantities obtained by rotating the (eps, tc) Hamiltonian.
struct RotatedDqd {
  double theta;    ///< mixing angle atan2(2*tc, eps), in (0, pi)
  double omega_q;  ///< qubit splitting sqrt(eps^2 + 4 tc^2) (GHz)
  double g;        ///< effective cavity-DQD coupling g0*sin(theta) (GHz)
};

/// Rotates the DQD into its eigenbasis. Requires tc > 0 (enforced by
/// SetupParams::validate).
RotatedDqd rotated_dqd(const SetupParams& p);

/// Phonon spectral density gamma_b*omega*[1 - sinc(omega/omega_c)] with a
/// Gaussian cutoff exp(-omega^2/(2*omega_max^2)); sinc(x) = sin(x)/x,
/// sinc(0) = 1. Requires omega >= 0.
double j_ph(double omega, const SetupParams& p);

/// Fermi function 1/(e^{beta(omega-mu)} + 1), overflow-safe.
double fermi(double omega, double mu, double beta);

/// Bose function 1/(e^{beta*omega} - 1), overflow-safe.
/// Throws std::domain_error at omega == 0.
double bose(double omega, double beta);

/// One validity condition of the effective-model derivation.
struct RegimeCondition {
  std::string name;  ///< short description of the inequality
  double ratio;      ///< dimensionless margin (<= threshold means pass)
  double threshold;  ///< pass threshold for the ratio
  bool pass;
};

struct RegimeReport {
  std::vector<RegimeCondition> conditions;
  bool all_pass = true;
};

/// Checks the separations of scale the effective description relies on:
/// omega_q = omega0 resonance, beta*omega0 >> 1, g*sqrt(n) <~ Gamma,
/// omega0/2 << -mu2, mu1 << V, kappa << lambda << Gamma << omega0.
/// Strict "<<" is tested as ratio <= 0.25; never throws.
RegimeReport validate_regime(const SetupParams& p, double n_photons_est);

}  // namespace ptdqd
