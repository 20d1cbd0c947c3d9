#pragma once

#include <optional>
#include <vector>

#include "ptdqd/cmat2.hpp"
#include "ptdqd/ness.hpp"
#include "ptdqd/params.hpp"

namespace ptdqd {

/// Effective non-Hermitian cavity Hamiltonian
///   [[omega0 - i*kappa1/2 + i*Gamma*delta, lambda*(1-delta)],
///    [lambda,                              omega0 - i*kappa2/2]]
/// shifted by -i*(kappa_extra/2)*I when kappa_extra > 0.
CMat2 build_heff(const SetupParams& p, const DqdSteadyState& ss);

/// Same as build_heff but with symmetric off-diagonals (lambda, lambda), as
/// produced by the local-Lindblad reduction.
CMat2 build_heff_lindblad(const SetupParams& p, const DqdSteadyState& ss);

/// Intercavity coupling at which the two eigenvalues coalesce.
/// balanced: kappa2/(2*sqrt(1-delta)); general:
/// |kappa2 - kappa1 + 2*Gamma*delta| / (4*sqrt(1-delta)).
double lambda_ep(const SetupParams& p, const DqdSteadyState& ss, bool balanced);

struct Kappa2Thresholds {
  double kappa2_ep;                 ///< eigenvalue-coalescence loss (GHz)
  std::optional<double> kappa2_th;  ///< lasing onset, absent if 2*Gamma*delta <= kappa1
};

/// Loss thresholds of cavity 2 at fixed gain:
///   kappa2_ep = kappa1 - 2*Gamma*delta + 4*lambda*sqrt(1-delta)
///   kappa2_th = 4*lambda^2*(1-delta) / (2*Gamma*delta - kappa1)
/// kappa2_th is the exact zero crossing of max Im(eigenvalue); it is absent
/// when 2*Gamma*delta <= kappa1 (the system stays dissipative for all
/// kappa2 >= 0).
Kappa2Thresholds kappa2_thresholds(const SetupParams& p,
                                   const DqdSteadyState& ss);

struct PtOperator {
  double phi;         ///< mode-exchange rotation angle (rad)
  CMat2 linear_part;  ///< L = R_x(2*phi) * sigma_x; full operator is L followed
                      ///< by complex conjugation
};

/// Antilinear symmetry of the balanced Hamiltonian: L*conj(H_eff) = H_eff*L
/// with phi = atan(lambda*delta/kappa2), the unique angle for which the
/// commutation residual vanishes. Throws std::domain_error when the balance
/// condition |kappa1 + kappa2 - 2*Gamma*delta| exceeds
/// balance_tol * (kappa1 + kappa2).
PtOperator pt_operator(const SetupParams& p, const DqdSteadyState& ss,
                       double balance_tol = 1e-3);

struct BalanceRoot {
  double theta;  ///< mixing angle of the root (rad)
  double eps;    ///< DQD detuning on the resonance ellipse (GHz)
  double tc;     ///< DQD hopping on the resonance ellipse (GHz)
  double dn;     ///< steady inversion at the root
};

/// Full balance scan: the theta grid with its left-hand-side values, the
/// constant right-hand side, and the refined roots.
struct BalanceScan {
  std::vector<double> theta;  ///< grid angles (rad)
  std::vector<double> lhs;    ///< dN_ss(theta)*sin^2(theta) per grid angle
  double rhs;                 ///< Gamma*(kappa1+kappa2)/(2*g0^2)
  std::vector<BalanceRoot> roots;
};

/// Scans the resonance ellipse eps = omega0*cos(theta), tc =
/// (omega0/2)*sin(theta) for the gain-loss balance condition
///   dN_ss(theta)*sin^2(theta) = Gamma*(kappa1+kappa2)/(2*g0^2),
/// theta in (margin, pi/2 - margin), default 200-point grid, each bracketed
/// crossing refined by bisection to eps-resolution 1e-4 GHz; crossings
/// closer than two grid steps are merged. Finds all roots (possibly none).
BalanceScan tune_balance_scan(const SetupParams& p, int n_grid = 200);

/// Roots-only convenience wrapper around tune_balance_scan.
std::vector<BalanceRoot> tune_balance(const SetupParams& p, int n_grid = 200);

/// Left-hand side of the balance condition at angle theta (helper for
/// sweep outputs): dN_ss(theta)*sin^2(theta) with (eps, tc) on the ellipse.
double balance_lhs(const SetupParams& p, double theta);

/// Right-hand side of the balance condition,
/// Gamma*(kappa1+kappa2)/(2*g0^2).
double balance_rhs(const SetupParams& p);

}  // namespace ptdqd
