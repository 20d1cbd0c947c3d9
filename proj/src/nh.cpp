#include "ptdqd/nh.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ptdqd/ness.hpp"

namespace ptdqd {

namespace {

SetupParams on_resonance_ellipse(const SetupParams& base, double theta) {
  SetupParams p = base;
  p.eps = base.omega0 * std::cos(theta);
  p.tc = 0.5 * base.omega0 * std::sin(theta);
  return p;
}

}  // namespace

CMat2 build_heff(const SetupParams& p, const DqdSteadyState& ss) {
  if (!(ss.delta < 1.0)) {
    throw std::invalid_argument("build_heff: requires delta < 1");
  }
  const cplx i{0.0, 1.0};
  CMat2 h;
  h.a = p.omega0 - i * (0.5 * p.kappa1) + i * (p.Gamma * ss.delta);
  h.b = p.lambda * (1.0 - ss.delta);
  h.c = p.lambda;
  h.d = p.omega0 - i * (0.5 * p.kappa2);
  if (p.kappa_extra != 0.0) {
    const cplx shift = -i * (0.5 * p.kappa_extra);
    h.a += shift;
    h.d += shift;
  }
  return h;
}

CMat2 build_heff_lindblad(const SetupParams& p, const DqdSteadyState& ss) {
  CMat2 h = build_heff(p, ss);
  h.b = p.lambda;
  return h;
}

double lambda_ep(const SetupParams& p, const DqdSteadyState& ss,
                 bool balanced) {
  if (!(ss.delta < 1.0)) {
    throw std::invalid_argument("lambda_ep: requires delta < 1");
  }
  const double root = std::sqrt(1.0 - ss.delta);
  if (balanced) {
    return p.kappa2 / (2.0 * root);
  }
  return std::abs(p.kappa2 - p.kappa1 + 2.0 * p.Gamma * ss.delta) /
         (4.0 * root);
}

Kappa2Thresholds kappa2_thresholds(const SetupParams& p,
                                   const DqdSteadyState& ss) {
  if (!(ss.delta < 1.0)) {
    throw std::invalid_argument("kappa2_thresholds: requires delta < 1");
  }
  Kappa2Thresholds out;
  const double gain = 2.0 * p.Gamma * ss.delta;
  out.kappa2_ep = p.kappa1 - gain + 4.0 * p.lambda * std::sqrt(1.0 - ss.delta);
  if (gain > p.kappa1) {
    out.kappa2_th =
        4.0 * p.lambda * p.lambda * (1.0 - ss.delta) / (gain - p.kappa1);
  }
  return out;
}

PtOperator pt_operator(const SetupParams& p, const DqdSteadyState& ss,
                       double balance_tol) {
  const double gain = 2.0 * p.Gamma * ss.delta;
  const double loss = p.kappa1 + p.kappa2;
  if (std::abs(gain - loss) > balance_tol * loss) {
    throw std::domain_error(
        "pt_operator: gain does not balance cavity losses within tolerance");
  }
  PtOperator out;
  // Angle fixed by requiring L * conj(H_eff) = H_eff * L with
  // L = cos(phi) * sigma_x - i sin(phi) * I.
  out.phi = std::atan(p.lambda * ss.delta / p.kappa2);
  const double c = std::cos(out.phi);
  const cplx is{0.0, std::sin(out.phi)};
  out.linear_part = CMat2{-is, cplx{c, 0.0}, cplx{c, 0.0}, -is};
  return out;
}

double balance_rhs(const SetupParams& p) {
  return p.Gamma * (p.kappa1 + p.kappa2) / (2.0 * p.g0 * p.g0);
}

double balance_lhs(const SetupParams& p, double theta) {
  const SetupParams pt = on_resonance_ellipse(p, theta);
  const DqdSteadyState ss = solve_ness(pt);
  const double s = std::sin(theta);
  return ss.dn * s * s;
}

BalanceScan tune_balance_scan(const SetupParams& p, int n_grid) {
  if (n_grid < 4) {
    throw std::invalid_argument("tune_balance: grid too coarse");
  }
  constexpr double kThetaMargin = 1e-3;
  constexpr double kEpsResolution = 1e-4;
  const double lo = kThetaMargin;
  const double hi = 0.5 * M_PI - kThetaMargin;
  const double step = (hi - lo) / (n_grid - 1);

  BalanceScan scan;
  scan.rhs = balance_rhs(p);
  scan.theta.resize(n_grid);
  scan.lhs.resize(n_grid);
  std::vector<double> gap(n_grid);
  for (int i = 0; i < n_grid; ++i) {
    scan.theta[i] = lo + i * step;
    scan.lhs[i] = balance_lhs(p, scan.theta[i]);
    gap[i] = scan.lhs[i] - scan.rhs;
  }

  std::vector<int> brackets;
  for (int i = 0; i + 1 < n_grid; ++i) {
    if (gap[i] == 0.0 || gap[i] * gap[i + 1] < 0.0) {
      // Merge crossings closer than two grid steps; the curve is smooth.
      if (!brackets.empty() && i - brackets.back() < 2) continue;
      brackets.push_back(i);
    }
  }

  for (int idx : brackets) {
    double a = scan.theta[idx], b = scan.theta[idx + 1];
    double ga = gap[idx];
    auto eps_of = [&](double th) { return p.omega0 * std::cos(th); };
    while (std::abs(eps_of(a) - eps_of(b)) > kEpsResolution) {
      const double mid = 0.5 * (a + b);
      const double gm = balance_lhs(p, mid) - scan.rhs;
      if (gm == 0.0) {
        a = b = mid;
        break;
      }
      if (ga * gm < 0.0) {
        b = mid;
      } else {
        a = mid;
        ga = gm;
      }
    }
    const double th = 0.5 * (a + b);
    const SetupParams pt = on_resonance_ellipse(p, th);
    const DqdSteadyState ss = solve_ness(pt);
    scan.roots.push_back(BalanceRoot{th, pt.eps, pt.tc, ss.dn});
  }
  return scan;
}

std::vector<BalanceRoot> tune_balance(const SetupParams& p, int n_grid) {
  return tune_balance_scan(p, n_grid).roots;
}

}  // namespace ptdqd
