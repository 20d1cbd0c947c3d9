#include "ptdqd/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ptdqd {

void SetupParams::validate() const {
  auto fail = [](const std::string& msg) {
    throw std::invalid_argument("SetupParams: " + msg);
  };
  if (!(omega0 > 0.0)) fail("omega0 must be > 0");
  if (!(Gamma > 0.0)) fail("Gamma must be > 0");
  if (!(beta > 0.0)) fail("beta must be > 0");
  if (!(tc > 0.0)) fail("tc must be > 0");
  if (!(kappa1 >= 0.0)) fail("kappa1 must be >= 0");
  if (!(kappa2 >= 0.0)) fail("kappa2 must be >= 0");
  if (!(kappa_extra >= 0.0)) fail("kappa_extra must be >= 0");
  if (!(gamma_b >= 0.0)) fail("gamma_b must be >= 0");
  if (!(lambda >= 0.0)) fail("lambda must be >= 0");
  if (!(V > mu1)) fail("requires V > mu1");
  if (!(mu1 > 0.0)) fail("requires mu1 > 0");
  if (!(0.0 > mu2)) fail("requires mu2 < 0");
  if (!(omega_c > 0.0)) fail("omega_c must be > 0");
  if (!(omega_max > 0.0)) fail("omega_max must be > 0");
  if (!(omega_cut > 0.0)) fail("omega_cut must be > 0");
}

RotatedDqd rotated_dqd(const SetupParams& p) {
  p.validate();
  RotatedDqd r;
  r.theta = std::atan2(2.0 * p.tc, p.eps);
  r.omega_q = std::sqrt(p.eps * p.eps + 4.0 * p.tc * p.tc);
  r.g = p.g0 * (2.0 * p.tc / r.omega_q);
  return r;
}

namespace {

// sin(x)/x with a series branch so the omega -> 0 limit is exact.
double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
  }
  return std::sin(x) / x;
}

}  // namespace

double j_ph(double omega, const SetupParams& p) {
  if (omega < 0.0) throw std::domain_error("j_ph: omega must be >= 0");
  const double x = omega / p.omega_c;
  const double cutoff = std::exp(-omega * omega / (2.0 * p.omega_max * p.omega_max));
  return p.gamma_b * omega * (1.0 - sinc(x)) * cutoff;
}

double fermi(double omega, double mu, double beta) {
  const double x = beta * (omega - mu);
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

double bose(double omega, double beta) {
  if (omega == 0.0) throw std::domain_error("bose: omega must be nonzero");
  // 1/expm1(x) is accurate for small |x| and degrades gracefully to 0 / -1
  // for large positive / negative x.
  return 1.0 / std::expm1(beta * omega);
}

RegimeReport validate_regime(const SetupParams& p, double n_photons_est) {
  RegimeReport rep;
  const RotatedDqd r = rotated_dqd(p);
  auto add = [&rep](std::string name, double ratio, double threshold) {
    RegimeCondition c{std::move(name), ratio, threshold, ratio <= threshold};
    rep.all_pass = rep.all_pass && c.pass;
    rep.conditions.push_back(std::move(c));
  };

  add("resonance |omega_q - omega0|/omega0",
      std::abs(r.omega_q - p.omega0) / p.omega0, 1e-3);
  add("low temperature 1/(beta*omega0)", 1.0 / (p.beta * p.omega0), 0.25);
  add("weak coupling g*sqrt(n)/Gamma",
      r.g * std::sqrt(std::max(n_photons_est, 0.0)) / p.Gamma, 1.0);
  add("bias window (omega0/2)/(-mu2)",
      p.mu2 < 0.0 ? (p.omega0 / 2.0) / (-p.mu2)
                  : std::numeric_limits<double>::infinity(),
      0.25);
  add("charging energy mu1/V", p.mu1 / p.V, 0.25);
  const double kappa_total = std::max({p.kappa1, p.kappa2, p.kappa_extra});
  add("loss << coupling kappa/lambda",
      p.lambda > 0.0 ? kappa_total / p.lambda
                     : std::numeric_limits<double>::infinity(),
      0.25);
  add("coupling << linewidth lambda/Gamma", p.lambda / p.Gamma, 0.25);
  add("linewidth << frequency Gamma/omega0", p.Gamma / p.omega0, 0.25);
  return rep;
}

}  // namespace ptdqd
