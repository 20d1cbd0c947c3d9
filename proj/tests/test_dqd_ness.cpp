#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "ptdqd/ness.hpp"
#include "ptdqd/params.hpp"
#include "ptdqd/quadrature.hpp"

#ifdef PTDQD_HAVE_EIGEN
#include <Eigen/Dense>
#endif

using namespace ptdqd;
using cd = std::complex<double>;

namespace {

// Half-range Fourier transform of the phonon-bath correlation function,
// computed from its time-domain definition with an explicit exponential
// regulator eta:
//   F_B^eta(d) = int_0^U dw/(2pi) J(w) [ n_B/(eta + i(d-w))
//                                        + (n_B+1)/(eta + i(d+w)) ],
// followed by Richardson extrapolation eta -> 0. Independent of the
// delta-function/principal-value split used by the library.
cd brute_phonon_half_ft(double d, double eta, const SetupParams& p) {
  const double U = 10.0 * p.omega_max;
  auto integrand = [&](double w) -> cd {
    if (w <= 0.0) return {0.0, 0.0};
    const double J = j_ph(w, p);
    const double nb = bose(w, p.beta);
    const cd k1 = 1.0 / cd(eta, d - w);
    const cd k2 = 1.0 / cd(eta, d + w);
    return (J * nb * k1 + J * (nb + 1.0) * k2) / (2.0 * M_PI);
  };
  // Split so the adaptive rule sees the eta-wide structure at w = |d|.
  std::vector<double> cuts{0.0};
  const double pole = std::abs(d);
  if (pole > 0.5 && pole < U - 0.5) {
    cuts.push_back(pole - 0.5);
    cuts.push_back(pole + 0.5);
  }
  cuts.push_back(U);
  cd total{0.0, 0.0};
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double re = integrate(
        [&](double w) { return integrand(w).real(); }, cuts[i], cuts[i + 1], 1e-11);
    const double im = integrate(
        [&](double w) { return integrand(w).imag(); }, cuts[i], cuts[i + 1], 1e-11);
    total += cd(re, im);
  }
  return total;
}

cd brute_phonon_half_ft_extrap(double d, const SetupParams& p) {
  const cd f1 = brute_phonon_half_ft(d, 2e-3, p);
  const cd f2 = brute_phonon_half_ft(d, 1e-3, p);
  return (4.0 * f2 - f1) / 3.0;
}

// Kinetic right-hand side of the DQD master equations, written out
// explicitly (no index loops) as an independent transcription for residual
// checks: x = (N1, N2, Re c, Im c) with c = <A_1^dag A_2>.
std::array<double, 4> explicit_kinetic_rhs(const SetupParams& p,
                                           const std::array<double, 4>& x) {
  const RotatedDqd r = rotated_dqd(p);
  const double th = r.theta;
  const double m11 = std::cos(th), m12 = -std::sin(th);
  const double m21 = -std::sin(th), m22 = -std::cos(th);
  const double w1 = +0.5 * r.omega_q, w2 = -0.5 * r.omega_q;

  const cd fb11 = phonon_half_ft(0.0, p);
  const cd fb12 = phonon_half_ft(w1 - w2, p);
  const cd fb21 = phonon_half_ft(w2 - w1, p);
  const cd fb22 = phonon_half_ft(0.0, p);
  const cd F21 = fermi_spectral(2, 1, w1, p).FF;
  const cd F12 = fermi_spectral(1, 2, w1, p).FF;
  const double F11 = fermi_spectral(1, 1, w1, p).FF.real();
  const double F22 = fermi_spectral(2, 2, w2, p).FF.real();

  const double N1 = x[0], N2 = x[1];
  const cd c{x[2], x[3]};
  const cd cb = std::conj(c);

  // dN1/dt: phonon exchange with mode 2 plus lead gain/decay.
  const cd s1 = m12 * (m21 * fb21 * cd(N1, 0.0) - m11 * fb11 * cb) +
                m12 * (m22 * fb22 * c - m12 * fb12 * cd(N2, 0.0));
  const double dN1 =
      -2.0 * s1.real() - 2.0 * (p.Gamma * N1 - F11 * (1.0 - N2));

  // dN2/dt: mirror image.
  const cd s2 = m21 * (m11 * fb11 * cb - m21 * fb21 * cd(N1, 0.0)) +
                m21 * (m12 * fb12 * cd(N2, 0.0) - m22 * fb22 * c);
  const double dN2 =
      -2.0 * s2.real() - 2.0 * (p.Gamma * N2 - F22 * (1.0 - N1));

  // dc/dt: free rotation, phonon dephasing/exchange, lead terms.
  cd dc = cd(0.0, -1.0) * r.omega_q * c;
  cd ph{0.0, 0.0};
  // direct terms, (a, n) = (1,1), (1,2), (2,1), (2,2)
  ph += m21 * (m11 * fb11 * cd(N1, 0.0) - m11 * std::conj(fb11) * cd(N1, 0.0));
  ph += m21 * (m12 * fb12 * c - m12 * std::conj(fb12) * cb);
  ph += m22 * (m21 * fb21 * cd(N1, 0.0) - m11 * std::conj(fb11) * c);
  ph += m22 * (m22 * fb22 * c - m12 * std::conj(fb12) * cd(N2, 0.0));
  // conjugated mode-swapped partners, same (a, n) order
  ph += std::conj(m11 * (m11 * fb11 * cb - m21 * std::conj(fb21) * cd(N1, 0.0)));
  ph += std::conj(m11 * (m12 * fb12 * cd(N2, 0.0) - m22 * std::conj(fb22) * cb));
  ph += std::conj(m12 * (m21 * fb21 * cb - m21 * std::conj(fb21) * c));
  ph += std::conj(m12 * (m22 * fb22 * cd(N2, 0.0) -
                         m22 * std::conj(fb22) * cd(N2, 0.0)));
  dc -= ph;
  dc -= p.Gamma * c - F21 * (1.0 - N2) + std::conj(F12) * (1.0 - N1);

  return {dN1, dN2, dc.real(), dc.imag()};
}

}  // namespace

TEST_CASE("phonon transform vanishes identically without phonon coupling") {
  SetupParams p;
  p.gamma_b = 0.0;
  for (double d : {-8.0, -0.5, 0.0, 0.5, 8.0}) {
    CHECK(phonon_half_ft(d, p) == cd(0.0, 0.0));
  }
}

TEST_CASE("phonon transform is finite at zero frequency difference") {
  // Regression: the Lamb-type integrals are 0/0-safe at d = 0.
  for (double gb : {5e-3, 0.736}) {
    SetupParams p;
    p.gamma_b = gb;
    const cd f = phonon_half_ft(0.0, p);
    CHECK(std::isfinite(f.real()));
    CHECK(std::isfinite(f.imag()));
    CHECK(f.real() == 0.0);
    CHECK(f.imag() < 0.0);  // net downward level repulsion from the bath
  }
}

TEST_CASE("phonon absorption and emission weights follow the spectral density") {
  SetupParams p;
  for (double d : {0.2, 2.0, 8.0}) {
    const double absorb = phonon_half_ft(d, p).real();
    const double emit = phonon_half_ft(-d, p).real();
    CHECK(absorb == doctest::Approx(0.5 * j_ph(d, p) * bose(d, p.beta)).epsilon(1e-14));
    CHECK(emit ==
          doctest::Approx(0.5 * j_ph(d, p) * (bose(d, p.beta) + 1.0)).epsilon(1e-14));
  }
  CHECK(phonon_half_ft(8.0, p).real() > 0.0);
}

TEST_CASE("emission exceeds absorption by the Boltzmann factor") {
  SetupParams p;
  for (double d : {0.2, 0.5}) {
    const double ratio =
        phonon_half_ft(d, p).real() / phonon_half_ft(-d, p).real();
    CHECK(ratio == doctest::Approx(std::exp(-p.beta * d)).epsilon(1e-12));
  }
}

TEST_CASE("phonon transform matches a regulator-based time-domain evaluation") {
  SetupParams p;
  for (double d : {0.2, 4.0, -4.0}) {
    const cd lib = phonon_half_ft(d, p);
    const cd brute = brute_phonon_half_ft_extrap(d, p);
    CHECK(std::abs(lib - brute) <= 2e-5 * std::abs(lib));
  }
}

TEST_CASE("disabling the frequency shifts zeroes the imaginary part only") {
  SetupParams p;
  SetupParams q = p;
  q.lamb_shift = false;
  for (double d : {-4.0, 0.0, 4.0}) {
    const cd with = phonon_half_ft(d, p);
    const cd without = phonon_half_ft(d, q);
    CHECK(without.imag() == 0.0);
    CHECK(without.real() == with.real());
    CHECK(with.imag() != 0.0);
  }
}

TEST_CASE("lead spectral functions: flat in-band full-band part") {
  SetupParams p;
  for (double w : {-500.0, -30.0, 0.0, 30.0, 500.0}) {
    const FermiSpectralParts d = fermi_spectral(1, 1, w, p);
    CHECK(d.ff.real() == p.Gamma);
    const FermiSpectralParts o = fermi_spectral(1, 2, w, p);
    CHECK(o.ff.real() == 0.0);
  }
  // Outside the band the spectral weights vanish; the band still produces a
  // finite level shift at out-of-band probe frequencies.
  const FermiSpectralParts out = fermi_spectral(1, 1, 900.0, p);
  CHECK(out.ff == cd(0.0, 0.0));
  CHECK(out.FF.real() == 0.0);
  CHECK(std::isfinite(out.FF.imag()));
  CHECK(out.FF.imag() != 0.0);
}

TEST_CASE("occupied-band part saturates to the full-band part deep below the leads") {
  SetupParams p;
  const FermiSpectralParts low = fermi_spectral(1, 1, -700.0, p);
  CHECK(low.FF.real() == doctest::Approx(p.Gamma).epsilon(1e-13));
  const FermiSpectralParts high = fermi_spectral(1, 1, 700.0, p);
  CHECK(std::abs(high.FF.real()) <= 1e-15);
}

TEST_CASE("lead spectral functions are symmetric in the mode indices") {
  SetupParams p;
  for (double w : {-4.0, 0.0, 4.0}) {
    const FermiSpectralParts a = fermi_spectral(1, 2, w, p);
    const FermiSpectralParts b = fermi_spectral(2, 1, w, p);
    CHECK(a.FF == b.FF);
    CHECK(a.ff == b.ff);
  }
  CHECK_THROWS_AS(fermi_spectral(0, 1, 0.0, p), std::invalid_argument);
}

TEST_CASE("full-band frequency shift matches the band principal value") {
  SetupParams p;
  for (double w : {-40.0, 4.0, 400.0}) {
    const double lib = fermi_spectral(1, 1, w, p).ff.imag();
    const double pv =
        p.Gamma / M_PI *
        pv_integrate([](double) { return 1.0; }, w, -p.omega_cut, p.omega_cut,
                     1e-11);
    CHECK(lib == doctest::Approx(pv).epsilon(1e-8));
  }
}

TEST_CASE("occupied-band frequency shift matches a subtraction-form principal value") {
  // P int n(x)/(x-w) dx = int [n(x)-n(w)]/(x-w) dx + n(w) ln((W-w)/(W+w)):
  // the subtracted integrand is regular, so a plain adaptive pass suffices.
  SetupParams p;
  const RotatedDqd r = rotated_dqd(p);
  const double c2 = std::pow(std::cos(0.5 * r.theta), 2);
  const double s2 = std::pow(std::sin(0.5 * r.theta), 2);
  const double w = p.mu1;  // probe right at the source chemical potential
  const double W = p.omega_cut;
  auto pv_sub = [&](double mu) {
    const double nw = fermi(w, mu, p.beta);
    const double reg = integrate(
        [&](double x) {
          const double d = x - w;
          if (std::abs(d) < 1e-9) {
            // derivative limit of the subtracted quotient
            const double e = std::exp(p.beta * (w - mu));
            return -p.beta * e / std::pow(1.0 + e, 2);
          }
          return (fermi(x, mu, p.beta) - nw) / d;
        },
        -W, W, 1e-10);
    return reg + nw * std::log((W - w) / (W + w));
  };
  const double oracle = p.Gamma / M_PI * (c2 * pv_sub(p.mu1) + s2 * pv_sub(p.mu2));
  const double lib = fermi_spectral(1, 1, w, p).FF.imag();
  CHECK(lib == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("steady state reproduces the reference inversion at the calibrated phonon coupling") {
  SetupParams p;
  p.gamma_b = 0.736;
  p.eps = 7.760;
  p.tc = 0.973;
  CHECK(solve_ness(p).dn == doctest::Approx(0.846).epsilon(0.02));
  p.eps = 5.208;
  p.tc = 3.036;
  CHECK(solve_ness(p).dn == doctest::Approx(0.087).epsilon(0.02));
}

TEST_CASE("steady-state occupations stay physical across the resonance ellipse") {
  for (double gb : {0.0, 5e-3, 0.736}) {
    for (int i = 0; i < 20; ++i) {
      const double th = 0.05 + (0.5 * M_PI - 0.1) * i / 19.0;
      SetupParams p;
      p.gamma_b = gb;
      p.eps = p.omega0 * std::cos(th);
      p.tc = 0.5 * p.omega0 * std::sin(th);
      const DqdSteadyState ss = solve_ness(p);
      INFO("gamma_b=", gb, " theta=", th);
      CHECK(ss.n1 >= 0.0);
      CHECK(ss.n1 <= 1.0);
      CHECK(ss.n2 >= 0.0);
      CHECK(ss.n2 <= 1.0);
      CHECK(std::abs(ss.dn) <= 1.0);
      CHECK(ss.delta < 1.0);
      // Strong interdot repulsion keeps double occupancy negligible.
      CHECK(ss.n1 + ss.n2 <= 1.0 + 1e-9);
      CHECK(ss.dn == ss.n1 - ss.n2);
      const RotatedDqd r = rotated_dqd(p);
      CHECK(ss.delta ==
            doctest::Approx(r.g * r.g * ss.dn / (p.Gamma * p.Gamma)).epsilon(1e-13));
      CHECK(std::isfinite(ss.condition_estimate));
      CHECK(ss.condition_estimate >= 1.0);
    }
  }
}

TEST_CASE("vanishing bias window leaves the DQD in its thermal ground state") {
  SetupParams p;
  p.mu1 = 1e-6;
  p.mu2 = -1e-6;
  const DqdSteadyState ss = solve_ness(p);
  CHECK(ss.dn <= 0.0);
  CHECK(ss.n2 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(ss.n1 <= 1e-6);
}

TEST_CASE("steady state solves the kinetic equations to numerical precision") {
  for (double gb : {0.0, 0.736}) {
    for (double eps : {7.760, 5.208, 2.0}) {
      SetupParams p;
      p.gamma_b = gb;
      p.eps = eps;
      p.tc = 0.5 * std::sqrt(p.omega0 * p.omega0 - eps * eps);
      const DqdSteadyState ss = solve_ness(p);
      const std::array<double, 4> x{ss.n1, ss.n2, std::real(std::conj(ss.coh)),
                                    std::imag(std::conj(ss.coh))};
      const std::array<double, 4> rhs = explicit_kinetic_rhs(p, x);
      for (double v : rhs) {
        INFO("gamma_b=", gb, " eps=", eps);
        CHECK(std::abs(v) <= 1e-10 * p.Gamma);
      }
    }
  }
}

TEST_CASE("steady-state solver validates its inputs") {
  SetupParams p;
  p.mu2 = 1.0;  // drain must sit below zero
  CHECK_THROWS_AS(solve_ness(p), std::invalid_argument);
}

TEST_CASE("noise kernel parameters derive from the solved steady state") {
  SetupParams p;
  p.gamma_b = 0.736;
  const DqdSteadyState ss = solve_ness(p);
  const RotatedDqd r = rotated_dqd(p);
  const NoiseKernelSpec spec = make_noise_kernel_spec(p, ss);
  CHECK(spec.amp == doctest::Approx(r.g * r.g * ss.n1).epsilon(1e-14));
  CHECK(spec.gamma == p.Gamma);
  CHECK(spec.omega0 == p.omega0);
}

TEST_CASE("noise kernel: equal-time value, envelope decay, Hermiticity") {
  const NoiseKernelSpec spec{1.9e-4, 0.09, 8.0};
  CHECK(noise_kernel(3.0, 3.0, spec) == cd(spec.amp, 0.0));
  const double tau = 5.0 / spec.gamma;
  CHECK(std::abs(noise_kernel(tau, 0.0, spec)) ==
        doctest::Approx(spec.amp * std::exp(-5.0)).epsilon(1e-12));
  for (double t1 : {0.0, 1.7, 12.0}) {
    for (double t2 : {0.4, 3.9, 30.0}) {
      CHECK(noise_kernel(t1, t2, spec) == std::conj(noise_kernel(t2, t1, spec)));
    }
  }
}

TEST_CASE("noise kernel forward transform is the stated Lorentzian spectrum") {
  const NoiseKernelSpec spec{1.9e-4, 0.09, 8.0};
  const double T = 50.0 / spec.gamma;   // exponential truncation ~ e^{-50}
  const int n = (1 << 17) + 1;
  const double h = 2.0 * T / (n - 1);
  for (double du : {0.0, spec.gamma, -spec.gamma, 5.0 * spec.gamma}) {
    const double w = spec.omega0 + du;
    cd acc{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
      const double tau = -T + i * h;
      const double wgt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      acc += wgt * std::exp(cd(0.0, -w * tau)) * noise_kernel(tau, 0.0, spec);
    }
    acc *= h;
    const double expected =
        2.0 * spec.amp * spec.gamma / (spec.gamma * spec.gamma + du * du);
    CHECK(std::abs(acc.imag()) <= 1e-6 * expected);
    CHECK(acc.real() == doctest::Approx(expected).epsilon(2e-6));
  }
}

TEST_CASE("noise kernel is recovered from its spectrum by inverse transform") {
  // Inverse transform of the Lorentzian over a +-50*gamma window with a
  // three-term integration-by-parts correction for the slowly decaying tail.
  const NoiseKernelSpec spec{1.9e-4, 0.09, 8.0};
  const double gam = spec.gamma, amp = spec.amp;
  const double W = 50.0 * gam;
  auto g = [&](double u) { return 1.0 / (gam * gam + u * u); };
  auto gp = [&](double u) {
    return -2.0 * u / std::pow(gam * gam + u * u, 2);
  };
  auto gpp = [&](double u) {
    return (6.0 * u * u - 2.0 * gam * gam) / std::pow(gam * gam + u * u, 3);
  };
  auto recover = [&](double tau) -> cd {
    const int n = (1 << 17) + 1;
    const double h = 2.0 * W / (n - 1);
    cd acc{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
      const double u = -W + i * h;
      const double wgt = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      acc += wgt * std::exp(cd(0.0, u * tau)) * (2.0 * amp * gam * g(u));
    }
    acc *= h / (2.0 * M_PI);
    const double tail =
        (amp * gam / M_PI) * 2.0 *
        (-std::sin(W * tau) * g(W) / tau - std::cos(W * tau) * gp(W) / (tau * tau) +
         std::sin(W * tau) * gpp(W) / (tau * tau * tau));
    return (acc + tail) * std::exp(cd(0.0, spec.omega0 * tau));
  };
  for (double tau : {20.0, 30.0, 45.0}) {
    const cd exact = noise_kernel(tau, 0.0, spec);
    CHECK(std::abs(recover(tau) - exact) <= 1e-6 * std::abs(exact));
  }
  // Short delays carry a larger (but bounded) correction remainder.
  const cd exact1 = noise_kernel(1.0, 0.0, spec);
  CHECK(std::abs(recover(1.0) - exact1) <= 1e-2 * std::abs(exact1));
}

TEST_CASE("noise kernel gram matrix is positive semidefinite") {
#ifdef PTDQD_HAVE_EIGEN
  const NoiseKernelSpec spec{1.9e-4, 0.09, 8.0};
  const int n = 64;
  Eigen::MatrixXcd K(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double ti = 40.0 * i / (n - 1);
      const double tj = 40.0 * j / (n - 1);
      K(i, j) = noise_kernel(ti, tj, spec);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(K);
  REQUIRE(es.info() == Eigen::Success);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10 * spec.amp);
#else
  MESSAGE("Eigen not available; positive-semidefiniteness check skipped");
#endif
}
