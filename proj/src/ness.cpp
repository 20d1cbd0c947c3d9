#include "ptdqd/ness.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "ptdqd/quadrature.hpp"

namespace ptdqd {

namespace {

constexpr double kPvTol = 1e-10;

// Rotation from the dot basis to the DQD eigenbasis; 1-based indices.
double phi_entry(double theta, int row, int col) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  if (row == 1) return col == 1 ? c : s;
  return col == 1 ? -s : c;
}

// Coupling matrix of the dipole operator in the eigenbasis; 1-based.
double m_entry(double theta, int row, int col) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  if (row == 1) return col == 1 ? c : -s;
  return col == 1 ? -s : -c;
}

double lead_mu(const SetupParams& p, int lead) { return lead == 1 ? p.mu1 : p.mu2; }

// Principal-value band integral P int n_F(w' - mu)/(w' - omega) dw' over
// (-omega_cut, omega_cut), via the subtraction form
//   int [n_F(w') - n_F(omega)]/(w' - omega) dw'
//     + n_F(omega) * ln((W - omega)/(W + omega)).
// The subtracted quotient is regular at the pole and, unlike a symmetric
// fold, stays convergent when the pole is far from the Fermi edges (where
// the fold would be pure cancellation noise).
double lamb_h(double omega, double mu, const SetupParams& p) {
  const double W = p.omega_cut;
  auto nf = [&](double w) { return fermi(w, mu, p.beta); };
  if (std::abs(omega) < W) {
    const double n0 = nf(omega);
    const double slope = -p.beta * n0 * (1.0 - n0);  // d n_F / d omega
    const double reg = integrate(
        [&](double w) {
          const double d = w - omega;
          if (std::abs(d) < 1e-9) return slope;
          return (nf(w) - n0) / d;
        },
        -W, W, kPvTol);
    return reg + n0 * std::log((W - omega) / (W + omega));
  }
  return integrate([&](double w) { return nf(w) / (w - omega); }, -W, W, kPvTol);
}

// 4x4 real linear solve with full pivoting; also returns a Frobenius-norm
// condition estimate. Throws on numerical singularity.
struct Solve4Result {
  std::array<double, 4> x;
  double condition;
};

Solve4Result solve4(std::array<std::array<double, 4>, 4> A,
                    std::array<double, 4> b) {
  double norm_a = 0.0;
  for (const auto& row : A)
    for (double v : row) norm_a += v * v;
  norm_a = std::sqrt(norm_a);

  // Augment with the identity to extract the inverse for the estimate.
  std::array<std::array<double, 9>, 4> M{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) M[i][j] = A[i][j];
    M[i][4 + i] = 1.0;
    M[i][8] = b[i];
  }
  std::array<int, 4> col_perm{0, 1, 2, 3};
  for (int step = 0; step < 4; ++step) {
    int pr = step, pc = step;
    double best = 0.0;
    for (int i = step; i < 4; ++i) {
      for (int j = step; j < 4; ++j) {
        if (std::abs(M[i][j]) > best) {
          best = std::abs(M[i][j]);
          pr = i;
          pc = j;
        }
      }
    }
    if (best <= 1e-300 * (norm_a + 1.0)) {
      throw std::runtime_error("solve_ness: singular kinetic system");
    }
    std::swap(M[step], M[pr]);
    if (pc != step) {
      for (int i = 0; i < 4; ++i) std::swap(M[i][step], M[i][pc]);
      std::swap(col_perm[step], col_perm[pc]);
    }
    const double piv = M[step][step];
    for (int j = 0; j < 9; ++j) M[step][j] /= piv;
    for (int i = 0; i < 4; ++i) {
      if (i == step) continue;
      const double f = M[i][step];
      if (f == 0.0) continue;
      for (int j = 0; j < 9; ++j) M[i][j] -= f * M[step][j];
    }
  }
  // Undo the column permutation: permuted row i corresponds to unknown
  // col_perm[i].
  Solve4Result out{};
  double norm_inv = 0.0;
  for (int i = 0; i < 4; ++i) {
    out.x[col_perm[i]] = M[i][8];
    for (int j = 0; j < 4; ++j) {
      const double v = M[i][4 + j];
      norm_inv += v * v;
    }
  }
  out.condition = norm_a * std::sqrt(norm_inv);
  return out;
}

struct NessCoefficients {
  double omega_q;
  double theta;
  // F_B(w_alpha - w_nu) on the 2x2 index grid (1-based).
  std::array<std::array<std::complex<double>, 3>, 3> fb;
  // Curly-F lead functions entering the coherence equation.
  std::complex<double> F21_w1, F12_w1;
  // Re F_{gamma gamma}(w_gamma) entering the population equations.
  double F11_w1, F22_w2;
};

NessCoefficients make_coefficients(const SetupParams& p) {
  const RotatedDqd r = rotated_dqd(p);
  NessCoefficients k;
  k.omega_q = r.omega_q;
  k.theta = r.theta;
  const std::array<double, 3> w{0.0, +0.5 * r.omega_q, -0.5 * r.omega_q};
  for (int a = 1; a <= 2; ++a)
    for (int n = 1; n <= 2; ++n) k.fb[a][n] = phonon_half_ft(w[a] - w[n], p);
  k.F21_w1 = fermi_spectral(2, 1, w[1], p).FF;
  k.F12_w1 = fermi_spectral(1, 2, w[1], p).FF;
  k.F11_w1 = fermi_spectral(1, 1, w[1], p).FF.real();
  k.F22_w2 = fermi_spectral(2, 2, w[2], p).FF.real();
  return k;
}

// Kinetic right-hand side for x = (N1, N2, Re c, Im c), c = <A_1^dag A_2>.
std::array<double, 4> kinetic_rhs(const NessCoefficients& k,
                                  const SetupParams& p,
                                  const std::array<double, 4>& x) {
  using cd = std::complex<double>;
  const double N1 = x[0];
  const double N2 = x[1];
  const cd c{x[2], x[3]};

  // <A_i^dag A_j>, 1-based.
  auto E = [&](int i, int j) -> cd {
    if (i == 1 && j == 1) return {N1, 0.0};
    if (i == 2 && j == 2) return {N2, 0.0};
    if (i == 1 && j == 2) return c;
    return std::conj(c);
  };
  auto m = [&](int i, int j) { return m_entry(k.theta, i, j); };

  // Populations: phonon sums plus lead gain/decay.
  std::array<double, 4> dx{};
  for (int g = 1; g <= 2; ++g) {
    const int gb = 3 - g;
    cd sum{0.0, 0.0};
    for (int n = 1; n <= 2; ++n) {
      sum += m(g, gb) * (m(gb, n) * k.fb[gb][n] * E(g, n) -
                         m(g, n) * k.fb[g][n] * E(gb, n));
    }
    const double phonon = -2.0 * sum.real();  // term + h.c.
    const double Fgain = (g == 1) ? k.F11_w1 : k.F22_w2;
    const double Ng = (g == 1) ? N1 : N2;
    const double Nb = (g == 1) ? N2 : N1;
    dx[g - 1] = phonon - 2.0 * (p.Gamma * Ng - Fgain * (1.0 - Nb));
  }

  // Coherence c = <A_1^dag A_2>.
  cd dc = cd(0.0, -1.0) * k.omega_q * c;
  cd phsum{0.0, 0.0};
  for (int a = 1; a <= 2; ++a) {
    for (int n = 1; n <= 2; ++n) {
      const cd direct = m(2, a) * (m(a, n) * k.fb[a][n] * E(1, n) -
                                   m(1, n) * std::conj(k.fb[1][n]) * E(n, a));
      const cd swapped = m(1, a) * (m(a, n) * k.fb[a][n] * E(2, n) -
                                    m(2, n) * std::conj(k.fb[2][n]) * E(n, a));
      phsum += direct + std::conj(swapped);
    }
  }
  dc -= phsum;
  dc -= p.Gamma * c - k.F21_w1 * (1.0 - N2) + std::conj(k.F12_w1) * (1.0 - N1);

  dx[2] = dc.real();
  dx[3] = dc.imag();
  return dx;
}

}  // namespace

std::complex<double> phonon_half_ft(double delta_omega, const SetupParams& p) {
  if (p.gamma_b == 0.0) return {0.0, 0.0};
  const double d = delta_omega;

  double re = 0.0;
  if (d > 0.0) {
    re = 0.5 * j_ph(d, p) * bose(d, p.beta);
  } else if (d < 0.0) {
    re = 0.5 * j_ph(-d, p) * (bose(-d, p.beta) + 1.0);
  }

  double im = 0.0;
  if (p.lamb_shift) {
    const double U = 10.0 * p.omega_max;
    // Im F_B = (1/2pi) P int_0^U J(w) [ n_B(w)/(w - d) - (n_B(w)+1)/(w + d) ] dw
    auto nb_part = [&](double w) {
      return w <= 0.0 ? 0.0 : j_ph(w, p) * bose(w, p.beta);
    };
    auto nb1_part = [&](double w) {
      return w <= 0.0 ? 0.0 : j_ph(w, p) * (bose(w, p.beta) + 1.0);
    };
    // The guarded ratios extend continuously to 0 at w = 0 (J ~ w^3 kills
    // both the 1/w pole of n_B and the explicit 1/w at d = 0).
    double i1;
    if (d > 0.0 && d < U) {
      i1 = pv_integrate(nb_part, d, 0.0, U, kPvTol);
    } else {
      i1 = integrate(
          [&](double w) { return w <= 0.0 ? 0.0 : nb_part(w) / (w - d); }, 0.0,
          U, kPvTol);
    }
    double i2;
    if (-d > 0.0 && -d < U) {
      i2 = pv_integrate(nb1_part, -d, 0.0, U, kPvTol);
    } else {
      i2 = integrate(
          [&](double w) { return w <= 0.0 ? 0.0 : nb1_part(w) / (w + d); },
          0.0, U, kPvTol);
    }
    im = (i1 - i2) / (2.0 * M_PI);
  }
  return {re, im};
}

FermiSpectralParts fermi_spectral(int alpha, int nu, double omega,
                                  const SetupParams& p) {
  if (alpha < 1 || alpha > 2 || nu < 1 || nu > 2) {
    throw std::invalid_argument("fermi_spectral: indices must be 1 or 2");
  }
  const RotatedDqd r = rotated_dqd(p);
  const bool in_band = std::abs(omega) < p.omega_cut;

  FermiSpectralParts out{{0.0, 0.0}, {0.0, 0.0}};
  double F = 0.0;
  if (in_band) {
    for (int l = 1; l <= 2; ++l) {
      F += phi_entry(r.theta, alpha, l) * phi_entry(r.theta, nu, l) *
           fermi(omega, lead_mu(p, l), p.beta);
    }
    F *= p.Gamma;
  }
  const double f = (alpha == nu && in_band) ? p.Gamma : 0.0;

  double Fd = 0.0, fd = 0.0;
  if (p.lamb_shift) {
    for (int l = 1; l <= 2; ++l) {
      Fd += phi_entry(r.theta, alpha, l) * phi_entry(r.theta, nu, l) *
            lamb_h(omega, lead_mu(p, l), p);
    }
    Fd *= p.Gamma / M_PI;
    if (alpha == nu && in_band) {
      fd = p.Gamma / M_PI *
           std::log((p.omega_cut - omega) / (p.omega_cut + omega));
    }
  }
  out.FF = {F, Fd};
  out.ff = {f, fd};
  return out;
}

DqdSteadyState solve_ness(const SetupParams& p) {
  p.validate();
  const NessCoefficients k = make_coefficients(p);

  const std::array<double, 4> zero{0.0, 0.0, 0.0, 0.0};
  const std::array<double, 4> b = kinetic_rhs(k, p, zero);
  std::array<std::array<double, 4>, 4> A{};
  for (int j = 0; j < 4; ++j) {
    std::array<double, 4> e{0.0, 0.0, 0.0, 0.0};
    e[j] = 1.0;
    const std::array<double, 4> col = kinetic_rhs(k, p, e);
    for (int i = 0; i < 4; ++i) A[i][j] = col[i] - b[i];
  }
  std::array<double, 4> minus_b{-b[0], -b[1], -b[2], -b[3]};
  const Solve4Result sol = solve4(A, minus_b);

  DqdSteadyState ss;
  ss.n1 = sol.x[0];
  ss.n2 = sol.x[1];
  const std::complex<double> c{sol.x[2], sol.x[3]};  // <A_1^dag A_2>
  ss.coh = std::conj(c);
  ss.dn = ss.n1 - ss.n2;
  const RotatedDqd r = rotated_dqd(p);
  ss.delta = r.g * r.g * ss.dn / (p.Gamma * p.Gamma);
  ss.condition_estimate = sol.condition;
  return ss;
}

NoiseKernelSpec make_noise_kernel_spec(const SetupParams& p,
                                       const DqdSteadyState& ss) {
  const RotatedDqd r = rotated_dqd(p);
  return {r.g * r.g * ss.n1, p.Gamma, p.omega0};
}

std::complex<double> noise_kernel(double t1, double t2,
                                  const NoiseKernelSpec& spec) {
  const double tau = t1 - t2;
  const double envelope = spec.amp * std::exp(-spec.gamma * std::abs(tau));
  return envelope * std::exp(std::complex<double>(0.0, spec.omega0 * tau));
}

}  // namespace ptdqd
