#include "ptdqd/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "ptdqd/nh.hpp"
#include "ptdqd/quadrature.hpp"

namespace ptdqd {

namespace {

constexpr cplx kI{0.0, 1.0};

CVec2 conj_vec(const CVec2& v) { return {std::conj(v.x), std::conj(v.y)}; }

CMat2 hadamard(const CMat2& A, const CMat2& B) {
  return {A.a * B.a, A.b * B.b, A.c * B.c, A.d * B.d};
}

cplx sinc_c(cplx z) {
  if (std::abs(z) < 1e-8) return 1.0 - z * z / 6.0;
  return std::sin(z) / z;
}

// int_0^t u e^{z u} du.
cplx d1_integral(cplx z, double t) {
  if (std::abs(z) * t < 1e-4) {
    const cplx zt = z * t;
    return t * t * (0.5 + zt / 3.0 + zt * zt / 8.0 + zt * zt * zt / 30.0);
  }
  return (t * std::exp(z * t) - eint(z, t)) / z;
}

// int_0^t u^2 e^{z u} du.
cplx d2_integral(cplx z, double t) {
  if (std::abs(z) * t < 1e-4) {
    const cplx zt = z * t;
    return t * t * t * (1.0 / 3.0 + zt / 4.0 + zt * zt / 10.0);
  }
  return (t * t * std::exp(z * t) - 2.0 * d1_integral(z, t)) / z;
}

// int_0^t du e^{(p-gamma) u} (e^{(q+gamma) u} - 1)/(q+gamma)
//   = [E(p+q, t) - E(p-gamma, t)] / (q + gamma),  E(z,t) = (e^{zt}-1)/z,
// with the confluent limit when q + gamma ~ 0.
cplx ordered_block(cplx p, cplx q, double gamma, double t) {
  const cplx z1 = p + q;
  const cplx z2 = p - gamma;
  const cplx d = q + gamma;
  const double scale = 1.0 + std::abs(z1) + std::abs(z2);
  if (std::abs(d) >= 1e-7 * scale) {
    return (eint(z1, t) - eint(z2, t)) / d;
  }
  return d1_integral(z2, t) + 0.5 * d * d2_integral(z2, t);
}

// Double integral over [0,t]^2 of e^{p u} e^{q v} e^{-gamma |u-v|}.
cplx kernel_double_integral(cplx p, cplx q, double gamma, double t) {
  return ordered_block(p, q, gamma, t) + ordered_block(q, p, gamma, t);
}

struct SkewedBasis {
  EigenInfo eig;  // of H^T
  CMat2 R, Rinv;
  CMat2 mtilde;  // R^dag e1 e1^T R
};

SkewedBasis skewed_basis(const CMat2& H, const char* caller) {
  SkewedBasis sb;
  sb.eig = eig2(H.transpose());
  if (sb.eig.is_ep) {
    throw std::domain_error(std::string(caller) +
                            ": eigenbasis form is undefined at an exceptional "
                            "point; use the quadrature method");
  }
  sb.R = sb.eig.right_vectors;
  sb.Rinv = sb.R.inverse();
  const cplx r1p = sb.R.a, r1m = sb.R.b;  // first row of R
  sb.mtilde = {std::conj(r1p) * r1p, std::conj(r1p) * r1m,
               std::conj(r1m) * r1p, std::conj(r1m) * r1m};
  return sb;
}

// Analytic noise double integrals in the skewed basis, amp included.
CMat2 noise_w_matrix(const SkewedBasis& sb, const NoiseKernelSpec& spec,
                     double t) {
  const cplx lam[2] = {sb.eig.lam_plus, sb.eig.lam_minus};
  CMat2 W;
  cplx* entries[2][2] = {{&W.a, &W.b}, {&W.c, &W.d}};
  for (int al = 0; al < 2; ++al) {
    for (int nu = 0; nu < 2; ++nu) {
      const cplx p = kI * (std::conj(lam[al]) - spec.omega0);
      const cplx q = -kI * (lam[nu] - spec.omega0);
      *entries[al][nu] =
          spec.amp * kernel_double_integral(p, q, spec.gamma, t);
    }
  }
  return W;
}

CMat2 noise_part_eigenbasis(const CMat2& H, const NoiseKernelSpec& spec,
                            double t) {
  const SkewedBasis sb = skewed_basis(H, "correlation_noise_part");
  const CMat2 W = noise_w_matrix(sb, spec, t);
  return sb.Rinv.adjoint() * hadamard(sb.mtilde, W) * sb.Rinv;
}

// One composite-trapezoid evaluation of the noise double integral with n
// steps: backward-propagated kernel columns g_j = e^{-iH(t-t_j)} e1 and
// normalized inner prefix sums keep every intermediate bounded.
CMat2 noise_quadrature_pass(const CMat2& H, const NoiseKernelSpec& spec,
                            double t, int n) {
  const double h = t / n;
  const CMat2 step = expm(cplx(0.0, -h) * H);
  std::vector<CVec2> g(n + 1);
  g[n] = {cplx{1.0, 0.0}, cplx{0.0, 0.0}};
  for (int j = n - 1; j >= 0; --j) g[j] = step * g[j + 1];

  const cplx gbar{spec.gamma, -spec.omega0};
  const cplx decay = std::exp(-gbar * h);
  CVec2 s{};  // e^{-gbar t_j} int_0^{t_j} g(v) e^{gbar v} dv, trapezoid
  CMat2 T = CMat2::zero();
  for (int j = 0; j <= n; ++j) {
    if (j > 0) {
      s = decay * s + (0.5 * h) * (decay * g[j - 1] + g[j]);
    }
    const double w = (j == 0 || j == n) ? 0.5 * h : h;
    T = T + cplx(w, 0.0) * CMat2::outer(conj_vec(g[j]), s);
  }
  T = cplx(spec.amp, 0.0) * T;
  return T + T.adjoint();
}

CMat2 noise_part_quadrature(const CMat2& H, const NoiseKernelSpec& spec,
                            double t) {
  const EigenInfo eig = eig2(H);
  const double gap = std::abs(eig.lam_plus - eig.lam_minus);
  double h = 0.1 / spec.gamma;
  if (gap > 1e-12) h = std::min(h, 0.05 * 2.0 * M_PI / gap);
  int n = std::max(8, static_cast<int>(std::ceil(t / h)));

  CMat2 coarse = noise_quadrature_pass(H, spec, t, n);
  CMat2 rich_prev = CMat2::zero();
  bool have_prev = false;
  for (int level = 0; level < 7; ++level) {
    n *= 2;
    const CMat2 fine = noise_quadrature_pass(H, spec, t, n);
    const CMat2 rich =
        (1.0 / 3.0) * (cplx(4.0, 0.0) * fine - coarse);  // O(h^4)
    if (have_prev) {
      const double err = (rich - rich_prev).norm();
      const double ref = std::max(rich.norm(), spec.amp * 1e-6);
      if (err <= 1e-9 * ref) return rich;
    }
    rich_prev = rich;
    have_prev = true;
    coarse = fine;
  }
  return rich_prev;
}

CMat2 classical_part(const CVec2& v) { return CMat2::outer(conj_vec(v), v); }

Trajectory assemble_trajectory(const CMat2& H,
                               const std::vector<double>& times,
                               const std::vector<std::pair<cplx, cplx>>& quad,
                               const std::vector<CMat2>& noise,
                               double photon_bound) {
  Trajectory traj;
  traj.times = times;
  traj.quad = quad;
  traj.photon_bound = photon_bound;
  const double lambda = std::real(H.c);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const CVec2 v{quad[i].first, quad[i].second};
    const CMat2 C = classical_part(v) + noise[i];
    traj.corr.push_back(C);
    const double n1 = C.a.real();
    const double n2 = C.d.real();
    traj.n1.push_back(n1);
    traj.n2.push_back(n2);
    traj.current.push_back(lambda * C.c.imag());
    const bool ok = n1 + n2 <= photon_bound;
    traj.validity_flag.push_back(ok ? 1 : 0);
    if (!ok && traj.first_invalid_index < 0) {
      traj.first_invalid_index = static_cast<int>(i);
    }
  }
  return traj;
}

void solve_c4(std::array<std::array<cplx, 4>, 4>& M, std::array<cplx, 4>& rhs,
              std::array<cplx, 4>& out) {
  for (int step = 0; step < 4; ++step) {
    int pr = step;
    double best = std::abs(M[step][step]);
    for (int i = step + 1; i < 4; ++i) {
      if (std::abs(M[i][step]) > best) {
        best = std::abs(M[i][step]);
        pr = i;
      }
    }
    if (best <= 1e-300) {
      throw std::runtime_error("lindblad_stationary: singular system");
    }
    std::swap(M[step], M[pr]);
    std::swap(rhs[step], rhs[pr]);
    for (int i = step + 1; i < 4; ++i) {
      const cplx f = M[i][step] / M[step][step];
      if (f == cplx{0.0, 0.0}) continue;
      for (int j = step; j < 4; ++j) M[i][j] -= f * M[step][j];
      rhs[i] -= f * rhs[step];
    }
  }
  for (int i = 3; i >= 0; --i) {
    cplx acc = rhs[i];
    for (int j = i + 1; j < 4; ++j) acc -= M[i][j] * out[j];
    out[i] = acc / M[i][i];
  }
}

// Source integral int_0^t G^dag(tau) S G(tau) dtau for the Lindblad models:
// closed form through the eigendecomposition, composite-Simpson fallback at
// the exceptional point of H.
class LindbladSourceIntegral {
 public:
  LindbladSourceIntegral(const CMat2& H, const CMat2& S) : H_(H), S_(S) {
    eig_ = eig2(H);
    if (!eig_.is_ep) {
      P_ = eig_.right_vectors;
      Pinv_ = P_.inverse();
      PinvAdj_ = Pinv_.adjoint();
      PSP_ = P_.adjoint() * S_ * P_;
    }
  }

  CMat2 operator()(double t) const {
    if (t == 0.0) return CMat2::zero();
    if (!eig_.is_ep) {
      const cplx lam[2] = {eig_.lam_plus, eig_.lam_minus};
      CMat2 inner = PSP_;
      cplx* entries[2][2] = {{&inner.a, &inner.b}, {&inner.c, &inner.d}};
      for (int al = 0; al < 2; ++al) {
        for (int nu = 0; nu < 2; ++nu) {
          *entries[al][nu] *= eint(kI * (std::conj(lam[al]) - lam[nu]), t);
        }
      }
      return PinvAdj_ * inner * Pinv_;
    }
    return simpson_fallback(t);
  }

 private:
  CMat2 simpson_fallback(double t) const {
    auto sample = [&](double tau) {
      const CMat2 G = propagator(H_, tau);
      return G.adjoint() * S_ * G;
    };
    int n = 64;
    CMat2 prev = simpson_pass(sample, t, n);
    for (int level = 0; level < 12; ++level) {
      n *= 2;
      const CMat2 cur = simpson_pass(sample, t, n);
      if ((cur - prev).norm() <= 1e-11 * std::max(1.0, cur.norm())) {
        return cur;
      }
      prev = cur;
    }
    return prev;
  }

  template <typename F>
  static CMat2 simpson_pass(F&& sample, double t, int n) {
    const double h = t / n;
    CMat2 acc = sample(0.0) + sample(t);
    for (int j = 1; j < n; ++j) {
      const double w = (j % 2 == 1) ? 4.0 : 2.0;
      acc = acc + cplx(w, 0.0) * sample(j * h);
    }
    return (h / 3.0) * acc;
  }

  CMat2 H_, S_;
  EigenInfo eig_;
  CMat2 P_, Pinv_, PinvAdj_, PSP_;
};

}  // namespace

CMat2 propagator(const CMat2& H, double t, double ep_tol) {
  (void)ep_tol;  // the closed form below is uniformly valid, EP included
  const cplx mu = 0.5 * H.trace();
  const CMat2 N = H - mu * CMat2::identity();
  // N is traceless, so N^2 = s^2 I; cos/sinc are even, branch-free in s.
  const cplx s2 = N.a * N.a + N.b * N.c;
  const cplx z = std::sqrt(s2) * t;
  const cplx phase = std::exp(-kI * mu * t);
  const cplx ct = std::cos(z);
  const cplx st = -kI * t * sinc_c(z);
  return phase * CMat2{ct + st * N.a, st * N.b, st * N.c, ct + st * N.d};
}

std::vector<std::pair<cplx, cplx>> evolve_quadratures(
    const CMat2& H, const DriveSpec& drive, std::pair<cplx, cplx> init,
    const std::vector<double>& times) {
  const CVec2 v0{init.first, init.second};
  CVec2 x{};
  const bool driven = drive.e0 != 0.0;
  if (driven) {
    const CMat2 M = H - cplx(drive.omega_d, 0.0) * CMat2::identity();
    x = M.inverse() * CVec2{cplx{0.0, 0.0}, cplx{1.0, 0.0}};
  }
  std::vector<std::pair<cplx, cplx>> out;
  out.reserve(times.size());
  for (double t : times) {
    const CMat2 G = propagator(H, t);
    CVec2 v = G * v0;
    if (driven) {
      const cplx rot = std::exp(-kI * drive.omega_d * t);
      v = v + drive.e0 * (rot * x - G * x);
    }
    out.emplace_back(v.x, v.y);
  }
  return out;
}

CMat2 correlation_noise_part(const CMat2& H, const NoiseKernelSpec& spec,
                             double t, CorrMethod method) {
  if (spec.amp == 0.0 || t == 0.0) return CMat2::zero();
  if (method == CorrMethod::eigenbasis) {
    return noise_part_eigenbasis(H, spec, t);
  }
  return noise_part_quadrature(H, spec, t);
}

Trajectory evolve_correlations(const CMat2& H, const NoiseKernelSpec& spec,
                               std::pair<cplx, cplx> init_quad,
                               const std::vector<double>& times,
                               CorrMethod method, const DriveSpec& drive,
                               double photon_bound) {
  const auto quad = evolve_quadratures(H, drive, init_quad, times);
  std::vector<CMat2> noise;
  noise.reserve(times.size());
  for (double t : times) {
    noise.push_back(correlation_noise_part(H, spec, t, method));
  }
  return assemble_trajectory(H, times, quad, noise, photon_bound);
}

CMat2 skewed_correlations(const CMat2& H, const NoiseKernelSpec& spec,
                          const CMat2& C0, double t) {
  const SkewedBasis sb = skewed_basis(H, "skewed_correlations");
  const cplx lam[2] = {sb.eig.lam_plus, sb.eig.lam_minus};
  CMat2 cl = sb.R.adjoint() * C0 * sb.R;
  cplx* entries[2][2] = {{&cl.a, &cl.b}, {&cl.c, &cl.d}};
  for (int al = 0; al < 2; ++al) {
    for (int nu = 0; nu < 2; ++nu) {
      *entries[al][nu] *=
          std::exp(kI * (std::conj(lam[al]) - lam[nu]) * t);
    }
  }
  return cl + hadamard(sb.mtilde, noise_w_matrix(sb, spec, t));
}

std::pair<double, double> skewed_mtilde_diag(const CMat2& H) {
  const EigenInfo eig = eig2(H.transpose());
  const double wp = std::norm(eig.right_vectors.a);
  const double wm = std::norm(eig.right_vectors.b);
  return {wp, wm};
}

CMat2 lindblad_source(const SetupParams& p, const DqdSteadyState& ss,
                      LindbladModel model) {
  double pref;
  if (model == LindbladModel::microscopic) {
    const RotatedDqd r = rotated_dqd(p);
    pref = r.g * r.g * ss.n1 / p.Gamma;
  } else {
    pref = p.Gamma * ss.delta - 0.5 * p.kappa1;
  }
  // (I + sigma_z) feeds fluctuations only into the gain cavity.
  return {cplx{2.0 * pref, 0.0}, cplx{0.0, 0.0}, cplx{0.0, 0.0},
          cplx{0.0, 0.0}};
}

Trajectory lindblad_evolve(const SetupParams& p, const DqdSteadyState& ss,
                           LindbladModel model, const DriveSpec& drive,
                           std::pair<cplx, cplx> init,
                           const std::vector<double>& times,
                           double photon_bound) {
  const CMat2 H2 = build_heff_lindblad(p, ss);
  const CMat2 S = lindblad_source(p, ss, model);
  const auto quad = evolve_quadratures(H2, drive, init, times);
  const LindbladSourceIntegral source(H2, S);
  std::vector<CMat2> noise;
  noise.reserve(times.size());
  for (double t : times) noise.push_back(source(t));
  return assemble_trajectory(H2, times, quad, noise, photon_bound);
}

CMat2 lindblad_stationary(const SetupParams& p, const DqdSteadyState& ss,
                          LindbladModel model) {
  const CMat2 H2 = build_heff_lindblad(p, ss);
  const EigenInfo eig = eig2(H2);
  if (eig.lam_plus.imag() >= 0.0 || eig.lam_minus.imag() >= 0.0) {
    throw std::domain_error(
        "lindblad_stationary: requires strictly decaying eigenvalues");
  }
  const CMat2 A = H2.adjoint();
  const CMat2 S = lindblad_source(p, ss, model);
  // Solve A X - X H2 = i S, row-major flattening X_(i,j) -> 2i + j.
  const cplx Aij[2][2] = {{A.a, A.b}, {A.c, A.d}};
  const cplx Bij[2][2] = {{H2.a, H2.b}, {H2.c, H2.d}};
  const cplx Sij[2][2] = {{S.a, S.b}, {S.c, S.d}};
  std::array<std::array<cplx, 4>, 4> M{};
  std::array<cplx, 4> rhs{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const int eq = 2 * i + j;
      for (int k = 0; k < 2; ++k) {
        M[eq][2 * k + j] += Aij[i][k];
        M[eq][2 * i + k] -= Bij[k][j];
      }
      rhs[eq] = kI * Sij[i][j];
    }
  }
  std::array<cplx, 4> x{};
  solve_c4(M, rhs, x);
  const CMat2 X{x[0], x[1], x[2], x[3]};
  return 0.5 * (X + X.adjoint());
}

}  // namespace ptdqd
