#include "ptdqd/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ptdqd {

namespace {

struct SimpsonState {
  const std::function<double(double)>* f;
  int max_depth;
};

double simpson_rec(const SimpsonState& st, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = (*st.f)(lm);
  const double frm = (*st.f)(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth >= st.max_depth) {
    throw std::runtime_error(
        "integrate: refinement limit reached, residual estimate " +
        std::to_string(std::abs(delta)));
  }
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_rec(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  SimpsonState st{&f, max_depth};
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(st, a, b, fa, fm, fb, whole, abs_tol, 0);
}

double pv_integrate(const std::function<double(double)>& f, double pole,
                    double a, double b, double abs_tol) {
  if (!(a < pole && pole < b)) {
    throw std::invalid_argument("pv_integrate: pole must lie inside (a, b)");
  }
  // Symmetric window around the pole: fold into a regular integrand. The
  // fold extends continuously to 2 f'(pole) at u = 0; clamp tiny u so the
  // endpoint sample carries that limit instead of 0/0.
  const double h = std::min(pole - a, b - pole);
  const double u_min = 1e-7 * h;
  const double folded_tol = abs_tol / 3.0;
  const double folded = integrate(
      [&](double u) {
        const double uu = std::max(u, u_min);
        return (f(pole + uu) - f(pole - uu)) / uu;
      },
      0.0, h, folded_tol);
  double rest = 0.0;
  if (pole - h > a) {
    rest += integrate([&](double x) { return f(x) / (x - pole); }, a, pole - h,
                      folded_tol);
  }
  if (pole + h < b) {
    rest += integrate([&](double x) { return f(x) / (x - pole); }, pole + h, b,
                      folded_tol);
  }
  return folded + rest;
}

std::complex<double> cexpm1(std::complex<double> z) {
  // expm1(x+iy) = expm1(x)*cos(y) + (cos(y)-1) + i*e^x*sin(y), all stable.
  const double x = z.real();
  const double y = z.imag();
  const double cy = std::cos(y);
  const double sy = std::sin(y);
  // cos(y)-1 computed as -2 sin^2(y/2) to avoid cancellation.
  const double cym1 = -2.0 * std::sin(0.5 * y) * std::sin(0.5 * y);
  return {std::expm1(x) * cy + cym1, std::exp(x) * sy};
}

std::complex<double> eint(std::complex<double> z, double t) {
  const std::complex<double> w = z * t;
  const double aw = std::abs(w);
  if (aw < 1e-8) {
    // (e^w - 1)/z = t * (1 + w/2 + w^2/6 + ...)
    return t * (1.0 + w * (0.5 + w * (1.0 / 6.0)));
  }
  return cexpm1(w) / z;
}

}  // namespace ptdqd
