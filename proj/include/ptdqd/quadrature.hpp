#pragma once

#include <complex>
#include <functional>

namespace ptdqd {

/// Adaptive Simpson integration of f over [a, b] to absolute tolerance
/// abs_tol. Throws std::runtime_error (with the achieved estimate in the
/// message) if the refinement depth limit is hit before convergence.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth = 48);

/// Cauchy principal value of integral f(x)/(x - pole) dx over [a, b] with
/// a < pole < b. The symmetric window around the pole is folded as
/// [f(pole+u) - f(pole-u)]/u, which is regular; the remainder is handled by
/// the adaptive rule. Absolute tolerance abs_tol.
double pv_integrate(const std::function<double(double)>& f, double pole,
                    double a, double b, double abs_tol);

/// (e^z - 1) accurate for small |z|.
std::complex<double> cexpm1(std::complex<double> z);

/// (e^{z t} - 1)/z, with the series branch for small |z t| and the exact
/// limit t at z = 0.
std::complex<double> eint(std::complex<double> z, double t);

}  // namespace ptdqd
