#include "ptdqd/cmat2.hpp"

#include <cmath>
#include <stdexcept>

namespace ptdqd {

CMat2 CMat2::identity() { return {1.0, 0.0, 0.0, 1.0}; }
CMat2 CMat2::zero() { return {0.0, 0.0, 0.0, 0.0}; }

CMat2 CMat2::outer(const CVec2& u, const CVec2& v) {
  return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y};
}

CMat2 CMat2::transpose() const { return {a, c, b, d}; }
CMat2 CMat2::conj() const {
  return {std::conj(a), std::conj(b), std::conj(c), std::conj(d)};
}
CMat2 CMat2::adjoint() const {
  return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
}
cplx CMat2::trace() const { return a + d; }
cplx CMat2::det() const { return a * d - b * c; }

CMat2 CMat2::inverse() const {
  const cplx dt = det();
  if (std::abs(dt) == 0.0) throw std::runtime_error("CMat2: singular matrix");
  return {d / dt, -b / dt, -c / dt, a / dt};
}

double CMat2::norm() const {
  return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
}

bool CMat2::is_hermitian(double tol) const {
  return std::abs(a - std::conj(a)) <= tol && std::abs(d - std::conj(d)) <= tol &&
         std::abs(b - std::conj(c)) <= tol;
}

bool CMat2::is_identity(double tol) const {
  return std::abs(a - 1.0) <= tol && std::abs(d - 1.0) <= tol &&
         std::abs(b) <= tol && std::abs(c) <= tol;
}

CMat2 operator+(const CMat2& A, const CMat2& B) {
  return {A.a + B.a, A.b + B.b, A.c + B.c, A.d + B.d};
}
CMat2 operator-(const CMat2& A, const CMat2& B) {
  return {A.a - B.a, A.b - B.b, A.c - B.c, A.d - B.d};
}
CMat2 operator*(const CMat2& A, const CMat2& B) {
  return {A.a * B.a + A.b * B.c, A.a * B.b + A.b * B.d,
          A.c * B.a + A.d * B.c, A.c * B.b + A.d * B.d};
}
CMat2 operator*(cplx s, const CMat2& A) {
  return {s * A.a, s * A.b, s * A.c, s * A.d};
}
CMat2 operator*(const CMat2& A, cplx s) { return s * A; }
CVec2 operator*(const CMat2& A, const CVec2& v) {
  return {A.a * v.x + A.b * v.y, A.c * v.x + A.d * v.y};
}
CVec2 operator+(const CVec2& u, const CVec2& v) { return {u.x + v.x, u.y + v.y}; }
CVec2 operator-(const CVec2& u, const CVec2& v) { return {u.x - v.x, u.y - v.y}; }
CVec2 operator*(cplx s, const CVec2& v) { return {s * v.x, s * v.y}; }

namespace {

CVec2 normalized(const CVec2& v) {
  const double n = std::sqrt(std::norm(v.x) + std::norm(v.y));
  if (n == 0.0) return {1.0, 0.0};
  return {v.x / n, v.y / n};
}

// Right eigenvector for eigenvalue lam, picking the numerically larger of
// the two cofactor constructions.
CVec2 eigenvector_for(const CMat2& H, cplx lam) {
  const CVec2 cand1{H.b, lam - H.a};
  const CVec2 cand2{lam - H.d, H.c};
  const double n1 = std::norm(cand1.x) + std::norm(cand1.y);
  const double n2 = std::norm(cand2.x) + std::norm(cand2.y);
  if (n1 == 0.0 && n2 == 0.0) return {1.0, 0.0};  // H is lam * identity
  return normalized(n1 >= n2 ? cand1 : cand2);
}

}  // namespace

EigenInfo eig2(const CMat2& H, double ep_tol) {
  EigenInfo out;
  const cplx half_tr = 0.5 * H.trace();
  const cplx disc = half_tr * half_tr - H.det();
  cplx s = std::sqrt(disc);
  // Fix the branch so lam_plus has the larger real part (ties: +Im).
  if (s.real() < 0.0 || (s.real() == 0.0 && s.imag() < 0.0)) s = -s;
  out.lam_plus = half_tr + s;
  out.lam_minus = half_tr - s;

  const CVec2 vp = eigenvector_for(H, out.lam_plus);
  const CVec2 vm = eigenvector_for(H, out.lam_minus);
  const cplx overlap = std::conj(vp.x) * vm.x + std::conj(vp.y) * vm.y;
  out.ep_measure = std::abs(overlap);
  out.is_ep = std::abs(out.lam_plus - out.lam_minus) <= ep_tol &&
              out.ep_measure >= 1.0 - ep_tol;

  if (!out.is_ep) {
    out.right_vectors = {vp.x, vm.x, vp.y, vm.y};
    return out;
  }

  // Defective (or proportional-to-identity) case: column 1 is the
  // eigenvector, column 2 the generalized vector w with (H - lam I) w = v.
  const CMat2 N = H - half_tr * CMat2::identity();
  const double nn = N.norm();
  if (nn <= 1e-300) {
    // H = lam * I: not defective; return the standard basis.
    out.right_vectors = CMat2::identity();
    out.ep_measure = 0.0;
    out.is_ep = false;
    return out;
  }
  // N is nilpotent (N^2 = 0). Range(N) is spanned by the eigenvector: pick
  // the larger column of N as v, then solve N w = v by least squares along
  // the dominant row.
  const CVec2 col1{N.a, N.c};
  const CVec2 col2{N.b, N.d};
  const bool use1 = std::norm(col1.x) + std::norm(col1.y) >=
                    std::norm(col2.x) + std::norm(col2.y);
  const CVec2 v = use1 ? col1 : col2;
  const double vn = std::sqrt(std::norm(v.x) + std::norm(v.y));
  const CVec2 vunit{v.x / vn, v.y / vn};
  // N (e_k / vn) = v / vn exactly for the chosen column.
  const CVec2 w = use1 ? CVec2{1.0 / vn, 0.0} : CVec2{0.0, 1.0 / vn};
  out.right_vectors = {vunit.x, w.x, vunit.y, w.y};
  return out;
}

CMat2 expm(const CMat2& A) {
  // Scale so the norm is small, exponentiate by Taylor, square back.
  int squarings = 0;
  double nrm = A.norm();
  while (nrm > 0.25) {
    nrm *= 0.5;
    ++squarings;
  }
  const double scale = std::ldexp(1.0, -squarings);
  const CMat2 B = cplx(scale, 0.0) * A;
  CMat2 term = CMat2::identity();
  CMat2 sum = CMat2::identity();
  for (int k = 1; k <= 24; ++k) {
    term = term * B;
    term = cplx(1.0 / k, 0.0) * term;
    sum = sum + term;
    if (term.norm() <= 1e-18 * sum.norm()) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

}  // namespace ptdqd
