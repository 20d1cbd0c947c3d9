#pragma once

#include <complex>

namespace ptdqd {

using cplx = std::complex<double>;

struct CVec2 {
  cplx x{0.0, 0.0};
  cplx y{0.0, 0.0};
};

/// Dense complex 2x2 matrix [[a, b], [c, d]], row-major.
struct CMat2 {
  cplx a{0.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{0.0, 0.0};

  static CMat2 identity();
  static CMat2 zero();
  /// Outer product u * v^T (no conjugation).
  static CMat2 outer(const CVec2& u, const CVec2& v);

  CMat2 transpose() const;
  CMat2 conj() const;
  CMat2 adjoint() const;
  cplx trace() const;
  cplx det() const;
  /// Inverse; throws std::runtime_error if |det| underflows to 0.
  CMat2 inverse() const;
  /// Frobenius norm.
  double norm() const;

  bool is_hermitian(double tol) const;
  bool is_identity(double tol) const;
};

CMat2 operator+(const CMat2& A, const CMat2& B);
CMat2 operator-(const CMat2& A, const CMat2& B);
CMat2 operator*(const CMat2& A, const CMat2& B);
CMat2 operator*(cplx s, const CMat2& A);
CMat2 operator*(const CMat2& A, cplx s);
CVec2 operator*(const CMat2& A, const CVec2& v);
CVec2 operator+(const CVec2& u, const CVec2& v);
CVec2 operator-(const CVec2& u, const CVec2& v);
CVec2 operator*(cplx s, const CVec2& v);

/// Eigen-structure of a 2x2 matrix H.
///
/// lam_plus carries the principal branch of the square root of the
/// discriminant (largest real part, ties broken toward +Im); right_vectors
/// holds unit-norm right eigenvectors as columns. At an exceptional point
/// (is_ep) the first column is the single eigenvector v and the second is
/// the Jordan generalized vector w solving (H - lam*I) w = v.
struct EigenInfo {
  cplx lam_plus;
  cplx lam_minus;
  CMat2 right_vectors;
  double ep_measure;  ///< eigenvector overlap |<v+|v->| in [0, 1]
  bool is_ep;
};

/// Closed-form eigendecomposition. is_ep is true iff
/// |lam_plus - lam_minus| <= ep_tol and ep_measure >= 1 - ep_tol.
EigenInfo eig2(const CMat2& H, double ep_tol = 1e-9);

/// Matrix exponential exp(A) by scaling-and-squaring on the Taylor series;
/// valid for any A, including defective ones.
CMat2 expm(const CMat2& A);

}  // namespace ptdqd
