#pragma once

// The two matrix forms of a frame-connection coefficient triple and the exact
// operations on them: builders, commutators, closed-form exponentials,
// Frobenius norms, polar projection, and the 2x2 <-> 3x3 correspondence.
//
// Coefficient triples are always kept in "pattern order" (c1, c2, c3): the
// x-axis matrix carries (k, sigma, tau), the y-axis (m3, m2, m1), and the
// t-axis (w3, w2, w1). Basis elements F_i = so3_from_coeffs(e_i) satisfy
// [F1,F2] = F3, [F2,F3] = F1, [F3,F1] = F2, and with the i/2 prefactor the
// 2x2 basis obeys the same table, so the coefficient-preserving map between
// representations is a Lie-algebra homomorphism. The alternate 1/(2i)
// prefactor negates the basis and turns that map into an anti-homomorphism;
// it is kept selectable as a documented negative control.

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "gcme/core.hpp"

namespace gcme {

using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;
using Mat2c = Eigen::Matrix2cd;
using Vec3 = Eigen::Vector3d;

/// Pattern-order coefficient triple (c1, c2, c3).
using CoeffTriple = Eigen::Vector3d;

enum class Rep { kSo3, kSu2 };

inline const char* rep_name(Rep r) { return r == Rep::kSo3 ? "so3" : "su2"; }

namespace algebra {

inline bool finite_triple(const CoeffTriple& c) {
  return std::isfinite(c[0]) && std::isfinite(c[1]) && std::isfinite(c[2]);
}

/// 3x3 form [[0, c1, -c2], [-beta c1, 0, c3], [beta c2, -c3, 0]].
/// beta = +1 gives the antisymmetric family; beta = -1 the split signature.
inline Mat3 so3_from_coeffs(const CoeffTriple& c, int beta = +1) {
  require_domain(finite_triple(c), "so3_from_coeffs: non-finite coefficient");
  require_domain(beta == 1 || beta == -1, "so3_from_coeffs: beta must be +1 or -1");
  const double b = static_cast<double>(beta);
  Mat3 m;
  m << 0.0, c[0], -c[1],
      -b * c[0], 0.0, c[2],
      b * c[1], -c[2], 0.0;
  return m;
}

/// Pattern coefficients read back from the upper triangle of a
/// so3_from_coeffs image (valid for either beta).
inline CoeffTriple so3_coeffs(const Mat3& m) {
  return CoeffTriple(m(0, 1), -m(0, 2), m(1, 2));
}

enum class Su2Prefactor { kIOver2, kOneOver2i };

inline Complex su2_prefactor_value(Su2Prefactor p) {
  return p == Su2Prefactor::kIOver2 ? Complex(0.0, 0.5) : Complex(0.0, -0.5);
}

inline const char* su2_prefactor_name(Su2Prefactor p) {
  return p == Su2Prefactor::kIOver2 ? "i_over_2" : "one_over_2i";
}

/// 2x2 form s [[c3, c1 + i c2], [c1 - i c2, -c3]]; traceless and
/// anti-Hermitian for either prefactor. Entries are exact: multiplying by
/// +-i/2 only swaps, halves, and negates components.
inline Mat2c su2_from_coeffs(const CoeffTriple& c,
                             Su2Prefactor p = Su2Prefactor::kIOver2) {
  require_domain(finite_triple(c), "su2_from_coeffs: non-finite coefficient");
  const Complex s = su2_prefactor_value(p);
  Mat2c m;
  m << s * Complex(c[2], 0.0), s * Complex(c[0], c[1]),
      s * Complex(c[0], -c[1]), s * Complex(-c[2], 0.0);
  return m;
}

/// Coefficients of a 2x2 element under the given prefactor. Rejects input
/// that is not traceless anti-Hermitian within tol (scaled by the norm).
inline CoeffTriple su2_coeffs(const Mat2c& m,
                              Su2Prefactor p = Su2Prefactor::kIOver2,
                              double tol = 1e-10) {
  const double scale = std::max(1.0, m.norm());
  require_domain(std::abs(m(0, 0) + m(1, 1)) <= tol * scale,
                 "su2_coeffs: input is not traceless");
  require_domain((m + m.adjoint()).norm() <= tol * scale,
                 "su2_coeffs: input is not anti-Hermitian");
  const Complex inv = p == Su2Prefactor::kIOver2 ? Complex(0.0, -2.0)
                                                 : Complex(0.0, 2.0);
  const Complex off = inv * m(0, 1);
  const Complex diag = inv * m(0, 0);
  return CoeffTriple(off.real(), off.imag(), diag.real());
}

/// Coefficient-preserving map from the 2x2 to the 3x3 representation. A
/// homomorphism for the i/2 prefactor, an anti-homomorphism for 1/(2i).
inline Mat3 iso_to_so3(const Mat2c& m, Su2Prefactor p = Su2Prefactor::kIOver2,
                       double tol = 1e-10) {
  return so3_from_coeffs(su2_coeffs(m, p, tol), +1);
}

/// XY - YX. Mixing element kinds is a compile-time error; the zero bracket
/// cases ([X,X], [X,I]) hold exactly in floating point.
template <class M>
inline M commutator(const M& x, const M& y) {
  return M(x * y - y * x);
}

template <class M>
inline double norm(const M& m) {
  return m.norm();  // Frobenius
}

/// Exponential of an antisymmetric 3x3 matrix in closed form:
/// I + (sin th / th) X + ((1 - cos th)/th^2) X^2 with th^2 = c.c.
inline Mat3 expm(const Mat3& x) {
  const CoeffTriple c = so3_coeffs(x);
  require_domain(finite_triple(c), "expm: non-finite input");
  const double th2 = c.squaredNorm();
  const double th = std::sqrt(th2);
  double s1, s2;
  if (th < 1e-4) {
    s1 = 1.0 - th2 / 6.0 + th2 * th2 / 120.0;
    s2 = 0.5 - th2 / 24.0 + th2 * th2 / 720.0;
  } else {
    s1 = std::sin(th) / th;
    const double half_sin = std::sin(0.5 * th);
    s2 = 2.0 * half_sin * half_sin / th2;  // (1 - cos th)/th^2, no cancellation
  }
  return Mat3(Mat3::Identity() + s1 * x + s2 * (x * x));
}

/// Exponential of a 2x2 matrix in closed form. For the traceless part
/// exp(Y) = cosh(d) I + sinhc(d) Y with d^2 = -det Y; both functions are even
/// in d, so the square-root branch does not matter.
inline Mat2c expm(const Mat2c& x) {
  const Complex half_tr = 0.5 * (x(0, 0) + x(1, 1));
  Mat2c y = x;
  y(0, 0) -= half_tr;
  y(1, 1) -= half_tr;
  const Complex d2 = -(y(0, 0) * y(1, 1) - y(0, 1) * y(1, 0));
  Complex ch, shc;
  if (std::abs(d2) < 1e-8) {
    ch = 1.0 + d2 / 2.0 + d2 * d2 / 24.0;
    shc = 1.0 + d2 / 6.0 + d2 * d2 / 120.0;
  } else {
    const Complex d = std::sqrt(d2);
    ch = std::cosh(d);
    shc = std::sinh(d) / d;
  }
  Mat2c e = shc * y;
  e(0, 0) += ch;
  e(1, 1) += ch;
  if (half_tr != 0.0) e *= std::exp(half_tr);
  return e;
}

/// Deviation of g from the orthogonal/unitary group, |g* g - I|.
inline double group_defect(const Mat3& g) {
  return (g.transpose() * g - Mat3::Identity()).norm();
}

inline double group_defect(const Mat2c& g) {
  return (g.adjoint() * g - Mat2c::Identity()).norm();
}

/// Nearest orthogonal matrix (polar factor); keeps det +1 for inputs near a
/// rotation.
inline Mat3 polar_project(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  if ((u * svd.matrixV().transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return Mat3(u * svd.matrixV().transpose());
}

inline Mat2c polar_project(const Mat2c& m) {
  Eigen::JacobiSVD<Mat2c> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Mat2c(svd.matrixU() * svd.matrixV().adjoint());
}

/// Basis element F_i (i in 1..3) of the antisymmetric 3x3 family.
inline Mat3 so3_basis(int i) {
  require_domain(i >= 1 && i <= 3, "so3_basis: index must be 1..3");
  CoeffTriple c = CoeffTriple::Zero();
  c[i - 1] = 1.0;
  return so3_from_coeffs(c, +1);
}

inline Mat2c su2_basis(int i, Su2Prefactor p = Su2Prefactor::kIOver2) {
  require_domain(i >= 1 && i <= 3, "su2_basis: index must be 1..3");
  CoeffTriple c = CoeffTriple::Zero();
  c[i - 1] = 1.0;
  return su2_from_coeffs(c, p);
}

}  // namespace algebra
}  // namespace gcme
