#pragma once

// Zero-curvature residual evaluation: the 1+1 matrix and componentwise
// forms, the 2+1 triple of residuals, representation equivalence, and the
// deterministic norm sets that reports are built from.
//
// Residual signs follow the printed equations exactly: the 1+1 residual is
// U_t - W_x + [U, W]; the 2+1 residuals are
//   R_a = A_y - B_x + [A, B]
//   R_b = A_t - C_x + [A, C]
//   R_c = B_t - C_y + [B, C]
// Everything downstream (operator pencils, embeddings) maps onto these.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gcme/algebra.hpp"
#include "gcme/core.hpp"
#include "gcme/fields.hpp"
#include "gcme/grid.hpp"

namespace gcme {

namespace detail {
inline double value_norm(double v) { return std::abs(v); }
template <class M>
double value_norm(const M& m) {
  return m.norm();
}
}  // namespace detail

/// Norms of one residual field. l2 is grid-weighted, sqrt(sum |r|^2 h^dim),
/// so a constant field of norm c on a unit-volume grid reports l2 = c.
/// Interior variants skip boundary points, isolating one-sided stencils.
struct NormSet {
  double max = 0.0;
  double l2 = 0.0;
  double interior_max = 0.0;
  double interior_l2 = 0.0;
};

template <class T>
NormSet field_norms(const Field<T>& f) {
  const Grid& g = f.grid();
  const double cell = std::pow(g.spacing(), g.dim());
  NormSet out;
  double sum = 0.0, interior_sum = 0.0;
  g.for_each([&](const std::array<int, 3>& idx, std::size_t flat) {
    const double n = detail::value_norm(f[flat]);
    const double n2 = n * n;
    out.max = std::max(out.max, n);
    sum += n2;
    if (g.interior(idx)) {
      out.interior_max = std::max(out.interior_max, n);
      interior_sum += n2;
    }
  });
  out.l2 = std::sqrt(sum * cell);
  out.interior_l2 = std::sqrt(interior_sum * cell);
  return out;
}

/// d_first - d_second + [first, second] pointwise, where d_first is the
/// derivative of `first` along the axis attached to `second` and vice versa.
template <class M>
Field<M> pair_residual(const Field<M>& first, const Field<M>& second,
                       const Field<M>& d_first, const Field<M>& d_second) {
  require_same_grid(first.grid(), second.grid(), "pair_residual");
  require_same_grid(first.grid(), d_first.grid(), "pair_residual");
  require_same_grid(first.grid(), d_second.grid(), "pair_residual");
  Field<M> out(first.grid(), detail::FieldInit<M>::zero());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = M(d_first[i] - d_second[i] + algebra::commutator(first[i], second[i]));
  return out;
}

/// 1+1 matrix residual U_t - W_x + [U, W] with finite-difference derivatives.
template <class M>
Field<M> residual_1p1_matrix(const Field<M>& u, const Field<M>& w) {
  require_same_grid(u.grid(), w.grid(), "residual_1p1_matrix");
  require_domain(u.grid().dim() == 2, "residual_1p1_matrix: needs an (x,t) grid");
  return pair_residual(u, w, partial_derivative(u, Axis::T), partial_derivative(w, Axis::X));
}

/// 2+1 matrix residuals (R_a, R_b, R_c) with finite-difference derivatives.
template <class M>
std::array<Field<M>, 3> residual_2p1(const Field<M>& a, const Field<M>& b,
                                     const Field<M>& c) {
  require_same_grid(a.grid(), b.grid(), "residual_2p1");
  require_same_grid(a.grid(), c.grid(), "residual_2p1");
  require_domain(a.grid().dim() == 3, "residual_2p1: needs an (x,y,t) grid");
  return {pair_residual(a, b, partial_derivative(a, Axis::Y), partial_derivative(b, Axis::X)),
          pair_residual(a, c, partial_derivative(a, Axis::T), partial_derivative(c, Axis::X)),
          pair_residual(b, c, partial_derivative(b, Axis::T), partial_derivative(c, Axis::Y))};
}

/// Residuals of a sampled connection in the representation chosen by the
/// builder. One field for 1+1 grids, three (R_a, R_b, R_c) for 2+1. When
/// `exact` derivatives are given they replace finite differences: both
/// coefficient-to-matrix maps are linear, so the derivative matrix is the
/// matrix of the derivative triple.
template <class M>
std::vector<Field<M>> gcme_residuals(const ConnectionField& conn,
                                     const MatrixBuilder<M>& build,
                                     const ConnectionDerivatives* exact = nullptr) {
  const Grid& g = conn.grid;
  if (exact) require_same_grid(g, exact->grid, "gcme_residuals");
  const auto matrices = connection_matrices(conn, build);
  auto deriv = [&](Axis axis, Axis wrt) {
    if (exact) return matrix_field(exact->deriv(axis, wrt), build);
    return partial_derivative(matrices[static_cast<std::size_t>(g.slot_of(axis))], wrt);
  };
  auto mat = [&](Axis axis) -> const Field<M>& {
    return matrices[static_cast<std::size_t>(g.slot_of(axis))];
  };

  std::vector<Field<M>> out;
  if (g.dim() == 2) {
    out.push_back(pair_residual(mat(Axis::X), mat(Axis::T), deriv(Axis::X, Axis::T),
                                deriv(Axis::T, Axis::X)));
  } else {
    out.push_back(pair_residual(mat(Axis::X), mat(Axis::Y), deriv(Axis::X, Axis::Y),
                                deriv(Axis::Y, Axis::X)));
    out.push_back(pair_residual(mat(Axis::X), mat(Axis::T), deriv(Axis::X, Axis::T),
                                deriv(Axis::T, Axis::X)));
    out.push_back(pair_residual(mat(Axis::Y), mat(Axis::T), deriv(Axis::Y, Axis::T),
                                deriv(Axis::T, Axis::Y)));
  }
  return out;
}

/// Componentwise 1+1 residuals in the index naming:
///   r1 = k_t - w3_x - tau w2 + sigma w1
///   r2 = tau_t - w1_x - sigma w3 + k w2
///   r3 = sigma_t - w2_x - k w1 + tau w3
/// Computed by running the matrix path on the packed pattern triples and
/// extracting entries, so these values equal the matrix residual
/// coefficients bit for bit.
inline std::array<Field<double>, 3> residual_1p1_component(
    const Field<double>& k, const Field<double>& sigma, const Field<double>& tau,
    const Field<double>& w1, const Field<double>& w2, const Field<double>& w3) {
  const Grid& g = k.grid();
  for (const Field<double>* f : {&sigma, &tau, &w1, &w2, &w3})
    require_same_grid(g, f->grid(), "residual_1p1_component");
  require_domain(g.dim() == 2, "residual_1p1_component: needs an (x,t) grid");

  const MatrixBuilder<Mat3> build{+1};
  Field<Mat3> u(g, Mat3::Zero()), w(g, Mat3::Zero());
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = build(CoeffTriple(k[i], sigma[i], tau[i]));
    w[i] = build(CoeffTriple(w3[i], w2[i], w1[i]));
  }
  const Field<Mat3> res = residual_1p1_matrix(u, w);
  std::array<Field<double>, 3> out = {Field<double>(g, 0.0), Field<double>(g, 0.0),
                                      Field<double>(g, 0.0)};
  for (std::size_t i = 0; i < res.size(); ++i) {
    const CoeffTriple c = build.extract(res[i]);
    // Pattern order (c1, c2, c3) carries (r1, r3, r2).
    out[0][i] = c[0];
    out[1][i] = c[2];
    out[2][i] = c[1];
  }
  return out;
}

/// Residuals of the same coefficient data in both representations, plus the
/// worst pointwise disagreement after mapping the su(2) residual back to
/// so(3). With the default prefactor the map is a Lie homomorphism and the
/// deviation is roundoff; with the conjugate prefactor the bracket terms
/// flip sign and the deviation equals twice the bracket part.
struct EquivalenceResult {
  double deviation = 0.0;
  std::vector<NormSet> so3;  // per equation, report label order
  std::vector<NormSet> su2;
};

inline EquivalenceResult equivalence_su2_so3(
    const ConnectionField& conn,
    algebra::Su2Prefactor prefactor = algebra::Su2Prefactor::kIOver2,
    const ConnectionDerivatives* exact = nullptr) {
  require_domain(conn.beta == 1,
                 "equivalence_su2_so3: needs the antisymmetric pattern (beta = +1)");
  const auto res3 = gcme_residuals<Mat3>(conn, MatrixBuilder<Mat3>{+1}, exact);
  const auto res2 = gcme_residuals<Mat2c>(conn, MatrixBuilder<Mat2c>{prefactor}, exact);

  EquivalenceResult out;
  for (std::size_t e = 0; e < res3.size(); ++e) {
    out.so3.push_back(field_norms(res3[e]));
    out.su2.push_back(field_norms(res2[e]));
    for (std::size_t i = 0; i < res3[e].size(); ++i) {
      const Mat3 mapped = algebra::iso_to_so3(res2[e][i], prefactor);
      out.deviation = std::max(out.deviation, (mapped - res3[e][i]).norm());
    }
  }
  return out;
}

}  // namespace gcme
