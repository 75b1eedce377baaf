#pragma once

// Linear-problem layer: dressed wave functions psi = g exp(eps(I_x x + ...)),
// operator pencils of first order in the spectral parameter lambda, their
// commutator collected by powers of lambda, and the map between those
// coefficients and the zero-curvature residuals.
//
// For pencils L = D + N with constant direction coefficients the commutator
// acts by multiplication: [L1, L2] = D1(N2) - D2(N1) + [N1, N2]. With the
// pencil pair built by gcme_pencils the three lambda coefficients are
//   coeff(l^0) = Ra- + Rb-,  coeff(l^1) = 2 Rc-,  coeff(l^2) = Ra- - Rb-,
// where R- are the bracket-flipped residuals (derivative terms unchanged,
// commutator negated). The same data as plain residuals of the negated
// connection carries one overall sign: R(-A,-B,-C) = -R-.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gcme/algebra.hpp"
#include "gcme/core.hpp"
#include "gcme/curvature.hpp"
#include "gcme/fields.hpp"
#include "gcme/grid.hpp"
#include "gcme/sign_convention.hpp"

namespace gcme {

namespace detail {

template <class M>
Field<M> scaled(const Field<M>& f, double s) {
  Field<M> out(f.grid(), FieldInit<M>::zero());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = M(f[i] * s);
  return out;
}

template <class M>
Field<M> combined(const Field<M>& f, double sf, const Field<M>& g, double sg) {
  require_same_grid(f.grid(), g.grid(), "combined");
  Field<M> out(f.grid(), FieldInit<M>::zero());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = M(f[i] * sf + g[i] * sg);
  return out;
}

/// dst += s * src; a zero weight contributes nothing, keeping exact zeros.
template <class M, class S>
void accumulate_scaled(Field<M>& dst, const Field<M>& src, S s) {
  if (s == S(0)) return;
  require_same_grid(dst.grid(), src.grid(), "accumulate_scaled");
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = M(dst[i] + src[i] * s);
}

template <class M>
bool is_diagonal(const M& m) {
  using Scalar = typename M::Scalar;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      if (r != c && m(r, c) != Scalar(0)) return false;
  return true;
}

/// d_first - d_second - [first, second]: the bracket-flipped companion of
/// pair_residual.
template <class M>
Field<M> pair_residual_flipped(const Field<M>& first, const Field<M>& second,
                               const Field<M>& d_first, const Field<M>& d_second) {
  require_same_grid(first.grid(), second.grid(), "pair_residual_flipped");
  Field<M> out(first.grid(), FieldInit<M>::zero());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = M(d_first[i] - d_second[i] - algebra::commutator(first[i], second[i]));
  return out;
}

}  // namespace detail

/// Scalar polynomial c0 + lambda c1.
struct LambdaPoly1 {
  double c0 = 0.0;
  double c1 = 0.0;
  double at(double lambda) const { return c0 + lambda * c1; }
  bool zero() const { return c0 == 0.0 && c1 == 0.0; }
};

/// First-order operator pencil L = D + N: D is a derivative combination with
/// per-axis coefficients of degree <= 1 in lambda, N a multiplication term
/// pot0 + lambda pot1. When closed-form axis derivatives of the potentials
/// are attached (has_exact) they replace finite differences everywhere.
template <class M>
struct OperatorPencil {
  explicit OperatorPencil(const Grid& grid)
      : pot0(grid, detail::FieldInit<M>::zero()),
        pot1(grid, detail::FieldInit<M>::zero()) {}

  LambdaPoly1& direction(Axis a) { return dir[static_cast<std::size_t>(a)]; }
  const LambdaPoly1& direction(Axis a) const { return dir[static_cast<std::size_t>(a)]; }

  std::array<LambdaPoly1, 3> dir = {};  // indexed by Axis
  Field<M> pot0, pot1;
  bool has_exact = false;
  std::array<Field<M>, 3> dpot0 = {}, dpot1 = {};  // per axis, when has_exact
};

/// Pencil pair whose commutator collects the 2+1 residuals:
///   P1 = (-d_t - d_y + lambda d_x) + (-(C + B) + lambda A)
///   P2 = (lambda d_t - lambda d_y - d_x) + (-A + lambda (C - B))
template <class M>
std::pair<OperatorPencil<M>, OperatorPencil<M>> gcme_pencils(const Field<M>& a,
                                                             const Field<M>& b,
                                                             const Field<M>& c) {
  require_same_grid(a.grid(), b.grid(), "gcme_pencils");
  require_same_grid(a.grid(), c.grid(), "gcme_pencils");
  require_domain(a.grid().dim() == 3, "gcme_pencils: needs an (x,y,t) grid");

  OperatorPencil<M> p1(a.grid()), p2(a.grid());
  p1.direction(Axis::T) = {-1.0, 0.0};
  p1.direction(Axis::Y) = {-1.0, 0.0};
  p1.direction(Axis::X) = {0.0, +1.0};
  p1.pot0 = detail::combined(c, -1.0, b, -1.0);
  p1.pot1 = a;

  p2.direction(Axis::T) = {0.0, +1.0};
  p2.direction(Axis::Y) = {0.0, -1.0};
  p2.direction(Axis::X) = {-1.0, 0.0};
  p2.pot0 = detail::scaled(a, -1.0);
  p2.pot1 = detail::combined(c, +1.0, b, -1.0);
  return {std::move(p1), std::move(p2)};
}

/// Same pair from a sampled connection. With `exact` derivatives the pencil
/// potentials carry closed-form derivative fields: every potential is a
/// fixed linear combination of the axis matrices, so its derivative is the
/// same combination of derivative matrices.
template <class M>
std::pair<OperatorPencil<M>, OperatorPencil<M>> gcme_pencils(
    const ConnectionField& conn, const MatrixBuilder<M>& build,
    const ConnectionDerivatives* exact = nullptr) {
  require_domain(conn.grid.dim() == 3, "gcme_pencils: needs an (x,y,t) grid");
  const auto m = connection_matrices(conn, build);
  auto pair = gcme_pencils(m[0], m[1], m[2]);
  if (exact) {
    require_same_grid(conn.grid, exact->grid, "gcme_pencils");
    pair.first.has_exact = pair.second.has_exact = true;
    for (int ai = 0; ai < 3; ++ai) {
      const Axis wrt = static_cast<Axis>(ai);
      const Field<M> da = matrix_field(exact->deriv(Axis::X, wrt), build);
      const Field<M> db = matrix_field(exact->deriv(Axis::Y, wrt), build);
      const Field<M> dc = matrix_field(exact->deriv(Axis::T, wrt), build);
      pair.first.dpot0[static_cast<std::size_t>(ai)] = detail::combined(dc, -1.0, db, -1.0);
      pair.first.dpot1[static_cast<std::size_t>(ai)] = da;
      pair.second.dpot0[static_cast<std::size_t>(ai)] = detail::scaled(da, -1.0);
      pair.second.dpot1[static_cast<std::size_t>(ai)] = detail::combined(dc, +1.0, db, -1.0);
    }
  }
  return pair;
}

/// Lambda coefficients (l^0, l^1, l^2) of [P1, P2] = D1(N2) - D2(N1) +
/// [N1, N2]. Directions and potentials are degree <= 1, so the expansion
/// never exceeds degree 2 by construction.
template <class M>
std::array<Field<M>, 3> pencil_commutator_coeffs(const OperatorPencil<M>& p1,
                                                 const OperatorPencil<M>& p2) {
  require_same_grid(p1.pot0.grid(), p2.pot0.grid(), "pencil_commutator_coeffs");
  const Grid& g = p1.pot0.grid();
  std::array<Field<M>, 3> out = {Field<M>(g, detail::FieldInit<M>::zero()),
                                 Field<M>(g, detail::FieldInit<M>::zero()),
                                 Field<M>(g, detail::FieldInit<M>::zero())};

  auto add_derivative_part = [&](const OperatorPencil<M>& dpart,
                                 const OperatorPencil<M>& npart, double sign) {
    for (int ai = 0; ai < 3; ++ai) {
      const LambdaPoly1& c = dpart.dir[static_cast<std::size_t>(ai)];
      if (c.zero()) continue;
      const Axis axis = static_cast<Axis>(ai);
      require_domain(g.has_axis(axis),
                     std::string("pencil_commutator_coeffs: direction along axis ") +
                         axis_name(axis) + " absent from grid");
      Field<M> fd0, fd1;
      if (!npart.has_exact) {
        fd0 = partial_derivative(npart.pot0, axis);
        fd1 = partial_derivative(npart.pot1, axis);
      }
      const Field<M>& d0 = npart.has_exact ? npart.dpot0[static_cast<std::size_t>(ai)] : fd0;
      const Field<M>& d1 = npart.has_exact ? npart.dpot1[static_cast<std::size_t>(ai)] : fd1;
      detail::accumulate_scaled(out[0], d0, sign * c.c0);
      detail::accumulate_scaled(out[1], d0, sign * c.c1);
      detail::accumulate_scaled(out[1], d1, sign * c.c0);
      detail::accumulate_scaled(out[2], d1, sign * c.c1);
    }
  };
  add_derivative_part(p1, p2, +1.0);
  add_derivative_part(p2, p1, -1.0);

  for (std::size_t i = 0; i < out[0].size(); ++i) {
    const M& n10 = p1.pot0[i];
    const M& n11 = p1.pot1[i];
    const M& n20 = p2.pot0[i];
    const M& n21 = p2.pot1[i];
    out[0][i] = M(out[0][i] + algebra::commutator(n10, n20));
    out[1][i] = M(out[1][i] + algebra::commutator(n10, n21) + algebra::commutator(n11, n20));
    out[2][i] = M(out[2][i] + algebra::commutator(n11, n21));
  }
  return out;
}

/// [P1, P2] with lambda substituted up front: the pencils collapse to one
/// derivative combination and one potential each, and the commutator is
/// evaluated directly. Agrees with the collected coefficients at every
/// lambda up to roundoff.
template <class M>
Field<M> evaluate_pencil_commutator(const OperatorPencil<M>& p1,
                                    const OperatorPencil<M>& p2, double lambda) {
  require_same_grid(p1.pot0.grid(), p2.pot0.grid(), "evaluate_pencil_commutator");
  require_domain(std::isfinite(lambda), "evaluate_pencil_commutator: non-finite lambda");
  const Grid& g = p1.pot0.grid();

  auto assemble = [&](const OperatorPencil<M>& p) {
    Field<M> n(g, detail::FieldInit<M>::zero());
    for (std::size_t i = 0; i < n.size(); ++i) n[i] = M(p.pot0[i] + p.pot1[i] * lambda);
    return n;
  };
  const Field<M> n1 = assemble(p1), n2 = assemble(p2);

  Field<M> out(g, detail::FieldInit<M>::zero());
  auto add_derivative_part = [&](const OperatorPencil<M>& dpart,
                                 const OperatorPencil<M>& npart, const Field<M>& nfield,
                                 double sign) {
    for (int ai = 0; ai < 3; ++ai) {
      const double c = dpart.dir[static_cast<std::size_t>(ai)].at(lambda);
      if (c == 0.0) continue;
      const Axis axis = static_cast<Axis>(ai);
      require_domain(g.has_axis(axis),
                     std::string("evaluate_pencil_commutator: direction along axis ") +
                         axis_name(axis) + " absent from grid");
      if (npart.has_exact) {
        const Field<M>& d0 = npart.dpot0[static_cast<std::size_t>(ai)];
        const Field<M>& d1 = npart.dpot1[static_cast<std::size_t>(ai)];
        for (std::size_t i = 0; i < out.size(); ++i)
          out[i] = M(out[i] + (d0[i] + d1[i] * lambda) * (sign * c));
      } else {
        detail::accumulate_scaled(out, partial_derivative(nfield, axis), sign * c);
      }
    }
  };
  add_derivative_part(p1, p2, n2, +1.0);
  add_derivative_part(p2, p1, n1, -1.0);

  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = M(out[i] + algebra::commutator(n1[i], n2[i]));
  return out;
}

/// Recover the monomial coefficients of [P1, P2] from values at three
/// distinct lambdas (a degree-2 polynomial is determined by three points).
/// Independent cross-check of pencil_commutator_coeffs.
template <class M>
std::array<Field<M>, 3> sweep_commutator_coeffs(
    const OperatorPencil<M>& p1, const OperatorPencil<M>& p2,
    const std::array<double, 3>& lambdas = {0.0, 1.0, -1.0}) {
  for (double l : lambdas)
    if (!std::isfinite(l))
      throw ConfigError("lambda sweep: values must be finite");
  if (lambdas[0] == lambdas[1] || lambdas[0] == lambdas[2] || lambdas[1] == lambdas[2])
    throw ConfigError("lambda sweep: needs three distinct values");

  Eigen::Matrix3d vand;
  for (int j = 0; j < 3; ++j) {
    vand(j, 0) = 1.0;
    vand(j, 1) = lambdas[static_cast<std::size_t>(j)];
    vand(j, 2) = lambdas[static_cast<std::size_t>(j)] * lambdas[static_cast<std::size_t>(j)];
  }
  const Eigen::Matrix3d weights = vand.inverse();

  std::array<Field<M>, 3> values = {evaluate_pencil_commutator(p1, p2, lambdas[0]),
                                    evaluate_pencil_commutator(p1, p2, lambdas[1]),
                                    evaluate_pencil_commutator(p1, p2, lambdas[2])};
  const Grid& g = p1.pot0.grid();
  std::array<Field<M>, 3> out = {Field<M>(g, detail::FieldInit<M>::zero()),
                                 Field<M>(g, detail::FieldInit<M>::zero()),
                                 Field<M>(g, detail::FieldInit<M>::zero())};
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j)
      detail::accumulate_scaled(out[static_cast<std::size_t>(k)],
                                values[static_cast<std::size_t>(j)], weights(k, j));
  return out;
}

/// Invert the coefficient map: from (l^0, l^1, l^2) of [P1, P2] back to the
/// bracket-flipped residuals (Ra-, Rb-, Rc-).
template <class M>
std::array<Field<M>, 3> coeffs_to_gcme(const std::array<Field<M>, 3>& coeffs) {
  const Grid& g = coeffs[0].grid();
  require_same_grid(g, coeffs[1].grid(), "coeffs_to_gcme");
  require_same_grid(g, coeffs[2].grid(), "coeffs_to_gcme");
  std::array<Field<M>, 3> out = {Field<M>(g, detail::FieldInit<M>::zero()),
                                 Field<M>(g, detail::FieldInit<M>::zero()),
                                 Field<M>(g, detail::FieldInit<M>::zero())};
  for (std::size_t i = 0; i < out[0].size(); ++i) {
    out[0][i] = M((coeffs[0][i] + coeffs[2][i]) * 0.5);
    out[1][i] = M((coeffs[0][i] - coeffs[2][i]) * 0.5);
    out[2][i] = M(coeffs[1][i] * 0.5);
  }
  return out;
}

/// Bracket-flipped residual triple (Ra-, Rb-, Rc-) of three matrix fields,
/// finite-difference derivatives.
template <class M>
std::array<Field<M>, 3> residual_2p1_flipped(const Field<M>& a, const Field<M>& b,
                                             const Field<M>& c) {
  require_same_grid(a.grid(), b.grid(), "residual_2p1_flipped");
  require_same_grid(a.grid(), c.grid(), "residual_2p1_flipped");
  require_domain(a.grid().dim() == 3, "residual_2p1_flipped: needs an (x,y,t) grid");
  return {detail::pair_residual_flipped(a, b, partial_derivative(a, Axis::Y),
                                        partial_derivative(b, Axis::X)),
          detail::pair_residual_flipped(a, c, partial_derivative(a, Axis::T),
                                        partial_derivative(c, Axis::X)),
          detail::pair_residual_flipped(b, c, partial_derivative(b, Axis::T),
                                        partial_derivative(c, Axis::Y))};
}

/// Same triple from a sampled connection, optionally with closed-form
/// derivatives.
template <class M>
std::array<Field<M>, 3> gcme_residuals_flipped(const ConnectionField& conn,
                                               const MatrixBuilder<M>& build,
                                               const ConnectionDerivatives* exact = nullptr) {
  require_domain(conn.grid.dim() == 3, "gcme_residuals_flipped: needs an (x,y,t) grid");
  const auto m = connection_matrices(conn, build);
  auto deriv = [&](Axis axis, Axis wrt) {
    if (exact) return matrix_field(exact->deriv(axis, wrt), build);
    return partial_derivative(m[static_cast<std::size_t>(conn.grid.slot_of(axis))], wrt);
  };
  if (exact) require_same_grid(conn.grid, exact->grid, "gcme_residuals_flipped");
  return {detail::pair_residual_flipped(m[0], m[1], deriv(Axis::X, Axis::Y),
                                        deriv(Axis::Y, Axis::X)),
          detail::pair_residual_flipped(m[0], m[2], deriv(Axis::X, Axis::T),
                                        deriv(Axis::T, Axis::X)),
          detail::pair_residual_flipped(m[1], m[2], deriv(Axis::Y, Axis::T),
                                        deriv(Axis::T, Axis::Y))};
}

/// Residual triple the pencil coefficients are compared against under a
/// given bracket convention. Only the flipped choice reproduces the
/// coefficients on curved connections; the direct choice is the testable
/// wrong alternative.
template <class M>
std::array<Field<M>, 3> pencil_target_residuals(const ConnectionField& conn,
                                                const MatrixBuilder<M>& build,
                                                PencilBracket bracket,
                                                const ConnectionDerivatives* exact = nullptr) {
  require_domain(conn.grid.dim() == 3, "pencil_target_residuals: needs an (x,y,t) grid");
  if (bracket == PencilBracket::kFlipped) return gcme_residuals_flipped(conn, build, exact);
  auto v = gcme_residuals(conn, build, exact);
  return {std::move(v[0]), std::move(v[1]), std::move(v[2])};
}

/// Coefficient-wise negation of a sampled connection.
inline ConnectionField negated(ConnectionField conn) {
  for (auto& ax : conn.axes)
    for (auto& c : ax.data()) c = CoeffTriple(-c);
  return conn;
}

inline ConnectionDerivatives negated(ConnectionDerivatives d) {
  for (auto& row : d.d)
    for (auto& f : row)
      for (auto& c : f.data()) c = CoeffTriple(-c);
  return d;
}

/// Constant diagonal exponents of a dressed wave function
///   psi = g exp(eps (I_x x + I_y y + I_t t)).
/// With eps = -1 and a flat g whose left logarithmic derivative along an
/// axis is the connection matrix, psi solves d_axis psi = A_axis psi -
/// psi I_axis; eps = +1 flips the sign of the I term.
template <class M>
struct DressingSpec {
  M i_x = M::Zero();
  M i_y = M::Zero();
  M i_t = M::Zero();
  int epsilon = -1;

  const M& exponent(Axis a) const {
    switch (a) {
      case Axis::X: return i_x;
      case Axis::Y: return i_y;
      case Axis::T: return i_t;
    }
    return i_x;
  }
};

template <class M>
Field<M> dress(const Field<M>& g, const DressingSpec<M>& spec) {
  require_domain(spec.epsilon == 1 || spec.epsilon == -1, "dress: epsilon must be +1 or -1");
  const Grid& grid = g.grid();
  for (Axis a : {Axis::X, Axis::Y, Axis::T}) {
    const M& e = spec.exponent(a);
    require_domain(std::isfinite(algebra::norm(e)), "dress: non-finite exponent matrix");
    require_domain(detail::is_diagonal(e), "dress: exponent matrices must be diagonal");
    if (!grid.has_axis(a))
      require_domain(e.isZero(0.0), std::string("dress: exponent on axis ") + axis_name(a) +
                                        " absent from grid");
  }

  const double eps = static_cast<double>(spec.epsilon);
  Field<M> psi(grid, detail::FieldInit<M>::zero());
  grid.for_each([&](const std::array<int, 3>& idx, std::size_t flat) {
    const std::array<double, 3> pos = grid.position(idx);
    const M d = M(eps * (pos[static_cast<std::size_t>(Axis::X)] * spec.i_x +
                         pos[static_cast<std::size_t>(Axis::Y)] * spec.i_y +
                         pos[static_cast<std::size_t>(Axis::T)] * spec.i_t));
    M e = M::Zero();
    for (int k = 0; k < e.rows(); ++k) e(k, k) = std::exp(d(k, k));
    const M& gp = g[flat];
    require_domain(std::abs(gp.determinant()) > 1e-12, "dress: singular group element in g");
    psi[flat] = M(gp * e);
  });
  return psi;
}

/// Linear-problem defect along one axis, as printed for the eps = -1
/// convention: d_axis psi - A_axis psi + psi I_axis. Order h^2 small for a
/// correctly dressed psi; an eps = +1 dressing leaves a 2 psi I_axis excess.
template <class M>
Field<M> dressing_residual(const Field<M>& psi, const Field<M>& conn_axis,
                           const M& exponent, Axis axis) {
  require_same_grid(psi.grid(), conn_axis.grid(), "dressing_residual");
  const Field<M> dpsi = partial_derivative(psi, axis);
  Field<M> out(psi.grid(), detail::FieldInit<M>::zero());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = M(dpsi[i] - conn_axis[i] * psi[i] + psi[i] * exponent);
  return out;
}

}  // namespace gcme
