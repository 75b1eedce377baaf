#pragma once

// Sampled coefficient fields over a grid, second-order finite differences,
// matrix realizations in either representation, and the exact pure-gauge
// field builder.

#include <array>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "gcme/algebra.hpp"
#include "gcme/core.hpp"
#include "gcme/grid.hpp"
#include "gcme/scenarios.hpp"

namespace gcme {

namespace detail {
template <class T>
struct FieldInit {
  static T zero() { return T::Zero(); }
};
template <>
struct FieldInit<double> {
  static double zero() { return 0.0; }
};
}  // namespace detail

/// Coefficient triples per grid axis, pattern order. Axis x stores (k,
/// sigma, tau) directly; on the y and t axes the pattern order is the
/// reverse of the index naming, so y stores (m3, m2, m1) and t stores
/// (w3, w2, w1). Named exports (CSV, reports) undo the reversal.
struct ConnectionField {
  ConnectionField(const Grid& grid_in, Rep rep_in = Rep::kSo3, int beta_in = +1)
      : grid(grid_in), rep(rep_in), beta(beta_in) {
    require_domain(beta == 1 || beta == -1, "ConnectionField: beta must be +1 or -1");
    axes.reserve(static_cast<std::size_t>(grid.dim()));
    for (int s = 0; s < grid.dim(); ++s)
      axes.emplace_back(grid, CoeffTriple::Zero());
  }

  Field<CoeffTriple>& axis(Axis a) {
    const int slot = grid.slot_of(a);
    require_domain(slot >= 0, std::string("ConnectionField: axis ") + axis_name(a) +
                                  " not present on this grid");
    return axes[static_cast<std::size_t>(slot)];
  }
  const Field<CoeffTriple>& axis(Axis a) const {
    return const_cast<ConnectionField*>(this)->axis(a);
  }

  Grid grid;
  Rep rep;
  int beta;
  std::vector<Field<CoeffTriple>> axes;  // indexed by grid slot
};

/// Closed-form partials of a sampled connection: deriv(axis, wrt) is the
/// exact derivative of the axis coefficient field along wrt.
struct ConnectionDerivatives {
  explicit ConnectionDerivatives(const Grid& grid_in) : grid(grid_in) {
    d.resize(static_cast<std::size_t>(grid.dim()));
    for (auto& row : d)
      for (int s = 0; s < grid.dim(); ++s) row.emplace_back(grid, CoeffTriple::Zero());
  }

  const Field<CoeffTriple>& deriv(Axis axis, Axis wrt) const {
    const int a = grid.slot_of(axis), w = grid.slot_of(wrt);
    require_domain(a >= 0 && w >= 0, "ConnectionDerivatives: axis not on this grid");
    return d[static_cast<std::size_t>(a)][static_cast<std::size_t>(w)];
  }
  Field<CoeffTriple>& deriv(Axis axis, Axis wrt) {
    return const_cast<Field<CoeffTriple>&>(
        static_cast<const ConnectionDerivatives*>(this)->deriv(axis, wrt));
  }

  Grid grid;
  std::vector<std::vector<Field<CoeffTriple>>> d;  // [axis slot][wrt slot]
};

inline ConnectionField sample_connection(const Scenario& scenario, const Grid& grid,
                                         Rep rep = Rep::kSo3, int beta = +1) {
  scenario.check_dim(grid.dim());
  ConnectionField out(grid, rep, beta);
  for (int s = 0; s < grid.dim(); ++s) {
    const Axis axis = grid.axis_of(s);
    Field<CoeffTriple>& dst = out.axes[static_cast<std::size_t>(s)];
    grid.for_each([&](const std::array<int, 3>& idx, std::size_t flat) {
      const CoeffTriple c = scenario.coeff(axis, grid.position(idx));
      require_domain(algebra::finite_triple(c),
                     "sample_connection: scenario produced a non-finite value");
      dst[flat] = c;
    });
  }
  return out;
}

inline ConnectionField sample_connection(const std::string& spec, const Grid& grid,
                                         Rep rep = Rep::kSo3, int beta = +1) {
  return sample_connection(*make_scenario_from_spec(spec), grid, rep, beta);
}

inline ConnectionDerivatives sample_derivatives(const Scenario& scenario, const Grid& grid) {
  scenario.check_dim(grid.dim());
  ConnectionDerivatives out(grid);
  for (int a = 0; a < grid.dim(); ++a)
    for (int w = 0; w < grid.dim(); ++w) {
      const Axis axis = grid.axis_of(a), wrt = grid.axis_of(w);
      Field<CoeffTriple>& dst = out.d[static_cast<std::size_t>(a)][static_cast<std::size_t>(w)];
      grid.for_each([&](const std::array<int, 3>& idx, std::size_t flat) {
        const CoeffTriple c = scenario.coeff_derivative(axis, wrt, grid.position(idx));
        require_domain(algebra::finite_triple(c),
                       "sample_derivatives: scenario produced a non-finite value");
        dst[flat] = c;
      });
    }
  return out;
}

/// Second-order finite difference along one grid axis: central stencil in
/// the interior, one-sided three-point stencils on the boundary. Exact to
/// roundoff on polynomials of degree <= 2.
template <class T>
Field<T> partial_derivative(const Field<T>& f, Axis axis) {
  const Grid& g = f.grid();
  const int slot = g.slot_of(axis);
  require_domain(slot >= 0, std::string("partial_derivative: axis ") + axis_name(axis) +
                                " not in grid");
  const double inv2h = 1.0 / (2.0 * g.spacing());
  Field<T> out(g, detail::FieldInit<T>::zero());
  const int n = g.count(slot);
  g.for_each([&](const std::array<int, 3>& idx, std::size_t flat) {
    const int i = idx[static_cast<std::size_t>(slot)];
    std::array<int, 3> a = idx, b = idx;
    if (i >= 1 && i <= n - 2) {
      a[static_cast<std::size_t>(slot)] = i + 1;
      b[static_cast<std::size_t>(slot)] = i - 1;
      out[flat] = T((f.at(a) - f.at(b)) * inv2h);
    } else if (i == 0) {
      a[static_cast<std::size_t>(slot)] = 1;
      b[static_cast<std::size_t>(slot)] = 2;
      out[flat] = T((f.at(a) * 4.0 - f.at(idx) * 3.0 - f.at(b)) * inv2h);
    } else {
      a[static_cast<std::size_t>(slot)] = n - 2;
      b[static_cast<std::size_t>(slot)] = n - 3;
      out[flat] = T((f.at(idx) * 3.0 - f.at(a) * 4.0 + f.at(b)) * inv2h);
    }
  });
  return out;
}

/// Coefficient-triple to matrix map for one representation. The so3 builder
/// carries the pattern sign beta; the su2 builder carries the prefactor.
template <class M>
struct MatrixBuilder;

template <>
struct MatrixBuilder<Mat3> {
  int beta = +1;
  Mat3 operator()(const CoeffTriple& c) const { return algebra::so3_from_coeffs(c, beta); }
  // The pattern entries (0,1), -(0,2), (1,2) carry (c1,c2,c3) for either beta.
  CoeffTriple extract(const Mat3& m) const { return algebra::so3_coeffs(m); }
};

template <>
struct MatrixBuilder<Mat2c> {
  algebra::Su2Prefactor prefactor = algebra::Su2Prefactor::kIOver2;
  Mat2c operator()(const CoeffTriple& c) const {
    return algebra::su2_from_coeffs(c, prefactor);
  }
  CoeffTriple extract(const Mat2c& m) const { return algebra::su2_coeffs(m, prefactor); }
};

template <class M>
Field<M> matrix_field(const Field<CoeffTriple>& coeffs, const MatrixBuilder<M>& build) {
  Field<M> out(coeffs.grid(), detail::FieldInit<M>::zero());
  for (std::size_t i = 0; i < coeffs.size(); ++i) out[i] = build(coeffs[i]);
  return out;
}

template <class M>
std::vector<Field<M>> connection_matrices(const ConnectionField& cf,
                                          const MatrixBuilder<M>& build) {
  std::vector<Field<M>> out;
  out.reserve(cf.axes.size());
  for (const auto& ax : cf.axes) out.push_back(matrix_field(ax, build));
  return out;
}

/// Exact pure-gauge data: the group path g = expm(x X1) expm(y X2) expm(t X3)
/// (the y factor drops out on 1+1 grids) together with its left logarithmic
/// derivatives, which form an exactly flat connection.
template <class M>
struct PureGaugeFields {
  explicit PureGaugeFields(const Grid& grid)
      : g(grid, detail::FieldInit<M>::zero()) {}
  Field<M> g;
  std::vector<Field<M>> conn;  // by grid slot
};

template <class M>
PureGaugeFields<M> make_pure_gauge(const std::vector<M>& generators, const Grid& grid) {
  require_domain(static_cast<int>(generators.size()) == grid.dim(),
                 "make_pure_gauge: need one generator per grid axis");
  for (const M& gen : generators)
    require_domain(std::isfinite(algebra::norm(gen)), "make_pure_gauge: non-finite generator");

  PureGaugeFields<M> out(grid);
  out.conn.reserve(generators.size());
  for (int s = 0; s < grid.dim(); ++s)
    out.conn.emplace_back(grid, detail::FieldInit<M>::zero());

  grid.for_each([&](const std::array<int, 3>& idx, std::size_t flat) {
    M left = M::Identity();
    for (int s = 0; s < grid.dim(); ++s) {
      const double u = grid.coord(s, idx[static_cast<std::size_t>(s)]);
      // Connection on this axis: Ad by the factors to the left of this one.
      out.conn[static_cast<std::size_t>(s)][flat] =
          M(left * generators[static_cast<std::size_t>(s)] * M(left.inverse()));
      left = M(left * algebra::expm(M(u * generators[static_cast<std::size_t>(s)])));
    }
    out.g[flat] = left;
  });
  return out;
}

/// One row per grid point: coordinates, then the coefficient values under
/// their index names (x: k,sigma,tau; y: m1,m2,m3; t: w1,w2,w3).
inline void write_connection_csv(std::ostream& os, const ConnectionField& cf) {
  const Grid& g = cf.grid;
  if (g.dim() == 2)
    os << "x,t,k,sigma,tau,w1,w2,w3\n";
  else
    os << "x,y,t,k,sigma,tau,m1,m2,m3,w1,w2,w3\n";
  g.for_each([&](const std::array<int, 3>& idx, std::size_t flat) {
    for (int s = 0; s < g.dim(); ++s) {
      if (s) os << ",";
      os << format_double(g.coord(s, idx[static_cast<std::size_t>(s)]));
    }
    for (int s = 0; s < g.dim(); ++s) {
      const CoeffTriple& c = cf.axes[static_cast<std::size_t>(s)][flat];
      if (g.axis_of(s) == Axis::X)
        os << "," << format_double(c[0]) << "," << format_double(c[1]) << ","
           << format_double(c[2]);
      else
        os << "," << format_double(c[2]) << "," << format_double(c[1]) << ","
           << format_double(c[0]);
    }
    os << "\n";
  });
}

}  // namespace gcme
