#pragma once

// Geometric flatness checks that do not depend on the stencil: transport of
// group elements along grid paths (g' = M g, classical 4th-order one-step
// integration with linear interpolation of M along each edge), plaquette
// holonomy whose leading h^2 coefficient is the matching residual norm, path
// dependence of transport, and curve reconstruction from transported frames
// (row 0 of a frame matrix is the tangent, r_x = sqrtE e1).

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "gcme/algebra.hpp"
#include "gcme/core.hpp"
#include "gcme/fields.hpp"
#include "gcme/grid.hpp"

namespace gcme {

struct PathStep {
  Axis axis = Axis::X;
  int sign = +1;  // +1 or -1
};

/// A lattice path: start index plus signed unit steps along grid axes.
struct GridPath {
  std::array<int, 3> start = {0, 0, 0};
  std::vector<PathStep> steps;

  /// Straight run of |n| steps along one axis, signed by n.
  static GridPath line(const std::array<int, 3>& start_in, Axis axis, int n) {
    GridPath p;
    p.start = start_in;
    const int sign = n < 0 ? -1 : +1;
    p.steps.assign(static_cast<std::size_t>(n < 0 ? -n : n), PathStep{axis, sign});
    return p;
  }

  GridPath& then(Axis axis, int n) {
    const int sign = n < 0 ? -1 : +1;
    for (int k = 0; k < (n < 0 ? -n : n); ++k) steps.push_back(PathStep{axis, sign});
    return *this;
  }
};

namespace detail {

/// Visit every edge of a path in order, validating bounds as it goes.
/// per_edge(from_index, to_index, slot, sign).
template <class F>
std::array<int, 3> walk_path(const Grid& g, const GridPath& path, F&& per_edge) {
  std::array<int, 3> idx = path.start;
  for (int s = 0; s < g.dim(); ++s)
    require_domain(idx[static_cast<std::size_t>(s)] >= 0 &&
                       idx[static_cast<std::size_t>(s)] < g.count(s),
                   "path: start outside grid");
  for (const PathStep& step : path.steps) {
    require_domain(step.sign == 1 || step.sign == -1, "path: step sign must be +1 or -1");
    const int slot = g.slot_of(step.axis);
    require_domain(slot >= 0, std::string("path: axis ") + axis_name(step.axis) +
                                  " not on this grid");
    std::array<int, 3> next = idx;
    next[static_cast<std::size_t>(slot)] += step.sign;
    require_domain(next[static_cast<std::size_t>(slot)] >= 0 &&
                       next[static_cast<std::size_t>(slot)] < g.count(slot),
                   "path: step exits grid");
    per_edge(idx, next, slot, step.sign);
    idx = next;
  }
  return idx;
}

}  // namespace detail

/// Final index of a path, with the same bounds validation as transport.
inline std::array<int, 3> path_end(const Grid& g, const GridPath& path) {
  return detail::walk_path(g, path, [](const std::array<int, 3>&, const std::array<int, 3>&,
                                       int, int) {});
}

struct TransportOptions {
  int substeps = 1;      // integration steps per edge
  bool reproject = true; // polar-project back onto the group after each edge
};

template <class M>
struct TransportResult {
  M end = M::Identity();
  double drift = 0.0;  // worst group defect seen after any edge
  int steps = 0;
};

/// Integrate g' = sign h A(u) g across the edges of a path, A linearly
/// interpolated between the endpoint samples of the step axis. Continuing
/// from a previous result's end element replays the identical arithmetic,
/// so transport is multiplicative over concatenation bit for bit.
template <class M>
TransportResult<M> propagate(const std::vector<Field<M>>& conn, const GridPath& path,
                             const TransportOptions& opt = {},
                             const M& start = M::Identity()) {
  require_domain(!conn.empty(), "propagate: empty connection");
  const Grid& g = conn[0].grid();
  require_domain(static_cast<int>(conn.size()) == g.dim(),
                 "propagate: need one matrix field per grid axis");
  for (const auto& f : conn) require_same_grid(g, f.grid(), "propagate");
  require_domain(opt.substeps >= 1, "propagate: substeps must be >= 1");

  TransportResult<M> out;
  out.end = start;
  const double du = 1.0 / opt.substeps;
  detail::walk_path(g, path, [&](const std::array<int, 3>& from,
                                 const std::array<int, 3>& to, int slot, int sign) {
    const M& a0 = conn[static_cast<std::size_t>(slot)].at(from);
    const M da = M(conn[static_cast<std::size_t>(slot)].at(to) - a0);
    const double scale = sign * g.spacing();
    auto rhs = [&](double u, const M& x) { return M(scale * ((a0 + u * da) * x)); };

    M cur = out.end;
    for (int k = 0; k < opt.substeps; ++k) {
      const double u0 = k * du;
      const M k1 = rhs(u0, cur);
      const M k2 = rhs(u0 + 0.5 * du, M(cur + (0.5 * du) * k1));
      const M k3 = rhs(u0 + 0.5 * du, M(cur + (0.5 * du) * k2));
      const M k4 = rhs(u0 + du, M(cur + du * k3));
      cur = M(cur + (du / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    if (opt.reproject) cur = algebra::polar_project(cur);
    out.end = cur;
    out.drift = std::max(out.drift, algebra::group_defect(cur));
    ++out.steps;
  });
  return out;
}

/// Transport states after 0, 1, ..., n edges (size steps + 1). Same
/// arithmetic as propagate.
template <class M>
std::vector<M> propagate_states(const std::vector<Field<M>>& conn, const GridPath& path,
                                const TransportOptions& opt = {},
                                const M& start = M::Identity()) {
  std::vector<M> states;
  states.reserve(path.steps.size() + 1);
  states.push_back(start);
  GridPath edge;
  edge.start = path.start;
  TransportResult<M> cur;
  cur.end = start;
  std::array<int, 3> idx = path.start;
  for (const PathStep& step : path.steps) {
    edge.start = idx;
    edge.steps = {step};
    cur = propagate(conn, edge, opt, cur.end);
    const Grid& g = conn[0].grid();
    idx[static_cast<std::size_t>(g.slot_of(step.axis))] += step.sign;
    states.push_back(cur.end);
  }
  return states;
}

/// Norm of (holonomy - I) around the axis-aligned unit cell at `corner`
/// spanned by the two plane axes. For smooth connections the defect is
/// h^2 norm(R_plane) + O(h^3) with R_plane the residual attached to the
/// plane: (x,y) -> Ra, (x,t) -> Rb, (y,t) -> Rc.
template <class M>
double plaquette_defect(const std::vector<Field<M>>& conn, const std::array<int, 3>& corner,
                        Axis plane_a, Axis plane_b, const TransportOptions& opt = {}) {
  require_domain(plane_a != plane_b, "plaquette_defect: plane axes must differ");
  GridPath loop;
  loop.start = corner;
  loop.then(plane_a, +1).then(plane_b, +1).then(plane_a, -1).then(plane_b, -1);
  const TransportResult<M> r = propagate(conn, loop, opt);
  return (r.end - M::Identity()).norm();
}

/// Transport the same start element along two paths sharing endpoints and
/// report how far the results disagree. Zero for identical paths; bounded
/// by the enclosed curvature otherwise.
template <class M>
double path_independence(const std::vector<Field<M>>& conn, const GridPath& p1,
                         const GridPath& p2, const TransportOptions& opt = {}) {
  require_domain(!conn.empty(), "path_independence: empty connection");
  const Grid& g = conn[0].grid();
  require_domain(p1.start == p2.start, "path_independence: paths start apart");
  require_domain(path_end(g, p1) == path_end(g, p2), "path_independence: paths end apart");
  const TransportResult<M> r1 = propagate(conn, p1, opt);
  const TransportResult<M> r2 = propagate(conn, p2, opt);
  return (r1.end - r2.end).norm();
}

/// Tangent rows of a transported frame sequence.
inline std::vector<Vec3> tangent_rows(const std::vector<Mat3>& frames) {
  std::vector<Vec3> out;
  out.reserve(frames.size());
  for (const Mat3& f : frames) out.push_back(Vec3(f.row(0).transpose()));
  return out;
}

/// Integrate r' = sqrtE e1 by the trapezoid rule over uniformly spaced
/// samples. sqrt_e gives the metric factor per sample.
inline std::vector<Vec3> reconstruct_curve(const std::vector<Vec3>& e1, double h,
                                           const std::vector<double>& sqrt_e,
                                           const Vec3& r0 = Vec3::Zero()) {
  require_domain(!e1.empty(), "reconstruct_curve: empty tangent sequence");
  require_domain(std::isfinite(h) && h > 0.0, "reconstruct_curve: spacing must be > 0");
  require_domain(sqrt_e.size() == e1.size(),
                 "reconstruct_curve: one metric factor per sample");
  for (double s : sqrt_e)
    require_domain(std::isfinite(s) && s > 0.0,
                   "reconstruct_curve: metric factor must be finite and > 0");

  std::vector<Vec3> out;
  out.reserve(e1.size());
  out.push_back(r0);
  for (std::size_t i = 1; i < e1.size(); ++i)
    out.push_back(Vec3(out[i - 1] +
                       (0.5 * h) * (sqrt_e[i - 1] * e1[i - 1] + sqrt_e[i] * e1[i])));
  return out;
}

inline std::vector<Vec3> reconstruct_curve(const std::vector<Vec3>& e1, double h,
                                           double sqrt_e = 1.0,
                                           const Vec3& r0 = Vec3::Zero()) {
  return reconstruct_curve(e1, h, std::vector<double>(e1.size(), sqrt_e), r0);
}

/// Reconstructed curves grouped by time slice.
struct CurveFamily {
  std::vector<double> t_values;
  std::vector<std::vector<Vec3>> curves;  // one per t value
};

/// One row per point: t value, running x index, coordinates.
inline void write_curves_csv(std::ostream& os, const CurveFamily& family) {
  require_domain(family.t_values.size() == family.curves.size(),
                 "write_curves_csv: one t value per curve");
  os << "t,i,r1,r2,r3\n";
  for (std::size_t c = 0; c < family.curves.size(); ++c)
    for (std::size_t i = 0; i < family.curves[c].size(); ++i) {
      const Vec3& r = family.curves[c][i];
      os << format_double(family.t_values[c]) << "," << i << "," << format_double(r[0])
         << "," << format_double(r[1]) << "," << format_double(r[2]) << "\n";
    }
}

/// Minimal polyline export: all vertices, then one line element per curve.
inline void write_curves_obj(std::ostream& os, const CurveFamily& family) {
  require_domain(family.t_values.size() == family.curves.size(),
                 "write_curves_obj: one t value per curve");
  for (const auto& curve : family.curves)
    for (const Vec3& r : curve)
      os << "v " << format_double(r[0]) << " " << format_double(r[1]) << " "
         << format_double(r[2]) << "\n";
  std::size_t base = 1;  // OBJ indices are 1-based
  for (const auto& curve : family.curves) {
    if (curve.size() >= 2) {
      os << "l";
      for (std::size_t i = 0; i < curve.size(); ++i) os << " " << (base + i);
      os << "\n";
    }
    base += curve.size();
  }
}

}  // namespace gcme
