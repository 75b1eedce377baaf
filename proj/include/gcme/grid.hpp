#pragma once

// Uniform 2-D/3-D grids and flat-storage sampled fields. Iteration order is
// fixed (first slot fastest) so every reduction over a field is deterministic.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gcme/core.hpp"

namespace gcme {

/// Uniform grid over (x,t) when dim == 2 or (x,y,t) when dim == 3. One
/// spacing h for all axes, per-axis origin and point count. Counts must be
/// at least 5 so the interior/boundary stencil split is well defined.
class Grid {
 public:
  Grid(int dim, double h, std::array<int, 3> count,
       std::array<double, 3> origin = {0.0, 0.0, 0.0})
      : dim_(dim), h_(h), count_(count), origin_(origin) {
    require_domain(dim == 2 || dim == 3, "Grid: dim must be 2 or 3");
    require_domain(std::isfinite(h) && h > 0.0, "Grid: spacing must be finite and > 0");
    for (int s = 0; s < dim_; ++s) {
      require_domain(count_[s] >= 5, "Grid: per-axis count must be >= 5");
      require_domain(std::isfinite(origin_[s]), "Grid: non-finite origin");
    }
    for (int s = dim_; s < 3; ++s) {
      count_[s] = 1;
      origin_[s] = 0.0;
    }
  }

  static Grid uniform(int dim, double h, int n,
                      std::array<double, 3> origin = {0.0, 0.0, 0.0}) {
    return Grid(dim, h, {n, n, n}, origin);
  }

  int dim() const { return dim_; }
  double spacing() const { return h_; }
  int count(int slot) const { return count_[slot]; }
  double origin(int slot) const { return origin_[slot]; }

  std::size_t size() const {
    std::size_t n = 1;
    for (int s = 0; s < dim_; ++s) n *= static_cast<std::size_t>(count_[s]);
    return n;
  }

  /// Storage slot of an axis, or -1 when the axis is absent. 2-D grids map
  /// x -> 0, t -> 1; 3-D grids map x -> 0, y -> 1, t -> 2.
  int slot_of(Axis a) const {
    if (dim_ == 2) {
      if (a == Axis::X) return 0;
      if (a == Axis::T) return 1;
      return -1;
    }
    return static_cast<int>(a);
  }

  bool has_axis(Axis a) const { return slot_of(a) >= 0; }

  Axis axis_of(int slot) const {
    if (dim_ == 2) return slot == 0 ? Axis::X : Axis::T;
    return static_cast<Axis>(slot);
  }

  std::size_t flatten(const std::array<int, 3>& idx) const {
    std::size_t flat = 0;
    for (int s = dim_ - 1; s >= 0; --s)
      flat = flat * static_cast<std::size_t>(count_[s]) +
             static_cast<std::size_t>(idx[s]);
    return flat;
  }

  std::array<int, 3> unflatten(std::size_t flat) const {
    std::array<int, 3> idx = {0, 0, 0};
    for (int s = 0; s < dim_; ++s) {
      idx[s] = static_cast<int>(flat % static_cast<std::size_t>(count_[s]));
      flat /= static_cast<std::size_t>(count_[s]);
    }
    return idx;
  }

  double coord(int slot, int i) const { return origin_[slot] + h_ * i; }

  /// Physical coordinates indexed by Axis (x,y,t); y is 0 on 2-D grids.
  std::array<double, 3> position(const std::array<int, 3>& idx) const {
    std::array<double, 3> pos = {0.0, 0.0, 0.0};
    for (int s = 0; s < dim_; ++s)
      pos[static_cast<int>(axis_of(s))] = coord(s, idx[s]);
    return pos;
  }

  /// True when every index is at least one point away from the boundary.
  bool interior(const std::array<int, 3>& idx) const {
    for (int s = 0; s < dim_; ++s)
      if (idx[s] == 0 || idx[s] == count_[s] - 1) return false;
    return true;
  }

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && h_ == o.h_ && count_ == o.count_ &&
           origin_ == o.origin_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

  /// Visit every point in the fixed deterministic order. The visitor gets
  /// (multi-index, flat index).
  template <class F>
  void for_each(F&& visit) const {
    std::array<int, 3> idx = {0, 0, 0};
    const std::size_t total = size();
    for (std::size_t flat = 0; flat < total; ++flat) {
      visit(idx, flat);
      for (int s = 0; s < dim_; ++s) {
        if (++idx[s] < count_[s]) break;
        idx[s] = 0;
      }
    }
  }

 private:
  int dim_;
  double h_;
  std::array<int, 3> count_;
  std::array<double, 3> origin_;
};

/// A value per grid point, stored flat in the grid's iteration order.
template <class T>
class Field {
 public:
  Field() : grid_(2, 1.0, {5, 5, 5}), data_() {}
  Field(const Grid& g, const T& fill)
      : grid_(g), data_(g.size(), fill) {}

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at(const std::array<int, 3>& idx) { return data_[grid_.flatten(idx)]; }
  const T& at(const std::array<int, 3>& idx) const {
    return data_[grid_.flatten(idx)];
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

 private:
  Grid grid_;
  std::vector<T> data_;
};

/// Build a field by evaluating fn(multi-index, physical position).
template <class T, class F>
Field<T> make_field(const Grid& g, F&& fn) {
  Field<T> out(g, fn(std::array<int, 3>{0, 0, 0}, g.position({0, 0, 0})));
  g.for_each([&](const std::array<int, 3>& idx, std::size_t flat) {
    out[flat] = fn(idx, g.position(idx));
  });
  return out;
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* who) {
  require_domain(a == b, std::string(who) + ": grid mismatch");
}

}  // namespace gcme
