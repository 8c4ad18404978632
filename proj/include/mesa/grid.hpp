#pragma once

// Uniform cell-centred grids in one or two dimensions and the discrete
// calculus used by the solvers and diagnostics.
//
// Fields are dense Eigen arrays with x varying fastest. Outside the grid every
// field is extended by zero, which is how the Laplacian and the upwind flux
// treat the outermost layer of cells.

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "mesa/errors.hpp"

namespace mesa {

using Point = Eigen::Vector2d;

class GridSpec {
 public:
  GridSpec(int dim, std::array<int, 2> cells, std::array<double, 2> origin,
           std::array<double, 2> extent)
      : dim_(dim), cells_(cells), origin_(origin), extent_(extent) {
    if (dim != 1 && dim != 2) throw InvalidArgument("grid dimension must be 1 or 2");
    if (dim == 1) {
      cells_[1] = 1;
      origin_[1] = 0.0;
      extent_[1] = 0.0;
    }
    for (int a = 0; a < dim; ++a) {
      if (cells_[a] < 3) throw InvalidArgument("a grid axis needs at least 3 cells");
      if (!(extent_[a] > 0.0) || !std::isfinite(extent_[a]))
        throw InvalidArgument("grid extent must be positive and finite");
    }
    h_ = extent_[0] / cells_[0];
    if (dim == 2) {
      const double hy = extent_[1] / cells_[1];
      if (std::abs(hy - h_) > 1e-12 * h_)
        throw InvalidArgument("grid spacing must be identical on every axis");
    }
  }

  /// Grid of `cells` cells per axis covering [-extent/2, extent/2]^dim.
  static GridSpec centered(int dim, int cells, double extent) {
    return GridSpec(dim, {cells, cells}, {-0.5 * extent, -0.5 * extent}, {extent, extent});
  }

  int dim() const { return dim_; }
  int cells(int axis) const { return cells_[axis]; }
  double origin(int axis) const { return origin_[axis]; }
  double extent(int axis) const { return extent_[axis]; }
  double spacing() const { return h_; }
  double cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }
  Eigen::Index size() const { return Eigen::Index(cells_[0]) * cells_[1]; }

  Eigen::Index index(int i, int j = 0) const { return i + Eigen::Index(cells_[0]) * j; }
  int ix(Eigen::Index k) const { return int(k % cells_[0]); }
  int iy(Eigen::Index k) const { return int(k / cells_[0]); }

  double center(int axis, int i) const { return origin_[axis] + (i + 0.5) * h_; }
  /// Position of the face between cell i-1 and cell i along `axis`.
  double face(int axis, int i) const { return origin_[axis] + i * h_; }

  Point cell_center(Eigen::Index k) const {
    return {center(0, ix(k)), dim_ == 2 ? center(1, iy(k)) : 0.0};
  }

  bool operator==(const GridSpec& o) const {
    return dim_ == o.dim_ && cells_ == o.cells_ && origin_ == o.origin_ && extent_ == o.extent_;
  }

 private:
  int dim_;
  std::array<int, 2> cells_;
  std::array<double, 2> origin_;
  std::array<double, 2> extent_;
  double h_ = 0.0;
};

/// Axis-aligned index box [lo, hi] (inclusive). An empty box has lo > hi on axis 0.
struct Box {
  std::array<int, 2> lo{0, 0};
  std::array<int, 2> hi{-1, -1};

  bool empty() const { return hi[0] < lo[0] || hi[1] < lo[1]; }

  Box dilated(int k, const GridSpec& g) const {
    if (empty()) return *this;
    Box b;
    for (int a = 0; a < 2; ++a) {
      const int n = a < g.dim() ? g.cells(a) : 1;
      const int kk = a < g.dim() ? k : 0;
      b.lo[a] = std::max(0, lo[a] - kk);
      b.hi[a] = std::min(n - 1, hi[a] + kk);
    }
    return b;
  }

  static Box whole(const GridSpec& g) { return {{0, 0}, {g.cells(0) - 1, g.cells(1) - 1}}; }
};

template <typename Scalar>
class BasicField {
 public:
  using Values = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  explicit BasicField(const GridSpec& grid) : grid_(grid), values_(Values::Zero(grid.size())) {}

  BasicField(const GridSpec& grid, Values values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw InvalidArgument("field length does not match the grid cell count");
  }

  static BasicField constant(const GridSpec& grid, Scalar c) {
    return BasicField(grid, Values::Constant(grid.size(), c));
  }

  template <typename F>
  static BasicField from_function(const GridSpec& grid, F&& f) {
    Values v(grid.size());
    for (Eigen::Index k = 0; k < grid.size(); ++k) v[k] = f(grid.cell_center(k));
    return BasicField(grid, std::move(v));
  }

  const GridSpec& grid() const { return grid_; }
  const Values& values() const { return values_; }
  Values& values() { return values_; }
  Eigen::Index size() const { return values_.size(); }

  Scalar operator[](Eigen::Index k) const { return values_[k]; }
  Scalar& operator[](Eigen::Index k) { return values_[k]; }
  Scalar operator()(int i, int j = 0) const { return values_[grid_.index(i, j)]; }
  Scalar& operator()(int i, int j = 0) { return values_[grid_.index(i, j)]; }

  bool all_finite() const { return values_.isFinite().all(); }

  BasicField& operator+=(const BasicField& o) { values_ += o.values_; return *this; }
  BasicField& operator-=(const BasicField& o) { values_ -= o.values_; return *this; }
  BasicField& operator*=(Scalar s) { values_ *= s; return *this; }

  friend BasicField operator+(BasicField a, const BasicField& b) { return a += b; }
  friend BasicField operator-(BasicField a, const BasicField& b) { return a -= b; }
  friend BasicField operator*(BasicField a, Scalar s) { return a *= s; }
  friend BasicField operator*(Scalar s, BasicField a) { return a *= s; }
  /// Cellwise product.
  friend BasicField operator*(BasicField a, const BasicField& b) {
    a.values_ *= b.values_;
    return a;
  }

 private:
  GridSpec grid_;
  Values values_;
};

using Field = BasicField<double>;

namespace detail {

inline void check_axis(const GridSpec& g, int axis) {
  if (axis < 0 || axis >= g.dim())
    throw InvalidArgument("axis " + std::to_string(axis) + " out of range for a " +
                          std::to_string(g.dim()) + "D grid");
}

}  // namespace detail

/// Centred second-order difference in the interior, one-sided second-order
/// differences on the first and last cell of each line. Exact for quadratics.
template <typename Scalar>
BasicField<Scalar> gradient(const BasicField<Scalar>& f, int axis) {
  const GridSpec& g = f.grid();
  detail::check_axis(g, axis);
  const Scalar inv2h = Scalar(1) / (Scalar(2) * g.spacing());
  const int n = g.cells(axis);
  BasicField<Scalar> out(g);
  for (int j = 0; j < g.cells(1); ++j) {
    for (int i = 0; i < g.cells(0); ++i) {
      const int c = axis == 0 ? i : j;
      auto at = [&](int m) { return axis == 0 ? f(m, j) : f(i, m); };
      Scalar d;
      if (c == 0)
        d = (-Scalar(3) * at(0) + Scalar(4) * at(1) - at(2)) * inv2h;
      else if (c == n - 1)
        d = (Scalar(3) * at(n - 1) - Scalar(4) * at(n - 2) + at(n - 3)) * inv2h;
      else
        d = (at(c + 1) - at(c - 1)) * inv2h;
      out(i, j) = d;
    }
  }
  return out;
}

/// Sum of axis derivatives of a vector field given by components.
template <typename Scalar>
BasicField<Scalar> divergence(const std::array<const BasicField<Scalar>*, 2>& components) {
  const GridSpec& g = components[0]->grid();
  BasicField<Scalar> out = gradient(*components[0], 0);
  if (g.dim() == 2) out += gradient(*components[1], 1);
  return out;
}

/// (2d+1)-point Laplacian with a zero ghost layer around the grid.
template <typename Scalar>
BasicField<Scalar> laplacian(const BasicField<Scalar>& f) {
  const GridSpec& g = f.grid();
  const Scalar inv_h2 = Scalar(1) / (g.spacing() * g.spacing());
  const int nx = g.cells(0), ny = g.cells(1);
  BasicField<Scalar> out(g);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      Scalar s = (i > 0 ? f(i - 1, j) : Scalar(0)) + (i < nx - 1 ? f(i + 1, j) : Scalar(0)) -
                 Scalar(2) * f(i, j);
      if (g.dim() == 2)
        s += (j > 0 ? f(i, j - 1) : Scalar(0)) + (j < ny - 1 ? f(i, j + 1) : Scalar(0)) -
             Scalar(2) * f(i, j);
      out(i, j) = s * inv_h2;
    }
  }
  return out;
}

template <typename Scalar>
Scalar integrate(const BasicField<Scalar>& f) {
  return f.values().sum() * Scalar(f.grid().cell_volume());
}

/// Discrete L^p norm; pass std::numeric_limits<double>::infinity() for the max norm.
template <typename Scalar>
Scalar norm_lp(const BasicField<Scalar>& f, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("norm_lp needs p >= 1");
  if (f.size() == 0) return Scalar(0);
  if (std::isinf(p)) return f.values().abs().maxCoeff();
  const Scalar vol = f.grid().cell_volume();
  if (p == 1.0) return f.values().abs().sum() * vol;
  if (p == 2.0) return std::sqrt(f.values().square().sum() * vol);
  return std::pow(f.values().abs().pow(Scalar(p)).sum() * vol, Scalar(1.0 / p));
}

/// Smallest box containing every cell where f != 0.
template <typename Scalar>
Box support_box(const BasicField<Scalar>& f, const Box& search) {
  Box b{{std::numeric_limits<int>::max(), std::numeric_limits<int>::max()}, {-1, -1}};
  if (search.empty()) return Box{};
  for (int j = search.lo[1]; j <= search.hi[1]; ++j)
    for (int i = search.lo[0]; i <= search.hi[0]; ++i)
      if (f(i, j) != Scalar(0)) {
        b.lo[0] = std::min(b.lo[0], i);
        b.hi[0] = std::max(b.hi[0], i);
        b.lo[1] = std::min(b.lo[1], j);
        b.hi[1] = std::max(b.hi[1], j);
      }
  if (b.hi[0] < 0) return Box{};
  return b;
}

template <typename Scalar>
Box support_box(const BasicField<Scalar>& f) {
  return support_box(f, Box::whole(f.grid()));
}

}  // namespace mesa
