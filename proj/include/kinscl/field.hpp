#pragma once

#include "kinscl/grid.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kinscl {

/// Cell averages of u on a torus mesh.
template <typename Scalar>
struct Field {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TorusGrid grid;
  Vector values;

  Field() = default;
  explicit Field(const TorusGrid& g) : grid(g), values(Vector::Zero(g.size())) {}
  Field(const TorusGrid& g, Vector v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw std::invalid_argument("field length does not match the grid");
  }

  static Field constant(const TorusGrid& g, Scalar c) { return Field(g, Vector::Constant(g.size(), c)); }

  template <typename Fn>
  static Field from_function(const TorusGrid& g, Fn&& fn) {
    Vector v(g.size());
    for (Eigen::Index c = 0; c < g.size(); ++c) v(c) = fn(g.center_of(c));
    return Field(g, std::move(v));
  }

  Eigen::Index size() const { return values.size(); }
  bool all_finite() const { return values.allFinite(); }
  /// Spatial integral by cell quadrature.
  Scalar integral() const { return values.sum() * Scalar(grid.cell_volume()); }
};

/// Kinetic density f(x_i, xi_j): one row per spatial cell, one column per xi-cell.
template <typename Scalar>
struct KineticState {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  TorusGrid grid;
  XiGrid xigrid;
  Matrix values;

  KineticState() = default;
  KineticState(const TorusGrid& g, const XiGrid& xg) : grid(g), xigrid(xg), values(Matrix::Zero(g.size(), xg.M())) {}
  KineticState(const TorusGrid& g, const XiGrid& xg, Matrix v) : grid(g), xigrid(xg), values(std::move(v)) {
    if (values.rows() != grid.size() || values.cols() != xigrid.M())
      throw std::invalid_argument("kinetic state shape does not match the grids");
  }
};

/// Discrete Young measure: per-cell probability weights over xi-cells.
template <typename Scalar>
struct YoungMeasure {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  TorusGrid grid;
  XiGrid xigrid;
  Matrix weights;

  YoungMeasure() = default;
  YoungMeasure(const TorusGrid& g, const XiGrid& xg, Matrix w) : grid(g), xigrid(xg), weights(std::move(w)) {
    if (weights.rows() != grid.size() || weights.cols() != xigrid.M())
      throw std::invalid_argument("young measure shape does not match the grids");
  }

  /// Per-cell |sum_j w - 1|, maximised over cells.
  Scalar normalisation_defect() const { return (weights.rowwise().sum().array() - Scalar(1)).abs().maxCoeff(); }

  static YoungMeasure dirac(const Field<Scalar>& u, const XiGrid& xg) {
    Matrix w = Matrix::Zero(u.size(), xg.M());
    for (Eigen::Index c = 0; c < u.size(); ++c) {
      int j = static_cast<int>(std::floor((u.values(c) + xg.R()) / xg.dxi()));
      j = std::clamp(j, 0, xg.M() - 1);
      w(c, j) = Scalar(1);
    }
    return YoungMeasure(u.grid, xg, std::move(w));
  }
};

using Fieldd = Field<double>;
using KineticStated = KineticState<double>;
using YoungMeasured = YoungMeasure<double>;

}  // namespace kinscl
