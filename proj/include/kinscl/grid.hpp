#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace kinscl {

/// Uniform periodic mesh of the unit torus [0,1)^dim, dim in {1,2}.
///
/// Cells are stored with the first coordinate fastest: linear index
/// c = i + n * j. The width h = 1/n is a power-of-two reciprocal for dyadic
/// meshes, so index arithmetic below is exact.
class TorusGrid {
 public:
  TorusGrid() = default;
  TorusGrid(int dim, int cells_per_dim) : dim_(dim), n_(cells_per_dim), h_(1.0 / cells_per_dim) {}

  int dim() const { return dim_; }
  int cells_per_dim() const { return n_; }
  double h() const { return h_; }
  /// Lebesgue measure of one cell (h^dim).
  double cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }
  Eigen::Index size() const { return dim_ == 1 ? n_ : static_cast<Eigen::Index>(n_) * n_; }

  int wrap(int i) const {
    const int r = i % n_;
    return r < 0 ? r + n_ : r;
  }

  /// Cell center coordinate along one axis.
  double center(int i) const { return (i + 0.5) / n_; }

  std::array<double, 2> center_of(Eigen::Index c) const {
    if (dim_ == 1) return {center(static_cast<int>(c)), 0.0};
    return {center(static_cast<int>(c % n_)), center(static_cast<int>(c / n_))};
  }

  /// Linear index of the neighbour of cell c shifted by `offset` along `axis`.
  Eigen::Index neighbour(Eigen::Index c, int axis, int offset) const {
    if (dim_ == 1) return wrap(static_cast<int>(c) + offset);
    const int i = static_cast<int>(c % n_);
    const int j = static_cast<int>(c / n_);
    if (axis == 0) return wrap(i + offset) + static_cast<Eigen::Index>(n_) * j;
    return i + static_cast<Eigen::Index>(n_) * wrap(j + offset);
  }

  friend bool operator==(const TorusGrid& a, const TorusGrid& b) { return a.dim_ == b.dim_ && a.n_ == b.n_; }

 private:
  int dim_ = 1;
  int n_ = 2;
  double h_ = 0.5;
};

inline TorusGrid make_grid(int dim, int cells_per_dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid dim must be 1 or 2, got " + std::to_string(dim));
  if (cells_per_dim < 2) throw std::invalid_argument("cells_per_dim must be >= 2, got " + std::to_string(cells_per_dim));
  return TorusGrid(dim, cells_per_dim);
}

/// Periodic (minimal image) distance on the unit torus.
inline double torus_distance(const std::array<double, 2>& x, const std::array<double, 2>& y, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    double dx = std::abs(x[d] - y[d]);
    dx -= std::floor(dx);
    dx = std::min(dx, 1.0 - dx);
    s += dx * dx;
  }
  return std::sqrt(s);
}

/// Truncated velocity mesh: M cells of width 2R/M covering (-R, R).
class XiGrid {
 public:
  XiGrid() = default;
  XiGrid(double R, int M) : R_(R), M_(M), dxi_(2.0 * R / M) {}

  double R() const { return R_; }
  int M() const { return M_; }
  double dxi() const { return dxi_; }
  double center(int j) const { return -R_ + (j + 0.5) * dxi_; }
  double lower_edge(int j) const { return -R_ + j * dxi_; }

  Eigen::VectorXd centers() const {
    Eigen::VectorXd xi(M_);
    for (int j = 0; j < M_; ++j) xi(j) = center(j);
    return xi;
  }

  /// Throws unless the mesh strictly covers the invariant region [-bound, bound].
  void require_covers(double bound) const {
    if (!(R_ > bound))
      throw std::invalid_argument("xi truncation R = " + std::to_string(R_) + " must exceed the invariant-region bound " +
                                  std::to_string(bound));
  }

  friend bool operator==(const XiGrid& a, const XiGrid& b) { return a.R_ == b.R_ && a.M_ == b.M_; }

 private:
  double R_ = 1.0;
  int M_ = 8;
  double dxi_ = 0.25;
};

inline XiGrid make_xigrid(double R, int M) {
  if (!(R > 0) || !std::isfinite(R)) throw std::invalid_argument("xi radius R must be positive and finite");
  if (M < 8) throw std::invalid_argument("xi cell count M must be >= 8, got " + std::to_string(M));
  return XiGrid(R, M);
}

}  // namespace kinscl
