#pragma once

#include "kinscl/field.hpp"
#include "kinscl/test_function.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace kinscl {

template <typename Scalar>
using KineticMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Sharp equilibrium f(x_i, xi_j) = 1 if u_i > xi_j else 0.
template <typename Scalar>
KineticState<Scalar> kinetic_function(const Field<Scalar>& u, const XiGrid& xg) {
  KineticMatrix<Scalar> f(u.size(), xg.M());
  for (Eigen::Index c = 0; c < u.size(); ++c) {
    const Scalar v = u.values(c);
    if (!(std::abs(v) < xg.R()))
      throw std::invalid_argument("u = " + std::to_string(double(v)) + " in cell " + std::to_string(c) +
                                  " lies outside (-R, R)");
    for (int j = 0; j < xg.M(); ++j) f(c, j) = v > xg.center(j) ? Scalar(1) : Scalar(0);
  }
  return KineticState<Scalar>(u.grid, xg, std::move(f));
}

/// Cell average of 1_{u > xi} over each xi-cell: clamp((u - lower edge) / dxi, 0, 1).
/// Its chi-integral reproduces u exactly.
template <typename Scalar>
Scalar averaged_indicator(Scalar u, const XiGrid& xg, int j) {
  return std::clamp((u - Scalar(xg.lower_edge(j))) / Scalar(xg.dxi()), Scalar(0), Scalar(1));
}

template <typename Scalar>
KineticState<Scalar> averaged_equilibrium(const Field<Scalar>& u, const XiGrid& xg) {
  KineticMatrix<Scalar> f(u.size(), xg.M());
  for (Eigen::Index c = 0; c < u.size(); ++c)
    for (int j = 0; j < xg.M(); ++j) f(c, j) = averaged_indicator(u.values(c), xg, j);
  return KineticState<Scalar>(u.grid, xg, std::move(f));
}

/// chi_f = f - 1_{0 > xi}.
template <typename Scalar>
KineticMatrix<Scalar> chi(const KineticState<Scalar>& f) {
  KineticMatrix<Scalar> c = f.values;
  for (int j = 0; j < f.xigrid.M(); ++j)
    if (f.xigrid.center(j) < 0) c.col(j).array() -= Scalar(1);
  return c;
}

/// u = integral of chi_f over xi, per cell.
template <typename Scalar>
Field<Scalar> kinetic_barycenter(const KineticState<Scalar>& f) {
  typename Field<Scalar>::Vector u = chi(f).rowwise().sum() * Scalar(f.xigrid.dxi());
  return Field<Scalar>(f.grid, std::move(u));
}

/// Midpoint quadrature of the double integral of f * phi.
template <typename Scalar>
Scalar pair(const KineticState<Scalar>& f, const TestFunction<Scalar>& phi) {
  const int dim = f.grid.dim();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> psi(f.xigrid.M());
  for (int j = 0; j < f.xigrid.M(); ++j) psi(j) = phi.psi(Scalar(f.xigrid.center(j)));
  Scalar s = 0;
  for (Eigen::Index c = 0; c < f.values.rows(); ++c) s += phi.theta(f.grid.center_of(c), dim) * f.values.row(c).dot(psi);
  return s * Scalar(f.grid.cell_volume() * f.xigrid.dxi());
}

/// <1_{u > xi}, phi> with the xi-integral taken exactly.
template <typename Scalar>
Scalar pair_equilibrium(const Field<Scalar>& u, const TestFunction<Scalar>& phi) {
  Scalar s = 0;
  for (Eigen::Index c = 0; c < u.size(); ++c) s += phi.theta(u.grid.center_of(c), u.grid.dim()) * phi.psi_primitive(u.values(c));
  return s * Scalar(u.grid.cell_volume());
}

/// Edge jumps of -d_xi f, with f = 1 below -R and 0 above R: cells x (M+1).
template <typename Scalar>
KineticMatrix<Scalar> xi_jumps(const KineticState<Scalar>& f) {
  const int M = f.xigrid.M();
  KineticMatrix<Scalar> e(f.values.rows(), M + 1);
  e.col(0) = Scalar(1) - f.values.col(0).array();
  for (int j = 1; j < M; ++j) e.col(j) = f.values.col(j - 1) - f.values.col(j);
  e.col(M) = f.values.col(M - 1);
  return e;
}

/// Inverse of xi_jumps: f_j = 1 - sum of the jumps at edges below cell j.
template <typename Scalar>
KineticMatrix<Scalar> cumulate_jumps(const KineticMatrix<Scalar>& e) {
  const Eigen::Index M = e.cols() - 1;
  KineticMatrix<Scalar> f(e.rows(), M);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> acc = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Ones(e.rows());
  for (Eigen::Index j = 0; j < M; ++j) {
    acc -= e.col(j);
    f.col(j) = acc;
  }
  return f;
}

/// nu = -d_xi f. Interior jumps are split evenly between the two adjacent
/// cells; boundary jumps go to the boundary cell.
template <typename Scalar>
YoungMeasure<Scalar> young_from_kinetic(const KineticState<Scalar>& f) {
  const int M = f.xigrid.M();
  const KineticMatrix<Scalar> e = xi_jumps(f);
  KineticMatrix<Scalar> w = KineticMatrix<Scalar>::Zero(e.rows(), M);
  w.col(0) += e.col(0);
  w.col(M - 1) += e.col(M);
  for (int j = 1; j < M; ++j) {
    w.col(j - 1) += Scalar(0.5) * e.col(j);
    w.col(j) += Scalar(0.5) * e.col(j);
  }
  return YoungMeasure<Scalar>(f.grid, f.xigrid, std::move(w));
}

/// f(xi_j) = nu(xi > xi_j) + nu({xi_j}) / 2.
template <typename Scalar>
KineticState<Scalar> kinetic_from_young(const YoungMeasure<Scalar>& nu) {
  const int M = nu.xigrid.M();
  KineticMatrix<Scalar> f(nu.weights.rows(), M);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> above = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(nu.weights.rows());
  for (int j = M - 1; j >= 0; --j) {
    f.col(j) = above + Scalar(0.5) * nu.weights.col(j);
    above += nu.weights.col(j);
  }
  return KineticState<Scalar>(nu.grid, nu.xigrid, std::move(f));
}

template <typename Scalar>
Field<Scalar> barycenter(const YoungMeasure<Scalar>& nu) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> xi = nu.xigrid.centers().template cast<Scalar>();
  return Field<Scalar>(nu.grid, nu.weights * xi);
}

/// Spatial mean of sum_j |xi_j|^p w_j.
template <typename Scalar>
Scalar moment(const YoungMeasure<Scalar>& nu, Scalar p) {
  if (!(p >= 1)) throw std::invalid_argument("moment order p must be >= 1");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> xp(nu.xigrid.M());
  for (int j = 0; j < nu.xigrid.M(); ++j) xp(j) = std::pow(std::abs(Scalar(nu.xigrid.center(j))), p);
  return (nu.weights * xp).sum() * Scalar(nu.grid.cell_volume());
}

/// Same moment through the kinetic identity
/// |u|^p = integral of [f 1_{xi>0} + (1-f) 1_{xi<0}] p |xi|^{p-1}.
template <typename Scalar>
Scalar moment_from_kinetic(const KineticState<Scalar>& f, Scalar p) {
  if (!(p >= 1)) throw std::invalid_argument("moment order p must be >= 1");
  Scalar s = 0;
  for (int j = 0; j < f.xigrid.M(); ++j) {
    const Scalar xi = f.xigrid.center(j);
    const Scalar w = p * std::pow(std::abs(xi), p - 1);
    const Scalar col = xi > 0 ? f.values.col(j).sum() : (Scalar(1) - f.values.col(j).array()).sum();
    s += w * col;
  }
  return s * Scalar(f.xigrid.dxi() * f.grid.cell_volume());
}

template <typename Scalar>
struct EquilibriumDistance {
  /// m at the upper edge of each xi-cell: cells x M. The value at -R is 0.
  KineticMatrix<Scalar> profile;
  Scalar max = 0;
  Scalar min = 0;
  /// Integral of m over (x, xi).
  Scalar mass = 0;
  bool negative = false;
};

/// m(xi) = integral over (-R, xi] of (1_{u > zeta} - f), u the barycenter of f.
/// The equilibrium is cell-averaged, so m vanishes exactly on discrete equilibria.
template <typename Scalar>
EquilibriumDistance<Scalar> distance_to_equilibrium(const KineticState<Scalar>& f, Scalar tol = Scalar(1e-10)) {
  const Field<Scalar> u = kinetic_barycenter(f);
  const int M = f.xigrid.M();
  const Scalar dxi = f.xigrid.dxi();
  EquilibriumDistance<Scalar> d;
  d.profile.resize(f.values.rows(), M);
  for (Eigen::Index c = 0; c < f.values.rows(); ++c) {
    Scalar acc = 0;
    for (int j = 0; j < M; ++j) {
      acc += (averaged_indicator(u.values(c), f.xigrid, j) - f.values(c, j)) * dxi;
      d.profile(c, j) = acc;
    }
  }
  d.max = d.profile.maxCoeff();
  d.min = d.profile.minCoeff();
  d.mass = d.profile.sum() * dxi * Scalar(f.grid.cell_volume());
  d.negative = d.min < -tol;
  return d;
}

/// (integral of |u|^p)^(1/p) by cell quadrature.
template <typename Scalar>
Scalar lp_norm(const Field<Scalar>& u, Scalar p) {
  if (!(p >= 1)) throw std::invalid_argument("L^p exponent must be >= 1");
  return std::pow(u.values.array().abs().pow(p).sum() * Scalar(u.grid.cell_volume()), Scalar(1) / p);
}

template <typename Scalar>
struct EquilibriumConvergence {
  std::vector<Scalar> errors;
  int decreases = 0;
  int increases = 0;
  bool strictly_decreasing = true;
};

template <typename Scalar>
EquilibriumConvergence<Scalar> check_equilibrium_convergence(const std::vector<YoungMeasure<Scalar>>& nus,
                                                            const Field<Scalar>& u_ref, Scalar q) {
  if (!(q >= 1)) throw std::invalid_argument("L^q exponent must be >= 1");
  EquilibriumConvergence<Scalar> r;
  for (const auto& nu : nus) {
    if (!(nu.grid == u_ref.grid)) throw std::invalid_argument("young measure and reference live on different grids");
    Field<Scalar> diff = barycenter(nu);
    diff.values -= u_ref.values;
    r.errors.push_back(lp_norm(diff, q));
  }
  for (std::size_t i = 1; i < r.errors.size(); ++i) {
    if (r.errors[i] < r.errors[i - 1]) ++r.decreases;
    else {
      ++r.increases;
      r.strictly_decreasing = false;
    }
  }
  return r;
}

}  // namespace kinscl
