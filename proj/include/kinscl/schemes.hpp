#pragma once

#include "kinscl/errors.hpp"
#include "kinscl/field.hpp"
#include "kinscl/flux.hpp"
#include "kinscl/noise.hpp"
#include "kinscl/test_function.hpp"
#include "kinscl/trajectory.hpp"

#include <optional>
#include <vector>

namespace kinscl {

enum class RemapKind {
  sharp,   ///< fill-fraction transport: exact on discrete equilibria, no xi-diffusion
  linear,  ///< conservative linear rebinning
};

std::string to_string(RemapKind r);
RemapKind remap_from_string(const std::string& name);

struct SchemeOptions {
  double cfl = 0.4;
  NumericalFlux numerical_flux = NumericalFlux::godunov;
  /// Snapshot every `snapshot_stride` steps; 0 keeps only t = 0 and t = T.
  int snapshot_stride = 0;
  /// Keep per cell-step dissipation detail (needed by kinetic_residual).
  bool record_cells = false;
  double tol_f = 1e-10;
  double tol_m = 1e-10;
  std::vector<double> tail_radii;
  std::optional<XiGrid> histogram_grid;
  RemapKind remap = RemapKind::sharp;
  /// BGK: keep running relaxation sums at snapshots.
  bool record_relaxation = false;
};

/// Largest admissible step cfl * h / L_a (cfl * h when the flux is constant).
double stable_dt(const TorusGrid& grid, const FluxSpec& flux, double cfl);

/// Explicit monotone finite volumes with Euler-Maruyama noise evaluated at u^n.
///
/// Step: u~ = u^n - dt/h (F_{i+1/2} - F_{i-1/2}) (dimensional splitting on the
/// 2-torus), then u^{n+1} = u~ + sum_k g_k(x_i, u^n_i) db_k. The dissipation
/// proxy is the cell entropy production of the square entropy for the flux
/// step, clipped at -tol_m.
Trajectory run_fv(const TorusGrid& grid, const FluxSpec& flux, const NoiseModel& model, const NoisePath& path,
                  const Fieldd& u0, const SchemeOptions& opt = {});

/// Vanishing viscosity: explicit flux step, implicit (I - eta dt Lap) solve,
/// then the noise increment at u^n. Records eta |D u|^2 dt per cell-step.
Trajectory run_parabolic(const TorusGrid& grid, const FluxSpec& flux, const NoiseModel& model, const NoisePath& path,
                         const Fieldd& u0, double eta, const SchemeOptions& opt = {});

/// eta * int_0^t <1_{u > xi}, Lap phi> ds at every snapshot, with u^{n+1} on [t_n, t_{n+1}].
std::vector<double> epsilon_parabolic(const Trajectory& traj, const TestFunction<double>& phi, double eta);

/// BGK relaxation: upwind transport per xi-slice, exact relaxation towards the
/// cell-averaged equilibrium, and the noise as an exact xi-translation.
/// Requires a state-independent noise model.
Trajectory run_bgk(const TorusGrid& grid, const XiGrid& xigrid, const FluxSpec& flux, const NoiseModel& model,
                   const NoisePath& path, const KineticStated& f0, double eta, const SchemeOptions& opt = {});

/// Shift one kinetic row by s in xi: f(xi) <- f(xi - s), with f = 1 below -R and 0 above R.
void shift_kinetic_row(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row, double s, double dxi, RemapKind kind);

/// Entropy solution of Burgers' Riemann problem with the jump at x = 0.
double exact_burgers_riemann(double left, double right, double x, double t);

}  // namespace kinscl
