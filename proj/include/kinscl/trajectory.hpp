#pragma once

#include "kinscl/field.hpp"
#include "kinscl/grid.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace kinscl {

enum class SchemeKind { fv, parabolic, bgk };

std::string to_string(SchemeKind s);
SchemeKind scheme_from_string(const std::string& name);

/// Kinetic-measure proxy of a run.
///
/// A "density" entry is the m-mass per unit volume produced in one cell during
/// one step (units of u^2; the step length is already folded in), so the total
/// mass is the sum of density * cell volume.
struct DissipationRecord {
  Eigen::VectorXd step_mass;  // per step, integrated over the torus
  double min_density = 0.0;   // smallest entry before clipping at -tol_m

  // Per cell-step detail, n_steps x cells; empty unless requested.
  // FV / parabolic: mass sits at u = `at`, attributed to the stencil range [lo, hi].
  Eigen::MatrixXd density, at, lo, hi;

  // Mass outside |xi| > R for each configured R.
  std::vector<double> tail_radii;
  std::vector<double> tail_mass;

  // Mass per cell of `histogram_grid`.
  std::optional<XiGrid> histogram_grid;
  Eigen::VectorXd histogram;

  // BGK: running sum of relaxation increments (f after - f before), cells x M, at each snapshot.
  std::vector<Eigen::MatrixXd> relaxation;

  double total() const { return step_mass.sum(); }
  bool has_cell_detail() const { return density.size() > 0; }
};

struct Trajectory {
  SchemeKind scheme = SchemeKind::fv;
  double dt = 0.0;
  int n_steps = 0;
  std::vector<int> steps;     // step index of each snapshot
  std::vector<double> times;  // steps * dt
  std::vector<Fieldd> fields;
  std::vector<KineticStated> kinetic;  // BGK only
  DissipationRecord dissipation;
  double monotonicity_defect = 0.0;  // BGK: max over the run of (f_{j+1} - f_j)^+
  double max_abs_u = 0.0;            // max over every step and cell of |u|

  bool every_step() const { return static_cast<int>(steps.size()) == n_steps + 1; }
  const Fieldd& final_field() const { return fields.back(); }
};

}  // namespace kinscl
