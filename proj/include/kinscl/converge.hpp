#pragma once

#include "kinscl/schemes.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace kinscl {

struct StudySpec {
  SchemeKind scheme = SchemeKind::fv;
  FluxSpec flux = FluxSpec::burgers(1.0);
  NoiseModel model;
  int dim = 1;
  std::vector<int> ladder;  // cells per dim, dyadic and increasing; the last is the reference
  double T = 0.5;
  double eta = 0.0;         // parabolic viscosity or BGK relaxation time
  XiGrid xigrid;            // BGK only
  SchemeOptions options;    // the study sets snapshot_stride itself
  std::function<double(const std::array<double, 2>&)> u0;
  std::uint64_t seed = 0;
  int n_samples = 1;
  int first_sample = 0;
  int n_snapshots = 1;      // snapshots at T i / n_snapshots, i = 0..n_snapshots
  std::vector<double> moment_orders;  // sup moments to keep per run
  int jobs = 0;
};

struct ConvergenceStudy {
  std::vector<int> ladder;
  std::vector<double> dt;      // per resolution
  std::vector<double> times;
  std::vector<int> samples;    // sample indices of the noise paths
  /// fields[s][r][t]
  std::vector<std::vector<std::vector<Fieldd>>> fields;
  /// records[r][s]
  std::vector<std::vector<DissipationRecord>> records;
  /// max_abs_u[s][r]
  std::vector<std::vector<double>> max_abs_u;
  /// sup_moments[r][i][s] for moment_orders[i]
  std::vector<std::vector<std::vector<double>>> sup_moments;
};

/// Fine time step shared by the ladder: dt = T / N with N the smallest multiple
/// of (finest / coarsest) * n_snapshots satisfying the CFL bound on the finest mesh.
double study_fine_dt(const StudySpec& spec);

/// Runs every sample on every resolution; coarse runs consume block sums of the
/// finest path.
ConvergenceStudy coupled_run(const StudySpec& spec);

/// Cell averages of `fine` over the blocks of `coarse`.
Fieldd block_average(const Fieldd& fine, const TorusGrid& coarse);

/// (sum over coarse cells of vol |u_coarse - avg u_fine|^p)^(1/p).
double lp_error(const Fieldd& coarse, const Fieldd& fine, double p);

struct RateFit {
  double rate = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root mean square of the log-log fit residuals
  int dropped = 0;        // non-positive errors left out
};

/// Least-squares slope of log error against log h.
RateFit rate_fit(const std::vector<double>& errors, const std::vector<double>& h);

/// errors[s][r][t] against the finest run; the finest entry is 0.
std::vector<std::vector<std::vector<double>>> study_errors(const ConvergenceStudy& study, double p);

struct SliceReport {
  std::vector<int> time_indices;
  std::vector<std::vector<std::vector<double>>> errors;  // [s][t][r]
  std::vector<std::vector<int>> inversions;              // [s][t]
  std::vector<bool> sample_pass;
  double pass_fraction = 0.0;
  bool pass = false;  // every sample passes
};

/// Errors of each non-reference resolution must decrease along the ladder, at
/// every requested snapshot, with at most `max_inversions` increases per ladder.
SliceReport time_slice_convergence(const ConvergenceStudy& study, const std::vector<int>& time_indices, double p,
                                   int max_inversions = 1);

}  // namespace kinscl
