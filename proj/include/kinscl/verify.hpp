#pragma once

#include "kinscl/flux.hpp"
#include "kinscl/noise.hpp"
#include "kinscl/stats.hpp"
#include "kinscl/test_function.hpp"
#include "kinscl/trajectory.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace kinscl {

/// Total kinetic-measure mass from the energy identity in Ito form:
/// 1/2 |u0|^2 - 1/2 |u(T)|^2 + sum_n int u^n k^n + 1/2 sum_n dt int G^2(u^n),
/// k^n = sum_k g_k(u^n) db_k the noise kick of step n. Needs a snapshot at every step.
double mass_balance(const Trajectory& traj, const NoiseModel& model, const NoisePath& path);

/// Same identity with the step's own quadratic term, u^{n+1} k^n - 1/2 (k^n)^2 in
/// place of u^n k^n + 1/2 G^2 dt. For the explicit schemes this is exactly the
/// unclipped dissipation of the run.
double discrete_mass_balance(const Trajectory& traj, const NoiseModel& model, const NoisePath& path);

/// Terms of the kinetic equation tested against phi, at every snapshot:
/// residual = pairing - transport - martingale - ito + dissipation.
struct ResidualSeries {
  std::vector<double> times;
  std::vector<double> pairing;      // <f(t),phi> - <f0,phi>
  std::vector<double> transport;    // int_0^t <f, a . grad phi>
  std::vector<double> martingale;   // M_phi(t)
  std::vector<double> ito;          // 1/2 int_0^t int G^2 d_xi phi dnu dx
  std::vector<double> dissipation;  // m(d_xi phi)([0,t])
  std::vector<double> residual;
};

/// Equilibrium runs (FV, parabolic) need per cell-step dissipation detail;
/// BGK runs need kinetic snapshots and running relaxation sums. Every step must
/// be a snapshot.
ResidualSeries kinetic_residual(const Trajectory& traj, const FluxSpec& flux, const NoiseModel& model,
                                const NoisePath& path, const TestFunction<double>& phi);

/// One Monte Carlo sample of the processes entering the martingale identities,
/// sampled at a list of test times (the first is t = 0).
struct MartingaleSample {
  std::vector<double> times;
  Eigen::VectorXd X;      // the tested process, X(0) = 0
  Eigen::MatrixXd beta;   // times x K
  Eigen::MatrixXd h_int;  // times x K, int_0^t h_k
  Eigen::VectorXd h2_int; // int_0^t |h|^2
  Eigen::MatrixXd H;      // times x nH, past functionals known at each time
};

/// M_phi from its definition, h_k = int g_k phi dnu dx, and the past-functional
/// library {1, sigmoid(kappa (time average of <f,phi> over [0,s] - <f0,phi>))}.
/// Needs a snapshot at every step; test_steps must start with 0.
MartingaleSample build_martingale_sample(const Trajectory& traj, const NoiseModel& model, const NoisePath& path,
                                         const TestFunction<double>& phi, const std::vector<int>& test_steps,
                                         double kappa = 10.0);

enum class TestStatus { pass, fail, inconclusive };
std::string to_string(TestStatus s);

struct MartingaleEntry {
  std::string identity;  // "M", "M*beta_k - int h_k", "M^2 - int |h|^2"
  int k = -1;            // mode for the cross-variation identity
  int h_index = 0;
  double s = 0.0, t = 0.0;
  double estimate = 0.0;
  double standard_error = 0.0;
  double statistic = 0.0;  // |estimate| / SE
  TestStatus status = TestStatus::inconclusive;
};

struct MartingaleTestReport {
  std::vector<MartingaleEntry> entries;
  double threshold = 3.0;
  int n_samples = 0;
  int passed() const;
  int failed() const;
  int inconclusive() const;
  bool pass() const { return !entries.empty() && passed() == static_cast<int>(entries.size()); }
};

/// For each identity, past functional and pair (s, t) of test-time indices:
/// statistic |E[(Y_t - Y_s) H_s]| / SE with a pass at `threshold`. A zero SE
/// with a zero estimate passes (the identity holds exactly); a zero SE with a
/// nonzero estimate is inconclusive.
MartingaleTestReport martingale_test(const std::vector<MartingaleSample>& samples,
                                     const std::vector<std::pair<int, int>>& time_pairs, double threshold = 3.0,
                                     int min_samples = 100);

/// Runs one sample of a scheme from the given initial field; the noise path is
/// a function of the sample index only.
using SampleRunner = std::function<Trajectory(const Fieldd& u0, int sample)>;

struct ContractionReport {
  std::vector<double> times;
  std::vector<EnsembleStat> series;      // E |(u_a - u_b)^+|_L1
  std::vector<EnsembleStat> increments;  // paired differences between consecutive snapshots
  bool pass_initial = false;             // never above the t = 0 value by more than 2 SE
  bool pass_monotone = false;            // every increment below 2 SE
  bool pass() const { return pass_initial && pass_monotone; }
};

ContractionReport contraction_test(const Fieldd& u0_a, const Fieldd& u0_b, const SampleRunner& run, int n_samples,
                                   int jobs = 1, double n_se = 2.0);

/// |(u_a - u_b)^+|_L1 at every common snapshot.
std::vector<double> positive_part_l1(const Trajectory& a, const Trajectory& b);

struct LinftyReport {
  double max_exceedance = 0.0;
  double tolerance = 0.0;
  int n_samples = 0;
  bool pass = false;
};

/// Exceedance (max |u| - bound)^+ over every step and cell of one run.
double linfty_exceedance(const Trajectory& traj, double bound = 1.0);

/// tol = factor * g_max * sqrt(dt). Requires compact-support noise.
LinftyReport linfty_test(const std::vector<double>& exceedances, const NoiseModel& model, double dt,
                         double factor = 3.0);

struct TightnessReport {
  std::vector<EnsembleStat> totals;           // per resolution
  std::vector<double> radii;
  std::vector<std::vector<double>> tails;     // per resolution, per radius (ensemble means)
  double ratio = 0.0;                         // max / min of the totals
  bool bounded = false;
  bool tails_decrease = false;
  bool pass() const { return bounded && tails_decrease; }
};

/// records[r][s]: dissipation record of sample s at resolution r, carrying tail masses at `radii`.
TightnessReport tightness_stats(const std::vector<std::vector<DissipationRecord>>& records,
                                const std::vector<double>& radii, double max_ratio = 10.0);

/// sup over snapshots of int |u|^p (int int |xi|^p dnu dx for kinetic runs).
double sup_moment(const Trajectory& traj, double p);

struct MomentReport {
  std::vector<double> p_list;
  std::vector<std::vector<EnsembleStat>> sup_moments;  // per p, per resolution
  std::vector<double> ratios;                          // per p
  bool pass = false;
};

/// values[r][i][s]: sup moment for resolution r, exponent p_list[i], sample s.
MomentReport moment_bound_check(const std::vector<std::vector<std::vector<double>>>& values,
                                const std::vector<double>& p_list, double max_ratio = 10.0);

}  // namespace kinscl
