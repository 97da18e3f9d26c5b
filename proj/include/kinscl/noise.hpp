#pragma once

#include "kinscl/grid.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace kinscl {

enum class NoiseMode {
  compact_support,  ///< state profile is a smooth bump, 1 on [-1/2, 1/2], 0 for |u| >= 1
  linear_growth,    ///< state profile u_max * tanh(u / u_max)
  additive,         ///< state profile identically 1 (xi-independent coefficients)
};

std::string to_string(NoiseMode mode);
NoiseMode noise_mode_from_string(const std::string& name);

/// Smooth step: 1 for t <= 0, 0 for t >= 1, C-infinity in between.
/// Its steepest slope is 2, attained at t = 1/2.
double smooth_step_down(double t);

/// Truncated separable noise: g_k(x,u) = alpha_k * profile_k(x) * chi(u).
///
/// Mode k (0-based) uses frequency p = k/2 + 1 and the profile cos(2 pi p s)
/// for even k, sin(2 pi p s) for odd k, where s = x_1 (+ x_2 on the 2-torus).
class NoiseModel {
 public:
  NoiseModel() = default;
  NoiseModel(int K, double decay, NoiseMode mode, double amplitude, double u_max, int dim);

  int K() const { return K_; }
  double decay() const { return decay_; }
  NoiseMode mode() const { return mode_; }
  double amplitude() const { return amplitude_; }
  double u_max() const { return u_max_; }
  int dim() const { return dim_; }

  bool compact_support() const { return mode_ == NoiseMode::compact_support; }
  bool state_independent() const { return mode_ == NoiseMode::additive; }
  bool is_zero() const { return amplitude_ == 0.0; }

  double alpha(int k) const { return alpha_(k); }
  const Eigen::VectorXd& alphas() const { return alpha_; }

  double profile(int k, const std::array<double, 2>& x) const;
  double state_profile(double u) const;
  double g(int k, const std::array<double, 2>& x, double u) const { return alpha_(k) * profile(k, x) * state_profile(u); }
  /// G^2(x,u) = sum_k g_k(x,u)^2.
  double G2(const std::array<double, 2>& x, double u) const;

  /// cells x K matrix of alpha_k * profile_k(x_i); Sum_k g_k(x_i,u) db_k = chi(u) * (modes * db)_i.
  Eigen::MatrixXd mode_matrix(const TorusGrid& grid) const;

  double profile_max() const { return 1.0; }
  double profile_lipschitz(int k) const;
  double state_profile_max() const;
  double state_profile_lipschitz() const;

  /// Closed-form constant with G^2(x,u) <= D0 (1 + u^2).
  double d0_certificate() const;
  /// Closed-form constant with sum_k |g_k(x,u) - g_k(y,v)|^2 <= D1 (|x-y|^2 + |u-v| min(|u-v|,1)).
  double d1_certificate() const;
  /// max over (x,u) of sum_k |g_k(x,u)|.
  double g_max() const;

 private:
  int K_ = 1;
  double decay_ = 1.0;
  NoiseMode mode_ = NoiseMode::compact_support;
  double amplitude_ = 1.0;
  double u_max_ = 2.0;
  int dim_ = 1;
  Eigen::VectorXd alpha_;
};

NoiseModel make_noise_model(int K, double decay, NoiseMode mode, double amplitude = 1.0, double u_max = 2.0,
                            int dim = 1);

/// Brownian increments db_k over a uniform time mesh, one row per step.
///
/// Entries are Normal(0, dt) draws rounded to multiples of 2^-40, which makes
/// block sums exact in double precision: aggregation is associative and
/// coarse paths telescope exactly onto fine ones.
struct NoisePath {
  std::uint64_t seed = 0;
  std::uint32_t sample = 0;
  double dt = 0.0;
  int n_steps = 0;
  Eigen::MatrixXd increments;  // n_steps x K

  int K() const { return static_cast<int>(increments.cols()); }
  double T() const { return dt * n_steps; }
};

inline constexpr double kIncrementQuantum = 0x1.0p-40;

/// Increments keyed by (seed, sample, mode, step); pure function of the key.
NoisePath sample_wiener_path(const NoiseModel& model, double T, double dt, std::uint64_t seed, std::uint32_t sample = 0);

NoisePath aggregate_increments(const NoisePath& path, int factor);

/// Per-mode (sample variance - dt) / standard error of the variance estimate.
Eigen::VectorXd increment_variance_zscores(const NoisePath& path);

struct NoiseSample {
  std::array<double, 2> x{};
  double u = 0.0;
  std::array<double, 2> y{};
  double v = 0.0;
};

struct BoundReport {
  double d0_hat = 0.0;
  double d1_hat = 0.0;
  double d0_certificate = 0.0;
  double d1_certificate = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_skipped = 0;  // coincident pairs excluded from d1_hat
  bool pass = false;
};

BoundReport verify_noise_bounds(const NoiseModel& model, const std::vector<NoiseSample>& samples);

/// Exhaustive n^4 lattice: x, y over n torus points, u, v over n points of [-u_range, u_range].
BoundReport verify_noise_bounds_on_lattice(const NoiseModel& model, int n, double u_range);

}  // namespace kinscl
