#include "kinscl/noise.hpp"

#include "kinscl/philox.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kinscl {

std::string to_string(NoiseMode mode) {
  switch (mode) {
    case NoiseMode::compact_support:
      return "compact_support";
    case NoiseMode::linear_growth:
      return "linear_growth";
    case NoiseMode::additive:
      return "additive";
  }
  return "unknown";
}

NoiseMode noise_mode_from_string(const std::string& name) {
  if (name == "compact_support") return NoiseMode::compact_support;
  if (name == "linear_growth") return NoiseMode::linear_growth;
  if (name == "additive") return NoiseMode::additive;
  throw std::invalid_argument("unknown noise mode '" + name + "'");
}

double smooth_step_down(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  return 1.0 / (1.0 + std::exp(1.0 / (1.0 - t) - 1.0 / t));
}

NoiseModel::NoiseModel(int K, double decay, NoiseMode mode, double amplitude, double u_max, int dim)
    : K_(K), decay_(decay), mode_(mode), amplitude_(amplitude), u_max_(u_max), dim_(dim), alpha_(K) {
  for (int k = 0; k < K; ++k) alpha_(k) = amplitude * std::exp2(-decay * (k + 1));
}

double NoiseModel::profile(int k, const std::array<double, 2>& x) const {
  const double s = dim_ == 1 ? x[0] : x[0] + x[1];
  const double freq = 2.0 * std::numbers::pi * (k / 2 + 1);
  return (k % 2 == 0) ? std::cos(freq * s) : std::sin(freq * s);
}

double NoiseModel::state_profile(double u) const {
  switch (mode_) {
    case NoiseMode::compact_support:
      return smooth_step_down(2.0 * std::abs(u) - 1.0);
    case NoiseMode::linear_growth:
      return u_max_ * std::tanh(u / u_max_);
    case NoiseMode::additive:
      return 1.0;
  }
  return 0.0;
}

double NoiseModel::G2(const std::array<double, 2>& x, double u) const {
  const double chi = state_profile(u);
  double s = 0.0;
  for (int k = 0; k < K_; ++k) {
    const double gk = alpha_(k) * profile(k, x);
    s += gk * gk;
  }
  return s * chi * chi;
}

Eigen::MatrixXd NoiseModel::mode_matrix(const TorusGrid& grid) const {
  Eigen::MatrixXd m(grid.size(), K_);
  for (Eigen::Index c = 0; c < grid.size(); ++c) {
    const auto x = grid.center_of(c);
    for (int k = 0; k < K_; ++k) m(c, k) = alpha_(k) * profile(k, x);
  }
  return m;
}

double NoiseModel::profile_lipschitz(int k) const {
  return 2.0 * std::numbers::pi * (k / 2 + 1) * std::sqrt(static_cast<double>(dim_));
}

double NoiseModel::state_profile_max() const {
  switch (mode_) {
    case NoiseMode::compact_support:
    case NoiseMode::additive:
      return 1.0;
    case NoiseMode::linear_growth:
      return u_max_;
  }
  return 0.0;
}

double NoiseModel::state_profile_lipschitz() const {
  switch (mode_) {
    case NoiseMode::compact_support:
      return 4.0;  // slope 2 of the smooth step, times the chain-rule factor 2
    case NoiseMode::linear_growth:
      return 1.0;
    case NoiseMode::additive:
      return 0.0;
  }
  return 0.0;
}

double NoiseModel::d0_certificate() const {
  // chi^2 <= 1 + u^2 in every mode: the bump and the constant are <= 1, and
  // u_max^2 tanh^2(u/u_max) <= u^2.
  const double pmax2 = profile_max() * profile_max();
  return alpha_.squaredNorm() * pmax2;
}

double NoiseModel::d1_certificate() const {
  // |g(x,u) - g(y,v)|^2 <= 2 a^2 (p(x)-p(y))^2 chi(u)^2 + 2 a^2 p(y)^2 (chi(u)-chi(v))^2, and
  // |chi(u)-chi(v)|^2 <= max(L^2, 4 chi_max^2) z min(z,1) with z = |u-v|.
  const double chi_max = state_profile_max();
  const double lc = state_profile_lipschitz();
  const double c_chi = state_independent() ? 0.0 : std::max(lc * lc, 4.0 * chi_max * chi_max);
  double space = 0.0, state = 0.0;
  for (int k = 0; k < K_; ++k) {
    const double a2 = alpha_(k) * alpha_(k);
    const double lp = profile_lipschitz(k);
    space += 2.0 * a2 * lp * lp * chi_max * chi_max;
    state += 2.0 * a2 * profile_max() * profile_max() * c_chi;
  }
  return std::max(space, state);
}

double NoiseModel::g_max() const { return alpha_.cwiseAbs().sum() * profile_max() * state_profile_max(); }

NoiseModel make_noise_model(int K, double decay, NoiseMode mode, double amplitude, double u_max, int dim) {
  if (K <= 0) throw std::invalid_argument("noise mode count K must be >= 1");
  if (!(decay > 0)) throw std::invalid_argument("noise decay must be > 0");
  if (!(amplitude >= 0) || !std::isfinite(amplitude)) throw std::invalid_argument("noise amplitude must be >= 0");
  if (mode == NoiseMode::linear_growth && !(u_max > 0)) throw std::invalid_argument("noise u_max must be > 0");
  if (dim != 1 && dim != 2) throw std::invalid_argument("noise dim must be 1 or 2");
  return NoiseModel(K, decay, mode, amplitude, u_max, dim);
}

NoisePath sample_wiener_path(const NoiseModel& model, double T, double dt, std::uint64_t seed, std::uint32_t sample) {
  if (!(T > 0) || !std::isfinite(T)) throw std::invalid_argument("path horizon T must be > 0");
  if (!(dt > 0) || !std::isfinite(dt)) throw std::invalid_argument("path step dt must be > 0");
  const double ratio = T / dt;
  const double n = std::round(ratio);
  if (n < 1 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument("T / dt must be a positive integer");

  NoisePath path;
  path.seed = seed;
  path.sample = sample;
  path.dt = dt;
  path.n_steps = static_cast<int>(n);
  path.increments.resize(path.n_steps, model.K());
  const double sd = std::sqrt(dt);
  for (int k = 0; k < model.K(); ++k)
    for (int s = 0; s < path.n_steps; ++s) {
      const double z = keyed_standard_normal(seed, static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(k), sample);
      path.increments(s, k) = std::nearbyint(sd * z / kIncrementQuantum) * kIncrementQuantum;
    }
  return path;
}

NoisePath aggregate_increments(const NoisePath& path, int factor) {
  if (factor < 1 || path.n_steps % factor != 0)
    throw std::invalid_argument("aggregation factor " + std::to_string(factor) + " does not divide " +
                                std::to_string(path.n_steps) + " steps");
  NoisePath coarse;
  coarse.seed = path.seed;
  coarse.sample = path.sample;
  coarse.dt = path.dt * factor;
  coarse.n_steps = path.n_steps / factor;
  coarse.increments = Eigen::MatrixXd::Zero(coarse.n_steps, path.K());
  for (int j = 0; j < coarse.n_steps; ++j)
    for (int s = 0; s < factor; ++s) coarse.increments.row(j) += path.increments.row(j * factor + s);
  return coarse;
}

Eigen::VectorXd increment_variance_zscores(const NoisePath& path) {
  const double n = path.n_steps;
  Eigen::VectorXd z(path.K());
  for (int k = 0; k < path.K(); ++k) {
    const Eigen::VectorXd sq = path.increments.col(k).array().square();
    const double var = sq.mean();
    const double se = std::sqrt(((sq.array() - var).square().sum()) / (n - 1) / n);
    z(k) = se > 0 ? (var - path.dt) / se : 0.0;
  }
  return z;
}

namespace {

struct BoundAccumulator {
  const NoiseModel& model;
  BoundReport report;
  std::vector<double> gx, gy;

  explicit BoundAccumulator(const NoiseModel& m) : model(m), gx(m.K()), gy(m.K()) {
    report.d0_certificate = m.d0_certificate();
    report.d1_certificate = m.d1_certificate();
  }

  void add(const NoiseSample& s) {
    ++report.n_samples;
    double g2 = 0.0, diff2 = 0.0;
    for (int k = 0; k < model.K(); ++k) {
      gx[k] = model.g(k, s.x, s.u);
      gy[k] = model.g(k, s.y, s.v);
      g2 += gx[k] * gx[k];
      diff2 += (gx[k] - gy[k]) * (gx[k] - gy[k]);
    }
    report.d0_hat = std::max(report.d0_hat, g2 / (1.0 + s.u * s.u));
    const double dx = torus_distance(s.x, s.y, model.dim());
    const double z = std::abs(s.u - s.v);
    const double denom = dx * dx + z * std::min(z, 1.0);
    if (denom == 0.0) {
      ++report.n_skipped;
      return;
    }
    report.d1_hat = std::max(report.d1_hat, diff2 / denom);
  }

  BoundReport finish() {
    report.pass = std::isfinite(report.d0_hat) && std::isfinite(report.d1_hat) &&
                  report.d0_hat <= report.d0_certificate && report.d1_hat <= report.d1_certificate;
    return report;
  }
};

}  // namespace

BoundReport verify_noise_bounds(const NoiseModel& model, const std::vector<NoiseSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("verify_noise_bounds needs at least one sample");
  BoundAccumulator acc(model);
  for (const auto& s : samples) acc.add(s);
  return acc.finish();
}

BoundReport verify_noise_bounds_on_lattice(const NoiseModel& model, int n, double u_range) {
  if (n < 2) throw std::invalid_argument("lattice needs n >= 2");
  BoundAccumulator acc(model);
  std::vector<std::array<double, 2>> xs(n);
  std::vector<double> us(n);
  for (int i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / n;
    // on the 2-torus walk a skew line so both coordinates vary
    xs[i] = {t, model.dim() == 2 ? std::fmod(3.0 * t, 1.0) : 0.0};
    us[i] = -u_range + 2.0 * u_range * i / (n - 1);
  }
  // cache g per (x, u) lattice point: n^2 * K values
  std::vector<double> table(static_cast<std::size_t>(n) * n * model.K());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < model.K(); ++k) table[(static_cast<std::size_t>(i) * n + j) * model.K() + k] = model.g(k, xs[i], us[j]);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double* gx = &table[(static_cast<std::size_t>(i) * n + j) * model.K()];
      double g2 = 0.0;
      for (int k = 0; k < model.K(); ++k) g2 += gx[k] * gx[k];
      acc.report.d0_hat = std::max(acc.report.d0_hat, g2 / (1.0 + us[j] * us[j]));
      for (int a = 0; a < n; ++a) {
        const double dx = torus_distance(xs[i], xs[a], model.dim());
        for (int b = 0; b < n; ++b) {
          ++acc.report.n_samples;
          const double z = std::abs(us[j] - us[b]);
          const double denom = dx * dx + z * std::min(z, 1.0);
          if (denom == 0.0) {
            ++acc.report.n_skipped;
            continue;
          }
          const double* gy = &table[(static_cast<std::size_t>(a) * n + b) * model.K()];
          double diff2 = 0.0;
          for (int k = 0; k < model.K(); ++k) diff2 += (gx[k] - gy[k]) * (gx[k] - gy[k]);
          acc.report.d1_hat = std::max(acc.report.d1_hat, diff2 / denom);
        }
      }
    }
  return acc.finish();
}

}  // namespace kinscl
