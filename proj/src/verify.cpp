#include "kinscl/verify.hpp"

#include "kinscl/errors.hpp"
#include "kinscl/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kinscl {

namespace {

void require_every_step(const Trajectory& traj, const NoisePath& path, const char* who) {
  if (traj.fields.empty()) throw std::invalid_argument(std::string(who) + ": empty trajectory");
  if (!traj.every_step()) throw ConfigError(std::string(who) + " needs a snapshot at every step");
  if (path.n_steps != traj.n_steps || path.dt != traj.dt)
    throw ConfigError(std::string(who) + ": noise path does not match the trajectory");
}

Eigen::VectorXd theta_values(const TorusGrid& g, const TestFunction<double>& phi) {
  Eigen::VectorXd th(g.size());
  for (Eigen::Index c = 0; c < g.size(); ++c) th(c) = phi.theta(g.center_of(c), g.dim());
  return th;
}

/// sum over axes of d theta / d x_axis (the flux is the same along every axis)
Eigen::VectorXd theta_divergence(const TorusGrid& g, const TestFunction<double>& phi) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(g.size());
  for (Eigen::Index c = 0; c < g.size(); ++c)
    for (int axis = 0; axis < g.dim(); ++axis) d(c) += phi.theta_grad(g.center_of(c), g.dim(), axis);
  return d;
}

Eigen::VectorXd xi_profile(const XiGrid& xg, double (TestFunction<double>::*fn)(double) const,
                           const TestFunction<double>& phi) {
  Eigen::VectorXd v(xg.M());
  for (int j = 0; j < xg.M(); ++j) v(j) = (phi.*fn)(xg.center(j));
  return v;
}

Eigen::VectorXd G2_values(const NoiseModel& model, const Fieldd& u) {
  Eigen::VectorXd v(u.size());
  for (Eigen::Index c = 0; c < u.size(); ++c) v(c) = model.G2(u.grid.center_of(c), u.values(c));
  return v;
}

}  // namespace

double mass_balance(const Trajectory& traj, const NoiseModel& model, const NoisePath& path) {
  require_every_step(traj, path, "mass_balance");
  const TorusGrid& g = traj.fields.front().grid;
  const double vol = g.cell_volume();
  double m = 0.5 * traj.fields.front().values.squaredNorm() * vol - 0.5 * traj.fields.back().values.squaredNorm() * vol;
  if (model.is_zero()) return m;
  const Eigen::MatrixXd modes = model.mode_matrix(g);
  for (int n = 0; n < traj.n_steps; ++n) {
    const Eigen::VectorXd& u = traj.fields[n].values;
    const Eigen::VectorXd s = modes * path.increments.row(n).transpose();
    double acc = 0.0;
    for (Eigen::Index c = 0; c < u.size(); ++c)
      acc += u(c) * model.state_profile(u(c)) * s(c) + 0.5 * traj.dt * model.G2(g.center_of(c), u(c));
    m += acc * vol;
  }
  return m;
}

double discrete_mass_balance(const Trajectory& traj, const NoiseModel& model, const NoisePath& path) {
  require_every_step(traj, path, "discrete_mass_balance");
  const TorusGrid& g = traj.fields.front().grid;
  const double vol = g.cell_volume();
  double m = 0.5 * traj.fields.front().values.squaredNorm() * vol - 0.5 * traj.fields.back().values.squaredNorm() * vol;
  if (model.is_zero()) return m;
  const Eigen::MatrixXd modes = model.mode_matrix(g);
  for (int n = 0; n < traj.n_steps; ++n) {
    const Eigen::VectorXd& u = traj.fields[n].values;
    const Eigen::VectorXd& next = traj.fields[n + 1].values;
    const Eigen::VectorXd s = modes * path.increments.row(n).transpose();
    double acc = 0.0;
    for (Eigen::Index c = 0; c < u.size(); ++c) {
      const double kick = model.state_profile(u(c)) * s(c);
      acc += next(c) * kick - 0.5 * kick * kick;
    }
    m += acc * vol;
  }
  return m;
}

ResidualSeries kinetic_residual(const Trajectory& traj, const FluxSpec& flux, const NoiseModel& model,
                                const NoisePath& path, const TestFunction<double>& phi) {
  require_every_step(traj, path, "kinetic_residual");
  const TorusGrid& g = traj.fields.front().grid;
  const double vol = g.cell_volume();
  const double dt = traj.dt;
  const Eigen::VectorXd th = theta_values(g, phi);
  const Eigen::VectorXd div = theta_divergence(g, phi);
  const Eigen::MatrixXd modes = model.mode_matrix(g);
  const bool kinetic = traj.scheme == SchemeKind::bgk;

  ResidualSeries r;
  const std::size_t N = traj.fields.size();
  r.times = traj.times;
  r.pairing.assign(N, 0.0);
  r.transport.assign(N, 0.0);
  r.martingale.assign(N, 0.0);
  r.ito.assign(N, 0.0);
  r.dissipation.assign(N, 0.0);
  r.residual.assign(N, 0.0);

  if (kinetic) {
    if (traj.kinetic.size() != N) throw ConfigError("kinetic_residual: BGK trajectory without kinetic snapshots");
    if (traj.dissipation.relaxation.size() != N)
      throw ConfigError("kinetic_residual: BGK trajectory without relaxation sums (record_relaxation)");
    const XiGrid& xg = traj.kinetic.front().xigrid;
    const double dxi = xg.dxi();
    const Eigen::VectorXd psi = xi_profile(xg, &TestFunction<double>::psi, phi);
    const Eigen::VectorXd dpsi = xi_profile(xg, &TestFunction<double>::dpsi, phi);
    const Eigen::VectorXd d2psi = xi_profile(xg, &TestFunction<double>::d2psi, phi);
    Eigen::VectorXd apsi(xg.M());
    for (int j = 0; j < xg.M(); ++j) apsi(j) = flux.a(xg.center(j)) * psi(j);
    const double p0 = pair(traj.kinetic.front(), phi);
    double tr = 0.0, mg = 0.0, it = 0.0;
    for (std::size_t m = 0; m < N; ++m) {
      const Eigen::MatrixXd& f = traj.kinetic[m].values;
      r.pairing[m] = pair(traj.kinetic[m], phi) - p0;
      r.transport[m] = tr;
      r.martingale[m] = mg;
      r.ito[m] = it;
      r.dissipation[m] = -pair(KineticStated(g, xg, traj.dissipation.relaxation[m]), phi);
      if (m + 1 == N) break;
      tr += dt * vol * dxi * div.dot(f * apsi);
      if (!model.is_zero()) {
        const Eigen::VectorXd s = modes * path.increments.row(m).transpose();
        const Eigen::VectorXd G2 = G2_values(model, traj.fields[m]);
        const Eigen::VectorXd fd = f * dpsi * dxi, fdd = f * d2psi * dxi;
        mg += vol * (th.array() * s.array() * fd.array()).sum();
        it += 0.5 * dt * vol * (th.array() * G2.array() * fdd.array()).sum();
      }
    }
  } else {
    const DissipationRecord& rec = traj.dissipation;
    if (!rec.has_cell_detail()) throw ConfigError("kinetic_residual: trajectory without per cell-step dissipation detail");
    const auto Q = phi.weighted_primitive(flux.a_poly());
    const double p0 = pair_equilibrium(traj.fields.front(), phi);
    double tr = 0.0, mg = 0.0, it = 0.0, ds = 0.0;
    for (std::size_t m = 0; m < N; ++m) {
      const Eigen::VectorXd& u = traj.fields[m].values;
      r.pairing[m] = pair_equilibrium(traj.fields[m], phi) - p0;
      r.transport[m] = tr;
      r.martingale[m] = mg;
      r.ito[m] = it;
      r.dissipation[m] = ds;
      if (m + 1 == N) break;
      double a = 0.0;
      for (Eigen::Index c = 0; c < u.size(); ++c) a += div(c) * Q(u(c));
      tr += dt * vol * a;
      if (!model.is_zero()) {
        const Eigen::VectorXd s = modes * path.increments.row(m).transpose();
        double b = 0.0, q = 0.0;
        for (Eigen::Index c = 0; c < u.size(); ++c) {
          const auto x = g.center_of(c);
          b += th(c) * phi.psi(u(c)) * model.state_profile(u(c)) * s(c);
          q += th(c) * model.G2(x, u(c)) * phi.dpsi(u(c));
        }
        mg += vol * b;
        it += 0.5 * dt * vol * q;
      }
      double d = 0.0;
      for (Eigen::Index c = 0; c < u.size(); ++c) d += rec.density(m, c) * th(c) * phi.dpsi(rec.at(m, c));
      ds += vol * d;
    }
  }
  for (std::size_t m = 0; m < N; ++m)
    r.residual[m] = r.pairing[m] - r.transport[m] - r.martingale[m] - r.ito[m] + r.dissipation[m];
  return r;
}

MartingaleSample build_martingale_sample(const Trajectory& traj, const NoiseModel& model, const NoisePath& path,
                                         const TestFunction<double>& phi, const std::vector<int>& test_steps,
                                         double kappa) {
  require_every_step(traj, path, "build_martingale_sample");
  if (test_steps.empty() || test_steps.front() != 0) throw std::invalid_argument("test steps must start with 0");
  for (std::size_t i = 1; i < test_steps.size(); ++i)
    if (test_steps[i] <= test_steps[i - 1] || test_steps[i] > traj.n_steps)
      throw std::invalid_argument("test steps must increase within [0, n_steps]");

  const TorusGrid& g = traj.fields.front().grid;
  const double vol = g.cell_volume();
  const double dt = traj.dt;
  const int K = model.K();
  const Eigen::VectorXd th = theta_values(g, phi);
  const Eigen::MatrixXd modes = model.mode_matrix(g);
  const bool kinetic = traj.scheme == SchemeKind::bgk;
  Eigen::VectorXd dpsi;
  if (kinetic) dpsi = xi_profile(traj.kinetic.front().xigrid, &TestFunction<double>::dpsi, phi);

  auto pairing = [&](int n) {
    return kinetic ? pair(traj.kinetic[n], phi) : pair_equilibrium(traj.fields[n], phi);
  };

  const std::size_t T = test_steps.size();
  MartingaleSample s;
  s.X = Eigen::VectorXd::Zero(T);
  s.beta = Eigen::MatrixXd::Zero(T, K);
  s.h_int = Eigen::MatrixXd::Zero(T, K);
  s.h2_int = Eigen::VectorXd::Zero(T);
  s.H = Eigen::MatrixXd::Zero(T, 2);
  for (int step : test_steps) s.times.push_back(step * dt);

  const double p0 = pairing(0);
  double X = 0.0, h2 = 0.0, avg = 0.0;
  Eigen::RowVectorXd beta = Eigen::RowVectorXd::Zero(K), hint = Eigen::RowVectorXd::Zero(K);
  Eigen::VectorXd w(g.size());
  std::size_t next = 0;
  for (int n = 0; n <= traj.n_steps; ++n) {
    avg += pairing(n);
    if (next < T && test_steps[next] == n) {
      s.X(next) = X;
      s.beta.row(next) = beta;
      s.h_int.row(next) = hint;
      s.h2_int(next) = h2;
      s.H(next, 0) = 1.0;
      s.H(next, 1) = 1.0 / (1.0 + std::exp(-kappa * (avg / (n + 1) - p0)));
      ++next;
    }
    if (next == T || n == traj.n_steps) break;
    // h_k(t_n) = int g_k(x, xi) phi dnu dx with nu from the state at t_n
    if (kinetic) {
      w = traj.kinetic[n].values * dpsi * traj.kinetic[n].xigrid.dxi();
    } else {
      const Eigen::VectorXd& u = traj.fields[n].values;
      for (Eigen::Index c = 0; c < u.size(); ++c) w(c) = phi.psi(u(c)) * model.state_profile(u(c));
    }
    const Eigen::RowVectorXd h = vol * (th.cwiseProduct(w)).transpose() * modes;
    const Eigen::RowVectorXd db = path.increments.row(n);
    X += h.dot(db);
    beta += db;
    hint += dt * h;
    h2 += dt * h.squaredNorm();
  }
  return s;
}

std::string to_string(TestStatus s) {
  switch (s) {
    case TestStatus::pass:
      return "pass";
    case TestStatus::fail:
      return "fail";
    case TestStatus::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

int MartingaleTestReport::passed() const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.status == TestStatus::pass; }));
}
int MartingaleTestReport::failed() const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.status == TestStatus::fail; }));
}
int MartingaleTestReport::inconclusive() const {
  return static_cast<int>(
      std::count_if(entries.begin(), entries.end(), [](const auto& e) { return e.status == TestStatus::inconclusive; }));
}

MartingaleTestReport martingale_test(const std::vector<MartingaleSample>& samples,
                                     const std::vector<std::pair<int, int>>& time_pairs, double threshold,
                                     int min_samples) {
  const int n = static_cast<int>(samples.size());
  if (n < std::max(2, min_samples))
    throw std::invalid_argument("martingale_test needs at least " + std::to_string(std::max(2, min_samples)) +
                                " samples, got " + std::to_string(n));
  const MartingaleSample& first = samples.front();
  const Eigen::Index T = first.X.size(), K = first.beta.cols(), nH = first.H.cols();
  for (const auto& s : samples)
    if (s.X.size() != T || s.beta.cols() != K || s.H.cols() != nH || s.beta.rows() != T || s.h_int.rows() != T ||
        s.h2_int.size() != T || s.H.rows() != T)
      throw std::invalid_argument("martingale samples have inconsistent shapes");
  for (auto [a, b] : time_pairs)
    if (a < 0 || b <= a || b >= T) throw std::invalid_argument("time pairs must satisfy 0 <= s < t < #times");

  MartingaleTestReport rep;
  rep.threshold = threshold;
  rep.n_samples = n;
  std::vector<double> y(n);
  auto run = [&](const std::string& name, int k, const std::function<double(const MartingaleSample&, int)>& Z) {
    for (auto [a, b] : time_pairs)
      for (Eigen::Index j = 0; j < nH; ++j) {
        for (int i = 0; i < n; ++i) y[i] = (Z(samples[i], b) - Z(samples[i], a)) * samples[i].H(a, j);
        const EnsembleStat st = ensemble_stat(y);
        MartingaleEntry e;
        e.identity = name;
        e.k = k;
        e.h_index = static_cast<int>(j);
        e.s = first.times.empty() ? a : first.times[a];
        e.t = first.times.empty() ? b : first.times[b];
        e.estimate = st.estimate;
        e.standard_error = st.standard_error;
        if (st.standard_error > 0) {
          e.statistic = std::abs(st.estimate) / st.standard_error;
          e.status = e.statistic <= threshold ? TestStatus::pass : TestStatus::fail;
        } else if (st.estimate == 0.0) {
          e.statistic = 0.0;
          e.status = TestStatus::pass;
        } else {
          e.statistic = std::numeric_limits<double>::infinity();
          e.status = TestStatus::inconclusive;
        }
        rep.entries.push_back(e);
      }
  };
  run("M", -1, [](const MartingaleSample& s, int t) { return s.X(t); });
  for (int k = 0; k < K; ++k)
    run("M*beta_k - int h_k", k, [k](const MartingaleSample& s, int t) { return s.X(t) * s.beta(t, k) - s.h_int(t, k); });
  run("M^2 - int |h|^2", -1, [](const MartingaleSample& s, int t) { return s.X(t) * s.X(t) - s.h2_int(t); });
  return rep;
}

std::vector<double> positive_part_l1(const Trajectory& a, const Trajectory& b) {
  if (a.steps != b.steps) throw std::invalid_argument("trajectories have different snapshot steps");
  std::vector<double> out(a.fields.size());
  for (std::size_t m = 0; m < a.fields.size(); ++m) {
    if (!(a.fields[m].grid == b.fields[m].grid)) throw std::invalid_argument("trajectories live on different grids");
    out[m] = (a.fields[m].values - b.fields[m].values).cwiseMax(0.0).sum() * a.fields[m].grid.cell_volume();
  }
  return out;
}

ContractionReport contraction_test(const Fieldd& u0_a, const Fieldd& u0_b, const SampleRunner& run, int n_samples,
                                   int jobs, double n_se) {
  if (!(u0_a.grid == u0_b.grid)) throw ConfigError("contraction: initial fields live on different grids");
  if (n_samples < 2) throw ConfigError("contraction needs at least 2 samples");
  std::vector<std::vector<double>> d(n_samples);
  std::vector<std::vector<double>> times(n_samples);
  parallel_for(n_samples, resolve_jobs(jobs), [&](int i) {
    const Trajectory ta = run(u0_a, i);
    const Trajectory tb = run(u0_b, i);
    d[i] = positive_part_l1(ta, tb);
    times[i] = ta.times;
  });
  ContractionReport rep;
  rep.times = times.front();
  const std::size_t N = rep.times.size();
  for (const auto& t : times)
    if (t != rep.times) throw InvariantViolation("contraction: samples have different snapshot times", 0);
  std::vector<double> col(n_samples), inc(n_samples), from0(n_samples);
  rep.pass_initial = rep.pass_monotone = true;
  double slack = 0.0;  // round-off allowance, relative to the initial distance
  for (std::size_t m = 0; m < N; ++m) {
    for (int i = 0; i < n_samples; ++i) col[i] = d[i][m];
    rep.series.push_back(ensemble_stat(col));
    if (m == 0) {
      slack = 1e-12 * std::max(1.0, rep.series[0].estimate);
      continue;
    }
    for (int i = 0; i < n_samples; ++i) {
      inc[i] = d[i][m] - d[i][m - 1];
      from0[i] = d[i][m] - d[i][0];
    }
    const EnsembleStat st = ensemble_stat(inc);
    rep.increments.push_back(st);
    if (st.estimate > n_se * st.standard_error + slack) rep.pass_monotone = false;
    const EnsembleStat s0 = ensemble_stat(from0);
    if (s0.estimate > n_se * s0.standard_error + slack) rep.pass_initial = false;
  }
  return rep;
}

double linfty_exceedance(const Trajectory& traj, double bound) { return std::max(0.0, traj.max_abs_u - bound); }

LinftyReport linfty_test(const std::vector<double>& exceedances, const NoiseModel& model, double dt, double factor) {
  if (!model.compact_support() && !model.is_zero())
    throw ConfigError("the invariant-region test needs compact-support noise");
  if (exceedances.empty()) throw std::invalid_argument("no samples");
  LinftyReport r;
  r.n_samples = static_cast<int>(exceedances.size());
  r.max_exceedance = *std::max_element(exceedances.begin(), exceedances.end());
  r.tolerance = factor * model.g_max() * std::sqrt(dt);
  r.pass = r.max_exceedance <= r.tolerance;
  return r;
}

namespace {

double spread_ratio(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*hi == 0.0 && *lo == 0.0) return 1.0;
  if (!(*lo > 0)) return std::numeric_limits<double>::infinity();
  return *hi / *lo;
}

}  // namespace

TightnessReport tightness_stats(const std::vector<std::vector<DissipationRecord>>& records,
                                const std::vector<double>& radii, double max_ratio) {
  if (records.empty()) throw std::invalid_argument("no resolutions");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw std::invalid_argument("tail radii must increase");
  TightnessReport rep;
  rep.radii = radii;
  std::vector<double> est;
  rep.tails_decrease = true;
  for (const auto& level : records) {
    std::vector<double> totals;
    std::vector<double> tails(radii.size(), 0.0);
    for (const auto& rec : level) {
      totals.push_back(rec.total());
      if (rec.tail_radii != radii) throw std::invalid_argument("record tail radii differ from the requested radii");
      for (std::size_t r = 0; r < radii.size(); ++r) tails[r] += rec.tail_mass[r];
    }
    for (double& t : tails) t /= static_cast<double>(level.size());
    rep.totals.push_back(ensemble_stat(totals));
    est.push_back(rep.totals.back().estimate);
    for (std::size_t r = 1; r < tails.size(); ++r)
      if (tails[r] > tails[r - 1] + 1e-14 * std::max(1.0, std::abs(tails[r - 1]))) rep.tails_decrease = false;
    rep.tails.push_back(std::move(tails));
  }
  rep.ratio = spread_ratio(est);
  rep.bounded = rep.ratio <= max_ratio;
  return rep;
}

double sup_moment(const Trajectory& traj, double p) {
  if (!(p >= 1)) throw std::invalid_argument("moment order p must be >= 1");
  double best = 0.0;
  if (traj.scheme == SchemeKind::bgk && !traj.kinetic.empty()) {
    for (const auto& f : traj.kinetic) best = std::max(best, moment_from_kinetic(f, p));
  } else {
    for (const auto& u : traj.fields) best = std::max(best, std::pow(lp_norm(u, p), p));
  }
  return best;
}

MomentReport moment_bound_check(const std::vector<std::vector<std::vector<double>>>& values,
                                const std::vector<double>& p_list, double max_ratio) {
  if (values.empty()) throw std::invalid_argument("no resolutions");
  MomentReport rep;
  rep.p_list = p_list;
  rep.sup_moments.assign(p_list.size(), {});
  rep.pass = true;
  for (std::size_t i = 0; i < p_list.size(); ++i) {
    std::vector<double> est;
    for (const auto& level : values) {
      if (level.size() != p_list.size()) throw std::invalid_argument("moment values do not match p_list");
      rep.sup_moments[i].push_back(ensemble_stat(level[i]));
      est.push_back(rep.sup_moments[i].back().estimate);
    }
    rep.ratios.push_back(spread_ratio(est));
    if (!(rep.ratios.back() <= max_ratio)) rep.pass = false;
  }
  return rep;
}

}  // namespace kinscl
