#include "kinscl/converge.hpp"

#include "kinscl/kinetic.hpp"
#include "kinscl/stats.hpp"
#include "kinscl/verify.hpp"

#include <cmath>
#include <numeric>

namespace kinscl {

namespace {

void check_ladder(const std::vector<int>& ladder) {
  if (ladder.empty()) throw ConfigError("resolution ladder is empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 2 || (ladder[i] & (ladder[i] - 1)) != 0)
      throw ConfigError("ladder entry " + std::to_string(ladder[i]) + " is not a power of two");
    if (i > 0 && ladder[i] <= ladder[i - 1]) throw ConfigError("resolution ladder must increase");
  }
}

double speed_bound(const StudySpec& spec) {
  double L = spec.flux.lipschitz();
  if (spec.scheme == SchemeKind::bgk)
    for (int j = 0; j < spec.xigrid.M(); ++j) L = std::max(L, std::abs(spec.flux.a(spec.xigrid.center(j))));
  return L;
}

}  // namespace

double study_fine_dt(const StudySpec& spec) {
  check_ladder(spec.ladder);
  if (!(spec.T > 0) || !std::isfinite(spec.T)) throw ConfigError("T must be > 0");
  if (spec.n_snapshots < 1) throw ConfigError("n_snapshots must be >= 1");
  if (!(spec.options.cfl > 0 && spec.options.cfl < 1)) throw ConfigError("cfl must lie in (0,1)");
  const double L = speed_bound(spec);
  const double h = 1.0 / spec.ladder.back();
  const double limit = L > 0 ? spec.options.cfl * h / L : spec.options.cfl * h;
  const long unit = static_cast<long>(spec.ladder.back() / spec.ladder.front()) * spec.n_snapshots;
  long n = static_cast<long>(std::ceil(spec.T / limit - 1e-9));
  n = ((n + unit - 1) / unit) * unit;
  return spec.T / static_cast<double>(n);
}

ConvergenceStudy coupled_run(const StudySpec& spec) {
  const double dt = study_fine_dt(spec);
  if (!spec.u0) throw ConfigError("study has no initial datum");
  if (spec.n_samples < 1) throw ConfigError("n_samples must be >= 1");
  if (spec.model.dim() != spec.dim) throw ConfigError("noise model dimension differs from the study dimension");
  const int R = static_cast<int>(spec.ladder.size());
  const int finest = spec.ladder.back();

  ConvergenceStudy study;
  study.ladder = spec.ladder;
  for (int r = 0; r < R; ++r) study.dt.push_back(dt * (finest / spec.ladder[r]));
  for (int i = 0; i <= spec.n_snapshots; ++i) study.times.push_back(spec.T * i / spec.n_snapshots);
  for (int s = 0; s < spec.n_samples; ++s) study.samples.push_back(spec.first_sample + s);
  study.fields.assign(spec.n_samples, {});
  study.max_abs_u.assign(spec.n_samples, std::vector<double>(R, 0.0));
  std::vector<std::vector<DissipationRecord>> by_sample(spec.n_samples);
  const std::size_t P = spec.moment_orders.size();
  study.sup_moments.assign(R, std::vector<std::vector<double>>(P, std::vector<double>(spec.n_samples, 0.0)));

  std::vector<TorusGrid> grids;
  std::vector<Fieldd> u0s;
  for (int cells : spec.ladder) {
    grids.push_back(make_grid(spec.dim, cells));
    u0s.push_back(Fieldd::from_function(grids.back(), spec.u0));
  }

  parallel_for(spec.n_samples, resolve_jobs(spec.jobs), [&](int s) {
    const NoisePath fine =
        sample_wiener_path(spec.model, spec.T, dt, spec.seed, static_cast<std::uint32_t>(study.samples[s]));
    auto& out = study.fields[s];
    out.resize(R);
    for (int r = 0; r < R; ++r) {
      const NoisePath path = aggregate_increments(fine, finest / spec.ladder[r]);
      SchemeOptions opt = spec.options;
      opt.snapshot_stride = path.n_steps / spec.n_snapshots;
      Trajectory tr;
      switch (spec.scheme) {
        case SchemeKind::fv:
          tr = run_fv(grids[r], spec.flux, spec.model, path, u0s[r], opt);
          break;
        case SchemeKind::parabolic:
          tr = run_parabolic(grids[r], spec.flux, spec.model, path, u0s[r], spec.eta, opt);
          break;
        case SchemeKind::bgk:
          tr = run_bgk(grids[r], spec.xigrid, spec.flux, spec.model, path, averaged_equilibrium(u0s[r], spec.xigrid),
                       spec.eta, opt);
          break;
      }
      for (std::size_t i = 0; i < P; ++i) study.sup_moments[r][i][s] = sup_moment(tr, spec.moment_orders[i]);
      out[r] = std::move(tr.fields);
      study.max_abs_u[s][r] = tr.max_abs_u;
      by_sample[s].push_back(std::move(tr.dissipation));
    }
  });
  study.records.assign(R, {});
  for (int r = 0; r < R; ++r)
    for (int s = 0; s < spec.n_samples; ++s) study.records[r].push_back(std::move(by_sample[s][r]));
  return study;
}

Fieldd block_average(const Fieldd& fine, const TorusGrid& coarse) {
  const TorusGrid& g = fine.grid;
  if (g.dim() != coarse.dim() || g.cells_per_dim() % coarse.cells_per_dim() != 0)
    throw std::invalid_argument("fine resolution " + std::to_string(g.cells_per_dim()) +
                                " is not a multiple of the coarse resolution " + std::to_string(coarse.cells_per_dim()));
  const int f = g.cells_per_dim() / coarse.cells_per_dim();
  const int n = g.cells_per_dim(), nc = coarse.cells_per_dim();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(coarse.size());
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) v(i / f) += fine.values(i);
    v /= f;
  } else {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) v(i / f + static_cast<Eigen::Index>(nc) * (j / f)) += fine.values(i + static_cast<Eigen::Index>(n) * j);
    v /= static_cast<double>(f) * f;
  }
  return Fieldd(coarse, std::move(v));
}

double lp_error(const Fieldd& coarse, const Fieldd& fine, double p) {
  Fieldd d = block_average(fine, coarse.grid);
  d.values = coarse.values - d.values;
  return lp_norm(d, p);
}

RateFit rate_fit(const std::vector<double>& errors, const std::vector<double>& h) {
  if (errors.size() != h.size()) throw std::invalid_argument("errors and h differ in length");
  if (errors.size() < 3) throw std::invalid_argument("rate_fit needs at least 3 points");
  RateFit fit;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(h[i] > 0)) throw std::invalid_argument("mesh widths must be > 0");
    if (!(errors[i] > 0)) {
      ++fit.dropped;
      continue;
    }
    x.push_back(std::log(h[i]));
    y.push_back(std::log(errors[i]));
  }
  if (x.size() < 2) throw std::invalid_argument("rate_fit has fewer than 2 positive errors");
  Eigen::MatrixXd A(x.size(), 2);
  Eigen::VectorXd b(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    A(i, 0) = x[i];
    A(i, 1) = 1.0;
    b(i) = y[i];
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  fit.rate = c(0);
  fit.intercept = c(1);
  fit.residual = std::sqrt((A * c - b).squaredNorm() / static_cast<double>(x.size()));
  return fit;
}

std::vector<std::vector<std::vector<double>>> study_errors(const ConvergenceStudy& study, double p) {
  const std::size_t R = study.ladder.size();
  std::vector<std::vector<std::vector<double>>> e(study.fields.size());
  for (std::size_t s = 0; s < study.fields.size(); ++s) {
    e[s].assign(R, std::vector<double>(study.times.size(), 0.0));
    for (std::size_t r = 0; r + 1 < R; ++r)
      for (std::size_t t = 0; t < study.times.size(); ++t)
        e[s][r][t] = lp_error(study.fields[s][r][t], study.fields[s][R - 1][t], p);
  }
  return e;
}

SliceReport time_slice_convergence(const ConvergenceStudy& study, const std::vector<int>& time_indices, double p,
                                   int max_inversions) {
  for (int t : time_indices)
    if (t < 0 || t >= static_cast<int>(study.times.size())) throw std::invalid_argument("time index outside the snapshots");
  const auto e = study_errors(study, p);
  const std::size_t R = study.ladder.size();
  SliceReport rep;
  rep.time_indices = time_indices;
  int passed = 0;
  for (std::size_t s = 0; s < e.size(); ++s) {
    rep.errors.emplace_back();
    rep.inversions.emplace_back();
    bool ok = true;
    for (int t : time_indices) {
      std::vector<double> row(R);
      for (std::size_t r = 0; r < R; ++r) row[r] = e[s][r][t];
      int inv = 0;
      for (std::size_t r = 1; r + 1 < R; ++r)
        if (row[r] >= row[r - 1] && !(row[r] == 0.0 && row[r - 1] == 0.0)) ++inv;
      if (inv > max_inversions) ok = false;
      rep.errors.back().push_back(std::move(row));
      rep.inversions.back().push_back(inv);
    }
    rep.sample_pass.push_back(ok);
    passed += ok;
  }
  rep.pass_fraction = e.empty() ? 1.0 : static_cast<double>(passed) / static_cast<double>(e.size());
  rep.pass = passed == static_cast<int>(e.size());
  return rep;
}

}  // namespace kinscl
