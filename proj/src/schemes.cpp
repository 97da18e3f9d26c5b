#include "kinscl/schemes.hpp"

#include "kinscl/kinetic.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kinscl {

std::string to_string(SchemeKind s) {
  switch (s) {
    case SchemeKind::fv:
      return "fv";
    case SchemeKind::parabolic:
      return "parabolic";
    case SchemeKind::bgk:
      return "bgk";
  }
  return "unknown";
}

SchemeKind scheme_from_string(const std::string& name) {
  if (name == "fv") return SchemeKind::fv;
  if (name == "parabolic") return SchemeKind::parabolic;
  if (name == "bgk") return SchemeKind::bgk;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

std::string to_string(RemapKind r) { return r == RemapKind::sharp ? "sharp" : "linear"; }

RemapKind remap_from_string(const std::string& name) {
  if (name == "sharp") return RemapKind::sharp;
  if (name == "linear") return RemapKind::linear;
  throw std::invalid_argument("unknown remap '" + name + "'");
}

double stable_dt(const TorusGrid& grid, const FluxSpec& flux, double cfl) {
  const double L = flux.lipschitz();
  return L > 0 ? cfl * grid.h() / L : cfl * grid.h();
}

namespace {

void check_inputs(const TorusGrid& grid, const NoiseModel& model, const NoisePath& path, const Fieldd& u0,
                  const SchemeOptions& opt) {
  if (!(grid == u0.grid)) throw ConfigError("initial field lives on a different grid");
  if (model.dim() != grid.dim()) throw ConfigError("noise model dimension differs from the grid");
  if (path.K() != model.K()) throw ConfigError("noise path has a different mode count than the model");
  if (path.n_steps < 1 || !(path.dt > 0)) throw ConfigError("noise path is empty");
  if (!(opt.cfl > 0 && opt.cfl < 1)) throw ConfigError("cfl must lie in (0,1)");
  if (opt.snapshot_stride < 0) throw ConfigError("snapshot stride must be >= 0");
  if (!u0.all_finite()) throw ConfigError("initial field has non-finite values");
}

void check_cfl(const TorusGrid& grid, const FluxSpec& flux, const NoisePath& path, double cfl) {
  const double limit = stable_dt(grid, flux, cfl);
  if (path.dt > limit * (1 + 1e-12)) {
    std::ostringstream os;
    os << "CFL violated: dt = " << path.dt << " exceeds cfl*h/L = " << limit;
    throw ConfigError(os.str());
  }
}

bool is_snapshot(int n, int n_steps, int stride) { return n == 0 || n == n_steps || (stride > 0 && n % stride == 0); }

/// Accumulates per-step dissipation into a record.
class RecordBuilder {
 public:
  RecordBuilder(const TorusGrid& grid, int n_steps, const SchemeOptions& opt) : grid_(grid), opt_(opt) {
    rec_.step_mass = Eigen::VectorXd::Zero(n_steps);
    rec_.tail_radii = opt.tail_radii;
    rec_.tail_mass.assign(opt.tail_radii.size(), 0.0);
    rec_.histogram_grid = opt.histogram_grid;
    if (opt.histogram_grid) rec_.histogram = Eigen::VectorXd::Zero(opt.histogram_grid->M());
    if (opt.record_cells) {
      rec_.density.resize(n_steps, grid.size());
      rec_.at.resize(n_steps, grid.size());
      rec_.lo.resize(n_steps, grid.size());
      rec_.hi.resize(n_steps, grid.size());
    }
  }

  /// density is clipped at -tol_m in place.
  void add_ranged(int n, Eigen::VectorXd& density, const Eigen::VectorXd& at, const Eigen::VectorXd& lo,
                  const Eigen::VectorXd& hi) {
    rec_.min_density = std::min(rec_.min_density, density.minCoeff());
    density = density.cwiseMax(-opt_.tol_m);
    const double vol = grid_.cell_volume();
    rec_.step_mass(n) = density.sum() * vol;
    if (opt_.record_cells) {
      rec_.density.row(n) = density.transpose();
      rec_.at.row(n) = at.transpose();
      rec_.lo.row(n) = lo.transpose();
      rec_.hi.row(n) = hi.transpose();
    }
    for (Eigen::Index c = 0; c < density.size(); ++c) {
      const double mass = density(c) * vol;
      if (mass == 0.0) continue;
      for (std::size_t r = 0; r < rec_.tail_radii.size(); ++r) rec_.tail_mass[r] += mass * outside_fraction(lo(c), hi(c), at(c), rec_.tail_radii[r]);
      if (rec_.histogram_grid) spread(mass, lo(c), hi(c), at(c));
    }
  }

  /// BGK: m profile (cells x M) on the kinetic grid, already scaled so that
  /// density_i = sum_j m_ij dxi.
  void add_profile(int n, const Eigen::MatrixXd& m, const XiGrid& xg) {
    Eigen::VectorXd density = m.rowwise().sum() * xg.dxi();
    rec_.min_density = std::min(rec_.min_density, density.minCoeff());
    density = density.cwiseMax(-opt_.tol_m);
    const double vol = grid_.cell_volume();
    rec_.step_mass(n) = density.sum() * vol;
    if (opt_.record_cells) {
      rec_.density.row(n) = density.transpose();
      rec_.at.row(n).setZero();
      rec_.lo.row(n).setConstant(-xg.R());
      rec_.hi.row(n).setConstant(xg.R());
    }
    const Eigen::RowVectorXd per_xi = m.colwise().sum() * (xg.dxi() * vol);
    for (std::size_t r = 0; r < rec_.tail_radii.size(); ++r)
      for (int j = 0; j < xg.M(); ++j)
        if (std::abs(xg.center(j)) > rec_.tail_radii[r]) rec_.tail_mass[r] += per_xi(j);
    if (rec_.histogram_grid)
      for (int j = 0; j < xg.M(); ++j) spread(per_xi(j), xg.center(j), xg.center(j), xg.center(j));
  }

  DissipationRecord& record() { return rec_; }

 private:
  static double outside_fraction(double lo, double hi, double at, double R) {
    if (hi - lo <= 1e-14 * std::max(1.0, std::abs(hi))) return std::abs(at) > R ? 1.0 : 0.0;
    const double inside = std::max(0.0, std::min(hi, R) - std::max(lo, -R));
    return 1.0 - inside / (hi - lo);
  }

  void spread(double mass, double lo, double hi, double at) {
    const XiGrid& g = *rec_.histogram_grid;
    auto bin = [&](double x) { return std::clamp(static_cast<int>(std::floor((x + g.R()) / g.dxi())), 0, g.M() - 1); };
    if (hi - lo <= 1e-14 * std::max(1.0, std::abs(hi))) {
      rec_.histogram(bin(at)) += mass;
      return;
    }
    const int b0 = bin(lo), b1 = bin(hi);
    for (int b = b0; b <= b1; ++b) {
      const double a = b == 0 ? lo : std::max(lo, g.lower_edge(b));
      const double z = b == g.M() - 1 ? hi : std::min(hi, g.lower_edge(b) + g.dxi());
      if (z > a) rec_.histogram(b) += mass * (z - a) / (hi - lo);
    }
  }

  const TorusGrid& grid_;
  const SchemeOptions& opt_;
  DissipationRecord rec_;
};

/// psi(u) = u A(u) - q(u), q' = u a: the interface potential of the square entropy.
Polynomial<double> entropy_potential(const FluxSpec& flux) {
  const Polynomial<double> id{0.0, 1.0};
  return id * flux.A_poly() + (id * flux.a_poly()).antiderivative() * -1.0;
}

struct NeighbourTable {
  std::vector<Eigen::Index> prev[2], next[2];
  explicit NeighbourTable(const TorusGrid& g) {
    for (int axis = 0; axis < g.dim(); ++axis) {
      prev[axis].resize(g.size());
      next[axis].resize(g.size());
      for (Eigen::Index c = 0; c < g.size(); ++c) {
        prev[axis][c] = g.neighbour(c, axis, -1);
        next[axis][c] = g.neighbour(c, axis, 1);
      }
    }
  }
};

/// Flux step with dimensional splitting; adds the square-entropy production to `diss`.
void flux_step(const TorusGrid& grid, const NeighbourTable& nb, const FluxSpec& flux, const Polynomial<double>& psi,
               NumericalFlux kind, double lam, Eigen::VectorXd& u, Eigen::VectorXd& diss) {
  const Eigen::Index n = u.size();
  Eigen::VectorXd F(n), r(n), psi_u(n), out(n);
  for (int axis = 0; axis < grid.dim(); ++axis) {
    for (Eigen::Index c = 0; c < n; ++c) psi_u(c) = psi(u(c));
    for (Eigen::Index c = 0; c < n; ++c) {
      const Eigen::Index d = nb.next[axis][c];
      F(c) = flux.numerical(kind, u(c), u(d));
      r(c) = psi_u(d) - psi_u(c) - (u(d) - u(c)) * F(c);
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      const Eigen::Index b = nb.prev[axis][c];
      out(c) = u(c) - lam * (F(c) - F(b));
      const double jump = out(c) - u(c);
      diss(c) += 0.5 * lam * (r(c) + r(b)) - 0.5 * jump * jump;
    }
    u.swap(out);
  }
}

void stencil_range(const TorusGrid& grid, const NeighbourTable& nb, const Eigen::VectorXd& u, Eigen::VectorXd& lo,
                   Eigen::VectorXd& hi) {
  lo = u;
  hi = u;
  for (int axis = 0; axis < grid.dim(); ++axis)
    for (Eigen::Index c = 0; c < u.size(); ++c) {
      for (Eigen::Index d : {nb.prev[axis][c], nb.next[axis][c]}) {
        lo(c) = std::min(lo(c), u(d));
        hi(c) = std::max(hi(c), u(d));
      }
    }
}

/// Range preservation of the flux step, then clamp rounding overshoot.
void enforce_range(Eigen::VectorXd& u, double lo, double hi, int step) {
  const double tol = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
  if (u.minCoeff() < lo - tol || u.maxCoeff() > hi + tol) {
    std::ostringstream os;
    os << "flux step left the invariant range [" << lo << ", " << hi << "]: got [" << u.minCoeff() << ", "
       << u.maxCoeff() << "]";
    throw InvariantViolation(os.str(), step);
  }
  u = u.cwiseMax(lo).cwiseMin(hi);
}

void check_state_cfl(const FluxSpec& flux, NumericalFlux kind, double lam, double lo, double hi, int step) {
  const double s = flux.max_speed(lo, hi);
  const double limit = kind == NumericalFlux::lax_friedrichs ? flux.lipschitz() : 1.0 / lam;
  if (lam * s > 1.0 + 1e-12 || s > limit * (1 + 1e-12)) {
    std::ostringstream os;
    os << "state range [" << lo << ", " << hi << "] has speed " << s << " beyond the stability limit";
    throw InvariantViolation(os.str(), step);
  }
}

void add_noise(const NoiseModel& model, const Eigen::MatrixXd& modes, const NoisePath& path, int n,
               const Eigen::VectorXd& u_left, Eigen::VectorXd& u) {
  if (model.is_zero()) return;
  const Eigen::VectorXd s = modes * path.increments.row(n).transpose();
  for (Eigen::Index c = 0; c < u.size(); ++c) u(c) += model.state_profile(u_left(c)) * s(c);
}

void snapshot(Trajectory& traj, int n, const TorusGrid& grid, const Eigen::VectorXd& u) {
  traj.steps.push_back(n);
  traj.times.push_back(n * traj.dt);
  traj.fields.emplace_back(grid, u);
}

Trajectory run_explicit(SchemeKind kind, const TorusGrid& grid, const FluxSpec& flux, const NoiseModel& model,
                        const NoisePath& path, const Fieldd& u0, double eta, const SchemeOptions& opt) {
  check_inputs(grid, model, path, u0, opt);
  check_cfl(grid, flux, path, opt.cfl);

  Trajectory traj;
  traj.scheme = kind;
  traj.dt = path.dt;
  traj.n_steps = path.n_steps;
  RecordBuilder rb(grid, path.n_steps, opt);

  const NeighbourTable nb(grid);
  const Polynomial<double> psi = entropy_potential(flux);
  const Eigen::MatrixXd modes = model.mode_matrix(grid);
  const double lam = path.dt / grid.h();
  const double h2 = grid.h() * grid.h();

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  if (kind == SchemeKind::parabolic) {
    std::vector<Eigen::Triplet<double>> t;
    const double k = eta * path.dt / h2;
    for (Eigen::Index c = 0; c < grid.size(); ++c) {
      t.emplace_back(c, c, 1.0 + 2.0 * grid.dim() * k);
      for (int axis = 0; axis < grid.dim(); ++axis) {
        t.emplace_back(c, nb.prev[axis][c], -k);
        t.emplace_back(c, nb.next[axis][c], -k);
      }
    }
    Eigen::SparseMatrix<double> A(grid.size(), grid.size());
    A.setFromTriplets(t.begin(), t.end());
    solver.compute(A);
    if (solver.info() != Eigen::Success) throw ConfigError("implicit diffusion matrix could not be factored");
  }

  Eigen::VectorXd u = u0.values, u_left, diss(grid.size()), lo, hi, grad2(grid.size());
  snapshot(traj, 0, grid, u);
  traj.max_abs_u = u.cwiseAbs().maxCoeff();
  for (int n = 0; n < path.n_steps; ++n) {
    u_left = u;
    const double umin = u.minCoeff(), umax = u.maxCoeff();
    check_state_cfl(flux, opt.numerical_flux, lam, umin, umax, n);
    diss.setZero();
    flux_step(grid, nb, flux, psi, opt.numerical_flux, lam, u, diss);
    enforce_range(u, umin, umax, n);

    if (kind == SchemeKind::parabolic) {
      u = solver.solve(u);
      grad2.setZero();
      for (int axis = 0; axis < grid.dim(); ++axis)
        for (Eigen::Index c = 0; c < u.size(); ++c) {
          const double dp = u(nb.next[axis][c]) - u(c), dm = u(c) - u(nb.prev[axis][c]);
          grad2(c) += 0.5 * (dp * dp + dm * dm) / h2;
        }
      diss = eta * path.dt * grad2;
    }
    stencil_range(grid, nb, u, lo, hi);
    rb.add_ranged(n, diss, u, lo, hi);

    add_noise(model, modes, path, n, u_left, u);
    if (!u.allFinite()) throw InvariantViolation("non-finite state", n);
    traj.max_abs_u = std::max(traj.max_abs_u, u.cwiseAbs().maxCoeff());
    if (is_snapshot(n + 1, path.n_steps, opt.snapshot_stride)) snapshot(traj, n + 1, grid, u);
  }
  traj.dissipation = std::move(rb.record());
  return traj;
}

}  // namespace

Trajectory run_fv(const TorusGrid& grid, const FluxSpec& flux, const NoiseModel& model, const NoisePath& path,
                  const Fieldd& u0, const SchemeOptions& opt) {
  return run_explicit(SchemeKind::fv, grid, flux, model, path, u0, 0.0, opt);
}

Trajectory run_parabolic(const TorusGrid& grid, const FluxSpec& flux, const NoiseModel& model, const NoisePath& path,
                         const Fieldd& u0, double eta, const SchemeOptions& opt) {
  if (!(eta > 0) || !std::isfinite(eta)) throw ConfigError("eta must be > 0");
  return run_explicit(SchemeKind::parabolic, grid, flux, model, path, u0, eta, opt);
}

std::vector<double> epsilon_parabolic(const Trajectory& traj, const TestFunction<double>& phi, double eta) {
  if (traj.fields.empty()) throw std::invalid_argument("empty trajectory");
  if (!traj.every_step()) throw ConfigError("epsilon_parabolic needs a snapshot at every step");
  const TorusGrid& g = traj.fields.front().grid;
  std::vector<double> out(traj.fields.size(), 0.0);
  if (eta == 0.0 || phi.theta_constant(g.dim())) return out;
  Eigen::VectorXd lap(g.size());
  for (Eigen::Index c = 0; c < g.size(); ++c) lap(c) = phi.theta_laplacian(g.center_of(c), g.dim());
  double acc = 0.0;
  for (std::size_t m = 1; m < traj.fields.size(); ++m) {
    const auto& u = traj.fields[m].values;
    double s = 0.0;
    for (Eigen::Index c = 0; c < g.size(); ++c) s += lap(c) * phi.psi_primitive(u(c));
    acc += eta * traj.dt * s * g.cell_volume();
    out[m] = acc;
  }
  return out;
}

void shift_kinetic_row(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row, double s, double dxi, RemapKind kind) {
  const Eigen::Index M = row.size();
  if (s == 0.0) return;
  if (s < 0) {
    // mirror: 1 - f reversed is again nonincreasing with the same boundary values
    Eigen::RowVectorXd g = (1.0 - row.reverse().array()).matrix();
    shift_kinetic_row(g, -s, dxi, kind);
    row = (1.0 - g.reverse().array()).matrix();
    return;
  }
  const double cells = s / dxi;
  const double whole = std::floor(cells);
  const double theta = cells - whole;
  const Eigen::Index q = static_cast<Eigen::Index>(whole);
  auto at = [&](Eigen::Index j) { return j < 0 ? 1.0 : (j >= M ? 0.0 : row(j)); };
  Eigen::RowVectorXd out(M);
  for (Eigen::Index j = 0; j < M; ++j) {
    const double cur = at(j - q), below = at(j - q - 1);
    if (kind == RemapKind::sharp)
      out(j) = std::min(cur, 1.0 - theta) + std::max(0.0, below - (1.0 - theta));
    else
      out(j) = (1.0 - theta) * cur + theta * below;
  }
  row = out;
}

Trajectory run_bgk(const TorusGrid& grid, const XiGrid& xg, const FluxSpec& flux, const NoiseModel& model,
                   const NoisePath& path, const KineticStated& f0, double eta, const SchemeOptions& opt) {
  if (!(eta > 0) || !std::isfinite(eta)) throw ConfigError("eta must be > 0");
  if (!(f0.grid == grid) || !(f0.xigrid == xg)) throw ConfigError("initial kinetic state lives on different grids");
  if (!model.state_independent() && !model.is_zero())
    throw ConfigError("BGK needs xi-independent noise coefficients (noise mode 'additive')");
  const Fieldd u0 = kinetic_barycenter(f0);
  check_inputs(grid, model, path, u0, opt);
  double amax = 0.0;
  for (int j = 0; j < xg.M(); ++j) amax = std::max(amax, std::abs(flux.a(xg.center(j))));
  const double lam = path.dt / grid.h();
  if (lam * amax > 1.0 + 1e-12) {
    std::ostringstream os;
    os << "CFL violated: dt max|a(xi)| / h = " << lam * amax << " > 1";
    throw ConfigError(os.str());
  }
  if (f0.values.minCoeff() < -opt.tol_f || f0.values.maxCoeff() > 1 + opt.tol_f)
    throw ConfigError("initial kinetic state leaves [0,1]");

  Trajectory traj;
  traj.scheme = SchemeKind::bgk;
  traj.dt = path.dt;
  traj.n_steps = path.n_steps;
  RecordBuilder rb(grid, path.n_steps, opt);

  const NeighbourTable nb(grid);
  const Eigen::MatrixXd modes = model.mode_matrix(grid);
  const int M = xg.M();
  const double dxi = xg.dxi();
  const double e = std::exp(-path.dt / eta);
  Eigen::RowVectorXd ap(M), am(M), neg(M);
  for (int j = 0; j < M; ++j) {
    const double a = flux.a(xg.center(j));
    ap(j) = std::max(a, 0.0);
    am(j) = std::min(a, 0.0);
    neg(j) = xg.center(j) < 0 ? 1.0 : 0.0;
  }

  Eigen::MatrixXd f = f0.values, ft(f.rows(), M), fhat(f.rows(), M), d(f.rows(), M), m(f.rows(), M);
  Eigen::MatrixXd relax_sum;
  std::vector<Eigen::MatrixXd> relax_snaps;
  if (opt.record_relaxation) relax_sum = Eigen::MatrixXd::Zero(f.rows(), M);

  auto take_snapshot = [&](int n) {
    KineticStated state(grid, xg, f);
    traj.steps.push_back(n);
    traj.times.push_back(n * traj.dt);
    traj.fields.push_back(kinetic_barycenter(state));
    traj.kinetic.push_back(std::move(state));
    if (opt.record_relaxation) relax_snaps.push_back(relax_sum);
  };
  take_snapshot(0);
  traj.max_abs_u = traj.fields[0].values.cwiseAbs().maxCoeff();

  for (int n = 0; n < path.n_steps; ++n) {
    // (i) upwind transport
    for (int axis = 0; axis < grid.dim(); ++axis) {
      for (Eigen::Index c = 0; c < f.rows(); ++c) {
        const auto fp = f.row(nb.prev[axis][c]).array(), fn = f.row(nb.next[axis][c]).array(), fc = f.row(c).array();
        ft.row(c) = (fc - lam * (ap.array() * (fc - fp) + am.array() * (fn - fc))).matrix();
      }
      f.swap(ft);
    }
    // (ii) exact relaxation to the cell-averaged equilibrium of the current u
    for (Eigen::Index c = 0; c < f.rows(); ++c) {
      const double u = (f.row(c) - neg).sum() * dxi;
      for (int j = 0; j < M; ++j) fhat(c, j) = averaged_indicator(u, xg, j);
    }
    d = (1.0 - e) * (fhat - f);
    f += d;
    if (opt.record_relaxation) relax_sum += d;
    double acc;
    for (Eigen::Index c = 0; c < f.rows(); ++c) {
      acc = 0.0;
      for (int j = 0; j < M; ++j) {
        acc += d(c, j) * dxi;
        m(c, j) = acc;
      }
    }
    rb.add_profile(n, m, xg);

    // (iii) noise: exact translation in xi
    if (!model.is_zero()) {
      const Eigen::VectorXd s = modes * path.increments.row(n).transpose();
      for (Eigen::Index c = 0; c < f.rows(); ++c) shift_kinetic_row(f.row(c), s(c), dxi, opt.remap);
    }

    if (!f.allFinite()) throw InvariantViolation("non-finite kinetic state", n);
    const double fmin = f.minCoeff(), fmax = f.maxCoeff();
    if (fmin < -opt.tol_f || fmax > 1.0 + opt.tol_f) {
      std::ostringstream os;
      os << "kinetic state left [0,1]: range [" << fmin << ", " << fmax << "]";
      throw InvariantViolation(os.str(), n);
    }
    f = f.cwiseMax(0.0).cwiseMin(1.0);
    if (f.col(0).minCoeff() < 1.0 - opt.tol_f || f.col(M - 1).maxCoeff() > opt.tol_f) {
      std::ostringstream os;
      os << "kinetic mass at |xi| = R (f(-R) min " << f.col(0).minCoeff() << ", f(R) max " << f.col(M - 1).maxCoeff()
         << ")";
      throw TruncationExceeded(os.str(), n);
    }
    traj.max_abs_u = std::max(traj.max_abs_u, ((f.rowwise() - neg).rowwise().sum() * dxi).cwiseAbs().maxCoeff());
    if (M > 1) traj.monotonicity_defect = std::max(traj.monotonicity_defect, (f.rightCols(M - 1) - f.leftCols(M - 1)).maxCoeff());
    if (is_snapshot(n + 1, path.n_steps, opt.snapshot_stride)) take_snapshot(n + 1);
  }
  traj.dissipation = std::move(rb.record());
  traj.dissipation.relaxation = std::move(relax_snaps);
  return traj;
}

double exact_burgers_riemann(double left, double right, double x, double t) {
  if (t < 0) throw std::invalid_argument("time must be >= 0");
  if (t == 0) return x < 0 ? left : right;
  if (left > right) {
    const double s = 0.5 * (left + right);
    return x < s * t ? left : right;
  }
  if (x <= left * t) return left;
  if (x >= right * t) return right;
  return x / t;
}

}  // namespace kinscl
