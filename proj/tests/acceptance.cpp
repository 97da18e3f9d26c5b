// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
//   acceptance [--jobs N] [--only K]

#include "kinscl/app.hpp"
#include "kinscl/converge.hpp"
#include "kinscl/io.hpp"
#include "kinscl/kinetic.hpp"
#include "kinscl/schemes.hpp"
#include "kinscl/stats.hpp"
#include "kinscl/verify.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <unistd.h>

using namespace kinscl;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_jobs = 1;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string list(const std::vector<double>& v, const char* f = "%.3e") {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(f, v[i]);
  return s + "]";
}

SchemeOptions every_step() {
  SchemeOptions o;
  o.snapshot_stride = 1;
  return o;
}

Fieldd sine(const TorusGrid& g, double amp, double offset = 0.0) {
  return Fieldd::from_function(g, [=](auto x) { return offset + amp * std::sin(2 * kPi * x[0]); });
}

// Smallest N >= T/dt_max divisible by `multiple`.
double fine_dt(double T, double dt_max, int multiple) {
  int n = static_cast<int>(std::ceil(T / dt_max - 1e-12));
  n = ((n + multiple - 1) / multiple) * multiple;
  return T / n;
}

// Two Riemann problems; valid while t <= 1/2, before the shock wraps around the torus.
double pulse(double x, double t) {
  if (x < 0.25 + t) return exact_burgers_riemann(0.0, 1.0, x - 0.25, t);
  return exact_burgers_riemann(1.0, 0.0, x - 0.75, t);
}

Outcome deterministic_baseline() {
  const double T = 0.5;
  const auto flux = FluxSpec::burgers(1.0);
  const auto silent = make_noise_model(1, 1.0, NoiseMode::compact_support, 0.0);
  std::vector<double> err, h;
  bool decreasing = true;
  for (int cells : {128, 256, 512, 1024}) {
    const auto g = make_grid(1, cells);
    const auto path = sample_wiener_path(silent, T, fine_dt(T, stable_dt(g, flux, 0.4), 1), 0);
    const auto u0 = Fieldd::from_function(g, [](auto x) { return x[0] >= 0.25 && x[0] < 0.75 ? 1.0 : 0.0; });
    SchemeOptions o;
    o.snapshot_stride = path.n_steps;
    const Fieldd u = run_fv(g, flux, silent, path, u0, o).final_field();
    double e = 0;
    for (int i = 0; i < cells; ++i) {
      double avg = 0;
      for (int k = 0; k < 64; ++k) avg += pulse((i + (k + 0.5) / 64) * g.h(), T) / 64;
      e += std::abs(u.values(i) - avg) * g.h();
    }
    if (!err.empty() && !(e < err.back())) decreasing = false;
    err.push_back(e);
    h.push_back(g.h());
  }
  const RateFit fit = rate_fit(err, h);
  return {decreasing && fit.rate >= 0.5,
          fmt("L1 errors %s, rate %.3f (need strictly decreasing, rate >= 0.5)", list(err).c_str(), fit.rate)};
}

Outcome mass_identity() {
  const auto flux = FluxSpec::burgers(1.0);
  // zero noise: the dissipation record against the energy drop
  const auto g0 = make_grid(1, 1024);
  const auto silent = make_noise_model(1, 1.0, NoiseMode::compact_support, 0.0);
  const auto p0 = sample_wiener_path(silent, 0.5, fine_dt(0.5, stable_dt(g0, flux, 0.4), 1), 0);
  const Fieldd u0 = sine(g0, 1.0);
  const auto t0 = run_fv(g0, flux, silent, p0, u0, every_step());
  const double drop = 0.5 * (u0.values.squaredNorm() - t0.final_field().values.squaredNorm()) * g0.cell_volume();
  const double dev = std::max(std::abs(t0.dissipation.total() - drop), std::abs(mass_balance(t0, silent, p0) - drop));

  // noise: 500 samples of the Ito mass balance
  const int n = 500;
  const auto g = make_grid(1, 256);
  const auto model = make_noise_model(4, 1.0, NoiseMode::compact_support, 1.0);
  const double dt = fine_dt(0.5, stable_dt(g, flux, 0.4), 1);
  const Fieldd v0 = sine(g, 0.8);
  std::vector<double> m(n);
  parallel_for(n, g_jobs, [&](int s) {
    const auto path = sample_wiener_path(model, 0.5, dt, 202, static_cast<std::uint32_t>(s));
    m[s] = mass_balance(run_fv(g, flux, model, path, v0, every_step()), model, path);
  });
  int above = 0;
  for (double v : m) above += v >= -1e-8;
  const double frac = static_cast<double>(above) / n;
  return {dev <= 1e-10 && frac >= 0.99,
          fmt("zero noise |m_total - energy drop| = %.2e (<= 1e-10); noise: %d/%d samples with m_total >= -1e-8 "
              "(min %.3e, need >= 99%%)",
              dev, above, n, *std::min_element(m.begin(), m.end()))};
}

Outcome parabolic_residual() {
  const double T = 0.25, eta = 0.01;
  const auto flux = FluxSpec::burgers(1.0);
  const auto model = make_noise_model(4, 1.0, NoiseMode::compact_support, 0.1);
  const auto lib = standard_test_functions<double>();
  const std::vector<int> ladder{64, 128, 256};
  const int n = 8;
  const double dt = fine_dt(T, stable_dt(make_grid(1, 256), flux, 0.4), 4);
  // gap[s][r][i]: max over time of |residual - epsilon|
  std::vector<std::vector<std::vector<double>>> gap(n);
  parallel_for(n, g_jobs, [&](int s) {
    const auto fine = sample_wiener_path(model, T, dt, 303, static_cast<std::uint32_t>(s));
    for (int cells : ladder) {
      const auto g = make_grid(1, cells);
      const auto path = aggregate_increments(fine, 256 / cells);
      SchemeOptions o = every_step();
      o.record_cells = true;
      // offset data: odd data would make the xi-even pairing vanish identically
      const auto tr = run_parabolic(g, flux, model, path, sine(g, 0.6, 0.2), eta, o);
      std::vector<double> row;
      for (const auto& phi : lib) {
        const auto r = kinetic_residual(tr, flux, model, path, phi);
        const auto e = epsilon_parabolic(tr, phi, eta);
        double worst = 0;
        for (std::size_t m = 0; m < e.size(); ++m) worst = std::max(worst, std::abs(r.residual[m] - e[m]));
        row.push_back(worst);
      }
      gap[s].push_back(row);
    }
  });
  bool ok = true;
  std::string detail = "ratios of mean gap under halving:";
  for (std::size_t i = 0; i < lib.size(); ++i) {
    std::vector<double> mean(ladder.size(), 0.0);
    for (const auto& gs : gap)
      for (std::size_t r = 0; r < ladder.size(); ++r) mean[r] += gs[r][i] / n;
    const double r1 = mean[0] / mean[1], r2 = mean[1] / mean[2];
    ok = ok && r1 >= 1.5 && r2 >= 1.5;
    detail += fmt(" phi%zu %.2f %.2f;", i, r1, r2);
  }
  return {ok, detail + " (need >= 1.5)"};
}

Outcome martingales() {
  const int n = 1000, cells = 64, S = 4;
  const double T = 0.25, eta = 0.01;
  const auto flux = FluxSpec::burgers(1.0);
  const auto model = make_noise_model(2, 1.0, NoiseMode::compact_support, 1.0);
  const auto g = make_grid(1, cells);
  const double dt = fine_dt(T, stable_dt(g, flux, 0.4), S);
  const auto phi = standard_test_functions<double>()[2];
  const Fieldd u0 = sine(g, 0.8);
  const int n_steps = static_cast<int>(std::lround(T / dt));
  std::vector<int> test_steps;
  for (int k = 0; k <= S; ++k) test_steps.push_back(k * n_steps / S);
  std::vector<MartingaleSample> ms(n);
  parallel_for(n, g_jobs, [&](int s) {
    const auto path = sample_wiener_path(model, T, dt, 404, static_cast<std::uint32_t>(s));
    ms[s] = build_martingale_sample(run_parabolic(g, flux, model, path, u0, eta, every_step()), model, path, phi,
                                    test_steps);
  });
  std::vector<MartingaleSample> control = ms;
  for (auto& c : control)
    for (Eigen::Index t = 0; t < c.X.size(); ++t) c.X(t) += c.times[t];
  const std::vector<std::pair<int, int>> pairs{{0, S / 2}, {S / 2, S}};
  const auto rep = martingale_test(ms, pairs, 3.0);
  const auto neg = martingale_test(control, pairs, 3.0);
  double worst = 0;
  for (const auto& e : rep.entries) worst = std::max(worst, e.statistic);
  return {rep.pass() && neg.failed() > 0,
          fmt("scheme: %d/%zu statistics pass at 3 SE (max |z| %.2f, %d inconclusive); drift control: %d fail",
              rep.passed(), rep.entries.size(), worst, rep.inconclusive(), neg.failed())};
}

Outcome contraction() {
  const int n = 200, cells = 256, S = 10;
  const double T = 0.5;
  const auto flux = FluxSpec::burgers(1.0);
  const auto model = make_noise_model(4, 1.0, NoiseMode::compact_support, 1.0);
  const auto g = make_grid(1, cells);
  const double dt = fine_dt(T, stable_dt(g, flux, 0.4), S);
  const SampleRunner run = [&](const Fieldd& u0, int s) {
    const auto path = sample_wiener_path(model, T, dt, 505, static_cast<std::uint32_t>(s));
    SchemeOptions o;
    o.snapshot_stride = path.n_steps / S;
    return run_fv(g, flux, model, path, u0, o);
  };
  const Fieldd u0 = sine(g, 0.8);
  Fieldd bumped = u0, lifted = u0;
  for (Eigen::Index c = 0; c < g.size(); ++c) {
    if (g.center_of(c)[0] < 0.5) bumped.values(c) += 0.1;
    lifted.values(c) += 0.1;
  }
  const auto rep = contraction_test(bumped, u0, run, n, g_jobs);
  const auto ord = contraction_test(u0, lifted, run, n, g_jobs);
  bool ordered = true;
  for (const auto& st : ord.series) ordered = ordered && st.estimate <= 2 * st.standard_error;
  std::vector<double> series;
  for (const auto& st : rep.series) series.push_back(st.estimate);
  return {rep.pass() && ordered, fmt("E|(u_a-u_b)+|_1 %s, nonincreasing within 2 SE: %s; ordered case within 2 SE "
                                     "of 0: %s",
                                     list(series).c_str(), rep.pass() ? "yes" : "no", ordered ? "yes" : "no")};
}

Outcome invariant_region() {
  const int n = 500, cells = 128;
  const double T = 0.5;
  const auto flux = FluxSpec::burgers(1.0);
  const auto model = make_noise_model(4, 1.0, NoiseMode::compact_support, 1.0);
  const auto g = make_grid(1, cells);
  const double dt = fine_dt(T, stable_dt(g, flux, 0.4), 1);
  const Fieldd u0 = sine(g, 1.0);
  std::vector<double> ex(n);
  parallel_for(n, g_jobs, [&](int s) {
    const auto path = sample_wiener_path(model, T, dt, 606, static_cast<std::uint32_t>(s));
    SchemeOptions o;
    o.snapshot_stride = path.n_steps;
    ex[s] = linfty_exceedance(run_fv(g, flux, model, path, u0, o));
  });
  const auto rep = linfty_test(ex, model, dt, 3.0);
  const auto silent = make_noise_model(4, 1.0, NoiseMode::compact_support, 0.0);
  const auto p0 = sample_wiener_path(silent, T, dt, 0);
  SchemeOptions o;
  o.snapshot_stride = p0.n_steps;
  const double ex0 = linfty_exceedance(run_fv(g, flux, silent, p0, u0, o));
  return {rep.pass && ex0 == 0.0, fmt("max exceedance %.3e <= 3 g_max sqrt(dt) = %.3e; zero-noise exceedance %.1e",
                                      rep.max_exceedance, rep.tolerance, ex0)};
}

Outcome bgk_equilibrium() {
  const int n = 20, cells = 128, ref_cells = 1024;
  const double T = 0.25;
  const auto flux = FluxSpec::burgers(1.0);
  const auto model = make_noise_model(2, 1.0, NoiseMode::additive, 0.1);
  const auto xg = make_xigrid(1.5, 96);
  const auto g = make_grid(1, cells), gr = make_grid(1, ref_cells);
  const int factor = ref_cells / cells;
  // one fine mesh serves both: the BGK step (factor x coarser) still respects the xi-speed bound
  const double dt = fine_dt(T, 0.4 * gr.h() / xg.R(), factor);
  const std::vector<double> etas{0.1, 0.05, 0.025};
  std::vector<std::vector<double>> dist(n), err(n);
  parallel_for(n, g_jobs, [&](int s) {
    const auto fine = sample_wiener_path(model, T, dt, 707, static_cast<std::uint32_t>(s));
    SchemeOptions o;
    o.snapshot_stride = fine.n_steps;
    const Fieldd ref = block_average(run_fv(gr, flux, model, fine, sine(gr, 0.6), o).final_field(), g);
    const auto path = aggregate_increments(fine, factor);
    o.snapshot_stride = path.n_steps;
    for (double eta : etas) {
      const auto tr = run_bgk(g, xg, flux, model, path, averaged_equilibrium(sine(g, 0.6), xg), eta, o);
      dist[s].push_back(distance_to_equilibrium(tr.kinetic.back()).mass);
      err[s].push_back(lp_error(tr.final_field(), ref, 1.0));
    }
  });
  std::vector<double> md(etas.size(), 0.0), me(etas.size(), 0.0);
  for (int s = 0; s < n; ++s)
    for (std::size_t k = 0; k < etas.size(); ++k) {
      md[k] += dist[s][k] / n;
      me[k] += err[s][k] / n;
    }
  const bool ok = md[0] > md[1] && md[1] > md[2] && me[0] > me[1] && me[1] > me[2];
  return {ok, fmt("eta 0.1/0.05/0.025: equilibrium distance mass %s, L1 error vs FV reference %s (both strictly "
                  "decreasing)",
                  list(md).c_str(), list(me).c_str())};
}

StudySpec pathwise_spec(int jobs) {
  StudySpec spec;
  spec.scheme = SchemeKind::fv;
  spec.flux = FluxSpec::burgers(1.0);
  spec.model = make_noise_model(4, 1.0, NoiseMode::compact_support, 0.5);
  spec.ladder = {128, 256, 512, 1024};
  spec.T = 0.5;
  spec.u0 = [](const std::array<double, 2>& x) { return 0.8 * std::sin(2 * kPi * x[0]); };
  spec.seed = 808;
  spec.n_samples = 100;
  spec.n_snapshots = 10;
  spec.options.tail_radii = {0.5, 1.0, 1.5};
  spec.moment_orders = {1.0, 2.0, 4.0};
  spec.jobs = jobs;
  return spec;
}

const ConvergenceStudy& pathwise_study() {
  static const ConvergenceStudy study = coupled_run(pathwise_spec(g_jobs));
  return study;
}

Outcome pathwise_convergence() {
  const auto& st = pathwise_study();
  std::vector<int> t_idx;
  for (std::size_t t = 1; t < st.times.size(); ++t) t_idx.push_back(static_cast<int>(t));
  const auto rep = time_slice_convergence(st, t_idx, 1.0, 1);
  int passed = 0;
  for (bool b : rep.sample_pass) passed += b;
  return {rep.pass_fraction >= 0.95,
          fmt("%d/%zu samples with L1 errors decreasing along the ladder at all %zu times (<= 1 inversion); need >= "
              "95%%",
              passed, rep.sample_pass.size(), t_idx.size())};
}

Outcome uniform_bounds() {
  const auto& st = pathwise_study();
  const auto tight = tightness_stats(st.records, {0.5, 1.0, 1.5});
  const auto mom = moment_bound_check(st.sup_moments, {1.0, 2.0, 4.0});
  return {tight.pass() && mom.pass,
          fmt("moment spread ratios (p=1,2,4) %s, dissipation-mass ratio %.3f (<= 10); tails decrease in R: %s",
              list(mom.ratios, "%.3f").c_str(), tight.ratio, tight.tails_decrease ? "yes" : "no")};
}

std::string manifest_of(Command c, const std::string& config, const fs::path& out, int jobs) {
  CliOptions opt;
  opt.command = c;
  opt.config = config;
  opt.out = out.string();
  opt.jobs = jobs;
  std::ostringstream o, e;
  if (dispatch(opt, o, e) == 2) return "";
  std::ifstream f(out / "manifest.json", std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("kinscl_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  bool ok = true;
  std::string detail;
  for (const auto& [cmd, name] : {std::pair{Command::verify, "verify_fv"}, std::pair{Command::converge, "burgers_baseline"}}) {
    const std::string cfg = std::string(KINSCL_SOURCE_DIR) + "/configs/" + name + ".ini";
    const std::string a = manifest_of(cmd, cfg, root / (std::string(name) + "_j1"), 1);
    const std::string b = manifest_of(cmd, cfg, root / (std::string(name) + "_j1b"), 1);
    const std::string c = manifest_of(cmd, cfg, root / (std::string(name) + "_j4"), 4);
    const bool same = !a.empty() && a == b && a == c;
    ok = ok && same;
    detail += fmt("%s: manifests (jobs 1, 1, 4) %s; ", name, same ? "identical" : "differ");
  }
  // the coupled study behind criteria 8 and 9
  const auto x = coupled_run(pathwise_spec(1)), y = coupled_run(pathwise_spec(3));
  bool study_same = x.max_abs_u == y.max_abs_u && x.sup_moments == y.sup_moments;
  for (std::size_t s = 0; s < x.fields.size() && study_same; ++s)
    for (std::size_t r = 0; r < x.fields[s].size(); ++r)
      study_same = study_same && x.fields[s][r].back().values == y.fields[s][r].back().values;
  ok = ok && study_same;
  detail += fmt("coupled study (jobs 1 vs 3) %s", study_same ? "bit-identical" : "differs");
  fs::remove_all(root);
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int jobs = 0, only = 0;
  app.add_option("--jobs", jobs, "worker threads (default: KINSCL_JOBS, else 1)");
  app.add_option("--only", only, "run a single criterion")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  g_jobs = resolve_jobs(jobs);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"deterministic baseline", deterministic_baseline},
      {"mass identity", mass_identity},
      {"parabolic epsilon-residual", parabolic_residual},
      {"martingale characterization", martingales},
      {"L1 contraction", contraction},
      {"Linfty invariant region", invariant_region},
      {"BGK reduction to equilibrium", bgk_equilibrium},
      {"pathwise coupled convergence", pathwise_convergence},
      {"uniform bounds", uniform_bounds},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s criterion %zu (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
