#include "kinscl/app.hpp"

#include "kinscl/config.hpp"
#include "kinscl/converge.hpp"
#include "kinscl/io.hpp"
#include "kinscl/kinetic.hpp"
#include "kinscl/stats.hpp"
#include "kinscl/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

namespace kinscl {

namespace {

using json = nlohmann::ordered_json;

struct Check {
  std::string name;
  double estimate = 0.0;
  double standard_error = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string provenance;  // "identity" or "calibrated"
  json detail = json::object();
};

json to_json(const Check& c) {
  json j{{"name", c.name},         {"estimate", c.estimate}, {"standard_error", c.standard_error},
         {"threshold", c.threshold}, {"pass", c.pass},         {"provenance", c.provenance}};
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

std::string to_string(Command c) {
  switch (c) {
    case Command::run:
      return "run";
    case Command::converge:
      return "converge";
    case Command::verify:
      return "verify";
    case Command::noise:
      return "noise";
  }
  return "unknown";
}

StudySpec study_spec(const RunConfig& cfg, std::vector<int> ladder, int jobs) {
  StudySpec s;
  s.scheme = cfg.scheme;
  s.flux = make_flux(cfg);
  s.model = make_model(cfg);
  s.dim = cfg.dim;
  s.ladder = std::move(ladder);
  s.T = cfg.T;
  s.eta = cfg.eta;
  if (cfg.scheme == SchemeKind::bgk) s.xigrid = make_run_xigrid(cfg);
  s.options = make_options(cfg);
  s.u0 = make_initial(cfg);
  s.seed = cfg.seed;
  s.n_samples = cfg.samples;
  s.n_snapshots = cfg.snapshots;
  s.moment_orders = cfg.moments;
  s.jobs = jobs;
  return s;
}

/// One run of the configured scheme on a given path.
Trajectory run_scheme(const RunConfig& cfg, const TorusGrid& g, const NoisePath& path, const Fieldd& u0,
                      const SchemeOptions& opt) {
  const FluxSpec flux = make_flux(cfg);
  const NoiseModel model = make_model(cfg);
  switch (cfg.scheme) {
    case SchemeKind::fv:
      return run_fv(g, flux, model, path, u0, opt);
    case SchemeKind::parabolic:
      return run_parabolic(g, flux, model, path, u0, cfg.eta, opt);
    case SchemeKind::bgk: {
      const XiGrid xg = make_run_xigrid(cfg);
      return run_bgk(g, xg, flux, model, path, averaged_equilibrium(u0, xg), cfg.eta, opt);
    }
  }
  throw ConfigError("unknown scheme");
}

std::string header(const Check& c) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s %-28s estimate %.6e threshold %.6e", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.estimate, c.threshold);
  return buf;
}

std::string snapshot_csv(const Fieldd& u) {
  const bool two_d = u.grid.dim() == 2;
  CsvWriter csv(two_d ? std::vector<std::string>{"cell", "x", "y", "u"} : std::vector<std::string>{"cell", "x", "u"});
  for (Eigen::Index c = 0; c < u.size(); ++c) {
    const auto x = u.grid.center_of(c);
    csv.cell(static_cast<long long>(c)).cell(x[0]);
    if (two_d) csv.cell(x[1]);
    csv.cell(u.values(c));
    csv.end_row();
  }
  return csv.str();
}

std::string sample_dir(int sample) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sample_%04d/", sample);
  return buf;
}

// ---------------------------------------------------------------- run

std::vector<Check> command_run(const RunConfig& cfg, int jobs, OutputTree& out) {
  const ConvergenceStudy st = coupled_run(study_spec(cfg, {cfg.cells}, jobs));
  for (std::size_t s = 0; s < st.fields.size(); ++s) {
    const std::string dir = sample_dir(st.samples[s]);
    json files = json::array();
    for (std::size_t t = 0; t < st.times.size(); ++t) {
      char name[32];
      std::snprintf(name, sizeof name, "snapshot_%03zu.csv", t);
      out.write(dir + name, snapshot_csv(st.fields[s][0][t]));
      files.push_back(name);
    }
    const auto& rec = st.records[0][s];
    const json traj{{"scheme", to_string(cfg.scheme)},
                    {"grid", {{"dim", cfg.dim}, {"cells", cfg.cells}}},
                    {"seed", cfg.seed},
                    {"sample", st.samples[s]},
                    {"dt", st.dt[0]},
                    {"times", st.times},
                    {"snapshots", files},
                    {"dissipation", {{"total", rec.total()}, {"min_density", rec.min_density}}},
                    {"max_abs_u", st.max_abs_u[s][0]}};
    out.write(dir + "trajectory.json", dump_json(traj));
  }
  return {};
}

// ---------------------------------------------------------------- noise

std::vector<Check> command_noise(const RunConfig& cfg, int jobs, OutputTree& out) {
  const NoiseModel model = make_model(cfg);
  const double dt = study_fine_dt(study_spec(cfg, {cfg.cells}, jobs));
  const auto paths = parallel_map<NoisePath>(cfg.samples, resolve_jobs(jobs), [&](int s) {
    return sample_wiener_path(model, cfg.T, dt, cfg.seed, static_cast<std::uint32_t>(s));
  });
  CsvWriter inc({"sample", "step", "k", "db"});
  NoisePath pooled = paths[0];
  pooled.increments.resize(static_cast<Eigen::Index>(paths[0].n_steps) * cfg.samples, model.K());
  pooled.n_steps = static_cast<int>(pooled.increments.rows());
  for (int s = 0; s < cfg.samples; ++s) {
    pooled.increments.middleRows(static_cast<Eigen::Index>(s) * paths[0].n_steps, paths[0].n_steps) =
        paths[s].increments;
    for (int n = 0; n < paths[s].n_steps; ++n)
      for (int k = 0; k < model.K(); ++k) {
        inc.cell(s).cell(n).cell(k).cell(paths[s].increments(n, k));
        inc.end_row();
      }
  }
  out.write("increments.csv", inc.str());

  std::vector<Check> checks;
  const double u_range = model.compact_support() ? 1.5 : 2.0 * model.u_max();
  const BoundReport b = verify_noise_bounds_on_lattice(model, 12, u_range);
  Check bounds{"noise_bounds", b.d1_hat, 0.0, b.d1_certificate, b.pass, "identity"};
  bounds.detail = {{"d0_hat", b.d0_hat}, {"d0_certificate", b.d0_certificate}, {"lattice_points", b.n_samples}};
  checks.push_back(bounds);
  const double z = increment_variance_zscores(pooled).cwiseAbs().maxCoeff();
  checks.push_back({"increment_variance", z, 0.0, 3.0, z <= 3.0, "calibrated"});
  return checks;
}

// ---------------------------------------------------------------- converge

std::vector<Check> command_converge(const RunConfig& cfg, int jobs, OutputTree& out) {
  if (cfg.ladder.empty()) throw ConfigError("converge needs [converge] ladder");
  const ConvergenceStudy st = coupled_run(study_spec(cfg, cfg.ladder, jobs));
  const auto e = study_errors(st, cfg.p);
  CsvWriter csv({"sample", "resolution", "time", "p", "error"});
  for (std::size_t s = 0; s < e.size(); ++s)
    for (std::size_t r = 0; r < st.ladder.size(); ++r)
      for (std::size_t t = 0; t < st.times.size(); ++t) {
        csv.cell(st.samples[s]).cell(st.ladder[r]).cell(st.times[t]).cell(cfg.p).cell(e[s][r][t]);
        csv.end_row();
      }
  out.write("errors.csv", csv.str());

  std::vector<int> tidx;
  for (std::size_t t = 1; t < st.times.size(); ++t) tidx.push_back(static_cast<int>(t));
  const SliceReport sl = time_slice_convergence(st, tidx, cfg.p, cfg.max_inversions);
  Check slice{"time_slice_convergence", sl.pass_fraction, 0.0, cfg.pass_fraction, sl.pass_fraction >= cfg.pass_fraction,
              "calibrated"};
  json mean_errors = json::array();
  std::vector<double> final_mean, h;
  for (std::size_t r = 0; r + 1 < st.ladder.size(); ++r) {
    double m = 0;
    for (const auto& es : e) m += es[r].back();
    m /= static_cast<double>(e.size());
    final_mean.push_back(m);
    h.push_back(1.0 / st.ladder[r]);
    mean_errors.push_back({{"cells", st.ladder[r]}, {"mean_error_at_T", m}});
  }
  slice.detail["mean_errors"] = mean_errors;
  std::vector<Check> checks{slice};
  json summary{{"p", cfg.p}, {"ladder", st.ladder}, {"samples", st.samples.size()}, {"mean_errors", mean_errors},
               {"pass_fraction", sl.pass_fraction}, {"slice_pass", slice.pass}};
  if (final_mean.size() >= 3) {
    const RateFit fit = rate_fit(final_mean, h);
    Check rate{"convergence_rate", fit.rate, 0.0, cfg.min_rate, fit.rate >= cfg.min_rate, "calibrated"};
    rate.detail = {{"intercept", fit.intercept}, {"residual", fit.residual}, {"dropped", fit.dropped}};
    summary["rate"] = {{"rate", fit.rate}, {"intercept", fit.intercept}, {"residual", fit.residual},
                       {"dropped", fit.dropped}, {"min_rate", cfg.min_rate}, {"pass", rate.pass}};
    checks.push_back(rate);
  }
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  summary["pass"] = all;
  out.write("summary.json", dump_json(summary));
  return checks;
}

// ---------------------------------------------------------------- verify

bool wants(const RunConfig& cfg, const std::string& t) {
  return std::find(cfg.tests.begin(), cfg.tests.end(), t) != cfg.tests.end();
}

struct SampleOutcome {
  double m_ito = 0, m_discrete = 0, record_total = 0, max_abs_u = 0;
  MartingaleSample mart;
  std::vector<ResidualSeries> residuals;
  std::vector<std::vector<double>> eps;
};

std::vector<Check> command_verify(const RunConfig& cfg, int jobs, OutputTree& out) {
  const TorusGrid g = make_run_grid(cfg);
  const NoiseModel model = make_model(cfg);
  const FluxSpec flux = make_flux(cfg);
  const Fieldd u0 = Fieldd::from_function(g, make_initial(cfg));
  const double dt = study_fine_dt(study_spec(cfg, {cfg.cells}, jobs));
  const int n_steps = static_cast<int>(std::lround(cfg.T / dt));
  const int stride = n_steps / cfg.snapshots;
  const auto lib = standard_test_functions<double>();
  const int workers = resolve_jobs(jobs);
  std::vector<Check> checks;

  const bool pathwise = wants(cfg, "mass") || wants(cfg, "residual") || wants(cfg, "martingale") || wants(cfg, "linfty");
  if (wants(cfg, "martingale") && cfg.samples < 100) throw ConfigError("the martingale test needs samples >= 100");
  if (wants(cfg, "linfty")) {
    if (!model.compact_support() && !model.is_zero())
      throw ConfigError("the linfty test needs noise mode compact_support");
    if (u0.values.cwiseAbs().maxCoeff() > 1.0) throw ConfigError("the linfty test needs |u0| <= 1");
  }
  if ((wants(cfg, "contraction")) && cfg.samples < 2) throw ConfigError("the contraction test needs samples >= 2");

  if (pathwise) {
    std::vector<int> test_steps;
    for (int k = 0; k <= cfg.snapshots; ++k) test_steps.push_back(k * stride);
    const auto outcomes = parallel_map<SampleOutcome>(cfg.samples, workers, [&](int s) {
      const NoisePath path = sample_wiener_path(model, cfg.T, dt, cfg.seed, static_cast<std::uint32_t>(s));
      SchemeOptions opt = make_options(cfg);
      opt.snapshot_stride = 1;
      opt.record_cells = s == 0 && wants(cfg, "residual");
      opt.record_relaxation = opt.record_cells;
      const Trajectory tr = run_scheme(cfg, g, path, u0, opt);
      SampleOutcome o;
      o.m_ito = mass_balance(tr, model, path);
      o.m_discrete = discrete_mass_balance(tr, model, path);
      o.record_total = tr.dissipation.total();
      o.max_abs_u = tr.max_abs_u;
      if (wants(cfg, "martingale")) o.mart = build_martingale_sample(tr, model, path, lib[2], test_steps);
      if (opt.record_cells)
        for (const auto& phi : lib) {
          o.residuals.push_back(kinetic_residual(tr, flux, model, path, phi));
          o.eps.push_back(cfg.scheme == SchemeKind::parabolic ? epsilon_parabolic(tr, phi, cfg.eta)
                                                              : std::vector<double>(tr.times.size(), 0.0));
        }
      return o;
    });

    if (wants(cfg, "mass")) {
      CsvWriter csv({"sample", "m_total", "m_discrete", "record_total"});
      std::vector<double> m;
      int above = 0;
      double agree = 0;
      for (int s = 0; s < cfg.samples; ++s) {
        const auto& o = outcomes[s];
        csv.cell(s).cell(o.m_ito).cell(o.m_discrete).cell(o.record_total);
        csv.end_row();
        m.push_back(o.m_ito);
        above += o.m_ito >= -cfg.mass_floor;
        agree = std::max(agree, std::abs(o.m_discrete - o.record_total));
      }
      out.write("mass.csv", csv.str());
      const double frac = static_cast<double>(above) / cfg.samples;
      Check c{"mass_balance", frac, 0.0, 0.99, frac >= 0.99, "identity"};
      if (cfg.samples >= 2) {
        const auto st = ensemble_stat(m);
        c.detail = {{"mean_m_total", st.estimate}, {"standard_error", st.standard_error}};
      }
      c.detail["floor"] = -cfg.mass_floor;
      checks.push_back(c);
      if (cfg.scheme == SchemeKind::fv)
        checks.push_back({"mass_record_agreement", agree, 0.0, 1e-10, agree <= 1e-10, "identity"});
    }

    if (wants(cfg, "residual")) {
      const auto& o = outcomes[0];
      CsvWriter csv({"phi", "time", "pairing", "transport", "martingale", "ito", "dissipation", "epsilon", "residual"});
      for (std::size_t i = 0; i < o.residuals.size(); ++i) {
        const auto& r = o.residuals[i];
        double gap = 0;
        for (std::size_t m = 0; m < r.times.size(); ++m) {
          csv.cell(static_cast<int>(i)).cell(r.times[m]).cell(r.pairing[m]).cell(r.transport[m]).cell(r.martingale[m]);
          csv.cell(r.ito[m]).cell(r.dissipation[m]).cell(o.eps[i][m]).cell(r.residual[m]);
          csv.end_row();
          gap = std::max(gap, std::abs(r.residual[m] - o.eps[i][m]));
        }
        checks.push_back({"residual_phi" + std::to_string(i), gap, 0.0, cfg.residual, gap <= cfg.residual, "calibrated"});
      }
      out.write("residual.csv", csv.str());
    }

    if (wants(cfg, "martingale")) {
      std::vector<MartingaleSample> ms, control;
      for (const auto& o : outcomes) {
        ms.push_back(o.mart);
        MartingaleSample c = o.mart;
        for (Eigen::Index t = 0; t < c.X.size(); ++t) c.X(t) += cfg.martingale_drift * c.times[t];
        control.push_back(std::move(c));
      }
      const int S = cfg.snapshots;
      const std::vector<std::pair<int, int>> pairs{{0, S / 2}, {S / 2, S}};
      const auto rep = martingale_test(ms, pairs);
      const auto neg = martingale_test(control, pairs);
      CsvWriter csv({"stream", "identity", "k", "h", "s", "t", "estimate", "standard_error", "statistic", "status"});
      auto dump = [&csv](const std::string& stream, const MartingaleTestReport& r) {
        for (const auto& e : r.entries) {
          csv.cell(stream).cell(e.identity).cell(e.k).cell(e.h_index).cell(e.s).cell(e.t).cell(e.estimate);
          csv.cell(e.standard_error).cell(e.statistic).cell(to_string(e.status));
          csv.end_row();
        }
      };
      dump("scheme", rep);
      dump("drift_control", neg);
      out.write("martingale.csv", csv.str());
      double worst = 0;
      for (const auto& e : rep.entries) worst = std::max(worst, e.statistic);
      Check c{"martingale", worst, 0.0, rep.threshold, rep.pass(), "identity"};
      c.detail = {{"entries", rep.entries.size()}, {"passed", rep.passed()}, {"failed", rep.failed()},
                  {"inconclusive", rep.inconclusive()}};
      checks.push_back(c);
      Check n{"martingale_drift_control", static_cast<double>(neg.failed()), 0.0, 1.0, !neg.pass(), "identity"};
      n.detail = {{"drift", cfg.martingale_drift}, {"failed", neg.failed()}, {"inconclusive", neg.inconclusive()}};
      checks.push_back(n);
    }

    if (wants(cfg, "linfty")) {
      std::vector<double> ex;
      for (const auto& o : outcomes) ex.push_back(std::max(0.0, o.max_abs_u - 1.0));
      const auto rep = linfty_test(ex, model, dt, cfg.linfty_factor);
      checks.push_back({"linfty", rep.max_exceedance, 0.0, rep.tolerance, rep.pass, "identity"});
    }
  }

  if (wants(cfg, "contraction")) {
    const SampleRunner runner = [&](const Fieldd& init, int s) {
      const NoisePath path = sample_wiener_path(model, cfg.T, dt, cfg.seed, static_cast<std::uint32_t>(s));
      SchemeOptions opt = make_options(cfg);
      opt.snapshot_stride = stride;
      return run_scheme(cfg, g, path, init, opt);
    };
    Fieldd half = u0, shifted = u0;
    for (Eigen::Index c = 0; c < g.size(); ++c) {
      if (g.center_of(c)[0] < 0.5) half.values(c) += cfg.contraction_shift;
      shifted.values(c) += cfg.contraction_shift;
    }
    const auto rep = contraction_test(half, u0, runner, cfg.samples, workers);
    const auto ord = contraction_test(u0, shifted, runner, cfg.samples, workers);
    CsvWriter csv({"case", "time", "estimate", "standard_error"});
    bool ordered_ok = true;
    for (std::size_t m = 0; m < rep.times.size(); ++m) {
      csv.cell("contraction").cell(rep.times[m]).cell(rep.series[m].estimate).cell(rep.series[m].standard_error);
      csv.end_row();
    }
    for (std::size_t m = 0; m < ord.times.size(); ++m) {
      csv.cell("ordered").cell(ord.times[m]).cell(ord.series[m].estimate).cell(ord.series[m].standard_error);
      csv.end_row();
      if (ord.series[m].estimate > 2 * ord.series[m].standard_error) ordered_ok = false;
    }
    out.write("contraction.csv", csv.str());
    Check c{"contraction", rep.series.back().estimate, rep.series.back().standard_error, rep.series.front().estimate,
            rep.pass(), "identity"};
    c.detail = {{"pass_initial", rep.pass_initial}, {"pass_monotone", rep.pass_monotone}};
    checks.push_back(c);
    checks.push_back({"comparison", ord.series.back().estimate, ord.series.back().standard_error, 0.0, ordered_ok,
                      "identity"});
  }

  if (wants(cfg, "tightness") || wants(cfg, "moments")) {
    const std::vector<int> ladder = cfg.ladder.empty() ? std::vector<int>{cfg.cells} : cfg.ladder;
    RunConfig c2 = cfg;
    if (c2.samples < 2) c2.samples = 2;
    const ConvergenceStudy st = coupled_run(study_spec(c2, ladder, jobs));
    CsvWriter csv({"quantity", "order", "cells", "estimate", "standard_error"});
    if (wants(cfg, "tightness")) {
      const auto rep = tightness_stats(st.records, cfg.tail_radii);
      for (std::size_t r = 0; r < ladder.size(); ++r) {
        csv.cell("dissipation_total").cell(0.0).cell(ladder[r]).cell(rep.totals[r].estimate).cell(rep.totals[r].standard_error);
        csv.end_row();
        for (std::size_t k = 0; k < cfg.tail_radii.size(); ++k) {
          csv.cell("tail_mass").cell(cfg.tail_radii[k]).cell(ladder[r]).cell(rep.tails[r][k]).cell(0.0);
          csv.end_row();
        }
      }
      Check c{"tightness", rep.ratio, 0.0, 10.0, rep.pass(), "calibrated"};
      c.detail = {{"bounded", rep.bounded}, {"tails_decrease", rep.tails_decrease}};
      checks.push_back(c);
    }
    if (wants(cfg, "moments")) {
      const auto rep = moment_bound_check(st.sup_moments, cfg.moments);
      double worst = 0;
      for (std::size_t i = 0; i < cfg.moments.size(); ++i) {
        worst = std::max(worst, rep.ratios[i]);
        for (std::size_t r = 0; r < ladder.size(); ++r) {
          csv.cell("sup_moment").cell(cfg.moments[i]).cell(ladder[r]).cell(rep.sup_moments[i][r].estimate);
          csv.cell(rep.sup_moments[i][r].standard_error);
          csv.end_row();
        }
      }
      checks.push_back({"moments", worst, 0.0, 10.0, rep.pass, "calibrated"});
    }
    out.write("bounds.csv", csv.str());
  }
  return checks;
}

}  // namespace

int dispatch(const CliOptions& opt, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  try {
    RunConfig cfg = load_config(opt.config);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.samples) cfg.samples = *opt.samples;
    if (const auto problems = validate(cfg); !problems.empty()) {
      std::string msg;
      for (const auto& p : problems) msg += (msg.empty() ? "" : "\n") + p;
      throw ConfigError(msg);
    }
    OutputTree tree(opt.out);
    tree.write("config.ini", serialize(cfg));
    std::vector<Check> checks;
    int status = 0;
    std::string failure;
    try {
      switch (opt.command) {
        case Command::run:
          checks = command_run(cfg, opt.jobs, tree);
          break;
        case Command::noise:
          checks = command_noise(cfg, opt.jobs, tree);
          break;
        case Command::converge:
          checks = command_converge(cfg, opt.jobs, tree);
          break;
        case Command::verify:
          checks = command_verify(cfg, opt.jobs, tree);
          break;
      }
    } catch (const InvariantViolation& ex) {
      failure = std::string(ex.what()) + " (step " + std::to_string(ex.step()) + ")";
      status = 1;
    }
    json jchecks = json::array();
    for (const auto& c : checks) {
      jchecks.push_back(to_json(c));
      out << header(c) << "\n";
      if (!c.pass) status = 1;
    }
    json report{{"tool", "kinscl"},   {"version", kToolVersion},  {"command", to_string(opt.command)},
                {"rng", kRngId},      {"config", serialize(cfg)}, {"checks", jchecks},
                {"pass", status == 0}};
    if (!failure.empty()) report["invariant_violation"] = failure;
    tree.write("report.json", dump_json(report));
    tree.finish();
    if (!failure.empty()) err << "invariant violated: " << failure << "\n";
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    err << "wall-clock " << secs << " s\n";
    return status;
  } catch (const ConfigError& ex) {
    err << "configuration error:\n" << ex.what() << "\n";
    return 2;
  } catch (const IoError& ex) {
    err << "io error: " << ex.what() << "\n";
    return 2;
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Stochastic scalar conservation laws: schemes, kinetic diagnostics, verification"};
  app.require_subcommand(1, 1);
  CliOptions opt;
  std::uint64_t seed = 0;
  int samples = 0;
  for (auto [name, cmd] : {std::pair{"run", Command::run}, std::pair{"converge", Command::converge},
                           std::pair{"verify", Command::verify}, std::pair{"noise", Command::noise}}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config, "configuration file")->required();
    sub->add_option("--seed", seed, "override [run] seed");
    sub->add_option("--samples", samples, "override [run] samples")->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--jobs", opt.jobs, "worker threads (default: KINSCL_JOBS, else 1)")->check(CLI::NonNegativeNumber);
    sub->callback([&opt, cmd, sub, &seed, &samples] {
      opt.command = cmd;
      if (sub->count("--seed")) opt.seed = seed;
      if (sub->count("--samples")) opt.samples = samples;
    });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return dispatch(opt, std::cout, std::cerr);
}

}  // namespace kinscl
