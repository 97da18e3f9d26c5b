#include "kinscl/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace kinscl {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("'" + v + "' is not a number");
  }
  if (used != v.size()) throw std::invalid_argument("'" + v + "' is not a number");
  return d;
}

long long to_integer(const std::string& v) {
  std::size_t used = 0;
  long long i = 0;
  try {
    i = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("'" + v + "' is not an integer");
  }
  if (used != v.size()) throw std::invalid_argument("'" + v + "' is not an integer");
  return i;
}

std::string fmt(double d) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F f) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + f(v[i]);
  return s;
}

struct Key {
  std::string section, name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

Key real(std::string s, std::string n, double RunConfig::*m) {
  return {s, n, [m](RunConfig& c, const std::string& v) { c.*m = to_double(v); },
          [m](const RunConfig& c) { return fmt(c.*m); }};
}

Key integer(std::string s, std::string n, int RunConfig::*m) {
  return {s, n,
          [m](RunConfig& c, const std::string& v) {
            const long long i = to_integer(v);
            if (i < -(1LL << 31) || i >= (1LL << 31)) throw std::invalid_argument("'" + v + "' is out of range");
            c.*m = static_cast<int>(i);
          },
          [m](const RunConfig& c) { return std::to_string(c.*m); }};
}

Key text(std::string s, std::string n, std::string RunConfig::*m) {
  return {s, n, [m](RunConfig& c, const std::string& v) { c.*m = v; }, [m](const RunConfig& c) { return c.*m; }};
}

Key reals(std::string s, std::string n, std::vector<double> RunConfig::*m) {
  return {s, n,
          [m](RunConfig& c, const std::string& v) {
            std::vector<double> out;
            for (const auto& item : split_list(v)) out.push_back(to_double(item));
            c.*m = out;
          },
          [m](const RunConfig& c) { return join(c.*m, fmt); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"run", "scheme", [](RunConfig& c, const std::string& v) { c.scheme = scheme_from_string(v); },
       [](const RunConfig& c) { return to_string(c.scheme); }},
      real("run", "T", &RunConfig::T),
      real("run", "cfl", &RunConfig::cfl),
      real("run", "eta", &RunConfig::eta),
      {"run", "seed",
       [](RunConfig& c, const std::string& v) {
         const long long i = to_integer(v);
         if (i < 0) throw std::invalid_argument("seed must be >= 0");
         c.seed = static_cast<std::uint64_t>(i);
       },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      integer("run", "samples", &RunConfig::samples),
      integer("run", "snapshots", &RunConfig::snapshots),
      {"run", "numerical_flux",
       [](RunConfig& c, const std::string& v) { c.numerical_flux = numerical_flux_from_string(v); },
       [](const RunConfig& c) { return to_string(c.numerical_flux); }},
      {"run", "remap", [](RunConfig& c, const std::string& v) { c.remap = remap_from_string(v); },
       [](const RunConfig& c) { return to_string(c.remap); }},
      integer("grid", "dim", &RunConfig::dim),
      integer("grid", "cells", &RunConfig::cells),
      real("xi", "R", &RunConfig::xi_R),
      integer("xi", "M", &RunConfig::xi_M),
      text("flux", "kind", &RunConfig::flux),
      real("flux", "speed", &RunConfig::flux_speed),
      reals("flux", "coefficients", &RunConfig::flux_coefficients),
      real("flux", "bound", &RunConfig::flux_bound),
      integer("noise", "K", &RunConfig::noise_K),
      real("noise", "decay", &RunConfig::noise_decay),
      {"noise", "mode", [](RunConfig& c, const std::string& v) { c.noise_mode = noise_mode_from_string(v); },
       [](const RunConfig& c) { return to_string(c.noise_mode); }},
      real("noise", "amplitude", &RunConfig::noise_amplitude),
      real("noise", "u_max", &RunConfig::noise_u_max),
      text("initial", "kind", &RunConfig::initial),
      real("initial", "amplitude", &RunConfig::initial_amplitude),
      real("initial", "offset", &RunConfig::initial_offset),
      integer("initial", "frequency", &RunConfig::initial_frequency),
      real("tolerance", "tol_f", &RunConfig::tol_f),
      real("tolerance", "tol_m", &RunConfig::tol_m),
      real("tolerance", "linfty_factor", &RunConfig::linfty_factor),
      real("tolerance", "mass_floor", &RunConfig::mass_floor),
      real("tolerance", "residual", &RunConfig::residual),
      {"converge", "ladder",
       [](RunConfig& c, const std::string& v) {
         std::vector<int> out;
         for (const auto& item : split_list(v)) out.push_back(static_cast<int>(to_integer(item)));
         c.ladder = out;
       },
       [](const RunConfig& c) { return join(c.ladder, [](int i) { return std::to_string(i); }); }},
      real("converge", "p", &RunConfig::p),
      integer("converge", "max_inversions", &RunConfig::max_inversions),
      real("converge", "pass_fraction", &RunConfig::pass_fraction),
      real("converge", "min_rate", &RunConfig::min_rate),
      {"verify", "tests", [](RunConfig& c, const std::string& v) { c.tests = split_list(v); },
       [](const RunConfig& c) { return join(c.tests, [](const std::string& s) { return s; }); }},
      reals("verify", "tail_radii", &RunConfig::tail_radii),
      reals("verify", "moments", &RunConfig::moments),
      real("verify", "contraction_shift", &RunConfig::contraction_shift),
      real("verify", "martingale_drift", &RunConfig::martingale_drift),
  };
  return table;
}

const std::set<std::string> kRequired{"run.scheme"};
const std::set<std::string> kTests{"mass", "residual", "martingale", "contraction", "linfty", "tightness", "moments"};

}  // namespace

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> e;
  auto need = [&e](bool ok, const std::string& msg) {
    if (!ok) e.push_back(msg);
  };
  need(c.T > 0 && std::isfinite(c.T), "T must be > 0");
  need(c.cfl > 0 && c.cfl < 1, "cfl must lie in (0,1)");
  if (c.scheme != SchemeKind::fv) need(c.eta > 0 && std::isfinite(c.eta), "eta must be > 0");
  need(c.samples >= 1, "samples must be >= 1");
  need(c.snapshots >= 1, "snapshots must be >= 1");
  need(c.dim == 1 || c.dim == 2, "grid dim must be 1 or 2");
  need(c.cells >= 2, "grid cells must be >= 2");
  need(c.xi_R > 0 && std::isfinite(c.xi_R), "xi R must be > 0");
  need(c.xi_M >= 8, "xi M must be >= 8");
  need(c.flux == "burgers" || c.flux == "linear" || c.flux == "polynomial",
       "flux kind must be burgers, linear or polynomial");
  if (c.flux == "polynomial") need(!c.flux_coefficients.empty(), "flux coefficients are required for a polynomial flux");
  need(c.flux_bound > 0 && std::isfinite(c.flux_bound), "flux bound must be > 0");
  need(c.noise_K >= 1, "noise K must be >= 1");
  need(c.noise_decay > 0, "noise decay must be > 0");
  need(c.noise_amplitude >= 0 && std::isfinite(c.noise_amplitude), "noise amplitude must be >= 0");
  need(c.noise_u_max > 0, "noise u_max must be > 0");
  if (c.scheme == SchemeKind::bgk)
    need(c.noise_mode == NoiseMode::additive || c.noise_amplitude == 0,
         "bgk needs noise mode additive (or zero amplitude)");
  need(c.initial == "sine" || c.initial == "pulse" || c.initial == "constant",
       "initial kind must be sine, pulse or constant");
  need(c.initial_frequency >= 1, "initial frequency must be >= 1");
  need(c.tol_f > 0 && c.tol_m > 0, "tolerances tol_f and tol_m must be > 0");
  need(c.linfty_factor > 0, "linfty_factor must be > 0");
  need(c.mass_floor >= 0, "mass_floor must be >= 0");
  need(c.residual > 0, "residual tolerance must be > 0");
  for (std::size_t i = 0; i < c.ladder.size(); ++i) {
    const int n = c.ladder[i];
    need(n >= 2 && (n & (n - 1)) == 0, "ladder entry " + std::to_string(n) + " is not a power of two");
    if (i > 0) need(n > c.ladder[i - 1], "ladder must increase");
  }
  need(c.p >= 1, "p must be >= 1");
  need(c.max_inversions >= 0, "max_inversions must be >= 0");
  need(c.pass_fraction > 0 && c.pass_fraction <= 1, "pass_fraction must lie in (0,1]");
  need(std::isfinite(c.min_rate), "min_rate must be finite");
  for (const auto& t : c.tests) need(kTests.count(t) > 0, "unknown verify test '" + t + "'");
  for (std::size_t i = 0; i < c.tail_radii.size(); ++i) {
    need(c.tail_radii[i] > 0, "tail radii must be > 0");
    if (i > 0) need(c.tail_radii[i] > c.tail_radii[i - 1], "tail radii must increase");
  }
  for (double m : c.moments) need(m >= 1, "moment orders must be >= 1");
  return e;
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, const Key*> index;
  for (const auto& k : keys()) index[k.section + "." + k.name] = &k;

  RunConfig cfg;
  std::vector<std::string> errors;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where + "malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected key = value");
      continue;
    }
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = index.find(key);
    if (it == index.end()) {
      errors.push_back(where + "unknown key '" + key + "'");
      continue;
    }
    if (!seen.insert(key).second) {
      errors.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    try {
      it->second->set(cfg, value);
    } catch (const std::exception& ex) {
      errors.push_back(where + key + ": " + ex.what());
    }
  }
  for (const auto& r : kRequired)
    if (!seen.count(r)) errors.push_back("missing required key '" + r + "'");
  for (auto& v : validate(cfg)) errors.push_back(std::move(v));
  if (!errors.empty()) {
    std::string msg;
    for (std::size_t i = 0; i < errors.size(); ++i) msg += (i ? "\n" : "") + errors[i];
    throw ConfigError(msg);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const RunConfig& cfg) {
  std::string out, section;
  for (const auto& k : keys()) {
    if (k.section != section) {
      out += (out.empty() ? "[" : "\n[") + k.section + "]\n";
      section = k.section;
    }
    out += k.name + " = " + k.get(cfg) + "\n";
  }
  return out;
}

FluxSpec make_flux(const RunConfig& cfg) {
  if (cfg.flux == "burgers") return FluxSpec::burgers(cfg.flux_bound);
  if (cfg.flux == "linear") return FluxSpec::linear(cfg.flux_speed, cfg.flux_bound);
  Polynomial<double>::Coefficients c(static_cast<Eigen::Index>(cfg.flux_coefficients.size()));
  for (std::size_t i = 0; i < cfg.flux_coefficients.size(); ++i) c(static_cast<Eigen::Index>(i)) = cfg.flux_coefficients[i];
  return FluxSpec(Polynomial<double>(c), cfg.flux_bound);
}

NoiseModel make_model(const RunConfig& cfg) {
  return make_noise_model(cfg.noise_K, cfg.noise_decay, cfg.noise_mode, cfg.noise_amplitude, cfg.noise_u_max, cfg.dim);
}

TorusGrid make_run_grid(const RunConfig& cfg) { return make_grid(cfg.dim, cfg.cells); }

XiGrid make_run_xigrid(const RunConfig& cfg) { return make_xigrid(cfg.xi_R, cfg.xi_M); }

SchemeOptions make_options(const RunConfig& cfg) {
  SchemeOptions o;
  o.cfl = cfg.cfl;
  o.numerical_flux = cfg.numerical_flux;
  o.tol_f = cfg.tol_f;
  o.tol_m = cfg.tol_m;
  o.tail_radii = cfg.tail_radii;
  o.remap = cfg.remap;
  return o;
}

std::function<double(const std::array<double, 2>&)> make_initial(const RunConfig& cfg) {
  const double a = cfg.initial_amplitude, b = cfg.initial_offset;
  const int k = cfg.initial_frequency;
  if (cfg.initial == "sine")
    return [=](const std::array<double, 2>& x) { return b + a * std::sin(2 * std::numbers::pi * k * x[0]); };
  if (cfg.initial == "pulse")
    return [=](const std::array<double, 2>& x) { return b + (x[0] >= 0.25 && x[0] < 0.75 ? a : 0.0); };
  return [=](const std::array<double, 2>&) { return b; };
}

}  // namespace kinscl
