#pragma once

#include "kinscl/errors.hpp"
#include "kinscl/flux.hpp"
#include "kinscl/noise.hpp"
#include "kinscl/schemes.hpp"
#include "kinscl/trajectory.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace kinscl {

/// Flat configuration: `[section]` headers, `key = value` lines, `#` comments.
/// Lists are comma separated.
struct RunConfig {
  // [run]
  SchemeKind scheme = SchemeKind::fv;
  double T = 0.5;
  double cfl = 0.4;
  double eta = 0.01;
  std::uint64_t seed = 1;
  int samples = 1;
  int snapshots = 10;
  NumericalFlux numerical_flux = NumericalFlux::godunov;
  RemapKind remap = RemapKind::sharp;
  // [grid]
  int dim = 1;
  int cells = 256;
  // [xi]
  double xi_R = 1.5;
  int xi_M = 96;
  // [flux]
  std::string flux = "burgers";  // burgers | linear | polynomial
  double flux_speed = 1.0;
  std::vector<double> flux_coefficients;
  double flux_bound = 1.0;
  // [noise]
  int noise_K = 4;
  double noise_decay = 1.0;
  NoiseMode noise_mode = NoiseMode::compact_support;
  double noise_amplitude = 1.0;
  double noise_u_max = 2.0;
  // [initial]
  std::string initial = "sine";  // sine | pulse | constant
  double initial_amplitude = 1.0;
  double initial_offset = 0.0;
  int initial_frequency = 1;
  // [tolerance]
  double tol_f = 1e-10;
  double tol_m = 1e-10;
  double linfty_factor = 3.0;
  double mass_floor = 1e-8;
  double residual = 0.05;
  // [converge]
  std::vector<int> ladder;
  double p = 1.0;
  int max_inversions = 1;
  double pass_fraction = 0.95;
  double min_rate = 0.5;
  // [verify]
  std::vector<std::string> tests{"mass", "residual", "martingale", "contraction", "linfty", "tightness", "moments"};
  std::vector<double> tail_radii{0.5, 1.0, 1.5};
  std::vector<double> moments{1.0, 2.0, 4.0};
  double contraction_shift = 0.1;
  double martingale_drift = 1.0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses and validates; throws ConfigError listing every problem found.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every violated precondition of a parsed config.
std::vector<std::string> validate(const RunConfig& cfg);

/// Canonical text form; parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& cfg);

FluxSpec make_flux(const RunConfig& cfg);
NoiseModel make_model(const RunConfig& cfg);
TorusGrid make_run_grid(const RunConfig& cfg);
XiGrid make_run_xigrid(const RunConfig& cfg);
SchemeOptions make_options(const RunConfig& cfg);
/// Initial datum as a function of the cell center.
std::function<double(const std::array<double, 2>&)> make_initial(const RunConfig& cfg);

}  // namespace kinscl
