#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace kinscl {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kRngId = "philox4x32-10/box-muller/quantum-2^-40";

enum class Command { run, converge, verify, noise };

struct CliOptions {
  Command command = Command::run;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::string out = "kinscl-out";
  int jobs = 0;  // 0: KINSCL_JOBS, else 1
};

/// Exit status: 0 all checks pass, 1 a check or run invariant failed, 2 configuration or IO error.
int dispatch(const CliOptions& opt, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches.
int run_cli(int argc, char** argv);

}  // namespace kinscl
