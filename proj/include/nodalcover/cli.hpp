#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "nodalcover/io.hpp"

namespace nodalcover {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitBoundViolated = 1, kExitUsage = 2, kExitAmbiguous = 3 };

struct RunConfig {
  int m = 6;
  double tol = 1e-10;
  std::uint64_t seed = 7;
  int max_iterations = 3000;
  double margin = 1e-8;
  double cluster_relative = 1e-7;
  double cluster_floor = 1e-10;
  double zero_eps = 1e-8;
  int max_index = 0;  // 0 keeps the per-presentation default
  int degree_cap = 24;
  std::string kind = "graph";
};

io::Json to_json(const RunConfig& cfg);
/// Overrides fields present in `j` (same layout as to_json); throws kInvalidParams.
void apply_config(RunConfig& cfg, const io::Json& j);
void validate(const RunConfig& cfg);

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnv = "NODALCOVER_CONFIG";

/// Runs one command line (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nodalcover
