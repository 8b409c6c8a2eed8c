#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gcurve/analysis.hpp"
#include "gcurve/config.hpp"
#include "gcurve/errors.hpp"

namespace gcurve {

struct RunOptions {
  std::optional<Mode> mode;                // overrides the config's mode
  std::optional<std::string> output_dir;   // overrides the config's output_dir
  bool quiet = false;
  std::string config_text;                 // stored next to the manifest and hashed
};

struct RunOutcome {
  int exit_code = 0;
  std::string message;
  std::vector<std::string> artifacts;  // paths relative to the output directory
};

/// 0 ok, 2 configuration or model assumptions, 3 numerical failure,
/// 4 verification failure (not an ErrorKind), 1 I/O.
int exit_code_for(ErrorKind kind);

periodic::CurvatureParams curvature_params(const RunConfig& config);
radial::RadialParams radial_params(const RunConfig& config);

/// Auxiliary DP grid and step from numerics.dp with the PDE grid as fallback.
RadialGrid dp_grid(const RunConfig& config, const RadialProblem& problem);
double dp_step(const RunConfig& config, const RadialGrid& grid);

/// Every applicable analysis check for the configured problem. Progress lines
/// go to `log` when it is non-null.
std::vector<analysis::CheckResult> verify_suite(const RunConfig& config, std::ostream* log);

/// Dispatches on the mode, writes artifacts and a manifest, and maps errors to
/// exit codes instead of throwing them.
RunOutcome run(const RunConfig& config, const RunOptions& options);

}  // namespace gcurve
