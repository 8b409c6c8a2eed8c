#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gcurve/model.hpp"

namespace gcurve {

enum class Mode { Periodic, Radial, Value, Limit, Verify, Study };
enum class ProblemKind { Periodic, Radial };

std::string_view to_string(Mode mode);
/// Throws ValidationError for an unknown mode name.
Mode parse_mode(std::string_view name);

/// Auxiliary space-time grid for the dynamic-programming engine. Unset fields
/// fall back to the PDE grid and horizon.
struct DpGrid {
  std::optional<double> r_min;
  std::optional<double> r_max;
  std::optional<int> grid_n;
  std::optional<double> dt;
  std::optional<double> t_max;
};

struct Numerics {
  double t_max = 0.0;
  std::optional<double> snapshot_every;  // default t_max / 100
  std::optional<double> dt;              // PDE step override (must respect the CFL bound)
  double eps_reg = 0.0;                  // <= 0: h
  std::optional<double> cfl_safety;      // per-solver default when unset
  int velocity_samples = 33;
  double cone_tol = 1e-9;
  double conv_tol = 1e-3;
  double limit_tol = 1e-3;
  std::vector<double> alphas;            // default {1.25, 1.5, 2} (n-1)
  std::optional<double> window;          // default 20% of t_max
  std::optional<std::pair<double, double>> region;
  double kappa = 10.0;
  DpGrid dp;

  double snapshot_interval() const { return snapshot_every.value_or(t_max / 100.0); }
  double window_length() const { return window.value_or(0.2 * t_max); }
};

struct RunConfig {
  Mode mode = Mode::Radial;
  ProblemKind kind = ProblemKind::Radial;
  PeriodicConfig periodic;
  RadialConfig radial;
  Numerics numerics;
  std::string output_dir = "gcurve_out";
  std::string name;  // optional label carried into reports
};

/// Parses and validates a JSON configuration, filling defaults.
/// Malformed JSON throws ParseError naming line and column; a semantic problem
/// throws ValidationError whose message starts with the offending field path.
RunConfig parse_config(std::string_view text);

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace gcurve
