#pragma once

#include <array>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcurve/control.hpp"
#include "gcurve/errors.hpp"
#include "gcurve/model.hpp"
#include "gcurve/periodic.hpp"
#include "gcurve/radial.hpp"

namespace gcurve::analysis {

/// Snapshot values with their times, independent of the grid type.
struct Series {
  std::vector<double> times;
  std::vector<std::vector<double>> values;

  static Series from(const std::vector<Field>& fields);
  static Series from(const std::vector<RadialField>& fields);
  std::size_t size() const { return times.size(); }
};

/// Node indices of the radial grid lying in [a, b].
std::vector<std::size_t> region_nodes(const RadialGrid& grid, double a, double b);
/// Every node of a periodic grid.
std::vector<std::size_t> all_nodes(const PeriodicGrid& grid);

// ---------------------------------------------------------------------------
// Large-time behaviour

struct ConvergenceReport {
  std::vector<double> window_start;
  std::vector<double> sup_osc;  // max over region of (sup_t u - inf_t u) on each window
  bool converged = false;
  double conv_tol = 0.0;
  std::vector<double> limit_values;  // time average over the final window
};

/// Windows of length `window` tile the end of the series; at least three full
/// windows with two snapshots each are required (InsufficientHorizon).
ConvergenceReport convergence_study(const Series& series, std::span<const std::size_t> region,
                                    double window, double conv_tol);

struct MonotonicityReport {
  bool ok = true;
  double worst_increase = 0.0;  // largest u(t2) - u(t1) seen on an Aubry node
  double worst_excess = 0.0;    // largest increase beyond the allowed slack (0 if none)
};

/// Non-increase on Aubry nodes between consecutive snapshots, with slack
/// slack_coeff * h * (t2 - t1).
MonotonicityReport aubry_monotonicity_check(const Series& series, const AubrySet& aubry,
                                            double h, double slack_coeff = 10.0);

// Streaming per-step monitors, fed from the solvers' step observers.

class AubryMonitor {
 public:
  AubryMonitor(std::vector<std::size_t> nodes, double h, double slack_coeff = 10.0)
      : nodes_(std::move(nodes)), h_(h), slack_coeff_(slack_coeff) {}
  void observe(std::span<const double> before, std::span<const double> after, double dt);
  const MonotonicityReport& report() const { return report_; }

 private:
  std::vector<std::size_t> nodes_;
  double h_;
  double slack_coeff_;
  MonotonicityReport report_;
};

/// Tracks max over nodes and steps of u(t+dt) - u(t) - dt f.
class CutoffSignMonitor {
 public:
  explicit CutoffSignMonitor(std::vector<double> source) : f_(std::move(source)) {}
  void observe(std::span<const double> before, std::span<const double> after, double dt);
  double worst() const { return worst_; }

 private:
  std::vector<double> f_;
  double worst_ = -kInf;
};

/// Tracks max over nodes (optionally restricted) and steps of |u(t+dt) - u(t)| / dt.
class TimeLipschitzMonitor {
 public:
  TimeLipschitzMonitor() = default;
  explicit TimeLipschitzMonitor(std::vector<std::size_t> nodes) : nodes_(std::move(nodes)) {}
  void observe(std::span<const double> before, std::span<const double> after, double dt);
  double value() const { return lip_; }
  double dt_max() const { return dt_max_; }

 private:
  std::vector<std::size_t> nodes_;
  double lip_ = 0.0;
  double dt_max_ = 0.0;
};

// ---------------------------------------------------------------------------
// Comparison

struct ComparisonReport {
  long steps = 0;
  long violations = 0;          // (node, step) pairs with u_lo > u_hi
  double min_gap = kInf;        // min over nodes and steps of u_hi - u_lo
};

/// Steps two initial data with identical time steps and counts order violations.
ComparisonReport comparison_check(const PeriodicProblem& problem, const std::vector<double>& g_lo,
                                  const std::vector<double>& g_hi,
                                  const periodic::CurvatureParams& params, double T);
ComparisonReport comparison_check(const RadialProblem& problem, const std::vector<double>& G_lo,
                                  const std::vector<double>& G_hi, double T,
                                  const radial::RadialParams& params = {});

/// Ordered initial data advanced alongside an externally driven base run: feed
/// it the base solution after every step and the step length used. Consecutive
/// members (base included at `base_index`) are checked for order.
class ComparisonChain {
 public:
  using Advance = std::function<void(const std::vector<double>&, std::vector<double>&, double)>;
  ComparisonChain(Advance advance, std::vector<std::vector<double>> members,
                  std::size_t base_index);
  void observe(std::span<const double> base_after, double dt);
  const ComparisonReport& report() const { return report_; }
  std::size_t pairs() const { return members_.size() - 1; }

 private:
  void tally(std::span<const double> base);

  Advance advance_;
  std::vector<std::vector<double>> members_;
  std::vector<double> scratch_;
  std::size_t base_;
  ComparisonReport report_;
};

// ---------------------------------------------------------------------------
// Regularity barriers

struct BarrierReport {
  double C0 = 0.0;
  double C1 = 0.0;
  double shift_norm = 0.0;
  double worst_excess = 0.0;  // max(0, |u(x,t) - u(x-y,t)| - (C0 t + C1)|y|)
};

/// Space barrier for wind-free periodic problems. `shift` is in whole cells per
/// axis; C0 and C1 default to the problem's discrete Lipschitz constants.
BarrierReport barrier_sandwich_periodic(const PeriodicProblem& problem,
                                        const std::array<int, 3>& shift,
                                        const std::vector<Field>& series, double C0 = -1.0,
                                        double C1 = -1.0);

struct TimeBarrierReport {
  double C_init = 0.0;
  double bound = 0.0;             // ||f|| + C_init
  double worst_ratio = 0.0;       // max over t > 0 of max_x |u - g| / t
  double ratio_excess = 0.0;      // max(0, worst_ratio - bound)
  double shift_excess = 0.0;      // max(0, sup|u(t+s) - u(t)| - sup|u(s) - u(0)|)
};

/// C_init = 1.01 max_x of the discrete cutoff operator applied to g.
double initial_nonlinearity_bound(const PeriodicProblem& problem,
                                  const periodic::CurvatureParams& params);

/// Time barriers for wind-free periodic problems. The series must be uniformly
/// spaced in time for the shifted comparison.
TimeBarrierReport time_barrier_check(const PeriodicProblem& problem,
                                     const std::vector<Field>& series,
                                     const periodic::CurvatureParams& params);

struct LipschitzReport {
  double time_lip = 0.0;
  double time_bound = 0.0;  // ||F||
  std::map<double, double> space_lip_by_alpha;
  std::map<double, double> space_bound_by_alpha;  // ||F|| / (1 - (n-1)/alpha)
};

/// Space constants from the snapshot series; the time constant is supplied by a
/// TimeLipschitzMonitor (per-step quotient) when given, else from snapshots.
LipschitzReport lipschitz_radial(const RadialProblem& problem,
                                 const std::vector<RadialField>& series,
                                 std::span<const double> alphas, double time_lip = -1.0);

struct UniquenessReport {
  double gap_aubry = 0.0;
  double gap_global = 0.0;
  double kappa = 10.0;
  double conv_tol = 0.0;
  bool ok = false;
  std::vector<double> window_start;
  std::vector<double> gap_aubry_by_window;
  std::vector<double> gap_global_by_window;
  std::vector<bool> flagged;  // Aubry gap settled while the global gap has not
};

UniquenessReport uniqueness_set_check(const Series& series, const AubrySet& aubry,
                                      std::span<const std::size_t> region, double window,
                                      double conv_tol, double kappa = 10.0);

/// max |u(r) - V(r)| over eval nodes with r in [a, b]; u is interpolated.
double profile_gap(const RadialField& u, const control::LimitProfile& profile, double a,
                   double b);

// ---------------------------------------------------------------------------
// Reports

struct CheckResult {
  std::string name;
  std::string anchor;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

nlohmann::json to_json(const CheckResult& c);
nlohmann::json to_json(const std::vector<CheckResult>& checks);
/// Aligned-column human summary, one line per check.
std::string to_text(const std::vector<CheckResult>& checks);

}  // namespace gcurve::analysis
