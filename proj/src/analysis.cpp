#include "gcurve/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gcurve/errors.hpp"

namespace gcurve::analysis {

Series Series::from(const std::vector<Field>& fields) {
  Series s;
  for (const auto& f : fields) {
    s.times.push_back(f.time);
    s.values.push_back(f.values);
  }
  return s;
}

Series Series::from(const std::vector<RadialField>& fields) {
  Series s;
  for (const auto& f : fields) {
    s.times.push_back(f.time);
    s.values.push_back(f.values);
  }
  return s;
}

std::vector<std::size_t> region_nodes(const RadialGrid& grid, double a, double b) {
  std::vector<std::size_t> out;
  const double tol = 1e-9 * grid.h;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.r(i);
    if (r >= a - tol && r <= b + tol) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> all_nodes(const PeriodicGrid& grid) {
  std::vector<std::size_t> out(grid.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = k;
  return out;
}

namespace {

struct Window {
  double start = 0.0;
  std::vector<std::size_t> members;  // snapshot indices with time in the closed window
};

// Windows of length `window` laid back from the last snapshot time.
std::vector<Window> tile_windows(const Series& series, double window) {
  if (!(window > 0.0)) throw Error(ErrorKind::ValidationError, "window must be > 0");
  if (series.size() < 2) {
    throw Error(ErrorKind::InsufficientHorizon, "series needs at least two snapshots");
  }
  const double t_first = series.times.front();
  const double t_last = series.times.back();
  const auto count = static_cast<std::size_t>(std::floor((t_last - t_first) / window + 1e-9));
  if (count < 3) {
    throw Error(ErrorKind::InsufficientHorizon,
                "series spans " + std::to_string(t_last - t_first) + ", fewer than three windows of " +
                    std::to_string(window));
  }
  const double tol = 1e-9 * window;
  std::vector<Window> out(count);
  for (std::size_t w = 0; w < count; ++w) {
    const double b = t_last - static_cast<double>(count - 1 - w) * window;
    const double a = b - window;
    out[w].start = a;
    for (std::size_t k = 0; k < series.size(); ++k) {
      if (series.times[k] >= a - tol && series.times[k] <= b + tol) out[w].members.push_back(k);
    }
    if (out[w].members.size() < 2) {
      throw Error(ErrorKind::InsufficientHorizon,
                  "window starting at " + std::to_string(a) + " holds fewer than two snapshots");
    }
  }
  return out;
}

double window_oscillation(const Series& series, const Window& w,
                          std::span<const std::size_t> nodes) {
  double worst = 0.0;
  for (std::size_t node : nodes) {
    double lo = kInf, hi = -kInf;
    for (std::size_t k : w.members) {
      const double v = series.values[k][node];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void require_no_wind(const PeriodicProblem& problem) {
  if (!problem.wind_zero()) {
    throw Error(ErrorKind::WindNotZero, "the barrier checks need W = 0");
  }
}

}  // namespace

ConvergenceReport convergence_study(const Series& series, std::span<const std::size_t> region,
                                    double window, double conv_tol) {
  if (!(conv_tol > 0.0)) throw Error(ErrorKind::ValidationError, "conv_tol must be > 0");
  const auto windows = tile_windows(series, window);
  ConvergenceReport rep;
  rep.conv_tol = conv_tol;
  for (const auto& w : windows) {
    rep.window_start.push_back(w.start);
    rep.sup_osc.push_back(window_oscillation(series, w, region));
  }
  rep.converged = rep.sup_osc.back() <= conv_tol;

  const auto& last = windows.back().members;
  const std::size_t m = series.values.front().size();
  rep.limit_values.assign(m, 0.0);
  for (std::size_t k : last) {
    for (std::size_t i = 0; i < m; ++i) rep.limit_values[i] += series.values[k][i];
  }
  for (auto& v : rep.limit_values) v /= static_cast<double>(last.size());
  return rep;
}

MonotonicityReport aubry_monotonicity_check(const Series& series, const AubrySet& aubry, double h,
                                            double slack_coeff) {
  AubryMonitor mon(aubry.nodes, h, slack_coeff);
  for (std::size_t k = 1; k < series.size(); ++k) {
    mon.observe(series.values[k - 1], series.values[k], series.times[k] - series.times[k - 1]);
  }
  return mon.report();
}

void AubryMonitor::observe(std::span<const double> before, std::span<const double> after,
                           double dt) {
  const double slack = slack_coeff_ * h_ * dt;
  for (std::size_t k : nodes_) {
    const double inc = after[k] - before[k];
    report_.worst_increase = std::max(report_.worst_increase, inc);
    if (inc > slack) {
      report_.ok = false;
      report_.worst_excess = std::max(report_.worst_excess, inc - slack);
    }
  }
}

void CutoffSignMonitor::observe(std::span<const double> before, std::span<const double> after,
                                double dt) {
  for (std::size_t k = 0; k < f_.size(); ++k) {
    worst_ = std::max(worst_, after[k] - before[k] - dt * f_[k]);
  }
}

void TimeLipschitzMonitor::observe(std::span<const double> before, std::span<const double> after,
                                   double dt) {
  dt_max_ = std::max(dt_max_, dt);
  if (nodes_.empty()) {
    for (std::size_t k = 0; k < before.size(); ++k) {
      lip_ = std::max(lip_, std::abs(after[k] - before[k]) / dt);
    }
  } else {
    for (std::size_t k : nodes_) lip_ = std::max(lip_, std::abs(after[k] - before[k]) / dt);
  }
}

namespace {

template <class Advance>
ComparisonReport lockstep(const std::vector<double>& lo0, const std::vector<double>& hi0,
                          double dt_nominal, double T, Advance&& advance) {
  if (lo0.size() != hi0.size()) {
    throw Error(ErrorKind::ValidationError, "comparison pair sizes differ");
  }
  if (!(T > 0.0)) throw Error(ErrorKind::DomainError, "horizon T must be > 0");
  ComparisonReport rep;
  auto tally = [&rep](const std::vector<double>& lo, const std::vector<double>& hi) {
    for (std::size_t i = 0; i < lo.size(); ++i) {
      const double gap = hi[i] - lo[i];
      rep.min_gap = std::min(rep.min_gap, gap);
      if (gap < 0.0) ++rep.violations;
    }
  };
  std::vector<double> lo = lo0, hi = hi0, lo_next(lo.size()), hi_next(hi.size());
  tally(lo, hi);
  double t = 0.0;
  while (t < T) {
    double dt = dt_nominal;
    if (t + dt >= T - 1e-12 * std::max(1.0, T)) dt = T - t;
    advance(lo, lo_next, dt);
    advance(hi, hi_next, dt);
    std::swap(lo, lo_next);
    std::swap(hi, hi_next);
    t = (dt == T - t) ? T : t + dt;
    ++rep.steps;
    tally(lo, hi);
  }
  return rep;
}

}  // namespace

ComparisonReport comparison_check(const PeriodicProblem& problem, const std::vector<double>& g_lo,
                                  const std::vector<double>& g_hi,
                                  const periodic::CurvatureParams& params, double T) {
  const periodic::Stepper stepper(problem, params);
  return lockstep(g_lo, g_hi, stepper.dt_limit(), T,
                  [&](const std::vector<double>& u, std::vector<double>& out, double dt) {
                    stepper.advance(u, out, dt);
                  });
}

ComparisonReport comparison_check(const RadialProblem& problem, const std::vector<double>& G_lo,
                                  const std::vector<double>& G_hi, double T,
                                  const radial::RadialParams& params) {
  const radial::Stepper stepper(problem, params);
  return lockstep(G_lo, G_hi, stepper.dt_limit(), T,
                  [&](const std::vector<double>& u, std::vector<double>& out, double dt) {
                    stepper.advance(u, out, dt);
                  });
}

ComparisonChain::ComparisonChain(Advance advance, std::vector<std::vector<double>> members,
                                 std::size_t base_index)
    : advance_(std::move(advance)), members_(std::move(members)), base_(base_index) {
  if (members_.size() < 2 || base_ >= members_.size()) {
    throw Error(ErrorKind::ValidationError, "comparison chain needs two members and a base");
  }
  for (const auto& m : members_) {
    if (m.size() != members_[0].size()) {
      throw Error(ErrorKind::ValidationError, "comparison chain member sizes differ");
    }
  }
  scratch_.resize(members_[0].size());
  tally(members_[base_]);
}

void ComparisonChain::observe(std::span<const double> base_after, double dt) {
  for (std::size_t m = 0; m < members_.size(); ++m) {
    if (m == base_) continue;
    advance_(members_[m], scratch_, dt);
    std::swap(members_[m], scratch_);
  }
  ++report_.steps;
  tally(base_after);
}

void ComparisonChain::tally(std::span<const double> base) {
  auto at = [&](std::size_t m) -> std::span<const double> {
    return m == base_ ? base : std::span<const double>(members_[m]);
  };
  for (std::size_t m = 0; m + 1 < members_.size(); ++m) {
    const auto lo = at(m), hi = at(m + 1);
    for (std::size_t i = 0; i < lo.size(); ++i) {
      const double gap = hi[i] - lo[i];
      report_.min_gap = std::min(report_.min_gap, gap);
      if (gap < 0.0) ++report_.violations;
    }
  }
}

BarrierReport barrier_sandwich_periodic(const PeriodicProblem& problem,
                                        const std::array<int, 3>& shift,
                                        const std::vector<Field>& series, double C0, double C1) {
  require_no_wind(problem);
  const auto& grid = problem.grid;
  BarrierReport rep;
  rep.C0 = C0 >= 0.0 ? C0 : problem.lip_f;
  rep.C1 = C1 >= 0.0 ? C1 : problem.lip_g;
  // Torus distance of the shift: each component taken in (-N/2, N/2].
  double y2 = 0.0;
  for (int a = 0; a < grid.dim; ++a) {
    int s = shift[static_cast<std::size_t>(a)] % grid.N;
    if (s > grid.N / 2) s -= grid.N;
    if (s <= -grid.N / 2) s += grid.N;
    y2 += static_cast<double>(s) * s;
  }
  rep.shift_norm = std::sqrt(y2) * grid.h;

  std::vector<std::size_t> partner(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::size_t j = k;
    for (int a = 0; a < grid.dim; ++a) j = grid.shifted(j, a, -shift[static_cast<std::size_t>(a)]);
    partner[k] = j;
  }
  for (const auto& f : series) {
    const double allowed = (rep.C0 * f.time + rep.C1) * rep.shift_norm;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double d = std::abs(f.values[k] - f.values[partner[k]]);
      rep.worst_excess = std::max(rep.worst_excess, d - allowed);
    }
  }
  return rep;
}

double initial_nonlinearity_bound(const PeriodicProblem& problem,
                                  const periodic::CurvatureParams& params) {
  const Field g{problem.grid, problem.g, 0.0};
  double m = 0.0;
  for (std::size_t k = 0; k < g.values.size(); ++k) {
    m = std::max(m, periodic::curvature_cutoff(g, k, params));
  }
  return 1.01 * m;
}

TimeBarrierReport time_barrier_check(const PeriodicProblem& problem,
                                     const std::vector<Field>& series,
                                     const periodic::CurvatureParams& params) {
  require_no_wind(problem);
  TimeBarrierReport rep;
  rep.C_init = initial_nonlinearity_bound(problem, params);
  rep.bound = std::max(0.0, problem.max_f()) + rep.C_init;
  if (series.empty()) return rep;
  const auto& u0 = series.front();
  for (const auto& f : series) {
    const double t = f.time - u0.time;
    if (t <= 0.0) continue;
    rep.worst_ratio = std::max(rep.worst_ratio, max_abs_diff(f.values, u0.values) / t);
  }
  rep.ratio_excess = std::max(0.0, rep.worst_ratio - rep.bound);

  if (series.size() >= 3) {
    const double s = series[1].time - series[0].time;
    const double base = max_abs_diff(series[1].values, series[0].values);
    for (std::size_t k = 2; k < series.size(); ++k) {
      const double ds = series[k].time - series[k - 1].time;
      if (std::abs(ds - s) > 1e-9 * s) continue;  // a shortened final interval
      const double d = max_abs_diff(series[k].values, series[k - 1].values);
      rep.shift_excess = std::max(rep.shift_excess, d - base);
    }
  }
  return rep;
}

LipschitzReport lipschitz_radial(const RadialProblem& problem,
                                 const std::vector<RadialField>& series,
                                 std::span<const double> alphas, double time_lip) {
  LipschitzReport rep;
  const double normF = problem.max_F();
  const double m = problem.interface();
  rep.time_bound = normF;
  if (time_lip >= 0.0) {
    rep.time_lip = time_lip;
  } else {
    for (std::size_t k = 1; k < series.size(); ++k) {
      const double dt = series[k].time - series[k - 1].time;
      if (dt > 0.0) {
        rep.time_lip =
            std::max(rep.time_lip, max_abs_diff(series[k].values, series[k - 1].values) / dt);
      }
    }
  }
  for (double alpha : alphas) {
    if (alpha < 1.25 * m * (1.0 - 1e-12) || !(alpha > m)) {
      throw Error(ErrorKind::ValidationError,
                  "alpha = " + std::to_string(alpha) + " is below 1.25 (n-1)");
    }
    double lip = 0.0;
    for (const auto& f : series) {
      const auto& g = f.grid;
      for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        if (g.r(i) <= alpha) continue;
        lip = std::max(lip, std::abs(f.values[i + 1] - f.values[i]) / g.h);
      }
    }
    rep.space_lip_by_alpha[alpha] = lip;
    rep.space_bound_by_alpha[alpha] = normF / (1.0 - m / alpha);
  }
  return rep;
}

UniquenessReport uniqueness_set_check(const Series& series, const AubrySet& aubry,
                                      std::span<const std::size_t> region, double window,
                                      double conv_tol, double kappa) {
  if (aubry.empty()) throw Error(ErrorKind::EmptyAubry, "uniqueness check needs Aubry nodes");
  const auto windows = tile_windows(series, window);
  UniquenessReport rep;
  rep.kappa = kappa;
  rep.conv_tol = conv_tol;
  for (const auto& w : windows) {
    const double ga = window_oscillation(series, w, aubry.nodes);
    const double gg = window_oscillation(series, w, region);
    rep.window_start.push_back(w.start);
    rep.gap_aubry_by_window.push_back(ga);
    rep.gap_global_by_window.push_back(gg);
    rep.flagged.push_back(ga <= conv_tol && gg > kappa * ga + conv_tol);
  }
  rep.gap_aubry = rep.gap_aubry_by_window.back();
  rep.gap_global = rep.gap_global_by_window.back();
  rep.ok = rep.gap_global <= kappa * rep.gap_aubry + conv_tol;
  return rep;
}

double profile_gap(const RadialField& u, const control::LimitProfile& profile, double a,
                   double b) {
  double worst = 0.0;
  const double tol = 1e-9 * profile.grid.h;
  for (std::size_t i = 0; i < profile.grid.size(); ++i) {
    const double r = profile.grid.r(i);
    if (r < a - tol || r > b + tol || is_inf(profile.V[i])) continue;
    worst = std::max(worst, std::abs(u.at(r) - profile.V[i]));
  }
  return worst;
}

nlohmann::json to_json(const CheckResult& c) {
  return {{"name", c.name},   {"anchor", c.anchor},       {"pass", c.pass},
          {"value", c.value}, {"threshold", c.threshold}, {"detail", c.detail}};
}

nlohmann::json to_json(const std::vector<CheckResult>& checks) {
  auto arr = nlohmann::json::array();
  bool all = true;
  for (const auto& c : checks) {
    arr.push_back(to_json(c));
    all = all && c.pass;
  }
  return {{"checks", arr}, {"all_pass", all}};
}

std::string to_text(const std::vector<CheckResult>& checks) {
  std::size_t w_name = 5, w_anchor = 6;
  for (const auto& c : checks) {
    w_name = std::max(w_name, c.name.size());
    w_anchor = std::max(w_anchor, c.anchor.size());
  }
  std::ostringstream os;
  char buf[64];
  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
  os << pad("check", w_name) << "  " << pad("anchor", w_anchor) << "  result  "
     << "       value   threshold\n";
  for (const auto& c : checks) {
    std::snprintf(buf, sizeof buf, "%12.4e%12.4e", c.value, c.threshold);
    os << pad(c.name, w_name) << "  " << pad(c.anchor, w_anchor) << "  "
       << (c.pass ? "PASS  " : "FAIL  ") << buf;
    if (!c.detail.empty()) os << "  " << c.detail;
    os << '\n';
  }
  return os.str();
}

}  // namespace gcurve::analysis
