#include "gcurve/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <boost/version.hpp>
#include <json.hpp>

#include "gcurve/control.hpp"
#include "gcurve/periodic.hpp"
#include "gcurve/radial.hpp"

#ifndef GCURVE_VERSION
#define GCURVE_VERSION "dev"
#endif

namespace gcurve {

namespace fs = std::filesystem;
using json = nlohmann::json;
using analysis::CheckResult;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CFLViolation:
    case ErrorKind::Diverged:
    case ErrorKind::GridTooCoarse:
    case ErrorKind::NotStabilized:
    case ErrorKind::InsufficientHorizon:
      return 3;
    case ErrorKind::IoError:
      return 1;
    default:
      return 2;
  }
}

periodic::CurvatureParams curvature_params(const RunConfig& config) {
  periodic::CurvatureParams p;
  p.eps_reg = config.numerics.eps_reg;
  if (config.numerics.cfl_safety) p.cfl_safety = *config.numerics.cfl_safety;
  return p;
}

radial::RadialParams radial_params(const RunConfig& config) {
  radial::RadialParams p;
  if (config.numerics.cfl_safety) p.cfl_safety = *config.numerics.cfl_safety;
  return p;
}

RadialGrid dp_grid(const RunConfig& config, const RadialProblem& problem) {
  const auto& d = config.numerics.dp;
  const double lo = d.r_min.value_or(problem.grid.r_min);
  const double hi = d.r_max.value_or(problem.grid.r_max);
  if (!(hi > lo)) {
    throw Error(ErrorKind::ValidationError, "numerics.dp.r_max: must exceed numerics.dp.r_min");
  }
  return RadialGrid(lo, hi, d.grid_n.value_or(problem.grid.n_nodes));
}

double dp_step(const RunConfig& config, const RadialGrid& grid) {
  return config.numerics.dp.dt.value_or(0.4 * grid.h);
}

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CheckResult check_le(std::string name, std::string anchor, double value, double threshold,
                     std::string detail = {}) {
  return {std::move(name), std::move(anchor), value <= threshold, value, threshold,
          std::move(detail)};
}

void say(std::ostream* log, const std::string& s) {
  if (log) *log << s << std::endl;
}

// Wraps a check whose computation may legitimately fail numerically; the error
// becomes a failed check rather than aborting the suite.
template <class Fn>
void guarded(std::vector<CheckResult>& out, const std::string& name, const std::string& anchor,
             Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    out.push_back({name, anchor, false, 0.0, 0.0, e.what()});
  }
}

std::vector<double> periodic_field(const PeriodicGrid& grid,
                                   const std::function<double(const std::array<double, 3>&)>& fn) {
  std::vector<double> v(grid.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(grid.coords(k));
  return v;
}

std::vector<double> radial_field(const RadialGrid& grid, const std::function<double(double)>& fn) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid.r(i));
  return v;
}

constexpr double kTwoPi = 6.283185307179586;

// Strictly ordered initial data g - bump < g < g + wave < g + c, stepped in
// lockstep with the base run (index 1). Gaps stay positive because the central
// curvature stencil is not monotone in the mixed-derivative neighbours.
struct Chain {
  std::vector<std::vector<double>> members;
  std::size_t base = 1;
};

Chain ordered_chain(const std::vector<double>& g, const std::vector<double>& bump,
                    const std::vector<double>& wave, double c) {
  Chain ch;
  ch.members.assign(4, g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    ch.members[0][k] -= bump[k];
    ch.members[2][k] += wave[k];
    ch.members[3][k] += c;
  }
  return ch;
}

Chain periodic_chain(const PeriodicProblem& p) {
  const auto bump = periodic_field(p.grid, [](const auto& x) {
    return 0.1 + 0.1 * (1.0 + std::cos(kTwoPi * x[0]));
  });
  const auto wave = periodic_field(p.grid, [](const auto& x) {
    const double s = std::sin(kTwoPi * x[1]);
    return 0.05 + 0.05 * s * s;
  });
  return ordered_chain(p.g, bump, wave, 0.2);
}

Chain radial_chain(const RadialProblem& p) {
  const double mid = 0.5 * (p.grid.r_min + p.grid.r_max);
  const auto bump = radial_field(p.grid, [mid](double r) {
    return 0.1 + 0.5 * std::exp(-(r - mid) * (r - mid));
  });
  const auto wave = radial_field(p.grid, [](double r) { return 0.1 + 0.1 * (1.0 + std::sin(r)); });
  return ordered_chain(p.sample_G(p.grid), bump, wave, 0.5);
}

std::pair<double, double> radial_region(const RunConfig& config, const RadialProblem& p) {
  if (config.numerics.region) return *config.numerics.region;
  const double L = p.grid.r_max - p.grid.r_min;
  return {p.grid.r_min + 0.1 * L, p.grid.r_max - 0.2 * L};
}

std::vector<double> radial_alphas(const RunConfig& config, const RadialProblem& p) {
  if (!config.numerics.alphas.empty()) return config.numerics.alphas;
  const double m = p.interface();
  if (m <= 0.0) return {};
  std::vector<double> out;
  for (double a : {1.25 * m, 1.5 * m, 2.0 * m}) {
    if (a < p.grid.r_max) out.push_back(a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verification suites

std::vector<CheckResult> verify_periodic(const RunConfig& config, std::ostream* log) {
  const auto& nm = config.numerics;
  const auto p = build_periodic(config.periodic);
  const auto prm = curvature_params(config);
  const double h = p.grid.h;
  const double eps = prm.eps(p.grid);
  const auto A = aubry_set(p);
  std::vector<CheckResult> out;

  analysis::AubryMonitor aubry_mon(A.nodes, h);
  analysis::CutoffSignMonitor sign_mon(p.f);
  const periodic::Stepper stepper(p, prm);
  auto chain = periodic_chain(p);
  analysis::ComparisonChain comparison(
      [&](const std::vector<double>& u, std::vector<double>& o, double dt) {
        stepper.advance(u, o, dt);
      },
      std::move(chain.members), chain.base);
  double dt_max = 0.0;
  say(log, "evolving to t = " + fmt(nm.t_max) + " with " +
               std::to_string(comparison.pairs()) + " ordered companions");
  const auto snaps = periodic::evolve(
      p, prm, nm.t_max, nm.snapshot_interval(),
      [&](const Field& a, const Field& b, double dt) {
        aubry_mon.observe(a.values, b.values, dt);
        sign_mon.observe(a.values, b.values, dt);
        comparison.observe(b.values, dt);
        dt_max = std::max(dt_max, dt);
      },
      nm.dt.value_or(0.0));

  if (!A.empty()) {
    out.push_back(check_le("aubry-monotonicity", "monotonicity on the Aubry set",
                           aubry_mon.report().worst_excess, 0.0,
                           "largest increase " + fmt(aubry_mon.report().worst_increase) + " on " +
                               std::to_string(A.nodes.size()) + " nodes, slack 10 h dt"));
  }
  out.push_back(check_le("cutoff-sign", "nonnegative cutoff operator", sign_mon.worst(), 1e-12,
                         p.wind_zero() ? "" : "wind present: the increment also carries -dt W.Du"));

  out.push_back(check_le("comparison", "comparison principle",
                         static_cast<double>(comparison.report().violations), 0.0,
                         std::to_string(comparison.pairs()) + " ordered pairs, smallest gap " +
                             fmt(comparison.report().min_gap)));

  const auto series = analysis::Series::from(snaps);
  const auto all = analysis::all_nodes(p.grid);
  if (p.ergodic) {
    guarded(out, "convergence", "large-time convergence", [&] {
      const auto rep = analysis::convergence_study(series, all, nm.window_length(), nm.conv_tol);
      out.push_back(check_le("convergence", "large-time convergence", rep.sup_osc.back(),
                             nm.conv_tol, "windowed oscillation over the torus"));
      const Field lim{p.grid, rep.limit_values, snaps.back().time};
      const auto res = periodic::ergodic_residual(lim, p, prm);
      double worst = 0.0;
      for (std::size_t k = 0; k < res.values.size(); ++k) {
        if (!A.contains(k)) worst = std::max(worst, std::abs(res.values[k]));
      }
      out.push_back(check_le("ergodic-residual", "ergodic problem", worst, 10.0 * (h + eps),
                             "off the Aubry set"));
    });
    guarded(out, "uniqueness-set", "Aubry set as uniqueness set", [&] {
      const auto rep = analysis::uniqueness_set_check(series, A, all, nm.window_length(),
                                                      nm.conv_tol, nm.kappa);
      out.push_back(check_le("uniqueness-set", "Aubry set as uniqueness set", rep.gap_global,
                             rep.kappa * rep.gap_aubry + rep.conv_tol,
                             "gap on Aubry nodes " + fmt(rep.gap_aubry)));
    });
  }

  if (p.wind_zero()) {
    double worst = 0.0;
    for (int a = 0; a < p.grid.dim; ++a) {
      std::array<int, 3> shift{0, 0, 0};
      shift[static_cast<std::size_t>(a)] = 1;
      worst = std::max(worst, analysis::barrier_sandwich_periodic(p, shift, snaps).worst_excess);
    }
    out.push_back(check_le("space-barrier", "Lipschitz bound in space", std::max(0.0, worst),
                           10.0 * h, "one-cell shifts along each axis"));
    const auto tb = analysis::time_barrier_check(p, snaps, prm);
    out.push_back(check_le("time-barrier", "Lipschitz bound in time at t = 0", tb.ratio_excess,
                           10.0 * (h + dt_max),
                           "sup|u-g|/t = " + fmt(tb.worst_ratio) + ", bound " + fmt(tb.bound)));
    out.push_back(check_le("time-shift", "time invariance", tb.shift_excess, 10.0 * (h + dt_max),
                           "one snapshot interval"));
  }
  return out;
}

std::vector<CheckResult> verify_radial(const RunConfig& config, std::ostream* log) {
  const auto& nm = config.numerics;
  const auto p = build_radial(config.radial);
  const auto prm = radial_params(config);
  const double h = p.grid.h;
  const auto A = aubry_set(p);
  std::vector<CheckResult> out;

  analysis::AubryMonitor aubry_mon(A.nodes, h);
  analysis::CutoffSignMonitor sign_mon(p.sample_F());
  analysis::TimeLipschitzMonitor lip_mon;
  const radial::Stepper stepper(p, prm);
  auto chain = radial_chain(p);
  analysis::ComparisonChain comparison(
      [&](const std::vector<double>& u, std::vector<double>& o, double dt) {
        stepper.advance(u, o, dt);
      },
      std::move(chain.members), chain.base);
  say(log, "evolving to t = " + fmt(nm.t_max) + " with " +
               std::to_string(comparison.pairs()) + " ordered companions");
  const auto snaps = radial::evolve_radial(
      p, nm.t_max, nm.snapshot_interval(),
      [&](const RadialField& a, const RadialField& b, double dt) {
        aubry_mon.observe(a.values, b.values, dt);
        sign_mon.observe(a.values, b.values, dt);
        lip_mon.observe(a.values, b.values, dt);
        comparison.observe(b.values, dt);
      },
      prm, nm.dt.value_or(0.0));
  const double dt = lip_mon.dt_max();

  if (!A.empty()) {
    out.push_back(check_le("aubry-monotonicity", "monotonicity on the Aubry set",
                           aubry_mon.report().worst_excess, 0.0,
                           "largest increase " + fmt(aubry_mon.report().worst_increase) + " on " +
                               std::to_string(A.nodes.size()) + " nodes, slack 10 h dt"));
  }
  out.push_back(check_le("cutoff-sign", "nonnegative cutoff operator", sign_mon.worst(), 1e-12));

  const auto alphas = radial_alphas(config, p);
  const auto lip = analysis::lipschitz_radial(p, snaps, alphas, lip_mon.value());
  out.push_back(check_le("time-lipschitz", "a priori time estimate", lip.time_lip,
                         lip.time_bound + 10.0 * (h + dt), "bound ||F|| = " + fmt(lip.time_bound)));
  for (double a : alphas) {
    out.push_back(check_le("space-lipschitz(alpha=" + fmt(a) + ")", "a priori space estimate",
                           lip.space_lip_by_alpha.at(a), lip.space_bound_by_alpha.at(a) + 10.0 * h,
                           "bound " + fmt(lip.space_bound_by_alpha.at(a))));
  }

  out.push_back(check_le("comparison", "comparison principle",
                         static_cast<double>(comparison.report().violations), 0.0,
                         std::to_string(comparison.pairs()) + " ordered pairs, smallest gap " +
                             fmt(comparison.report().min_gap)));

  say(log, "Legendre duality");
  {
    const auto [a, b] = radial_region(config, p);
    const auto ps = control::lattice(-50.0, 50.0, 1e-3);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double r = a + (b - a) * (i + 0.5) / 10.0;
      const auto cone = control::velocity_cone(r, p.n);
      std::vector<double> vs;
      for (int j = 1; j <= 10; ++j) vs.push_back(cone.v_min + (cone.v_max - cone.v_min) * j / 11.0);
      worst = std::max(worst, control::legendre_check(p, r, ps, vs));
    }
    out.push_back(check_le("legendre", "Legendre duality", worst, 1e-3));
  }

  if (p.ergodic) {
    const auto [a, b] = radial_region(config, p);
    const auto region = analysis::region_nodes(p.grid, a, b);
    const auto series = analysis::Series::from(snaps);
    std::vector<double> limit;
    guarded(out, "convergence", "large-time convergence", [&] {
      const auto rep = analysis::convergence_study(series, region, nm.window_length(), nm.conv_tol);
      limit = rep.limit_values;
      out.push_back(check_le("convergence", "large-time convergence", rep.sup_osc.back(),
                             nm.conv_tol, "on [" + fmt(a) + ", " + fmt(b) + "]"));
    });
    guarded(out, "uniqueness-set", "Aubry set as uniqueness set", [&] {
      const auto rep = analysis::uniqueness_set_check(series, A, region, nm.window_length(),
                                                      nm.conv_tol, nm.kappa);
      out.push_back(check_le("uniqueness-set", "Aubry set as uniqueness set", rep.gap_global,
                             rep.kappa * rep.gap_aubry + rep.conv_tol,
                             "gap on Aubry nodes " + fmt(rep.gap_aubry)));
    });
    if (!limit.empty()) {
      say(log, "limit profile");
      guarded(out, "representation-formula", "representation formula", [&] {
        const auto grid = dp_grid(config, p);
        const auto table = control::value_dp(p, nm.dp.t_max.value_or(nm.t_max), grid,
                                             dp_step(config, grid), {nm.velocity_samples});
        const auto prof = control::limit_profile(p, table, nm.limit_tol, p.grid);
        const RadialField u{p.grid, limit, nm.t_max};
        out.push_back(check_le("representation-formula", "representation formula",
                               analysis::profile_gap(u, prof, a, b), 3.0 * (h + dt),
                               "PDE limit vs limit profile on [" + fmt(a) + ", " + fmt(b) + "]"));
      });
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Artifact writers

class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + root_.string() + ": " + ec.message());
    lock_ = root_ / ".gcurve.lock";
    std::FILE* f = std::fopen(lock_.c_str(), "wx");
    if (!f) {
      throw Error(ErrorKind::IoError, "output directory " + root_.string() +
                                          " is locked by another run (" + lock_.string() + ")");
    }
    std::fclose(f);
  }
  ~OutputDir() {
    std::error_code ec;
    fs::remove(lock_, ec);
  }
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  void write(const std::string& rel, const std::string& content) {
    const fs::path p = root_ / rel;
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    std::ofstream os(p, std::ios::binary);
    os << content;
    if (!os) throw Error(ErrorKind::IoError, "cannot write " + p.string());
    written_.push_back(rel);
  }

  const std::vector<std::string>& written() const { return written_; }
  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  fs::path lock_;
  std::vector<std::string> written_;
};

std::string periodic_csv(const Field& f) {
  std::ostringstream os;
  os << "# t=" << num(f.time) << " N=" << f.grid.N << " dim=" << f.grid.dim << '\n';
  const std::size_t N = static_cast<std::size_t>(f.grid.N);
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    os << num(f.values[k]) << ((k + 1) % N == 0 ? '\n' : ',');
  }
  return os.str();
}

std::string radial_csv(const RadialField& f, int n, const char* column = "U") {
  std::ostringstream os;
  os << "# t=" << num(f.time) << " n=" << n << " r_min=" << num(f.grid.r_min)
     << " r_max=" << num(f.grid.r_max) << '\n';
  os << "# r," << column << '\n';
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    os << num(f.grid.r(i)) << ',' << num(f.values[i]) << '\n';
  }
  return os.str();
}

std::string snapshot_name(const char* stem, std::size_t k) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "snapshots/%s_%05zu.csv", stem, k);
  return buf;
}

void write_periodic(OutputDir& out, const RunConfig& config, std::ostream* log) {
  const auto& nm = config.numerics;
  const auto p = build_periodic(config.periodic);
  for (const auto& w : p.warnings) say(log, "warning: " + w);
  const auto snaps = periodic::evolve(p, curvature_params(config), nm.t_max,
                                      nm.snapshot_interval(), {}, nm.dt.value_or(0.0));
  for (std::size_t k = 0; k < snaps.size(); ++k) out.write(snapshot_name("u", k), periodic_csv(snaps[k]));
  out.write("final.csv", periodic_csv(snaps.back()));
  out.write("plot.gp",
            "set datafile separator ','\nset view map\nset size square\n"
            "set title 'u at final time'\nsplot 'final.csv' matrix with image notitle\n");
  say(log, std::to_string(snaps.size()) + " snapshots written");
}

void write_radial(OutputDir& out, const RunConfig& config, std::ostream* log) {
  const auto& nm = config.numerics;
  const auto p = build_radial(config.radial);
  for (const auto& w : p.warnings) say(log, "warning: " + w);
  const auto snaps = radial::evolve_radial(p, nm.t_max, nm.snapshot_interval(), {},
                                           radial_params(config), nm.dt.value_or(0.0));
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    out.write(snapshot_name("U", k), radial_csv(snaps[k], p.n));
  }
  std::ostringstream gp;
  gp << "set datafile separator ','\nset xlabel 'r'\nset ylabel 'U'\nset key off\n"
     << "plot for [k=0:" << snaps.size() - 1
     << "] sprintf('snapshots/U_%05d.csv', k) using 1:2 with lines\n";
  out.write("plot.gp", gp.str());
  say(log, std::to_string(snaps.size()) + " snapshots written");
}

void write_value(OutputDir& out, const RunConfig& config, std::ostream* log) {
  const auto& nm = config.numerics;
  const auto p = build_radial(config.radial);
  const auto grid = dp_grid(config, p);
  const double dt = dp_step(config, grid);
  const double t_max = nm.dp.t_max.value_or(nm.t_max);
  const auto table = control::value_dp(p, t_max, grid, dt, {nm.velocity_samples});
  // Slices at multiples of the snapshot interval.
  std::vector<std::size_t> cols;
  const double every = nm.snapshot_interval();
  for (double t = 0.0; t <= table.t_max() + 1e-9 * every; t += every) {
    const std::size_t k = table.time_index(t);
    if (cols.empty() || cols.back() != k) cols.push_back(k);
  }
  if (cols.back() != table.t_grid.size() - 1) cols.push_back(table.t_grid.size() - 1);
  std::ostringstream os;
  os << "# n=" << p.n << " r_min=" << num(grid.r_min) << " r_max=" << num(grid.r_max)
     << " h=" << num(grid.h) << " dt=" << num(dt) << '\n';
  os << "# r";
  for (auto k : cols) os << ",t=" << num(table.t_grid[k]);
  os << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << num(grid.r(i));
    for (auto k : cols) os << ',' << num(table.value(i, k));
    os << '\n';
  }
  out.write("value_table.csv", os.str());
  std::ostringstream gp;
  gp << "set datafile separator ','\nset xlabel 'r'\nset ylabel 'U'\nset key off\n"
     << "plot for [c=2:" << cols.size() + 1 << "] 'value_table.csv' using 1:c with lines\n";
  out.write("value.gp", gp.str());
  say(log, "value table " + std::to_string(grid.size()) + " x " + std::to_string(table.t_grid.size()));
}

control::LimitProfile compute_limit(const RunConfig& config, const RadialProblem& p) {
  const auto& nm = config.numerics;
  const auto grid = dp_grid(config, p);
  const auto table = control::value_dp(p, nm.dp.t_max.value_or(nm.t_max), grid,
                                       dp_step(config, grid), {nm.velocity_samples});
  return control::limit_profile(p, table, nm.limit_tol, p.grid);
}

void write_limit(OutputDir& out, const RunConfig& config, std::ostream* log) {
  const auto p = build_radial(config.radial);
  const auto prof = compute_limit(config, p);
  std::ostringstream v;
  v << "# r,V\n";
  for (std::size_t i = 0; i < prof.grid.size(); ++i) {
    v << num(prof.grid.r(i)) << ',' << (is_inf(prof.V[i]) ? std::string("inf") : num(prof.V[i]))
      << '\n';
  }
  out.write("V.csv", v.str());
  std::ostringstream g;
  g << "# s,v_G\n";
  for (std::size_t j = 0; j < prof.aubry_radii.size(); ++j) {
    g << num(prof.aubry_radii[j]) << ',' << num(prof.v_G[j]) << '\n';
  }
  out.write("v_G.csv", g.str());
  out.write("limit.gp",
            "set datafile separator ','\nset xlabel 'r'\nset ylabel 'V'\n"
            "plot 'V.csv' using 1:2 with lines title 'V', "
            "'v_G.csv' using 1:2 with points pt 7 title 'v_G'\n");
  say(log, std::to_string(prof.aubry_radii.size()) + " Aubry nodes on the DP grid");
}

int write_verify(OutputDir& out, const RunConfig& config, std::ostream* log) {
  const auto checks = verify_suite(config, log);
  auto j = analysis::to_json(checks);
  j["name"] = config.name;
  out.write("report.json", j.dump(2) + "\n");
  const auto text = analysis::to_text(checks);
  out.write("report.txt", text);
  if (log) *log << text;
  return j["all_pass"].get<bool>() ? 0 : 4;
}

void write_study(OutputDir& out, const RunConfig& config, std::ostream* log) {
  const auto& nm = config.numerics;
  json j;
  j["name"] = config.name;
  std::ostringstream conv;
  conv << "# window_start,sup_osc\n";
  auto dump_conv = [&](const analysis::ConvergenceReport& rep) {
    for (std::size_t k = 0; k < rep.sup_osc.size(); ++k) {
      conv << num(rep.window_start[k]) << ',' << num(rep.sup_osc[k]) << '\n';
    }
    j["convergence"] = {{"window_start", rep.window_start},
                        {"sup_osc", rep.sup_osc},
                        {"converged", rep.converged},
                        {"conv_tol", rep.conv_tol}};
  };
  if (config.kind == ProblemKind::Periodic) {
    const auto p = build_periodic(config.periodic);
    const auto prm = curvature_params(config);
    const auto snaps =
        periodic::evolve(p, prm, nm.t_max, nm.snapshot_interval(), {}, nm.dt.value_or(0.0));
    const auto rep = analysis::convergence_study(analysis::Series::from(snaps),
                                                 analysis::all_nodes(p.grid),
                                                 nm.window_length(), nm.conv_tol);
    dump_conv(rep);
    out.write("limit.csv", periodic_csv(Field{p.grid, rep.limit_values, nm.t_max}));
    if (p.wind_zero()) {
      const auto sb = analysis::barrier_sandwich_periodic(p, {1, 0, 0}, snaps);
      const auto tb = analysis::time_barrier_check(p, snaps, prm);
      j["barriers"] = {{"C0", sb.C0},
                       {"C1", sb.C1},
                       {"space_excess", sb.worst_excess},
                       {"C_init", tb.C_init},
                       {"time_bound", tb.bound},
                       {"time_ratio", tb.worst_ratio},
                       {"shift_excess", tb.shift_excess}};
    }
  } else {
    const auto p = build_radial(config.radial);
    analysis::TimeLipschitzMonitor lip_mon;
    const auto snaps = radial::evolve_radial(
        p, nm.t_max, nm.snapshot_interval(),
        [&](const RadialField& a, const RadialField& b, double dt) {
          lip_mon.observe(a.values, b.values, dt);
        },
        radial_params(config), nm.dt.value_or(0.0));
    const auto [a, b] = radial_region(config, p);
    const auto rep = analysis::convergence_study(analysis::Series::from(snaps),
                                                 analysis::region_nodes(p.grid, a, b),
                                                 nm.window_length(), nm.conv_tol);
    dump_conv(rep);
    out.write("limit.csv", radial_csv(RadialField{p.grid, rep.limit_values, nm.t_max}, p.n));
    const auto alphas = radial_alphas(config, p);
    const auto lip = analysis::lipschitz_radial(p, snaps, alphas, lip_mon.value());
    json by_alpha = json::array();
    for (double al : alphas) {
      by_alpha.push_back({{"alpha", al},
                          {"measured", lip.space_lip_by_alpha.at(al)},
                          {"bound", lip.space_bound_by_alpha.at(al)}});
    }
    j["lipschitz"] = {{"time_lip", lip.time_lip},
                      {"time_bound", lip.time_bound},
                      {"space", by_alpha}};
  }
  out.write("convergence.csv", conv.str());
  out.write("study.json", j.dump(2) + "\n");
  std::ostringstream txt;
  txt << "converged: " << (j["convergence"]["converged"].get<bool>() ? "yes" : "no")
      << "  final oscillation " << fmt(j["convergence"]["sup_osc"].back().get<double>())
      << "  tolerance " << fmt(nm.conv_tol) << '\n';
  out.write("study.txt", txt.str());
  if (log) *log << txt.str();
}

}  // namespace

std::vector<CheckResult> verify_suite(const RunConfig& config, std::ostream* log) {
  return config.kind == ProblemKind::Periodic ? verify_periodic(config, log)
                                              : verify_radial(config, log);
}

RunOutcome run(const RunConfig& config_in, const RunOptions& options) {
  RunConfig config = config_in;
  if (options.mode) config.mode = *options.mode;
  if (options.output_dir) config.output_dir = *options.output_dir;
  std::ostream* log = options.quiet ? nullptr : &std::cerr;

  RunOutcome outcome;
  const auto start = std::chrono::steady_clock::now();
  try {
    const bool radial_only = config.mode == Mode::Radial || config.mode == Mode::Value ||
                             config.mode == Mode::Limit;
    if (radial_only && config.kind != ProblemKind::Radial) {
      throw Error(ErrorKind::ValidationError,
                  "mode: " + std::string(to_string(config.mode)) + " needs a radial problem");
    }
    if (config.mode == Mode::Periodic && config.kind != ProblemKind::Periodic) {
      throw Error(ErrorKind::ValidationError, "mode: periodic needs a periodic problem");
    }
    OutputDir out(config.output_dir);
    int code = 0;
    switch (config.mode) {
      case Mode::Periodic: write_periodic(out, config, log); break;
      case Mode::Radial: write_radial(out, config, log); break;
      case Mode::Value: write_value(out, config, log); break;
      case Mode::Limit: write_limit(out, config, log); break;
      case Mode::Verify: code = write_verify(out, config, log); break;
      case Mode::Study: write_study(out, config, log); break;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!options.config_text.empty()) out.write("config.json", options.config_text);
    json m;
    m["tool"] = "gcurve";
    m["version"] = GCURVE_VERSION;
    m["mode"] = std::string(to_string(config.mode));
    m["config_file"] = options.config_text.empty() ? "" : "config.json";
    m["config_hash"] = fnv1a_hex(options.config_text);
    m["hash"] = "fnv1a-64";
    m["threads"] = periodic::worker_count();
    m["compiler"] = __VERSION__;
    m["boost"] = BOOST_LIB_VERSION;
    m["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                         std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                         std::to_string(NLOHMANN_JSON_VERSION_PATCH);
    m["wall_time_s"] = wall;
    m["exit_code"] = code;
    m["artifacts"] = out.written();
    out.write("manifest.json", m.dump(2) + "\n");
    outcome.exit_code = code;
    outcome.artifacts = out.written();
    outcome.message = code == 0 ? "ok" : "verification failed";
  } catch (const Error& e) {
    outcome.exit_code = exit_code_for(e.kind());
    outcome.message = e.what();
  } catch (const std::exception& e) {
    outcome.exit_code = 1;
    outcome.message = e.what();
  }
  return outcome;
}

}  // namespace gcurve
