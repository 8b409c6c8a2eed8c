#include "gcurve/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gcurve/errors.hpp"

namespace gcurve {

// ---------------------------------------------------------------------------
// Grids

PeriodicGrid::PeriodicGrid(int dim_, int N_) : dim(dim_), N(N_) {
  if (dim < 1 || dim > 3) throw Error(ErrorKind::ValidationError, "periodic dim must be 1..3");
  if (N < 2) throw Error(ErrorKind::ValidationError, "periodic N must be >= 2");
  h = 1.0 / N;
  size_ = 1;
  for (int a = dim - 1; a >= 0; --a) {
    strides_[static_cast<std::size_t>(a)] = size_;
    size_ *= static_cast<std::size_t>(N);
  }
}

std::array<int, 3> PeriodicGrid::multi_index(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    const std::size_t s = strides_[static_cast<std::size_t>(a)];
    idx[static_cast<std::size_t>(a)] = static_cast<int>(flat / s);
    flat %= s;
  }
  return idx;
}

std::size_t PeriodicGrid::flat_index(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < dim; ++a) {
    int i = idx[static_cast<std::size_t>(a)] % N;
    if (i < 0) i += N;
    flat += static_cast<std::size_t>(i) * strides_[static_cast<std::size_t>(a)];
  }
  return flat;
}

std::size_t PeriodicGrid::shifted(std::size_t flat, int axis, int offset) const {
  auto idx = multi_index(flat);
  idx[static_cast<std::size_t>(axis)] += offset;
  return flat_index(idx);
}

std::array<double, 3> PeriodicGrid::coords(std::size_t flat) const {
  const auto idx = multi_index(flat);
  return {idx[0] * h, idx[1] * h, idx[2] * h};
}

RadialGrid::RadialGrid(double r_min_, double r_max_, int n_nodes_)
    : r_min(r_min_), r_max(r_max_), n_nodes(n_nodes_) {
  if (!(r_min > 0.0)) throw Error(ErrorKind::ValidationError, "r_min must be > 0");
  if (!(r_max > r_min)) throw Error(ErrorKind::ValidationError, "r_max must exceed r_min");
  if (n_nodes < 3) throw Error(ErrorKind::ValidationError, "radial grid needs >= 3 nodes");
  h = (r_max - r_min) / (n_nodes - 1);
}

std::size_t RadialGrid::nearest(double r) const {
  const double x = std::round((r - r_min) / h);
  if (x <= 0.0) return 0;
  if (x >= n_nodes - 1) return size() - 1;
  return static_cast<std::size_t>(x);
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

bool Field::finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

double RadialField::at(double r) const {
  if (r <= grid.r_min) return values.front();
  if (r >= grid.r_max) return values.back();
  const double x = (r - grid.r_min) / grid.h;
  auto i = static_cast<std::size_t>(x);
  if (i + 1 >= values.size()) return values.back();
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

bool RadialField::finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// Coefficients

ScalarSpec ScalarSpec::constant(double c) {
  std::ostringstream os;
  os.precision(17);
  os << c;
  return expr(os.str());
}

Profile Profile::from_spec(const ScalarSpec& spec, double r_lo, double r_hi) {
  Profile p;
  if (spec.expression) {
    p.expr_ = Expr::compile(*spec.expression, {"r"});
    return p;
  }
  if (spec.samples.size() < 2) {
    throw Error(ErrorKind::ValidationError, "radial profile needs >= 2 samples");
  }
  p.ys_ = spec.samples;
  if (spec.sample_r.empty()) {
    const std::size_t m = spec.samples.size();
    p.xs_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      p.xs_[i] = r_lo + (r_hi - r_lo) * static_cast<double>(i) / static_cast<double>(m - 1);
    }
  } else {
    if (spec.sample_r.size() != spec.samples.size()) {
      throw Error(ErrorKind::ValidationError, "sample_r and samples differ in length");
    }
    if (!std::is_sorted(spec.sample_r.begin(), spec.sample_r.end())) {
      throw Error(ErrorKind::ValidationError, "sample_r must be increasing");
    }
    p.xs_ = spec.sample_r;
  }
  return p;
}

double Profile::operator()(double r) const {
  if (expr_) return (*expr_)(r);
  if (xs_.empty()) return 0.0;
  if (r <= xs_.front()) return ys_.front();
  if (r >= xs_.back()) return ys_.back();
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), r);
  const auto j = static_cast<std::size_t>(it - xs_.begin());
  const double w = (r - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
  return (1.0 - w) * ys_[j - 1] + w * ys_[j];
}

std::string Profile::describe() const {
  if (expr_) return expr_->source();
  return "<" + std::to_string(xs_.size()) + " samples>";
}

namespace {

std::vector<double> sample_periodic(const PeriodicGrid& grid, const ScalarSpec& spec,
                                    const char* name) {
  std::vector<double> out(grid.size());
  if (spec.expression) {
    const Expr e = Expr::compile(*spec.expression, {"x1", "x2", "x3", "x", "y", "z"});
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto x = grid.coords(k);
      const double vars[6] = {x[0], x[1], x[2], x[0], x[1], x[2]};
      out[k] = e(vars);
    }
  } else {
    if (spec.samples.size() != grid.size()) {
      throw Error(ErrorKind::ValidationError,
                  std::string(name) + ": expected " + std::to_string(grid.size()) +
                      " samples, got " + std::to_string(spec.samples.size()));
    }
    out = spec.samples;
  }
  for (double v : out) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::ValidationError, std::string(name) + " is not finite everywhere");
    }
  }
  return out;
}

}  // namespace

double discrete_lipschitz(const PeriodicGrid& grid, const std::vector<double>& values) {
  double lip = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (int a = 0; a < grid.dim; ++a) {
      const double d = std::abs(values[grid.shifted(k, a, 1)] - values[k]) / grid.h;
      lip = std::max(lip, d);
    }
  }
  return 1.01 * lip;
}

double PeriodicProblem::max_f() const { return *std::max_element(f.begin(), f.end()); }

double PeriodicProblem::max_abs_g() const {
  double m = 0.0;
  for (double v : g) m = std::max(m, std::abs(v));
  return m;
}

double PeriodicProblem::max_wind() const {
  double m = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double s = 0.0;
    for (const auto& w : wind) s += w[k] * w[k];
    m = std::max(m, std::sqrt(s));
  }
  return m;
}

bool PeriodicProblem::wind_zero() const {
  for (const auto& w : wind) {
    for (double v : w) {
      if (v != 0.0) return false;
    }
  }
  return true;
}

PeriodicProblem build_periodic(const PeriodicConfig& config) {
  if (config.N < 8) throw Error(ErrorKind::ValidationError, "problem.N must be >= 8");
  PeriodicProblem p;
  p.grid = PeriodicGrid(config.dim, config.N);
  p.f = sample_periodic(p.grid, config.f, "f");
  p.g = sample_periodic(p.grid, config.g, "g");
  if (!config.wind.empty()) {
    if (static_cast<int>(config.wind.size()) != config.dim) {
      throw Error(ErrorKind::ValidationError, "wind must have one component per axis");
    }
    for (const auto& w : config.wind) p.wind.push_back(sample_periodic(p.grid, w, "W"));
  } else {
    p.wind.assign(static_cast<std::size_t>(config.dim), std::vector<double>(p.grid.size(), 0.0));
  }
  p.closed_form = config.f.closed_form();
  p.aubry_tol = config.aubry_tol.value_or(p.closed_form ? 1e-9 : p.grid.h * p.grid.h);
  p.ergodic = config.ergodic;

  for (std::size_t k = 0; k < p.grid.size(); ++k) {
    if (p.f[k] < 0.0) {
      const auto x = p.grid.coords(k);
      throw Error(ErrorKind::NegativeSource, "f = " + std::to_string(p.f[k]) + " < 0 at (" +
                                                 std::to_string(x[0]) + ", " +
                                                 std::to_string(x[1]) + ")");
    }
  }

  for (std::size_t k = 0; k < p.grid.size(); ++k) {
    if (p.f[k] > p.aubry_tol) continue;
    double w2 = 0.0;
    for (const auto& w : p.wind) w2 += w[k] * w[k];
    if (std::sqrt(w2) > p.aubry_tol) {
      const std::string msg = "W != 0 at a zero of f (node " + std::to_string(k) + ")";
      if (p.ergodic) throw Error(ErrorKind::AubryWindMismatch, msg);
      p.warnings.push_back(msg);
      break;
    }
  }

  p.lip_f = discrete_lipschitz(p.grid, p.f);
  p.lip_g = discrete_lipschitz(p.grid, p.g);

  if (p.ergodic && aubry_set(p).empty()) {
    throw Error(ErrorKind::EmptyAubry, "problem flagged ergodic but f has no zero on the grid");
  }
  return p;
}

std::vector<double> RadialProblem::sample_F(const RadialGrid& on) const {
  std::vector<double> out(on.size());
  for (std::size_t i = 0; i < on.size(); ++i) out[i] = F(on.r(i));
  return out;
}

std::vector<double> RadialProblem::sample_G(const RadialGrid& on) const {
  std::vector<double> out(on.size());
  for (std::size_t i = 0; i < on.size(); ++i) out[i] = G(on.r(i));
  return out;
}

double RadialProblem::max_F() const {
  const auto fs = sample_F();
  return *std::max_element(fs.begin(), fs.end());
}

RadialProblem build_radial(const RadialConfig& config) {
  if (config.n < 2) throw Error(ErrorKind::ValidationError, "problem.n must be >= 2");
  if (!(config.c_F > 0.0)) throw Error(ErrorKind::ValidationError, "problem.c_F must be > 0");
  const double r_min = config.r_min.value_or(1e-3 * (config.n - 1));
  if (!(r_min > 0.0)) throw Error(ErrorKind::ValidationError, "numerics.r_min must be > 0");
  if (!(config.r_max > config.n - 1)) {
    throw Error(ErrorKind::ValidationError, "numerics.r_max must exceed n-1");
  }

  RadialProblem p;
  p.n = config.n;
  p.c_F = config.c_F;
  p.grid = RadialGrid(r_min, config.r_max, config.grid_n);
  p.F = Profile::from_spec(config.F, r_min, config.r_max);
  p.G = Profile::from_spec(config.G, r_min, config.r_max);
  p.ergodic = config.ergodic;
  p.outer = config.outer;
  p.aubry_tol = config.aubry_tol.value_or(config.F.closed_form() ? 1e-9 : p.grid.h * p.grid.h);

  // Nonnegativity on a grid four times finer than the solver grid.
  const RadialGrid fine(r_min, config.r_max, 4 * (config.grid_n - 1) + 1);
  for (std::size_t i = 0; i < fine.size(); ++i) {
    const double r = fine.r(i);
    const double F = p.F(r);
    if (!std::isfinite(F)) {
      throw Error(ErrorKind::ValidationError, "F is not finite at r = " + std::to_string(r));
    }
    if (F < 0.0) {
      throw Error(ErrorKind::NegativeSource,
                  "F(" + std::to_string(r) + ") = " + std::to_string(F) + " < 0");
    }
    if (!std::isfinite(p.G(r))) {
      throw Error(ErrorKind::ValidationError, "G is not finite at r = " + std::to_string(r));
    }
  }

  const double tail_start = 0.9 * config.r_max;
  double worst = 0.0;
  for (std::size_t i = 0; i < fine.size(); ++i) {
    const double r = fine.r(i);
    if (r >= tail_start) worst = std::max(worst, std::abs(p.F(r) - p.c_F));
  }
  if (worst > config.tail_tol) {
    p.warnings.push_back("TailMismatch: |F - c_F| reaches " + std::to_string(worst) +
                         " on the last 10% of [0, r_max]");
  }

  if (p.ergodic && aubry_set(p).empty()) {
    throw Error(ErrorKind::EmptyAubry, "problem flagged ergodic but F has no zero on the grid");
  }
  return p;
}

// ---------------------------------------------------------------------------
// Aubry set

bool AubrySet::contains(std::size_t node) const {
  return std::binary_search(nodes.begin(), nodes.end(), node);
}

namespace {

void fill_intervals(AubrySet& a) {
  for (std::size_t k = 0; k < a.nodes.size(); ++k) {
    if (!a.intervals.empty() && a.intervals.back().second + 1 == a.nodes[k]) {
      a.intervals.back().second = a.nodes[k];
    } else {
      a.intervals.emplace_back(a.nodes[k], a.nodes[k]);
    }
  }
}

}  // namespace

AubrySet aubry_set(const PeriodicProblem& problem, double aubry_tol) {
  if (!(aubry_tol > 0.0)) throw Error(ErrorKind::DomainError, "aubry_tol must be > 0");
  AubrySet a;
  for (std::size_t k = 0; k < problem.grid.size(); ++k) {
    if (problem.f[k] <= aubry_tol) a.nodes.push_back(k);
  }
  fill_intervals(a);
  return a;
}

AubrySet aubry_set(const PeriodicProblem& problem) { return aubry_set(problem, problem.aubry_tol); }

AubrySet aubry_set(const RadialProblem& problem, const RadialGrid& grid, double aubry_tol) {
  if (!(aubry_tol > 0.0)) throw Error(ErrorKind::DomainError, "aubry_tol must be > 0");
  AubrySet a;
  const double iface = problem.interface();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.r(i);
    if (problem.F(r) > aubry_tol) continue;
    a.nodes.push_back(i);
    a.radii.push_back(r);
    if (r <= iface) {
      a.S0 = a.S0 ? std::min(*a.S0, r) : r;
      a.S1 = a.S1 ? std::max(*a.S1, r) : r;
    }
    if (r >= iface) {
      a.R0 = a.R0 ? std::min(*a.R0, r) : r;
      a.R1 = a.R1 ? std::max(*a.R1, r) : r;
    }
  }
  fill_intervals(a);
  return a;
}

AubrySet aubry_set(const RadialProblem& problem, double aubry_tol) {
  return aubry_set(problem, problem.grid, aubry_tol);
}

AubrySet aubry_set(const RadialProblem& problem) { return aubry_set(problem, problem.aubry_tol); }

}  // namespace gcurve
