#include "gcurve/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

#ifdef GCURVE_HAVE_OPENMP
#include <omp.h>
#endif

#include "gcurve/errors.hpp"

namespace gcurve::periodic {

namespace detail {

// Neighbour table: for every node, the flat index one cell forward and one cell
// backward along each axis.
struct Stencil {
  int dim = 0;
  std::vector<std::size_t> plus;   // size * dim
  std::vector<std::size_t> minus;  // size * dim

  explicit Stencil(const PeriodicGrid& grid) : dim(grid.dim) {
    const std::size_t n = grid.size();
    plus.resize(n * static_cast<std::size_t>(dim));
    minus.resize(n * static_cast<std::size_t>(dim));
    for (std::size_t k = 0; k < n; ++k) {
      for (int a = 0; a < dim; ++a) {
        plus[k * dim + a] = grid.shifted(k, a, 1);
        minus[k * dim + a] = grid.shifted(k, a, -1);
      }
    }
  }

  std::size_t p(std::size_t k, int a) const { return plus[k * dim + a]; }
  std::size_t m(std::size_t k, int a) const { return minus[k * dim + a]; }
};

}  // namespace detail

namespace {

using detail::Stencil;

struct Derivatives {
  std::array<double, 3> back{};     // D^- u
  std::array<double, 3> fwd{};      // D^+ u
  std::array<double, 3> central{};  // D^0 u
  std::array<std::array<double, 3>, 3> hess{};
};

template <int D>
Derivatives derivatives_fixed(const double* u, std::size_t k, const Stencil& s, double h) {
  Derivatives d;
  const double uc = u[k];
  const double inv_h = 1.0 / h;
  const double inv_h2 = inv_h * inv_h;
  const std::size_t* pk = &s.plus[k * D];
  const std::size_t* mk = &s.minus[k * D];
  for (int a = 0; a < D; ++a) {
    const double up = u[pk[a]];
    const double um = u[mk[a]];
    d.back[a] = (uc - um) * inv_h;
    d.fwd[a] = (up - uc) * inv_h;
    d.central[a] = 0.5 * (up - um) * inv_h;
    d.hess[a][a] = (up - 2.0 * uc + um) * inv_h2;
  }
  for (int a = 0; a < D; ++a) {
    for (int b = a + 1; b < D; ++b) {
      const std::size_t kp = pk[a];
      const std::size_t km = mk[a];
      const double upp = u[s.plus[kp * D + b]];
      const double upm = u[s.minus[kp * D + b]];
      const double ump = u[s.plus[km * D + b]];
      const double umm = u[s.minus[km * D + b]];
      const double mixed = 0.25 * (upp - upm - ump + umm) * inv_h2;
      d.hess[a][b] = mixed;
      d.hess[b][a] = mixed;
    }
  }
  return d;
}

Derivatives derivatives(const std::vector<double>& u, std::size_t k, const Stencil& s, double h) {
  switch (s.dim) {
    case 1: return derivatives_fixed<1>(u.data(), k, s, h);
    case 2: return derivatives_fixed<2>(u.data(), k, s, h);
    default: return derivatives_fixed<3>(u.data(), k, s, h);
  }
}

// Godunov upwind norm for u_t + |Du| = 0 (outward unit speed).
template <int D>
double godunov_norm(const Derivatives& d) {
  double s = 0.0;
  for (int a = 0; a < D; ++a) {
    const double bm = std::max(d.back[a], 0.0);
    const double fp = std::min(d.fwd[a], 0.0);
    s += std::max(bm * bm, fp * fp);
  }
  return std::sqrt(s);
}

template <int D>
double curvature_part(const Derivatives& d, double eps) {
  double g2 = 0.0;
  for (int a = 0; a < D; ++a) g2 += d.central[a] * d.central[a];
  if (std::sqrt(g2) <= eps) return 0.0;
  const double denom = g2 + eps * eps;
  double trace = 0.0;
  double quad = 0.0;
  for (int a = 0; a < D; ++a) {
    trace += d.hess[a][a];
    for (int b = 0; b < D; ++b) quad += d.central[a] * d.central[b] * d.hess[a][b];
  }
  return -(trace - quad / denom);
}

template <int D>
double cutoff_of(const Derivatives& d, double eps) {
  return std::max(0.0, curvature_part<D>(d, eps) + godunov_norm<D>(d));
}

double cutoff_of(const Derivatives& d, int dim, double eps) {
  switch (dim) {
    case 1: return cutoff_of<1>(d, eps);
    case 2: return cutoff_of<2>(d, eps);
    default: return cutoff_of<3>(d, eps);
  }
}

template <int D>
NodeTerms terms_fixed(const PeriodicProblem& problem, const double* u, std::size_t k,
                      const Stencil& s, double eps) {
  const Derivatives d = derivatives_fixed<D>(u, k, s, problem.grid.h);
  NodeTerms t;
  t.cutoff = cutoff_of<D>(d, eps);
  double adv = 0.0;
  for (int a = 0; a < D; ++a) {
    const double w = problem.wind[static_cast<std::size_t>(a)][k];
    adv += w * (w > 0.0 ? d.back[a] : d.fwd[a]);
  }
  t.advection = adv;
  t.residual = t.cutoff + adv - problem.f[k];
  return t;
}

NodeTerms terms_at(const PeriodicProblem& problem, const std::vector<double>& u, std::size_t k,
                   const Stencil& s, double eps) {
  switch (s.dim) {
    case 1: return terms_fixed<1>(problem, u.data(), k, s, eps);
    case 2: return terms_fixed<2>(problem, u.data(), k, s, eps);
    default: return terms_fixed<3>(problem, u.data(), k, s, eps);
  }
}

void check_field(const Field& field, const PeriodicProblem& problem) {
  if (!(field.grid == problem.grid) || field.values.size() != problem.grid.size()) {
    throw Error(ErrorKind::ValidationError, "field grid does not match the problem grid");
  }
}

template <int D>
void advance_fixed(const std::vector<double>& u, std::vector<double>& out,
                   const PeriodicProblem& problem, const Stencil& s, double eps, double dt) {
  const auto n = static_cast<long>(u.size());
  const double* src = u.data();
  double* dst = out.data();
#ifdef GCURVE_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(worker_count())
#endif
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    dst[k] = src[k] - dt * terms_fixed<D>(problem, src, k, s, eps).residual;
  }
}

// The plane case written out row by row with direct index arithmetic. Same
// operations in the same order as terms_fixed<2>, so results are bit-identical.
void advance_plane(const std::vector<double>& u, std::vector<double>& out,
                   const PeriodicProblem& problem, double eps, double dt) {
  const int N = problem.grid.N;
  const double inv_h = 1.0 / problem.grid.h;
  const double inv_h2 = inv_h * inv_h;
  const double* src = u.data();
  double* dst = out.data();
  const double* w0 = problem.wind[0].data();
  const double* w1 = problem.wind[1].data();
  const double* f = problem.f.data();
#ifdef GCURVE_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(worker_count())
#endif
  for (int i = 0; i < N; ++i) {
    const double* row = src + static_cast<std::size_t>(i) * N;
    const double* rp = src + static_cast<std::size_t>(i + 1 == N ? 0 : i + 1) * N;
    const double* rm = src + static_cast<std::size_t>(i == 0 ? N - 1 : i - 1) * N;
    for (int j = 0; j < N; ++j) {
      const int jp = j + 1 == N ? 0 : j + 1;
      const int jm = j == 0 ? N - 1 : j - 1;
      const std::size_t k = static_cast<std::size_t>(i) * N + j;
      const double uc = row[j];
      const double up0 = rp[j], um0 = rm[j], up1 = row[jp], um1 = row[jm];
      const double b0 = (uc - um0) * inv_h, f0 = (up0 - uc) * inv_h;
      const double c0 = 0.5 * (up0 - um0) * inv_h;
      const double h00 = (up0 - 2.0 * uc + um0) * inv_h2;
      const double b1 = (uc - um1) * inv_h, f1 = (up1 - uc) * inv_h;
      const double c1 = 0.5 * (up1 - um1) * inv_h;
      const double h11 = (up1 - 2.0 * uc + um1) * inv_h2;
      const double h01 = 0.25 * (rp[jp] - rp[jm] - rm[jp] + rm[jm]) * inv_h2;

      double curv = 0.0;
      const double g2 = 0.0 + c0 * c0 + c1 * c1;
      if (!(std::sqrt(g2) <= eps)) {
        const double denom = g2 + eps * eps;
        double quad = 0.0;
        quad += c0 * c0 * h00;
        quad += c0 * c1 * h01;
        quad += c1 * c0 * h01;
        quad += c1 * c1 * h11;
        const double trace = 0.0 + h00 + h11;
        curv = -(trace - quad / denom);
      }
      const double bm0 = std::max(b0, 0.0), fp0 = std::min(f0, 0.0);
      const double bm1 = std::max(b1, 0.0), fp1 = std::min(f1, 0.0);
      const double gn = std::sqrt(0.0 + std::max(bm0 * bm0, fp0 * fp0) + std::max(bm1 * bm1, fp1 * fp1));
      const double cutoff = std::max(0.0, curv + gn);
      double adv = 0.0;
      adv += w0[k] * (w0[k] > 0.0 ? b0 : f0);
      adv += w1[k] * (w1[k] > 0.0 ? b1 : f1);
      dst[k] = uc - dt * (cutoff + adv - f[k]);
    }
  }
}

void advance(const std::vector<double>& u, std::vector<double>& out, const PeriodicProblem& problem,
             const Stencil& s, double eps, double dt) {
  switch (s.dim) {
    case 1: advance_fixed<1>(u, out, problem, s, eps, dt); break;
    case 2: advance_plane(u, out, problem, eps, dt); break;
    default: advance_fixed<3>(u, out, problem, s, eps, dt); break;
  }
}

}  // namespace

Stepper::Stepper(const PeriodicProblem& problem, const CurvatureParams& params)
    : problem_(&problem),
      stencil_(std::make_shared<const Stencil>(problem.grid)),
      eps_(params.eps(problem.grid)),
      dt_limit_(cfl_dt(problem, params)) {}

void Stepper::advance(const std::vector<double>& u, std::vector<double>& out, double dt) const {
  periodic::advance(u, out, *problem_, *stencil_, eps_, dt);
}

int worker_count() {
  static const int count = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("GCURVE_THREADS")) {
      const int v = std::atoi(env);
      if (v > 0) return std::min(v, hw);
    }
    return hw;
  }();
  return count;
}

std::array<double, 3> grad_central(const Field& field, std::size_t node) {
  std::array<double, 3> g{0.0, 0.0, 0.0};
  const auto& grid = field.grid;
  for (int a = 0; a < grid.dim; ++a) {
    const double up = field.values[grid.shifted(node, a, 1)];
    const double um = field.values[grid.shifted(node, a, -1)];
    g[static_cast<std::size_t>(a)] = (up - um) / (2.0 * grid.h);
  }
  return g;
}

double curvature_cutoff(const Field& field, std::size_t node, const CurvatureParams& params) {
  const Stencil s(field.grid);
  const Derivatives d = derivatives(field.values, node, s, field.grid.h);
  return cutoff_of(d, s.dim, params.eps(field.grid));
}

double cfl_dt(const PeriodicProblem& problem, const CurvatureParams& params) {
  // Sum of the centre-node coefficients of the frozen-coefficient operator:
  // central second differences (a has eigenvalues in [0, 1]) plus the upwind
  // first-order terms.
  const double n = problem.grid.dim;
  const double h = problem.grid.h;
  const double rate = 2.0 * n / (h * h) + std::sqrt(n) * (1.0 + problem.max_wind()) / h;
  return params.cfl_safety / rate;
}

NodeTerms node_terms(const PeriodicProblem& problem, const std::vector<double>& u,
                     std::size_t node, const CurvatureParams& params) {
  const Stencil s(problem.grid);
  return terms_at(problem, u, node, s, params.eps(problem.grid));
}

PeriodicState step(const PeriodicState& state, const PeriodicProblem& problem,
                   const CurvatureParams& params, double dt) {
  check_field(state.field, problem);
  const double limit = cfl_dt(problem, params);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    throw Error(ErrorKind::CFLViolation,
                "dt = " + std::to_string(dt) + " exceeds bound " + std::to_string(limit));
  }
  const Stencil s(problem.grid);
  PeriodicState next;
  next.field.grid = state.field.grid;
  next.field.values.resize(state.field.values.size());
  advance(state.field.values, next.field.values, problem, s, params.eps(problem.grid), dt);
  next.field.time = state.field.time + dt;
  next.step_count = state.step_count + 1;
  next.dt_last = dt;
  return next;
}

std::vector<Field> evolve_from(const Field& initial, const PeriodicProblem& problem,
                               const CurvatureParams& params, double T, double snapshot_every,
                               const StepObserver& observer, double dt_override) {
  check_field(initial, problem);
  if (!(T > 0.0)) throw Error(ErrorKind::DomainError, "horizon T must be > 0");
  if (!(snapshot_every > 0.0)) snapshot_every = T;
  const double limit = cfl_dt(problem, params);
  const double dt_nominal = dt_override > 0.0 ? dt_override : limit;
  if (dt_nominal > limit * (1.0 + 1e-12)) {
    throw Error(ErrorKind::CFLViolation, "dt override " + std::to_string(dt_override) +
                                             " exceeds bound " + std::to_string(limit));
  }
  const double bound =
      params.diverge_factor * (1.0 + initial.max_abs() + T * std::max(0.0, problem.max_f()));
  const double eps = params.eps(problem.grid);
  const Stencil s(problem.grid);

  const double t0 = initial.time;
  std::vector<Field> snaps{initial};
  Field cur = initial;
  Field next = initial;
  long k_snap = 1;
  for (;;) {
    double target = std::min(t0 + static_cast<double>(k_snap) * snapshot_every, t0 + T);
    if (t0 + T - target <= 1e-9 * snapshot_every) target = t0 + T;
    while (cur.time < target) {
      double dt = dt_nominal;
      bool land = false;
      if (cur.time + dt >= target - 1e-12 * std::max(1.0, target)) {
        dt = target - cur.time;
        land = true;
      }
      advance(cur.values, next.values, problem, s, eps, dt);
      next.time = land ? target : cur.time + dt;
      if (next.max_abs() > bound || !next.finite()) {
        throw Error(ErrorKind::Diverged, "max|u| exceeded " + std::to_string(bound) +
                                             " at t = " + std::to_string(next.time));
      }
      if (observer) observer(cur, next, dt);
      std::swap(cur, next);
    }
    snaps.push_back(cur);
    if (target >= t0 + T) break;
    ++k_snap;
  }
  return snaps;
}

std::vector<Field> evolve(const PeriodicProblem& problem, const CurvatureParams& params, double T,
                          double snapshot_every, const StepObserver& observer,
                          double dt_override) {
  Field initial{problem.grid, problem.g, 0.0};
  return evolve_from(initial, problem, params, T, snapshot_every, observer, dt_override);
}

Field ergodic_residual(const Field& v, const PeriodicProblem& problem,
                       const CurvatureParams& params) {
  check_field(v, problem);
  const Stencil s(problem.grid);
  const double eps = params.eps(problem.grid);
  Field out{v.grid, std::vector<double>(v.values.size()), v.time};
  for (std::size_t k = 0; k < v.values.size(); ++k) {
    out.values[k] = terms_at(problem, v.values, k, s, eps).residual;
  }
  return out;
}

}  // namespace gcurve::periodic
