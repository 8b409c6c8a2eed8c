#include "gcurve/radial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gcurve/control.hpp"
#include "gcurve/errors.hpp"

namespace gcurve::radial {

double hamiltonian(int n, double r, double p, double F_at_r) {
  if (!(r > 0.0)) throw Error(ErrorKind::DomainError, "hamiltonian needs r > 0");
  const double k = (n - 1) / r;
  return std::max(0.0, -k * p + std::abs(p)) - F_at_r;
}

double hamiltonian(const RadialProblem& problem, double r, double p) {
  if (!(r > 0.0)) throw Error(ErrorKind::DomainError, "hamiltonian needs r > 0");
  return hamiltonian(problem.n, r, p, problem.F(r));
}

double numerical_hamiltonian(int n, double r, double p_minus, double p_plus, double F_at_r) {
  const auto cone = control::velocity_cone(r, n);
  return std::max({0.0, cone.v_max * p_minus, cone.v_min * p_plus}) - F_at_r;
}

double numerical_hamiltonian(const RadialProblem& problem, double r, double p_minus,
                             double p_plus) {
  if (!(r > 0.0)) throw Error(ErrorKind::DomainError, "numerical_hamiltonian needs r > 0");
  return numerical_hamiltonian(problem.n, r, p_minus, p_plus, problem.F(r));
}

namespace {

void check_field(const RadialField& f, const RadialProblem& p) {
  if (!(f.grid == p.grid) || f.values.size() != p.grid.size()) {
    throw Error(ErrorKind::ValidationError, "field grid does not match the problem grid");
  }
}

}  // namespace

Stepper::Stepper(const RadialProblem& p, const RadialParams& params)
    : F_(p.sample_F()), h_(p.grid.h), c_F_(p.c_F), outer_(p.outer) {
  const std::size_t m = p.grid.size();
  v_max_.resize(m);
  v_min_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto cone = control::velocity_cone(p.grid.r(i), p.n);
    v_max_[i] = cone.v_max;
    v_min_[i] = cone.v_min;
  }
  inner_inflow_ = v_max_.front() > 0.0;
  dt_limit_ = cfl_dt(p, params);
}

// Backward and forward quotients with the boundary closures: linear
// extrapolation at r_min (only read when characteristics enter there) and a
// ghost node of slope c_F (or free extrapolation) at r_max.
void Stepper::quotients(const std::vector<double>& u, std::size_t i, double& pm,
                        double& pp) const {
  const std::size_t last = u.size() - 1;
  if (i == 0) {
    pp = (u[1] - u[0]) / h_;
    pm = inner_inflow_ ? pp : 0.0;
  } else if (i == last) {
    pm = (u[last] - u[last - 1]) / h_;
    pp = outer_ == OuterBoundary::ClampedSlope ? c_F_ : pm;
  } else {
    pm = (u[i] - u[i - 1]) / h_;
    pp = (u[i + 1] - u[i]) / h_;
  }
}

double Stepper::flux(const std::vector<double>& u, std::size_t i) const {
  double pm = 0.0, pp = 0.0;
  quotients(u, i, pm, pp);
  return std::max({0.0, v_max_[i] * pm, v_min_[i] * pp}) - F_[i];
}

void Stepper::advance(const std::vector<double>& u, std::vector<double>& out, double dt) const {
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - dt * flux(u, i);
}

double cfl_dt(const RadialProblem& problem, const RadialParams& params) {
  double speed = 0.0;
  for (std::size_t i = 0; i < problem.grid.size(); ++i) {
    speed = std::max(speed, 1.0 + (problem.n - 1) / problem.grid.r(i));
  }
  return params.cfl_safety * problem.grid.h / speed;
}

RadialState step_radial(const RadialState& state, const RadialProblem& problem, double dt,
                        const RadialParams& params) {
  check_field(state.field, problem);
  const double limit = cfl_dt(problem, params);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12)) {
    throw Error(ErrorKind::CFLViolation,
                "dt = " + std::to_string(dt) + " exceeds bound " + std::to_string(limit));
  }
  const Stepper c(problem, params);
  RadialState next;
  next.field.grid = state.field.grid;
  next.field.values.resize(state.field.values.size());
  c.advance(state.field.values, next.field.values, dt);
  next.field.time = state.field.time + dt;
  next.step_count = state.step_count + 1;
  next.dt_last = dt;
  return next;
}

std::vector<RadialField> evolve_radial_from(const RadialField& initial,
                                            const RadialProblem& problem, double T,
                                            double snapshot_every, const StepObserver& observer,
                                            const RadialParams& params, double dt_override) {
  check_field(initial, problem);
  if (!(T > 0.0)) throw Error(ErrorKind::DomainError, "horizon T must be > 0");
  if (!(snapshot_every > 0.0)) snapshot_every = T;
  const double limit = cfl_dt(problem, params);
  const double dt_nominal = dt_override > 0.0 ? dt_override : limit;
  if (dt_nominal > limit * (1.0 + 1e-12)) {
    throw Error(ErrorKind::CFLViolation, "dt override " + std::to_string(dt_override) +
                                             " exceeds bound " + std::to_string(limit));
  }
  double max_g = 0.0;
  for (double v : initial.values) max_g = std::max(max_g, std::abs(v));
  const double bound = params.diverge_factor * (1.0 + max_g + T * problem.max_F());
  const Stepper c(problem, params);

  const double t0 = initial.time;
  std::vector<RadialField> snaps{initial};
  RadialField cur = initial;
  RadialField next = initial;
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
      c.advance(cur.values, next.values, dt);
      next.time = land ? target : cur.time + dt;
      double m = 0.0;
      for (double v : next.values) m = std::max(m, std::abs(v));
      if (!(m <= bound)) {
        throw Error(ErrorKind::Diverged, "max|U| exceeded " + std::to_string(bound) +
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

std::vector<RadialField> evolve_radial(const RadialProblem& problem, double T,
                                       double snapshot_every, const StepObserver& observer,
                                       const RadialParams& params, double dt_override) {
  RadialField initial{problem.grid, problem.sample_G(problem.grid), 0.0};
  return evolve_radial_from(initial, problem, T, snapshot_every, observer, params, dt_override);
}

RadialField ergodic_residual_radial(const RadialField& V, const RadialProblem& problem) {
  check_field(V, problem);
  const Stepper c(problem);
  RadialField out{V.grid, std::vector<double>(V.values.size()), V.time};
  for (std::size_t i = 0; i < V.values.size(); ++i) out.values[i] = c.flux(V.values, i);
  return out;
}

}  // namespace gcurve::radial
