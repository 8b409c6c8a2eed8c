#pragma once

#include <span>
#include <vector>

#include "gcurve/model.hpp"

namespace gcurve::control {

/// Admissible velocities at radius r in dimension n:
/// [-1 - (n-1)/r, (1 - (n-1)/r) 1{r > n-1}].
struct VelocityCone {
  double v_min = 0.0;
  double v_max = 0.0;

  bool contains(double v, double tol = 0.0) const {
    return v >= v_min - tol && v <= v_max + tol;
  }
};

VelocityCone velocity_cone(double r, int n);

/// M velocities spread uniformly over the cone, endpoints included; when 0 lies
/// inside the cone the interior sample nearest to it is replaced by 0.
std::vector<double> cone_samples(const VelocityCone& cone, int M);

/// F(r) inside the closed cone (widened by cone_tol), kInf outside.
double lagrangian(const RadialProblem& problem, double r, double v, double cone_tol = 0.0);

/// lo, lo + step, ..., hi (hi included up to rounding).
std::vector<double> lattice(double lo, double hi, double step);

/// max_p { p v - H(r, p) } over the sampled momenta.
double legendre_sup(const RadialProblem& problem, double r, double v,
                    std::span<const double> p_samples);

/// Largest |sampled Legendre transform - lagrangian| over the v samples lying
/// strictly inside the cone at r. Samples on or outside the cone are skipped.
double legendre_check(const RadialProblem& problem, double r, std::span<const double> p_samples,
                      std::span<const double> v_samples);

/// Piecewise-linear path: gamma(times[k]) = radii[k].
struct Trajectory {
  std::vector<double> times;
  std::vector<double> radii;

  static Trajectory constant(double r, double t);
  double duration() const { return times.back() - times.front(); }
  /// Throws DomainError unless times strictly increase and radii are positive.
  void validate() const;
};

/// Every segment slope lies in the cone evaluated at both segment endpoints.
/// Both cone bounds increase with r, so this certifies the whole segment.
bool is_admissible(const Trajectory& traj, int n, double cone_tol);

/// G(gamma(0)) + integral of F along gamma by composite midpoint with
/// sub-steps no longer than `substep` in time.
double trajectory_cost(const Trajectory& traj, const RadialProblem& problem, double substep,
                       double cone_tol);

/// Value function U(r, t) on a space-time lattice. slices[k][i] = U(r_i, t_k).
struct ValueTable {
  RadialGrid grid;
  std::vector<double> t_grid;
  std::vector<std::vector<double>> slices;

  double value(std::size_t r_index, std::size_t t_index) const { return slices[t_index][r_index]; }
  /// Linear interpolation in r on slice t_index; kInf outside the grid.
  double at(double r, std::size_t t_index) const;
  double t_max() const { return t_grid.back(); }
  std::size_t time_index(double t) const;
};

struct DpOptions {
  int velocity_samples = 33;
};

/// Semi-Lagrangian dynamic programming:
///   U(r, t+dt) = min_v { dt F(r - v dt / 2) + U^(r - v dt, t) },
/// v over cone_samples(cone(r)), U^ the linear interpolant; departures
/// leaving [r_min, r_max] are excluded. Throws GridTooCoarse when
/// max_speed dt > 5 h.
ValueTable value_dp(const RadialProblem& problem, double t_max, const RadialGrid& r_grid,
                    double dt, const DpOptions& options = {});

/// Exhaustive minimum over paths of K equal-duration constant-velocity
/// segments ending at r at time t. Paths are built backward from gamma(t) = r;
/// each segment velocity is one of M cone samples taken at the segment's
/// known (later) endpoint, and the segment is kept only if is_admissible
/// accepts it and it stays inside [r_min, r_max]. kInf if nothing survives.
double brute_force_value(const RadialProblem& problem, double r, double t, int K, int M,
                         double cone_tol, double substep);

/// Infinite-horizon minimal running cost from r_from to r_to, travelling at
/// the fastest admissible speed. kInf when a rightward move would have to start
/// at or below n-1.
double travel_cost(const RadialProblem& problem, double r_from, double r_to);

/// V(r) = min over Aubry nodes s of travel_cost(s, r) + v_G(s).
struct LimitProfile {
  RadialGrid grid;
  std::vector<double> V;
  std::vector<double> aubry_radii;
  std::vector<double> v_G;
  std::vector<std::vector<double>> travel;  // travel[j][i] = travel_cost(s_j, r_i)
};

/// v_G is read from the stabilised DP table on its Aubry nodes; V is evaluated
/// on `eval_grid`. Throws NotStabilized when an Aubry value still moves by
/// limit_tol or more over the last 10% of the horizon, EmptyAubry when the
/// table grid carries no Aubry node.
LimitProfile limit_profile(const RadialProblem& problem, const ValueTable& table,
                           double limit_tol, const RadialGrid& eval_grid);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// [r* - t, r* + 2t]; requires r* > n-1 and t >= 0.
Interval cone_of_influence(double r_star, double t, int n);

}  // namespace gcurve::control
