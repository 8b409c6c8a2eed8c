#include "gcurve/control.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gcurve/errors.hpp"

namespace gcurve::control {

VelocityCone velocity_cone(double r, int n) {
  if (!(r > 0.0)) throw Error(ErrorKind::DomainError, "velocity_cone needs r > 0");
  const double k = (n - 1) / r;
  // r == n-1 belongs to the left region where only non-positive speeds are allowed
  return {-1.0 - k, r > n - 1 ? 1.0 - k : 0.0};
}

std::vector<double> cone_samples(const VelocityCone& cone, int M) {
  if (M < 2) throw Error(ErrorKind::DomainError, "need at least two velocity samples");
  std::vector<double> v(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) {
    v[static_cast<std::size_t>(j)] = cone.v_min + (cone.v_max - cone.v_min) * j / (M - 1);
  }
  v.back() = cone.v_max;
  if (cone.v_max > 0.0 && M >= 3) {
    std::size_t best = 1;
    for (std::size_t j = 1; j + 1 < v.size(); ++j) {
      if (std::abs(v[j]) < std::abs(v[best])) best = j;
    }
    v[best] = 0.0;
  }
  return v;
}

double lagrangian(const RadialProblem& problem, double r, double v, double cone_tol) {
  const auto cone = velocity_cone(r, problem.n);
  return cone.contains(v, cone_tol) ? problem.F(r) : kInf;
}

std::vector<double> lattice(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) throw Error(ErrorKind::DomainError, "bad lattice");
  const auto m = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> out(m + 1);
  for (std::size_t i = 0; i <= m; ++i) out[i] = lo + static_cast<double>(i) * step;
  return out;
}

double legendre_sup(const RadialProblem& problem, double r, double v,
                    std::span<const double> p_samples) {
  if (!(r > 0.0)) throw Error(ErrorKind::DomainError, "legendre_sup needs r > 0");
  const double F = problem.F(r);
  const double k = (problem.n - 1) / r;
  double sup = -kInf;
  for (double p : p_samples) {
    const double H = std::max(0.0, -k * p + std::abs(p)) - F;
    sup = std::max(sup, p * v - H);
  }
  return sup;
}

double legendre_check(const RadialProblem& problem, double r, std::span<const double> p_samples,
                      std::span<const double> v_samples) {
  const auto cone = velocity_cone(r, problem.n);
  double gap = 0.0;
  for (double v : v_samples) {
    if (!(v > cone.v_min && v < cone.v_max)) continue;
    gap = std::max(gap, std::abs(legendre_sup(problem, r, v, p_samples) -
                                 lagrangian(problem, r, v)));
  }
  return gap;
}

Trajectory Trajectory::constant(double r, double t) { return {{0.0, t}, {r, r}}; }

void Trajectory::validate() const {
  if (times.size() < 2 || times.size() != radii.size()) {
    throw Error(ErrorKind::DomainError, "trajectory needs >= 2 matching time/radius samples");
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(radii[k] > 0.0)) throw Error(ErrorKind::DomainError, "trajectory radii must be > 0");
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw Error(ErrorKind::DomainError, "trajectory times must strictly increase");
    }
  }
}

namespace {

bool segment_admissible(double r0, double r1, double dt, int n, double cone_tol) {
  const double slope = (r1 - r0) / dt;
  return velocity_cone(r0, n).contains(slope, cone_tol) &&
         velocity_cone(r1, n).contains(slope, cone_tol);
}

double segment_cost(const RadialProblem& problem, double r0, double r1, double dt,
                    double substep) {
  const auto m = std::max<long>(1, static_cast<long>(std::ceil(dt / substep - 1e-12)));
  const double tau = dt / static_cast<double>(m);
  double s = 0.0;
  for (long j = 0; j < m; ++j) {
    const double theta = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
    s += problem.F(r0 + theta * (r1 - r0));
  }
  return s * tau;
}

}  // namespace

bool is_admissible(const Trajectory& traj, int n, double cone_tol) {
  traj.validate();
  for (std::size_t k = 0; k + 1 < traj.times.size(); ++k) {
    if (!segment_admissible(traj.radii[k], traj.radii[k + 1], traj.times[k + 1] - traj.times[k],
                            n, cone_tol)) {
      return false;
    }
  }
  return true;
}

double trajectory_cost(const Trajectory& traj, const RadialProblem& problem, double substep,
                       double cone_tol) {
  if (!is_admissible(traj, problem.n, cone_tol)) {
    throw Error(ErrorKind::InadmissibleTrajectory, "segment slope leaves the velocity cone");
  }
  if (!(substep > 0.0)) throw Error(ErrorKind::DomainError, "substep must be > 0");
  double cost = problem.G(traj.radii.front());
  for (std::size_t k = 0; k + 1 < traj.times.size(); ++k) {
    cost += segment_cost(problem, traj.radii[k], traj.radii[k + 1],
                         traj.times[k + 1] - traj.times[k], substep);
  }
  return cost;
}

// ---------------------------------------------------------------------------
// Dynamic programming

double ValueTable::at(double r, std::size_t t_index) const {
  const auto& u = slices[t_index];
  const double x = (r - grid.r_min) / grid.h;
  if (x < -1e-9 || x > (grid.n_nodes - 1) + 1e-9) return kInf;
  auto i = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, double(grid.n_nodes - 2)));
  const double w = std::clamp(x - static_cast<double>(i), 0.0, 1.0);
  if (is_inf(u[i]) || is_inf(u[i + 1])) {
    if (w == 0.0) return u[i];
    if (w == 1.0) return u[i + 1];
    return kInf;
  }
  return (1.0 - w) * u[i] + w * u[i + 1];
}

std::size_t ValueTable::time_index(double t) const {
  const auto it = std::lower_bound(t_grid.begin(), t_grid.end(), t - 1e-12 * std::max(1.0, t));
  if (it == t_grid.end()) return t_grid.size() - 1;
  return static_cast<std::size_t>(it - t_grid.begin());
}

ValueTable value_dp(const RadialProblem& problem, double t_max, const RadialGrid& r_grid,
                    double dt, const DpOptions& options) {
  if (!(t_max > 0.0) || !(dt > 0.0)) {
    throw Error(ErrorKind::DomainError, "value_dp needs t_max > 0 and dt > 0");
  }
  const std::size_t m = r_grid.size();
  double max_speed = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto c = velocity_cone(r_grid.r(i), problem.n);
    max_speed = std::max({max_speed, -c.v_min, c.v_max});
  }
  if (max_speed * dt > 5.0 * r_grid.h) {
    throw Error(ErrorKind::GridTooCoarse, "max_speed * dt = " + std::to_string(max_speed * dt) +
                                              " exceeds 5h = " + std::to_string(5.0 * r_grid.h));
  }

  // Per (node, velocity) the departure cell, interpolation weight and running cost
  // do not depend on t.
  struct Move {
    std::size_t cell;
    double w;
    double cost;
  };
  std::vector<std::vector<Move>> moves(m);
  const double eps = 1e-9 * r_grid.h;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = r_grid.r(i);
    for (double v : cone_samples(velocity_cone(r, problem.n), options.velocity_samples)) {
      const double x = r - v * dt;
      if (x < r_grid.r_min - eps || x > r_grid.r_max + eps) continue;
      const double s = std::clamp((x - r_grid.r_min) / r_grid.h, 0.0, double(m - 1));
      auto cell = static_cast<std::size_t>(std::min(std::floor(s), double(m - 2)));
      double w = s - static_cast<double>(cell);
      if (w < 1e-12) w = 0.0;
      if (w > 1.0 - 1e-12) w = 1.0;
      moves[i].push_back({cell, w, dt * problem.F(r - 0.5 * v * dt)});
    }
  }

  ValueTable table;
  table.grid = r_grid;
  const auto steps = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
  table.t_grid.reserve(steps + 1);
  table.slices.reserve(steps + 1);
  table.t_grid.push_back(0.0);
  table.slices.push_back(problem.sample_G(r_grid));
  for (std::size_t k = 1; k <= steps; ++k) {
    const auto& prev = table.slices.back();
    std::vector<double> next(m, kInf);
    for (std::size_t i = 0; i < m; ++i) {
      double best = kInf;
      for (const Move& mv : moves[i]) {
        double u;
        if (mv.w == 0.0) {
          u = prev[mv.cell];
        } else if (mv.w == 1.0) {
          u = prev[mv.cell + 1];
        } else if (is_inf(prev[mv.cell]) || is_inf(prev[mv.cell + 1])) {
          u = kInf;
        } else {
          u = (1.0 - mv.w) * prev[mv.cell] + mv.w * prev[mv.cell + 1];
        }
        best = std::min(best, sat_add(u, mv.cost));
      }
      next[i] = best;
    }
    table.t_grid.push_back(static_cast<double>(k) * dt);
    table.slices.push_back(std::move(next));
  }
  return table;
}

double brute_force_value(const RadialProblem& problem, double r, double t, int K, int M,
                         double cone_tol, double substep) {
  if (K < 1 || K > 6 || M < 2 || M > 9) {
    throw Error(ErrorKind::DomainError, "brute_force_value needs 1 <= K <= 6, 2 <= M <= 9");
  }
  if (!(t > 0.0) || !(r > 0.0)) throw Error(ErrorKind::DomainError, "need r > 0 and t > 0");
  const double seg = t / K;
  const double lo = problem.grid.r_min;
  const double hi = problem.grid.r_max;
  double best = kInf;

  // depth-first over segments, last segment first
  struct Frame {
    double end;
    double cost;
    int depth;
  };
  std::vector<Frame> stack{{r, 0.0, 0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.depth == K) {
      best = std::min(best, f.cost + problem.G(f.end));
      continue;
    }
    for (double v : cone_samples(velocity_cone(f.end, problem.n), M)) {
      const double start = f.end - v * seg;
      if (!(start > 0.0) || start < lo - 1e-12 || start > hi + 1e-12) continue;
      if (!segment_admissible(start, f.end, seg, problem.n, cone_tol)) continue;
      stack.push_back({start, f.cost + segment_cost(problem, start, f.end, seg, substep),
                       f.depth + 1});
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Travel cost and the limit profile

namespace {

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-12);
}

// Running cost of a monotone leg between a < b at the fastest admissible speed.
double leg_cost(const RadialProblem& problem, double a, double b, bool rightward) {
  const double n1 = problem.n - 1;
  if (rightward) {
    return integrate([&](double rho) { return problem.F(rho) / (1.0 - n1 / rho); }, a, b);
  }
  return integrate([&](double rho) { return problem.F(rho) / (1.0 + n1 / rho); }, a, b);
}

}  // namespace

double travel_cost(const RadialProblem& problem, double r_from, double r_to) {
  if (!(r_from > 0.0) || !(r_to > 0.0)) {
    throw Error(ErrorKind::DomainError, "travel_cost needs positive radii");
  }
  if (r_from == r_to) return 0.0;
  if (r_to < r_from) return leg_cost(problem, r_to, r_from, false);
  if (r_from <= problem.interface()) return kInf;
  return leg_cost(problem, r_from, r_to, true);
}

LimitProfile limit_profile(const RadialProblem& problem, const ValueTable& table,
                           double limit_tol, const RadialGrid& eval_grid) {
  const AubrySet aubry = aubry_set(problem, table.grid, problem.aubry_tol);
  if (aubry.empty()) throw Error(ErrorKind::EmptyAubry, "no Aubry node on the DP grid");

  const std::size_t last = table.t_grid.size() - 1;
  const double t_from = 0.9 * table.t_max();
  LimitProfile lp;
  lp.grid = eval_grid;
  for (std::size_t j = 0; j < aubry.nodes.size(); ++j) {
    const std::size_t i = aubry.nodes[j];
    const double final_value = table.value(i, last);
    for (std::size_t k = table.time_index(t_from); k <= last; ++k) {
      const double drift = std::abs(table.value(i, k) - final_value);
      if (!(drift < limit_tol)) {
        throw Error(ErrorKind::NotStabilized,
                    "U(" + std::to_string(aubry.radii[j]) + ", t) still moves by " +
                        std::to_string(drift) + " over the last 10% of the horizon");
      }
    }
    lp.aubry_radii.push_back(aubry.radii[j]);
    lp.v_G.push_back(final_value);
  }

  const std::size_t m = eval_grid.size();
  lp.V.assign(m, kInf);
  lp.travel.assign(lp.aubry_radii.size(), std::vector<double>(m, kInf));
  for (std::size_t j = 0; j < lp.aubry_radii.size(); ++j) {
    const double s = lp.aubry_radii[j];
    auto& d = lp.travel[j];
    // walk outward from s accumulating leg integrals between consecutive nodes
    double acc = 0.0;
    double prev = s;
    for (std::size_t q = m; q-- > 0;) {
      const double r = eval_grid.r(q);
      if (r > s) continue;
      acc += leg_cost(problem, r, prev, false);
      prev = r;
      d[q] = acc;
    }
    if (s > problem.interface()) {
      acc = 0.0;
      prev = s;
      for (std::size_t q = 0; q < m; ++q) {
        const double r = eval_grid.r(q);
        if (r <= s) continue;
        acc += leg_cost(problem, prev, r, true);
        prev = r;
        d[q] = acc;
      }
    }
    for (std::size_t q = 0; q < m; ++q) lp.V[q] = std::min(lp.V[q], sat_add(d[q], lp.v_G[j]));
  }
  return lp;
}

Interval cone_of_influence(double r_star, double t, int n) {
  if (!(r_star > n - 1)) throw Error(ErrorKind::DomainError, "cone_of_influence needs r* > n-1");
  if (!(t >= 0.0)) throw Error(ErrorKind::DomainError, "cone_of_influence needs t >= 0");
  return {r_star - t, r_star + 2.0 * t};
}

}  // namespace gcurve::control
