#pragma once

#include <functional>
#include <vector>

#include "gcurve/model.hpp"

namespace gcurve::radial {

struct RadialParams {
  double cfl_safety = 0.9;
  double diverge_factor = 1e6;
};

struct RadialState {
  RadialField field;
  long step_count = 0;
  double dt_last = 0.0;
};

/// H(r, p) = (-(n-1) p / r + |p|)_+ - F. Throws DomainError for r <= 0.
double hamiltonian(int n, double r, double p, double F_at_r);
double hamiltonian(const RadialProblem& problem, double r, double p);

/// Upwind (Godunov) flux for the convex Hamiltonian.
///
/// The p-dependence is the support function of the velocity cone
/// [v_min, v_max], max(v_max p, v_min p). Each branch is a transport term with
/// that speed: the positive speed reads the backward quotient, the negative
/// speed the forward one, and the cutoff adds the zero branch:
///   max(0, v_max p^-, v_min p^+) - F(r).
/// Non-decreasing in p^-, non-increasing in p^+, and consistent.
double numerical_hamiltonian(int n, double r, double p_minus, double p_plus, double F_at_r);
double numerical_hamiltonian(const RadialProblem& problem, double r, double p_minus,
                             double p_plus);

double cfl_dt(const RadialProblem& problem, const RadialParams& params = {});

RadialState step_radial(const RadialState& state, const RadialProblem& problem, double dt,
                        const RadialParams& params = {});

/// Per-node flux coefficients built once for repeated stepping.
class Stepper {
 public:
  explicit Stepper(const RadialProblem& problem, const RadialParams& params = {});
  double dt_limit() const { return dt_limit_; }
  /// Numerical Hamiltonian at node i, boundary closures included.
  double flux(const std::vector<double>& u, std::size_t i) const;
  /// out = u - dt * flux(u). No CFL check on `dt`.
  void advance(const std::vector<double>& u, std::vector<double>& out, double dt) const;

 private:
  void quotients(const std::vector<double>& u, std::size_t i, double& pm, double& pp) const;

  std::vector<double> v_max_;
  std::vector<double> v_min_;
  std::vector<double> F_;
  double h_ = 0.0;
  double c_F_ = 0.0;
  bool inner_inflow_ = false;  // r_min > n-1: characteristics enter at the inner edge
  OuterBoundary outer_ = OuterBoundary::ClampedSlope;
  double dt_limit_ = 0.0;
};

using StepObserver =
    std::function<void(const RadialField& before, const RadialField& after, double dt)>;

std::vector<RadialField> evolve_radial(const RadialProblem& problem, double T,
                                       double snapshot_every, const StepObserver& observer = {},
                                       const RadialParams& params = {}, double dt_override = 0.0);

std::vector<RadialField> evolve_radial_from(const RadialField& initial,
                                            const RadialProblem& problem, double T,
                                            double snapshot_every,
                                            const StepObserver& observer = {},
                                            const RadialParams& params = {},
                                            double dt_override = 0.0);

/// (-(n-1) V_r / r + |V_r|)_+ - F through the same flux and boundary closure.
RadialField ergodic_residual_radial(const RadialField& V, const RadialProblem& problem);

}  // namespace gcurve::radial
