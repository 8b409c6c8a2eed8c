#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "gcurve/model.hpp"

namespace gcurve::periodic {

enum class CurvatureScheme { CentralRegularized };

struct CurvatureParams {
  double eps_reg = 0.0;  // <= 0 selects the default eps_reg = h
  CurvatureScheme scheme = CurvatureScheme::CentralRegularized;
  double cfl_safety = 0.5;
  double diverge_factor = 1e6;

  double eps(const PeriodicGrid& grid) const { return eps_reg > 0.0 ? eps_reg : grid.h; }
};

struct PeriodicState {
  Field field;
  long step_count = 0;
  double dt_last = 0.0;
};

/// Central gradient (u_{i+1} - u_{i-1}) / 2h per axis; unused axes are zero.
std::array<double, 3> grad_central(const Field& field, std::size_t node);

/// (-a^{ij}(Du) D_ij u + |Du|)_+ at one node.
///
/// a^{ij} = delta_ij - u_i u_j / (|Du|^2 + eps^2) with central first and second
/// differences; |Du| is the Godunov upwind norm for an outward unit normal speed.
/// Where the central gradient norm is <= eps the curvature part is dropped.
double curvature_cutoff(const Field& field, std::size_t node, const CurvatureParams& params);

/// Largest stable explicit step for the problem.
double cfl_dt(const PeriodicProblem& problem, const CurvatureParams& params);

/// Pointwise pieces of the discrete operator at one node.
struct NodeTerms {
  double cutoff = 0.0;     // (curvature + |Du|)_+
  double advection = 0.0;  // W . Du, upwinded per axis by the sign of W
  double residual = 0.0;   // cutoff + advection - f
};

NodeTerms node_terms(const PeriodicProblem& problem, const std::vector<double>& u,
                     std::size_t node, const CurvatureParams& params);

/// One forward Euler step u <- u - dt (cutoff + W.Du - f). Throws CFLViolation when
/// dt exceeds cfl_dt.
PeriodicState step(const PeriodicState& state, const PeriodicProblem& problem,
                   const CurvatureParams& params, double dt);

namespace detail {
struct Stencil;
}

/// Reusable explicit stepper: the neighbour table and the CFL bound are built
/// once. The problem must outlive the stepper. No CFL check on `dt`.
class Stepper {
 public:
  Stepper(const PeriodicProblem& problem, const CurvatureParams& params);
  double dt_limit() const { return dt_limit_; }
  void advance(const std::vector<double>& u, std::vector<double>& out, double dt) const;

 private:
  const PeriodicProblem* problem_;
  std::shared_ptr<const detail::Stencil> stencil_;
  double eps_;
  double dt_limit_;
};

/// Called after every accepted step with the slices before and after.
using StepObserver = std::function<void(const Field& before, const Field& after, double dt)>;

/// Integrates from g up to time T. Snapshots are taken at t = 0, every
/// `snapshot_every`, and at T; steps are shortened to land on those times.
/// A non-positive `dt_override` uses cfl_dt.
std::vector<Field> evolve(const PeriodicProblem& problem, const CurvatureParams& params, double T,
                          double snapshot_every, const StepObserver& observer = {},
                          double dt_override = 0.0);

/// Same as `evolve` but starting from an arbitrary slice (used for time-shift checks).
std::vector<Field> evolve_from(const Field& initial, const PeriodicProblem& problem,
                               const CurvatureParams& params, double T, double snapshot_every,
                               const StepObserver& observer = {}, double dt_override = 0.0);

/// Pointwise stationary residual with the same discretisation as `step`.
Field ergodic_residual(const Field& v, const PeriodicProblem& problem,
                       const CurvatureParams& params);

/// Worker count taken from GCURVE_THREADS (defaults to hardware concurrency).
int worker_count();

}  // namespace gcurve::periodic
