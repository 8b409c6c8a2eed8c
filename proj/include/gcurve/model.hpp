#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gcurve/expr.hpp"

namespace gcurve {

// ---------------------------------------------------------------------------
// Grids and fields

/// Uniform grid on the unit torus with N nodes per axis; node i sits at i/N.
/// Flat index is row-major with the first axis slowest.
struct PeriodicGrid {
  int dim = 2;
  int N = 0;
  double h = 0.0;

  PeriodicGrid() = default;
  PeriodicGrid(int dim, int N);

  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }
  std::array<int, 3> multi_index(std::size_t flat) const;
  std::size_t flat_index(const std::array<int, 3>& idx) const;
  /// Flat index of the node `offset` cells away along `axis`, wrapping periodically.
  std::size_t shifted(std::size_t flat, int axis, int offset) const;
  std::array<double, 3> coords(std::size_t flat) const;

  bool operator==(const PeriodicGrid& o) const { return dim == o.dim && N == o.N; }

 private:
  std::size_t size_ = 0;
  std::array<std::size_t, 3> strides_{};
};

/// Uniform radial grid r_i = r_min + i h, i = 0 .. n_nodes-1.
struct RadialGrid {
  double r_min = 0.0;
  double r_max = 0.0;
  int n_nodes = 0;
  double h = 0.0;

  RadialGrid() = default;
  RadialGrid(double r_min, double r_max, int n_nodes);

  double r(std::size_t i) const { return r_min + static_cast<double>(i) * h; }
  std::size_t size() const { return static_cast<std::size_t>(n_nodes); }
  /// Index of the node nearest to `r`, clamped to the grid.
  std::size_t nearest(double r) const;

  bool operator==(const RadialGrid& o) const {
    return r_min == o.r_min && r_max == o.r_max && n_nodes == o.n_nodes;
  }
};

/// One time slice of the periodic solution.
struct Field {
  PeriodicGrid grid;
  std::vector<double> values;
  double time = 0.0;

  double max_abs() const;
  bool finite() const;
};

/// One time slice of the radial solution.
struct RadialField {
  RadialGrid grid;
  std::vector<double> values;
  double time = 0.0;

  /// Linear interpolation in r, clamped at the ends.
  double at(double r) const;
  bool finite() const;
};

// ---------------------------------------------------------------------------
// Coefficient descriptions as they arrive from configuration

/// A scalar coefficient given either as an expression or as samples.
/// For radial profiles `sample_r` holds abscissae; when it is empty the samples
/// are spread uniformly over the radial domain. For periodic fields the samples
/// are node values in flat order.
struct ScalarSpec {
  std::optional<std::string> expression;
  std::vector<double> samples;
  std::vector<double> sample_r;

  static ScalarSpec expr(std::string s) { return ScalarSpec{std::move(s), {}, {}}; }
  static ScalarSpec constant(double c);
  bool closed_form() const { return expression.has_value(); }
};

/// Scalar function of the radius: compiled expression or piecewise-linear samples.
class Profile {
 public:
  Profile() = default;
  static Profile from_spec(const ScalarSpec& spec, double r_lo, double r_hi);

  double operator()(double r) const;
  bool closed_form() const { return expr_.has_value(); }
  std::string describe() const;

 private:
  std::optional<Expr> expr_;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

// ---------------------------------------------------------------------------
// Problems

struct PeriodicConfig {
  int dim = 2;
  int N = 64;
  ScalarSpec f = ScalarSpec::constant(0.0);
  ScalarSpec g = ScalarSpec::constant(0.0);
  std::vector<ScalarSpec> wind;  // empty means W = 0
  bool ergodic = false;
  std::optional<double> aubry_tol;
};

struct PeriodicProblem {
  PeriodicGrid grid;
  std::vector<double> f;
  std::vector<double> g;
  std::vector<std::vector<double>> wind;  // one array per axis
  double lip_f = 0.0;
  double lip_g = 0.0;
  bool ergodic = false;
  bool closed_form = true;
  double aubry_tol = 1e-9;
  std::vector<std::string> warnings;

  double max_f() const;
  double max_abs_g() const;
  double max_wind() const;
  bool wind_zero() const;
};

enum class OuterBoundary { ClampedSlope, ExtrapolateFree };

struct RadialConfig {
  int n = 2;
  ScalarSpec F = ScalarSpec::constant(0.0);
  ScalarSpec G = ScalarSpec::constant(0.0);
  double c_F = 1.0;
  std::optional<double> r_min;  // default 1e-3 (n-1)
  double r_max = 12.0;
  int grid_n = 1200;
  bool ergodic = false;
  std::optional<double> aubry_tol;
  double tail_tol = 1e-2;
  OuterBoundary outer = OuterBoundary::ClampedSlope;
};

struct RadialProblem {
  int n = 2;
  Profile F;
  Profile G;
  double c_F = 1.0;
  RadialGrid grid;
  bool ergodic = false;
  double aubry_tol = 1e-9;
  OuterBoundary outer = OuterBoundary::ClampedSlope;
  std::vector<std::string> warnings;

  /// The interface radius n-1 where the velocity cone loses its positive part.
  double interface() const { return static_cast<double>(n - 1); }
  std::vector<double> sample_F() const { return sample_F(grid); }
  std::vector<double> sample_F(const RadialGrid& on) const;
  std::vector<double> sample_G(const RadialGrid& on) const;
  double max_F() const;
};

/// Validates (P1)-(P3) style standing assumptions. Throws Error on violation.
PeriodicProblem build_periodic(const PeriodicConfig& config);
RadialProblem build_radial(const RadialConfig& config);

/// Discrete Lipschitz constant: 1.01 times the largest nearest-neighbour quotient.
double discrete_lipschitz(const PeriodicGrid& grid, const std::vector<double>& values);

// ---------------------------------------------------------------------------
// Aubry set

struct AubrySet {
  std::vector<std::size_t> nodes;  // sorted node indices where the source is <= tol
  std::vector<double> radii;       // radial only: r of each node
  std::vector<std::pair<std::size_t, std::size_t>> intervals;  // maximal runs [first, last]
  std::optional<double> S0, S1, R0, R1;

  bool empty() const { return nodes.empty(); }
  bool contains(std::size_t node) const;
};

AubrySet aubry_set(const PeriodicProblem& problem, double aubry_tol);
AubrySet aubry_set(const PeriodicProblem& problem);
AubrySet aubry_set(const RadialProblem& problem, double aubry_tol);
AubrySet aubry_set(const RadialProblem& problem);
/// Radial Aubry set on a grid other than the problem's own.
AubrySet aubry_set(const RadialProblem& problem, const RadialGrid& grid, double aubry_tol);

}  // namespace gcurve
