#include <doctest.h>

#include <cmath>

#include "gcurve/errors.hpp"
#include "gcurve/model.hpp"
#include "gcurve/periodic.hpp"

using namespace gcurve;
using periodic::CurvatureParams;

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

Field sample(const PeriodicGrid& grid, auto&& fn) {
  Field f{grid, std::vector<double>(grid.size()), 0.0};
  for (std::size_t k = 0; k < grid.size(); ++k) f.values[k] = fn(grid.coords(k));
  return f;
}

PeriodicProblem flat_problem(int N, double c) {
  PeriodicConfig cfg;
  cfg.N = N;
  cfg.f = ScalarSpec::constant(c);
  return build_periodic(cfg);
}

PeriodicProblem smooth_problem(int N, bool wind) {
  PeriodicConfig cfg;
  cfg.N = N;
  cfg.f = ScalarSpec::expr("sin(2*pi*x1)^2 + sin(2*pi*x2)^2");
  cfg.g = ScalarSpec::expr("cos(2*pi*x1)*cos(2*pi*x2)");
  if (wind) {
    cfg.wind = {ScalarSpec::expr("0.5*(sin(2*pi*x1)^2 + sin(2*pi*x2)^2)"),
                ScalarSpec::expr("0.25*(sin(2*pi*x1)^2 + sin(2*pi*x2)^2)")};
  }
  return build_periodic(cfg);
}

}  // namespace

TEST_CASE("grad_central") {
  const PeriodicGrid grid(2, 64);
  const auto c = sample(grid, [](const auto&) { return 3.0; });
  const auto g0 = periodic::grad_central(c, 17);
  CHECK(g0[0] == 0.0);
  CHECK(g0[1] == 0.0);

  const double h = grid.h;
  const auto u1 = sample(grid, [](const auto& x) { return std::cos(kTwoPi * x[0]); });
  const auto g1 = periodic::grad_central(u1, grid.flat_index({16, 5, 0}));  // x1 = 1/4
  CHECK(std::abs(g1[0] + kTwoPi) <= 50.0 * h * h);
  CHECK(std::abs(g1[1]) <= 1e-12);

  const auto u2 = sample(grid, [](const auto& x) { return std::cos(kTwoPi * x[1]); });
  const auto g2 = periodic::grad_central(u2, grid.flat_index({9, 48, 0}));  // x2 = 3/4
  CHECK(std::abs(g2[0]) <= 1e-12);
  CHECK(std::abs(g2[1] - kTwoPi) <= 50.0 * h * h);

  // Wrap-around: node 0 uses node N-1.
  const auto g3 = periodic::grad_central(u2, grid.flat_index({0, 0, 0}));
  CHECK(std::abs(g3[1]) <= 1e-12);
}

TEST_CASE("curvature_cutoff: constant and one-dimensional profiles") {
  const PeriodicGrid grid(2, 64);
  const CurvatureParams prm;
  const auto c = sample(grid, [](const auto&) { return -1.5; });
  for (std::size_t k = 0; k < grid.size(); k += 37) CHECK(periodic::curvature_cutoff(c, k, prm) == 0.0);

  const auto u = sample(grid, [](const auto& x) { return std::cos(kTwoPi * x[0]); });
  for (int i = 0; i < grid.N; ++i) {
    const std::size_t k = grid.flat_index({i, 7, 0});
    const double exact = std::abs(kTwoPi * std::sin(kTwoPi * i * grid.h));
    CHECK(std::abs(periodic::curvature_cutoff(u, k, prm) - exact) <= 4.0 * kTwoPi * kTwoPi * grid.h);
  }
}

TEST_CASE("curvature_cutoff: radial bump against the closed-form mean curvature") {
  // u = exp(-rho^2 / s^2) around the cell centre. For a radial u in two
  // dimensions the operator is -u_rho / rho + |u_rho| (before the cutoff).
  const double s = 0.2;
  auto error_at = [&](int N) {
    const PeriodicGrid grid(2, N);
    const auto u = sample(grid, [&](const auto& x) {
      const double d2 = (x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5);
      return std::exp(-d2 / (s * s));
    });
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto x = grid.coords(k);
      const double rho = std::hypot(x[0] - 0.5, x[1] - 0.5);
      if (rho < 0.1 || rho > 0.2) continue;  // around the waist rho = s / sqrt 2
      const double u_rho = -2.0 * rho / (s * s) * std::exp(-rho * rho / (s * s));
      const double exact = std::max(0.0, -u_rho / rho + std::abs(u_rho));
      worst = std::max(worst, std::abs(periodic::curvature_cutoff(u, k, {}) - exact) / exact);
    }
    return worst;
  };
  const double e64 = error_at(64);
  const double e128 = error_at(128);
  CHECK(e64 <= 10.0 * (2.0 / 64));      // O(h + eps) with eps = h
  CHECK(e128 <= 10.0 * (2.0 / 128));
  CHECK(e128 <= 0.7 * e64);             // and shrinking with h
}

TEST_CASE("cfl_dt") {
  const auto p32 = flat_problem(32, 0.0);
  const CurvatureParams prm;
  const double dt = periodic::cfl_dt(p32, prm);
  const double h = p32.grid.h;
  CHECK(dt > 0.0);
  CHECK(dt <= 0.5 * h * h / 4.0);  // second-order part alone, n = 2

  const auto calm = smooth_problem(32, false);
  const auto windy = smooth_problem(32, true);
  CHECK(periodic::cfl_dt(windy, prm) <= periodic::cfl_dt(calm, prm));

  const auto p64 = flat_problem(64, 0.0);
  CHECK(periodic::cfl_dt(p64, prm) <= 0.5 * dt);
}

TEST_CASE("step: flat data evolve exactly linearly") {
  const double c = 0.7;
  const auto p = flat_problem(64, c);
  const CurvatureParams prm;
  const double dt = periodic::cfl_dt(p, prm);
  periodic::PeriodicState s{Field{p.grid, p.g, 0.0}, 0, 0.0};
  for (int k = 0; k < 1000; ++k) s = periodic::step(s, p, prm, dt);
  CHECK(s.step_count == 1000);
  CHECK(s.dt_last == dt);
  const double exact = c * 1000 * dt;
  for (double v : s.field.values) CHECK(std::abs(v - exact) <= 1e-12 * exact);
}

TEST_CASE("step: constant data with zero source is stationary") {
  PeriodicConfig cfg;
  cfg.N = 16;
  cfg.g = ScalarSpec::constant(2.5);
  const auto p = build_periodic(cfg);
  const CurvatureParams prm;
  periodic::PeriodicState s{Field{p.grid, p.g, 0.0}, 0, 0.0};
  for (int k = 0; k < 50; ++k) s = periodic::step(s, p, prm, periodic::cfl_dt(p, prm));
  for (double v : s.field.values) CHECK(v == 2.5);
}

TEST_CASE("step: CFL violation") {
  const auto p = flat_problem(16, 1.0);
  const CurvatureParams prm;
  periodic::PeriodicState s{Field{p.grid, p.g, 0.0}, 0, 0.0};
  CHECK_THROWS_AS(periodic::step(s, p, prm, 1.01 * periodic::cfl_dt(p, prm)), Error);
  try {
    periodic::step(s, p, prm, 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CFLViolation);
  }
  CHECK_THROWS_AS(periodic::evolve(p, prm, 0.1, 0.1, {}, 1.0), Error);
}

TEST_CASE("Stepper matches step") {
  const auto p = smooth_problem(24, true);
  const CurvatureParams prm;
  const periodic::Stepper st(p, prm);
  CHECK(st.dt_limit() == periodic::cfl_dt(p, prm));
  periodic::PeriodicState s{Field{p.grid, p.g, 0.0}, 0, 0.0};
  std::vector<double> u = p.g, next(u.size());
  for (int k = 0; k < 20; ++k) {
    s = periodic::step(s, p, prm, st.dt_limit());
    st.advance(u, next, st.dt_limit());
    std::swap(u, next);
  }
  CHECK(u == s.field.values);
}

TEST_CASE("step agrees with node_terms") {
  const auto p = smooth_problem(24, true);
  const CurvatureParams prm;
  const double dt = 0.5 * periodic::cfl_dt(p, prm);
  const auto next = periodic::step({Field{p.grid, p.g, 0.0}, 0, 0.0}, p, prm, dt);
  for (std::size_t k = 0; k < p.grid.size(); k += 11) {
    const auto t = periodic::node_terms(p, p.g, k, prm);
    CHECK(next.field.values[k] == p.g[k] - dt * t.residual);
    CHECK(t.cutoff >= 0.0);
    CHECK(t.residual == doctest::Approx(t.cutoff + t.advection - p.f[k]));
  }
}

TEST_CASE("evolve: snapshot times and divergence guard") {
  const auto p = smooth_problem(16, false);
  CurvatureParams prm;
  const auto snaps = periodic::evolve(p, prm, 0.05, 0.02);
  REQUIRE(snaps.size() == 4);
  CHECK(snaps[0].time == 0.0);
  CHECK(snaps[1].time == doctest::Approx(0.02));
  CHECK(snaps[2].time == doctest::Approx(0.04));
  CHECK(snaps[3].time == 0.05);
  CHECK(snaps[0].values == p.g);

  prm.diverge_factor = 1e-3;
  try {
    periodic::evolve(p, prm, 0.05, 0.05);
    FAIL("expected Diverged");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Diverged);
  }
}

TEST_CASE("discrete comparison and per-step invariants without wind") {
  const auto p = smooth_problem(32, false);
  const CurvatureParams prm;
  const periodic::Stepper st(p, prm);
  std::vector<double> lo = p.g, hi = p.g;
  for (std::size_t k = 0; k < hi.size(); ++k) {
    const auto x = p.grid.coords(k);
    hi[k] += 0.05 + 0.05 * std::sin(kTwoPi * x[1]) * std::sin(kTwoPi * x[1]);
  }
  const auto A = aubry_set(p);
  std::vector<double> a(lo.size()), b(hi.size());
  for (int step = 0; step < 2000; ++step) {
    st.advance(lo, a, st.dt_limit());
    st.advance(hi, b, st.dt_limit());
    for (std::size_t k = 0; k < lo.size(); ++k) {
      REQUIRE(a[k] <= b[k]);
      REQUIRE(a[k] - lo[k] <= st.dt_limit() * p.f[k] + 1e-12);
    }
    for (std::size_t k : A.nodes) REQUIRE(a[k] <= lo[k] + 10.0 * p.grid.h * st.dt_limit());
    std::swap(lo, a);
    std::swap(hi, b);
  }
}

TEST_CASE("translation equivariance") {
  const auto base = smooth_problem(16, true);
  auto shift = [&](const std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[base.grid.shifted(k, 0, 1)] = v[k];
    return out;
  };
  PeriodicConfig cfg;
  cfg.N = 16;
  cfg.f.samples = shift(base.f);
  cfg.f.expression.reset();
  cfg.g.samples = shift(base.g);
  cfg.g.expression.reset();
  for (int a = 0; a < 2; ++a) {
    ScalarSpec w;
    w.samples = shift(base.wind[static_cast<std::size_t>(a)]);
    cfg.wind.push_back(w);
  }
  const auto moved = build_periodic(cfg);
  const CurvatureParams prm;
  const double dt = periodic::cfl_dt(base, prm);
  const auto u0 = periodic::evolve(base, prm, 0.02, 0.02, {}, dt).back().values;
  const auto u1 = periodic::evolve(moved, prm, 0.02, 0.02, {}, dt).back().values;
  CHECK(u1 == shift(u0));
}

TEST_CASE("ergodic_residual") {
  PeriodicConfig cfg;
  cfg.N = 16;
  const auto zero = build_periodic(cfg);
  const Field v{zero.grid, std::vector<double>(zero.grid.size(), 4.0), 0.0};
  for (double r : periodic::ergodic_residual(v, zero, {}).values) CHECK(r == 0.0);

  const auto p = smooth_problem(16, false);
  const auto res = periodic::ergodic_residual(v, p, {});
  for (std::size_t k = 0; k < res.values.size(); ++k) CHECK(res.values[k] == -p.f[k]);
}
