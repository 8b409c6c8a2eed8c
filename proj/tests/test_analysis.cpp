#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gcurve/analysis.hpp"
#include "gcurve/control.hpp"
#include "gcurve/errors.hpp"
#include "gcurve/periodic.hpp"
#include "gcurve/radial.hpp"

using namespace gcurve;
using namespace gcurve::analysis;

namespace {

// Two nodes: node 0 decays like e^{-t}, node 1 is constant.
Series decaying(double T, double dt) {
  Series s;
  for (int k = 0; k * dt <= T + 1e-12; ++k) {
    const double t = k * dt;
    s.times.push_back(t);
    s.values.push_back({1.0 + std::exp(-t), 2.0});
  }
  return s;
}

PeriodicProblem periodic_problem(const char* f, const char* g, int N = 16) {
  PeriodicConfig c;
  c.N = N;
  c.f = ScalarSpec::expr(f);
  c.g = ScalarSpec::expr(g);
  return build_periodic(c);
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("convergence_study: windowed oscillation of a decaying series") {
  const auto s = decaying(10.0, 0.1);
  const std::vector<std::size_t> region{0, 1};
  const auto rep = convergence_study(s, region, 2.0, 1e-3);
  REQUIRE(rep.sup_osc.size() == 5);
  for (std::size_t w = 0; w < rep.sup_osc.size(); ++w) {
    const double a = rep.window_start[w];
    CHECK(rep.sup_osc[w] == doctest::Approx(std::exp(-a) - std::exp(-(a + 2.0))).epsilon(1e-9));
  }
  CHECK_FALSE(convergence_study(s, region, 2.0, 1e-4).converged);
  CHECK(rep.converged);
  REQUIRE(rep.limit_values.size() == 2);
  CHECK(rep.limit_values[1] == 2.0);

  CHECK(kind_of([&] { convergence_study(s, region, 4.0, 1e-3); }) ==
        ErrorKind::InsufficientHorizon);
  CHECK(kind_of([&] { convergence_study(decaying(1.0, 0.5), region, 0.3, 1e-3); }) ==
        ErrorKind::InsufficientHorizon);
}

TEST_CASE("convergence_study: zero source flattens and converges") {
  const auto p = periodic_problem("0", "0.2*cos(2*pi*x1)*cos(2*pi*x2)");
  const auto snaps = periodic::evolve(p, {}, 6.0, 0.05);
  const auto rep = convergence_study(Series::from(snaps), all_nodes(p.grid), 0.6, 1e-3);
  CHECK(rep.converged);
  CHECK(rep.sup_osc.back() < 1e-6);
  // Non-increasing everywhere and bounded below by min g (comparison with constants).
  const double gmin = *std::min_element(p.g.begin(), p.g.end());
  for (std::size_t k = 1; k < snaps.size(); ++k) {
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
      CHECK(snaps[k].values[i] <= snaps[k - 1].values[i]);
      CHECK(snaps[k].values[i] >= gmin);
    }
  }
}

TEST_CASE("convergence_study: exact stationary data show no oscillation") {
  RadialConfig c;
  c.n = 2;
  c.F = ScalarSpec::expr("1 - 1/r");
  c.G = ScalarSpec::expr("r");
  c.r_min = 1.5;
  c.r_max = 12.0;
  c.grid_n = 400;
  const auto p = build_radial(c);
  const auto snaps = radial::evolve_radial(p, 3.0, 0.1);
  const auto rep = convergence_study(Series::from(snaps), region_nodes(p.grid, 2.0, 10.0), 0.6, 1e-3);
  CHECK(rep.sup_osc.front() <= 5.0 * p.grid.h);
}

TEST_CASE("aubry_monotonicity_check") {
  Series s;
  s.times = {0.0, 1.0, 2.0};
  s.values = {{1.0, 0.0}, {0.9, 0.0}, {0.95, 0.0}};
  AubrySet A;
  A.nodes = {0};
  const auto rep = aubry_monotonicity_check(s, A, 1e-3);
  CHECK_FALSE(rep.ok);
  CHECK(rep.worst_increase == doctest::Approx(0.05));
  CHECK(rep.worst_excess == doctest::Approx(0.05 - 10.0 * 1e-3));

  s.values[2][0] = 0.9 + 0.5 * 10.0 * 1e-3;  // within the slack
  CHECK(aubry_monotonicity_check(s, A, 1e-3).ok);
}

TEST_CASE("streaming monitors") {
  const std::vector<double> f{1.0, 0.0, 2.0};
  CutoffSignMonitor sign(f);
  const std::vector<double> a{0.0, 0.0, 0.0}, b{0.1, -0.2, 0.25};
  sign.observe(a, b, 0.1);
  CHECK(sign.worst() == doctest::Approx(0.05));

  AubryMonitor mon({1}, 0.1);
  mon.observe(a, b, 0.1);
  CHECK(mon.report().ok);
  const std::vector<double> up{0.0, 0.2, 0.0};
  mon.observe(a, up, 0.1);
  CHECK_FALSE(mon.report().ok);

  TimeLipschitzMonitor lip({0, 2});
  lip.observe(a, b, 0.1);
  CHECK(lip.value() == doctest::Approx(2.5));
  CHECK(lip.dt_max() == 0.1);
}

TEST_CASE("ComparisonChain tallies consecutive members") {
  auto shift_up = [](const std::vector<double>& u, std::vector<double>& o, double dt) {
    for (std::size_t i = 0; i < u.size(); ++i) o[i] = u[i] + dt;
  };
  ComparisonChain chain(shift_up, {{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}}, 1);
  std::vector<double> base{1.0, 1.0};
  for (int k = 0; k < 3; ++k) {
    for (double& v : base) v += 0.5;
    chain.observe(base, 0.5);
  }
  CHECK(chain.report().steps == 3);
  CHECK(chain.report().violations == 0);
  CHECK(chain.report().min_gap == doctest::Approx(1.0));
  CHECK(chain.pairs() == 2);

  ComparisonChain bad(shift_up, {{0.0, 3.0}, {1.0, 1.0}}, 1);
  CHECK(bad.report().violations == 1);
  CHECK_THROWS_AS(ComparisonChain(shift_up, {{0.0}}, 0), Error);
}

TEST_CASE("comparison_check pairs") {
  const auto p = periodic_problem("sin(2*pi*x1)^2", "cos(2*pi*x2)");
  std::vector<double> hi = p.g;
  for (double& v : hi) v += 0.1;
  const auto rep = comparison_check(p, p.g, hi, {}, 0.05);
  CHECK(rep.violations == 0);
  CHECK(rep.steps > 0);
  CHECK(rep.min_gap == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("space barrier") {
  const auto flat = periodic_problem("sin(2*pi*x1)^2", "1");
  const auto snaps = periodic::evolve(flat, {}, 0.1, 0.05);
  const auto fr = barrier_sandwich_periodic(flat, {1, 0, 0}, snaps);
  CHECK(fr.C0 == flat.lip_f);
  CHECK(fr.C1 == 0.0);
  CHECK(fr.worst_excess <= 10.0 * flat.grid.h);
  // Zero constants turn any spatial variation into excess.
  CHECK(barrier_sandwich_periodic(flat, {1, 0, 0}, snaps, 0.0, 0.0).worst_excess > 0.0);

  // f = 0: the bound reduces to C1 |y| uniformly in time.
  const auto p = periodic_problem("0", "cos(2*pi*x1)*cos(2*pi*x2)");
  const auto s2 = periodic::evolve(p, {}, 0.2, 0.05);
  const auto rep = barrier_sandwich_periodic(p, {0, 1, 0}, s2, 0.0);
  CHECK(rep.worst_excess <= 10.0 * p.grid.h);
  CHECK(rep.shift_norm == doctest::Approx(p.grid.h));
  // Torus-minimal shift: N - 1 cells is one cell backwards.
  CHECK(barrier_sandwich_periodic(p, {15, 0, 0}, s2).shift_norm == doctest::Approx(p.grid.h));

  PeriodicConfig w;
  w.N = 16;
  w.f = ScalarSpec::expr("sin(2*pi*x1)^2");
  w.wind = {ScalarSpec::expr("sin(2*pi*x1)^2"), ScalarSpec::constant(0.0)};
  const auto windy = build_periodic(w);
  CHECK(kind_of([&] { barrier_sandwich_periodic(windy, {1, 0, 0}, s2); }) == ErrorKind::WindNotZero);
}

TEST_CASE("time barrier is exact for flat solutions") {
  const auto p = periodic_problem("0.3", "2");
  CHECK(initial_nonlinearity_bound(p, {}) == 0.0);
  const auto snaps = periodic::evolve(p, {}, 0.1, 0.02);
  const auto rep = time_barrier_check(p, snaps, {});
  CHECK(rep.bound == doctest::Approx(0.3));
  CHECK(rep.worst_ratio == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(rep.ratio_excess <= 1e-12);
  CHECK(rep.shift_excess <= 1e-12);
}

TEST_CASE("lipschitz_radial") {
  RadialConfig c;
  c.n = 3;
  c.F = ScalarSpec::constant(0.0);
  c.G = ScalarSpec::expr("sin(r)");
  c.r_min = 0.5;
  c.r_max = 12.0;
  c.grid_n = 231;
  const auto p = build_radial(c);
  const auto snaps = radial::evolve_radial(p, 0.5, 0.1);
  const std::vector<double> alphas{2.5, 3.0, 4.0, 8.0};
  const auto rep = lipschitz_radial(p, snaps, alphas);
  CHECK(rep.time_bound == 0.0);
  // U only decreases where the cutoff is active; the frozen F = 0 bound is
  // about the tail slope, so check the bound table shape here.
  double prev = kInf;
  for (double a : alphas) {
    CHECK(rep.space_bound_by_alpha.at(a) <= prev);
    prev = rep.space_bound_by_alpha.at(a);
    CHECK(rep.space_lip_by_alpha.at(a) >= 0.0);
  }
  const std::vector<double> too_close{2.2};
  CHECK(kind_of([&] { lipschitz_radial(p, snaps, too_close); }) == ErrorKind::ValidationError);

  // F = 0 with constant data: frozen.
  c.G = ScalarSpec::constant(1.0);
  const auto q = build_radial(c);
  const auto frozen = radial::evolve_radial(q, 0.5, 0.1);
  CHECK(lipschitz_radial(q, frozen, alphas).time_lip == 0.0);
}

TEST_CASE("uniqueness_set_check") {
  Series s;
  for (int k = 0; k <= 40; ++k) {
    s.times.push_back(0.1 * k);
    s.values.push_back({3.0, 1.0 + std::exp(-0.1 * k)});
  }
  AubrySet A;
  A.nodes = {0};
  const std::vector<std::size_t> region{0, 1};
  const auto rep = uniqueness_set_check(s, A, region, 1.0, 1e-3);
  CHECK(rep.gap_aubry == 0.0);
  CHECK(rep.gap_global > 1e-3);
  CHECK_FALSE(rep.ok);
  CHECK(rep.flagged.back());

  Series still;
  still.times = s.times;
  still.values.assign(s.times.size(), {3.0, 1.0});
  const auto calm = uniqueness_set_check(still, A, region, 1.0, 1e-3);
  CHECK(calm.ok);
  CHECK(calm.gap_global == 0.0);
}

TEST_CASE("profile_gap") {
  const RadialGrid grid(1.0, 3.0, 21);
  control::LimitProfile lp;
  lp.grid = grid;
  lp.V.assign(grid.size(), 0.0);
  RadialField u{grid, std::vector<double>(grid.size(), 0.0), 0.0};
  for (std::size_t i = 0; i < grid.size(); ++i) u.values[i] = grid.r(i) > 2.5 ? 1.0 : 0.1;
  CHECK(profile_gap(u, lp, 1.0, 2.0) == doctest::Approx(0.1));
  CHECK(profile_gap(u, lp, 1.0, 3.0) == doctest::Approx(1.0));
}

TEST_CASE("reports") {
  const std::vector<CheckResult> checks{{"a", "anchor a", true, 0.5, 1.0, ""},
                                        {"b", "anchor b", false, 2.0, 1.0, "why"}};
  const auto j = to_json(checks);
  CHECK(j["all_pass"] == false);
  CHECK(j["checks"].size() == 2);
  CHECK(j["checks"][1]["detail"] == "why");
  CHECK(j["checks"][0]["anchor"] == "anchor a");
  const auto text = to_text(checks);
  CHECK(text.find("PASS") != std::string::npos);
  CHECK(text.find("FAIL") != std::string::npos);
}
