#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gcurve/errors.hpp"
#include "gcurve/expr.hpp"
#include "gcurve/model.hpp"

using namespace gcurve;

namespace {

PeriodicConfig demo_periodic_config(int N = 32) {
  PeriodicConfig c;
  c.dim = 2;
  c.N = N;
  c.f = ScalarSpec::expr("sin(2*pi*x1)^2 + sin(2*pi*x2)^2");
  c.g = ScalarSpec::expr("cos(2*pi*x1)*cos(2*pi*x2)");
  c.wind = {ScalarSpec::expr("0.5*(sin(2*pi*x1)^2 + sin(2*pi*x2)^2)"),
            ScalarSpec::expr("0.25*(sin(2*pi*x1)^2 + sin(2*pi*x2)^2)")};
  c.ergodic = true;
  return c;
}

RadialConfig radial_config(int n, const char* F, const char* G) {
  RadialConfig c;
  c.n = n;
  c.F = ScalarSpec::expr(F);
  c.G = ScalarSpec::expr(G);
  c.c_F = 1.0;
  c.r_min = 0.5;
  c.r_max = 12.0;
  c.grid_n = 231;  // h = 0.05, nodes on 1, 2 and 4
  return c;
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

TEST_CASE("expressions: grammar and precedence") {
  auto e = [](const char* s) { return Expr::compile(s, {"r"}); };
  CHECK(e("1 + 2*3")(0.0) == doctest::Approx(7.0));
  CHECK(e("2^3^2")(0.0) == doctest::Approx(512.0));  // right associative
  CHECK(e("-2^2")(0.0) == doctest::Approx(-4.0));
  CHECK(e("min(1, (r-2)^2)")(2.5) == doctest::Approx(0.25));
  CHECK(e("min(1, (r-2)^2)")(5.0) == doctest::Approx(1.0));
  CHECK(e("max(r, 2, 3)")(1.0) == doctest::Approx(3.0));
  CHECK(e("abs(r) + exp(0) + cos(pi)")(-2.0) == doctest::Approx(2.0));
  CHECK(e("sin(pi/2)")(0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(e("1 +"), Error);
  CHECK_THROWS_AS(e("foo(r)"), Error);
  CHECK_THROWS_AS(e("y + 1"), Error);
  CHECK_THROWS_AS(e("(1"), Error);
}

TEST_CASE("infinity sentinel absorbs sums") {
  CHECK(is_inf(sat_add(kInf, 1.0)));
  CHECK(is_inf(sat_add(-5.0, kInf)));
  CHECK(sat_add(1.0, 2.0) == 3.0);
  CHECK(std::min(kInf, 3.0) == 3.0);
  CHECK(std::isfinite(kInf - kInf));
}

TEST_CASE("periodic grid indexing wraps") {
  PeriodicGrid g(2, 8);
  CHECK(g.size() == 64);
  CHECK(g.h == doctest::Approx(0.125));
  const std::size_t k = g.flat_index({7, 0, 0});
  CHECK(g.shifted(k, 0, 1) == g.flat_index({0, 0, 0}));
  CHECK(g.shifted(k, 1, -1) == g.flat_index({7, 7, 0}));
  const auto x = g.coords(g.flat_index({2, 5, 0}));
  CHECK(x[0] == doctest::Approx(0.25));
  CHECK(x[1] == doctest::Approx(0.625));
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(g.flat_index(g.multi_index(j)) == j);
}

TEST_CASE("build_periodic: demo source with W = w f is accepted, Aubry set is the four half-lattice points") {
  const auto p = build_periodic(demo_periodic_config());
  const auto A = aubry_set(p);
  REQUIRE(A.nodes.size() == 4);
  for (std::size_t k : A.nodes) {
    const auto x = p.grid.coords(k);
    CHECK(std::fmod(x[0], 0.5) == doctest::Approx(0.0));
    CHECK(std::fmod(x[1], 0.5) == doctest::Approx(0.0));
    CHECK(p.f[k] <= p.aubry_tol);
  }
}

TEST_CASE("build_periodic: zero source gives the whole torus") {
  PeriodicConfig c;
  c.N = 16;
  c.ergodic = true;
  const auto p = build_periodic(c);
  CHECK(aubry_set(p).nodes.size() == p.grid.size());
  CHECK(p.wind_zero());
}

TEST_CASE("build_periodic: errors") {
  PeriodicConfig c;
  c.N = 16;
  c.f = ScalarSpec::expr("sin(2*pi*x1)^2");
  c.wind = {ScalarSpec::constant(1.0), ScalarSpec::constant(0.0)};
  c.ergodic = true;
  CHECK(kind_of([&] { build_periodic(c); }) == ErrorKind::AubryWindMismatch);

  c.ergodic = false;  // tolerated, but reported
  CHECK_FALSE(build_periodic(c).warnings.empty());

  PeriodicConfig neg;
  neg.N = 16;
  neg.f = ScalarSpec::expr("sin(2*pi*x1)");
  CHECK(kind_of([&] { build_periodic(neg); }) == ErrorKind::NegativeSource);

  PeriodicConfig one;
  one.N = 16;
  one.f = ScalarSpec::constant(1.0);
  one.ergodic = true;
  CHECK(kind_of([&] { build_periodic(one); }) == ErrorKind::EmptyAubry);
  one.ergodic = false;
  CHECK(aubry_set(build_periodic(one)).empty());

  PeriodicConfig small;
  small.N = 4;
  CHECK(kind_of([&] { build_periodic(small); }) == ErrorKind::ValidationError);
}

TEST_CASE("discrete Lipschitz constant bounds the nearest-neighbour quotients") {
  const auto p = build_periodic(demo_periodic_config(64));
  // f = sin^2 + sin^2 has |grad f| <= 2 pi; g = cos cos has |d_i g| <= 2 pi.
  CHECK(p.lip_f <= 1.01 * 2.0 * M_PI + 1e-12);
  CHECK(p.lip_f >= 0.95 * 2.0 * M_PI);
  CHECK(p.lip_g <= 1.01 * 2.0 * M_PI + 1e-12);
  for (std::size_t k = 0; k < p.grid.size(); ++k) {
    for (int a = 0; a < 2; ++a) {
      CHECK(std::abs(p.g[p.grid.shifted(k, a, 1)] - p.g[k]) / p.grid.h <= p.lip_g);
    }
  }
}

TEST_CASE("build_radial: single well at r = 2") {
  auto c = radial_config(2, "min(1, (r-2)^2)", "5");
  c.ergodic = true;
  const auto p = build_radial(c);
  const auto A = aubry_set(p);
  REQUIRE(A.radii.size() == 1);
  CHECK(A.radii[0] == doctest::Approx(2.0));
  REQUIRE(A.R0);
  CHECK(*A.R0 == doctest::Approx(2.0));
  CHECK(*A.R1 == doctest::Approx(2.0));
  CHECK_FALSE(A.S0.has_value());
  CHECK_FALSE(A.S1.has_value());
  CHECK(p.warnings.empty());
}

TEST_CASE("build_radial: roots straddling the interface") {
  auto c = radial_config(3, "min(1, (r-1)^2*(r-4)^2)", "2");
  const auto p = build_radial(c);
  const auto A = aubry_set(p);
  REQUIRE(A.S0);
  REQUIRE(A.R0);
  CHECK(*A.S0 == doctest::Approx(1.0));
  CHECK(*A.S1 == doctest::Approx(1.0));
  CHECK(*A.R0 == doctest::Approx(4.0));
  CHECK(*A.R1 == doctest::Approx(4.0));

  // Bisection on the closed form brackets the same roots.
  auto F = [](double r) { return (r - 1) * (r - 1) * (r - 4) * (r - 4); };
  auto dF = [&](double r) { return (F(r + 1e-7) - F(r - 1e-7)) / 2e-7; };
  for (double guess : {1.0, 4.0}) {
    double lo = guess - 0.3, hi = guess + 0.3;  // dF changes sign across each double root
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (dF(lo) * dF(mid) <= 0.0 ? hi : lo) = mid;
    }
    const double root = 0.5 * (lo + hi);
    CHECK(std::any_of(A.radii.begin(), A.radii.end(),
                      [&](double r) { return std::abs(r - root) < 0.5 * p.grid.h; }));
  }
}

TEST_CASE("build_radial: errors and warnings") {
  auto c = radial_config(2, "1", "0");
  c.ergodic = true;
  CHECK(kind_of([&] { build_radial(c); }) == ErrorKind::EmptyAubry);

  auto neg = radial_config(2, "r - 3", "0");
  CHECK(kind_of([&] { build_radial(neg); }) == ErrorKind::NegativeSource);

  auto tail = radial_config(2, "min(0.5, (r-2)^2)", "0");
  CHECK_FALSE(build_radial(tail).warnings.empty());

  auto bad = radial_config(2, "0", "0");
  bad.r_max = 0.9;
  CHECK(kind_of([&] { build_radial(bad); }) == ErrorKind::ValidationError);
}

TEST_CASE("aubry_set is monotone in the tolerance and every node satisfies it") {
  const auto p = build_radial(radial_config(2, "min(1, (r-2)^2)", "5"));
  const auto F = p.sample_F();
  std::vector<std::size_t> prev;
  for (double tol : {1e-9, 1e-4, 1e-2, 0.1, 0.5}) {
    const auto A = aubry_set(p, tol);
    for (std::size_t i : A.nodes) CHECK(F[i] <= tol);
    CHECK(std::includes(A.nodes.begin(), A.nodes.end(), prev.begin(), prev.end()));
    prev = A.nodes;
  }
}

TEST_CASE("sampled radial profiles interpolate linearly") {
  ScalarSpec s;
  s.samples = {0.0, 2.0, 0.0};
  s.sample_r = {1.0, 2.0, 3.0};
  const auto P = Profile::from_spec(s, 1.0, 3.0);
  CHECK(P(1.5) == doctest::Approx(1.0));
  CHECK(P(2.75) == doctest::Approx(0.5));
  CHECK_FALSE(P.closed_form());
}

TEST_CASE("build is deterministic") {
  const auto a = build_periodic(demo_periodic_config());
  const auto b = build_periodic(demo_periodic_config());
  CHECK(a.f == b.f);
  CHECK(a.g == b.g);
  CHECK(a.wind == b.wind);
}
