#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "riccibound/model.hpp"
#include "riccibound/numerics.hpp"
#include "riccibound/pde.hpp"
#include "riccibound/radial.hpp"

using namespace rb;

namespace {

const double kPi = 3.14159265358979323846;

Model flat3() { return Model(ModelSpec{}); }

Model flat2() {
  ModelSpec s;
  s.dim = 2;
  return Model(s);
}

Model hyperbolic3() {
  ModelSpec s;
  s.kind = ModelKind::Hyperbolic;
  return Model(s);
}

// Shared solves: the flat and hyperbolic kernels on [t0, 1].
const HeatKernelGrid& flat_grid() {
  static HeatKernelGrid g = heat_kernel_radial(flat3(), 1.0);
  return g;
}

const HeatKernelGrid& hyperbolic_grid() {
  static HeatKernelGrid g = heat_kernel_radial(hyperbolic3(), 1.0);
  return g;
}

double flat_kernel(double t, double r) {
  return std::pow(4.0 * kPi * t, -1.5) * std::exp(-r * r / (4.0 * t));
}

double hyperbolic_kernel(double t, double r) {
  double a = (r == 0.0) ? 1.0 : r / std::sinh(r);
  return std::pow(4.0 * kPi * t, -1.5) * a * std::exp(-t - r * r / (4.0 * t));
}

}  // namespace

TEST_CASE("flat kernel matches the Gaussian on the grid") {
  const auto& g = flat_grid();
  CHECK(g.n == 3);
  CHECK(g.r_trunc == doctest::Approx(12.0).epsilon(1e-12));
  CHECK_FALSE(g.dirichlet_wall);
  REQUIRE(g.t_grid.size() == g.G.size());
  for (size_t i = 1; i < g.t_grid.size(); ++i)
    CHECK(g.t_grid[i] > g.t_grid[i - 1]);

  double worst = 0.0;
  for (size_t it = 0; it < g.t_grid.size(); ++it) {
    double t = g.t_grid[it];
    if (t < 0.01) continue;
    for (size_t j = 0; j < g.r_grid.size() && g.r_grid[j] <= 2.0; ++j) {
      double ex = flat_kernel(t, g.r_grid[j]);
      worst = std::max(worst, std::fabs(g.G[it][j] - ex) / ex);
    }
  }
  // The factored scheme keeps flat models exact up to rounding; the
  // contract only asks for 1e-2.
  CHECK(worst < 1e-9);

  for (double m : g.mass) CHECK(m == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("flat kernel derivatives and interpolators") {
  const auto& g = flat_grid();
  size_t it = g.time_index(1.0);
  CHECK(g.t_grid[it] == doctest::Approx(1.0).epsilon(1e-12));
  for (double r : {0.3, 1.0, 1.7}) {
    double ex = flat_kernel(1.0, r);
    CHECK(g.slice_value(it, r) == doctest::Approx(ex).epsilon(1e-9));
    size_t j = static_cast<size_t>(r / (g.r_grid[1] - g.r_grid[0]) + 0.5);
    CHECK(g.Gr[it][j] ==
          doctest::Approx(-g.r_grid[j] / 2.0 * ex).epsilon(1e-7));
    CHECK(g.Gt[it][j] ==
          doctest::Approx((g.r_grid[j] * g.r_grid[j] / 4.0 - 1.5) * ex)
              .epsilon(1e-6));
  }
  // Log-linear interpolation between stored slices stays near the kernel.
  CHECK(g.value(0.5, 1.0) == doctest::Approx(flat_kernel(0.5, 1.0)).epsilon(5e-3));
}

TEST_CASE("hyperbolic kernel matches the closed form within 1 percent") {
  const auto& g = hyperbolic_grid();
  double worst = 0.0;
  for (size_t it = 0; it < g.t_grid.size(); ++it) {
    double t = g.t_grid[it];
    if (t < 0.01) continue;
    for (size_t j = 0; j < g.r_grid.size() && g.r_grid[j] <= 2.0; ++j) {
      double ex = hyperbolic_kernel(t, g.r_grid[j]);
      worst = std::max(worst, std::fabs(g.G[it][j] - ex) / ex);
    }
  }
  CHECK(worst < 5e-3);
  for (double m : g.mass) CHECK(m == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("semigroup property of the hyperbolic solve") {
  // G(2t, pole) = integral of G(t, r)^2 over the space.
  auto m = hyperbolic3();
  auto g1 = heat_kernel_radial(m, 0.1);
  auto g2 = heat_kernel_radial(m, 0.2);
  const auto& slice = g1.G.back();
  double dr = g1.r_grid[1] - g1.r_grid[0];
  double sum = 0.0;
  for (size_t j = 0; j + 1 < g1.r_grid.size(); ++j) {
    double wa = std::sinh(g1.r_grid[j]) * std::sinh(g1.r_grid[j]);
    double wb = std::sinh(g1.r_grid[j + 1]) * std::sinh(g1.r_grid[j + 1]);
    sum += 0.5 * (slice[j] * slice[j] * wa + slice[j + 1] * slice[j + 1] * wb) *
           dr;
  }
  sum *= 4.0 * kPi;
  CHECK(sum == doctest::Approx(g2.G.back()[0]).epsilon(2e-3));
}

TEST_CASE("fitted envelope constants, flat and hyperbolic") {
  auto c = fit_heat_kernel_constants(flat_grid());
  const double amp = std::pow(4.0 * kPi, -1.5);
  CHECK(c.C1 == doctest::Approx(amp).epsilon(1e-6));
  CHECK(c.C3 == doctest::Approx(amp).epsilon(1e-6));
  CHECK(c.C2 == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(c.C4 >= 4.0 - 1e-9);
  CHECK(c.C4 == doctest::Approx(4.0).epsilon(0.05));
  CHECK(c.C3_grad > 0.0);
  CHECK(c.C3_time > 0.0);

  auto ch = fit_heat_kernel_constants(hyperbolic_grid());
  // Curvature tightens the lower envelope and can only widen the upper one.
  CHECK(ch.C1 < amp);
  CHECK(ch.C2 >= 0.25);
  CHECK(ch.C2 <= 0.5);
  CHECK(ch.C4 >= 3.9);
  CHECK(ch.C3 >= ch.C1);
}

TEST_CASE("two-sided bound certificate on the flat kernel") {
  auto cert = verify_heat_kernel_bounds(flat_grid(), flat3());
  CHECK(cert.pass);
  CHECK(cert.min_margin >= -cert.tolerance);
  CHECK(cert.lhs.size() > 500);
  CHECK(cert.details.at("C2") == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("too tight a truncation radius is rejected") {
  HeatSolveOptions opt;
  opt.c4_envelope = 0.04;  // r_trunc = 1.2, which leaks most of the mass
  CHECK_THROWS_AS(heat_kernel_radial(flat3(), 1.0, opt), TruncationTooTight);
}

TEST_CASE("invalid kernel horizons are rejected") {
  CHECK_THROWS_AS(heat_kernel_radial(flat3(), 2.0), InvalidSpec);
  CHECK_THROWS_AS(heat_kernel_radial(flat3(), 2e-4), InvalidSpec);
}

TEST_CASE("cutoff function satisfies the four plateau properties") {
  auto m = flat2();
  auto cf = build_cutoff(m, 1.0);
  CHECK(cf.A == doctest::Approx(1.0 / (4.0 * std::log(2.0))).epsilon(1e-9));
  CHECK(cf.delta_hat == doctest::Approx(0.0735610).epsilon(1e-4));
  CHECK(cf.delta == doctest::Approx(std::pow(cf.delta_hat, 3)).epsilon(1e-12));
  CHECK(cf.min_plateau_sum >= 1.0);

  // (1) identically one on the unit ball (sampled well past it).
  for (double d : {0.0, 0.4, 0.8, 1.0, 1.05})
    CHECK(cf.phi(d * std::cos(0.3), d * std::sin(0.3)) == 1.0);
  // (2) supported strictly inside the double ball.
  CHECK(cf.support_radius < 1.9);
  CHECK(cf.phi(1.2, 0.0) == 0.0);
  CHECK(cf.phi(0.0, 1.95) == 0.0);
  // (3) range [0, 1] along a radial trace.
  for (size_t i = 0; i < cf.d_grid.size(); ++i) {
    CHECK(cf.phi_radial[i] >= 0.0);
    CHECK(cf.phi_radial[i] <= 1.0);
  }
  // (4) finite measured derivative bounds.
  CHECK(cf.sup_grad == doctest::Approx(391.77).epsilon(0.01));
  CHECK(cf.sup_lap > 0.0);
  CHECK(std::isfinite(cf.sup_lap));
}

TEST_CASE("cutoff derivative sups are stable under grid refinement") {
  auto m = flat2();
  auto base = build_cutoff(m, 1.0);
  CutoffOptions fine;
  fine.eval_nr = 240;
  fine.eval_ntheta = 1800;
  auto ref = build_cutoff(m, 1.0, fine);
  CHECK(std::fabs(ref.sup_grad - base.sup_grad) / base.sup_grad < 0.05);
  CHECK(std::fabs(ref.sup_lap - base.sup_lap) / base.sup_lap < 0.05);
}

TEST_CASE("cutoff scales exactly with the ball radius") {
  auto m = flat2();
  auto c1 = build_cutoff(m, 1.0);
  auto c2 = build_cutoff(m, 2.0);
  CHECK(c2.sup_grad * 2.0 == doctest::Approx(c1.sup_grad).epsilon(1e-9));
  CHECK(c2.sup_lap * 4.0 == doctest::Approx(c1.sup_lap).epsilon(1e-9));
  CHECK(c2.support_radius == doctest::Approx(2.0 * c1.support_radius).epsilon(1e-12));
}

TEST_CASE("parallel and serial cutoff evaluation agree bitwise") {
  auto m = flat2();
  CutoffOptions serial;
  serial.parallel = false;
  auto a = build_cutoff(m, 1.0);
  auto b = build_cutoff(m, 1.0, serial);
  CHECK(a.sup_grad == b.sup_grad);
  CHECK(a.sup_lap == b.sup_lap);
  CHECK(a.min_plateau_sum == b.min_plateau_sum);
  for (double d : {0.2, 1.08, 1.12})
    CHECK(a.phi(d, 0.1) == b.phi(d, 0.1));
}

TEST_CASE("cutoff guards: covering blow-up and invalid radius") {
  CHECK_THROWS_AS(build_cutoff(flat3(), 1.0), CoverTooLarge);
  CHECK_THROWS_AS(build_cutoff(flat2(), 6.0), InvalidSpec);
}

TEST_CASE("radial Poisson solve is exact on flat space") {
  auto sol = solve_poisson_radial(flat3(), 1.0, [](double) { return 1.0; },
                                  1.0 / 6.0);
  CHECK(sol.residual < 5e-8);
  for (size_t i = 0; i < sol.r.size(); i += 64) {
    CHECK(sol.f[i] ==
          doctest::Approx(sol.r[i] * sol.r[i] / 6.0).epsilon(1e-8));
    CHECK(sol.fp[i] == doctest::Approx(sol.r[i] / 3.0).epsilon(1e-6));
  }
  // Zero source keeps the boundary constant.
  auto hz = solve_poisson_radial(flat3(), 1.0, [](double) { return 0.0; }, 2.5);
  for (size_t i = 0; i < hz.r.size(); i += 512)
    CHECK(hz.f[i] == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("radial Poisson solve matches the hyperbolic plane oracle") {
  ModelSpec s;
  s.kind = ModelKind::Hyperbolic;
  s.dim = 2;
  Model h2(s);
  auto sol = solve_poisson_radial(h2, 1.0, [](double) { return 1.0; }, 0.0);
  CHECK(sol.residual < 5e-8);
  for (size_t i = 100; i < sol.r.size(); i += 500) {
    double r = sol.r[i];
    double ex = -integrate(
        [](double q) { return (std::cosh(q) - 1.0) / std::sinh(q); }, r, 1.0,
        1e-13);
    CHECK(sol.f[i] == doctest::Approx(ex).epsilon(1e-7));
  }
}

TEST_CASE("Poisson radius beyond the conjugate point is rejected") {
  ModelSpec s;
  s.kind = ModelKind::Sphere;
  Model sphere(s);
  CHECK_THROWS_AS(
      solve_poisson_radial(sphere, 3.3, [](double) { return 1.0; }, 0.0),
      CutLocusReached);
}

TEST_CASE("Green function envelope, flat ball") {
  auto cert = verify_green_bound(flat3(), 1.0);
  CHECK(cert.pass);
  // Closed form (1/4pi)(1/r - 1): envelope constant just below 1/4pi and
  // principal Dirichlet decay rate just below pi^2.
  double c5 = cert.details.at("C5");
  CHECK(c5 <= 1.0 / (4.0 * kPi) * 1.005);
  CHECK(c5 >= 1.0 / (4.0 * kPi) * 0.95);
  CHECK(cert.details.at("tail_rate") ==
        doctest::Approx(kPi * kPi).epsilon(0.05));
  CHECK(cert.details.at("green_ball_integral") ==
        doctest::Approx(1.0 / 6.0).epsilon(0.01));
}

TEST_CASE("Green function envelope, hyperbolic ball") {
  auto cert = verify_green_bound(hyperbolic3(), 0.5);
  CHECK(cert.pass);
  CHECK(cert.details.at("C5") > 0.0);
}

TEST_CASE("Green bound requires dimension above two") {
  CHECK_THROWS_AS(verify_green_bound(flat2(), 1.0), DimensionTooLow);
}

TEST_CASE("gradient estimate on the flat quadratic solution") {
  RadialFunction u{[](double s) { return s * s / 6.0; },
                   [](double s) { return s / 3.0; }};
  auto one = [](double) { return 1.0; };
  auto cert = verify_gradient_estimate(flat3(), u, one, 1.0, 2.0);
  CHECK(cert.pass);
  // sup |grad u|^2 = 1/36, avg u^2 = 1/84·3/… -> C = 84 / (36 * 85).
  CHECK(cert.details.at("C_empirical_grad") ==
        doctest::Approx(84.0 / (36.0 * 85.0)).epsilon(1e-4));
  auto cert2 = verify_gradient_estimate(flat3(), u, one, 2.0, 2.0);
  CHECK(cert2.pass);
  CHECK(cert2.details.at("C_empirical_grad") ==
        doctest::Approx(84.0 / 225.0).epsilon(1e-4));
}

TEST_CASE("gradient estimate guards") {
  RadialFunction u{[](double s) { return s * s / 6.0; },
                   [](double s) { return s / 3.0; }};
  // Mismatched source: the stated equation fails and must be rejected.
  CHECK_THROWS_AS(verify_gradient_estimate(flat3(), u,
                                           [](double) { return 2.0; }, 1.0,
                                           2.0),
                  EquationResidualTooLarge);
  CHECK_THROWS_AS(verify_gradient_estimate(flat3(), u,
                                           [](double) { return 1.0; }, 1.0,
                                           1.5),
                  InvalidSpec);
}

TEST_CASE("parabolic gradient estimate on the heat solution") {
  HeatSolveOptions opt;
  opt.n_out = 120;
  auto g = heat_kernel_radial(flat3(), 1.0, opt);
  auto cert = verify_parabolic_gradient_estimate(g, flat3(), 0.5, 2.0);
  CHECK(cert.pass);
  CHECK(cert.details.at("C_empirical_grad") > 0.0);
  CHECK(cert.details.at("C_empirical_grad") < 10.0);
  // A window reaching before the first stored slice is rejected.
  CHECK_THROWS_AS(verify_parabolic_gradient_estimate(g, flat3(), 1.5, 2.0),
                  InvalidSpec);
}

TEST_CASE("maximum principle rows") {
  RadialFunction u{[](double s) { return s * s / 6.0; },
                   [](double s) { return s / 3.0; }};
  auto mp = verify_max_principle(flat3(), u, [](double) { return 1.0; }, 1.0,
                                 2.0);
  CHECK(mp.pass);
  // Concave solution: interior maximum controlled by the source norm.
  RadialFunction un{[](double s) { return -s * s / 6.0; },
                    [](double s) { return -s / 3.0; }};
  auto mp2 = verify_max_principle(flat3(), un, [](double) { return -1.0; },
                                  1.0, 2.0);
  CHECK(mp2.pass);
  CHECK(mp2.details.at("C_empirical") ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-6));
}
