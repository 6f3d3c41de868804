#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "riccibound/constants.hpp"
#include "riccibound/model.hpp"
#include "riccibound/numerics.hpp"
#include "riccibound/radial.hpp"
#include "riccibound/rng.hpp"

using namespace rb;

namespace {

ModelSpec spec_of(ModelKind k) {
  for (const auto& s : catalog())
    if (s.kind == k) return s;
  throw std::runtime_error("missing catalog entry");
}

std::vector<double> unit_radii() { return linspace(0.1, 1.0, 10); }

}  // namespace

TEST_CASE("euclidean profile is exact") {
  auto m = catalog_model(ModelKind::Euclidean);
  auto p = radial_profile(*m, 1.0, 50);
  REQUIRE(p.s_grid.size() == 50);
  for (size_t i = 0; i < p.s_grid.size(); ++i) {
    double s = p.s_grid[i];
    CHECK(p.w[i] == doctest::Approx(s * s).epsilon(1e-14));
    CHECK(p.delta_s[i] == doctest::Approx(2.0 / s).epsilon(1e-14));
    CHECK(p.psi(i, 3) == 0.0);
  }
  CHECK(std::isinf(p.cut_radius));
  CHECK_FALSE(p.truncated);
}

TEST_CASE("jacobi integration reproduces the warp profiles") {
  // Sphere n=2: J = sin(s), cut radius pi.
  ModelSpec s2;
  s2.kind = ModelKind::Sphere;
  s2.dim = 2;
  s2.curvature = 1.0;
  Model sphere2 = build_model(s2);
  auto pj = jacobi_profile(sphere2, 3.0, 30);
  for (size_t i = 0; i < pj.s_grid.size(); ++i)
    CHECK(std::abs(pj.w[i] - std::sin(pj.s_grid[i])) < 1e-8);
  CHECK(pj.cut_radius == doctest::Approx(M_PI).epsilon(1e-10));

  // Hyperbolic n=3: warp profile w = sinh^2 against the Jacobi oracle.
  auto hyp = catalog_model(ModelKind::Hyperbolic);
  auto pw = radial_profile(*hyp, 2.0, 40);
  auto po = jacobi_profile(*hyp, 2.0, 40);
  for (size_t i = 0; i < pw.s_grid.size(); ++i) {
    double s = pw.s_grid[i];
    CHECK(std::abs(pw.w[i] - std::sinh(s) * std::sinh(s)) < 1e-12);
    CHECK(std::abs(pw.w[i] - po.w[i]) < 1e-8);
    CHECK(pw.delta_s[i] ==
          doctest::Approx(2.0 / std::tanh(s)).epsilon(1e-12));
  }

  // Custom warp: the two constructions agree too.
  Model warped = build_model(spec_of(ModelKind::WarpedCustom));
  auto ww = radial_profile(warped, 1.5, 20);
  auto wo = jacobi_profile(warped, 1.5, 20);
  for (size_t i = 0; i < ww.s_grid.size(); ++i)
    CHECK(std::abs(ww.w[i] - wo.w[i]) < 1e-8);
}

TEST_CASE("profile invariants on the catalog") {
  for (const auto& spec : catalog()) {
    Model m = build_model(spec);
    int n = m.n();
    auto p = radial_profile(m, 1.0, 200);
    INFO("model ", m.name());
    // Small-radius normalization w(s)/s^{n-1} -> 1.
    double s0 = p.s_grid.front();
    CHECK(std::abs(p.w.front() / std::pow(s0, n - 1) - 1.0) < 1e-4);
    // delta_s w = dw/ds, checked against a central difference.
    for (size_t i = 1; i + 1 < p.s_grid.size(); i += 7) {
      double h = p.s_grid[i + 1] - p.s_grid[i];
      double dw = (p.w[i + 1] - p.w[i - 1]) / (2 * h);
      CHECK(std::abs(p.delta_s[i] * p.w[i] - dw) < 2e-4 * std::abs(dw) + 1e-9);
    }
  }
}

TEST_CASE("cut radius detection and truncation") {
  auto sph = catalog_model(ModelKind::Sphere);  // n=3, curvature 1
  CHECK(cut_radius(*sph) == doctest::Approx(M_PI).epsilon(1e-10));
  auto p = radial_profile(*sph, 4.0, 30);
  CHECK(p.truncated);
  CHECK(p.s_grid.back() < M_PI);
  CHECK_THROWS_AS(ball_volume(*sph, 3.5), CutLocusReached);
  CHECK_THROWS_AS(sphere_area(*sph, 3.5), CutLocusReached);
  CHECK_THROWS_AS(verify_comparison(*sph, ComparisonKind::VolumeElementAbs,
                                    {1.0, 3.2}),
                  CutLocusReached);
  // Cubic-capped warp f = s - 0.1 s^3 vanishes at sqrt(10).
  Model warped = build_model(spec_of(ModelKind::WarpedCustom));
  CHECK(cut_radius(warped) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-10));
}

TEST_CASE("ball volumes and sphere areas against closed forms") {
  auto euc = catalog_model(ModelKind::Euclidean);
  CHECK(std::abs(ball_volume(*euc, 1.0) - 4.0 * M_PI / 3.0) < 1e-9);
  CHECK(std::abs(sphere_area(*euc, 2.0) - 16.0 * M_PI) < 1e-9);

  ModelSpec s2;
  s2.kind = ModelKind::Sphere;
  s2.dim = 2;
  Model sphere2 = build_model(s2);
  CHECK(std::abs(ball_volume(sphere2, M_PI) - 4.0 * M_PI) < 1e-9);

  ModelSpec h2;
  h2.kind = ModelKind::Hyperbolic;
  h2.dim = 2;
  Model hyp2 = build_model(h2);
  CHECK(std::abs(ball_volume(hyp2, 1.0) - 2.0 * M_PI * (std::cosh(1.0) - 1.0)) <
        1e-9);
}

TEST_CASE("small-radius ball asymptotics") {
  for (const auto& spec : catalog()) {
    Model m = build_model(spec);
    INFO("model ", m.name());
    double r = 1e-3;
    double flat = ball_vol_const(m.n()) * std::pow(r, m.n());
    CHECK(std::abs(ball_volume(m, r) / flat - 1.0) < 1e-4);
  }
}

TEST_CASE("laplacian comparison certificates") {
  // Flat space: exact equality at lambda = K = 0.
  auto euc = catalog_model(ModelKind::Euclidean);
  auto c0 = verify_comparison(*euc, ComparisonKind::LaplacianComparison,
                              unit_radii());
  CHECK(c0.pass);
  CHECK(std::abs(c0.min_margin) < 1e-14);

  // Hyperbolic n=3, lambda=2: margin at s=1 is 2/3 - (2 coth 1 - 2),
  // coth 1 = (e^2+1)/(e^2-1).
  auto hyp = catalog_model(ModelKind::Hyperbolic);
  auto c1 =
      verify_comparison(*hyp, ComparisonKind::LaplacianComparison, {1.0});
  double coth1 = (std::exp(2.0) + 1.0) / (std::exp(2.0) - 1.0);
  CHECK(c1.pass);
  CHECK(c1.min_margin ==
        doctest::Approx(2.0 / 3.0 - (2.0 * coth1 - 2.0)).epsilon(1e-12));

  // Claiming lambda = 1 understates Ric = -2g and must fail.
  ComparisonOptions weak;
  weak.lambda_override = 1.0;
  CHECK_FALSE(verify_comparison(*hyp, ComparisonKind::LaplacianComparison,
                                {1.0}, weak)
                  .pass);

  // Singular field: certificate passes and reports the tight constant.
  auto sf = catalog_model(ModelKind::SingularFieldModel);
  auto c2 = verify_comparison(*sf, ComparisonKind::LaplacianComparison,
                              unit_radii());
  CHECK(c2.pass);
  CHECK(c2.details.at("c_alpha_star") <= c_alpha(sf->spec().alpha));
}

TEST_CASE("laplacian comparison field term against quadrature") {
  // The proof bounds -2/s^2 int_0^s t <V, grad s> dt by C(a) K s^{-a}; for
  // the inward singular field the integral has the closed form
  // 2K/((2-a) s^a), evaluated here by quadrature as the oracle.
  auto sf = catalog_model(ModelKind::SingularFieldModel);
  double K = sf->spec().K, a = sf->spec().alpha;
  for (double s : {0.25, 0.5, 1.0}) {
    double mid = -2.0 / (s * s) *
                 integrate([&](double t) { return t * sf->v(t); }, 1e-12, s);
    CHECK(mid == doctest::Approx(2.0 * K / ((2.0 - a) * std::pow(s, a)))
                     .epsilon(1e-8));
    CHECK(mid <= c_alpha(a) * K * std::pow(s, -a));
  }
}

TEST_CASE("off-center laplacian comparison on the flat field model") {
  auto sf = catalog_model(ModelKind::SingularFieldModel);
  ComparisonOptions away;
  away.center_d0 = 0.5;
  away.ray_sign = +1;
  auto ca = verify_comparison(*sf, ComparisonKind::LaplacianComparison,
                              unit_radii(), away);
  CHECK(ca.pass);
  ComparisonOptions through = away;
  through.ray_sign = -1;  // ray crosses the field origin at t = 0.5
  auto ct = verify_comparison(*sf, ComparisonKind::LaplacianComparison,
                              {0.2, 0.4, 0.6, 0.8, 1.0}, through);
  CHECK(ct.pass);
  // Off-center volume kinds are out of scope.
  CHECK_THROWS_AS(verify_comparison(*sf, ComparisonKind::VolumeNoninflation,
                                    unit_radii(), away),
                  UnsupportedKind);
}

TEST_CASE("volume element and noninflation certificates") {
  auto hyp = catalog_model(ModelKind::Hyperbolic);
  // w(1) = sinh^2(1) <= e^{lambda} with lambda = 2.
  auto cabs =
      verify_comparison(*hyp, ComparisonKind::VolumeElementAbs, {1.0});
  CHECK(cabs.pass);
  CHECK(cabs.lhs[0] == doctest::Approx(std::sinh(1.0) * std::sinh(1.0))
                           .epsilon(1e-12));
  CHECK(cabs.rhs[0] == doctest::Approx(std::exp(2.0)).epsilon(1e-12));

  ComparisonOptions zero;
  zero.lambda_override = 0.0;
  CHECK_FALSE(
      verify_comparison(*hyp, ComparisonKind::VolumeElementAbs, {1.0}, zero)
          .pass);
  CHECK(verify_comparison(*hyp, ComparisonKind::VolumeElementRatio,
                          unit_radii())
            .pass);
  CHECK_FALSE(verify_comparison(*hyp, ComparisonKind::VolumeElementRatio,
                                {0.5, 1.0}, zero)
                  .pass);

  auto euc = catalog_model(ModelKind::Euclidean);
  auto cni =
      verify_comparison(*euc, ComparisonKind::VolumeNoninflation, {0.5, 1.0});
  CHECK(cni.pass);
  CHECK(std::abs(cni.min_margin) < 1e-9);  // flat case is the equality case
  CHECK(verify_comparison(*hyp, ComparisonKind::VolumeNoninflation,
                          unit_radii())
            .pass);
  CHECK_FALSE(verify_comparison(*hyp, ComparisonKind::VolumeNoninflation,
                                {1.0}, zero)
                  .pass);
}

TEST_CASE("volume ratio bound and monotonicity") {
  auto euc = catalog_model(ModelKind::Euclidean);
  auto ce = verify_volume_ratio_monotone(*euc, unit_radii());
  CHECK(ce.pass);
  CHECK(std::abs(ce.min_margin) < 1e-8);
  CHECK(ce.note.find("monotonicity") != std::string::npos);

  // Sphere n=2: Q(r) = 2 pi (1 - cos r)/r^2, strictly decreasing.
  ModelSpec s2;
  s2.kind = ModelKind::Sphere;
  s2.dim = 2;
  Model sphere2 = build_model(s2);
  auto cs = verify_volume_ratio_monotone(sphere2, unit_radii());
  CHECK(cs.pass);
  CHECK(cs.min_margin > 0.0);
  for (size_t i = 0; i < cs.samples.size(); ++i) {
    double r = cs.samples[i];
    CHECK(cs.lhs[i] == doctest::Approx(2.0 * M_PI * (1.0 - std::cos(r)) /
                                       (r * r))
                           .epsilon(1e-8));
  }

  // Hyperbolic n=2, lambda=1: bound holds; the measured tight constant is
  // well below the implemented chain constant.
  ModelSpec h2;
  h2.kind = ModelKind::Hyperbolic;
  h2.dim = 2;
  h2.lambda = 1.0;
  Model hyp2 = build_model(h2);
  auto ch = verify_comparison(hyp2, ComparisonKind::VolumeRatioBound,
                              unit_radii());
  CHECK(ch.pass);
  CHECK(ch.details.at("c_ratio_star") < ch.params.at("c_ratio"));
  CHECK(ch.details.at("c_ratio_star") > 0.0);

  ComparisonOptions zero;
  zero.lambda_override = 0.0;
  CHECK_FALSE(verify_comparison(hyp2, ComparisonKind::VolumeRatioBound,
                                {0.5, 1.0}, zero)
                  .pass);
}

TEST_CASE("bounded-field comparison certificates") {
  auto hyp = catalog_model(ModelKind::Hyperbolic);  // V = 0, K = 0 bounded
  auto cl = verify_comparison(*hyp, ComparisonKind::BoundedVLaplacian, {1.0});
  CHECK(cl.pass);
  double coth1 = (std::exp(2.0) + 1.0) / (std::exp(2.0) - 1.0);
  CHECK(cl.min_margin ==
        doctest::Approx(2.0 / 3.0 - (2.0 * coth1 - 2.0)).epsilon(1e-12));
  auto cig = catalog_model(ModelKind::CigarSoliton);  // |V| <= 1 bounded
  CHECK(verify_comparison(*cig, ComparisonKind::BoundedVLaplacian,
                          unit_radii())
            .pass);
  CHECK(verify_comparison(*cig, ComparisonKind::BoundedVRatio, unit_radii())
            .pass);
  CHECK(
      verify_comparison(*hyp, ComparisonKind::BoundedVRatio, unit_radii())
          .pass);

  ComparisonOptions weak;
  weak.lambda_override = 1.0;
  CHECK_FALSE(
      verify_comparison(*hyp, ComparisonKind::BoundedVLaplacian, {1.0}, weak)
          .pass);
  weak.lambda_override = 0.01;
  CHECK_FALSE(verify_comparison(*hyp, ComparisonKind::BoundedVRatio,
                                {0.5, 1.0}, weak)
                  .pass);
  // The singular field is unbounded: the kind does not apply.
  auto sf = catalog_model(ModelKind::SingularFieldModel);
  CHECK_THROWS_AS(verify_comparison(*sf, ComparisonKind::BoundedVLaplacian,
                                    unit_radii()),
                  UnsupportedKind);
}

TEST_CASE("gradient-case comparison certificates") {
  auto gau = catalog_model(ModelKind::GaussianSoliton);
  auto cig = catalog_model(ModelKind::CigarSoliton);
  auto hyp = catalog_model(ModelKind::Hyperbolic);  // Einstein, constant L
  for (const auto& m : {gau, cig, hyp}) {
    INFO("model ", m->name());
    auto cl =
        verify_comparison(*m, ComparisonKind::BELaplacian, unit_radii());
    CHECK(cl.pass);
    CHECK(cl.params.at("K1") >= 0.0);
    CHECK(verify_comparison(*m, ComparisonKind::BEVolumeRatio, unit_radii())
              .pass);
  }
  // Zeroing the measured potential constants understates the hypothesis.
  ComparisonOptions weak;
  weak.be_k1_override = 0.0;
  weak.be_k2_override = 0.0;
  CHECK_FALSE(
      verify_comparison(*cig, ComparisonKind::BELaplacian, {1.0}, weak)
          .pass);
  weak.lambda_override = 0.01;
  CHECK_FALSE(verify_comparison(*hyp, ComparisonKind::BEVolumeRatio,
                                {0.5, 1.0}, weak)
                  .pass);
  auto sf = catalog_model(ModelKind::SingularFieldModel);
  CHECK_THROWS_AS(
      verify_comparison(*sf, ComparisonKind::BELaplacian, unit_radii()),
      UnsupportedKind);
}

TEST_CASE("soliton comparison certificates") {
  auto cig = catalog_model(ModelKind::CigarSoliton);  // steady: Lambda = 1
  auto cl =
      verify_comparison(*cig, ComparisonKind::SolitonLaplacian, unit_radii());
  CHECK(cl.pass);
  CHECK(cl.params.at("Lambda") == doctest::Approx(1.0));
  CHECK(verify_comparison(*cig, ComparisonKind::SolitonRatio, unit_radii())
            .pass);

  auto gau = catalog_model(ModelKind::GaussianSoliton);  // shrinking
  CHECK(verify_comparison(*gau, ComparisonKind::SolitonLaplacian,
                          unit_radii())
            .pass);
  CHECK(verify_comparison(*gau, ComparisonKind::SolitonRatio, unit_radii())
            .pass);

  // Hyperbolic space as an expanding soliton (Einstein, constant potential).
  auto hyp = catalog_model(ModelKind::Hyperbolic);
  CHECK(verify_comparison(*hyp, ComparisonKind::SolitonLaplacian,
                          unit_radii())
            .pass);
  CHECK(verify_comparison(*hyp, ComparisonKind::SolitonRatio, unit_radii())
            .pass);
  // Understating the soliton constant and gradient bound must fail.
  ComparisonOptions weak;
  weak.lambda_override = 0.5;
  weak.Lambda_override = 0.0;
  CHECK_FALSE(verify_comparison(*hyp, ComparisonKind::SolitonLaplacian,
                                {1.0}, weak)
                  .pass);
  weak.lambda_override = 0.1;
  CHECK_FALSE(verify_comparison(*hyp, ComparisonKind::SolitonRatio,
                                {0.5, 1.0}, weak)
                  .pass);

  auto euc = catalog_model(ModelKind::Euclidean);
  CHECK_THROWS_AS(verify_comparison(*euc, ComparisonKind::SolitonLaplacian,
                                    unit_radii()),
                  UnsupportedKind);
}

TEST_CASE("concavity margin property") {
  auto sf = catalog_model(ModelKind::SingularFieldModel);
  auto cj = verify_comparison(*sf, ComparisonKind::Jensen, unit_radii());
  CHECK(cj.pass);

  CounterRng rng{20240817ULL, 5ULL};
  for (uint64_t i = 0; i < 10000; ++i) {
    double d0 = 1e-3 + 2.0 * rng.uniform(i, 0);
    double s = d0 * rng.uniform(i, 1);
    double a = rng.uniform(i, 2) * 0.999;
    CHECK(jensen_margin(s, d0, a) >= -1e-12);
  }
  // Strictly positive in the interior; the reversed inequality fails.
  CHECK(jensen_margin(0.5, 1.0, 0.5) > 0.1);
  CHECK_FALSE(jensen_margin(0.5, 1.0, 0.5) <= 0.0);
}

TEST_CASE("classical monotonicity of the normalized volume element") {
  // Models with Ric >= 0 and no field: w(s)/s^{n-1} nonincreasing.
  for (ModelKind k :
       {ModelKind::Euclidean, ModelKind::Sphere, ModelKind::WarpedCustom}) {
    Model m = build_model(spec_of(k));
    INFO("model ", m.name());
    auto p = radial_profile(m, 1.0, 100);
    double prev = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < p.s_grid.size(); ++i) {
      double q = p.w[i] / std::pow(p.s_grid[i], m.n() - 1);
      CHECK(q <= prev + 1e-12);
      prev = q;
    }
  }
}

TEST_CASE("comparison kind registry") {
  CHECK(all_comparison_kinds().size() == 12);
  for (auto k : all_comparison_kinds())
    CHECK(comparison_name(k) != "unknown");
  CHECK_THROWS_AS(
      verify_comparison(*catalog_model(ModelKind::Euclidean),
                        ComparisonKind::LaplacianComparison, {0.5, 0.2}),
      InvalidSpec);
}
