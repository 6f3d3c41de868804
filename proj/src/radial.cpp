#include "riccibound/radial.hpp"

#include <algorithm>
#include <cmath>

#include "riccibound/constants.hpp"
#include "riccibound/numerics.hpp"

namespace rb {

namespace {

double w_exact(const Model& m, double s) {
  return std::pow(m.f(s), m.n() - 1);
}

// Laplacian of the distance from the profile center: (n-1) f'/f.
double lap_distance(const Model& m, double s) {
  if (m.flat_base()) return (m.n() - 1) / s;
  return (m.n() - 1) * m.fp(s) / m.f(s);
}

// <V, grad s> for a profile centered at O (grad s = outward radial unit).
double field_inner(const Model& m, double s) {
  return m.has_field() ? m.v(s) : 0.0;
}

// <V, grad s> at parameter t along a straight ray from a center at distance
// d0 from O (flat-base models). ray_sign +1: the ray points away from O, so
// d(., O) = d0 + t; ray_sign -1: the ray runs through O, d(., O) = |d0 - t|,
// and the field direction flips past O.
double field_inner_offcenter(const Model& m, double t, double d0,
                             int ray_sign) {
  if (!m.has_field()) return 0.0;
  if (ray_sign > 0) return m.v(d0 + t);
  double d = d0 - t;
  if (std::abs(d) < kEpsMin)
    throw SingularEvaluation("field evaluated at its origin");
  return d > 0 ? -m.v(d) : m.v(-d);
}

// Bakry-Emery view of a model: potential, its radial derivative, and the
// lower-bound constant for Ric + Hess L. Hyperbolic space is included as
// the Einstein case with constant potential (an expanding soliton).
struct PotentialView {
  bool valid = false;
  double lambda_be = 0.0;   // Ric + Hess L >= -lambda_be g
  double lambda_sol = 0.0;  // soliton constant when exact
  bool exact_soliton = false;
  double sup_abs_L = 0.0;   // on the tested ball
  std::function<double(double)> L, Lp;
};

PotentialView potential_view(const Model& m, double s_cap) {
  PotentialView pv;
  if (m.has_potential()) {
    pv.valid = true;
    pv.exact_soliton = m.is_soliton();
    pv.lambda_sol = m.soliton_constant();
    pv.lambda_be = std::max(0.0, -pv.lambda_sol);
    pv.L = [&m](double s) { return m.L(s); };
    pv.Lp = [&m](double s) { return m.Lp(s); };
    double sup = 0.0;
    for (double s : linspace(0.0, s_cap, 257))
      sup = std::max(sup, std::abs(m.L(s)));
    pv.sup_abs_L = sup;
  } else if (m.spec().kind == ModelKind::Hyperbolic) {
    // Einstein: Ric = -(n-1) kappa g = Ric + Hess L with L constant; the
    // normalization R + |grad L|^2 - 2 lam L = 0 fixes L = n/2.
    pv.valid = true;
    pv.exact_soliton = true;
    pv.lambda_sol = -(m.n() - 1) * m.spec().curvature;
    pv.lambda_be = -pv.lambda_sol;
    double Lc = m.n() / 2.0;
    pv.L = [Lc](double) { return Lc; };
    pv.Lp = [](double) { return 0.0; };
    pv.sup_abs_L = Lc;
  }
  return pv;
}

// Hoelder constant of the radial potential on [0, s_cap] for exponent a,
// measured on a grid (the potential is radial, so radial pairs dominate).
double measure_k1(const PotentialView& pv, double a, double s_cap) {
  auto grid = linspace(0.0, s_cap, 129);
  double k1 = 0.0;
  for (size_t i = 0; i < grid.size(); ++i)
    for (size_t j = i + 1; j < grid.size(); ++j) {
      double d = grid[j] - grid[i];
      if (d < 1e-9) continue;
      k1 = std::max(k1, std::abs(pv.L(grid[j]) - pv.L(grid[i])) /
                            std::pow(d, a));
    }
  return k1;
}

// Averaged gradient bound sup_{r<=s_cap} r^beta (avg_{B(O,r)} |L'|) with
// beta = 0, q = 1, by quadrature against the exact volume element.
double measure_k2(const Model& m, const PotentialView& pv, double s_cap) {
  double k2 = 0.0;
  for (double r : linspace(s_cap / 16.0, s_cap, 16)) {
    double num = integrate(
        [&](double s) { return std::abs(pv.Lp(s)) * w_exact(m, s); }, 0.0, r);
    double den =
        integrate([&](double s) { return w_exact(m, s); }, 0.0, r);
    k2 = std::max(k2, num / den);
  }
  return k2;
}

void require_pairs(const std::vector<double>& radii) {
  if (radii.size() < 2)
    throw InvalidSpec("ratio comparison needs at least two radii");
}

void check_radii(const std::vector<double>& radii, double cut) {
  if (radii.empty()) throw InvalidSpec("empty radius grid");
  double prev = 0.0;
  for (double r : radii) {
    if (r <= prev) throw InvalidSpec("radii must be positive increasing");
    prev = r;
  }
  if (radii.back() >= cut)
    throw CutLocusReached("radius grid reaches the conjugate radius");
}

}  // namespace

double RadialProfile::psi(size_t i, int n) const {
  return std::max(delta_s[i] - (n - 1) / s_grid[i], 0.0);
}

std::string comparison_name(ComparisonKind k) {
  switch (k) {
    case ComparisonKind::LaplacianComparison: return "laplacian_comparison";
    case ComparisonKind::VolumeElementRatio: return "volume_element_ratio";
    case ComparisonKind::VolumeElementAbs: return "volume_element_abs";
    case ComparisonKind::VolumeNoninflation: return "volume_noninflation";
    case ComparisonKind::VolumeRatioBound: return "volume_ratio_bound";
    case ComparisonKind::BoundedVLaplacian: return "bounded_v_laplacian";
    case ComparisonKind::BoundedVRatio: return "bounded_v_ratio";
    case ComparisonKind::BELaplacian: return "be_laplacian";
    case ComparisonKind::BEVolumeRatio: return "be_volume_ratio";
    case ComparisonKind::SolitonLaplacian: return "soliton_laplacian";
    case ComparisonKind::SolitonRatio: return "soliton_ratio";
    case ComparisonKind::Jensen: return "jensen";
  }
  return "unknown";
}

const std::vector<ComparisonKind>& all_comparison_kinds() {
  static const std::vector<ComparisonKind> kinds = {
      ComparisonKind::LaplacianComparison, ComparisonKind::VolumeElementRatio,
      ComparisonKind::VolumeElementAbs,    ComparisonKind::VolumeNoninflation,
      ComparisonKind::VolumeRatioBound,    ComparisonKind::BoundedVLaplacian,
      ComparisonKind::BoundedVRatio,       ComparisonKind::BELaplacian,
      ComparisonKind::BEVolumeRatio,       ComparisonKind::SolitonLaplacian,
      ComparisonKind::SolitonRatio,        ComparisonKind::Jensen};
  return kinds;
}

double cut_radius(const Model& m) {
  if (m.flat_base()) return std::numeric_limits<double>::infinity();
  // First zero of the warp function beyond 0, by scan + bracketed root.
  // The scan window is finite; warps that stay positive on it count as
  // having no conjugate radius.
  double hi = std::isfinite(m.s_max()) ? 2.0 * m.s_max() : 64.0;
  int steps = 8192;
  double prev_s = hi / steps;
  for (int i = 2; i <= steps; ++i) {
    double s = hi * i / steps;
    if (m.f(s) <= 0.0)
      return find_root([&m](double t) { return m.f(t); }, prev_s, s);
    prev_s = s;
  }
  return std::numeric_limits<double>::infinity();
}

RadialProfile radial_profile(const Model& m, double s_max, int n_grid) {
  if (s_max <= 0.0 || n_grid < 2) throw InvalidSpec("radial_profile grid");
  RadialProfile p;
  p.cut_radius = cut_radius(m);
  double top = s_max;
  if (top >= p.cut_radius) {
    top = p.cut_radius * (1.0 - 1e-9);
    p.truncated = true;
  }
  for (int i = 1; i <= n_grid; ++i) {
    double s = top * i / n_grid;
    p.s_grid.push_back(s);
    p.w.push_back(w_exact(m, s));
    p.delta_s.push_back(lap_distance(m, s));
  }
  return p;
}

RadialProfile jacobi_profile(const Model& m, double s_max, int n_grid) {
  RadialProfile p;
  p.cut_radius = cut_radius(m);
  double top = s_max;
  if (top >= p.cut_radius) {
    top = p.cut_radius * (1.0 - 1e-9);
    p.truncated = true;
  }
  const int n = m.n();
  // Radial sectional curvature k(s) = -f''/f, with a small-s guard where
  // the ratio is 0/0 (its limit equals the curvature at the center).
  auto k = [&m](double s) {
    double se = std::max(s, 1e-6);
    return m.flat_base() ? 0.0 : -m.fpp(se) / m.f(se);
  };
  double s0 = 1e-8;
  std::vector<double> y = {s0, 1.0};  // J(s0) ~ s0, J'(s0) ~ 1
  auto rhs = [&k](const std::vector<double>& y, std::vector<double>& dy,
                  double s) {
    dy[0] = y[1];
    dy[1] = -k(s) * y[0];
  };
  double prev = s0;
  for (int i = 1; i <= n_grid; ++i) {
    double s = top * i / n_grid;
    y = ode_solve(rhs, y, prev, s);
    prev = s;
    p.s_grid.push_back(s);
    p.w.push_back(std::pow(y[0], n - 1));
    p.delta_s.push_back((n - 1) * y[1] / y[0]);
  }
  return p;
}

double ball_volume(const Model& m, double r) {
  if (r <= 0.0) throw InvalidSpec("ball_volume: r > 0 required");
  double cut = cut_radius(m);
  if (r > cut * (1.0 + 1e-12))
    throw CutLocusReached("ball_volume beyond the conjugate radius");
  double omega = sphere_area_const(m.n());
  return omega * integrate([&](double s) { return w_exact(m, s); }, 0.0,
                           std::min(r, cut));
}

double sphere_area(const Model& m, double r) {
  if (r <= 0.0) throw InvalidSpec("sphere_area: r > 0 required");
  if (r > cut_radius(m) * (1.0 + 1e-12))
    throw CutLocusReached("sphere_area beyond the conjugate radius");
  return sphere_area_const(m.n()) * w_exact(m, r);
}

double jensen_margin(double s, double d0, double alpha) {
  if (!(s >= 0.0 && s <= d0) || alpha < 0.0 || alpha >= 1.0)
    throw InvalidSpec("jensen_margin: needs 0 <= s <= d0, alpha in [0,1)");
  double e = 1.0 - alpha;
  return std::pow(s, e) + std::pow(d0 - s, e) - std::pow(d0, e);
}

BoundCertificate verify_comparison(const Model& m, ComparisonKind kind,
                                   const std::vector<double>& radii,
                                   const ComparisonOptions& opt) {
  const int n = m.n();
  const double lam =
      opt.lambda_override >= 0.0 ? opt.lambda_override : m.spec().lambda;
  const double K = m.spec().K;
  const double al = m.spec().alpha;
  const double Ca = opt.c_alpha >= 0.0 ? opt.c_alpha : c_alpha(al);
  const double cut = cut_radius(m);
  check_radii(radii, cut);

  if (opt.center_d0 > 0.0 && kind != ComparisonKind::LaplacianComparison &&
      !(m.flat_base() && !m.has_field()))
    throw UnsupportedKind("off-center profiles: laplacian comparison only");

  BoundCertificate c;
  c.kind = comparison_name(kind);
  c.model = m.name();
  c.params["lambda"] = lam;
  c.params["K"] = K;
  c.params["alpha"] = al;
  c.params["c_alpha"] = Ca;
  if (opt.center_d0 > 0.0) c.params["center_d0"] = opt.center_d0;

  auto Q = [&](double r) { return ball_volume(m, r) / std::pow(r, n); };

  switch (kind) {
    case ComparisonKind::LaplacianComparison: {
      if (opt.center_d0 > 0.0 && !m.flat_base())
        throw UnsupportedKind(
            "off-center laplacian comparison needs a flat base");
      double c_star = 0.0;
      for (double s : radii) {
        double lhs;
        if (opt.center_d0 > 0.0)
          lhs = -field_inner_offcenter(m, s, opt.center_d0, opt.ray_sign);
        else
          lhs = lap_distance(m, s) - (n - 1) / s - field_inner(m, s);
        double rhs = lam / 3.0 * s + Ca * K * std::pow(s, -al);
        c.samples.push_back(s);
        c.lhs.push_back(lhs);
        c.rhs.push_back(rhs);
        if (K > 0.0)
          c_star = std::max(c_star,
                            (lhs - lam / 3.0 * s) * std::pow(s, al) / K);
      }
      if (K > 0.0) c.details["c_alpha_star"] = c_star;
      break;
    }
    case ComparisonKind::VolumeElementRatio: {
      require_pairs(radii);
      for (size_t i = 1; i < radii.size(); ++i) {
        double s1 = radii[i - 1], s2 = radii[i];
        c.samples.push_back(s2);
        c.lhs.push_back(w_exact(m, s2) / std::pow(s2, n - 1));
        c.rhs.push_back(std::exp(Ca * K * std::pow(s2, 1.0 - al) +
                                 lam * s2 * s2) *
                        w_exact(m, s1) / std::pow(s1, n - 1));
      }
      break;
    }
    case ComparisonKind::VolumeElementAbs: {
      for (double s : radii) {
        c.samples.push_back(s);
        c.lhs.push_back(w_exact(m, s));
        c.rhs.push_back(std::exp(Ca * K * std::pow(s, 1.0 - al) +
                                 lam * s * s) *
                        std::pow(s, n - 1));
      }
      break;
    }
    case ComparisonKind::VolumeNoninflation: {
      double omega = sphere_area_const(n);
      for (double r : radii) {
        c.samples.push_back(r);
        c.lhs.push_back(ball_volume(m, r));
        c.rhs.push_back(std::exp(Ca * K * std::pow(r, 1.0 - al) +
                                 lam * r * r) *
                        omega / n * std::pow(r, n));
      }
      break;
    }
    case ComparisonKind::VolumeRatioBound: {
      require_pairs(radii);
      if (radii.back() > 1.0 + 1e-12)
        throw InvalidSpec("volume ratio bound certified on radii <= 1");
      double C = c_ratio(n, lam, K, al, m.spec().rho);
      c.params["c_ratio"] = C;
      double c_star = 0.0;
      for (size_t i = 1; i < radii.size(); ++i) {
        double r1 = radii[i - 1], r2 = radii[i];
        double expo = lam * (r2 * r2 - r1 * r1) +
                      K * std::pow(r2 - r1, 1.0 - al);
        c.samples.push_back(r2);
        c.lhs.push_back(Q(r2));
        c.rhs.push_back(std::exp(C * expo) * Q(r1));
        if (expo > 1e-12)
          c_star = std::max(c_star, std::log(Q(r2) / Q(r1)) / expo);
      }
      c.details["c_ratio_star"] = c_star;
      break;
    }
    case ComparisonKind::BoundedVLaplacian:
    case ComparisonKind::BoundedVRatio: {
      if (m.has_field() && al > 0.0)
        throw UnsupportedKind("bounded-field comparison needs alpha = 0");
      if (kind == ComparisonKind::BoundedVLaplacian) {
        for (double s : radii) {
          c.samples.push_back(s);
          c.lhs.push_back(lap_distance(m, s) - (n - 1) / s);
          c.rhs.push_back(lam / 3.0 * s + 2.0 * K);
        }
      } else {
        require_pairs(radii);
        for (size_t i = 1; i < radii.size(); ++i) {
          double r1 = radii[i - 1], r2 = radii[i];
          c.samples.push_back(r2);
          c.lhs.push_back(Q(r2));
          c.rhs.push_back(
              std::exp(lam * (r2 * r2 - r1 * r1) + 2.0 * K * (r2 - r1)) *
              Q(r1));
        }
      }
      break;
    }
    case ComparisonKind::BELaplacian:
    case ComparisonKind::BEVolumeRatio: {
      if (radii.back() > 1.0 + 1e-12)
        throw InvalidSpec("gradient-case comparison certified on radii < 1");
      PotentialView pv = potential_view(m, radii.back() + 1.0);
      if (!pv.valid)
        throw UnsupportedKind("gradient-case comparison needs a potential");
      BakryEmeryCondition be;
      be.a = al > 0.0 && al < 1.0 ? al : 0.5;
      be.beta = 0.0;
      be.q = 1.0;
      be.K1 = opt.be_k1_override >= 0.0 ? opt.be_k1_override
                                        : measure_k1(pv, be.a, radii.back() + 1.0);
      be.K2 = opt.be_k2_override >= 0.0 ? opt.be_k2_override
                                        : measure_k2(m, pv, radii.back());
      be.validate();
      double lam_be =
          opt.lambda_override >= 0.0 ? opt.lambda_override : pv.lambda_be;
      c.params["lambda"] = lam_be;
      c.params["K1"] = be.K1;
      c.params["K2"] = be.K2;
      c.params["a"] = be.a;
      if (kind == ComparisonKind::BELaplacian) {
        for (double s : radii) {
          c.samples.push_back(s);
          c.lhs.push_back(lap_distance(m, s) - (n - 1) / s - pv.Lp(s));
          c.rhs.push_back(lam_be / 3.0 * s +
                          4.0 * be.K1 * std::pow(s, be.a - 1.0));
        }
      } else {
        require_pairs(radii);
        for (size_t i = 1; i < radii.size(); ++i) {
          double r1 = radii[i - 1], r2 = radii[i];
          c.samples.push_back(r2);
          c.lhs.push_back(Q(r2));
          c.rhs.push_back(std::exp(lam_be * (r2 * r2 - r1 * r1) +
                                   be.K2 * std::pow(r2 - r1, 1.0 - be.beta) +
                                   4.0 * be.K1 * std::pow(r2 - r1, be.a)) *
                          Q(r1));
        }
      }
      break;
    }
    case ComparisonKind::SolitonLaplacian:
    case ComparisonKind::SolitonRatio: {
      PotentialView pv = potential_view(m, 2.0 * radii.back());
      if (!pv.valid || !pv.exact_soliton)
        throw UnsupportedKind("soliton comparison needs an exact soliton");
      double lam_sol = opt.lambda_override >= 0.0 ? opt.lambda_override
                                                  : std::abs(pv.lambda_sol);
      double Lambda;
      if (opt.Lambda_override >= 0.0) {
        Lambda = opt.Lambda_override;
      } else {
        double C1n = opt.C1n >= 0.0 ? opt.C1n : n * (n - 1);
        Lambda = SolitonNormalization::derive(pv.lambda_sol, pv.sup_abs_L, C1n)
                     .Lambda;
      }
      c.params["lambda"] = lam_sol;
      c.params["Lambda"] = Lambda;
      if (kind == ComparisonKind::SolitonLaplacian) {
        for (double s : radii) {
          c.samples.push_back(s);
          c.lhs.push_back(lap_distance(m, s) - (n - 1) / s);
          c.rhs.push_back(lam_sol / 3.0 * s + 2.0 * Lambda);
        }
      } else {
        require_pairs(radii);
        for (size_t i = 1; i < radii.size(); ++i) {
          double r1 = radii[i - 1], r2 = radii[i];
          c.samples.push_back(r2);
          c.lhs.push_back(Q(r2));
          c.rhs.push_back(std::exp(lam_sol * (r2 * r2 - r1 * r1) +
                                   2.0 * Lambda * (r2 - r1)) *
                          Q(r1));
        }
      }
      break;
    }
    case ComparisonKind::Jensen: {
      double d0 = radii.back();
      for (double s : radii) {
        c.samples.push_back(s);
        c.lhs.push_back(std::pow(d0, 1.0 - al));
        c.rhs.push_back(std::pow(s, 1.0 - al) +
                        std::pow(d0 - s, 1.0 - al));
      }
      break;
    }
  }
  c.finalize();
  return c;
}

BoundCertificate verify_volume_ratio_monotone(const Model& m,
                                              const std::vector<double>& r_grid) {
  BoundCertificate c =
      verify_comparison(m, ComparisonKind::VolumeRatioBound, r_grid);
  c.kind = "volume_ratio_monotone";
  if (m.spec().lambda == 0.0 && m.spec().K == 0.0)
    c.note = "lambda = K = 0: bound specializes to exact monotonicity";
  return c;
}

}  // namespace rb
