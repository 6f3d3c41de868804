#include "riccibound/functional.hpp"

#include <algorithm>
#include <cmath>

#include "riccibound/constants.hpp"
#include "riccibound/numerics.hpp"
#include "riccibound/radial.hpp"

namespace rb {

namespace {

double w_exact(const Model& m, double s) {
  return std::pow(m.f(s), m.n() - 1);
}

// Average of a radial integrand h(s) over B(O,r): int h w / int w.
double ball_average(const Model& m, double r,
                    const std::function<double(double)>& h) {
  double num =
      integrate([&](double s) { return h(s) * w_exact(m, s); }, 0.0, r, 1e-12);
  double den = integrate([&](double s) { return w_exact(m, s); }, 0.0, r, 1e-12);
  return num / den;
}

}  // namespace

AveragedNorm averaged_field_norm(const Model& m, double d0, double r,
                                 double q) {
  if (r <= 0.0 || q <= 0.0)
    throw InvalidSpec("averaged_field_norm: r > 0, q > 0 required");
  AveragedNorm out{d0, r, q, 0.0};
  if (!m.has_field()) return out;
  if (d0 == 0.0) {
    double lo = m.spec().alpha > 0.0 ? kEpsMin : 0.0;
    double num = integrate(
        [&](double s) {
          return std::pow(m.field_norm(s), q) * w_exact(m, s);
        },
        lo, r, 1e-12);
    double den =
        integrate([&](double s) { return w_exact(m, s); }, 0.0, r, 1e-12);
    out.value = std::pow(num / den, 1.0 / q);
    return out;
  }
  if (!m.flat_base() || m.n() != 3)
    throw UnsupportedDimension(
        "off-origin averaged norms need the flat three-dimensional base");
  // Axially symmetric reduction around O: for u = d(y,O), the part of the
  // sphere of radius u inside B(x,r) is the cap with
  // cos(theta) >= (u^2 + d0^2 - r^2) / (2 u d0), of area 2 pi u^2 (1-cos).
  double lo = std::max(kEpsMin, d0 - r), hi = d0 + r;
  auto cap = [&](double u) {
    double c = (u * u + d0 * d0 - r * r) / (2.0 * u * d0);
    return 1.0 - std::clamp(c, -1.0, 1.0);
  };
  double num = integrate(
      [&](double u) {
        return std::pow(m.field_norm(u), q) * u * u * cap(u);
      },
      lo, hi, 1e-12);
  double den =
      integrate([&](double u) { return u * u * cap(u); }, lo, hi, 1e-12);
  out.value = std::pow(num / den, 1.0 / q);
  return out;
}

BoundCertificate verify_lq_vector_bound(const Model& m,
                                        const std::vector<double>& center_d0s,
                                        const std::vector<double>& radii,
                                        double q) {
  const int n = m.n();
  const double al = m.spec().alpha;
  if (q <= 0.0 || (al > 0.0 && q >= n / al))
    throw ExponentOutOfRange("verify_lq_vector_bound: needs 0 < q < n/alpha");
  if (ball_volume(m, 1.0) < m.spec().rho)
    throw InvalidSpec("model violates its own noncollapsing floor");
  for (double r : radii)
    if (!(r > 0.0 && r <= 1.0))
      throw InvalidSpec("scaled field bound certified on radii <= 1");

  BoundCertificate c;
  c.kind = "lq_vector_bound";
  c.model = m.name();
  c.params["q"] = q;
  c.params["alpha"] = al;
  double bound = c_lq(n, m.spec().lambda, m.spec().K, al, m.spec().rho, q) *
                 m.spec().K;
  c.params["c_lq"] = m.spec().K > 0 ? bound / m.spec().K : 1.0;
  for (double d0 : center_d0s)
    for (double r : radii) {
      c.samples.push_back(r);
      c.lhs.push_back(std::pow(r, al) *
                      averaged_field_norm(m, d0, r, q).value);
      c.rhs.push_back(bound);
    }
  c.finalize();
  return c;
}

double distance_power_integral(const Model& m, double r, double gamma) {
  const int n = m.n();
  if (!(gamma < n))
    throw GammaTooLarge("distance_power_integral: gamma < n required");
  if (!(r > 0.0 && r <= 1.0))
    throw InvalidSpec("distance_power_integral: 0 < r <= 1");
  double lo = gamma > 0.0 ? kEpsMin : 0.0;
  double value = sphere_area_const(n) *
                 integrate(
                     [&](double s) {
                       return std::pow(s, -gamma) * w_exact(m, s);
                     },
                     lo, r, 1e-12);
  double bound = c_shell(n, gamma) *
                 std::exp(c_alpha(m.spec().alpha) * m.spec().K *
                              std::pow(r, 1.0 - m.spec().alpha) +
                          m.spec().lambda * r * r) *
                 std::pow(r, n - gamma);
  if (value > bound * (1.0 + 1e-9))
    throw IntegrationFailure("distance power integral exceeds its envelope");
  return value;
}

BoundCertificate verify_half_volume(const Model& m,
                                    const std::vector<double>& radii,
                                    const HalfVolumeOptions& opt) {
  const int n = m.n();
  double r0 = r0_threshold(n, m.spec().lambda, m.spec().K, m.spec().alpha,
                           m.spec().rho);
  for (double r : radii)
    if (r > r0 * (1.0 + 1e-12))
      throw RadiusAboveThreshold("half-volume radius above the r0 threshold");
  double delta = opt.delta_override > 0.0 ? opt.delta_override : delta_half(n);

  BoundCertificate c;
  c.kind = "half_volume";
  c.model = m.name();
  c.params["delta"] = delta;
  c.params["r0"] = r0;
  for (double r : radii) {
    c.samples.push_back(r);
    c.lhs.push_back(ball_volume(m, delta * r) / ball_volume(m, r));
    c.rhs.push_back(0.5);
  }
  c.finalize();
  return c;
}

std::vector<TestFunction> test_function_family(const std::string& name,
                                               double r) {
  std::vector<TestFunction> out;
  auto bump = [r](int p) {
    TestFunction t;
    t.name = "bump" + std::to_string(p);
    t.u = [r, p](double d) {
      return std::pow(std::max(1.0 - d / r, 0.0), p);
    };
    t.up = [r, p](double d) {
      return d >= r ? 0.0 : -p / r * std::pow(1.0 - d / r, p - 1);
    };
    return t;
  };
  if (name == "bump1" || name == "all") out.push_back(bump(1));
  if (name == "bump2" || name == "all") out.push_back(bump(2));
  if (name == "bump3" || name == "all") out.push_back(bump(3));
  if (name == "gaussian" || name == "all") {
    TestFunction t;
    t.name = "gaussian";
    double tail = std::exp(-4.0);
    t.u = [r, tail](double d) {
      return std::max(std::exp(-4.0 * d * d / (r * r)) - tail, 0.0);
    };
    t.up = [r](double d) {
      return d >= r ? 0.0
                    : -8.0 * d / (r * r) * std::exp(-4.0 * d * d / (r * r));
    };
    out.push_back(t);
  }
  if (out.empty()) throw InvalidSpec("unknown test function family: " + name);
  return out;
}

BoundCertificate verify_sobolev(const Model& m, double r,
                                const std::vector<TestFunction>& fs,
                                const SobolevOptions& opt) {
  const int n = m.n();
  double r0 = r0_threshold(n, m.spec().lambda, m.spec().K, m.spec().alpha,
                           m.spec().rho);
  if (r > r0 * (1.0 + 1e-12))
    throw RadiusAboveThreshold("sobolev radius above the r0 threshold");
  if (n == 2 && opt.require_l2)
    throw UnsupportedDimension("the L2 Sobolev exponent needs n >= 3");

  BoundCertificate c;
  c.kind = "sobolev";
  c.model = m.name();
  c.params["r"] = r;
  c.params["c_iso"] = c_iso(n);
  if (n >= 3) c.params["c_sobolev2"] = c_sobolev2(n);

  int row = 0;
  for (const auto& f : fs) {
    if (n >= 3) {
      double p2 = 2.0 * n / (n - 2.0);
      double lhs2 = std::pow(
          ball_average(m, r, [&](double s) { return std::pow(f.u(s), p2); }),
          (n - 2.0) / n);
      double rhs2 =
          c_sobolev2(n) * r * r *
          ball_average(m, r, [&](double s) { return f.up(s) * f.up(s); });
      c.samples.push_back(row++);
      c.lhs.push_back(lhs2);
      c.rhs.push_back(rhs2);
    }
    double p1 = n / (n - 1.0);
    double lhs1 = std::pow(
        ball_average(m, r, [&](double s) { return std::pow(f.u(s), p1); }),
        (n - 1.0) / n);
    double rhs1 =
        c_iso(n) * r *
        ball_average(m, r, [&](double s) { return std::abs(f.up(s)); });
    c.samples.push_back(row++);
    c.lhs.push_back(lhs1);
    c.rhs.push_back(rhs1);
  }
  // Isoperimetric ratio on radial sub-balls Omega = B(O, a r): the ratio
  // vol(B)^{1/n} vol(Omega)^{(n-1)/n} / area(boundary) is <= c_iso(n) r.
  double volB = ball_volume(m, r);
  for (double a : opt.iso_fractions) {
    c.samples.push_back(row++);
    c.lhs.push_back(std::pow(volB, 1.0 / n) *
                    std::pow(ball_volume(m, a * r), (n - 1.0) / n) /
                    sphere_area(m, a * r));
    c.rhs.push_back(c_iso(n) * r);
  }
  c.finalize();
  return c;
}

}  // namespace rb
