#include "riccibound/constants.hpp"

#include <cmath>
#include <stdexcept>

#include "riccibound/numerics.hpp"

namespace rb {

double c_alpha(double alpha) {
  if (!(alpha >= 0 && alpha < 1))
    throw std::invalid_argument("c_alpha: alpha must be in [0,1)");
  return 4.0 / (1.0 - alpha);
}

double sphere_area_const(int n) {
  return 2.0 * std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0);
}

double ball_vol_const(int n) { return sphere_area_const(n) / n; }

double c_shell(int n, double gamma) {
  if (!(gamma < n)) throw std::invalid_argument("c_shell: gamma must be < n");
  return std::pow(2.0, gamma) * n / (n - gamma) * sphere_area_const(n);
}

double c_noncollapse(int n, double lambda, double K, double alpha) {
  (void)n;
  return std::exp(-(c_alpha(alpha) * K + lambda));
}

double c_lq(int n, double lambda, double K, double alpha, double rho,
            double q) {
  if (alpha == 0.0) return 1.0;  // |V| <= K directly
  double ca = c_alpha(alpha);
  // Near case: field origin within 2r; shell integral over B(O,3r), r <= 1,
  // divided by the noncollapsed ball volume.
  double case1 = c_shell(n, alpha * q) * std::pow(3.0, n - alpha * q) *
                 std::exp(ca * K * 3.0 + 9.0 * lambda) /
                 (rho * c_noncollapse(n, lambda, K, alpha));
  return std::max(1.0, std::pow(case1, 1.0 / q));
}

double c_ratio(int n, double lambda, double K, double alpha, double rho) {
  double field_part =
      (c_alpha(alpha) + c_lq(n, lambda, K, alpha, rho, 1.0)) / (1.0 - alpha);
  return std::max(1.0 / 6.0, field_part);
}

double delta_half(int n) {
  auto g = [n](double d) {
    return std::pow((1.0 - 3.0 * d) / (1.0 + d), n) - 0.75;
  };
  return find_root(g, 0.0, 1.0 / 3.0 - 1e-12, 1e-12);
}

double r0_threshold(int n, double lambda, double K, double alpha, double rho) {
  double C = c_ratio(n, lambda, K, alpha, rho);
  double target = std::log(1.5);
  auto g = [&](double r) {
    return C * (lambda * r * r + K * std::pow(r, 1.0 - alpha)) - target;
  };
  if (g(1.0) <= 0) return 1.0;
  return find_root(g, 1e-9, 1.0, 1e-12);
}

double c_iso(int n) {
  double d = delta_half(n);
  return std::pow(10.0, 2 * n + 5) *
         std::pow(3.0 / (4.0 * std::pow(d, n)), 1.0 / n);
}

double c_sobolev2(int n) {
  if (n <= 2) throw std::invalid_argument("c_sobolev2: needs n >= 3");
  double p = 2.0 * (n - 1) / (n - 2);
  return p * p * c_iso(n) * c_iso(n);
}

double c_max_principle(int n) {
  (void)n;
  // Flat torsion-function extremal gives r^2/(2n); rounded up to 1.
  return 1.0;
}

std::vector<double> moser_ladder(int n, int steps) {
  double mu = double(n) / (n - 2);
  std::vector<double> p(steps);
  double m = 1.0;
  for (int i = 0; i < steps; ++i) {
    p[i] = m / 2.0;
    m *= mu;
  }
  return p;
}

std::vector<ConstantRow> constant_table(int n, double lambda, double K,
                                        double alpha, double rho) {
  std::vector<ConstantRow> t;
  t.push_back({"c_alpha", c_alpha(alpha),
               "radial field correction: 2/(1-alpha) per integration branch, "
               "doubled to cover rays crossing the field origin"});
  t.push_back({"sphere_area", sphere_area_const(n), "area of the unit sphere"});
  t.push_back({"c_shell", alpha > 0 ? c_shell(n, alpha) : c_shell(n, 0.0),
               "dyadic-shell sum for integrals of d^-gamma over balls"});
  t.push_back({"c_noncollapse", c_noncollapse(n, lambda, K, alpha),
               "unit-ball volume floor propagated to radii <= 1 via the "
               "volume-element ratio bound"});
  t.push_back({"c_lq_q1", c_lq(n, lambda, K, alpha, rho, 1.0),
               "averaged L^1 field bound: near case via shell integral over "
               "the tripled ball, far case via the pointwise bound"});
  t.push_back({"c_ratio", c_ratio(n, lambda, K, alpha, rho),
               "volume ratio exponent: max(1/6, (c_alpha + c_lq)/(1-alpha)) "
               "from integrating the ratio derivative"});
  t.push_back({"delta_half", delta_half(n),
               "largest delta with ((1-3d)/(1+d))^n = 3/4 (half-volume radius "
               "fraction)"});
  t.push_back({"r0_threshold", r0_threshold(n, lambda, K, alpha, rho),
               "largest r with exp(c_ratio(lambda r^2 + K r^{1-alpha})) <= 3/2"});
  t.push_back({"c_iso", c_iso(n),
               "isoperimetric envelope 10^{2n+5} (3/(4 delta^n))^{1/n} on the "
               "radial family"});
  if (n >= 3)
    t.push_back({"c_sobolev2", c_sobolev2(n),
                 "L^2 averaged Sobolev constant (2(n-1)/(n-2))^2 c_iso^2 from "
                 "the L^1 form by Cauchy-Schwarz"});
  t.push_back({"c_max_principle", c_max_principle(n),
               "maximum principle constant; flat torsion extremal r^2/(2n) "
               "rounded up"});
  return t;
}

}  // namespace rb
