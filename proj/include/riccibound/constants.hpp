#pragma once
#include <string>
#include <vector>

namespace rb {

// Explicit constant chain used by the comparison certificates. Each entry is
// documented with one line of provenance in constant_table().

// Radial correction constant: the comparison proof bounds the field term by
// 2/(1-alpha) * s^{-alpha} per integration branch; doubling covers the branch
// crossing the field origin.
double c_alpha(double alpha);

double sphere_area_const(int n);  // vol(S^{n-1})
double ball_vol_const(int n);     // vol of the unit flat n-ball

// Dyadic-shell constant for integrals of d^{-gamma} over balls, gamma < n.
double c_shell(int n, double gamma);

// Noncollapsing propagated to small radii: vol(B(x,r)) >= c * rho * r^n, r<=1.
double c_noncollapse(int n, double lambda, double K, double alpha);

// Scaled averaged L^q bound of the field: r^alpha ||V||*_q <= c_lq * K.
double c_lq(int n, double lambda, double K, double alpha, double rho, double q);

// Volume ratio constant: Q(r2)/Q(r1) <= exp(C [lambda(r2^2-r1^2) +
// K (r2-r1)^{1-alpha}]), Q = vol(B)/r^n.
double c_ratio(int n, double lambda, double K, double alpha, double rho);

// Half-volume radius fraction: largest delta with ((1-3d)/(1+d))^n = 3/4.
double delta_half(int n);

// Radius threshold r0: exp(C(lambda r^2 + K r^{1-alpha})) <= 3/2.
double r0_threshold(int n, double lambda, double K, double alpha, double rho);

// Isoperimetric bound ID*_n <= c_iso(n) * r on the certified radial family.
double c_iso(int n);

// L^2 Sobolev constant in the averaged form, from c_iso via the L^1 form.
double c_sobolev2(int n);

// Maximum principle constant in sup u <= sup_boundary u + C r^2 ||f||*_q.
double c_max_principle(int n);

// Moser exponent ladder mu = n/(n-2), p_i = mu^i / 2 (documentation record).
std::vector<double> moser_ladder(int n, int steps);

struct ConstantRow {
  std::string name;
  double value;
  std::string provenance;
};
std::vector<ConstantRow> constant_table(int n, double lambda, double K,
                                        double alpha, double rho);

}  // namespace rb
