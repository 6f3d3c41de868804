#pragma once
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "riccibound/certificate.hpp"
#include "riccibound/model.hpp"

namespace rb {

struct ExponentOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GammaTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RadiusAboveThreshold : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedDimension : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Averaged q-norm (avg_B |.|^q)^{1/q} of the field over a geodesic ball.
struct AveragedNorm {
  double center_d0 = 0.0;  // distance from ball center to the field origin
  double radius = 0.0;
  double q = 1.0;
  double value = 0.0;
};

// Averaged field norm over B(x,r) with d(x,O) = d0. d0 > 0 needs the flat
// three-dimensional base (axially symmetric reduction to one quadrature).
AveragedNorm averaged_field_norm(const Model& m, double d0, double r,
                                 double q);

// Scaled bound r^alpha ||V||*_{q,B(x,r)} <= c_lq * K over (center, radius)
// pairs. Requires 0 < q < n/alpha and the noncollapsing floor.
BoundCertificate verify_lq_vector_bound(const Model& m,
                                        const std::vector<double>& center_d0s,
                                        const std::vector<double>& radii,
                                        double q);

// int_{B(O,r)} d(y,O)^{-gamma} dg for gamma < n; the dyadic-shell bound
// c_shell(n,gamma) e^{c_alpha K r^{1-alpha} + lambda r^2} r^{n-gamma} is
// checked internally.
double distance_power_integral(const Model& m, double r, double gamma);

struct HalfVolumeOptions {
  double delta_override = -1.0;  // <0: the documented root delta(n)
};

// vol(B(delta r)) / vol(B(r)) <= 1/2 for radii below the r0 threshold.
BoundCertificate verify_half_volume(const Model& m,
                                    const std::vector<double>& radii,
                                    const HalfVolumeOptions& opt = {});

// Radial test function u(d) with derivative, compactly supported in [0,r).
struct TestFunction {
  std::string name;
  std::function<double(double)> u;
  std::function<double(double)> up;
};

// Families: "bump1", "bump2", "bump3" ((1-d/r)_+^p), "gaussian",
// or "all" for the whole catalog.
std::vector<TestFunction> test_function_family(const std::string& name,
                                               double r);

struct SobolevOptions {
  bool require_l2 = false;  // error out instead of skipping the L2 form, n=2
  std::vector<double> iso_fractions = {0.25, 0.5, 0.75};
};

// Averaged Sobolev inequalities on B(O,r): the L2 form (n >= 3), the L1
// form, and the isoperimetric ratio on radial sub-balls; one certificate
// row per (test function, form) and per sub-ball fraction.
BoundCertificate verify_sobolev(const Model& m, double r,
                                const std::vector<TestFunction>& fs,
                                const SobolevOptions& opt = {});

}  // namespace rb
