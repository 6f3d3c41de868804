#pragma once
#include <Eigen/Dense>

#include "riccibound/certificate.hpp"
#include "riccibound/model.hpp"

namespace rb {

// Symmetric 2-tensor at a point, expressed in an orthonormal frame so that
// eigenvalue bounds are frame-independent.
struct SymTensor2 {
  Eigen::MatrixXd m;
  std::string frame = "orthonormal-polar";
  double min_eigenvalue() const;
  double symmetry_defect() const;  // max |m - m^T|
};

// Ric + half Lie_V g at distance s from the origin, in the orthonormal polar
// frame (radial direction first). Equals Ric + Hess L on potential models.
SymTensor2 modified_ricci(const Model& m, double s);

// Hessian of the potential in the same frame (potential models only).
SymTensor2 hessian_potential(const Model& m, double s);

// lhs = -lambda, rhs = smallest eigenvalue of the modified Ricci per sample.
BoundCertificate verify_lower_bound(const Model& m,
                                    const std::vector<double>& sample_s,
                                    double tolerance = 1e-8);

// Max-norm discrepancy between the analytic modified Ricci and a second-order
// central-difference reconstruction through coordinate Christoffel symbols.
double finite_difference_check(const Model& m, double s, double h);

// Same oracle for the Hessian path on potential models.
double finite_difference_check_hessian(const Model& m, double s, double h);

// Optional verdict kind: Ric + half Lie_V g - (N-n)^{-1} V (x) V >= -lambda g.
// No catalog values are asserted for it; exposed for scenario use.
SymTensor2 n_bakry_emery_tensor(const Model& m, double s, double N);

}  // namespace rb
