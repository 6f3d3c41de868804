#pragma once
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "riccibound/certificate.hpp"
#include "riccibound/geometry.hpp"
#include "riccibound/model.hpp"

namespace rb {

struct MetricViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EndpointsTooClose : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Finite metric space: labelled points with a full distance matrix.
struct FiniteMetricSpace {
  std::vector<std::string> labels;
  Eigen::MatrixXd D;

  size_t size() const { return labels.size(); }
  // Symmetry, zero diagonal, nonnegativity, and the triangle inequality to
  // 1e-9 (exhaustive up to 200 points, sampled triples beyond).
  void validate() const;

  double diameter() const;
  double radius() const;  // min over points of the eccentricity
};

// Plain-text exchange format: first line the point count, then the strict
// lower triangle row by row.
FiniteMetricSpace read_metric_space(std::istream& in);
void write_metric_space(const FiniteMetricSpace& Z, std::ostream& out);

// ---------------------------------------------------------------------------
// Segment inequality: for measurable A1, A2 inside B(x, r),
//   int_{A1 x A2} F_f <= C(n, lambda, K, alpha) (vol A1 + vol A2) r
//                         int_{B(x,3r)} f,
// with F_f the integral of f along the minimal geodesic and the explicit
// constant C = 3^n * 2 * exp(c_alpha K (2r)^{1-alpha} + lambda (2r)^2).
struct SegmentReport {
  double lhs_estimate = 0.0;     // vol(A1) vol(A2) * mean F_f
  double rhs_value = 0.0;
  double ratio = 0.0;            // lhs / rhs
  double ci_halfwidth = 0.0;     // 95% CI half-width of lhs_estimate
  double mean_segment_integral = 0.0;  // mean of F_f over sampled pairs
  double constant = 0.0;         // the explicit C(n, lambda, K, alpha)
  long n_pairs = 0;
  long rejected = 0;             // resampled cut-locus pairs
};

// f is radial about the base point: the integrand is f(d(., x)), f >= 0.
// A1 = B(x, r_a1), A2 = B(x, r_a2) with r_a1, r_a2 <= r.
SegmentReport segment_inequality_mc(const Model& m, double r,
                                    const std::function<double(double)>& f,
                                    double r_a1, double r_a2, long n_pairs,
                                    uint64_t seed);

// ---------------------------------------------------------------------------
// Excess function e(y) = d(y,q+) + d(y,q-) - d(q+,q-) with the endpoints
// q+- placed on the first axis at distances d_plus / d_minus from the base.
struct ExcessData {
  Point q_plus, q_minus;
  double d_plus = 0.0, d_minus = 0.0;
  double excess_at_base = 0.0;
  std::vector<double> sample_r, sample_theta;  // polar sample coordinates
  std::vector<double> e;                       // excess at the samples
  std::vector<double> b_plus, b_minus;         // d(.,q+-) - d(x,q+-)
};

ExcessData excess_data(const Model& m, double d_plus, double d_minus,
                       double R);

// Mean-value chain for the excess on B(x,R): nonnegativity, vanishing on the
// connecting segment, the averaged bound
//   avg e <= C (eps R + 2(n-1)R^2/(S - R) + lambda R^2 (S + R)
//               + K R^2 / (S - R)^alpha + K R^{2-alpha}),   S = lambda^{-1/2},
// the derived pointwise bound sup e <= 3 Psi1^{1/(n+1)} R, and the trend
// check that doubling the endpoint distances at least halves sup e / R.
BoundCertificate excess_suite(const Model& m, double d_plus, double d_minus,
                              double R);

// ---------------------------------------------------------------------------
// Axisymmetric Dirichlet problem on B(x,R): harmonic h with h = data(theta)
// on the boundary (theta the polar angle from the first axis), solved by
// harmonic expansion (cosine series for n=2, Legendre series for n=3).
struct AxisymmetricHarmonic {
  int n = 3;
  double R = 1.0;
  int modes = 0;
  std::vector<double> coeff;  // modal boundary coefficients
  // value / radial derivative / angular derivative (per unit angle) /
  // second radial derivative at (r, theta)
  double value(double r, double theta) const;
  double dr(double r, double theta) const;
  double dtheta(double r, double theta) const;
  double drr(double r, double theta) const;
  double dr_dtheta(double r, double theta) const;
  double dtheta2(double r, double theta) const;

  // radial mode tables on a uniform grid of [0, R]
  std::vector<double> r_grid;
  std::vector<std::vector<double>> phi, phip, phipp;
};

AxisymmetricHarmonic solve_axisymmetric_dirichlet(
    const Model& m, double R, const std::function<double(double)>& data);

// Harmonic replacements h+- of the Busemann-type data b+- on B(x,R):
// measures sup |h - b| / R, the averaged gradient defect, and the scaled
// Hessian mass on the half ball; for curved models a 3-point lambda ladder
// certifies that all three shrink as lambda shrinks.
BoundCertificate harmonic_approximation(const Model& m, double R,
                                        double d_plus, double d_minus);

// ---------------------------------------------------------------------------
// Splitting maps: k components evaluated at chart points.
struct SplittingMap {
  int k = 0;
  std::function<double(int, const Point&)> component;
};

// log-map coordinates about the origin (exact splitting map on flat space).
SplittingMap normal_coordinate_map(const Model& m);

struct SplittingReport {
  int k = 0;
  double harmonic_residual = 0.0;  // sup |Delta h_i|, scaled by r^2... see impl
  double sup_grad_excess = 0.0;    // max(0, sup |grad h| - 1)
  double gram_l2 = 0.0;            // max_ij avg |<grad h_i, grad h_j> - delta_ij|^2
  double hess_l1 = 0.0;            // max_i r^2 avg |Hess h_i|
  double epsilon_achieved = 0.0;   // max over the four condition epsilons
  int binding_condition = 0;       // 1..4
};

SplittingReport splitting_report(const Model& m, double r,
                                 const SplittingMap& h, int n_samples = 2000,
                                 uint64_t seed = 2026);

// ---------------------------------------------------------------------------
// Samples and cones.
FiniteMetricSpace sample_space(const Model& m, double radius, int n_points,
                               uint64_t seed);

// Metric cone over Z: points (r, z) for r in the radial grid, with
//   d((r1,z1),(r2,z2))^2 = r1^2 + r2^2 - 2 r1 r2 cos(d(z1,z2))  (d <= pi)
//   d = r1 + r2                                                 (d > pi).
FiniteMetricSpace cone_space(const FiniteMetricSpace& Z,
                             const std::vector<double>& radial_grid);

struct GhEstimate {
  double lower = 0.0;
  double upper = 0.0;
};

// Lower bound from distance-distribution extremes (diameter and radius
// spectra); upper bound = half the distortion of the best correspondence
// found by 200 restarts of greedy matching plus 2-swap local search.
GhEstimate gh_distance(const FiniteMetricSpace& A, const FiniteMetricSpace& B);

// Exact minimum over correspondences by branch-and-bound; both spaces must
// have at most 8 points. Oracle for the search above.
double gh_distance_exhaustive(const FiniteMetricSpace& A,
                              const FiniteMetricSpace& B);

// ---------------------------------------------------------------------------
// Cone rigidity: measured delta in  (1-delta) vol B(x,R) <= (R/n) vol dB(x,R),
// the annulus comparison pair, the half-radius volume-ratio hypothesis, a
// sampled GH distance from B(x,R) to the cone over the rescaled distance
// sphere, and monotone trends of delta and the GH distance along the radius
// ladder {R, R/2, R/4}.
BoundCertificate cone_rigidity_suite(const Model& m, double R,
                                     double eta = 0.5);

}  // namespace rb
