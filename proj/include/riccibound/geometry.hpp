#pragma once
#include <Eigen/Dense>

#include "riccibound/model.hpp"
#include "riccibound/rng.hpp"

namespace rb {

// Points live in an ambient chart depending on the model kind:
//   flat-base kinds           -> R^n
//   sphere (curvature k)      -> sphere of radius a=1/sqrt(k) in R^{n+1}
//   hyperbolic (curvature k)  -> upper hyperboloid in Minkowski R^{n,1};
//                                coordinate 0 is the timelike one
// Cigar / custom warped models support only radial geodesics from the origin
// and are rejected by the general point API.
using Point = Eigen::VectorXd;

struct GeodesicAmbiguous : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool supports_general_pairs(const Model& m);

Point origin_point(const Model& m);
double distance(const Model& m, const Point& p, const Point& q);
double distance_to_origin(const Model& m, const Point& p);

// Point at arc length s from p along the unit tangent u (ambient vector,
// orthogonal to p in the sphere/hyperboloid sense).
Point exp_point(const Model& m, const Point& p, const Eigen::VectorXd& u,
                double s);

// Point at distance s from the origin in intrinsic direction dir (unit in R^n).
Point exp_origin(const Model& m, const Eigen::VectorXd& dir, double s);

// Unit tangent at p pointing toward q. Throws GeodesicAmbiguous for
// antipodal sphere pairs.
Eigen::VectorXd tangent_toward(const Model& m, const Point& p, const Point& q);

// Point on the minimal geodesic from p to q at parameter t in [0,1].
Point geodesic_point(const Model& m, const Point& p, const Point& q, double t);

// Orthonormal tangent basis at p, n columns.
Eigen::MatrixXd tangent_basis(const Model& m, const Point& p);

// Uniform direction on S^{n-1} from the counter RNG (sample index i).
Eigen::VectorXd random_direction(const CounterRng& rng, uint64_t i, int n);

}  // namespace rb
