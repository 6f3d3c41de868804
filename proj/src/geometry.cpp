#include "riccibound/geometry.hpp"

#include <cmath>

namespace rb {

namespace {

enum class Chart { Flat, Sphere, Hyperbolic };

Chart chart_of(const Model& m) {
  switch (m.spec().kind) {
    case ModelKind::Sphere: return Chart::Sphere;
    case ModelKind::Hyperbolic: return Chart::Hyperbolic;
    case ModelKind::Euclidean:
    case ModelKind::GaussianSoliton:
    case ModelKind::SingularFieldModel:
      return Chart::Flat;
    default:
      throw InvalidSpec("model supports only radial geodesics from the origin");
  }
}

double radius_of(const Model& m) { return 1.0 / std::sqrt(m.spec().curvature); }

// Minkowski product, coordinate 0 timelike.
double mink(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return -x(0) * y(0) + x.tail(x.size() - 1).dot(y.tail(y.size() - 1));
}

}  // namespace

bool supports_general_pairs(const Model& m) {
  switch (m.spec().kind) {
    case ModelKind::CigarSoliton:
    case ModelKind::WarpedCustom:
      return false;
    default:
      return true;
  }
}

Point origin_point(const Model& m) {
  switch (chart_of(m)) {
    case Chart::Flat:
      return Eigen::VectorXd::Zero(m.n());
    case Chart::Sphere: {
      Eigen::VectorXd p = Eigen::VectorXd::Zero(m.n() + 1);
      p(0) = radius_of(m);
      return p;
    }
    case Chart::Hyperbolic: {
      Eigen::VectorXd p = Eigen::VectorXd::Zero(m.n() + 1);
      p(0) = radius_of(m);
      return p;
    }
  }
  return {};
}

double distance(const Model& m, const Point& p, const Point& q) {
  switch (chart_of(m)) {
    case Chart::Flat:
      return (p - q).norm();
    case Chart::Sphere: {
      double a = radius_of(m);
      double c = p.dot(q) / (a * a);
      c = std::clamp(c, -1.0, 1.0);
      return a * std::acos(c);
    }
    case Chart::Hyperbolic: {
      double a = radius_of(m);
      double c = -mink(p, q) / (a * a);
      c = std::max(c, 1.0);
      return a * std::acosh(c);
    }
  }
  return 0.0;
}

double distance_to_origin(const Model& m, const Point& p) {
  return distance(m, origin_point(m), p);
}

Point exp_point(const Model& m, const Point& p, const Eigen::VectorXd& u,
                double s) {
  switch (chart_of(m)) {
    case Chart::Flat:
      return p + s * u;
    case Chart::Sphere: {
      double a = radius_of(m);
      return std::cos(s / a) * p + a * std::sin(s / a) * u;
    }
    case Chart::Hyperbolic: {
      double a = radius_of(m);
      return std::cosh(s / a) * p + a * std::sinh(s / a) * u;
    }
  }
  return p;
}

Point exp_origin(const Model& m, const Eigen::VectorXd& dir, double s) {
  Point p = origin_point(m);
  if (chart_of(m) == Chart::Flat) return s * dir;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(m.n() + 1);
  u.tail(m.n()) = dir;
  return exp_point(m, p, u, s);
}

Eigen::VectorXd tangent_toward(const Model& m, const Point& p, const Point& q) {
  double d = distance(m, p, q);
  if (d < 1e-14) throw GeodesicAmbiguous("coincident points");
  switch (chart_of(m)) {
    case Chart::Flat:
      return (q - p) / d;
    case Chart::Sphere: {
      double a = radius_of(m);
      double sn = std::sin(d / a);
      if (sn < 1e-12) throw GeodesicAmbiguous("antipodal pair on the sphere");
      return (q - std::cos(d / a) * p) / (a * sn);
    }
    case Chart::Hyperbolic: {
      double a = radius_of(m);
      double sh = std::sinh(d / a);
      return (q - std::cosh(d / a) * p) / (a * sh);
    }
  }
  return {};
}

Point geodesic_point(const Model& m, const Point& p, const Point& q, double t) {
  double d = distance(m, p, q);
  if (d < 1e-14) return p;
  return exp_point(m, p, tangent_toward(m, p, q), t * d);
}

Eigen::MatrixXd tangent_basis(const Model& m, const Point& p) {
  int n = m.n();
  switch (chart_of(m)) {
    case Chart::Flat:
      return Eigen::MatrixXd::Identity(n, n);
    case Chart::Sphere: {
      // Gram-Schmidt complement of p in R^{n+1}.
      Eigen::MatrixXd B(n + 1, n);
      Eigen::VectorXd ph = p.normalized();
      int col = 0;
      for (int i = 0; i <= n && col < n; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
        e(i) = 1.0;
        Eigen::VectorXd w = e - ph.dot(e) * ph;
        for (int j = 0; j < col; ++j) w -= B.col(j).dot(w) * B.col(j);
        if (w.norm() > 1e-8) B.col(col++) = w.normalized();
      }
      return B;
    }
    case Chart::Hyperbolic: {
      double a = radius_of(m);
      Eigen::VectorXd ph = p / a;  // mink(ph,ph) = -1
      Eigen::MatrixXd B(n + 1, n);
      int col = 0;
      for (int i = 1; i <= n + 1 && col < n; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
        e(i % (n + 1)) = 1.0;
        Eigen::VectorXd w = e + mink(ph, e) * ph;  // project out timelike dir
        for (int j = 0; j < col; ++j) w -= mink(B.col(j), w) * B.col(j);
        double nn = mink(w, w);
        if (nn > 1e-16) B.col(col++) = w / std::sqrt(nn);
      }
      return B;
    }
  }
  return {};
}

Eigen::VectorXd random_direction(const CounterRng& rng, uint64_t i, int n) {
  Eigen::VectorXd v(n);
  for (int k = 0; k < n; ++k) {
    // Box-Muller on lanes (2k, 2k+1).
    double u1 = std::max(rng.uniform(i, 2 * k), 1e-300);
    double u2 = rng.uniform(i, 2 * k + 1);
    v(k) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  double nn = v.norm();
  if (nn < 1e-12) { v.setZero(); v(0) = 1.0; return v; }
  return v / nn;
}

}  // namespace rb
