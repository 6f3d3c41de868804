#include "riccibound/curvature.hpp"

#include <cmath>

#include "riccibound/numerics.hpp"

namespace rb {

double SymTensor2::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().minCoeff();
}

double SymTensor2::symmetry_defect() const {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

namespace {

// Curvature ratios with a series guard near s=0 where f''/f is 0/0.
double seff(const Model& m, double s) {
  double guard = 1e-6;
  return (!m.flat_base() && s < guard) ? guard : s;
}

}  // namespace

SymTensor2 modified_ricci(const Model& mod, double s) {
  int n = mod.n();
  if (mod.has_field() && mod.spec().kind == ModelKind::SingularFieldModel &&
      s < kEpsMin)
    throw SingularEvaluation("modified_ricci at the field origin");
  double se = seff(mod, s);
  double F = mod.f(se), Fp = mod.fp(se), Fpp = mod.fpp(se);
  double ric_rr = mod.flat_base() ? 0.0 : -(n - 1) * Fpp / F;
  double ric_tt =
      mod.flat_base() ? 0.0 : -Fpp / F + (n - 2) * (1.0 - Fp * Fp) / (F * F);
  double lie_rr = 0.0, lie_tt = 0.0;
  if (mod.has_field()) {
    lie_rr = mod.vp(s);
    lie_tt = mod.v(s) * mod.fp(s) / mod.f(std::max(s, 1e-300));
    if (mod.spec().kind == ModelKind::GaussianSoliton)
      lie_tt = mod.spec().soliton_lambda;  // v/f' ratio is exact: (ls)/s
  }
  SymTensor2 t;
  t.m = Eigen::MatrixXd::Zero(n, n);
  t.m(0, 0) = ric_rr + lie_rr;
  for (int i = 1; i < n; ++i) t.m(i, i) = ric_tt + lie_tt;
  return t;
}

SymTensor2 hessian_potential(const Model& mod, double s) {
  if (!mod.has_potential()) throw InvalidSpec("hessian_potential: no potential");
  int n = mod.n();
  SymTensor2 t;
  t.m = Eigen::MatrixXd::Zero(n, n);
  t.m(0, 0) = mod.Lpp(s);
  double tt = mod.spec().kind == ModelKind::GaussianSoliton
                  ? mod.spec().soliton_lambda
                  : mod.Lp(s) * mod.fp(s) / mod.f(std::max(s, 1e-12));
  for (int i = 1; i < n; ++i) t.m(i, i) = tt;
  return t;
}

SymTensor2 n_bakry_emery_tensor(const Model& mod, double s, double N) {
  SymTensor2 t = modified_ricci(mod, s);
  if (N <= mod.n()) throw InvalidSpec("n_bakry_emery_tensor: needs N > n");
  if (mod.has_field()) {
    double v = mod.v(s);
    t.m(0, 0) -= v * v / (N - mod.n());  // V is radial: V (x) V = v^2 e_s(x)e_s
  }
  return t;
}

BoundCertificate verify_lower_bound(const Model& mod,
                                    const std::vector<double>& sample_s,
                                    double tolerance) {
  BoundCertificate c;
  c.kind = "modified_ricci_lower_bound";
  c.model = mod.name();
  c.params["lambda"] = mod.spec().lambda;
  c.tolerance = tolerance;
  for (double s : sample_s) {
    c.samples.push_back(s);
    c.lhs.push_back(-mod.spec().lambda);
    c.rhs.push_back(modified_ricci(mod, s).min_eigenvalue());
  }
  c.finalize();
  return c;
}

namespace {

// Spherical-polar coordinates dilated by a constant factor c:
// x = c * (s, phi_1 .. phi_{n-1}). The metric stays diagonal,
// g_00 = 1/c^2, g_ii = f(s)^2/c^2 prod_{j<i} sin^2(phi_j), and a uniform
// dilation shrinks every finite-difference truncation error by c^2 (the
// stencils sample the smooth metric at geometric spacing h/c) while keeping
// the chart generic (non-unit metric coefficients exercise every term of the
// reconstruction formulas).
constexpr double kStretch = 3.0;

struct Chart {
  const Model& mod;
  int n;

  double g(int i, const Eigen::VectorXd& x) const {
    if (i == 0) return 1.0 / (kStretch * kStretch);
    double v = mod.f(x(0) / kStretch) / kStretch;
    v *= v;
    for (int j = 1; j < i; ++j) {
      double sn = std::sin(x(j) / kStretch);
      v *= sn * sn;
    }
    return v;
  }

  // First derivatives d_i g_jj by 3-point central differences.
  Eigen::MatrixXd dg_fd(const Eigen::VectorXd& x, double h) const {
    Eigen::MatrixXd dg(n, n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      for (int j = 0; j < n; ++j) dg(i, j) = (g(j, xp) - g(j, xm)) / (2 * h);
    }
    return dg;
  }

  // Second derivative d_i d_j g_kk: 3-point stencil on the diagonal,
  // 4-point cross stencil off it. Both second order.
  double d2g_fd(int i, int j, int k, const Eigen::VectorXd& x, double h) const {
    if (i == j) {
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      return (g(k, xp) - 2 * g(k, x) + g(k, xm)) / (h * h);
    }
    Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
    xpp(i) += h; xpp(j) += h;
    xpm(i) += h; xpm(j) -= h;
    xmp(i) -= h; xmp(j) += h;
    xmm(i) -= h; xmm(j) -= h;
    return (g(k, xpp) - g(k, xpm) - g(k, xmp) + g(k, xmm)) / (4 * h * h);
  }

  // Christoffel symbols of the second kind from the FD metric derivatives.
  Eigen::MatrixXd christoffel(int k, const Eigen::VectorXd& x, double h) const {
    Eigen::MatrixXd dg = dg_fd(x, h);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
    double gkk = g(k, x);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        if (i == k) v += dg(j, k);
        if (j == k) v += dg(i, k);
        if (i == j) v -= dg(k, i);
        G(i, j) = 0.5 * v / gkk;
      }
    return G;
  }

  // Ricci tensor R_ij = sum_k [d_k G^k_ij - d_i G^k_kj]
  //                   + sum_{k,m} [G^k_km G^m_ij - G^k_im G^m_kj]
  // with the metric-inverse factors expanded by the product rule so every
  // derivative of g is a direct second-order stencil (no nested stencils).
  // The metric is diagonal, so first-kind symbols carry explicit deltas:
  //   G_{ij,k} = 1/2 (delta_jk d_i g_kk + delta_ik d_j g_kk - d_k g_ij).
  Eigen::MatrixXd ricci_fd(const Eigen::VectorXd& x, double h) const {
    Eigen::MatrixXd dg = dg_fd(x, h);  // dg(i,j) = d_i g_jj
    auto gamma1 = [&](int i, int j, int k) {  // first kind, symmetric in i,j
      double v = 0.0;
      if (j == k) v += dg(i, k);
      if (i == k) v += dg(j, k);
      if (i == j) v -= dg(k, i);
      return 0.5 * v;
    };
    auto gamma2 = [&](int k, int i, int j) {  // second kind
      return gamma1(i, j, k) / g(k, x);
    };
    Eigen::MatrixXd ric = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int k = 0; k < n; ++k) {
          double gkk = g(k, x);
          // d_k G^k_ij = -d_k g_kk / g_kk^2 * G_{ij,k} + (1/g_kk) d_k G_{ij,k}
          double dkG1 = 0.5 * ((j == k ? d2g_fd(k, i, k, x, h) : 0.0) +
                               (i == k ? d2g_fd(k, j, k, x, h) : 0.0) -
                               (i == j ? d2g_fd(k, k, i, x, h) : 0.0));
          v += -dg(k, k) / (gkk * gkk) * gamma1(i, j, k) + dkG1 / gkk;
          // d_i G^k_kj = -(d_i g_kk)(d_j g_kk)/(2 g_kk^2)
          //            + (d_i d_j g_kk)/(2 g_kk)
          v -= -dg(i, k) * dg(j, k) / (2.0 * gkk * gkk) +
               d2g_fd(i, j, k, x, h) / (2.0 * gkk);
          for (int m = 0; m < n; ++m)
            v += gamma2(k, k, m) * gamma2(m, i, j) -
                 gamma2(k, i, m) * gamma2(m, k, j);
        }
        ric(i, j) = v;
      }
    return ric;
  }

  // Half Lie derivative of g along V = v(s) d_s, by central differences.
  Eigen::MatrixXd half_lie_fd(const Eigen::VectorXd& x, double h) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    // In the dilated chart V = v(s) d_s has component V^0 = c * v(x_0 / c).
    auto V0 = [&](double x0) { return kStretch * mod.v(x0 / kStretch); };
    double vs = V0(x(0));
    double dv = (V0(x(0) + h) - V0(x(0) - h)) / (2 * h);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double t = 0.0;
        if (i == j) {
          Eigen::VectorXd xp = x, xm = x;
          xp(0) += h;
          xm(0) -= h;
          t += vs * (g(i, xp) - g(i, xm)) / (2 * h);  // V^0 d_0 g_ii
        }
        if (i == 0 && j == 0) t += 2.0 * g(0, x) * dv;
        out(i, j) = 0.5 * t;
      }
    return out;
  }

  // Hessian of the radial potential by finite differences.
  Eigen::MatrixXd hess_potential_fd(const Eigen::VectorXd& x, double h) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    auto Lc = [&](double x0) { return mod.L(x0 / kStretch); };
    double dL = (Lc(x(0) + h) - Lc(x(0) - h)) / (2 * h);
    double d2L = (Lc(x(0) + h) - 2 * Lc(x(0)) + Lc(x(0) - h)) / (h * h);
    Eigen::MatrixXd G0 = christoffel(0, x, h);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = (i == 0 && j == 0) ? d2L : 0.0;
        v -= G0(i, j) * dL;  // only the radial gradient component is nonzero
        out(i, j) = v;
      }
    return out;
  }

  // Transform coordinate components to the orthonormal diagonal frame.
  Eigen::MatrixXd to_orthonormal(const Eigen::MatrixXd& t,
                                 const Eigen::VectorXd& x) const {
    Eigen::MatrixXd out(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out(i, j) = t(i, j) / std::sqrt(g(i, x) * g(j, x));
    return out;
  }
};

Eigen::VectorXd generic_point(int n, double s) {
  Eigen::VectorXd x(n);
  x(0) = kStretch * s;
  for (int j = 1; j < n; ++j)
    x(j) = kStretch * (1.0 + 0.1 * j);  // away from poles
  return x;
}

}  // namespace

double finite_difference_check(const Model& mod, double s, double h) {
  if (h < 1e-6) throw StepTooSmall("finite_difference_check: h < 1e-6");
  int n = mod.n();
  Chart ch{mod, n};
  Eigen::VectorXd x = generic_point(n, s);
  Eigen::MatrixXd fd = ch.ricci_fd(x, h);
  if (mod.has_field()) fd += ch.half_lie_fd(x, h);
  Eigen::MatrixXd fd_orth = ch.to_orthonormal(fd, x);
  Eigen::MatrixXd an = modified_ricci(mod, s).m;
  return (fd_orth - an).cwiseAbs().maxCoeff();
}

double finite_difference_check_hessian(const Model& mod, double s, double h) {
  if (h < 1e-6) throw StepTooSmall("finite_difference_check_hessian: h < 1e-6");
  int n = mod.n();
  Chart ch{mod, n};
  Eigen::VectorXd x = generic_point(n, s);
  Eigen::MatrixXd fd_orth = ch.to_orthonormal(ch.hess_potential_fd(x, h), x);
  Eigen::MatrixXd an = hessian_potential(mod, s).m;
  return (fd_orth - an).cwiseAbs().maxCoeff();
}

}  // namespace rb

