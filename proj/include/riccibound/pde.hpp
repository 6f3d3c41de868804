#pragma once
#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

#include "riccibound/certificate.hpp"
#include "riccibound/model.hpp"

namespace rb {

struct StabilityFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TruncationTooTight : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionTooLow : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EquationResidualTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CoverTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HeatSolveOptions {
  double t0 = 1e-4;    // seed time of the Gaussian initial slice
  int nr = 6000;       // radial cells
  int nt = 900;        // geometric time steps from t0 to t_max
  int n_out = 48;      // stored output slices (log-spaced, endpoints included)
  double c4_envelope = 4.0;   // decay constant in the truncation-radius rule
  double r0_hint = 0.0;       // cutoff scale entering the truncation rule
  // >0: hard absorbing wall at this radius (Dirichlet problem on a ball);
  // the completeness mass gate is then replaced by monotone decay.
  double dirichlet_radius = -1.0;
};

// Rotationally symmetric heat kernel about the pole, G(r, t), together with
// its radial and time derivatives and the running mass integral.
struct HeatKernelGrid {
  int n = 3;
  double t0 = 1e-4;
  double t_max = 1.0;
  double r_trunc = 0.0;
  bool dirichlet_wall = false;
  std::vector<double> t_grid;  // stored slice times, increasing
  std::vector<double> r_grid;  // uniform radii, r_grid[0] = 0
  std::vector<std::vector<double>> G;   // [time][radius]
  std::vector<std::vector<double>> Gr;  // radial derivative
  std::vector<std::vector<double>> Gt;  // time derivative (from the equation)
  std::vector<double> mass;             // per stored slice

  size_t time_index(double t) const;        // nearest stored slice
  double slice_value(size_t it, double r) const;  // cubic interpolation in r
  double value(double t, double r) const;   // log-linear in t between slices
};

// Crank-Nicolson solve of  dG/dt = d2G/dr2 + (d/dr ln w) dG/dr  seeded with
// the Euclidean Gaussian at t0, Neumann at r=0, Dirichlet truncation at
// r_trunc = max(6 sqrt(t_max c4), 3 r0_hint). Internally the bounded factor
// v = G / gaussian is advanced, which keeps flat models exact on the grid.
HeatKernelGrid heat_kernel_radial(const Model& m, double t_max,
                                  const HeatSolveOptions& opt = {});

struct HeatKernelConstants {
  double C1 = 0, C2 = 0, C3 = 0, C4 = 0;  // two-sided Gaussian envelope
  double C3_grad = 0;                      // |dG/dr| envelope amplitude
  double C3_time = 0;                      // |dG/dt| envelope amplitude
};

// Largest (C1, C2) / smallest (C3, C4) with
//   C1 t^{-n/2} e^{-C2 r^2/t} <= G <= C3 t^{-n/2} e^{-r^2/(C4 t)}
// over the fitted slice window, plus matching |dG/dr|, |dG/dt| amplitudes.
HeatKernelConstants fit_heat_kernel_constants(const HeatKernelGrid& g);
BoundCertificate verify_heat_kernel_bounds(const HeatKernelGrid& g,
                                           const Model& m);

struct CutoffOptions {
  double eps = 0.05;       // covering-ball scale fraction
  int profile_nr = 4000;   // radial cells of the single-bump profile solve
  int eval_nr = 120;       // annulus radial samples for the derivative sups
  int eval_ntheta = 900;   // angular samples on the lattice symmetry sector
  bool parallel = true;    // OpenMP over evaluation samples
  long max_cover = 2000000;
};

// Two-step heat-kernel cutoff: a single radial bump
//   psi = (clamp((G(d, A u^2) - 0.6 C1 (A u^2)^{-n/2}) (A u^2)^{n/2}
//                 / ((1 + 1/A) C3), 0, 1))^3,   u = eps r0,
// replicated over a lattice covering of B(x0, 1.1 r0) by balls of radius
// eps delta_hat r0, summed with weight delta^{-1} (delta = delta_hat^3) and
// composed with the quintic clamp eta.
struct CutoffFunction {
  double r0 = 1.0;
  double eps = 0.05;
  double A = 0.0;
  double delta_hat = 0.0;
  double delta = 0.0;  // = delta_hat^3, the plateau level of one bump
  HeatKernelConstants constants;
  long cover_size = 0;
  double cover_radius = 0.0;    // eps delta_hat r0
  double psi_support = 0.0;     // support radius of one bump
  double support_radius = 0.0;  // 1.1 r0 + psi_support
  double plateau_radius = 0.0;  // 1.1 r0
  double min_plateau_sum = 0.0; // min of the bump sum over plateau samples
  double sup_grad = 0.0;        // measured sup |grad phi|
  double sup_lap = 0.0;         // measured sup |Delta phi|
  std::vector<double> d_grid;       // radial sample of phi along a lattice axis
  std::vector<double> phi_radial;

  double phi(double x, double y) const;
  // phi, |grad phi| and Delta phi at one point (chain rule through eta).
  void derivatives(double x, double y, double* phi_out, double* grad_norm,
                   double* lap) const;

  // Construction internals (bump profile tables and the covering lattice).
  std::vector<std::array<double, 2>> centers;
  double prof_dr = 0.0;
  std::vector<double> psi_tab, psip_tab, psipp_tab;
  double bucket_cell = 0.0;
  double bucket_origin = 0.0;
  int bucket_dim = 0;
  std::vector<std::vector<int>> buckets;
};

CutoffFunction build_cutoff(const Model& m, double r0,
                            const CutoffOptions& opt = {});

struct RadialSolution {
  std::vector<double> r;
  std::vector<double> f;
  std::vector<double> fp;
  double residual = 0.0;  // max |Delta f - rhs| on the interior grid
};

// Two-point BVP  f'' + (d/dr ln w) f' = rhs,  f'(0)=0, f(R)=boundary.
RadialSolution solve_poisson_radial(const Model& m, double R,
                                    const std::function<double(double)>& rhs,
                                    double boundary, int nr = 4096);

// Dirichlet Green's function of the ball B(pole, R) by time integration of
// the absorbing heat kernel plus a fitted exponential large-time tail;
// certifies the d^{2-n} envelope and the Poisson lower-bound chain.
BoundCertificate verify_green_bound(const Model& m, double R);

struct RadialFunction {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
};

// Elliptic gradient estimate on B(pole, r) for Delta u = f:
//   sup_{B(r/2)} |grad u|^2 <= C r^{-2} [ (avg_B u^2) + (avg_B |f|^{2q})^{1/q} ]
// plus the zeroth-order form; reports the empirical smallest C.
BoundCertificate verify_gradient_estimate(
    const Model& m, const RadialFunction& u,
    const std::function<double(double)>& f, double r, double q);

// Parabolic variant on the heat solution itself (f = 0), over the slab
// Q(t_max, r) = B(r) x [t_max - r^2, t_max].
BoundCertificate verify_parabolic_gradient_estimate(const HeatKernelGrid& g,
                                                    const Model& m, double r,
                                                    double q);

// sup_B u <= sup_{boundary} u + C(n) r^2 ||f||*_q  for  Delta u >= f.
BoundCertificate verify_max_principle(const Model& m, const RadialFunction& u,
                                      const std::function<double(double)>& f,
                                      double r, double q);

}  // namespace rb
