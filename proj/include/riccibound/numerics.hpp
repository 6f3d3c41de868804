#pragma once
#include <functional>
#include <stdexcept>
#include <vector>

namespace rb {

// Adaptive quadrature on [a,b]. Absolute tolerance, defaults per the
// project-wide numerics policy (1e-9 for volume-type integrals).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-9);

// Root of f on [a,b]; f(a), f(b) must bracket. Tolerance on x.
double find_root(const std::function<double(double)>& f, double a, double b,
                 double x_tol = 1e-13);

// Integrate y' = rhs(s, y) from a to b with adaptive RK (Cash-Karp 5(4)),
// relative tolerance 1e-10. Returns y(b).
std::vector<double> ode_solve(
    const std::function<void(const std::vector<double>&, std::vector<double>&,
                             double)>& rhs,
    std::vector<double> y0, double a, double b, double rel_tol = 1e-10);

// Dense variant: observer called at the requested output points.
void ode_solve_grid(
    const std::function<void(const std::vector<double>&, std::vector<double>&,
                             double)>& rhs,
    std::vector<double> y0, const std::vector<double>& s_out,
    const std::function<void(double, const std::vector<double>&)>& observer,
    double rel_tol = 1e-10);

std::vector<double> linspace(double a, double b, int n);

struct StepTooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rb
