#include "riccibound/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>

namespace rb {

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol) {
  if (a == b) return 0.0;
  double err = 0.0;
  // gauss_kronrod uses a relative-ish termination; wrap with a scale guard.
  double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 15, abs_tol * 1e-3, &err);
  (void)err;
  return v;
}

double find_root(const std::function<double(double)>& f, double a, double b,
                 double x_tol) {
  auto tol = [x_tol](double lo, double hi) { return hi - lo < x_tol; };
  boost::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve(f, a, b, tol, it);
  return 0.5 * (r.first + r.second);
}

namespace {
using state = std::vector<double>;
using stepper =
    boost::numeric::odeint::runge_kutta_cash_karp54<state>;
}  // namespace

std::vector<double> ode_solve(
    const std::function<void(const state&, state&, double)>& rhs, state y0,
    double a, double b, double rel_tol) {
  if (a == b) return y0;
  auto ctrl = boost::numeric::odeint::make_controlled<stepper>(1e-14, rel_tol);
  double h0 = (b - a) / 256.0;
  boost::numeric::odeint::integrate_adaptive(ctrl, rhs, y0, a, b, h0);
  return y0;
}

void ode_solve_grid(
    const std::function<void(const state&, state&, double)>& rhs, state y0,
    const std::vector<double>& s_out,
    const std::function<void(double, const state&)>& observer, double rel_tol) {
  auto ctrl = boost::numeric::odeint::make_controlled<stepper>(1e-14, rel_tol);
  double h0 = (s_out.back() - s_out.front()) / 256.0;
  boost::numeric::odeint::integrate_times(ctrl, rhs, y0, s_out.begin(),
                                          s_out.end(), h0,
                                          [&](const state& y, double s) {
                                            observer(s, y);
                                          });
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace rb
