#include "holofg/tail_bound.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "holofg/constants.hpp"

namespace holofg {

double lattice_tail_bound(int d, double covol, double rho, double R, const std::function<double(double)>& g) {
  const double a = std::max(0.0, R - 2.0 * rho);
  const double sphere = 2.0 * std::pow(kPi, 0.5 * d) / boost::math::tgamma(0.5 * d);
  boost::math::quadrature::exp_sinh<double> integrator;
  auto f = [&](double s) {
    const double v = g(s);
    if (!(v > 0.0) || !std::isfinite(s)) return 0.0;
    const double r = std::exp(std::log(v) + (d - 1) * std::log(s + rho));
    return std::isfinite(r) ? r : 0.0;
  };
  const double integral = integrator.integrate(f, a, std::numeric_limits<double>::infinity());
  // Quadrature error is tiny relative to the bound; pad by 1% anyway.
  return 1.01 * sphere / covol * integral;
}

double lattice_truncation_radius(int d, double covol, double rho, double start, double tol,
                                 const std::function<double(double)>& g, double max_radius) {
  if (!(tol > 0.0)) throw std::invalid_argument("truncation: tolerance must be positive");
  double R = std::max(start, 2.0 * rho + 1e-3);
  while (R <= max_radius) {
    if (lattice_tail_bound(d, covol, rho, R, g) <= tol) return R;
    R *= 1.1;
  }
  throw std::invalid_argument("truncation: tolerance infeasible");
}

}  // namespace holofg
