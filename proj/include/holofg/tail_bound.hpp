#pragma once

#include <functional>

namespace holofg {

/// Upper bound for sum over lattice points y_l with |y_l| > R of g(|y_l|),
/// valid when g is non-increasing on [R - 2 rho, inf). `d` is the real
/// dimension, `covol` the lattice covolume and `rho` a covering-radius bound.
///   sum <= S_{d-1} / covol * int_{R - 2 rho}^inf g(s) (s + rho)^{d-1} ds
double lattice_tail_bound(int d, double covol, double rho, double R, const std::function<double(double)>& g);

/// Smallest radius (on a geometric grid above `start`) whose tail bound is
/// at most `tol`. Throws std::invalid_argument if tol <= 0 or no radius below
/// `max_radius` suffices.
double lattice_truncation_radius(int d, double covol, double rho, double start, double tol,
                                 const std::function<double(double)>& g, double max_radius = 1e4);

}  // namespace holofg
