#pragma once

#include <functional>
#include <string>
#include <vector>

#include "holofg/constants.hpp"

namespace holofg {

using BasisFn = std::function<double(double)>;

struct FitResult {
  cplx c0;
  std::vector<cplx> coefficients;  // for the non-constant basis functions
  /// Root-mean-square weighted residual.
  double residual_rms = 0.0;
  bool ok = false;
};

/// Weighted least squares y ~ c0 + sum_k c_k phi_k(x). Weights multiply the
/// residuals (use 1/sigma). Columns are scaled before solving.
FitResult fit_linear_model(const std::vector<double>& x, const std::vector<cplx>& y,
                           const std::vector<BasisFn>& basis, const std::vector<double>& weights = {});

/// rho^p (ln rho)^q with rho = delta^{1/J}, as a function of delta.
BasisFn power_log_basis(double p, int q, double J);

}  // namespace holofg
