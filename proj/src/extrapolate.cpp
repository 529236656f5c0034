#include "holofg/extrapolate.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace holofg {

FitResult fit_linear_model(const std::vector<double>& x, const std::vector<cplx>& y,
                           const std::vector<BasisFn>& basis, const std::vector<double>& weights) {
  const int rows = static_cast<int>(x.size());
  const int cols = 1 + static_cast<int>(basis.size());
  if (static_cast<int>(y.size()) != rows) throw std::invalid_argument("fit: size mismatch");
  if (!weights.empty() && static_cast<int>(weights.size()) != rows) throw std::invalid_argument("fit: weight size");
  FitResult out;
  if (rows < cols) return out;
  Eigen::MatrixXd A(rows, cols);
  Eigen::MatrixXcd b(rows, 1);
  for (int r = 0; r < rows; ++r) {
    const double w = weights.empty() ? 1.0 : weights[r];
    A(r, 0) = w;
    for (int c = 1; c < cols; ++c) A(r, c) = w * basis[c - 1](x[r]);
    b(r, 0) = w * y[r];
  }
  Eigen::VectorXd scale = A.colwise().norm();
  for (int c = 0; c < cols; ++c)
    if (scale[c] == 0.0) scale[c] = 1.0;
  const Eigen::MatrixXd As = A * scale.cwiseInverse().asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As.rows(), As.cols());
  qr.setThreshold(1e-15);
  qr.compute(As);
  const Eigen::VectorXd re = qr.solve(Eigen::VectorXd(b.col(0).real()));
  const Eigen::VectorXd im = qr.solve(Eigen::VectorXd(b.col(0).imag()));
  Eigen::VectorXcd coef(cols);
  for (int c = 0; c < cols; ++c) coef[c] = cplx(re[c], im[c]) / scale[c];
  const Eigen::VectorXcd resid = A.cast<cplx>() * coef - b.col(0);
  out.c0 = coef[0];
  for (int c = 1; c < cols; ++c) out.coefficients.push_back(coef[c]);
  out.residual_rms = std::sqrt(resid.squaredNorm() / rows);
  out.ok = qr.rank() == cols && std::isfinite(out.residual_rms);
  return out;
}

BasisFn power_log_basis(double p, int q, double J) {
  return [=](double delta) {
    const double rho = std::pow(delta, 1.0 / J);
    return std::pow(rho, p) * std::pow(std::log(rho), q);
  };
}

}  // namespace holofg
