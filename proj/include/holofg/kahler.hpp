#pragma once

#include "holofg/jet.hpp"

namespace holofg {

/// g_{i jbar} as jets in (z_1..z_n, zbar_1..zbar_n); entry (i, j) is g_{i jbar}.
struct MetricJet {
  MatrixJet g;

  int n() const { return g.size; }
  int order() const { return g.order(); }

  /// g = 1/2 delta.
  static MetricJet flat(int n, int order);
  /// g_{i jbar} = d_i dbar_j phi, phi a real jet in 2n variables.
  static MetricJet from_potential(int n, const Jet& phi);

  /// Throws std::invalid_argument unless Hermitian with positive-definite
  /// constant term.
  void validate() const;
};

/// h_{a bbar} of a rank-r bundle as jets in (z, zbar) of a base of dimension n.
struct HermitianJet {
  int n = 0;
  MatrixJet h;

  int rank() const { return h.size; }
  void validate() const;
};

/// Inverse metric with entry (i, j) = g^{i jbar}, so that
/// sum_j g^{i jbar} g_{k jbar} = delta_ik.
MatrixJet inverse_metric(const MetricJet& g);

/// Largest modulus among the coefficients with zero antiholomorphic degree
/// that violate g(0) = 1/2 delta and vanishing holomorphic derivatives.
double kahler_normal_residual(const MetricJet& g);

/// rho^2 to the given order from sum_{ij} d_i(rho^2) g^{i jbar} dbar_j(rho^2)
/// = 2 rho^2 seeded by sum z_i zbar_i. Needs g.order() >= order - 2.
/// std::domain_error when g(0) != 1/2 delta (the quadratic seed is then
/// inconsistent).
Jet eikonal_solve(const MetricJet& g, int order = 6);
/// Largest coefficient of the eikonal defect up to rho2.order().
double eikonal_residual(const MetricJet& g, const Jet& rho2);

struct FrameGauge {
  MatrixJet G;            ///< holomorphic change of frame
  MatrixJet transformed;  ///< G h G^*
  double residual = 0;    ///< largest pure-holomorphic defect of transformed - delta
};

/// G = h(z, 0)^{-1}; the transformed metric has no pure-holomorphic part
/// beyond the identity.
FrameGauge normal_frame_gauge(const HermitianJet& h);

/// Variable indices of the antiholomorphic half of a (z, zbar) roster.
std::vector<int> antiholomorphic_vars(int n, int nvars);

}  // namespace holofg
