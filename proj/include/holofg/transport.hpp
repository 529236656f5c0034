#pragma once

#include <map>
#include <optional>
#include <vector>

#include "holofg/kahler.hpp"
#include "holofg/rescaling.hpp"

namespace holofg {

/// Frozen coefficients of the model operators at w = 0, as expressions over
/// the 4n roster.
struct ModelData {
  int n = 0;
  int order = 0;
  /// christoffel[(l * n + j) * n + k] = w^{kbar}_{lbar jbar}(ztilde, 0).
  std::vector<RescalableExpression> christoffel;
  /// curvature[j * n + i] = F_{j ibar}(ztilde, 0).
  std::vector<RescalableExpression> curvature;

  /// w^{kbar}_{lbar jbar} = sum_m g^{m kbar} dbar_l g_{m jbar}, holomorphic
  /// component. The curvature jets (order >= g.order() - 2) default to zero.
  static ModelData from_metric(const MetricJet& g, const std::optional<MatrixJet>& curvature = std::nullopt);

  const RescalableExpression& w(int l, int j, int k) const { return christoffel[(l * n + j) * n + k]; }
  const RescalableExpression& F(int j, int i) const { return curvature[j * n + i]; }
};

/// nabla^md_{jbar} = d_{jbar} + sum_{l,k} w^{kbar}_{lbar jbar} dwbar_l iota_{kbar}.
RescalableExpression nabla_md_bar(const ModelData& m, int j, const RescalableExpression& s);
/// -2 sum_i d_i nabla^md_{ibar} + 2 sum_{ij} dwbar_i iota_{jbar} F_{j ibar}.
RescalableExpression laplacian_md(const ModelData& m, const RescalableExpression& s);
/// nabla^md along r grad r: sum_i ztilde_i d_i + zbartilde_i nabla^md_{ibar}.
RescalableExpression radial_md(const ModelData& m, const RescalableExpression& s);
/// sum_l iota_{lbar} d_l.
RescalableExpression contraction_derivative(const RescalableExpression& s);

struct HeatCoefficientJet {
  int n = 0;
  std::vector<RescalableExpression> v;  ///< v_0..v_K; v_k is truncated at order - 2k
};

/// Solves nabla_{r grad r} v_0 = 0 and
/// nabla_{r grad r} v_{k+1} + (k+1) v_{k+1} + Delta^md v_k = 0 degree by
/// degree, seeding v_0(0) = seed times the wedge of the generators in
/// seed_forms (default: dzbartilde_1 ... dzbartilde_n).
HeatCoefficientJet model_transport_solve(const ModelData& m, int K, const QComplex& seed = 1,
                                         std::optional<std::uint32_t> seed_forms = std::nullopt);
HeatCoefficientJet model_transport_solve(const MetricJet& g, const std::optional<MatrixJet>& curvature, int K);

/// Largest coefficient left in the recursion when u is substituted back.
double transport_residual(const ModelData& m, const HeatCoefficientJet& u);

/// e^{|ztilde|^2/2t} (d_t + Delta^md)(e^{-|ztilde|^2/2t} sum_k t^{k-n} v_k)
/// expanded symbolically; returns the largest coefficient below the top
/// power t^{K-n}, which carries the truncation defect Delta^md v_K.
double heat_residual_check(const HeatCoefficientJet& u, const ModelData& m);
/// The full substituted expression, top defect included.
RescalableExpression heat_residual(const HeatCoefficientJet& u, const ModelData& m);

/// delta_eps of sum_k t^{k-n} v_k split by power of eps (the Gaussian factor
/// has weight 0).
std::map<int, RescalableExpression> getzler_decomposition(const HeatCoefficientJet& u);

struct CommutatorReport {
  double holomorphic = 0;      ///< max over j of [A, nabla^md_j] s
  double antiholomorphic = 0;  ///< max over j of [A, nabla^md_{jbar}] s
  double laplacian = 0;        ///< [A, Delta^md] s
};

/// Commutators with A = sum_l iota_{lbar} d_l applied to a section.
CommutatorReport model_commutators(const ModelData& m, const RescalableExpression& s);

}  // namespace holofg
