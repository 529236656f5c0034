#include "holofg/transport.hpp"

#include <algorithm>
#include <stdexcept>

namespace holofg {

namespace {

// Holomorphic component of a (z, zbar) jet, moved to the ztilde slots of the
// 4n roster and padded to the given order.
RescalableExpression holomorphic_part(const Jet& a, int n, int order) {
  Jet hol = a.restrict_zero(antiholomorphic_vars(n, 2 * n));
  std::vector<int> slot(2 * n);
  for (int i = 0; i < 2 * n; ++i) slot[i] = i;
  Jet e = hol.embed(4 * n, slot);
  Jet padded(4 * n, order);
  for (const auto& [x, c] : e.terms()) padded.accumulate(x, c);
  return RescalableExpression::from_jet(n, padded);
}

}  // namespace

ModelData ModelData::from_metric(const MetricJet& g, const std::optional<MatrixJet>& curvature) {
  g.validate();
  ModelData m;
  m.n = g.n();
  m.order = g.order();
  int n = m.n;
  MatrixJet ginv = inverse_metric(g);
  m.christoffel.assign(n * n * n, RescalableExpression(n, m.order));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Jet acc(2 * n, m.order);
        for (int a = 0; a < n; ++a) acc += ginv.at(a, k) * differentiate(g.g.at(a, j), n + l);
        m.christoffel[(l * n + j) * n + k] = holomorphic_part(acc, n, m.order);
      }
  m.curvature.assign(n * n, RescalableExpression(n, m.order));
  if (curvature) {
    if (curvature->size != n || curvature->nvars() != 2 * n) throw std::invalid_argument("curvature must be an n x n matrix over (z, zbar)");
    if (curvature->order() < m.order - 2) throw std::invalid_argument("curvature jet order too low for the metric");
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) m.curvature[j * n + i] = holomorphic_part(curvature->at(j, i), n, m.order);
  }
  return m;
}

RescalableExpression nabla_md_bar(const ModelData& m, int j, const RescalableExpression& s) {
  ExprRoster ro{m.n};
  RescalableExpression r = d_analytic(s, ro.zbt(j));
  for (int k = 0; k < m.n; ++k) {
    RescalableExpression ik = contract_generator(ro.dzbt_bit(k), s);
    if (ik.is_zero()) continue;
    for (int l = 0; l < m.n; ++l) {
      const RescalableExpression& w = m.w(l, j, k);
      if (w.is_zero()) continue;
      r += wedge_generator(ro.dwbar_bit(l), w * ik);
    }
  }
  return r;
}

RescalableExpression laplacian_md(const ModelData& m, const RescalableExpression& s) {
  ExprRoster ro{m.n};
  RescalableExpression r(m.n, std::max(s.order() - 2, 0));
  for (int i = 0; i < m.n; ++i) r -= d_analytic(nabla_md_bar(m, i, s), ro.zt(i)) * QComplex(2);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) {
      const RescalableExpression& f = m.F(j, i);
      if (f.is_zero()) continue;
      r += wedge_generator(ro.dwbar_bit(i), contract_generator(ro.dzbt_bit(j), f * s)) * QComplex(2);
    }
  return r;
}

RescalableExpression radial_md(const ModelData& m, const RescalableExpression& s) {
  ExprRoster ro{m.n};
  RescalableExpression r(m.n, s.order());
  for (const auto& [mono, c] : s.terms()) {
    int d = degree(mono.e);
    if (d > 0) r.accumulate(mono, c * QComplex(d));
  }
  // Connection part: sum_j zbartilde_j w^{kbar}_{lbar jbar} dwbar_l iota_{kbar}.
  for (int j = 0; j < m.n; ++j) {
    RescalableExpression zj = RescalableExpression::variable(m.n, m.order + 1, ro.zbt(j));
    for (int k = 0; k < m.n; ++k) {
      RescalableExpression ik = contract_generator(ro.dzbt_bit(k), s);
      if (ik.is_zero()) continue;
      for (int l = 0; l < m.n; ++l) {
        const RescalableExpression& w = m.w(l, j, k);
        if (w.is_zero()) continue;
        r += wedge_generator(ro.dwbar_bit(l), zj * w * ik);
      }
    }
  }
  return r;
}

RescalableExpression contraction_derivative(const RescalableExpression& s) {
  ExprRoster ro{s.n()};
  RescalableExpression r(s.n(), std::max(s.order() - 1, 0));
  for (int l = 0; l < s.n(); ++l) r += contract_generator(ro.dzbt_bit(l), d_analytic(s, ro.zt(l)));
  return r;
}

HeatCoefficientJet model_transport_solve(const ModelData& m, int K, const QComplex& seed,
                                         std::optional<std::uint32_t> seed_forms) {
  int n = m.n;
  if (K < 0 || m.order - 2 * K < 0) throw std::invalid_argument("transport order K needs order >= 2K");
  std::uint32_t forms = seed_forms.value_or((std::uint32_t(1) << n) - 1);
  HeatCoefficientJet u;
  u.n = n;
  RescalableExpression v(n, m.order);
  v.accumulate({Exponent(4 * n, 0), 0, forms}, seed);
  for (int d = 1; d <= m.order; ++d) {
    RescalableExpression r = radial_md(m, v).degree_part(d);
    v -= r * (QComplex(1) / QComplex(d));
  }
  u.v.push_back(v);
  for (int k = 0; k < K; ++k) {
    const RescalableExpression& prev = u.v.back();
    int order = prev.order() - 2;
    RescalableExpression lap = laplacian_md(m, prev);
    RescalableExpression next(n, order);
    for (int d = 0; d <= order; ++d) {
      RescalableExpression r = (lap + radial_md(m, next)).degree_part(d);
      next -= r * (QComplex(1) / QComplex(d + k + 1));
    }
    u.v.push_back(next);
  }
  return u;
}

HeatCoefficientJet model_transport_solve(const MetricJet& g, const std::optional<MatrixJet>& curvature, int K) {
  return model_transport_solve(ModelData::from_metric(g, curvature), K);
}

double transport_residual(const ModelData& m, const HeatCoefficientJet& u) {
  if (u.v.empty()) return 0;
  double worst = radial_md(m, u.v[0]).max_abs();
  for (size_t k = 0; k + 1 < u.v.size(); ++k) {
    RescalableExpression r = radial_md(m, u.v[k + 1]) + u.v[k + 1] * QComplex(static_cast<long>(k + 1)) + laplacian_md(m, u.v[k]);
    worst = std::max(worst, r.max_abs());
  }
  return worst;
}

RescalableExpression heat_residual(const HeatCoefficientJet& u, const ModelData& m) {
  int n = m.n;
  if (u.v.empty()) throw std::invalid_argument("empty heat coefficient jet");
  ExprRoster ro{n};
  int order = u.v.back().order();
  if (order < 2) throw std::invalid_argument("heat residual needs the last coefficient at order >= 2");
  RescalableExpression f(n, order);
  for (size_t k = 0; k < u.v.size(); ++k)
    f += RescalableExpression::t_power(n, order, static_cast<int>(k) - n) * u.v[k];
  RescalableExpression phi(n, order + 2);
  for (int i = 0; i < n; ++i)
    phi -= RescalableExpression::variable(n, order + 2, ro.zt(i)) * RescalableExpression::variable(n, order + 2, ro.zbt(i)) *
           RescalableExpression::t_power(n, order + 2, -1) * QComplex(mpq_class(1, 2));
  RescalableExpression r = d_t(f) + d_t(phi) * f;
  for (int i = 0; i < n; ++i) {
    RescalableExpression bar = nabla_md_bar(m, i, f) + d_analytic(phi, ro.zbt(i)) * f;
    RescalableExpression hol = d_analytic(bar, ro.zt(i)) + d_analytic(phi, ro.zt(i)) * bar;
    r -= hol * QComplex(2);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const RescalableExpression& c = m.F(j, i);
      if (c.is_zero()) continue;
      r += wedge_generator(ro.dwbar_bit(i), contract_generator(ro.dzbt_bit(j), c * f)) * QComplex(2);
    }
  return r;
}

double heat_residual_check(const HeatCoefficientJet& u, const ModelData& m) {
  RescalableExpression r = heat_residual(u, m);
  int top = static_cast<int>(u.v.size()) - 1 - m.n;
  return (r - r.t_part(top)).max_abs();
}

std::map<int, RescalableExpression> getzler_decomposition(const HeatCoefficientJet& u) {
  if (u.v.empty()) return {};
  int n = u.n, order = u.v.back().order();
  RescalableExpression f(n, order);
  for (size_t k = 0; k < u.v.size(); ++k)
    f += RescalableExpression::t_power(n, order, static_cast<int>(k) - n) * u.v[k];
  return rescale(f);
}

CommutatorReport model_commutators(const ModelData& m, const RescalableExpression& s) {
  ExprRoster ro{m.n};
  CommutatorReport rep;
  RescalableExpression as = contraction_derivative(s);
  for (int j = 0; j < m.n; ++j) {
    RescalableExpression a = contraction_derivative(d_analytic(s, ro.zt(j))) - d_analytic(as, ro.zt(j));
    rep.holomorphic = std::max(rep.holomorphic, a.max_abs());
    RescalableExpression b = contraction_derivative(nabla_md_bar(m, j, s)) - nabla_md_bar(m, j, as);
    rep.antiholomorphic = std::max(rep.antiholomorphic, b.max_abs());
  }
  RescalableExpression c = contraction_derivative(laplacian_md(m, s)) - laplacian_md(m, as);
  rep.laplacian = c.max_abs();
  return rep;
}

}  // namespace holofg
