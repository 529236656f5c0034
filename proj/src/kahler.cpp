#include "holofg/kahler.hpp"

#include <algorithm>
#include <stdexcept>

#include <Eigen/Dense>

namespace holofg {

namespace {

Jet with_order(const Jet& a, int order) {
  Jet r(a.nvars(), order);
  for (const auto& [e, c] : a.terms()) r.accumulate(e, c);
  return r;
}

int antiholomorphic_degree(const Exponent& e, int n) {
  int d = 0;
  for (size_t b = 0; b < e.size(); b += 2 * n)
    for (int i = 0; i < n; ++i) d += e[b + n + i];
  return d;
}

void validate_hermitian(const MatrixJet& m, int n, const QComplex& scale, const char* what) {
  if (m.size <= 0) throw std::invalid_argument(std::string(what) + " is empty");
  if (m.nvars() != 2 * n) throw std::invalid_argument(std::string(what) + " must use a (z, zbar) roster");
  Eigen::MatrixXcd c(m.size, m.size);
  for (int i = 0; i < m.size; ++i)
    for (int j = 0; j < m.size; ++j) {
      int o = std::min(m.at(i, j).order(), m.at(j, i).order());
      if (!(conjugate(m.at(i, j), n).truncated(o) == m.at(j, i).truncated(o)))
        throw std::invalid_argument(std::string(what) + " is not Hermitian");
      c(i, j) = (m.at(i, j).constant_term() / scale).to_complex();
    }
  Eigen::LLT<Eigen::MatrixXcd> llt(c);
  if (llt.info() != Eigen::Success) throw std::invalid_argument(std::string(what) + " constant term is not positive definite");
}

}  // namespace

std::vector<int> antiholomorphic_vars(int n, int nvars) {
  std::vector<int> out;
  for (int b = 0; b < nvars; b += 2 * n)
    for (int i = 0; i < n; ++i) out.push_back(b + n + i);
  return out;
}

MetricJet MetricJet::flat(int n, int order) {
  return {MatrixJet::identity(n, 2 * n, order, QComplex(mpq_class(1, 2)))};
}

MetricJet MetricJet::from_potential(int n, const Jet& phi) {
  if (phi.nvars() != 2 * n) throw std::invalid_argument("potential must use a (z, zbar) roster");
  MatrixJet g(n, 2 * n, std::max(phi.order() - 2, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g.at(i, j) = differentiate(differentiate(phi, i), n + j);
  return {g};
}

void MetricJet::validate() const { validate_hermitian(g, n(), QComplex(1), "metric"); }

void HermitianJet::validate() const { validate_hermitian(h, n, QComplex(1), "Hermitian metric"); }

MatrixJet inverse_metric(const MetricJet& g) { return transpose(invert(g.g)); }

double kahler_normal_residual(const MetricJet& g) {
  int n = g.n();
  double worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      QComplex target = i == j ? QComplex(mpq_class(1, 2)) : QComplex();
      const Jet& e = g.g.at(i, j);
      worst = std::max(worst, (e.constant_term() - target).abs());
      for (const auto& [x, c] : e.terms())
        if (degree(x) > 0 && antiholomorphic_degree(x, n) == 0) worst = std::max(worst, c.abs());
    }
  return worst;
}

namespace {

// sum_{ij} d_i(rho) g^{i jbar} dbar_j(rho) at the given order.
Jet eikonal_lhs(const MatrixJet& ginv, const Jet& rho, int n, int order) {
  std::vector<Jet> d(n), db(n);
  for (int i = 0; i < n; ++i) {
    d[i] = with_order(differentiate(rho, i), order);
    db[i] = with_order(differentiate(rho, n + i), order);
  }
  Jet lhs(2 * n, order);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) lhs += d[i] * with_order(ginv.at(i, j), order) * db[j];
  return lhs;
}

}  // namespace

Jet eikonal_solve(const MetricJet& g, int order) {
  int n = g.n();
  if (order < 2) throw std::invalid_argument("eikonal order must be at least 2");
  if (g.order() < order - 2) throw std::invalid_argument("metric jet order too low for the requested eikonal order");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!(g.g.at(i, j).constant_term() == (i == j ? QComplex(mpq_class(1, 2)) : QComplex())))
        throw std::domain_error("inconsistent eikonal solve at order 2: metric is not 1/2 delta at the origin");
  MatrixJet ginv = inverse_metric(g);
  Jet rho(2 * n, order + 1);
  for (int i = 0; i < n; ++i) {
    Exponent e(2 * n, 0);
    e[i] = e[n + i] = 1;
    rho.set(e, 1);
  }
  // The degree-d part of the left side is 2 d P_d plus terms from lower
  // degrees, so P_d = -R_d / (2 (d - 1)).
  for (int d = 3; d <= order; ++d) {
    Jet r = eikonal_lhs(ginv, rho, n, d).degree_part(d);
    for (const auto& [e, c] : r.terms()) rho.accumulate(e, c / QComplex(-2 * (d - 1)));
  }
  return with_order(rho, order);
}

double eikonal_residual(const MetricJet& g, const Jet& rho2) {
  int order = rho2.order();
  Jet lhs = eikonal_lhs(inverse_metric(g), with_order(rho2, order + 1), g.n(), order);
  return (lhs - with_order(rho2, order) * QComplex(2)).max_abs();
}

FrameGauge normal_frame_gauge(const HermitianJet& h) {
  int n = h.n, r = h.rank(), nv = 2 * n;
  std::vector<int> bar = antiholomorphic_vars(n, nv);
  MatrixJet hol = h.h;
  for (Jet& j : hol.entries) j = j.restrict_zero(bar);
  FrameGauge out;
  out.G = invert(hol);
  out.transformed = out.G * h.h * adjoint(out.G, n);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      Jet d = out.transformed.at(a, b).restrict_zero(bar);
      if (a == b) d -= Jet::constant(nv, d.order(), 1);
      out.residual = std::max(out.residual, d.max_abs());
    }
  return out;
}

}  // namespace holofg
