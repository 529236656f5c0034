#include "holofg/propagator.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "holofg/tail_bound.hpp"

namespace holofg {

namespace {
int order(const MultiIndex& a) {
  int p = 0;
  for (int v : a) p += v;
  return p;
}

cplx ipow(cplx z, int k) {
  cplx r = 1.0;
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}
}  // namespace

Propagator::Propagator(Lattice lattice, PropagatorOptions options)
    : lattice_(std::move(lattice)), options_(options), rho_(parallelepiped_radius(lattice_.basis())) {
  if (!(options_.split_L > 0.0)) throw std::invalid_argument("propagator: split_L must be positive");
  if (options_.max_deriv < 0) throw std::invalid_argument("propagator: max_deriv must be >= 0");
  const int n = lattice_.n();
  const int d = lattice_.real_dim();
  const double L = options_.split_L;
  const double covol = lattice_.covolume();
  const double dual_rho = parallelepiped_radius(lattice_.dual_basis());
  const double dual_covol = std::pow(2.0 * kPi, d) / covol;
  const int pmax = 2 * options_.max_deriv;
  double rmax = 0.0;
  double mmax = 0.0;
  for (int p = 0; p <= pmax; ++p) {
    // |image term| <= (2 pi)^{-n} s^{1+p} 2^{-p} (2/s^2)^{n+p} Gamma(n+p, s^2/2L)
    auto gi = [=](double s) {
      return std::pow(2.0 * kPi, -n) * std::pow(2.0, n) * std::pow(s, 1 - 2 * n - p) *
             boost::math::tgamma(static_cast<double>(n + p), s * s / (2.0 * L));
    };
    const double R = lattice_truncation_radius(d, covol, rho_, 2.0 * rho_ + std::sqrt(2.0 * L), options_.tol, gi);
    // |mode| <= covol^{-1} 2^{1-p} s^{p-1} e^{-L s^2/2}
    auto gs = [=](double s) { return std::pow(2.0, 1 - p) * std::pow(s, p - 1) * std::exp(-L * s * s / 2.0) / covol; };
    const double M = lattice_truncation_radius(d, dual_covol, dual_rho, 2.0 * dual_rho + std::sqrt((p + 1) / L),
                                               options_.tol, gs);
    image_radius_.push_back(R);
    spectral_radius_.push_back(M);
    rmax = std::max(rmax, R);
    mmax = std::max(mmax, M);
  }
  images_ = lattice_.vectors_within(rmax + rho_);
  for (const RVec& mu : lattice_.dual_vectors_within(mmax)) {
    const double m2 = mu.squaredNorm();
    if (m2 == 0.0) continue;
    modes_.push_back({mu, std::exp(-L * m2 / 2.0) / (m2 / 2.0) / covol, std::sqrt(m2)});
  }
}

MultiIndex Propagator::combined(const MultiIndex& dz, const MultiIndex& dw, int& sign) const {
  const int n = lattice_.n();
  auto check = [&](const MultiIndex& a) {
    if (!a.empty() && static_cast<int>(a.size()) != n) throw std::invalid_argument("propagator: multi-index size");
    for (int v : a)
      if (v < 0) throw std::invalid_argument("propagator: negative derivative order");
    if (order(a) > options_.max_deriv) throw std::invalid_argument("propagator: derivative order exceeds max_deriv");
  };
  check(dz);
  check(dw);
  MultiIndex a(n, 0);
  for (int i = 0; i < n; ++i) {
    if (!dz.empty()) a[i] += dz[i];
    if (!dw.empty()) a[i] += dw[i];
  }
  // d/dw = -d/dz on functions of z - w.
  sign = (order(dw) % 2 == 0) ? 1 : -1;
  return a;
}

std::vector<cplx> Propagator::head_closed_form(const RVec& xc, const MultiIndex& a) const {
  const int n = lattice_.n();
  const int p = order(a);
  const double L = options_.split_L;
  const double R2 = image_radius_[p] * image_radius_[p];
  std::vector<cplx> out(n);
  const double k = static_cast<double>(n + p);
  for (const RVec& l : images_) {
    const RVec u = xc - l;
    const double s = u.squaredNorm();
    if (s > R2 || s == 0.0) continue;
    cplx mono = 1.0;
    for (int j = 0; j < n; ++j) mono *= ipow(-std::conj(complex_coord(u, j)) / 2.0, a[j]);
    const double radial = std::pow(2.0 / s, n + p) * boost::math::tgamma(k, s / (2.0 * L));
    for (int i = 0; i < n; ++i) out[i] += std::conj(complex_coord(u, i)) * mono * radial;
  }
  const double pref = std::pow(2.0 * kPi, -n);
  for (auto& v : out) v *= pref;
  return out;
}

std::vector<cplx> Propagator::spectral_tail(const RVec& xc, const MultiIndex& a) const {
  const int n = lattice_.n();
  const int p = order(a);
  const double M = spectral_radius_[p];
  std::vector<cplx> out(n);
  for (const Mode& m : modes_) {
    if (m.norm > M) break;
    cplx f = m.weight * std::polar(1.0, m.mu.dot(xc));
    for (int j = 0; j < n; ++j) f *= ipow(0.5 * kI * std::conj(complex_coord(m.mu, j)), a[j]);
    for (int i = 0; i < n; ++i) out[i] += -kI * std::conj(complex_coord(m.mu, i)) * f;
  }
  return out;
}

std::vector<cplx> Propagator::components(const RVec& x, const MultiIndex& dz, const MultiIndex& dw) const {
  int sign = 1;
  const MultiIndex a = combined(dz, dw, sign);
  const RVec xc = centered_difference(x, lattice_);
  if (minimal_image(xc, lattice_).squaredNorm() == 0.0)
    throw std::invalid_argument("propagator: z = w; use diagonal_pullback");
  std::vector<cplx> h = head_closed_form(xc, a);
  const std::vector<cplx> t = spectral_tail(xc, a);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = static_cast<double>(sign) * (h[i] + t[i]);
  return h;
}

MultiPointForm Propagator::assemble(const std::vector<cplx>& k, int n, int head, int tail) {
  const MultiPointForm dn = dn_difference(head, tail, n);
  MultiPointForm out;
  for (int i = 0; i < n; ++i) out += k[i] * contract({head, i}, dn);
  return out;
}

GradedKernelValue Propagator::eval(const RVec& z, const RVec& w, const MultiIndex& dz, const MultiIndex& dw,
                                   int head, int tail) const {
  return {assemble(components(z - w, dz, dw), n(), head, tail), false};
}

std::vector<cplx> Propagator::diagonal_components(const MultiIndex& dz, const MultiIndex& dw) const {
  int sign = 1;
  const MultiIndex a = combined(dz, dw, sign);
  const RVec zero = RVec::Zero(lattice_.real_dim());
  std::vector<cplx> h = head_closed_form(zero, a);
  const std::vector<cplx> t = spectral_tail(zero, a);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = static_cast<double>(sign) * (h[i] + t[i]);
  return h;
}

MultiPointForm Propagator::diagonal_pullback(const RVec&, const MultiIndex& dz, const MultiIndex& dw,
                                             int label) const {
  const auto k = diagonal_components(dz, dw);
  // Pullback sends dzbar_head and dzbar_tail to the same generator, so each
  // difference covector maps to zero; only the n = 1 scalar survives.
  if (n() == 1) return MultiPointForm::scalar(k[0]);
  (void)label;
  return {};
}

namespace {
// Components of d^a dbar*H_t summed over the given image offsets u = x - lambda.
std::vector<cplx> image_terms(const std::vector<RVec>& us, int n, double t, const MultiIndex& a) {
  std::vector<cplx> out(n);
  const double R2 = 2.0 * t * 60.0;  // drop terms below e^{-60}
  for (const RVec& u : us) {
    const double s = u.squaredNorm();
    if (s > R2 || s == 0.0) continue;
    cplx mono = std::exp(-s / (2.0 * t)) / t;
    for (int j = 0; j < n; ++j) mono *= ipow(-std::conj(complex_coord(u, j)) / (2.0 * t), a[j]);
    for (int i = 0; i < n; ++i) out[i] += std::conj(complex_coord(u, i)) * mono;
  }
  const double pref = std::pow(2.0 * kPi * t, -n);
  for (auto& v : out) v *= pref;
  return out;
}
}  // namespace

std::vector<cplx> Propagator::head_integrand(const RVec& x, double t, const MultiIndex& a) const {
  const RVec xc = centered_difference(x, lattice_);
  std::vector<RVec> us;
  for (const RVec& l : images_) us.push_back(xc - l);
  return image_terms(us, lattice_.n(), t, a);
}

std::vector<cplx> Propagator::components_by_quadrature(const RVec& x, double t_min, const MultiIndex& dz,
                                                       const MultiIndex& dw) const {
  int sign = 1;
  const MultiIndex a = combined(dz, dw, sign);
  const int n = lattice_.n();
  const double L = options_.split_L;
  const RVec xc = centered_difference(x, lattice_);
  std::vector<RVec> us;
  for (const RVec& l : images_) {
    const RVec u = xc - l;
    if (u.squaredNorm() <= 2.0 * L * 60.0) us.push_back(u);
  }
  std::vector<cplx> out(n);
  // Geometric panels in t resolve the exp(-s/2t) onset near t ~ s.
  const double lo = std::max(t_min, 1e-12 * L);
  std::vector<double> cuts{lo};
  while (cuts.back() < L) cuts.push_back(std::min(L, cuts.back() * 4.0));
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    for (int i = 0; i < n; ++i) {
      auto f = [&](double t) { return image_terms(us, n, t, a)[i]; };
      out[i] += GK::integrate(f, cuts[c], cuts[c + 1], 10, 1e-13);
    }
  }
  const std::vector<cplx> t = spectral_tail(xc, a);
  for (int i = 0; i < n; ++i) out[i] = static_cast<double>(sign) * (out[i] + t[i]);
  return out;
}

std::vector<cplx> bm_components(const RVec& u) {
  const int n = static_cast<int>(u.size()) / 2;
  const double s = u.squaredNorm();
  if (s == 0.0) throw std::invalid_argument("bm_singular_part: z = w");
  const double c = boost::math::factorial<double>(n - 1) / std::pow(kPi, n) / std::pow(s, n);
  std::vector<cplx> out(n);
  for (int i = 0; i < n; ++i) out[i] = c * std::conj(complex_coord(u, i));
  return out;
}

GradedKernelValue bm_singular_part(const RVec& z, const RVec& w, const Lattice& lattice, int head, int tail) {
  const RVec u = minimal_image(z - w, lattice);
  return {Propagator::assemble(bm_components(u), lattice.n(), head, tail), false};
}

}  // namespace holofg
