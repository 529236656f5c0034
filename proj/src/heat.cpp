#include "holofg/heat.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "holofg/tail_bound.hpp"

namespace holofg {

namespace {
void check_t(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("heat: t must be positive");
}
}  // namespace

HeatKernel::HeatKernel(Lattice lattice, double tol)
    : lattice_(std::move(lattice)),
      tol_(tol),
      rho_(parallelepiped_radius(lattice_.basis())),
      dual_rho_(parallelepiped_radius(lattice_.dual_basis())),
      dual_covol_(std::pow(2.0 * kPi, lattice_.real_dim()) / lattice_.covolume()) {
  if (!(tol > 0.0)) throw std::invalid_argument("heat: tolerance must be positive");
}

double HeatKernel::crossover_t() const {
  const double s = lattice_.shortest_vector();
  return s * s / 8.0;
}

// Truncation radius for terms |u|^power (2 pi t)^{-n} t^{-power} exp(-|u|^2 / 2t).
double HeatKernel::image_radius(double t, int power) const {
  {
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->image.find({t, power});
    if (it != cache_->image.end()) return it->second;
  }
  const int n = lattice_.n();
  auto g = [=](double s) {
    return std::pow(2.0 * kPi * t, -n) * std::pow(s / t, power) * std::exp(-s * s / (2.0 * t));
  };
  const double start = 2.0 * rho_ + std::sqrt(power * t) + std::sqrt(t);
  const double R = lattice_truncation_radius(lattice_.real_dim(), lattice_.covolume(), rho_, start, tol_, g);
  std::lock_guard lock(cache_->mutex);
  cache_->image[{t, power}] = R;
  return R;
}

// Truncation radius for terms covol^{-1} |mu|^power exp(-t |mu|^2 / 2).
double HeatKernel::spectral_radius(double t, int power) const {
  {
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->spectral.find({t, power});
    if (it != cache_->spectral.end()) return it->second;
  }
  const double covol = lattice_.covolume();
  auto g = [=](double s) { return std::pow(s, power) * std::exp(-t * s * s / 2.0) / covol; };
  const double start = 2.0 * dual_rho_ + std::sqrt(power / t) + 1.0 / std::sqrt(t);
  const double M = lattice_truncation_radius(lattice_.real_dim(), dual_covol_, dual_rho_, start, tol_, g);
  std::lock_guard lock(cache_->mutex);
  cache_->spectral[{t, power}] = M;
  return M;
}

double HeatKernel::spectral_coefficient(const RVec& mu, double t) const {
  return std::exp(-t * mu.squaredNorm() / 2.0) / lattice_.covolume();
}

CertifiedValue HeatKernel::scalar(const RVec& x, double t, HeatMethod method) const {
  check_t(t);
  if (method == HeatMethod::Auto) method = t < crossover_t() ? HeatMethod::Image : HeatMethod::Spectral;
  const RVec xc = centered_difference(x, lattice_);
  CertifiedValue out;
  if (method == HeatMethod::Image) {
    const double R = image_radius(t, 0);
    double sum = 0.0;
    lattice_.for_each_near(xc, R, [&](const RVec& l) {
      sum += std::exp(-(xc - l).squaredNorm() / (2.0 * t));
      ++out.terms;
    });
    out.value = std::pow(2.0 * kPi * t, -lattice_.n()) * sum;
    out.tail_bound = tol_;
  } else {
    const double M = spectral_radius(t, 0);
    cplx sum = 0.0;
    lattice_.for_each_dual_near(RVec::Zero(xc.size()), M, [&](const RVec& mu) {
      sum += std::exp(-t * mu.squaredNorm() / 2.0) * std::polar(1.0, mu.dot(xc));
      ++out.terms;
    });
    out.value = sum / lattice_.covolume();
    out.tail_bound = tol_;
  }
  return out;
}

std::vector<CertifiedValue> HeatKernel::dbar_star_components(const RVec& x, double t, HeatMethod method) const {
  check_t(t);
  if (method == HeatMethod::Auto) method = t < crossover_t() ? HeatMethod::Image : HeatMethod::Spectral;
  const int n = lattice_.n();
  const RVec xc = centered_difference(x, lattice_);
  std::vector<CertifiedValue> out(n);
  int terms = 0;
  if (method == HeatMethod::Image) {
    // -2 d/dz_i exp(-|u|^2/2t) = (ubar_i / t) exp(-|u|^2/2t)
    const double R = image_radius(t, 1);
    lattice_.for_each_near(xc, R, [&](const RVec& l) {
      const RVec u = xc - l;
      const double e = std::exp(-u.squaredNorm() / (2.0 * t)) / t;
      for (int i = 0; i < n; ++i) out[i].value += std::conj(complex_coord(u, i)) * e;
      ++terms;
    });
    const double pref = std::pow(2.0 * kPi * t, -n);
    for (auto& c : out) c.value *= pref;
  } else {
    // -2 d/dz_i exp(i<mu,x>) = -i conj(mu_i) exp(i<mu,x>), mu_i = mu_{2i} + i mu_{2i+1}
    const double M = spectral_radius(t, 1);
    lattice_.for_each_dual_near(RVec::Zero(xc.size()), M, [&](const RVec& mu) {
      const cplx e = std::exp(-t * mu.squaredNorm() / 2.0) * std::polar(1.0, mu.dot(xc));
      for (int i = 0; i < n; ++i) out[i].value += -kI * std::conj(complex_coord(mu, i)) * e;
      ++terms;
    });
    for (auto& c : out) c.value /= lattice_.covolume();
  }
  for (auto& c : out) {
    c.tail_bound = tol_;
    c.terms = terms;
  }
  return out;
}

HeatValue HeatKernel::heat_eval(const RVec& z, const RVec& w, double t, HeatMethod method, int head,
                                int tail) const {
  const CertifiedValue s = scalar(z - w, t, method);
  HeatValue out;
  out.kernel.form = s.value * dn_difference(head, tail, lattice_.n());
  out.tail_bound = s.tail_bound;
  return out;
}

HeatValue HeatKernel::dbar_star_heat(const RVec& z, const RVec& w, double t, HeatMethod method, int head,
                                     int tail) const {
  const auto comps = dbar_star_components(z - w, t, method);
  const MultiPointForm dn = dn_difference(head, tail, lattice_.n());
  HeatValue out;
  for (int i = 0; i < lattice_.n(); ++i) {
    out.kernel.form += comps[i].value * contract({head, i}, dn);
    out.tail_bound += comps[i].tail_bound;
  }
  return out;
}

double schwinger_moment(int m, double u) {
  if (m < 2) throw std::invalid_argument("schwinger_moment: m must be >= 2");
  if (!(u > 0.0)) throw std::invalid_argument("schwinger_moment: u must be positive");
  return boost::math::tgamma(static_cast<double>(m - 1)) * std::pow(u / 2.0, 1.0 - m);
}

}  // namespace holofg
