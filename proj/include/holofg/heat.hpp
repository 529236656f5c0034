#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "holofg/forms.hpp"
#include "holofg/lattice.hpp"

namespace holofg {

enum class HeatMethod { Image, Spectral, Auto };

/// Truncated lattice sum together with its certified absolute tail bound.
struct CertifiedValue {
  cplx value;
  double tail_bound = 0.0;
  int terms = 0;
};

struct HeatValue {
  GradedKernelValue kernel;
  double tail_bound = 0.0;
};

/// Heat kernel of the flat torus. For x = z - w the scalar coefficient is
///   image:    (2 pi t)^{-n} sum_lambda exp(-|x - lambda|^2 / 2t)
///   spectral: covol^{-1} sum_mu exp(-t |mu|^2 / 2) exp(i <mu, x>)
/// and the kernel is that coefficient times d^n(zbar - wbar).
class HeatKernel {
 public:
  explicit HeatKernel(Lattice lattice, double tol = kLatticeTailTarget);

  const Lattice& lattice() const { return lattice_; }
  double tolerance() const { return tol_; }
  /// Representation switch point (shortest vector)^2 / 8.
  double crossover_t() const;

  CertifiedValue scalar(const RVec& x, double t, HeatMethod method = HeatMethod::Auto) const;

  /// Coefficients K_i of dbar*H = sum_i K_i iota_{head,i} d^n(zbar - wbar),
  /// i.e. K_i = -2 d/dz_i of the scalar coefficient.
  std::vector<CertifiedValue> dbar_star_components(const RVec& x, double t,
                                                   HeatMethod method = HeatMethod::Auto) const;

  HeatValue heat_eval(const RVec& z, const RVec& w, double t, HeatMethod method = HeatMethod::Auto,
                      int head = 0, int tail = 1) const;
  HeatValue dbar_star_heat(const RVec& z, const RVec& w, double t, HeatMethod method = HeatMethod::Auto,
                           int head = 0, int tail = 1) const;

  /// covol^{-1} exp(-t |mu|^2 / 2); exact semigroup in t.
  double spectral_coefficient(const RVec& mu, double t) const;

 private:
  double image_radius(double t, int power) const;
  double spectral_radius(double t, int power) const;

  Lattice lattice_;
  double tol_;
  double rho_;
  double dual_rho_;
  double dual_covol_;

  struct RadiusCache {
    std::mutex mutex;
    std::map<std::pair<double, int>, double> image, spectral;
  };
  std::shared_ptr<RadiusCache> cache_ = std::make_shared<RadiusCache>();
};

/// int_0^inf exp(-u / 2t) t^{-m} dt = Gamma(m - 1) (u/2)^{1-m}. Requires m >= 2, u > 0.
double schwinger_moment(int m, double u);

}  // namespace holofg
