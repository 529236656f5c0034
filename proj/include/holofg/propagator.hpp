#pragma once

#include <vector>

#include "holofg/forms.hpp"
#include "holofg/lattice.hpp"

namespace holofg {

/// Holomorphic derivative orders per coordinate; an empty index means zero.
using MultiIndex = std::vector<int>;

struct PropagatorOptions {
  /// Split point between the image-sum head int_0^L and the spectral tail.
  double split_L = 0.2;
  /// Certified absolute truncation bound for each lattice sum.
  double tol = kLatticeTailTarget;
  /// Largest supported total derivative order per leg.
  int max_deriv = 4;
};

/// The flat-torus propagator P = int_0^inf dt (dbar* x id) H_t. For x = z - w,
///   P = sum_i K_i(x) iota_{head,i} d^n(zbar - wbar).
/// The head int_0^L is summed over images in closed form,
///   int_0^L t^{-m} e^{-s/2t} dt = (2/s)^{m-1} Gamma(m-1, s/2L),
/// and the tail over the dual lattice, where each mode integrates to
/// e^{-L|mu|^2/2} / (|mu|^2/2). The mu = 0 mode is annihilated by dbar*.
class Propagator {
 public:
  explicit Propagator(Lattice lattice, PropagatorOptions options = {});

  const Lattice& lattice() const { return lattice_; }
  const PropagatorOptions& options() const { return options_; }
  int n() const { return lattice_.n(); }

  /// K_i of d_z^dz d_w^dw P at z - w = x. Throws if x is a lattice point or
  /// a derivative order exceeds max_deriv.
  std::vector<cplx> components(const RVec& x, const MultiIndex& dz = {}, const MultiIndex& dw = {}) const;

  /// propagator_eval: the kernel value with point labels head/tail.
  GradedKernelValue eval(const RVec& z, const RVec& w, const MultiIndex& dz = {}, const MultiIndex& dw = {},
                         int head = 0, int tail = 1) const;

  /// Limit of K_i at the diagonal; the lambda = 0 image term vanishes there.
  std::vector<cplx> diagonal_components(const MultiIndex& dz = {}, const MultiIndex& dw = {}) const;

  /// Pullback of d_z^dz d_w^dw P along the diagonal as a form on `label`.
  /// For n >= 2 the form factor d(zbar - wbar) pulls back to zero.
  MultiPointForm diagonal_pullback(const RVec& z, const MultiIndex& dz = {}, const MultiIndex& dw = {},
                                   int label = 0) const;

  /// int_{t_min}^inf of the dbar*H components, with the image head done by
  /// adaptive Gauss-Kronrod quadrature in t (t_min may be 0 off the diagonal).
  std::vector<cplx> components_by_quadrature(const RVec& x, double t_min, const MultiIndex& dz = {},
                                             const MultiIndex& dw = {}) const;

  /// Integrand in t of the image-sum head: components of d^a dbar*H_t.
  std::vector<cplx> head_integrand(const RVec& x, double t, const MultiIndex& a) const;

  /// Assemble sum_i K_i iota_{head,i} d^n(zbar - wbar).
  static MultiPointForm assemble(const std::vector<cplx>& k, int n, int head, int tail);

 private:
  MultiIndex combined(const MultiIndex& dz, const MultiIndex& dw, int& sign) const;
  std::vector<cplx> head_closed_form(const RVec& xc, const MultiIndex& a) const;
  std::vector<cplx> spectral_tail(const RVec& xc, const MultiIndex& a) const;

  Lattice lattice_;
  PropagatorOptions options_;
  double rho_;
  std::vector<double> image_radius_;     // per total order p
  std::vector<double> spectral_radius_;  // per total order p
  std::vector<RVec> images_;             // sorted by length
  struct Mode {
    RVec mu;
    double weight;  // covol^{-1} e^{-L|mu|^2/2} / (|mu|^2/2)
    double norm;
  };
  std::vector<Mode> modes_;
};

/// Closed-form lambda = 0 kernel on C^n:
///   ((n-1)!/pi^n) sum_i (zbar_i - wbar_i) |z - w|^{-2n} iota_{head,i} d^n(zbar - wbar),
/// evaluated at the minimal image of z - w.
GradedKernelValue bm_singular_part(const RVec& z, const RVec& w, const Lattice& lattice, int head = 0,
                                   int tail = 1);

/// Components of bm_singular_part at a difference vector u (no reduction).
std::vector<cplx> bm_components(const RVec& u);

}  // namespace holofg
