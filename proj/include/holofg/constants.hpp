#pragma once

// Global conventions. Every kernel constant in the library derives from the
// choices pinned here.
//
//   Metric.      g_{i jbar} = 1/2 delta_{ij}. The induced Riemannian metric is
//                the Euclidean one on C^n = R^{2n}, so the squared geodesic
//                distance is |z - w|^2 minimized over lattice translates.
//   Laplacian.   On functions Delta = -2 sum_i d_i dbar_i = -(1/2) Delta_Euclid.
//                The heat semigroup is therefore exp(t Delta_Euclid / 2) and the
//                free heat kernel is (2 pi t)^{-n} exp(-|z - w|^2 / 2t).
//   dbar*.       With g^{i jbar} = 2 delta, dbar* = -2 sum_i iota_{d/dzbar_i} d_{z_i}.
//   Orientation. dz ^ dzbar = -2i dx ^ dy. A top form prod_l (dz_l ^ dzbar_l)
//                integrates to (-2i)^N times the Lebesgue integral of its
//                coefficient.
//   Holomorphic volume form. Omega = dz_1 ^ ... ^ dz_n.
//   Real coordinates. A point of C^n is stored as (Re z_1, Im z_1, ...,
//                Re z_n, Im z_n) in R^{2n}.

#include <complex>
#include <numbers>

namespace holofg {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// dz ^ dzbar = kDzDzbar * dx ^ dy.
inline constexpr cplx kDzDzbar{0.0, -2.0};

/// Target absolute tail bound for truncated lattice sums.
inline constexpr double kLatticeTailTarget = 1e-14;

/// Version of the smooth cutoff used by fake distance functions. Bump this if
/// the cutoff profile changes so cached or persisted results can be told apart.
inline constexpr int kCutoffProfileVersion = 1;

}  // namespace holofg
