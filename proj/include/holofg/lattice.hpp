#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "holofg/constants.hpp"

namespace holofg {

/// Largest complex dimension supported by the numeric modules.
inline constexpr int kMaxDim = 3;

/// Point of R^{2n} stored without heap allocation.
using RVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 2 * kMaxDim, 1>;

/// Complex coordinates (z_1, ..., z_n) of a real vector.
cplx complex_coord(const RVec& x, int i);
RVec from_complex(std::span<const cplx> z);

/// A full-rank lattice in C^n = R^{2n}. Basis vectors are the rows of a
/// 2n x 2n real matrix, in the real coordinate order of constants.hpp.
class Lattice {
 public:
  /// Throws std::invalid_argument for a singular or mis-sized basis.
  Lattice(int n, std::span<const double> basis_row_major);

  /// Z^{2n}, i.e. (Z + iZ)^n.
  static Lattice square(int n);

  /// Basis given by complex vectors; `rows[k]` has n entries.
  static Lattice from_complex_rows(const std::vector<std::vector<cplx>>& rows);

  int n() const { return n_; }
  int real_dim() const { return 2 * n_; }

  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::MatrixXd& inverse_basis() const { return inverse_; }
  /// Rows mu_j with <b_i, mu_j> = 2 pi delta_ij.
  const Eigen::MatrixXd& dual_basis() const { return dual_; }

  double covolume() const { return covolume_; }
  double shortest_vector() const { return shortest_; }
  /// Circumradius of the fundamental parallelepiped centred at 0; bounds
  /// the covering radius.
  double covering_radius_bound() const;
  /// Upper bound for the diameter of the fundamental parallelepiped.
  double cell_diameter_bound() const { return 2.0 * covering_radius_bound(); }

  Lattice scaled(double s) const;

  /// Stable 64-bit hash of (n, basis bits).
  std::uint64_t hash() const;

  /// Coefficients c with x = c B.
  RVec coefficients(const RVec& x) const;
  RVec from_coefficients(const RVec& c) const;

  /// Calls f(lambda) for every lattice vector with |lambda - center| <= radius.
  template <class F>
  void for_each_near(const RVec& center, double radius, F&& f) const;

  /// Same for the dual lattice.
  template <class F>
  void for_each_dual_near(const RVec& center, double radius, F&& f) const;

  /// All lattice vectors with |lambda| <= radius, sorted by length.
  std::vector<RVec> vectors_within(double radius) const;
  std::vector<RVec> dual_vectors_within(double radius) const;

 private:
  template <class F>
  static void enumerate_box(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& inv, const RVec& center,
                            double radius, F&& f);

  int n_;
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd inverse_;
  Eigen::MatrixXd dual_;
  Eigen::MatrixXd dual_inverse_;
  double covolume_;
  double shortest_;
};

/// Largest |sum_i s_i b_i| / 2 over sign vectors s, for basis rows b_i.
double parallelepiped_radius(const Eigen::MatrixXd& basis);

/// A point of the torus C^n / Lambda, represented in the half-open
/// fundamental parallelepiped {c B : c in [0,1)^{2n}}.
struct TorusPoint {
  RVec rep;
};

/// Reduce into the fundamental parallelepiped. Coefficients within 1e-13 of an
/// integer are snapped to it, so reduce is idempotent up to round-off.
TorusPoint reduce(const RVec& point, const Lattice& lattice);

/// Representative of x - lambda nearest to the origin in coefficient space
/// (coefficients rounded); not necessarily the minimal image.
RVec centered_difference(const RVec& x, const Lattice& lattice);

/// Minimal image of x: x - lambda with |x - lambda| minimal.
RVec minimal_image(const RVec& x, const Lattice& lattice);

/// Squared flat geodesic distance min_lambda |z - w - lambda|^2.
double distance_squared(const RVec& z, const RVec& w, const Lattice& lattice);

/// Half the length of the shortest nonzero lattice vector.
double injectivity_radius(const Lattice& lattice);

/// C-infinity smoothstep built from exp(-1/x): 0 for x <= 0, 1 for x >= 1.
double smoothstep(double x);
/// Derivative of smoothstep.
double smoothstep_derivative(double x);

/// Parameters of a fake distance function
///   rho~^2 = phi(rho^2) rho^2 + (1 - phi(rho^2)) plateau + bump,
/// where phi = 1 below r0^2 and 0 above r1^2. The optional bump is
///   bump_amplitude * psi(rho^2) * (1 + cos<mu_1, z - w> / 2),
/// with psi rising smoothly from 0 at r1^2 to 1 halfway to the injectivity
/// radius squared.
struct FakeDistanceParams {
  double r0 = 0.2;
  double r1 = 0.3;
  double plateau = 0.09;
  double bump_amplitude = 0.0;
};

class FakeDistance {
 public:
  /// Throws std::invalid_argument unless 0 < r0 < r1 < injectivity radius,
  /// plateau > 0 and bump_amplitude >= 0.
  FakeDistance(const Lattice& lattice, FakeDistanceParams params);

  double operator()(const RVec& z, const RVec& w) const;
  /// rho~^2 as a function of the difference x = z - w.
  double of_difference(const RVec& x) const;
  /// rho~^2 given rho^2 and the difference (for callers that already have rho^2).
  double from_rho2(double rho2, const RVec& x) const;

  const FakeDistanceParams& params() const { return params_; }
  const Lattice& lattice() const { return lattice_; }
  std::uint64_t hash() const;

 private:
  Lattice lattice_;
  FakeDistanceParams params_;
  double inj_;
  RVec mu1_;
};

// ---------------------------------------------------------------------------

template <class F>
void Lattice::enumerate_box(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& inv, const RVec& center,
                            double radius, F&& f) {
  const int d = static_cast<int>(basis.rows());
  RVec a = (center.transpose() * inv).transpose();
  int lo[2 * kMaxDim];
  int hi[2 * kMaxDim];
  for (int i = 0; i < d; ++i) {
    const double span = radius * inv.col(i).norm();
    lo[i] = static_cast<int>(std::floor(a[i] - span));
    hi[i] = static_cast<int>(std::ceil(a[i] + span));
  }
  int k[2 * kMaxDim];
  for (int i = 0; i < d; ++i) k[i] = lo[i];
  const double r2 = radius * radius;
  RVec lambda(d);
  while (true) {
    lambda.setZero();
    for (int i = 0; i < d; ++i) lambda += static_cast<double>(k[i]) * basis.row(i).transpose();
    if ((lambda - center).squaredNorm() <= r2) f(lambda);
    int i = 0;
    while (i < d && k[i] == hi[i]) {
      k[i] = lo[i];
      ++i;
    }
    if (i == d) break;
    ++k[i];
  }
}

template <class F>
void Lattice::for_each_near(const RVec& center, double radius, F&& f) const {
  enumerate_box(basis_, inverse_, center, radius, std::forward<F>(f));
}

template <class F>
void Lattice::for_each_dual_near(const RVec& center, double radius, F&& f) const {
  enumerate_box(dual_, dual_inverse_, center, radius, std::forward<F>(f));
}

}  // namespace holofg
