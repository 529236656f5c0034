#include "holofg/lattice.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <stdexcept>

#include "holofg/hash.hpp"

namespace holofg {

cplx complex_coord(const RVec& x, int i) { return {x[2 * i], x[2 * i + 1]}; }

RVec from_complex(std::span<const cplx> z) {
  RVec x(2 * static_cast<int>(z.size()));
  for (std::size_t i = 0; i < z.size(); ++i) {
    x[2 * i] = z[i].real();
    x[2 * i + 1] = z[i].imag();
  }
  return x;
}

Lattice::Lattice(int n, std::span<const double> basis_row_major) : n_(n) {
  if (n < 1 || n > kMaxDim) throw std::invalid_argument("lattice: complex dimension out of range");
  const int d = 2 * n;
  if (static_cast<int>(basis_row_major.size()) != d * d)
    throw std::invalid_argument("lattice: basis must be a 2n x 2n matrix");
  basis_.resize(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) basis_(r, c) = basis_row_major[r * d + c];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(basis_);
  covolume_ = std::abs(basis_.determinant());
  if (!lu.isInvertible() || !(covolume_ > 0.0)) throw std::invalid_argument("lattice: basis is singular");
  inverse_ = basis_.inverse();
  dual_ = 2.0 * kPi * inverse_.transpose();
  dual_inverse_ = dual_.inverse();

  // Every nonzero vector is at least the smallest singular value long in
  // coefficient norm 1, so a search up to the shortest basis vector suffices.
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < d; ++r) best = std::min(best, basis_.row(r).norm());
  RVec origin = RVec::Zero(d);
  enumerate_box(basis_, inverse_, origin, best, [&](const RVec& v) {
    const double len = v.norm();
    if (len > 0.0) best = std::min(best, len);
  });
  shortest_ = best;
}

Lattice Lattice::square(int n) {
  std::vector<double> b(4 * n * n, 0.0);
  for (int i = 0; i < 2 * n; ++i) b[i * 2 * n + i] = 1.0;
  return Lattice(n, b);
}

Lattice Lattice::from_complex_rows(const std::vector<std::vector<cplx>>& rows) {
  const int d = static_cast<int>(rows.size());
  if (d % 2 != 0 || d == 0) throw std::invalid_argument("lattice: need 2n complex basis rows");
  const int n = d / 2;
  std::vector<double> b;
  b.reserve(d * d);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("lattice: complex row of wrong length");
    for (const cplx& v : row) {
      b.push_back(v.real());
      b.push_back(v.imag());
    }
  }
  return Lattice(n, b);
}

double parallelepiped_radius(const Eigen::MatrixXd& basis) {
  const int d = static_cast<int>(basis.rows());
  double best = 0.0;
  for (int mask = 0; mask < (1 << d); ++mask) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(basis.cols());
    for (int i = 0; i < d; ++i) v += ((mask >> i) & 1 ? 0.5 : -0.5) * basis.row(i).transpose();
    best = std::max(best, v.norm());
  }
  return best;
}

double Lattice::covering_radius_bound() const { return parallelepiped_radius(basis_); }

Lattice Lattice::scaled(double s) const {
  if (!(s > 0.0)) throw std::invalid_argument("lattice: scale must be positive");
  const int d = real_dim();
  std::vector<double> b(d * d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) b[r * d + c] = s * basis_(r, c);
  return Lattice(n_, b);
}

std::uint64_t Lattice::hash() const {
  Fnv1a h;
  h.add(static_cast<std::int64_t>(n_));
  for (int r = 0; r < basis_.rows(); ++r)
    for (int c = 0; c < basis_.cols(); ++c) h.add(basis_(r, c));
  return h.value();
}

RVec Lattice::coefficients(const RVec& x) const { return (x.transpose() * inverse_).transpose(); }

RVec Lattice::from_coefficients(const RVec& c) const { return (c.transpose() * basis_).transpose(); }

namespace {
std::vector<RVec> sorted_ball(const std::vector<RVec>& in) {
  std::vector<RVec> out = in;
  std::stable_sort(out.begin(), out.end(),
                   [](const RVec& a, const RVec& b) { return a.squaredNorm() < b.squaredNorm(); });
  return out;
}
}  // namespace

std::vector<RVec> Lattice::vectors_within(double radius) const {
  std::vector<RVec> v;
  for_each_near(RVec::Zero(real_dim()), radius, [&](const RVec& l) { v.push_back(l); });
  return sorted_ball(v);
}

std::vector<RVec> Lattice::dual_vectors_within(double radius) const {
  std::vector<RVec> v;
  for_each_dual_near(RVec::Zero(real_dim()), radius, [&](const RVec& l) { v.push_back(l); });
  return sorted_ball(v);
}

TorusPoint reduce(const RVec& point, const Lattice& lattice) {
  RVec c = lattice.coefficients(point);
  for (int i = 0; i < c.size(); ++i) {
    const double k = std::round(c[i]);
    if (std::abs(c[i] - k) < 1e-13) {
      c[i] = 0.0;
    } else {
      c[i] -= std::floor(c[i]);
    }
  }
  return {lattice.from_coefficients(c)};
}

RVec centered_difference(const RVec& x, const Lattice& lattice) {
  RVec c = lattice.coefficients(x);
  for (int i = 0; i < c.size(); ++i) c[i] = std::round(c[i]);
  return x - lattice.from_coefficients(c);
}

RVec minimal_image(const RVec& x, const Lattice& lattice) {
  const RVec d = centered_difference(x, lattice);
  // The minimiser lambda satisfies |d - lambda| <= |d|, hence |lambda| <= 2|d|.
  const double radius = std::min(2.0 * d.norm(), lattice.cell_diameter_bound() + d.norm());
  RVec best = d;
  double best2 = d.squaredNorm();
  lattice.for_each_near(RVec::Zero(d.size()), radius, [&](const RVec& l) {
    const double r2 = (d - l).squaredNorm();
    if (r2 < best2) {
      best2 = r2;
      best = d - l;
    }
  });
  return best;
}

double distance_squared(const RVec& z, const RVec& w, const Lattice& lattice) {
  return minimal_image(z - w, lattice).squaredNorm();
}

double injectivity_radius(const Lattice& lattice) { return 0.5 * lattice.shortest_vector(); }

double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double smoothstep_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  const double da = a / (x * x);
  const double db = -b / ((1.0 - x) * (1.0 - x));
  return (da * b - a * db) / ((a + b) * (a + b));
}

FakeDistance::FakeDistance(const Lattice& lattice, FakeDistanceParams params)
    : lattice_(lattice), params_(params), inj_(injectivity_radius(lattice)) {
  if (!(params.r0 > 0.0) || !(params.r1 > params.r0))
    throw std::invalid_argument("fake distance: need 0 < r0 < r1");
  if (!(params.r1 < inj_)) throw std::invalid_argument("fake distance: r1 must be below the injectivity radius");
  if (!(params.plateau > 0.0)) throw std::invalid_argument("fake distance: plateau must be positive");
  if (!(params.bump_amplitude >= 0.0)) throw std::invalid_argument("fake distance: bump amplitude must be >= 0");
  mu1_ = lattice.dual_basis().row(0).transpose();
}

double FakeDistance::from_rho2(double rho2, const RVec& x) const {
  const double r02 = params_.r0 * params_.r0;
  const double r12 = params_.r1 * params_.r1;
  double value;
  if (rho2 <= r02) {
    value = rho2;
  } else {
    const double phi = 1.0 - smoothstep((rho2 - r02) / (r12 - r02));
    value = phi * rho2 + (1.0 - phi) * params_.plateau;
  }
  if (params_.bump_amplitude > 0.0 && rho2 > r12) {
    const double top = 0.5 * (r12 + inj_ * inj_);
    const double psi = smoothstep((rho2 - r12) / (top - r12));
    value += params_.bump_amplitude * psi * (1.0 + 0.5 * std::cos(mu1_.dot(x)));
  }
  return value;
}

double FakeDistance::of_difference(const RVec& x) const {
  return from_rho2(minimal_image(x, lattice_).squaredNorm(), x);
}

double FakeDistance::operator()(const RVec& z, const RVec& w) const { return of_difference(z - w); }

std::uint64_t FakeDistance::hash() const {
  Fnv1a h;
  h.add(lattice_.hash());
  h.add(params_.r0);
  h.add(params_.r1);
  h.add(params_.plateau);
  h.add(params_.bump_amplitude);
  h.add(static_cast<std::int64_t>(kCutoffProfileVersion));
  return h.value();
}

}  // namespace holofg
