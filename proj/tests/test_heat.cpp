#include <random>

#include "doctest.h"
#include "holofg/heat.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

using namespace holofg;

namespace {
RVec c1(cplx z) {
  RVec x(2);
  x << z.real(), z.imag();
  return x;
}

RVec random_point(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RVec x(2 * n);
  for (int i = 0; i < 2 * n; ++i) x[i] = u(rng);
  return x;
}
}  // namespace

TEST_CASE("image and spectral sums agree") {
  const HeatKernel h(Lattice::square(1));
  std::mt19937_64 rng(17);
  for (double t : {0.05, 0.2, 1.0, 5.0}) {
    for (int p = 0; p < 20; ++p) {
      const RVec x = random_point(rng, 1);
      const cplx a = h.scalar(x, t, HeatMethod::Image).value;
      const cplx b = h.scalar(x, t, HeatMethod::Spectral).value;
      CHECK(std::abs(a - b) <= 1e-12);
      const auto da = h.dbar_star_components(x, t, HeatMethod::Image);
      const auto db = h.dbar_star_components(x, t, HeatMethod::Spectral);
      CHECK(std::abs(da[0].value - db[0].value) <= 1e-11);
    }
  }
}

TEST_CASE("image and spectral agree in dimension two on a skew lattice") {
  const Lattice lat = Lattice::from_complex_rows({{1.0, 0.0}, {{0.2, 0.9}, 0.1}, {0.0, 1.0}, {0.3, {0.1, 1.2}}});
  const HeatKernel h(lat);
  std::mt19937_64 rng(2);
  for (double t : {0.05, 0.5, 5.0}) {
    for (int p = 0; p < 3; ++p) {
      const RVec x = random_point(rng, 2);
      CHECK(std::abs(h.scalar(x, t, HeatMethod::Image).value - h.scalar(x, t, HeatMethod::Spectral).value) <= 1e-12);
      const auto da = h.dbar_star_components(x, t, HeatMethod::Image);
      const auto db = h.dbar_star_components(x, t, HeatMethod::Spectral);
      for (int i = 0; i < 2; ++i) CHECK(std::abs(da[i].value - db[i].value) <= 1e-11);
    }
  }
}

TEST_CASE("heat mass is conserved") {
  const HeatKernel h(Lattice::from_complex_rows({{1.0}, {{0.3, 1.1}}}));
  const Eigen::MatrixXd& B = h.lattice().basis();
  for (double t : {0.1, 1.0}) {
    const int N = 64;
    cplx sum = 0.0;
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        const RVec x = (double(i) / N) * B.row(0).transpose() + (double(j) / N) * B.row(1).transpose();
        sum += h.scalar(x, t).value;
      }
    const cplx mass = sum * h.lattice().covolume() / double(N * N);
    CHECK(std::abs(mass - 1.0) <= 1e-8);
  }
}

TEST_CASE("leading image term dominates for small t") {
  const Lattice base = Lattice::square(1);
  const double t = 0.05;
  const RVec x = c1(0.3);
  // On the unit lattice the neighbouring image still contributes exp(-4).
  const HeatKernel unit(base);
  double brute = 0.0;
  for (int a = -8; a <= 8; ++a)
    for (int b = -8; b <= 8; ++b) brute += std::exp(-((x - c1({double(a), double(b)})).squaredNorm() - 0.09) / (2 * t));
  CHECK((2 * kPi * t) * std::exp(0.09 / (2 * t)) * unit.scalar(x, t).value.real() == doctest::Approx(brute).epsilon(1e-13));
  // On 3Z + 3iZ every other image is below exp(-72).
  const HeatKernel wide(base.scaled(3.0));
  CHECK(std::abs((2 * kPi * t) * std::exp(0.09 / (2 * t)) * wide.scalar(x, t).value - 1.0) <= 1e-10);
}

TEST_CASE("dbar* heat is odd at the diagonal and the mean mode drops out") {
  const HeatKernel h(Lattice::square(1));
  for (double t : {0.01, 0.03, 0.05}) {
    CHECK(std::abs(h.dbar_star_components(c1(0.0), t, HeatMethod::Image)[0].value) <= 1e-13);
  }
  // For huge t only the mean mode survives in the scalar, and it carries no
  // derivative.
  CHECK(h.dbar_star_components(c1({0.3, 0.1}), 60.0, HeatMethod::Spectral)[0].value == cplx{});
  CHECK(h.scalar(c1({0.3, 0.1}), 60.0, HeatMethod::Spectral).value == cplx(1.0));
}

TEST_CASE("semigroup in the spectral representation") {
  const HeatKernel h(Lattice::from_complex_rows({{1.0}, {{0.3, 1.1}}}));
  const double covol = h.lattice().covolume();
  for (const RVec& mu : h.lattice().dual_vectors_within(20.0)) {
    const double lhs = h.spectral_coefficient(mu, 0.7);
    const double rhs = h.spectral_coefficient(mu, 0.3) * h.spectral_coefficient(mu, 0.4) * covol;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
  }
}

TEST_CASE("heat forms carry d^n(zbar - wbar) and swap with relabeling") {
  const Lattice lat = Lattice::from_complex_rows({{1.0, 0.0}, {{0.2, 0.9}, 0.1}, {0.0, 1.0}, {0.3, {0.1, 1.2}}});
  const HeatKernel h(lat);
  std::mt19937_64 rng(5);
  const RVec z = random_point(rng, 2), w = random_point(rng, 2);
  const auto a = h.heat_eval(z, w, 0.3);
  const auto b = h.heat_eval(w, z, 0.3, HeatMethod::Auto, 1, 0);
  CHECK(a.kernel.form.degree() == 2);
  CHECK(max_abs_difference(a.kernel.form, b.kernel.form) < 1e-13);  // (-1)^n with n = 2
  const auto d = h.dbar_star_heat(z, w, 0.3);
  CHECK(d.kernel.form.degree() == 1);
  for (int i = 0; i < 2; ++i) CHECK(wedge(difference_covector(0, 1, i), a.kernel.form).is_zero());
}

TEST_CASE("tighter truncation stays within the certified bound") {
  const Lattice lat = Lattice::from_complex_rows({{1.0}, {{0.3, 1.1}}});
  const HeatKernel loose(lat, 1e-8), tight(lat, 1e-20);
  std::mt19937_64 rng(8);
  for (double t : {0.05, 0.3, 3.0}) {
    const RVec x = random_point(rng, 1);
    for (auto m : {HeatMethod::Image, HeatMethod::Spectral}) {
      const auto a = loose.scalar(x, t, m);
      const auto b = tight.scalar(x, t, m);
      CHECK(std::abs(a.value - b.value) <= a.tail_bound + b.tail_bound + 1e-15);
      CHECK(b.terms >= a.terms);
    }
  }
  CHECK_THROWS_AS(HeatKernel(lat, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(loose.scalar(c1(0.1), 0.0), std::invalid_argument);
}

TEST_CASE("schwinger moment") {
  CHECK(schwinger_moment(2, 2.0) == doctest::Approx(1.0));
  CHECK(schwinger_moment(3, 2.0) == doctest::Approx(1.0));
  CHECK(schwinger_moment(2, 0.5) == doctest::Approx(4.0));
  boost::math::quadrature::exp_sinh<double> q;
  for (int m : {2, 3, 4})
    for (double u : {0.01, 0.1, 0.5, 1.0, 4.0}) {
      // substitute t = 1/s so the integrand decays at infinity
      auto f = [=](double s) { return std::exp(-u * s / 2.0) * std::pow(s, m - 2); };
      const double num = q.integrate(f, 0.0, std::numeric_limits<double>::infinity());
      CHECK(schwinger_moment(m, u) == doctest::Approx(num).epsilon(1e-10));
    }
  CHECK_THROWS_AS(schwinger_moment(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(schwinger_moment(2, 0.0), std::invalid_argument);
}
