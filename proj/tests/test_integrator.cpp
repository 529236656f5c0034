#include <doctest.h>

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "holofg/integrator.hpp"
#include "holofg/pv.hpp"

using namespace holofg;

namespace {

GraphAssignment make(int nv, std::vector<Edge> edges, int n) {
  GraphAssignment a;
  a.graph.num_vertices = nv;
  a.graph.edges = std::move(edges);
  a.slot_map = GraphAssignment::default_slot_map(a.graph);
  for (int v = 0; v < nv; ++v) a.densities.push_back({std::vector<MultiIndex>(a.graph.degree(v), MultiIndex(n, 0)), {}});
  return a;
}

Lattice skew2() {
  return Lattice::from_complex_rows({{1.0, 0.0}, {{0.2, 0.9}, 0.1}, {0.0, 1.0}, {0.3, {0.1, 1.2}}});
}

/// Density of a function of the minimal-image difference x_1 - x_0.
ConfigIntegrand pair_density(const Lattice& lat, std::function<cplx(const RVec&)> g) {
  ConfigIntegrand c;
  c.num_vertices = 2;
  c.lattice = &lat;
  c.density = [&lat, g](const std::vector<RVec>& p) { return g(minimal_image(p[1] - p[0], lat)); };
  c.translation_invariant = true;
  c.singular_pairs = {{0, 1}};
  return c;
}

}  // namespace

TEST_CASE("schedule validation") {
  CHECK(CutoffSchedule{1e-2, 0.5, 4}.values() == std::vector<double>{1e-2, 5e-3, 2.5e-3, 1.25e-3});
  CHECK_THROWS_AS((CutoffSchedule{1e-2, 0.5, 3}.values()), std::invalid_argument);
  CHECK_THROWS_AS((CutoffSchedule{1e-2, 1.5, 5}.values()), std::invalid_argument);
  CHECK_THROWS_AS((CutoffSchedule{-1.0, 0.5, 5}.values()), std::invalid_argument);
}

TEST_CASE("constant density: removed discs are exact") {
  const Lattice lat = Lattice::square(1);
  const FakeDistance fd(lat, {});
  const auto f = pair_density(lat, [](const RVec&) { return cplx(1.0); });
  IntegrationStrategy s;
  s.samples = 1 << 15;
  for (double eps : {1e-2, 1e-3}) {
    const Estimate e = cutoff_integral(f, fd, eps, s);
    // rho~^2 = rho^2 below r0^2, so the excluded set is a disc of area pi eps
    const double exact = 1.0 - kPi * eps;
    CHECK(std::abs(e.value - exact) < 4.0 * e.stat_error + 1e-12);
    CHECK(e.stat_error < 1e-2);
  }
  IntegrationStrategy grid;
  grid.backend = Backend::Quadrature;
  grid.quadrature_order = 16;
  const Estimate q = cutoff_integral(f, fd, 1e-9, grid);
  CHECK(std::abs(q.value - 1.0) < 1e-12);
}

TEST_CASE("singular density with known integral") {
  // |u|^{-3} on |u| < 0.15 in C^2: 2 pi^2 (0.15 - sqrt(eps)) per unit covolume.
  const Lattice lat = Lattice::square(2);
  const FakeDistance fd(lat, {});
  const auto f = pair_density(lat, [](const RVec& u) {
    const double r = u.norm();
    return cplx(r < 0.15 ? std::pow(r, -3) : 0.0);
  });
  IntegrationStrategy s;
  s.samples = 1 << 16;
  s.angular_copies = 1;
  const Estimate e = cutoff_integral(f, fd, 1e-4, s);
  const double exact = 2.0 * kPi * kPi * (0.15 - 1e-2);
  CHECK(std::abs(e.value - exact) < 4.0 * e.stat_error);
  CHECK(e.stat_error < 2e-2 * exact);

  IntegrationStrategy twice = s;
  twice.samples *= 2;
  twice.seed = 99;
  const Estimate e2 = cutoff_integral(f, fd, 1e-4, twice);
  CHECK(std::abs(e.value - e2.value) < 3.0 * std::hypot(e.stat_error, e2.stat_error));
}

TEST_CASE("determinism across threads and chunking") {
  const Lattice lat = Lattice::square(1);
  const FakeDistance fd(lat, {});
  const auto f = pair_density(lat, [](const RVec& u) { return cplx(u[0], u[1]) / (u.squaredNorm() + 0.01); });
  IntegrationStrategy s;
  s.samples = 20000;
  s.chunk = 1000;
  const auto a = graph_integral(f, fd, {1e-2, 0.5, 5}, s);
  s.threads = 4;
  const auto b = graph_integral(f, fd, {1e-2, 0.5, 5}, s);
  for (std::size_t k = 0; k < a.per_eps.size(); ++k) {
    CHECK(a.per_eps[k].value == b.per_eps[k].value);
    CHECK(a.per_eps[k].stat_error == b.per_eps[k].stat_error);
  }
  CHECK(a.value == b.value);
  s.seed = 2;
  const auto c = graph_integral(f, fd, {1e-2, 0.5, 5}, s);
  CHECK(c.per_eps[0].value != a.per_eps[0].value);
}

TEST_CASE("zero-by-type and empty regions") {
  const Lattice lat = Lattice::square(2);
  const Propagator p(lat, {0.2, 1e-10, 0});
  const GraphIntegrand g(make(2, {{0, 1}}, 2), p);
  REQUIRE(g.verdict() == TypeVerdict::ZeroByType);
  const FakeDistance fd(lat, {});
  const auto r = graph_integral(ConfigIntegrand::from_graph(g), fd, {1e-2, 0.5, 4}, {});
  CHECK(r.value == cplx(0.0));
  CHECK(r.stat_error == 0.0);
  for (const auto& e : r.per_eps) CHECK(e.value == cplx(0.0));

  const auto one = pair_density(lat, [](const RVec&) { return cplx(1.0); });
  const double bound = product_distance_bound(fd, 2);
  const Estimate e = cutoff_integral(one, fd, 1.01 * bound, {});
  CHECK(e.empty_region);
  CHECK(e.value == cplx(0.0));
  CHECK_FALSE(e.warning.empty());
}

TEST_CASE("pinning needs translation invariance") {
  const Lattice lat = Lattice::square(1);
  const FakeDistance fd(lat, {});
  auto f = pair_density(lat, [](const RVec&) { return cplx(1.0); });
  f.translation_invariant = false;
  CHECK_THROWS_AS(cutoff_integral(f, fd, 1e-2, {}), std::invalid_argument);
  IntegrationStrategy free;
  free.pin_vertex = false;
  free.samples = 1 << 14;
  const Estimate e = cutoff_integral(f, fd, 1e-2, free);
  CHECK(std::abs(e.value - (1.0 - kPi * 1e-2)) < 4.0 * e.stat_error);
}

TEST_CASE("self-loop graph: exactly flat sweep") {
  const Lattice lat = skew2();
  const Propagator p(lat, {0.1, 1e-8, 0});
  const GraphIntegrand g(make(1, {{0, 0}, {0, 0}}, 2), p);
  REQUIRE(g.verdict() == TypeVerdict::Admissible);
  const auto f = ConfigIntegrand::from_graph(g);
  const FakeDistance fd1(lat, {}), fd2(lat, {0.15, 0.25, 0.05, 0.0});
  IntegrationStrategy s;
  s.samples = 256;
  const auto rep = invariance_suite(f, {fd1, fd2}, {1e-2, 0.5, 5}, s);
  CHECK(rep.ok);
  for (const auto& r : rep.per_fd) {
    for (const auto& e : r.per_eps) CHECK(e.value == r.per_eps.front().value);
    CHECK(r.cauchy);
  }
  // The diagonal pullback of every edge vanishes for n >= 2.
  CHECK(rep.pinned.value == cplx(0.0));
  CHECK(rep.unpinned.value == cplx(0.0));
  CHECK(rep.pinned.value * lat.covolume() == rep.unpinned.value * lat.covolume());
}

TEST_CASE("banana graph: Cauchy sweep and fake-distance independence") {
  const Lattice lat = skew2();
  const Propagator p(lat, {0.1, 1e-8, 0});
  const auto a = make(2, {{0, 1}, {0, 1}, {0, 1}, {0, 1}}, 2);
  const GraphIntegrand g(a, p);
  REQUIRE(g.verdict() == TypeVerdict::Admissible);
  const GraphIntegrand gp(permute_vertices(a, {1, 0}), p);
  const auto f = ConfigIntegrand::from_graph(g), fpm = ConfigIntegrand::from_graph(gp);
  const FakeDistance fd1(lat, {}), fd2(lat, {0.15, 0.25, 0.05, 0.02});
  IntegrationStrategy s;
  s.samples = 500;
  s.angular_copies = 2;
  const auto rep = invariance_suite(f, {fd1, fd2}, {1e-2, 0.5, 5}, s, &fpm, vertex_permutation_sign({1, 0}, 2));
  CHECK(rep.ok);
  CHECK(rep.per_fd[0].cauchy);
  CHECK(std::abs(rep.per_fd[0].value) <= 3.0 * rep.per_fd[0].stat_error + 1e-14);
}

TEST_CASE("permutation helpers") {
  CHECK(vertex_permutation_sign({1, 0}, 1) == -1);
  CHECK(vertex_permutation_sign({1, 0}, 2) == 1);
  CHECK(vertex_permutation_sign({1, 2, 0}, 3) == 1);
  CHECK(vertex_permutation_sign({0, 2, 1}, 3) == -1);
  const auto a = make(3, {{0, 1}, {1, 2}}, 1);
  const auto b = permute_vertices(a, {2, 0, 1});
  CHECK(b.graph.edges[0].tail == 2);
  CHECK(b.graph.edges[0].head == 0);
  CHECK_THROWS_AS(permute_vertices(a, {0, 0, 1}), std::invalid_argument);
}

TEST_CASE("equivalence with the defining-function principal value") {
  const Lattice lat = Lattice::square(1);
  const FakeDistance fd(lat, {});
  static constexpr double R = 0.2;
  // beta(u) = (u^2 + 0.7 ubar) exp(-|u|^2 / 2 sigma^2) on |u| < R < r0, where rho~ = rho.
  static constexpr double sigma = 0.12;
  auto beta = [](cplx u) { return (u * u + 0.7 * std::conj(u)) * std::exp(-std::norm(u) / (2 * sigma * sigma)); };
  // Only the u^2 part survives the angular integration.
  const double radial = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double r) { return r * std::exp(-r * r / (2 * sigma * sigma)); }, 0.0, R, 10, 1e-14);
  const cplx exact = kDzDzbar * 2.0 * kPi * radial;
  const auto f = pair_density(lat, [beta](const RVec& x) {
    const cplx u(x[0], x[1]);
    if (std::abs(u) >= R) return cplx(0.0);
    return kDzDzbar * beta(u) / (u * u);
  });
  PVIntegrand in;
  in.m = 1;
  in.pole = {2};
  in.logs = {0};
  in.beta.eval = [beta](std::span<const cplx> v) { return beta(R * v[0]); };
  const auto h = [&fd](std::span<const cplx> v) {
    RVec x(2);
    x << R * v[0].real(), R * v[0].imag();
    return fd.of_difference(x);
  };
  const PVResult pv = cutoff_by_defining_function(in, h, 2);
  REQUIRE(pv.converged);
  CHECK(std::abs(pv.value - exact) < 1e-10);

  IntegrationStrategy s;
  s.samples = 1 << 20;
  s.tree_mixture = 0.9;
  const auto r = graph_integral(f, fd, {1e-3, 0.5, 6}, s);
  INFO("mc " << r.value << " +- " << r.stat_error << " sys " << r.systematic << " pv " << pv.value);
  CHECK(r.cauchy);
  CHECK(std::abs(r.value - pv.value) < 1e-4);
}
