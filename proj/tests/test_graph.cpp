#include <numeric>
#include <random>

#include "doctest.h"
#include "holofg/graph.hpp"

using namespace holofg;

namespace {
Lattice skew2() {
  return Lattice::from_complex_rows({{1.0, 0.0}, {{0.2, 0.9}, 0.1}, {0.0, 1.0}, {0.3, {0.1, 1.2}}});
}

GraphAssignment make(int nv, std::vector<Edge> edges, int n, std::vector<std::vector<MultiIndex>> slots = {}) {
  GraphAssignment a;
  a.graph.num_vertices = nv;
  a.graph.edges = std::move(edges);
  a.slot_map = GraphAssignment::default_slot_map(a.graph);
  for (int v = 0; v < nv; ++v) {
    LagrangianDensity d;
    if (!slots.empty()) {
      d.slots = slots[v];
    } else {
      d.slots.assign(a.graph.degree(v), MultiIndex(n, 0));
    }
    a.densities.push_back(d);
  }
  return a;
}

RVec random_point(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RVec x(2 * n);
  for (int i = 0; i < 2 * n; ++i) x[i] = u(rng);
  return x;
}
}  // namespace

TEST_CASE("validation") {
  auto banana = make(2, {{0, 1}, {0, 1}, {0, 1}, {0, 1}}, 2);
  CHECK(validate(banana, 2, 4).ok);

  auto bad = banana;
  bad.densities[0].slots.pop_back();
  const auto d = validate(bad, 2, 4);
  CHECK_FALSE(d.ok);
  CHECK(d.message.find("density degree 3") != std::string::npos);

  auto dangling = banana;
  dangling.graph.edges[2].head = 5;
  const auto d2 = validate(dangling, 2, 4);
  CHECK_FALSE(d2.ok);
  CHECK(d2.message.find("head index") != std::string::npos);

  auto repeated = banana;
  repeated.slot_map[0][1] = repeated.slot_map[0][0];
  CHECK_FALSE(validate(repeated, 2, 4).ok);

  auto too_deep = banana;
  too_deep.densities[1].slots[0] = {3, 2};
  CHECK_FALSE(validate(too_deep, 2, 4).ok);
}

TEST_CASE("degree selection") {
  CHECK(degree_selection({2, {{0, 1}}}, 1) == TypeVerdict::ZeroByType);
  CHECK(degree_selection({1, {{0, 0}}}, 1) == TypeVerdict::ZeroByType);
  CHECK(degree_selection({1, {{0, 0}, {0, 0}}}, 2) == TypeVerdict::Admissible);
  CHECK(degree_selection({2, {{0, 1}, {0, 1}, {0, 1}, {0, 1}}}, 2) == TypeVerdict::Admissible);
  CHECK(degree_selection({2, {{0, 1}, {1, 0}, {0, 1}}}, 3) == TypeVerdict::Admissible);
}

TEST_CASE("zero-by-type integrand is constantly zero") {
  const Propagator p(Lattice::square(1));
  const GraphIntegrand g(make(2, {{0, 1}}, 1), p);
  CHECK(g.verdict() == TypeVerdict::ZeroByType);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) CHECK(g({random_point(rng, 1), random_point(rng, 1)}) == cplx{});
}

TEST_CASE("single edge assembles to the propagator") {
  std::mt19937_64 rng(2);
  for (int n : {1, 2}) {
    const Propagator p(n == 1 ? Lattice::square(1) : skew2());
    const GraphIntegrand g(make(2, {{1, 0}}, n), p);
    const RVec z = random_point(rng, n), w = random_point(rng, n);
    // edge tail = 1, head = 0: P(z_0, z_1)
    CHECK(max_abs_difference(g.form({z, w}), p.eval(z, w, {}, {}, 0, 1).form) == 0.0);
  }
}

TEST_CASE("derivatives follow the slot map") {
  const Propagator p(skew2());
  auto a = make(2, {{0, 1}, {0, 1}}, 2, {{{1, 0}, {0, 0}}, {{0, 0}, {0, 2}}});
  const GraphIntegrand g(a, p);
  CHECK(g.edge_derivatives(0) == std::pair<MultiIndex, MultiIndex>{{0, 0}, {1, 0}});
  CHECK(g.edge_derivatives(1) == std::pair<MultiIndex, MultiIndex>{{0, 2}, {0, 0}});
  // swapping the slot assignment at vertex 0 moves the derivative to edge 1
  a.slot_map[0] = {a.slot_map[0][1], a.slot_map[0][0]};
  const GraphIntegrand h(a, p);
  CHECK(h.edge_derivatives(1) == std::pair<MultiIndex, MultiIndex>{{0, 2}, {1, 0}});
}

TEST_CASE("edge transpositions flip the sign of degree-one products") {
  const Propagator p(skew2());
  std::mt19937_64 rng(3);
  const std::vector<RVec> pts{random_point(rng, 2), random_point(rng, 2), random_point(rng, 2)};
  // three distinct edges so the product is nonzero below top degree
  const GraphIntegrand g(make(3, {{0, 1}, {1, 2}}, 2), p);
  const GraphIntegrand h(make(3, {{1, 2}, {0, 1}}, 2), p);
  const auto f = g.form(pts), fs = h.form(pts);
  CHECK_FALSE(f.is_zero());
  CHECK(max_abs_difference(f, -1.0 * fs) <= 1e-14);
  // brute force on the forms algebra
  const auto e0 = p.eval(pts[1], pts[0], {}, {}, 1, 0).form;
  const auto e1 = p.eval(pts[2], pts[1], {}, {}, 2, 1).form;
  CHECK(max_abs_difference(f, wedge(e0, e1)) <= 1e-14);
}

TEST_CASE("vertex relabeling") {
  const Propagator p(skew2());
  std::mt19937_64 rng(4);
  const std::vector<RVec> pts{random_point(rng, 2), random_point(rng, 2), random_point(rng, 2)};
  const GraphIntegrand g(make(3, {{0, 1}, {1, 2}, {2, 0}}, 2), p);
  // permutation sigma: old vertex v becomes sigma[v]
  const std::vector<int> sigma{2, 0, 1};
  const GraphIntegrand h(make(3, {{2, 0}, {0, 1}, {1, 2}}, 2), p);
  std::vector<RVec> moved(3);
  for (int v = 0; v < 3; ++v) moved[sigma[v]] = pts[v];
  CHECK(max_abs_difference(h.form(moved), g.form(pts).relabel(sigma)) <= 1e-14);
  CHECK(std::abs(h(moved)) == std::abs(g(pts)));
}

TEST_CASE("linearity in vertex coefficients") {
  const Propagator p(skew2());
  std::mt19937_64 rng(5);
  auto a = make(3, {{0, 1}, {1, 2}}, 2);
  const std::vector<RVec> pts{random_point(rng, 2), random_point(rng, 2), random_point(rng, 2)};
  const auto base = GraphIntegrand(a, p).form(pts);
  a.densities[1].coefficient.constant = cplx(2.0, -1.0);
  CHECK(max_abs_difference(GraphIntegrand(a, p).form(pts), cplx(2.0, -1.0) * base) <= 1e-14);
  a.densities[2].coefficient.evaluator = [](const RVec& z) { return cplx(z[0], 0.0); };
  CHECK_FALSE(GraphIntegrand(a, p).translation_invariant());
  CHECK(max_abs_difference(GraphIntegrand(a, p).form(pts), pts[2][0] * cplx(2.0, -1.0) * base) <= 1e-14);
}

TEST_CASE("coincident endpoints are rejected") {
  const Propagator p(skew2());
  const GraphIntegrand g(make(2, {{0, 1}, {0, 1}, {0, 1}, {0, 1}}, 2), p);
  RVec z = RVec::Zero(4);
  z[0] = 0.3;
  CHECK_THROWS_AS(g({z, z}), std::invalid_argument);
  CHECK_THROWS_AS(g({z, RVec(z + p.lattice().basis().row(1).transpose())}), std::invalid_argument);
}

TEST_CASE("admissible flat-torus graphs have vanishing top density") {
  // Each edge form lies in the algebra generated by the n(k-1)-dimensional
  // span of differences dzbar_{h,i} - dzbar_{t,i}, which has no top component.
  std::mt19937_64 rng(6);
  const Propagator p2(skew2(), {0.2, 1e-12, 2});
  const GraphIntegrand banana(make(2, {{0, 1}, {0, 1}, {0, 1}, {0, 1}}, 2), p2);
  const GraphIntegrand loops(make(1, {{0, 0}, {0, 0}}, 2), p2);
  auto deriv = make(2, {{0, 1}, {1, 0}, {0, 1}, {0, 1}}, 2,
                    {{{1, 0}, {0, 0}, {0, 1}, {0, 0}}, {{0, 0}, {2, 0}, {0, 0}, {1, 1}}});
  const GraphIntegrand banana_d(deriv, p2);
  for (int i = 0; i < 20; ++i) {
    const RVec z = random_point(rng, 2), w = random_point(rng, 2);
    CHECK(banana({z, w}) == cplx{});
    CHECK(banana_d({z, w}) == cplx{});
    CHECK(loops({z}) == cplx{});
  }
  const Lattice l3 = Lattice::square(3);
  const Propagator p3(l3, {0.1, 1e-6, 0});
  const GraphIntegrand theta(make(2, {{0, 1}, {1, 0}, {0, 1}}, 3), p3);
  CHECK(theta.verdict() == TypeVerdict::Admissible);
  CHECK(std::abs(theta({random_point(rng, 3), random_point(rng, 3)})) <= 1e-15);
}
