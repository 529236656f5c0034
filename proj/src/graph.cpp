#include "holofg/graph.hpp"

#include <algorithm>
#include <stdexcept>

#include "holofg/hash.hpp"

namespace holofg {

int DirectedGraph::degree(int v) const {
  int d = 0;
  for (const Edge& e : edges) d += (e.tail == v) + (e.head == v);
  return d;
}

std::vector<std::vector<HalfEdge>> GraphAssignment::default_slot_map(const DirectedGraph& g) {
  std::vector<std::vector<HalfEdge>> map(std::max(0, g.num_vertices));
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    const Edge& ed = g.edges[e];
    if (ed.tail >= 0 && ed.tail < g.num_vertices) map[ed.tail].push_back({e, false});
    if (ed.head >= 0 && ed.head < g.num_vertices) map[ed.head].push_back({e, true});
  }
  return map;
}

Diagnostics validate(const GraphAssignment& a, int n, int max_deriv) {
  const DirectedGraph& g = a.graph;
  auto fail = [](std::string m) { return Diagnostics{false, std::move(m)}; };
  if (g.num_vertices < 1) return fail("graph has no vertices");
  if (static_cast<int>(g.num_vertices) > kMaxLabels) return fail("too many vertices");
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const Edge& ed = g.edges[e];
    if (ed.tail < 0 || ed.tail >= g.num_vertices)
      return fail("edge " + std::to_string(e) + ": tail index " + std::to_string(ed.tail) + " out of range");
    if (ed.head < 0 || ed.head >= g.num_vertices)
      return fail("edge " + std::to_string(e) + ": head index " + std::to_string(ed.head) + " out of range");
  }
  if (static_cast<int>(a.densities.size()) != g.num_vertices) return fail("need one density per vertex");
  if (static_cast<int>(a.slot_map.size()) != g.num_vertices) return fail("need one slot map per vertex");
  for (int v = 0; v < g.num_vertices; ++v) {
    const LagrangianDensity& d = a.densities[v];
    const int deg = g.degree(v);
    if (d.degree() != deg)
      return fail("vertex " + std::to_string(v) + ": density degree " + std::to_string(d.degree()) +
                  " but vertex degree " + std::to_string(deg));
    for (const MultiIndex& m : d.slots) {
      if (!m.empty() && static_cast<int>(m.size()) != n)
        return fail("vertex " + std::to_string(v) + ": slot multi-index has wrong length");
      int order = 0;
      for (int x : m) {
        if (x < 0) return fail("vertex " + std::to_string(v) + ": negative derivative order");
        order += x;
      }
      if (order > max_deriv) return fail("vertex " + std::to_string(v) + ": derivative order exceeds max_deriv");
    }
    const auto& slots = a.slot_map[v];
    if (static_cast<int>(slots.size()) != deg) return fail("vertex " + std::to_string(v) + ": slot map size mismatch");
    std::vector<HalfEdge> seen;
    for (const HalfEdge& h : slots) {
      if (h.edge < 0 || h.edge >= static_cast<int>(g.edges.size()))
        return fail("vertex " + std::to_string(v) + ": slot map names a missing edge");
      const Edge& ed = g.edges[h.edge];
      if ((h.at_head ? ed.head : ed.tail) != v)
        return fail("vertex " + std::to_string(v) + ": slot map names a half-edge of another vertex");
      if (std::find(seen.begin(), seen.end(), h) != seen.end())
        return fail("vertex " + std::to_string(v) + ": slot map repeats a half-edge");
      seen.push_back(h);
    }
  }
  return {};
}

TypeVerdict degree_selection(const DirectedGraph& g, int n) {
  const long lhs = static_cast<long>(g.edges.size()) * (n - 1);
  const long rhs = static_cast<long>(n) * g.num_vertices;
  return lhs == rhs ? TypeVerdict::Admissible : TypeVerdict::ZeroByType;
}

std::uint64_t graph_hash(const GraphAssignment& a) {
  Fnv1a h;
  h.add(static_cast<std::int64_t>(a.graph.num_vertices));
  for (const Edge& e : a.graph.edges) {
    h.add(static_cast<std::int64_t>(e.tail));
    h.add(static_cast<std::int64_t>(e.head));
  }
  for (std::size_t v = 0; v < a.densities.size(); ++v) {
    const auto& d = a.densities[v];
    h.add(static_cast<std::int64_t>(d.slots.size()));
    for (const auto& m : d.slots) {
      h.add(static_cast<std::int64_t>(m.size()));
      for (int x : m) h.add(static_cast<std::int64_t>(x));
    }
    h.add(d.coefficient.constant.real());
    h.add(d.coefficient.constant.imag());
    h.add(static_cast<std::int64_t>(d.coefficient.is_constant()));
  }
  for (const auto& slots : a.slot_map)
    for (const HalfEdge& s : slots) {
      h.add(static_cast<std::int64_t>(s.edge));
      h.add(static_cast<std::int64_t>(s.at_head));
    }
  return h.value();
}

GraphIntegrand::GraphIntegrand(GraphAssignment assignment, const Propagator& propagator)
    : assignment_(std::move(assignment)), propagator_(&propagator) {
  const Diagnostics d = validate(assignment_, propagator.n(), propagator.options().max_deriv);
  if (!d.ok) throw std::invalid_argument("graph: " + d.message);
  verdict_ = degree_selection(assignment_.graph, propagator.n());
  const int ne = static_cast<int>(assignment_.graph.edges.size());
  derivs_.resize(ne);
  for (int v = 0; v < assignment_.graph.num_vertices; ++v) {
    const auto& slots = assignment_.slot_map[v];
    for (std::size_t s = 0; s < slots.size(); ++s) {
      const MultiIndex& m = assignment_.densities[v].slots[s];
      if (slots[s].at_head)
        derivs_[slots[s].edge].first = m;
      else
        derivs_[slots[s].edge].second = m;
    }
  }
}

std::pair<MultiIndex, MultiIndex> GraphIntegrand::edge_derivatives(int e) const { return derivs_.at(e); }

bool GraphIntegrand::translation_invariant() const {
  return std::all_of(assignment_.densities.begin(), assignment_.densities.end(),
                     [](const LagrangianDensity& d) { return d.coefficient.is_constant(); });
}

MultiPointForm GraphIntegrand::form(const std::vector<RVec>& points) const {
  const int k = num_vertices();
  if (static_cast<int>(points.size()) != k) throw std::invalid_argument("graph: wrong number of points");
  cplx coef = 1.0;
  for (int v = 0; v < k; ++v) coef *= assignment_.densities[v].coefficient(points[v]);
  MultiPointForm f = MultiPointForm::scalar(coef);
  const auto& edges = assignment_.graph.edges;
  for (std::size_t e = 0; e < edges.size() && !f.is_zero(); ++e) {
    const Edge& ed = edges[e];
    const auto& [dz, dw] = derivs_[e];
    MultiPointForm pe;
    if (ed.head == ed.tail) {
      pe = propagator_->diagonal_pullback(points[ed.head], dz, dw, ed.head);
    } else {
      if (distance_squared(points[ed.head], points[ed.tail], propagator_->lattice()) == 0.0)
        throw std::invalid_argument("graph: coincident endpoints on edge " + std::to_string(e));
      pe = propagator_->eval(points[ed.head], points[ed.tail], dz, dw, ed.head, ed.tail).form;
    }
    f = wedge(f, pe);
  }
  return f;
}

cplx GraphIntegrand::operator()(const std::vector<RVec>& points) const {
  if (verdict_ == TypeVerdict::ZeroByType) return 0.0;
  return top_density(form(points), num_vertices(), n());
}

}  // namespace holofg
