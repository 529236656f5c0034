#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "holofg/forms.hpp"
#include "holofg/propagator.hpp"

namespace holofg {

struct Edge {
  int tail;
  int head;
};

/// Ordered vertices 0..num_vertices-1 and ordered edges; self-loops allowed.
struct DirectedGraph {
  int num_vertices = 0;
  std::vector<Edge> edges;

  /// Number of incident half-edges (a self-loop counts twice).
  int degree(int v) const;
};

/// One end of an edge.
struct HalfEdge {
  int edge;
  bool at_head;
  friend bool operator==(const HalfEdge&, const HalfEdge&) = default;
};

/// Holomorphic vertex coefficient. A null evaluator means the constant.
struct VertexCoefficient {
  cplx constant = 1.0;
  std::function<cplx(const RVec&)> evaluator;

  cplx operator()(const RVec& z) const { return evaluator ? evaluator(z) : constant; }
  bool is_constant() const { return !evaluator; }
};

/// Degree-k holomorphic Lagrangian density: k slots, each a derivative
/// multi-index applied to the field leg plugged into it.
struct LagrangianDensity {
  std::vector<MultiIndex> slots;
  VertexCoefficient coefficient;

  int degree() const { return static_cast<int>(slots.size()); }
};

/// Graph, one density per vertex, and for each vertex the half-edge that
/// occupies each slot: slot_map[v][s].
struct GraphAssignment {
  DirectedGraph graph;
  std::vector<LagrangianDensity> densities;
  std::vector<std::vector<HalfEdge>> slot_map;

  /// Slot map that fills the slots of each vertex with its half-edges in
  /// edge order (tail end before head end for self-loops).
  static std::vector<std::vector<HalfEdge>> default_slot_map(const DirectedGraph& g);
};

struct Diagnostics {
  bool ok = true;
  std::string message;
};

/// Checks index ranges, density degrees, multi-index sizes and bounds, and
/// that every slot map is a bijection onto the vertex's half-edges.
Diagnostics validate(const GraphAssignment& a, int n, int max_deriv);

enum class TypeVerdict { ZeroByType, Admissible };

/// |E| (n - 1) == n |V| is necessary for a nonzero top component.
TypeVerdict degree_selection(const DirectedGraph& g, int n);

std::uint64_t graph_hash(const GraphAssignment& a);

/// Integrand on M^{V}: the Lebesgue density of (prod_v Omega_v) ^ (wedge_e P_e)
/// times prod_v coefficient_v, with P_e evaluated at (z_head, z_tail) and
/// derivative orders taken from the slots of its two half-edges.
class GraphIntegrand {
 public:
  /// Throws std::invalid_argument if validation fails.
  GraphIntegrand(GraphAssignment assignment, const Propagator& propagator);

  TypeVerdict verdict() const { return verdict_; }
  int num_vertices() const { return assignment_.graph.num_vertices; }
  int n() const { return propagator_->n(); }
  const GraphAssignment& assignment() const { return assignment_; }
  const Propagator& propagator() const { return *propagator_; }
  /// All vertex coefficients constant, so the integrand is translation invariant.
  bool translation_invariant() const;

  /// Product of edge kernels (in edge order) times vertex coefficients.
  MultiPointForm form(const std::vector<RVec>& points) const;

  /// Lebesgue density; exact 0 for zero-by-type graphs. Throws if a
  /// non-self-loop edge has coincident endpoints.
  cplx operator()(const std::vector<RVec>& points) const;

  /// Derivative orders (head, tail) applied to edge e.
  std::pair<MultiIndex, MultiIndex> edge_derivatives(int e) const;

 private:
  GraphAssignment assignment_;
  const Propagator* propagator_;
  TypeVerdict verdict_;
  std::vector<std::pair<MultiIndex, MultiIndex>> derivs_;
};

}  // namespace holofg
