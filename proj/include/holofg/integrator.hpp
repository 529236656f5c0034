#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "holofg/graph.hpp"
#include "holofg/lattice.hpp"

namespace holofg {

/// A density on M^V for M = C^n / Lambda.
struct ConfigIntegrand {
  int num_vertices = 0;
  const Lattice* lattice = nullptr;
  std::function<cplx(const std::vector<RVec>&)> density;
  bool translation_invariant = false;
  bool zero_by_type = false;
  /// Vertex pairs near whose diagonals the density is singular; used to
  /// build the sampling tree.
  std::vector<Edge> singular_pairs;
  std::uint64_t hash = 0;

  /// Wraps a graph integrand, which must outlive the result.
  static ConfigIntegrand from_graph(const GraphIntegrand& g);
};

/// eps_k = first * ratio^k, k < count.
struct CutoffSchedule {
  double first = 1e-2;
  double ratio = 0.5;
  int count = 6;

  /// Throws std::invalid_argument unless first > 0, 0 < ratio < 1, count >= 4.
  std::vector<double> values() const;
};

enum class Backend { MonteCarlo, Quadrature };

struct IntegrationStrategy {
  Backend backend = Backend::MonteCarlo;
  std::uint64_t samples = 1 << 16;
  std::uint64_t seed = 1;
  std::uint64_t chunk = 4096;
  /// Gauss-Legendre order per real axis of the fundamental cell.
  int quadrature_order = 8;
  /// Fix vertex 0 at the origin and multiply by the covolume.
  bool pin_vertex = true;
  /// Probability of drawing a tree vertex near its parent. Near draws are
  /// stratified in radius within each chunk, so the reported error (iid
  /// formula) is an upper estimate.
  double tree_mixture = 0.5;
  /// Rotations e^{2 pi i k/K} of the whole configuration about vertex 0,
  /// applied when every vertex is inside the injectivity ball around it.
  int angular_copies = 8;
  unsigned threads = 1;

  std::string describe() const;
};

struct Estimate {
  double eps = 0.0;
  cplx value;
  /// One standard deviation.
  double stat_error = 0.0;
  std::uint64_t samples = 0;
  double wall_time = 0.0;
  bool empty_region = false;
  std::string warning;
};

struct ModelFit {
  std::string name;
  cplx c0;
  double residual = 0.0;
};

struct GraphIntegralResult {
  std::vector<Estimate> per_eps;
  cplx value;
  double stat_error = 0.0;
  double systematic = 0.0;
  std::vector<ModelFit> models;
  bool cauchy = true;
  std::string message;

  std::uint64_t integrand_hash = 0;
  std::uint64_t lattice_hash = 0;
  std::uint64_t fd_hash = 0;
  std::string strategy;
  std::uint64_t seed = 0;
};

/// Largest value of prod_{i<j} rho~^2 over M^V.
double product_distance_bound(const FakeDistance& fd, int num_vertices);

/// Integral of the density over {prod_{i<j} rho~^2(p_i, p_j) > eps}.
Estimate cutoff_integral(const ConfigIntegrand& f, const FakeDistance& fd, double eps, const IntegrationStrategy& s);

/// Estimates on the whole schedule from one shared sample set, extrapolated
/// to eps = 0 with c0 + c1 sqrt(eps) + c2 eps and c0 + c1 eps ln eps + c2 eps.
GraphIntegralResult graph_integral(const ConfigIntegrand& f, const FakeDistance& fd, const CutoffSchedule& schedule,
                                   const IntegrationStrategy& s);

struct InvarianceReport {
  std::vector<GraphIntegralResult> per_fd;
  double max_fd_discrepancy = 0.0;
  bool fd_agree = false;
  GraphIntegralResult pinned;
  GraphIntegralResult unpinned;
  bool pin_agree = false;
  bool permutation_checked = false;
  bool permutation_agree = true;
  bool ok = false;
  std::string message;
};

/// Compares fake-distance variants, pinned against unpinned sampling, and
/// optionally a vertex-permuted copy expected to equal sign * value.
/// Agreement is within 3 combined sigma plus systematic spreads.
InvarianceReport invariance_suite(const ConfigIntegrand& f, const std::vector<FakeDistance>& fds,
                                  const CutoffSchedule& schedule, const IntegrationStrategy& s,
                                  const ConfigIntegrand* permuted = nullptr, int permutation_sign = 1);

/// Sign of the top form under relabelling vertex v as perm[v]: sgn(perm)^n.
int vertex_permutation_sign(const std::vector<int>& perm, int n);

/// Graph assignment with vertex v renamed perm[v].
GraphAssignment permute_vertices(const GraphAssignment& a, const std::vector<int>& perm);

}  // namespace holofg
