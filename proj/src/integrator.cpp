#include "holofg/integrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "holofg/extrapolate.hpp"
#include "holofg/hash.hpp"
#include "holofg/parallel.hpp"
#include "holofg/quadrature.hpp"

namespace holofg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Parent of each vertex in a BFS forest over the singular pairs; -1 for roots.
std::vector<int> sampling_tree(int V, const std::vector<Edge>& pairs) {
  std::vector<std::vector<int>> adj(V);
  for (const auto& e : pairs) {
    if (e.tail == e.head) continue;
    adj[e.tail].push_back(e.head);
    adj[e.head].push_back(e.tail);
  }
  std::vector<int> parent(V, -2);
  for (int root = 0; root < V; ++root) {
    if (parent[root] != -2) continue;
    parent[root] = -1;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int w : adj[v])
        if (parent[w] == -2) {
          parent[w] = v;
          q.push(w);
        }
    }
  }
  return parent;
}

/// Per-eps running sums for one chunk.
struct Moments {
  std::vector<double> re, im, sq;
  explicit Moments(std::size_t k = 0) : re(k, 0.0), im(k, 0.0), sq(k, 0.0) {}
};

class Sampler {
 public:
  Sampler(const ConfigIntegrand& f, const FakeDistance& fd, std::vector<double> eps, const IntegrationStrategy& s)
      : f_(f), fd_(fd), lat_(*f.lattice), eps_(std::move(eps)), s_(s), V_(f.num_vertices), d_(lat_.real_dim()),
        parent_(sampling_tree(V_, f.singular_pairs)), inj_(injectivity_radius(lat_)) {
    ball_ = std::min(inj_, fd.params().r1);
    // density of |u|^{-(2n-1)} on the ball of R^{2n}: r uniform on [0, ball]
    const int n = lat_.n();
    sphere_ = 2.0 * std::pow(kPi, n) / boost::math::tgamma(n);
    eps_min_ = *std::min_element(eps_.begin(), eps_.end());
  }

  void integrate_chunk(std::uint64_t chunk, std::uint64_t count, Moments& m) const {
    std::mt19937_64 rng(splitmix64(s_.seed ^ splitmix64(chunk)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<RVec> pts(V_, RVec::Zero(d_));
    std::vector<RVec> rotated(V_, RVec::Zero(d_));
    // Radial draws near the parent are stratified over the chunk; each
    // vertex walks the strata from its own random offset.
    std::vector<std::uint64_t> shift(V_);
    for (auto& x : shift) x = rng() % count;
    for (std::uint64_t k = 0; k < count; ++k) {
      double log_q = 0.0;
      for (int v = 0; v < V_; ++v) {
        const bool pinned_root = v == 0 && s_.pin_vertex;
        if (pinned_root) {
          pts[v].setZero();
          continue;
        }
        const int p = parent_[v];
        const bool near = p >= 0 && unif(rng) < s_.tree_mixture;
        if (near) {
          RVec dir(d_);
          for (int i = 0; i < d_; ++i) dir[i] = gauss(rng);
          dir /= dir.norm();
          const double stratum = static_cast<double>((k + shift[v]) % count);
          const double radius = ball_ * (stratum + unif(rng)) / static_cast<double>(count);
          pts[v] = reduce(pts[p] + radius * dir, lat_).rep;
        } else {
          RVec c(d_);
          for (int i = 0; i < d_; ++i) c[i] = unif(rng);
          pts[v] = lat_.from_coefficients(c);
        }
        double q = 1.0 / lat_.covolume();
        if (p >= 0) {
          const double r = minimal_image(pts[v] - pts[p], lat_).norm();
          q = (1.0 - s_.tree_mixture) * q +
              (r < ball_ ? s_.tree_mixture / (ball_ * sphere_ * std::pow(r, d_ - 1)) : 0.0);
        }
        log_q += std::log(q);
      }
      const double weight = std::exp(-log_q) * (s_.pin_vertex ? lat_.covolume() : 1.0);
      // Rotations about vertex 0 when the whole configuration sits in the ball.
      int copies = 1;
      std::vector<RVec> offsets(V_);
      if (s_.angular_copies > 1 && V_ > 1) {
        bool inside = true;
        for (int v = 1; v < V_ && inside; ++v) {
          offsets[v] = minimal_image(pts[v] - pts[0], lat_);
          inside = offsets[v].norm() < inj_;
        }
        if (inside) copies = s_.angular_copies;
      }
      std::vector<cplx> acc(eps_.size(), 0.0);
      for (int c = 0; c < copies; ++c) {
        const std::vector<RVec>* cfg = &pts;
        if (copies > 1) {
          const cplx rot = std::polar(1.0, 2.0 * kPi * c / copies);
          rotated[0] = pts[0];
          for (int v = 1; v < V_; ++v) {
            RVec u = offsets[v];
            for (int i = 0; i < lat_.n(); ++i) {
              const cplx w = rot * cplx(u[2 * i], u[2 * i + 1]);
              u[2 * i] = w.real();
              u[2 * i + 1] = w.imag();
            }
            rotated[v] = reduce(pts[0] + u, lat_).rep;
          }
          cfg = &rotated;
        }
        double prod = 1.0;
        for (int a = 0; a < V_; ++a)
          for (int b = a + 1; b < V_; ++b) prod *= fd_((*cfg)[a], (*cfg)[b]);
        if (!(prod > eps_min_)) continue;
        const cplx val = f_.density(*cfg);
        for (std::size_t e = 0; e < eps_.size(); ++e)
          if (prod > eps_[e]) acc[e] += val;
      }
      for (std::size_t e = 0; e < eps_.size(); ++e) {
        const cplx x = acc[e] * (weight / copies);
        m.re[e] += x.real();
        m.im[e] += x.imag();
        m.sq[e] += std::norm(x);
      }
    }
  }

 private:
  const ConfigIntegrand& f_;
  const FakeDistance& fd_;
  const Lattice& lat_;
  std::vector<double> eps_;
  const IntegrationStrategy& s_;
  int V_;
  int d_;
  std::vector<int> parent_;
  double inj_;
  double ball_;
  double sphere_;
  double eps_min_;
};

/// Pairwise sum of x[lo, hi) in a fixed order.
double pairwise_sum(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += x[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(x, lo, mid) + pairwise_sum(x, mid, hi);
}

std::vector<Estimate> monte_carlo(const ConfigIntegrand& f, const FakeDistance& fd, const std::vector<double>& eps,
                                  const IntegrationStrategy& s) {
  if (s.samples == 0 || s.chunk == 0) throw std::invalid_argument("integrator: samples and chunk must be positive");
  const auto start = std::chrono::steady_clock::now();
  const Sampler sampler(f, fd, eps, s);
  const std::uint64_t chunks = (s.samples + s.chunk - 1) / s.chunk;
  std::vector<Moments> per_chunk(chunks, Moments(eps.size()));
  parallel_for(chunks, s.threads, [&](std::size_t c) {
    const std::uint64_t count = std::min<std::uint64_t>(s.chunk, s.samples - c * s.chunk);
    sampler.integrate_chunk(c, count, per_chunk[c]);
  });
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::vector<Estimate> out(eps.size());
  const double N = static_cast<double>(s.samples);
  for (std::size_t e = 0; e < eps.size(); ++e) {
    std::vector<double> re(chunks), im(chunks), sq(chunks);
    for (std::uint64_t c = 0; c < chunks; ++c) {
      re[c] = per_chunk[c].re[e];
      im[c] = per_chunk[c].im[e];
      sq[c] = per_chunk[c].sq[e];
    }
    const cplx mean(pairwise_sum(re, 0, chunks) / N, pairwise_sum(im, 0, chunks) / N);
    const double var = std::max(0.0, pairwise_sum(sq, 0, chunks) / N - std::norm(mean));
    out[e].eps = eps[e];
    out[e].value = mean;
    out[e].stat_error = N > 1 ? std::sqrt(var / (N - 1)) : 0.0;
    out[e].samples = s.samples;
    out[e].wall_time = elapsed / eps.size();
  }
  return out;
}

std::vector<Estimate> quadrature(const ConfigIntegrand& f, const FakeDistance& fd, const std::vector<double>& eps,
                                 const IntegrationStrategy& s) {
  const auto start = std::chrono::steady_clock::now();
  const Lattice& lat = *f.lattice;
  const int d = lat.real_dim();
  const int free = f.num_vertices - (s.pin_vertex ? 1 : 0);
  const QuadRule rule = mapped(gauss_legendre(s.quadrature_order), 0.0, 1.0);
  const int q = static_cast<int>(rule.x.size());
  const int axes = free * d;
  std::uint64_t total = 1;
  for (int a = 0; a < axes; ++a) {
    total *= q;
    if (total > (1ULL << 24)) throw std::invalid_argument("integrator: tensor grid too large");
  }
  const double scale = std::pow(lat.covolume(), f.num_vertices);
  std::vector<std::vector<cplx>> partial(eps.size(), std::vector<cplx>(total, 0.0));
  parallel_for(total, s.threads, [&](std::size_t idx) {
    std::vector<RVec> pts(f.num_vertices, RVec::Zero(d));
    double w = scale;
    std::uint64_t code = idx;
    for (int v = s.pin_vertex ? 1 : 0; v < f.num_vertices; ++v) {
      RVec c(d);
      for (int i = 0; i < d; ++i) {
        const int k = static_cast<int>(code % q);
        code /= q;
        c[i] = rule.x[k];
        w *= rule.w[k];
      }
      pts[v] = lat.from_coefficients(c);
    }
    double prod = 1.0;
    for (int a = 0; a < f.num_vertices; ++a)
      for (int b = a + 1; b < f.num_vertices; ++b) prod *= fd(pts[a], pts[b]);
    bool any = false;
    for (double e : eps) any = any || prod > e;
    if (!any) return;
    const cplx val = w * f.density(pts);
    for (std::size_t e = 0; e < eps.size(); ++e)
      if (prod > eps[e]) partial[e][idx] = val;
  });
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::vector<Estimate> out(eps.size());
  for (std::size_t e = 0; e < eps.size(); ++e) {
    std::vector<double> re(total), im(total);
    for (std::uint64_t i = 0; i < total; ++i) {
      re[i] = partial[e][i].real();
      im[i] = partial[e][i].imag();
    }
    out[e].eps = eps[e];
    out[e].value = cplx(pairwise_sum(re, 0, total), pairwise_sum(im, 0, total));
    out[e].samples = total;
    out[e].wall_time = elapsed / eps.size();
  }
  return out;
}

std::vector<Estimate> estimate_all(const ConfigIntegrand& f, const FakeDistance& fd, const std::vector<double>& eps,
                                   const IntegrationStrategy& s) {
  if (!f.lattice || !f.density) throw std::invalid_argument("integrator: integrand without lattice or density");
  if (f.num_vertices < 1) throw std::invalid_argument("integrator: need at least one vertex");
  if (f.lattice->hash() != fd.lattice().hash())
    throw std::invalid_argument("integrator: fake distance lives on a different lattice");
  if (s.pin_vertex && !f.translation_invariant)
    throw std::invalid_argument("integrator: pinning requires a translation-invariant integrand");
  for (double e : eps)
    if (!(e > 0.0)) throw std::invalid_argument("integrator: eps must be positive");

  std::vector<Estimate> out(eps.size());
  const double bound = product_distance_bound(fd, f.num_vertices);
  std::vector<double> live;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    out[k].eps = eps[k];
    if (f.zero_by_type) continue;
    if (eps[k] >= bound) {
      out[k].empty_region = true;
      out[k].warning = "cutoff region is empty";
    } else {
      live.push_back(eps[k]);
    }
  }
  if (live.empty()) return out;
  const auto est = s.backend == Backend::MonteCarlo ? monte_carlo(f, fd, live, s) : quadrature(f, fd, live, s);
  std::size_t j = 0;
  for (auto& o : out)
    if (!o.empty_region && !f.zero_by_type) o = est[j++];
  return out;
}

}  // namespace

ConfigIntegrand ConfigIntegrand::from_graph(const GraphIntegrand& g) {
  ConfigIntegrand c;
  c.num_vertices = g.num_vertices();
  c.lattice = &g.propagator().lattice();
  c.density = [&g](const std::vector<RVec>& pts) { return g(pts); };
  c.translation_invariant = g.translation_invariant();
  c.zero_by_type = g.verdict() == TypeVerdict::ZeroByType;
  c.singular_pairs = g.assignment().graph.edges;
  Fnv1a h;
  h.add(graph_hash(g.assignment()));
  h.add(g.propagator().lattice().hash());
  h.add(g.propagator().options().split_L);
  c.hash = h.value();
  return c;
}

std::vector<double> CutoffSchedule::values() const {
  if (!(first > 0.0) || !(ratio > 0.0 && ratio < 1.0) || count < 4)
    throw std::invalid_argument("cutoff schedule needs first > 0, 0 < ratio < 1 and count >= 4");
  std::vector<double> v(count);
  for (int k = 0; k < count; ++k) v[k] = first * std::pow(ratio, k);
  return v;
}

std::string IntegrationStrategy::describe() const {
  std::ostringstream os;
  if (backend == Backend::MonteCarlo)
    os << "monte-carlo samples=" << samples << " chunk=" << chunk << " mixture=" << tree_mixture
       << " copies=" << angular_copies;
  else
    os << "quadrature order=" << quadrature_order;
  os << " pinned=" << (pin_vertex ? 1 : 0);
  return os.str();
}

double product_distance_bound(const FakeDistance& fd, int num_vertices) {
  const auto& p = fd.params();
  const double pair = std::max(p.r1 * p.r1, p.plateau) + 1.5 * p.bump_amplitude;
  const int pairs = num_vertices * (num_vertices - 1) / 2;
  return std::pow(pair, pairs);
}

Estimate cutoff_integral(const ConfigIntegrand& f, const FakeDistance& fd, double eps, const IntegrationStrategy& s) {
  return estimate_all(f, fd, {eps}, s).front();
}

GraphIntegralResult graph_integral(const ConfigIntegrand& f, const FakeDistance& fd, const CutoffSchedule& schedule,
                                   const IntegrationStrategy& s) {
  const auto eps = schedule.values();
  GraphIntegralResult r;
  r.integrand_hash = f.hash;
  r.lattice_hash = f.lattice ? f.lattice->hash() : 0;
  r.fd_hash = fd.hash();
  r.strategy = s.describe();
  r.seed = s.seed;
  r.per_eps = estimate_all(f, fd, eps, s);

  std::vector<cplx> y;
  std::vector<double> w;
  for (const auto& e : r.per_eps) {
    y.push_back(e.value);
    w.push_back(e.stat_error);
  }
  const double smallest = *std::min_element(w.begin(), w.end());
  for (auto& x : w) x = 1.0 / std::max(x, std::max(smallest, 1e-300));
  const bool exact = std::all_of(r.per_eps.begin(), r.per_eps.end(), [](const Estimate& e) { return e.stat_error == 0; });
  if (exact) std::fill(w.begin(), w.end(), 1.0);

  const std::vector<std::pair<std::string, std::vector<BasisFn>>> models = {
      {"sqrt", {[](double e) { return std::sqrt(e); }, [](double e) { return e; }}},
      {"eps-log", {[](double e) { return e * std::log(e); }, [](double e) { return e; }}},
  };
  for (const auto& [name, basis] : models) {
    const FitResult fit = fit_linear_model(eps, y, basis, w);
    r.models.push_back({name, fit.c0, fit.residual_rms});
  }
  r.value = r.models[0].c0;
  r.systematic = std::abs(r.models[0].c0 - r.models[1].c0);
  r.stat_error = r.per_eps.back().stat_error;

  // Successive differences should shrink, up to 3 sigma of noise.
  for (std::size_t k = 2; k < r.per_eps.size(); ++k) {
    const auto& a = r.per_eps[k - 2];
    const auto& b = r.per_eps[k - 1];
    const auto& c = r.per_eps[k];
    const double d1 = std::abs(b.value - a.value), d2 = std::abs(c.value - b.value);
    const double noise = 3.0 * std::hypot(b.stat_error, c.stat_error);
    if (d2 > d1 + noise) {
      r.cauchy = false;
      std::ostringstream os;
      os << "eps sweep is not Cauchy at eps=" << c.eps;
      r.message = os.str();
      break;
    }
  }
  return r;
}

int vertex_permutation_sign(const std::vector<int>& perm, int n) {
  int inversions = 0;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++inversions;
  return (inversions % 2 && n % 2) ? -1 : 1;
}

GraphAssignment permute_vertices(const GraphAssignment& a, const std::vector<int>& perm) {
  const int V = a.graph.num_vertices;
  if (static_cast<int>(perm.size()) != V) throw std::invalid_argument("permute_vertices: wrong size");
  std::vector<int> seen(V, 0);
  for (int p : perm) {
    if (p < 0 || p >= V || seen[p]++) throw std::invalid_argument("permute_vertices: not a permutation");
  }
  GraphAssignment out = a;
  for (auto& e : out.graph.edges) {
    e.tail = perm[e.tail];
    e.head = perm[e.head];
  }
  for (int v = 0; v < V; ++v) {
    out.densities[perm[v]] = a.densities[v];
    out.slot_map[perm[v]] = a.slot_map[v];
  }
  return out;
}

InvarianceReport invariance_suite(const ConfigIntegrand& f, const std::vector<FakeDistance>& fds,
                                  const CutoffSchedule& schedule, const IntegrationStrategy& s,
                                  const ConfigIntegrand* permuted, int permutation_sign) {
  if (fds.size() < 2) throw std::invalid_argument("invariance_suite needs at least two fake distances");
  InvarianceReport rep;
  auto tol = [](const GraphIntegralResult& a, const GraphIntegralResult& b) {
    return 3.0 * std::hypot(a.stat_error, b.stat_error) + a.systematic + b.systematic + 1e-12;
  };
  rep.fd_agree = true;
  for (const auto& fd : fds) rep.per_fd.push_back(graph_integral(f, fd, schedule, s));
  for (std::size_t a = 0; a < rep.per_fd.size(); ++a)
    for (std::size_t b = a + 1; b < rep.per_fd.size(); ++b) {
      const double d = std::abs(rep.per_fd[a].value - rep.per_fd[b].value);
      rep.max_fd_discrepancy = std::max(rep.max_fd_discrepancy, d);
      if (d > tol(rep.per_fd[a], rep.per_fd[b])) rep.fd_agree = false;
    }

  if (f.translation_invariant) {
    IntegrationStrategy pin = s, free = s;
    pin.pin_vertex = true;
    free.pin_vertex = false;
    rep.pinned = graph_integral(f, fds.front(), schedule, pin);
    rep.unpinned = graph_integral(f, fds.front(), schedule, free);
    rep.pin_agree = std::abs(rep.pinned.value - rep.unpinned.value) <= tol(rep.pinned, rep.unpinned);
  } else {
    rep.pin_agree = true;
  }

  if (permuted) {
    rep.permutation_checked = true;
    const auto pr = graph_integral(*permuted, fds.front(), schedule, s);
    rep.permutation_agree =
        std::abs(pr.value - static_cast<double>(permutation_sign) * rep.per_fd.front().value) <= tol(pr, rep.per_fd.front());
  }
  rep.ok = rep.fd_agree && rep.pin_agree && rep.permutation_agree;
  std::ostringstream os;
  os << "fd discrepancy " << rep.max_fd_discrepancy << (rep.fd_agree ? " ok" : " FAILED") << "; pinning "
     << (rep.pin_agree ? "ok" : "FAILED");
  if (permuted) os << "; permutation " << (rep.permutation_agree ? "ok" : "FAILED");
  rep.message = os.str();
  return rep;
}

}  // namespace holofg
