#include "holofg/pv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "holofg/extrapolate.hpp"
#include "holofg/parallel.hpp"
#include "holofg/quadrature.hpp"

namespace holofg {

namespace {

cplx ipow(cplx z, int e) {
  cplx out = 1.0;
  for (int k = 0; k < e; ++k) out *= z;
  return out;
}

cplx eval_polynomial(const std::vector<PolyTerm>& terms, std::span<const cplx> z) {
  cplx sum = 0.0;
  for (const auto& t : terms) {
    cplx v = t.c;
    for (std::size_t l = 0; l < z.size(); ++l) {
      if (t.a[l]) v *= ipow(z[l], t.a[l]);
      if (t.b[l]) v *= ipow(std::conj(z[l]), t.b[l]);
    }
    sum += v;
  }
  return sum;
}

PolyTerm term(cplx c, std::vector<int> a, std::vector<int> b) { return PolyTerm{c, std::move(a), std::move(b)}; }

std::vector<int> unit(int dim, int l, int e = 1) {
  std::vector<int> v(dim, 0);
  if (l < dim) v[l] = e;
  return v;
}

double norm2(std::span<const cplx> z) {
  double s = 0.0;
  for (const auto& w : z) s += std::norm(w);
  return s;
}

/// Least-squares fit of a degree-5 polynomial in (u, ubar) on a 5x5 grid of
/// spacing h; rows give the coefficients of u^r ubar^s, already divided by h^{r+s}.
struct TaylorStencil {
  static constexpr int kDegree = 5;
  static constexpr double kStep = 1e-3;
  std::vector<cplx> nodes;
  std::vector<std::pair<int, int>> monomials;
  Eigen::MatrixXcd solver;

  TaylorStencil() {
    for (int a = -2; a <= 2; ++a)
      for (int b = -2; b <= 2; ++b) nodes.emplace_back(a, b);
    for (int d = 0; d <= kDegree; ++d)
      for (int r = 0; r <= d; ++r) monomials.emplace_back(r, d - r);
    Eigen::MatrixXcd A(nodes.size(), monomials.size());
    for (std::size_t p = 0; p < nodes.size(); ++p)
      for (std::size_t q = 0; q < monomials.size(); ++q)
        A(p, q) = ipow(nodes[p], monomials[q].first) * ipow(std::conj(nodes[p]), monomials[q].second);
    solver = A.completeOrthogonalDecomposition().pseudoInverse();
    for (std::size_t q = 0; q < monomials.size(); ++q)
      solver.row(q) /= std::pow(kStep, monomials[q].first + monomials[q].second);
  }

  static const TaylorStencil& get() {
    static const TaylorStencil s;
    return s;
  }
};

/// T_l G (z): Taylor part of G of total degree < order in coordinate l.
cplx taylor_part(const BetaFn& g, int l, int order, std::span<const cplx> z) {
  std::vector<cplx> w(z.begin(), z.end());
  if (order == 1) {
    w[l] = 0.0;
    return g(w);
  }
  const auto& st = TaylorStencil::get();
  Eigen::VectorXcd samples(st.nodes.size());
  for (std::size_t p = 0; p < st.nodes.size(); ++p) {
    w[l] = TaylorStencil::kStep * st.nodes[p];
    samples[p] = g(w);
  }
  const Eigen::VectorXcd c = st.solver * samples;
  cplx sum = 0.0;
  for (std::size_t q = 0; q < st.monomials.size(); ++q) {
    const auto [r, s] = st.monomials[q];
    if (r + s < order) sum += c[q] * ipow(z[l], r) * ipow(std::conj(z[l]), s);
  }
  return sum;
}

/// Panels [a, b] covering [smin, 0] in s = ln r, shortest near r = 1 where
/// beta varies on the unit scale and growing toward the singular end.
std::vector<std::pair<double, double>> radial_panels(double smin, double max_length) {
  std::vector<std::pair<double, double>> out;
  double b = 0.0;
  while (b > smin) {
    const double len = std::clamp(0.3 + 0.5 * std::abs(b), 0.3, max_length);
    const double a = b - len < smin + 0.1 * len ? smin : b - len;
    out.emplace_back(a, b);
    b = a;
  }
  return out;
}

/// Cutoff region {F > delta}; F is increasing along rays in each singular
/// coordinate. For monomial cutoffs F = scale * prod r_l^{j_l}.
struct Cutoff {
  std::function<double(std::span<const cplx>)> F;
  bool monomial = false;
  std::vector<int> j;
  double scale = 1.0;
  int J = 1;
};

/// Unit roots u_a = e^{2 pi i a / N}, N divisible by 4, built from the first
/// quadrant by exact quarter turns so rotated samples are bitwise rotations.
std::vector<cplx> unit_roots(int N) {
  if (N < 4 || N % 4) throw std::invalid_argument("pv: angular node count must be a positive multiple of 4");
  std::vector<cplx> u(N);
  const int q = N / 4;
  for (int a = 0; a < q; ++a) u[a] = std::polar(1.0, 2.0 * kPi * a / N);
  for (int k = 1; k < 4; ++k)
    for (int a = 0; a < q; ++a) u[k * q + a] = u[(k - 1) * q + a] * kI;
  return u;
}

/// conj(u_a)^p for every node.
std::vector<cplx> phases(const std::vector<cplx>& u, int p) {
  std::vector<cplx> out(u.size());
  for (std::size_t a = 0; a < u.size(); ++a) out[a] = ipow(std::conj(u[a]), p);
  return out;
}

struct LongAcc {
  long double re = 0.0L;
  long double im = 0.0L;
  void add(cplx v) {
    re += v.real();
    im += v.imag();
  }
  cplx value() const { return {static_cast<double>(re), static_cast<double>(im)}; }
};

class CutoffIntegrator {
 public:
  CutoffIntegrator(const PVIntegrand& in, const Cutoff& cut, const PVOptions& opt)
      : in_(in), cut_(cut), opt_(opt), panel_(gauss_legendre(opt.panel_nodes)),
        spec_radial_(mapped(gauss_legendre(opt.spectator_radial_nodes), 0.0, 1.0)),
        roots_(unit_roots(opt.angular_nodes)) {
    for (int l = 0; l < in.m; ++l) phase_.push_back(phases(roots_, in.pole[l]));
  }

  cplx integrate(double delta) const {
    const int m = in_.m, n = in_.n, N = opt_.angular_nodes;
    std::vector<cplx> z(m + n);
    const double dtheta = 2.0 * kPi / N;
    LongAcc acc;
    const int spec_count = static_cast<int>(std::pow(spec_radial_.x.size() * N, n));
    const int ang_count = static_cast<int>(std::pow(N, m));
    for (int sc = 0; sc < spec_count; ++sc) {
      cplx wspec = 1.0;
      int code = sc;
      for (int q = 0; q < n; ++q) {
        const int rn = code % static_cast<int>(spec_radial_.x.size());
        code /= static_cast<int>(spec_radial_.x.size());
        const int an = code % N;
        code /= N;
        const double r = spec_radial_.x[rn];
        z[m + q] = r * roots_[an];
        wspec *= kDzDzbar * r * spec_radial_.w[rn] * dtheta;
      }
      for (int l = 0; l < m; ++l) wspec *= kDzDzbar * dtheta;
      for (int ac = 0; ac < ang_count; ++ac) {
        std::vector<cplx> dir(m);
        cplx w = wspec;
        int c2 = ac;
        for (int l = 0; l < m; ++l) {
          dir[l] = roots_[c2 % N];
          w *= phase_[l][c2 % N];
          c2 /= N;
        }
        radial(0, dir, z, std::vector<double>(m, 0.0), w, delta, acc);
      }
    }
    return acc.value();
  }

 private:
  /// ln F with radii s_0..s_l given and later singular radii at 1.
  double log_F(std::vector<cplx>& z, const std::vector<cplx>& dir, const std::vector<double>& s, int l,
               double sl) const {
    for (int q = 0; q < in_.m; ++q) {
      const double sq = q < l ? s[q] : (q == l ? sl : 0.0);
      z[q] = std::exp(sq) * dir[q];
    }
    return std::log(cut_.F(z));
  }

  /// Lower end in ln r_l of the region, or +inf when empty.
  double lower_limit(int l, const std::vector<cplx>& dir, std::vector<cplx>& z, const std::vector<double>& s,
                     double log_delta) const {
    if (cut_.monomial) {
      double rest = std::log(cut_.scale);
      for (int q = 0; q < l; ++q) rest += cut_.j[q] * s[q];
      const double smin = (log_delta - rest) / cut_.j[l];
      return smin >= 0.0 ? HUGE_VAL : smin;
    }
    auto g = [&](double sl) { return log_F(z, dir, s, l, sl) - log_delta; };
    if (g(0.0) <= 0.0) return HUGE_VAL;
    double hi = 0.0, lo = -1.0;
    while (g(lo) > 0.0) {
      hi = lo;
      lo *= 2.0;
      if (lo < -400.0) throw std::runtime_error("pv: cutoff function does not vanish on the divisor");
    }
    std::uintmax_t iters = 100;
    const auto bracket =
        boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (bracket.first + bracket.second);
  }

  void radial(int l, const std::vector<cplx>& dir, std::vector<cplx>& z, std::vector<double> s, cplx w,
              double delta, LongAcc& acc) const {
    if (l == in_.m) {
      for (int q = 0; q < in_.m; ++q) z[q] = std::exp(s[q]) * dir[q];
      acc.add(w * in_.beta.eval(z));
      return;
    }
    const double smin = lower_limit(l, dir, z, s, std::log(delta));
    if (!std::isfinite(smin)) return;
    for (const auto& [a, b] : radial_panels(smin, opt_.panel_length)) {
      const double len = b - a;
      for (std::size_t k = 0; k < panel_.x.size(); ++k) {
        const double sk = a + 0.5 * len * (panel_.x[k] + 1.0);
        const double wk = 0.5 * len * panel_.w[k];
        const double r = std::exp(sk);
        double f = wk * std::pow(r, 2 - in_.pole[l]);
        if (in_.logs[l]) f *= std::pow(2.0 * sk, in_.logs[l]);
        s[l] = sk;
        radial(l + 1, dir, z, s, w * f, delta, acc);
      }
    }
  }

  const PVIntegrand& in_;
  const Cutoff& cut_;
  const PVOptions& opt_;
  QuadRule panel_;
  QuadRule spec_radial_;
  std::vector<cplx> roots_;
  std::vector<std::vector<cplx>> phase_;
};

PVResult extrapolate(const PVIntegrand& in, const Cutoff& cut, std::vector<double> schedule, const PVOptions& opt) {
  in.validate();
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    if (!(schedule[k] > 0.0)) throw std::invalid_argument("pv: schedule entries must be positive");
    if (k && !(schedule[k] < schedule[k - 1])) throw std::invalid_argument("pv: schedule must be strictly decreasing");
  }
  const int L = static_cast<int>(schedule.size());
  if (L < 4) throw std::invalid_argument("pv: schedule needs at least 4 entries");

  PVResult out;
  out.deltas = schedule;
  out.per_delta.assign(L, cplx{});
  const CutoffIntegrator integrator(in, cut, opt);
  parallel_for(L, opt.threads, [&](std::size_t k) { out.per_delta[k] = integrator.integrate(schedule[k]); });

  int Q = in.m - 1;
  for (int k : in.logs) Q += k;
  // Powers of rho = delta^{1/J}. A monomial cutoff only sees the rotation
  // invariant part r_l^{2c} of beta, which yields delta^{2c/j_l}.
  std::vector<double> powers;
  if (cut.monomial) {
    for (int c = 1; c <= L; ++c)
      for (int jl : cut.j) powers.push_back(2.0 * c * cut.J / jl);
    std::sort(powers.begin(), powers.end());
    powers.erase(std::unique(powers.begin(), powers.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 powers.end());
  } else {
    for (int p = 1; p <= L; ++p) powers.push_back(p);
  }
  std::vector<BasisFn> basis;
  const int count = L - 3;
  for (std::size_t pi = 0; static_cast<int>(basis.size()) < count; ++pi)
    for (int q = Q; q >= 0 && static_cast<int>(basis.size()) < count; --q)
      basis.push_back(power_log_basis(powers[pi], q, cut.J));

  const FitResult full = fit_linear_model(schedule, out.per_delta, basis);
  basis.pop_back();
  const FitResult reduced = fit_linear_model(schedule, out.per_delta, basis);
  out.value = full.c0;
  out.error = full.residual_rms + std::abs(full.c0 - reduced.c0);
  out.converged = full.ok && out.error <= opt.fit_tolerance;
  if (!full.ok)
    out.message = "extrapolation fit is rank deficient";
  else if (!out.converged)
    out.message = "extrapolation error estimate above tolerance";
  return out;
}

}  // namespace

Beta Beta::from_polynomial(std::vector<PolyTerm> terms, std::string name) {
  Beta b;
  for (const auto& t : terms)
    if (t.a.size() != t.b.size()) throw std::invalid_argument("polynomial term exponent sizes differ");
  b.polynomial = std::move(terms);
  b.is_polynomial = true;
  b.derivative_order = 1 << 20;
  b.eval = [terms = b.polynomial](std::span<const cplx> z) { return eval_polynomial(terms, z); };
  b.name = std::move(name);
  return b;
}

Beta Beta::builtin(const std::string& name, int dim) {
  if (dim < 1) throw std::invalid_argument("builtin beta needs at least one coordinate");
  const std::vector<int> zero(dim, 0);
  if (name == "one") return from_polynomial({term(1.0, zero, zero)}, name);
  if (name == "z1") return from_polynomial({term(1.0, unit(dim, 0), zero)}, name);
  if (name == "zbar1") return from_polynomial({term(1.0, zero, unit(dim, 0))}, name);
  if (name == "z2" && dim >= 2) return from_polynomial({term(1.0, unit(dim, 1), zero)}, name);
  if (name == "z1z2" && dim >= 2) {
    auto a = unit(dim, 0);
    a[1] = 1;
    return from_polynomial({term(1.0, a, zero)}, name);
  }
  Beta b;
  b.name = name;
  if (name == "bump") {
    b.eval = [](std::span<const cplx> z) { return cplx(std::exp(-norm2(z))); };
  } else if (name == "z1z2_bump" && dim >= 2) {
    b.eval = [](std::span<const cplx> z) {
      return z[0] * z[1] * std::exp(-std::norm(z[0]) - 0.5 * std::norm(z[1]));
    };
  } else if (name == "z1sq_bump_plus_zbar1") {
    b.eval = [](std::span<const cplx> z) {
      return z[0] * z[0] * std::exp(-std::norm(z[0])) + std::conj(z[0]) * std::cos(z[0].real());
    };
  } else if (name == "z1_bump_cos") {
    b.eval = [](std::span<const cplx> z) {
      return z[0] * std::exp(-0.5 * norm2(z)) * (1.0 + 0.25 * std::cos(z[0].imag()));
    };
  } else {
    throw std::invalid_argument("unknown builtin beta: " + name);
  }
  return b;
}

void PVIntegrand::validate() const {
  if (m < 1 || n < 0) throw std::invalid_argument("pv: need m >= 1 and n >= 0");
  if (static_cast<int>(pole.size()) != m || static_cast<int>(logs.size()) != m)
    throw std::invalid_argument("pv: pole and log exponents must have m entries");
  for (int l = 0; l < m; ++l)
    if (pole[l] < 0 || logs[l] < 0) throw std::invalid_argument("pv: exponents must be nonnegative");
  if (!beta.eval) throw std::invalid_argument("pv: beta evaluator missing");
  if (beta.is_polynomial)
    for (const auto& t : beta.polynomial)
      if (static_cast<int>(t.a.size()) != dim()) throw std::invalid_argument("pv: polynomial term has wrong dimension");
}

std::vector<double> default_pv_schedule(const PVIntegrand& in, const std::vector<int>& j, double scale) {
  // Smallest radius at which the cancelling angular sums stay above round-off.
  double delta_min = 0.0;
  int J = 1;
  for (int l = 0; l < in.m; ++l) {
    const double floor = in.pole[l] <= 2 ? 1e-7 : std::pow(10.0, -5.0 / (in.pole[l] - 2));
    delta_min = std::max(delta_min, std::pow(floor, j[l]));
    J = std::max(J, j[l]);
  }
  const double rho_min = std::pow(delta_min, 1.0 / J);
  const double rho_max = std::min(2e-2, rho_min * 1e3);
  int Q = in.m - 1;
  for (int k : in.logs) Q += k;
  const int L = std::clamp(2 * (Q + 1) + 4, 10, 20);
  std::vector<double> out(L);
  for (int k = 0; k < L; ++k) {
    const double rho = rho_max * std::pow(rho_min / rho_max, static_cast<double>(k) / (L - 1));
    out[k] = scale * std::pow(rho, J);
  }
  return out;
}

PVResult pv_direct(const PVIntegrand& in, const PVDomain& domain, const PVOptions& options) {
  in.validate();
  if (static_cast<int>(domain.j.size()) != in.m) throw std::invalid_argument("pv: j must have m entries");
  Cutoff cut;
  cut.j = domain.j;
  for (int jl : domain.j) {
    if (jl <= 0) throw std::invalid_argument("pv: j entries must be positive");
    cut.J = std::max(cut.J, jl);
  }
  const std::vector<int> j = domain.j;
  const int m = in.m;
  if (domain.f) {
    const BetaFn f = domain.f;
    cut.F = [f, j, m](std::span<const cplx> z) {
      double v = std::abs(f(z));
      for (int l = 0; l < m; ++l) v *= std::pow(std::abs(z[l]), j[l]);
      return v;
    };
    std::vector<cplx> origin(in.dim(), 0.0);
    cut.scale = std::abs(f(origin));
    if (!(cut.scale > 0.0)) throw std::invalid_argument("pv: f vanishes at the origin");
  } else {
    cut.monomial = true;
    cut.F = [j, m](std::span<const cplx> z) {
      double v = 1.0;
      for (int l = 0; l < m; ++l) v *= std::pow(std::abs(z[l]), j[l]);
      return v;
    };
  }
  auto schedule = domain.schedule.empty() ? default_pv_schedule(in, domain.j, cut.scale) : domain.schedule;
  return extrapolate(in, cut, std::move(schedule), options);
}

PVResult cutoff_by_defining_function(const PVIntegrand& in, const std::function<double(std::span<const cplx>)>& h,
                                     int J, std::vector<double> schedule, const PVOptions& options) {
  in.validate();
  if (J <= 0) throw std::invalid_argument("pv: defining-function degree must be positive");
  if (!h) throw std::invalid_argument("pv: defining function missing");
  Cutoff cut;
  cut.F = h;
  cut.J = J;
  if (schedule.empty()) {
    std::vector<int> j(in.m, J);
    schedule = default_pv_schedule(in, j, 1.0);
  }
  return extrapolate(in, cut, std::move(schedule), options);
}

Desingularized desingularize(const PVIntegrand& in) {
  in.validate();
  const int max_pole = *std::max_element(in.pole.begin(), in.pole.end());
  if (in.beta.derivative_order < max_pole + 2)
    throw std::invalid_argument("desingularize: beta needs at least max(i) + 2 derivatives");
  Desingularized out;
  for (int l = 0; l < in.m; ++l)
    for (int d = 0; d < in.pole[l]; ++d)
      for (int r = 0; r <= d; ++r) out.discarded.push_back({l, r, d - r, r - (d - r) - in.pole[l]});

  if (in.beta.is_polynomial) {
    std::vector<PolyTerm> kept;
    for (const auto& t : in.beta.polynomial) {
      bool keep = t.c != 0.0;
      for (int l = 0; l < in.m && keep; ++l) keep = t.a[l] + t.b[l] >= in.pole[l];
      if (keep) kept.push_back(t);
    }
    out.identically_zero = kept.empty();
    out.method = "polynomial";
    out.k_part = [kept](std::span<const cplx> z) { return eval_polynomial(kept, z); };
    return out;
  }

  BetaFn q = in.beta.eval;
  out.method = "finite-difference";
  for (int l = 0; l < in.m; ++l) {
    const int order = in.pole[l];
    if (order == 0) continue;
    if (l == 0 && in.beta.taylor) {
      out.method = "user-derivatives";
      auto taylor = in.beta.taylor;
      auto eval = in.beta.eval;
      q = [eval, taylor, order](std::span<const cplx> z) {
        cplx t = 0.0;
        for (int d = 0; d < order; ++d)
          for (int r = 0; r <= d; ++r) t += taylor(0, r, d - r, z) * ipow(z[0], r) * ipow(std::conj(z[0]), d - r);
        return eval(z) - t;
      };
      continue;
    }
    q = [prev = q, l, order](std::span<const cplx> z) { return prev(z) - taylor_part(prev, l, order, z); };
  }
  out.k_part = q;
  return out;
}

PVResult pv_desingularized(const PVIntegrand& in, const PVOptions& opt) {
  const Desingularized des = desingularize(in);
  PVResult out;
  out.converged = true;
  if (des.identically_zero) {
    out.message = "K part vanishes identically";
    return out;
  }
  const int m = in.m, n = in.n, N = opt.angular_nodes;
  const QuadRule panel = gauss_legendre(opt.panel_nodes);
  const QuadRule spec = mapped(gauss_legendre(opt.spectator_radial_nodes), 0.0, 1.0);
  const std::vector<cplx> roots = unit_roots(N);
  // Per coordinate: radial nodes in ln r down to an inner radius below which
  // the bounded integrand contributes O(a^2 ln^k a), and the angular phases.
  std::vector<std::vector<double>> s_nodes(m), s_weights(m);
  std::vector<std::vector<cplx>> phase(m);
  for (int l = 0; l < m; ++l) {
    // Exact K parts carry no cancellation noise and can go further in.
    const double inner = des.method == "polynomial" ? 1e-12 : (in.pole[l] <= 2 ? 1e-8 : 1e-6);
    const double s0 = std::log(inner);
    for (const auto& [a, b] : radial_panels(s0, opt.panel_length))
      for (std::size_t k = 0; k < panel.x.size(); ++k) {
        const double len = b - a;
        s_nodes[l].push_back(a + 0.5 * len * (panel.x[k] + 1.0));
        s_weights[l].push_back(0.5 * len * panel.w[k]);
      }
    phase[l] = phases(roots, in.pole[l]);
  }
  const double dtheta = 2.0 * kPi / N;
  // Outer loop over radii (and spectators), inner loop over angles, so the
  // discarded null monomials cancel circle by circle.
  int radial_count = 1;
  for (int l = 0; l < m; ++l) radial_count *= static_cast<int>(s_nodes[l].size());
  const int spec_count = static_cast<int>(std::pow(spec.x.size() * N, n));
  const int ang_count = static_cast<int>(std::pow(N, m));
  std::vector<cplx> partial(radial_count);
  parallel_for(radial_count, opt.threads, [&](std::size_t rc) {
    std::vector<cplx> z(m + n);
    std::vector<double> r(m);
    cplx wr = 1.0;
    int code = static_cast<int>(rc);
    for (int l = 0; l < m; ++l) {
      const int R = static_cast<int>(s_nodes[l].size());
      const int k = code % R;
      code /= R;
      const double s = s_nodes[l][k];
      r[l] = std::exp(s);
      double f = s_weights[l][k] * std::pow(r[l], 2 - in.pole[l]);
      if (in.logs[l]) f *= std::pow(2.0 * s, in.logs[l]);
      wr *= kDzDzbar * dtheta * f;
    }
    LongAcc acc;
    for (int sc = 0; sc < spec_count; ++sc) {
      cplx w = wr;
      int c = sc;
      for (int q = 0; q < n; ++q) {
        const int rn = c % static_cast<int>(spec.x.size());
        c /= static_cast<int>(spec.x.size());
        const int an = c % N;
        c /= N;
        z[m + q] = spec.x[rn] * roots[an];
        w *= kDzDzbar * spec.x[rn] * spec.w[rn] * dtheta;
      }
      for (int ac = 0; ac < ang_count; ++ac) {
        cplx wa = w;
        int c2 = ac;
        for (int l = 0; l < m; ++l) {
          z[l] = r[l] * roots[c2 % N];
          wa *= phase[l][c2 % N];
          c2 /= N;
        }
        acc.add(wa * des.k_part(z));
      }
    }
    partial[rc] = acc.value();
  });
  LongAcc total;
  for (const auto& v : partial) total.add(v);
  out.value = total.value();
  out.error = std::abs(out.value) * 1e-12 + 1e-10;
  return out;
}

IndependenceReport independence_check(const PVIntegrand& in, const std::vector<PVDomain>& domains, double tolerance,
                                      const PVOptions& options) {
  if (domains.size() < 2) throw std::invalid_argument("independence_check needs at least two domains");
  IndependenceReport rep;
  for (const auto& d : domains) {
    rep.results.push_back(pv_direct(in, d, options));
    rep.labels.push_back(d.label);
  }
  bool all_converged = true;
  for (std::size_t a = 0; a < rep.results.size(); ++a) {
    all_converged = all_converged && rep.results[a].converged;
    for (std::size_t b = a + 1; b < rep.results.size(); ++b)
      rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(rep.results[a].value - rep.results[b].value));
  }
  rep.agree = all_converged && rep.max_discrepancy <= tolerance;
  return rep;
}

}  // namespace holofg
