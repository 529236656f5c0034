#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "holofg/constants.hpp"

namespace holofg {

/// Smooth function of all coordinates (singular ones first, then spectators).
using BetaFn = std::function<cplx(std::span<const cplx>)>;

/// c * z^a * zbar^b.
struct PolyTerm {
  cplx c;
  std::vector<int> a;
  std::vector<int> b;
};

struct Beta {
  BetaFn eval;
  /// Nonempty when beta is this polynomial; enables exact Taylor splitting.
  std::vector<PolyTerm> polynomial;
  bool is_polynomial = false;
  /// Number of bounded derivatives the evaluator is trusted to.
  int derivative_order = 64;
  /// Optional Taylor coefficients (1/r!s!) d_z^r d_zbar^s beta in coordinate l,
  /// evaluated with z_l = 0 and the other coordinates from the argument.
  std::function<cplx(int l, int r, int s, std::span<const cplx>)> taylor;
  std::string name;

  static Beta from_polynomial(std::vector<PolyTerm> terms, std::string name = "polynomial");
  /// one, z1, z2, z1z2, zbar1, bump, z1z2_bump, z1sq_bump_plus_zbar1, z1_bump_cos.
  static Beta builtin(const std::string& name, int dim);
};

/// alpha = z^{-i} prod (ln|z_l|^2)^{k_l} beta dz^dzbar on the closed unit polydisc.
struct PVIntegrand {
  int m = 1;
  int n = 0;
  std::vector<int> pole;
  std::vector<int> logs;
  Beta beta;

  int dim() const { return m + n; }
  /// Throws std::invalid_argument on inconsistent sizes or negative exponents.
  void validate() const;
};

/// Cutoff region |f(z) z^j| > delta. An empty f means f = 1; an empty
/// schedule is replaced by the default one.
struct PVDomain {
  std::vector<int> j;
  BetaFn f;
  std::vector<double> schedule;
  std::string label;
};

struct PVOptions {
  int angular_nodes = 16;
  int spectator_radial_nodes = 16;
  int panel_nodes = 12;
  double panel_length = 2.0;
  /// Acceptance threshold for the extrapolation error estimate.
  double fit_tolerance = 1e-8;
  unsigned threads = 1;
};

struct PVResult {
  cplx value;
  double error = 0.0;
  bool converged = false;
  std::vector<double> deltas;
  std::vector<cplx> per_delta;
  std::string message;
};

/// Limit of the integral over |f z^j| > delta, extrapolated in delta.
PVResult pv_direct(const PVIntegrand& integrand, const PVDomain& domain, const PVOptions& options = {});

/// Same limit for the region h > delta. h must be increasing along rays in
/// each singular coordinate and vanish like |z_l|^J on the divisor.
PVResult cutoff_by_defining_function(const PVIntegrand& integrand, const std::function<double(std::span<const cplx>)>& h,
                                     int J, std::vector<double> schedule = {}, const PVOptions& options = {});

/// A Taylor monomial z_l^r zbar_l^s removed from beta. Its angular frequency
/// r - s - i_l is nonzero, so it integrates to zero on every circle.
struct DiscardedTerm {
  int coordinate;
  int r;
  int s;
  int angular_frequency;
};

struct Desingularized {
  /// K = prod_l (I - T_l) beta, with T_l the Taylor part of degree < i_l.
  BetaFn k_part;
  bool identically_zero = false;
  std::vector<DiscardedTerm> discarded;
  std::string method;
};

/// Throws std::invalid_argument when beta's declared derivative order is
/// below max(i) + 2.
Desingularized desingularize(const PVIntegrand& integrand);

/// Absolutely convergent integral of z^{-i} ln(z,k) K.
PVResult pv_desingularized(const PVIntegrand& integrand, const PVOptions& options = {});

struct IndependenceReport {
  std::vector<PVResult> results;
  std::vector<std::string> labels;
  double max_discrepancy = 0.0;
  bool agree = false;
};

/// Throws std::invalid_argument for fewer than two domains.
IndependenceReport independence_check(const PVIntegrand& integrand, const std::vector<PVDomain>& domains,
                                      double tolerance, const PVOptions& options = {});

/// Default decreasing schedule for the given exponents.
std::vector<double> default_pv_schedule(const PVIntegrand& integrand, const std::vector<int>& j, double scale);

}  // namespace holofg
