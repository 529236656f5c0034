#pragma once

#include <climits>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "holofg/jet.hpp"

namespace holofg {

/// Analytic roster of a base of dimension n: ztilde_i = i, zbartilde_i = n + i,
/// w_i = 2n + i, wbar_i = 3n + i. Odd generators: dzbartilde_i = bit i,
/// dwbar_i = bit n + i, dt = bit 2n.
struct ExprRoster {
  int n = 0;
  int nvars() const { return 4 * n; }
  int zt(int i) const { return i; }
  int zbt(int i) const { return n + i; }
  int w(int i) const { return 2 * n + i; }
  int wbar(int i) const { return 3 * n + i; }
  int dzbt_bit(int i) const { return i; }
  int dwbar_bit(int i) const { return n + i; }
  int dt_bit() const { return 2 * n; }
};

struct ExprMonomial {
  Exponent e;           ///< analytic exponents over the 4n roster
  int t = 0;            ///< power of t, any integer
  std::uint32_t forms = 0;
  friend auto operator<=>(const ExprMonomial&, const ExprMonomial&) = default;
};

/// Canonical grouping key: zbartilde^k t^i dzbartilde^j dwbar^l dt^d.
struct ExprGrade {
  Exponent k;
  int i = 0;
  std::uint32_t j = 0;
  std::uint32_t l = 0;
  int d = 0;
  friend auto operator<=>(const ExprGrade&, const ExprGrade&) = default;
};

/// Finite sum of exact coefficients times graded monomials, with the analytic
/// part truncated at total degree `order`. The delta_eps weight of a monomial
/// is |k| + i + |j| + d.
class RescalableExpression {
 public:
  RescalableExpression() = default;
  RescalableExpression(int n, int order);

  static RescalableExpression constant(int n, int order, const QComplex& c);
  /// Jet over the 4n roster, no t or form factors.
  static RescalableExpression from_jet(int n, const Jet& a);
  static RescalableExpression variable(int n, int order, int index);
  static RescalableExpression t_power(int n, int order, int m);
  static RescalableExpression form(int n, int order, int bit);
  /// y_i = zbartilde_i / t.
  static RescalableExpression y(int n, int order, int i);
  /// dy_i = dzbartilde_i / t - zbartilde_i dt / t^2.
  static RescalableExpression dy(int n, int order, int i);

  int n() const { return roster_.n; }
  int order() const { return order_; }
  const ExprRoster& roster() const { return roster_; }
  const std::map<ExprMonomial, QComplex>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  double max_abs() const;

  void accumulate(const ExprMonomial& m, const QComplex& c);
  RescalableExpression truncated(int order) const;
  /// Terms whose analytic degree is exactly d.
  RescalableExpression degree_part(int d) const;
  /// Terms with the given power of t.
  RescalableExpression t_part(int m) const;
  /// Jet coefficients grouped by grade; the jets carry no zbartilde.
  std::map<ExprGrade, Jet> grouped() const;

  int weight(const ExprMonomial& m) const;

  RescalableExpression& operator+=(const RescalableExpression& o);
  RescalableExpression& operator-=(const RescalableExpression& o);
  RescalableExpression& operator*=(const QComplex& c);
  friend RescalableExpression operator+(RescalableExpression a, const RescalableExpression& b) { return a += b; }
  friend RescalableExpression operator-(RescalableExpression a, const RescalableExpression& b) { return a -= b; }
  friend RescalableExpression operator*(RescalableExpression a, const QComplex& c) { return a *= c; }
  friend RescalableExpression operator*(const QComplex& c, RescalableExpression a) { return a *= c; }
  /// Graded-commutative wedge product.
  friend RescalableExpression operator*(const RescalableExpression& a, const RescalableExpression& b);
  friend bool operator==(const RescalableExpression& a, const RescalableExpression& b) {
    return a.roster_.n == b.roster_.n && a.terms_ == b.terms_;
  }

 private:
  ExprRoster roster_;
  int order_ = 0;
  std::map<ExprMonomial, QComplex> terms_;
};

/// Sign of moving the generators of b past those of a (0 if they share one).
int wedge_sign(std::uint32_t a, std::uint32_t b);

/// Partial derivative in an analytic roster variable.
RescalableExpression d_analytic(const RescalableExpression& a, int var);
/// Partial derivative in t.
RescalableExpression d_t(const RescalableExpression& a);
/// Left multiplication by an odd generator.
RescalableExpression wedge_generator(int bit, const RescalableExpression& a);
/// Contraction removing an odd generator, with the Koszul sign.
RescalableExpression contract_generator(int bit, const RescalableExpression& a);

/// delta_eps(a) = sum_i a_i eps^i, keyed by i.
std::map<int, RescalableExpression> rescale(const RescalableExpression& a);

inline constexpr int kZeroFiltration = INT_MAX;
/// Largest m with a in F_m; kZeroFiltration for the zero expression.
int filtration_order(const RescalableExpression& a);

/// Interior product with X = t d_t + sum zbartilde_i d_{zbartilde_i}.
RescalableExpression iota_X(const RescalableExpression& a);
/// a in F_0 and iota_X of its weight-0 part vanishes.
bool regularity_test(const RescalableExpression& a);

/// Pull back along z -> f(z) applied to both factors: w' = f(w),
/// ztilde' = f(ztilde + w) - f(w), conjugates likewise, t unchanged.
/// f_i are jets in n variables with f(0) = 0. std::invalid_argument when the
/// linear part is singular; std::logic_error if regularity or filtration
/// order got worse.
RescalableExpression pullback_biholomorphism(const RescalableExpression& a, const std::vector<Jet>& f);

/// One line per term: "e... | t | forms-bitmask : re im".
std::string to_text(const RescalableExpression& a);

}  // namespace holofg
