#pragma once

#include <map>
#include <string>
#include <vector>

#include "holofg/rational.hpp"

namespace holofg {

using Exponent = std::vector<int>;

/// Truncated power series in `nvars` commuting variables, exact coefficients,
/// all terms of total degree <= order.
class Jet {
 public:
  Jet() = default;
  Jet(int nvars, int order);

  static Jet constant(int nvars, int order, const QComplex& c);
  static Jet variable(int nvars, int order, int index);
  static Jet monomial(int nvars, int order, const Exponent& e, const QComplex& c);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  const std::map<Exponent, QComplex>& terms() const { return terms_; }

  /// Throws std::out_of_range ("order overflow") if the degree exceeds order.
  void set(const Exponent& e, const QComplex& c);
  /// Adds c to the coefficient; terms above the order are dropped silently.
  void accumulate(const Exponent& e, const QComplex& c);
  QComplex coeff(const Exponent& e) const;
  QComplex constant_term() const;
  bool is_zero() const { return terms_.empty(); }

  /// Drops terms above `order` and lowers the order.
  Jet truncated(int order) const;
  /// Homogeneous part of total degree d.
  Jet degree_part(int d) const;
  /// Lowest degree among nonzero terms, or order+1 for the zero jet.
  int valuation() const;
  /// Largest coefficient modulus.
  double max_abs() const;

  /// Same series in a larger variable roster; variable i maps to slot[i].
  Jet embed(int nvars, const std::vector<int>& slot) const;
  /// Sets the listed variables to zero.
  Jet restrict_zero(const std::vector<int>& vars) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const QComplex& c);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(const Jet& a) { Jet r = a; r *= QComplex(-1); return r; }
  friend Jet operator*(Jet a, const QComplex& c) { return a *= c; }
  friend Jet operator*(const QComplex& c, Jet a) { return a *= c; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend bool operator==(const Jet& a, const Jet& b) { return a.nvars_ == b.nvars_ && a.terms_ == b.terms_; }

 private:
  int nvars_ = 0;
  int order_ = 0;
  std::map<Exponent, QComplex> terms_;
};

int degree(const Exponent& e);

/// 1/a for a jet with nonzero constant term; std::domain_error otherwise.
Jet invert(const Jet& a);
/// d/dx_i; the result has order one lower (a constant jet stays at order 0).
Jet differentiate(const Jet& a, int index);
/// outer(inner_0, ..., inner_{k-1}); every inner jet needs zero constant term.
Jet compose(const Jet& outer, const std::vector<Jet>& inner);
/// Coefficientwise conjugation followed by swapping variable i with i+n
/// inside each consecutive block of 2n variables.
Jet conjugate(const Jet& a, int n);

/// One line per term: "e_0 e_1 ... : re im", rationals written p/q.
std::string to_text(const Jet& a);
Jet jet_from_text(const std::string& text, int nvars, int order);

/// Square matrix of jets sharing a roster, row-major.
struct MatrixJet {
  int size = 0;
  std::vector<Jet> entries;

  MatrixJet() = default;
  MatrixJet(int size, int nvars, int order);
  static MatrixJet identity(int size, int nvars, int order, const QComplex& diag = 1);

  Jet& at(int r, int c) { return entries[r * size + c]; }
  const Jet& at(int r, int c) const { return entries[r * size + c]; }
  int nvars() const { return entries.empty() ? 0 : entries[0].nvars(); }
  int order() const;

  friend MatrixJet operator*(const MatrixJet& a, const MatrixJet& b);
};

/// Inverse via the exact inverse of the constant matrix and a Neumann
/// series; std::domain_error if the constant matrix is singular.
MatrixJet invert(const MatrixJet& m);
MatrixJet transpose(const MatrixJet& m);
/// Entrywise conjugate() of the transpose.
MatrixJet adjoint(const MatrixJet& m, int n);

}  // namespace holofg
