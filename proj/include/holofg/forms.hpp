#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "holofg/constants.hpp"
#include "holofg/lattice.hpp"

namespace holofg {

/// dzbar_{coord} at point `label` (both 0-based). Generators are ordered
/// lexicographically by (label, coord).
struct AntiholoGenerator {
  int label;
  int coord;
};

/// Maximum number of point labels a form may carry.
inline constexpr int kMaxLabels = 64 / kMaxDim;

/// Bit index of a generator; bit order equals the generator order.
int generator_bit(AntiholoGenerator g);

/// Element of the exterior algebra on dzbar generators attached to labeled
/// points. Monomials are bitmasks in canonical (ascending) order.
class MultiPointForm {
 public:
  using Mask = std::uint64_t;
  using Term = std::pair<Mask, cplx>;

  MultiPointForm() = default;
  static MultiPointForm scalar(cplx c);
  static MultiPointForm generator(AntiholoGenerator g, cplx c = 1.0);
  /// Monomial dzbar_{g_1} ^ ... ^ dzbar_{g_k} in the given (possibly
  /// non-canonical) order.
  static MultiPointForm monomial(const std::vector<AntiholoGenerator>& gens, cplx c = 1.0);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  cplx coefficient(Mask m) const;

  /// Degree of the form if homogeneous, -1 if mixed, 0 for the zero form.
  int degree() const;

  MultiPointForm& operator+=(const MultiPointForm& o);
  MultiPointForm& operator-=(const MultiPointForm& o);
  MultiPointForm& operator*=(cplx c);
  friend MultiPointForm operator+(MultiPointForm a, const MultiPointForm& b) { return a += b; }
  friend MultiPointForm operator-(MultiPointForm a, const MultiPointForm& b) { return a -= b; }
  friend MultiPointForm operator*(cplx c, MultiPointForm a) { return a *= c; }

  /// Largest coefficient modulus of a - b.
  friend double max_abs_difference(const MultiPointForm& a, const MultiPointForm& b);

  /// Renames point labels: label l becomes new_label[l].
  MultiPointForm relabel(const std::vector<int>& new_label) const;

  /// Inserts a (mask, coefficient) pair, merging with an existing monomial.
  void accumulate(Mask m, cplx c);

 private:
  void prune();
  std::vector<Term> terms_;  // sorted by mask, no zero coefficients
};

/// Sign (+1/-1) of concatenating canonical monomials a then b; 0 if they overlap.
int wedge_sign(MultiPointForm::Mask a, MultiPointForm::Mask b);

MultiPointForm wedge(const MultiPointForm& a, const MultiPointForm& b);

/// Interior product with the vector dual to dzbar_g.
MultiPointForm contract(AntiholoGenerator g, const MultiPointForm& a);

/// dzbar_{head,i} - dzbar_{tail,i}.
MultiPointForm difference_covector(int head, int tail, int coord);

/// d^n(zbar - wbar) = wedge over i of (dzbar_{head,i} - dzbar_{tail,i}).
MultiPointForm dn_difference(int head, int tail, int n);

/// Coefficient of the canonical full monomial on labels 0..k-1.
cplx top_coefficient(const MultiPointForm& form, int k, int n);

/// Lebesgue density of (prod_v Omega_v) ^ form on (C^n)^k, where Omega_v is
/// dz_{v,1} ^ ... ^ dz_{v,n}. With N = nk this is
///   top_coefficient * (-1)^{N(N-1)/2} * (-2i)^N.
cplx top_density(const MultiPointForm& form, int k, int n);

/// The constant (-1)^{N(N-1)/2} (-2i)^N used by top_density.
cplx top_orientation_constant(int k, int n);

/// A kernel value on two points together with its dt-grading.
struct GradedKernelValue {
  MultiPointForm form;
  bool has_dt = false;
};

}  // namespace holofg
