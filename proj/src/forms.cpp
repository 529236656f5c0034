#include "holofg/forms.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace holofg {

int generator_bit(AntiholoGenerator g) {
  if (g.label < 0 || g.label >= kMaxLabels || g.coord < 0 || g.coord >= kMaxDim)
    throw std::out_of_range("forms: generator out of range");
  return g.label * kMaxDim + g.coord;
}

MultiPointForm MultiPointForm::scalar(cplx c) {
  MultiPointForm f;
  f.accumulate(0, c);
  return f;
}

MultiPointForm MultiPointForm::generator(AntiholoGenerator g, cplx c) {
  MultiPointForm f;
  f.accumulate(Mask{1} << generator_bit(g), c);
  return f;
}

MultiPointForm MultiPointForm::monomial(const std::vector<AntiholoGenerator>& gens, cplx c) {
  MultiPointForm f = scalar(c);
  for (const auto& g : gens) f = wedge(f, generator(g));
  return f;
}

cplx MultiPointForm::coefficient(Mask m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, Mask key) { return t.first < key; });
  return (it != terms_.end() && it->first == m) ? it->second : cplx{};
}

int MultiPointForm::degree() const {
  if (terms_.empty()) return 0;
  const int d = std::popcount(terms_.front().first);
  for (const auto& t : terms_)
    if (std::popcount(t.first) != d) return -1;
  return d;
}

void MultiPointForm::accumulate(Mask m, cplx c) {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, Mask key) { return t.first < key; });
  if (it != terms_.end() && it->first == m) {
    it->second += c;
    if (it->second == cplx{}) terms_.erase(it);
  } else if (c != cplx{}) {
    terms_.insert(it, {m, c});
  }
}

void MultiPointForm::prune() {
  std::erase_if(terms_, [](const Term& t) { return t.second == cplx{}; });
}

MultiPointForm& MultiPointForm::operator+=(const MultiPointForm& o) {
  for (const auto& [m, c] : o.terms_) accumulate(m, c);
  return *this;
}

MultiPointForm& MultiPointForm::operator-=(const MultiPointForm& o) {
  for (const auto& [m, c] : o.terms_) accumulate(m, -c);
  return *this;
}

MultiPointForm& MultiPointForm::operator*=(cplx c) {
  for (auto& t : terms_) t.second *= c;
  prune();
  return *this;
}

double max_abs_difference(const MultiPointForm& a, const MultiPointForm& b) {
  double out = 0.0;
  const MultiPointForm d = a - b;
  for (const auto& [m, c] : d.terms()) out = std::max(out, std::abs(c));
  return out;
}

MultiPointForm MultiPointForm::relabel(const std::vector<int>& new_label) const {
  MultiPointForm out;
  for (const auto& [m, c] : terms_) {
    std::vector<AntiholoGenerator> gens;
    for (Mask r = m; r != 0; r &= r - 1) {
      const int bit = std::countr_zero(r);
      const int label = bit / kMaxDim;
      if (label >= static_cast<int>(new_label.size())) throw std::out_of_range("forms: relabel map too short");
      gens.push_back({new_label[label], bit % kMaxDim});
    }
    out += monomial(gens, c);
  }
  return out;
}

int wedge_sign(MultiPointForm::Mask a, MultiPointForm::Mask b) {
  if (a & b) return 0;
  int inversions = 0;
  for (MultiPointForm::Mask r = b; r != 0; r &= r - 1) {
    const int bit = std::countr_zero(r);
    const MultiPointForm::Mask above = bit == 63 ? 0 : (~MultiPointForm::Mask{0} << (bit + 1));
    inversions += std::popcount(a & above);
  }
  return (inversions & 1) ? -1 : 1;
}

MultiPointForm wedge(const MultiPointForm& a, const MultiPointForm& b) {
  MultiPointForm out;
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      const int s = wedge_sign(ma, mb);
      if (s != 0) out.accumulate(ma | mb, static_cast<double>(s) * ca * cb);
    }
  return out;
}

MultiPointForm contract(AntiholoGenerator g, const MultiPointForm& a) {
  const int bit = generator_bit(g);
  const MultiPointForm::Mask gm = MultiPointForm::Mask{1} << bit;
  MultiPointForm out;
  for (const auto& [m, c] : a.terms()) {
    if (!(m & gm)) continue;
    const int before = std::popcount(m & (gm - 1));
    out.accumulate(m & ~gm, (before & 1) ? -c : c);
  }
  return out;
}

MultiPointForm difference_covector(int head, int tail, int coord) {
  return MultiPointForm::generator({head, coord}) - MultiPointForm::generator({tail, coord});
}

MultiPointForm dn_difference(int head, int tail, int n) {
  MultiPointForm f = MultiPointForm::scalar(1.0);
  for (int i = 0; i < n; ++i) f = wedge(f, difference_covector(head, tail, i));
  return f;
}

cplx top_coefficient(const MultiPointForm& form, int k, int n) {
  MultiPointForm::Mask full = 0;
  for (int v = 0; v < k; ++v)
    for (int i = 0; i < n; ++i) full |= MultiPointForm::Mask{1} << generator_bit({v, i});
  return form.coefficient(full);
}

cplx top_orientation_constant(int k, int n) {
  const int N = n * k;
  // dz_1..dz_N dzbar_1..dzbar_N = (-1)^{N(N-1)/2} prod_l (dz_l ^ dzbar_l).
  const double sign = ((N * (N - 1) / 2) % 2 == 0) ? 1.0 : -1.0;
  cplx c = sign;
  for (int l = 0; l < N; ++l) c *= kDzDzbar;
  return c;
}

cplx top_density(const MultiPointForm& form, int k, int n) {
  return top_coefficient(form, k, n) * top_orientation_constant(k, n);
}

}  // namespace holofg
