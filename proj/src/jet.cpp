#include "holofg/jet.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace holofg {

QComplex QComplex::parse(const std::string& r, const std::string& i) {
  mpq_class a(r), b(i);
  a.canonicalize();
  b.canonicalize();
  return {a, b};
}

QComplex& QComplex::operator/=(const QComplex& o) {
  mpq_class den = o.re * o.re + o.im * o.im;
  if (sgn(den) == 0) throw std::domain_error("division by zero");
  mpq_class r = (re * o.re + im * o.im) / den;
  im = (im * o.re - re * o.im) / den;
  re = std::move(r);
  return *this;
}

std::string QComplex::str() const { return re.get_str() + " " + im.get_str(); }

int degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0); }

Jet::Jet(int nvars, int order) : nvars_(nvars), order_(order) {
  if (nvars < 0 || order < 0) throw std::invalid_argument("jet needs nonnegative roster size and order");
}

Jet Jet::constant(int nvars, int order, const QComplex& c) {
  Jet j(nvars, order);
  j.accumulate(Exponent(nvars, 0), c);
  return j;
}

Jet Jet::variable(int nvars, int order, int index) {
  if (index < 0 || index >= nvars) throw std::out_of_range("jet variable index");
  Exponent e(nvars, 0);
  e[index] = 1;
  return monomial(nvars, order, e, 1);
}

Jet Jet::monomial(int nvars, int order, const Exponent& e, const QComplex& c) {
  Jet j(nvars, order);
  j.set(e, c);
  return j;
}

void Jet::set(const Exponent& e, const QComplex& c) {
  if (static_cast<int>(e.size()) != nvars_) throw std::invalid_argument("exponent length does not match the roster");
  if (degree(e) > order_) throw std::out_of_range("order overflow");
  if (c.is_zero())
    terms_.erase(e);
  else
    terms_[e] = c;
}

void Jet::accumulate(const Exponent& e, const QComplex& c) {
  if (c.is_zero() || degree(e) > order_) return;
  auto [it, fresh] = terms_.try_emplace(e, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

QComplex Jet::coeff(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? QComplex() : it->second;
}

QComplex Jet::constant_term() const { return coeff(Exponent(nvars_, 0)); }

Jet Jet::truncated(int order) const {
  Jet r(nvars_, std::min(order, order_));
  for (const auto& [e, c] : terms_)
    if (degree(e) <= r.order_) r.terms_.emplace(e, c);
  return r;
}

Jet Jet::degree_part(int d) const {
  Jet r(nvars_, order_);
  for (const auto& [e, c] : terms_)
    if (degree(e) == d) r.terms_.emplace(e, c);
  return r;
}

int Jet::valuation() const {
  int v = order_ + 1;
  for (const auto& [e, c] : terms_) v = std::min(v, degree(e));
  return v;
}

double Jet::max_abs() const {
  double m = 0;
  for (const auto& [e, c] : terms_) m = std::max(m, c.abs());
  return m;
}

Jet Jet::embed(int nvars, const std::vector<int>& slot) const {
  if (static_cast<int>(slot.size()) != nvars_) throw std::invalid_argument("embed needs one slot per variable");
  Jet r(nvars, order_);
  for (const auto& [e, c] : terms_) {
    Exponent f(nvars, 0);
    for (int i = 0; i < nvars_; ++i) f.at(slot[i]) += e[i];
    r.accumulate(f, c);
  }
  return r;
}

Jet Jet::restrict_zero(const std::vector<int>& vars) const {
  Jet r(nvars_, order_);
  for (const auto& [e, c] : terms_)
    if (std::all_of(vars.begin(), vars.end(), [&](int v) { return e.at(v) == 0; })) r.terms_.emplace(e, c);
  return r;
}

static void check_roster(const Jet& a, const Jet& b) {
  if (a.nvars() != b.nvars()) throw std::invalid_argument("jets over different rosters");
}

Jet& Jet::operator+=(const Jet& o) {
  check_roster(*this, o);
  Jet r = truncated(std::min(order_, o.order_));
  for (const auto& [e, c] : o.terms_) r.accumulate(e, c);
  return *this = std::move(r);
}

Jet& Jet::operator-=(const Jet& o) {
  check_roster(*this, o);
  Jet r = truncated(std::min(order_, o.order_));
  for (const auto& [e, c] : o.terms_) r.accumulate(e, -c);
  return *this = std::move(r);
}

Jet& Jet::operator*=(const QComplex& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  check_roster(a, b);
  Jet r(a.nvars_, std::min(a.order_, b.order_));
  std::vector<std::pair<int, const std::pair<const Exponent, QComplex>*>> bt;
  for (const auto& t : b.terms_) bt.push_back({degree(t.first), &t});
  Exponent e(a.nvars_);
  for (const auto& [ea, ca] : a.terms_) {
    int da = degree(ea);
    for (const auto& [db, t] : bt) {
      if (da + db > r.order_) continue;
      for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + t->first[i];
      r.accumulate(e, ca * t->second);
    }
  }
  return r;
}

Jet invert(const Jet& a) {
  QComplex c0 = a.constant_term();
  if (c0.is_zero()) throw std::domain_error("inverting a jet with zero constant term");
  QComplex inv = QComplex(1) / c0;
  Jet x = a * inv - Jet::constant(a.nvars(), a.order(), 1);
  Jet minus_x = -x;
  Jet sum = Jet::constant(a.nvars(), a.order(), 1);
  Jet power = sum;
  for (int k = 1; k <= a.order(); ++k) {
    power = power * minus_x;
    if (power.is_zero()) break;
    sum += power;
  }
  return sum * inv;
}

Jet differentiate(const Jet& a, int index) {
  if (index < 0 || index >= a.nvars()) throw std::out_of_range("derivative variable index");
  Jet r(a.nvars(), std::max(a.order() - 1, 0));
  for (const auto& [e, c] : a.terms()) {
    if (e[index] == 0) continue;
    Exponent f = e;
    f[index] -= 1;
    r.accumulate(f, c * QComplex(e[index]));
  }
  return r;
}

Jet compose(const Jet& outer, const std::vector<Jet>& inner) {
  if (static_cast<int>(inner.size()) != outer.nvars()) throw std::invalid_argument("compose needs one inner jet per variable");
  if (inner.empty()) return outer;
  int nv = inner[0].nvars();
  int order = outer.order();
  for (const Jet& j : inner) {
    if (j.nvars() != nv) throw std::invalid_argument("inner jets over different rosters");
    if (!j.constant_term().is_zero()) throw std::invalid_argument("compose needs inner jets with zero constant term");
    order = std::min(order, j.order());
  }
  std::vector<std::vector<Jet>> powers(inner.size());
  for (size_t i = 0; i < inner.size(); ++i) powers[i].push_back(Jet::constant(nv, order, 1));
  auto power = [&](size_t i, int k) -> const Jet& {
    while (static_cast<int>(powers[i].size()) <= k) powers[i].push_back(powers[i].back() * inner[i].truncated(order));
    return powers[i][k];
  };
  Jet r(nv, order);
  for (const auto& [e, c] : outer.terms()) {
    if (degree(e) > order) continue;
    Jet term = Jet::constant(nv, order, c);
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i] > 0) term = term * power(i, e[i]);
    r += term;
  }
  return r;
}

Jet conjugate(const Jet& a, int n) {
  if (n <= 0 || a.nvars() % (2 * n) != 0) throw std::invalid_argument("conjugate needs blocks of 2n variables");
  Jet r(a.nvars(), a.order());
  for (const auto& [e, c] : a.terms()) {
    Exponent f = e;
    for (int b = 0; b < a.nvars(); b += 2 * n)
      for (int i = 0; i < n; ++i) std::swap(f[b + i], f[b + n + i]);
    r.accumulate(f, c.conj());
  }
  return r;
}

std::string to_text(const Jet& a) {
  std::ostringstream out;
  for (const auto& [e, c] : a.terms()) {
    for (int x : e) out << x << ' ';
    out << ": " << c.re.get_str() << ' ' << c.im.get_str() << '\n';
  }
  return out.str();
}

Jet jet_from_text(const std::string& text, int nvars, int order) {
  Jet r(nvars, order);
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("jet text line without ':'");
    std::istringstream le(line.substr(0, colon)), lc(line.substr(colon + 1));
    Exponent e;
    int x;
    while (le >> x) e.push_back(x);
    std::string re, im;
    if (!(lc >> re >> im)) throw std::invalid_argument("jet text line needs two coefficients");
    r.set(e, QComplex::parse(re, im));
  }
  return r;
}

MatrixJet::MatrixJet(int size, int nvars, int order) : size(size), entries(size * size, Jet(nvars, order)) {}

MatrixJet MatrixJet::identity(int size, int nvars, int order, const QComplex& diag) {
  MatrixJet m(size, nvars, order);
  for (int i = 0; i < size; ++i) m.at(i, i) = Jet::constant(nvars, order, diag);
  return m;
}

int MatrixJet::order() const {
  int o = std::numeric_limits<int>::max();
  for (const Jet& j : entries) o = std::min(o, j.order());
  return entries.empty() ? 0 : o;
}

MatrixJet operator*(const MatrixJet& a, const MatrixJet& b) {
  if (a.size != b.size) throw std::invalid_argument("matrix size mismatch");
  int order = std::min(a.order(), b.order());
  MatrixJet r(a.size, a.nvars(), order);
  for (int i = 0; i < a.size; ++i)
    for (int j = 0; j < a.size; ++j)
      for (int k = 0; k < a.size; ++k) r.at(i, j) += a.at(i, k) * b.at(k, j);
  return r;
}

static std::vector<QComplex> invert_constant(std::vector<QComplex> m, int n) {
  std::vector<QComplex> inv(n * n);
  for (int i = 0; i < n; ++i) inv[i * n + i] = 1;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    while (piv < n && m[piv * n + col].is_zero()) ++piv;
    if (piv == n) throw std::domain_error("singular constant matrix");
    for (int k = 0; k < n; ++k) {
      std::swap(m[col * n + k], m[piv * n + k]);
      std::swap(inv[col * n + k], inv[piv * n + k]);
    }
    QComplex p = QComplex(1) / m[col * n + col];
    for (int k = 0; k < n; ++k) {
      m[col * n + k] *= p;
      inv[col * n + k] *= p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || m[r * n + col].is_zero()) continue;
      QComplex f = m[r * n + col];
      for (int k = 0; k < n; ++k) {
        m[r * n + k] -= f * m[col * n + k];
        inv[r * n + k] -= f * inv[col * n + k];
      }
    }
  }
  return inv;
}

MatrixJet invert(const MatrixJet& m) {
  int n = m.size, nv = m.nvars(), order = m.order();
  std::vector<QComplex> c(n * n);
  for (int i = 0; i < n * n; ++i) c[i] = m.entries[i].constant_term();
  std::vector<QComplex> ci = invert_constant(c, n);
  MatrixJet cinv(n, nv, order);
  for (int i = 0; i < n * n; ++i) cinv.entries[i] = Jet::constant(nv, order, ci[i]);
  // M = C + N, M^{-1} = sum_k (-C^{-1} N)^k C^{-1}
  MatrixJet rest = m;
  for (int i = 0; i < n * n; ++i) rest.entries[i] = m.entries[i].truncated(order) - Jet::constant(nv, order, c[i]);
  MatrixJet step = cinv * rest;
  for (Jet& j : step.entries) j *= QComplex(-1);
  MatrixJet sum = cinv, power = cinv;
  for (int k = 1; k <= order; ++k) {
    power = step * power;
    bool zero = true;
    for (int i = 0; i < n * n; ++i) {
      sum.entries[i] += power.entries[i];
      zero = zero && power.entries[i].is_zero();
    }
    if (zero) break;
  }
  return sum;
}

MatrixJet transpose(const MatrixJet& m) {
  MatrixJet r = m;
  for (int i = 0; i < m.size; ++i)
    for (int j = 0; j < m.size; ++j) r.at(i, j) = m.at(j, i);
  return r;
}

MatrixJet adjoint(const MatrixJet& m, int n) {
  MatrixJet r = transpose(m);
  for (Jet& j : r.entries) j = conjugate(j, n);
  return r;
}

}  // namespace holofg
