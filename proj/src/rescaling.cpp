#include "holofg/rescaling.hpp"

#include <algorithm>
#include <bit>
#include <sstream>
#include <stdexcept>

namespace holofg {

RescalableExpression::RescalableExpression(int n, int order) : roster_{n}, order_(order) {
  if (n <= 0 || 2 * n + 1 > 31) throw std::invalid_argument("expression roster size out of range");
  if (order < 0) throw std::invalid_argument("expression order must be nonnegative");
}

RescalableExpression RescalableExpression::constant(int n, int order, const QComplex& c) {
  RescalableExpression r(n, order);
  r.accumulate({Exponent(4 * n, 0), 0, 0}, c);
  return r;
}

RescalableExpression RescalableExpression::from_jet(int n, const Jet& a) {
  if (a.nvars() != 4 * n) throw std::invalid_argument("expression jets use the 4n roster");
  RescalableExpression r(n, a.order());
  for (const auto& [e, c] : a.terms()) r.accumulate({e, 0, 0}, c);
  return r;
}

RescalableExpression RescalableExpression::variable(int n, int order, int index) {
  return from_jet(n, Jet::variable(4 * n, order, index));
}

RescalableExpression RescalableExpression::t_power(int n, int order, int m) {
  RescalableExpression r(n, order);
  r.accumulate({Exponent(4 * n, 0), m, 0}, 1);
  return r;
}

RescalableExpression RescalableExpression::form(int n, int order, int bit) {
  if (bit < 0 || bit > 2 * n) throw std::out_of_range("odd generator index");
  RescalableExpression r(n, order);
  r.accumulate({Exponent(4 * n, 0), 0, std::uint32_t(1) << bit}, 1);
  return r;
}

RescalableExpression RescalableExpression::y(int n, int order, int i) {
  return variable(n, order, ExprRoster{n}.zbt(i)) * t_power(n, order, -1);
}

RescalableExpression RescalableExpression::dy(int n, int order, int i) {
  ExprRoster ro{n};
  return form(n, order, ro.dzbt_bit(i)) * t_power(n, order, -1) -
         variable(n, order, ro.zbt(i)) * form(n, order, ro.dt_bit()) * t_power(n, order, -2);
}

double RescalableExpression::max_abs() const {
  double m = 0;
  for (const auto& [k, c] : terms_) m = std::max(m, c.abs());
  return m;
}

void RescalableExpression::accumulate(const ExprMonomial& m, const QComplex& c) {
  if (c.is_zero() || degree(m.e) > order_) return;
  if (static_cast<int>(m.e.size()) != roster_.nvars()) throw std::invalid_argument("monomial does not match the roster");
  auto [it, fresh] = terms_.try_emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

RescalableExpression RescalableExpression::truncated(int order) const {
  RescalableExpression r(n(), std::min(order, order_));
  for (const auto& [m, c] : terms_) r.accumulate(m, c);
  return r;
}

RescalableExpression RescalableExpression::degree_part(int d) const {
  RescalableExpression r(n(), order_);
  for (const auto& [m, c] : terms_)
    if (degree(m.e) == d) r.terms_.emplace(m, c);
  return r;
}

RescalableExpression RescalableExpression::t_part(int p) const {
  RescalableExpression r(n(), order_);
  for (const auto& [m, c] : terms_)
    if (m.t == p) r.terms_.emplace(m, c);
  return r;
}

std::map<ExprGrade, Jet> RescalableExpression::grouped() const {
  std::map<ExprGrade, Jet> out;
  int nn = n();
  std::uint32_t zmask = (std::uint32_t(1) << nn) - 1;
  for (const auto& [m, c] : terms_) {
    ExprGrade g;
    g.k.assign(m.e.begin() + nn, m.e.begin() + 2 * nn);
    g.i = m.t;
    g.j = m.forms & zmask;
    g.l = (m.forms >> nn) & zmask;
    g.d = (m.forms >> (2 * nn)) & 1;
    Exponent rest = m.e;
    std::fill(rest.begin() + nn, rest.begin() + 2 * nn, 0);
    auto it = out.try_emplace(g, Jet(4 * nn, order_)).first;
    it->second.accumulate(rest, c);
  }
  return out;
}

int RescalableExpression::weight(const ExprMonomial& m) const {
  int nn = n();
  int w = m.t;
  for (int i = 0; i < nn; ++i) w += m.e[nn + i];
  std::uint32_t zmask = (std::uint32_t(1) << nn) - 1;
  w += std::popcount(m.forms & zmask);
  w += (m.forms >> (2 * nn)) & 1;
  return w;
}

static void check_same(const RescalableExpression& a, const RescalableExpression& b) {
  if (a.n() != b.n()) throw std::invalid_argument("expressions over different rosters");
}

RescalableExpression& RescalableExpression::operator+=(const RescalableExpression& o) {
  check_same(*this, o);
  RescalableExpression r = truncated(o.order_);
  for (const auto& [m, c] : o.terms_) r.accumulate(m, c);
  return *this = std::move(r);
}

RescalableExpression& RescalableExpression::operator-=(const RescalableExpression& o) {
  check_same(*this, o);
  RescalableExpression r = truncated(o.order_);
  for (const auto& [m, c] : o.terms_) r.accumulate(m, -c);
  return *this = std::move(r);
}

RescalableExpression& RescalableExpression::operator*=(const QComplex& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

int wedge_sign(std::uint32_t a, std::uint32_t b) {
  if (a & b) return 0;
  int swaps = 0;
  for (std::uint32_t rest = b; rest; rest &= rest - 1) {
    int y = std::countr_zero(rest);
    swaps += std::popcount(a >> (y + 1));
  }
  return swaps % 2 ? -1 : 1;
}

RescalableExpression operator*(const RescalableExpression& a, const RescalableExpression& b) {
  check_same(a, b);
  RescalableExpression r(a.n(), std::min(a.order_, b.order_));
  int nv = a.roster_.nvars();
  ExprMonomial m;
  m.e.resize(nv);
  for (const auto& [ma, ca] : a.terms_) {
    int da = degree(ma.e);
    for (const auto& [mb, cb] : b.terms_) {
      int s = wedge_sign(ma.forms, mb.forms);
      if (s == 0 || da + degree(mb.e) > r.order_) continue;
      for (int i = 0; i < nv; ++i) m.e[i] = ma.e[i] + mb.e[i];
      m.t = ma.t + mb.t;
      m.forms = ma.forms | mb.forms;
      r.accumulate(m, s > 0 ? ca * cb : -(ca * cb));
    }
  }
  return r;
}

RescalableExpression d_analytic(const RescalableExpression& a, int var) {
  if (var < 0 || var >= a.roster().nvars()) throw std::out_of_range("analytic variable index");
  RescalableExpression r(a.n(), std::max(a.order() - 1, 0));
  for (const auto& [m, c] : a.terms()) {
    if (m.e[var] == 0) continue;
    ExprMonomial x = m;
    x.e[var] -= 1;
    r.accumulate(x, c * QComplex(m.e[var]));
  }
  return r;
}

RescalableExpression d_t(const RescalableExpression& a) {
  RescalableExpression r(a.n(), a.order());
  for (const auto& [m, c] : a.terms()) {
    if (m.t == 0) continue;
    ExprMonomial x = m;
    x.t -= 1;
    r.accumulate(x, c * QComplex(m.t));
  }
  return r;
}

static int koszul(std::uint32_t forms, int bit) {
  return std::popcount(forms & ((std::uint32_t(1) << bit) - 1)) % 2 ? -1 : 1;
}

RescalableExpression wedge_generator(int bit, const RescalableExpression& a) {
  RescalableExpression r(a.n(), a.order());
  std::uint32_t g = std::uint32_t(1) << bit;
  for (const auto& [m, c] : a.terms()) {
    if (m.forms & g) continue;
    ExprMonomial x = m;
    x.forms |= g;
    r.accumulate(x, koszul(m.forms, bit) > 0 ? c : -c);
  }
  return r;
}

RescalableExpression contract_generator(int bit, const RescalableExpression& a) {
  RescalableExpression r(a.n(), a.order());
  std::uint32_t g = std::uint32_t(1) << bit;
  for (const auto& [m, c] : a.terms()) {
    if (!(m.forms & g)) continue;
    ExprMonomial x = m;
    x.forms &= ~g;
    r.accumulate(x, koszul(m.forms, bit) > 0 ? c : -c);
  }
  return r;
}

std::map<int, RescalableExpression> rescale(const RescalableExpression& a) {
  std::map<int, RescalableExpression> out;
  for (const auto& [m, c] : a.terms()) {
    auto it = out.try_emplace(a.weight(m), a.n(), a.order()).first;
    it->second.accumulate(m, c);
  }
  return out;
}

int filtration_order(const RescalableExpression& a) {
  int m = kZeroFiltration;
  for (const auto& [mono, c] : a.terms()) m = std::min(m, a.weight(mono));
  return m;
}

RescalableExpression iota_X(const RescalableExpression& a) {
  const ExprRoster& ro = a.roster();
  RescalableExpression r(a.n(), a.order());
  for (const auto& [m, c] : a.terms()) {
    for (std::uint32_t rest = m.forms; rest; rest &= rest - 1) {
      int bit = std::countr_zero(rest);
      ExprMonomial x = m;
      x.forms &= ~(std::uint32_t(1) << bit);
      if (bit == ro.dt_bit())
        x.t += 1;
      else if (bit < ro.n)
        x.e[ro.zbt(bit)] += 1;
      else
        continue;
      r.accumulate(x, koszul(m.forms, bit) > 0 ? c : -c);
    }
  }
  return r;
}

bool regularity_test(const RescalableExpression& a) {
  if (filtration_order(a) < 0) return false;
  auto parts = rescale(a);
  auto it = parts.find(0);
  return it == parts.end() || iota_X(it->second).is_zero();
}

namespace {

Jet conj_coefficients(const Jet& a) {
  Jet r(a.nvars(), a.order());
  for (const auto& [e, c] : a.terms()) r.accumulate(e, c.conj());
  return r;
}

}  // namespace

RescalableExpression pullback_biholomorphism(const RescalableExpression& a, const std::vector<Jet>& f) {
  int n = a.n(), nv = 4 * n, order = a.order();
  ExprRoster ro{n};
  if (static_cast<int>(f.size()) != n) throw std::invalid_argument("map jet needs n components");
  MatrixJet lin(n, 0, 0);
  for (int i = 0; i < n; ++i) {
    if (f[i].nvars() != n) throw std::invalid_argument("map jet components use n variables");
    if (!f[i].constant_term().is_zero()) throw std::invalid_argument("map jet must fix the origin");
    for (int j = 0; j < n; ++j) {
      Exponent e(n, 0);
      e[j] = 1;
      lin.at(i, j) = Jet::constant(0, 0, f[i].coeff(e));
    }
  }
  try {
    invert(lin);
  } catch (const std::domain_error&) {
    throw std::invalid_argument("map jet has a non-invertible linear part");
  }

  auto var = [&](int idx) { return Jet::variable(nv, order, idx); };
  std::vector<Jet> at_w(n), at_z(n), at_wb(n), at_zb(n);
  for (int j = 0; j < n; ++j) {
    at_w[j] = var(ro.w(j));
    at_z[j] = var(ro.zt(j)) + var(ro.w(j));
    at_wb[j] = var(ro.wbar(j));
    at_zb[j] = var(ro.zbt(j)) + var(ro.wbar(j));
  }
  // Substitutes indexed by roster variable, then by odd generator.
  std::vector<RescalableExpression> sub(nv), form_sub(2 * n + 1);
  for (int i = 0; i < n; ++i) {
    Jet fb = conj_coefficients(f[i]);
    Jet W = compose(f[i], at_w);
    Jet Wb = compose(fb, at_wb);
    Jet Zb = compose(fb, at_zb) - Wb;
    sub[ro.zt(i)] = RescalableExpression::from_jet(n, compose(f[i], at_z) - W);
    sub[ro.zbt(i)] = RescalableExpression::from_jet(n, Zb);
    sub[ro.w(i)] = RescalableExpression::from_jet(n, W);
    sub[ro.wbar(i)] = RescalableExpression::from_jet(n, Wb);
    RescalableExpression dz(n, order), dw(n, order);
    for (int j = 0; j < n; ++j) {
      dz += RescalableExpression::from_jet(n, differentiate(Zb, ro.zbt(j))) * RescalableExpression::form(n, order, ro.dzbt_bit(j));
      dz += RescalableExpression::from_jet(n, differentiate(Zb, ro.wbar(j))) * RescalableExpression::form(n, order, ro.dwbar_bit(j));
      dw += RescalableExpression::from_jet(n, differentiate(Wb, ro.wbar(j))) * RescalableExpression::form(n, order, ro.dwbar_bit(j));
    }
    form_sub[ro.dzbt_bit(i)] = dz;
    form_sub[ro.dwbar_bit(i)] = dw;
  }
  form_sub[ro.dt_bit()] = RescalableExpression::form(n, order, ro.dt_bit());

  std::vector<std::vector<RescalableExpression>> powers(nv);
  for (int v = 0; v < nv; ++v) powers[v].push_back(RescalableExpression::constant(n, order, 1));
  auto power = [&](int v, int k) -> const RescalableExpression& {
    while (static_cast<int>(powers[v].size()) <= k) powers[v].push_back(powers[v].back() * sub[v]);
    return powers[v][k];
  };

  RescalableExpression out(n, order);
  for (const auto& [m, c] : a.terms()) {
    RescalableExpression term = RescalableExpression::t_power(n, order, m.t) * c;
    for (int v = 0; v < nv; ++v)
      if (m.e[v] > 0) term = term * power(v, m.e[v]);
    for (std::uint32_t rest = m.forms; rest; rest &= rest - 1) term = term * form_sub[std::countr_zero(rest)];
    out += term;
  }

  if (filtration_order(out) < filtration_order(a)) throw std::logic_error("pullback lowered the filtration order");
  if (regularity_test(a) && !regularity_test(out)) throw std::logic_error("pullback lost regularity");
  return out;
}

std::string to_text(const RescalableExpression& a) {
  std::ostringstream out;
  for (const auto& [m, c] : a.terms()) {
    for (int x : m.e) out << x << ' ';
    out << "| " << m.t << " | " << m.forms << " : " << c.re.get_str() << ' ' << c.im.get_str() << '\n';
  }
  return out.str();
}

}  // namespace holofg
