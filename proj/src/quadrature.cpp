#include "holofg/quadrature.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

namespace holofg {

namespace {
template <int N>
QuadRule build() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  QuadRule r;
  // Boost stores the non-negative half; odd N has a node at 0.
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      r.x.push_back(0.0);
      r.w.push_back(w[i]);
    } else {
      r.x.push_back(-a[i]);
      r.w.push_back(w[i]);
      r.x.push_back(a[i]);
      r.w.push_back(w[i]);
    }
  }
  return r;
}

QuadRule make(int n) {
  switch (n) {
    case 4: return build<4>();
    case 8: return build<8>();
    case 10: return build<10>();
    case 12: return build<12>();
    case 16: return build<16>();
    case 20: return build<20>();
    case 24: return build<24>();
    case 32: return build<32>();
    case 40: return build<40>();
    case 48: return build<48>();
    case 64: return build<64>();
    default: throw std::invalid_argument("gauss_legendre: unsupported order");
  }
}
}  // namespace

const QuadRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, QuadRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make(n)).first;
  return it->second;
}

QuadRule mapped(const QuadRule& r, double a, double b) {
  QuadRule out = r;
  const double h = 0.5 * (b - a);
  const double m = 0.5 * (a + b);
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    out.x[i] = m + h * r.x[i];
    out.w[i] = h * r.w[i];
  }
  return out;
}

}  // namespace holofg
