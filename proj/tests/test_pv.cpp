#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "holofg/pv.hpp"
#include "holofg/pv_corpus.hpp"
#include "pv_oracle.hpp"

using namespace holofg;

namespace {

PVIntegrand make(int m, std::vector<int> i, std::vector<int> k, Beta b, int n = 0) {
  PVIntegrand in;
  in.m = m;
  in.n = n;
  in.pole = std::move(i);
  in.logs = std::move(k);
  in.beta = std::move(b);
  return in;
}

PVDomain unit_domain(int m) { return PVDomain{std::vector<int>(m, 1), {}, {}, "j=1"}; }

}  // namespace

TEST_CASE("analytic cases by the direct cutoff") {
  const double radial = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [](double r) { return r * std::log(r); }, 0.0, 1.0);
  CHECK(radial == doctest::Approx(-0.25).epsilon(1e-12));
  const cplx log_case = cplx(0.0, -2.0) * 2.0 * kPi * 2.0 * radial;

  struct Case {
    PVIntegrand in;
    cplx expected;
  };
  const std::vector<Case> cases = {
      {make(1, {1}, {0}, Beta::builtin("one", 1)), 0.0},
      {make(1, {1}, {0}, Beta::builtin("z1", 1)), cplx(0.0, -2.0 * kPi)},
      {make(1, {1}, {1}, Beta::builtin("z1", 1)), log_case},
      {make(2, {1, 1}, {0, 0}, Beta::builtin("z1z2", 2)), -4.0 * kPi * kPi},
  };
  CHECK(std::abs(log_case - cplx(0.0, 2.0 * kPi)) < 1e-12);
  for (const auto& c : cases) {
    const PVResult d = pv_direct(c.in, unit_domain(c.in.m));
    CHECK(d.converged);
    CHECK(std::abs(d.value - c.expected) < 1e-8);
    const PVResult s = pv_desingularized(c.in);
    CHECK(std::abs(s.value - c.expected) < 1e-8);
    CHECK(std::abs(oracle::pv_polynomial_exact(c.in) - c.expected) < 1e-12);
  }
}

TEST_CASE("desingularize certificates") {
  const auto one = desingularize(make(1, {1}, {0}, Beta::builtin("one", 1)));
  CHECK(one.identically_zero);
  REQUIRE(one.discarded.size() == 1);
  CHECK(one.discarded[0].angular_frequency == -1);
  CHECK(pv_desingularized(make(1, {1}, {0}, Beta::builtin("one", 1))).value == cplx(0.0));

  const auto zc = desingularize(make(1, {1}, {0}, Beta::builtin("z1", 1)));
  CHECK_FALSE(zc.identically_zero);
  const std::vector<cplx> pt = {cplx(0.3, -0.2)};
  CHECK(std::abs(zc.k_part(pt) - pt[0]) < 1e-15);

  // z^2 psi + zbar * (anything): the zbar part carries frequency -3 and drops out.
  const auto in = make(1, {2}, {0}, Beta::builtin("z1sq_bump_plus_zbar1", 1));
  const auto des = desingularize(in);
  CHECK(des.method == "finite-difference");
  for (const auto& t : des.discarded) CHECK(t.angular_frequency != 0);
  const PVResult direct = pv_direct(in, unit_domain(1));
  const PVResult desing = pv_desingularized(in);
  CHECK(direct.converged);
  CHECK(std::abs(direct.value - desing.value) < 1e-8);

  auto low = in;
  low.beta.derivative_order = 3;
  CHECK_THROWS_AS(desingularize(low), std::invalid_argument);
}

TEST_CASE("user supplied Taylor coefficients") {
  auto in = make(1, {2}, {1}, Beta::builtin("z1_bump_cos", 1));
  const PVResult fd = pv_desingularized(in);
  // z e^{-|z|^2/2}(1 + cos(Im z)/4): Taylor part of degree < 2 is 1.25 z.
  in.beta.taylor = [](int, int r, int s, std::span<const cplx>) { return (r == 1 && s == 0) ? cplx(1.25) : cplx(0.0); };
  const auto des = desingularize(in);
  CHECK(des.method == "user-derivatives");
  const PVResult user = pv_desingularized(in);
  CHECK(std::abs(fd.value - user.value) < 1e-10);
  CHECK(std::abs(pv_direct(in, unit_domain(1)).value - user.value) < 1e-8);
}

TEST_CASE("independence of j and f") {
  const auto in = make(1, {1}, {0}, Beta::builtin("z1", 1));
  PVDomain j2{{2}, {}, {}, "j=2"};
  PVDomain fsin{{1}, [](std::span<const cplx> z) { return cplx(2.0 + 0.5 * std::sin(z[0].real())); }, {}, "f=sin"};
  const auto rep = independence_check(in, {unit_domain(1), j2, fsin}, 1e-8);
  CHECK(rep.agree);
  CHECK(rep.max_discrepancy <= 1e-8);
  for (const auto& r : rep.results) CHECK(std::abs(r.value - cplx(0.0, -2.0 * kPi)) < 1e-8);
  CHECK_THROWS_AS(independence_check(in, {unit_domain(1)}, 1e-8), std::invalid_argument);
}

TEST_CASE("mixed two-coordinate case across three domains") {
  const auto in = make(2, {1, 1}, {1, 0}, Beta::builtin("z1z2_bump", 2));
  const PVResult oracle = pv_desingularized(in);
  PVDomain a = unit_domain(2);
  PVDomain b{{2, 1}, {}, {}, "j=(2,1)"};
  PVDomain c{{1, 1}, [](std::span<const cplx> z) { return cplx(1.5 + 0.25 * std::cos(z[1].imag())); }, {}, "f=cos"};
  const auto rep = independence_check(in, {a, b, c}, 1e-6);
  CHECK(rep.agree);
  for (const auto& r : rep.results) CHECK(std::abs(r.value - oracle.value) < 1e-6);
}

TEST_CASE("defining-function cutoffs") {
  const std::vector<std::pair<PVIntegrand, cplx>> cases = {
      {make(1, {1}, {0}, Beta::builtin("z1", 1)), cplx(0.0, -2.0 * kPi)},
      {make(1, {1}, {0}, Beta::builtin("one", 1)), 0.0},
      {make(1, {1}, {1}, Beta::builtin("z1", 1)), cplx(0.0, 2.0 * kPi)},
  };
  const auto h1 = [](std::span<const cplx> z) { return std::norm(z[0]); };
  const auto h2 = [](std::span<const cplx> z) { return (2.0 + std::cos(z[0].imag())) * std::norm(z[0]); };
  const auto h4 = [](std::span<const cplx> z) { return std::norm(z[0]) * std::norm(z[0]); };
  for (const auto& [in, expected] : cases) {
    CHECK(std::abs(cutoff_by_defining_function(in, h1, 2).value - expected) < 1e-8);
    CHECK(std::abs(cutoff_by_defining_function(in, h2, 2).value - expected) < 1e-8);
    CHECK(std::abs(cutoff_by_defining_function(in, h4, 4).value - expected) < 1e-8);
  }
}

TEST_CASE("angular vanishing of low monomials") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pole(1, 3);
  for (int trial = 0; trial < 8; ++trial) {
    const int i = pole(rng);
    std::uniform_int_distribution<int> deg(0, i - 1);
    const int total = deg(rng);
    const int r = std::uniform_int_distribution<int>(0, total)(rng);
    const int s = total - r;
    Beta b;
    b.eval = [r, s](std::span<const cplx> z) {
      cplx v = std::exp(-std::norm(z[0]));
      for (int t = 0; t < r; ++t) v *= z[0];
      for (int t = 0; t < s; ++t) v *= std::conj(z[0]);
      return v;
    };
    const auto res = pv_direct(make(1, {i}, {trial % 2}, b), unit_domain(1));
    CHECK(std::abs(res.value) < 1e-9);
  }
}

TEST_CASE("linearity and conjugation") {
  std::mt19937_64 rng(11);
  const auto b1 = oracle::random_polynomial(rng, {2}, 1);
  const auto b2 = oracle::random_polynomial(rng, {2}, 1);
  std::vector<PolyTerm> sum = b1.polynomial;
  for (auto t : b2.polynomial) {
    t.c *= cplx(0.5, -1.0);
    sum.push_back(t);
  }
  const auto v1 = pv_direct(make(1, {2}, {1}, b1), unit_domain(1)).value;
  const auto v2 = pv_direct(make(1, {2}, {1}, b2), unit_domain(1)).value;
  const auto vs = pv_direct(make(1, {2}, {1}, Beta::from_polynomial(sum)), unit_domain(1)).value;
  CHECK(std::abs(vs - (v1 + cplx(0.5, -1.0) * v2)) < 1e-8);

  // Conjugating alpha swaps z and zbar in beta and in the pole; with the
  // measure orientation flipped this gives the conjugate value.
  std::vector<PolyTerm> conj_terms;
  for (const auto& t : b1.polynomial) conj_terms.push_back({std::conj(t.c), t.b, t.a});
  Beta cb;
  const auto cpoly = Beta::from_polynomial(conj_terms);
  cb.eval = [cpoly](std::span<const cplx> z) {
    return cpoly.eval(z) * std::pow(z[0], 2) / std::pow(std::conj(z[0]), 2);
  };
  const auto vc = pv_direct(make(1, {2}, {1}, cb), unit_domain(1)).value;
  CHECK(std::abs(vc + std::conj(v1)) < 1e-8);
}

TEST_CASE("errors") {
  auto in = make(1, {1}, {0}, Beta::builtin("z1", 1));
  CHECK_THROWS_AS(pv_direct(in, PVDomain{{0}, {}, {}, ""}), std::invalid_argument);
  CHECK_THROWS_AS(pv_direct(in, PVDomain{{1}, {}, {1e-3, 1e-2, 1e-4, 1e-5}, ""}), std::invalid_argument);
  in.pole = {1, 1};
  CHECK_THROWS_AS(pv_direct(in, unit_domain(1)), std::invalid_argument);
  CHECK_THROWS_AS(Beta::builtin("nope", 1), std::invalid_argument);
}

TEST_CASE("corpus file") {
  const auto cases = load_pv_corpus(HOLOFG_SOURCE_DIR "/configs/pv_corpus.json");
  REQUIRE(cases.size() >= 6);
  for (const auto& c : cases) {
    INFO(c.name);
    const auto d = pv_direct(c.integrand, unit_domain(c.integrand.m));
    const auto s = pv_desingularized(c.integrand);
    CHECK(d.converged);
    CHECK(std::abs(d.value - s.value) < 1e-8);
    if (c.integrand.beta.is_polynomial) CHECK(std::abs(oracle::pv_polynomial_exact(c.integrand) - s.value) < 1e-8);
    if (c.expected) CHECK(std::abs(*c.expected - d.value) < 1e-8);
  }
  CHECK_THROWS_AS(parse_pv_corpus(R"({"cases": [{"name": "x", "m": 1, "i": [1], "k": [0], "beta": 3}]})"),
                  std::runtime_error);
  CHECK_THROWS_AS(parse_pv_corpus(R"({"cases": [{"name": "x", "m": 1, "i": [1, 2], "k": [0], "beta": "one"}]})"),
                  std::runtime_error);
}

TEST_CASE("randomized corpus: direct and desingularized paths agree") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> coin(1, 2), pole(0, 3), logs(0, 2);
  double worst = 0.0, worst_exact = 0.0;
  // Angular frequencies of these polynomials stay below 12.
  PVOptions opt;
  opt.angular_nodes = 12;
  opt.panel_nodes = 10;
  for (int c = 0; c < 50; ++c) {
    const int m = coin(rng);
    std::vector<int> i(m), k(m);
    for (int l = 0; l < m; ++l) {
      i[l] = std::max(1, pole(rng));
      k[l] = logs(rng);
    }
    const auto in = make(m, i, k, oracle::random_polynomial(rng, i, m, 4));
    const auto d = pv_direct(in, unit_domain(m), opt);
    const auto s = pv_desingularized(in, opt);
    const cplx exact = oracle::pv_polynomial_exact(in);
    INFO("case " << c << " m=" << m);
    CHECK(d.converged);
    worst = std::max(worst, std::abs(d.value - s.value));
    worst_exact = std::max(worst_exact, std::abs(s.value - exact) / std::max(1.0, std::abs(exact)));
  }
  CHECK(worst < 1e-7);
  CHECK(worst_exact < 1e-7);
}
