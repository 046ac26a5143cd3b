#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "swtr/errors.hpp"
#include "swtr/laurent.hpp"

using namespace swtr;

namespace {

LaurentSeries random_series(std::mt19937& rng, int lo, int trunc) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<cplx> c(static_cast<std::size_t>(trunc - lo + 1));
  for (auto& x : c) x = {d(rng), d(rng)};
  return LaurentSeries::from_coeffs(lo, c, trunc);
}

double max_diff(const LaurentSeries& a, const LaurentSeries& b, int lo, int hi) {
  double m = 0.0;
  for (int e = lo; e <= hi; ++e) m = std::max(m, std::abs(a[e] - b[e]));
  return m;
}

// binomial series (1+z)^r by the product formula, independent of the Miller recurrence
std::vector<cplx> binomial_series(double r, int n) {
  std::vector<cplx> c(static_cast<std::size_t>(n + 1));
  double b = 1.0;
  for (int j = 0; j <= n; ++j) {
    c[j] = b;
    b *= (r - j) / (j + 1);
  }
  return c;
}

// exp(s * log(1+z)) by explicit log and exp power series on plain vectors
std::vector<double> exp_log_series(double s, int n) {
  std::vector<double> L(static_cast<std::size_t>(n + 1), 0.0);
  for (int k = 1; k <= n; ++k) L[k] = s * ((k % 2) ? 1.0 : -1.0) / k;
  std::vector<double> E(static_cast<std::size_t>(n + 1), 0.0);
  E[0] = 1.0;
  // E' = L' E
  for (int m = 1; m <= n; ++m) {
    double acc = 0.0;
    for (int k = 1; k <= m; ++k) acc += k * L[k] * E[m - k];
    E[m] = acc / m;
  }
  return E;
}

}  // namespace

TEST_CASE("ring operations: cancellation and shifts") {
  auto z = LaurentSeries::variable();
  auto a = z + z * z;
  auto r = a + (-z);
  CHECK(r.valuation() == 2);
  CHECK(r[2] == cplx(1.0));
  CHECK(r[1] == cplx(0.0));

  auto f = LaurentSeries::monomial(1.0, -2);
  auto p = f * LaurentSeries::monomial(1.0, 3);
  CHECK(p.valuation() == 1);
  CHECK(p[1] == cplx(1.0));
  CHECK(p.exact());
}

TEST_CASE("geometric series by long division") {
  auto one = LaurentSeries::monomial(1.0, 0, 25);
  auto den = LaurentSeries::from_coeffs(0, {1.0, -1.0}, 25);
  auto q = one / den;
  CHECK(q.trunc_order() == 25);
  // long division of 1 by 1 - z
  std::vector<cplx> rem(27, 0.0);
  rem[0] = 1.0;
  for (int n = 0; n <= 25; ++n) {
    cplx qn = rem[n];
    rem[n] -= qn;
    rem[n + 1] += qn;
    CHECK(std::abs(q[n] - qn) < 1e-15);
  }
  CHECK_THROWS_AS((void)q[26], UnknownCoefficient);
}

TEST_CASE("division by zero series") {
  auto a = LaurentSeries::monomial(1.0, 0, 10);
  auto zero = LaurentSeries::zero(10);
  CHECK_THROWS_AS(a / zero, DivisionByZeroSeries);
}

TEST_CASE("truncation bookkeeping is tight") {
  auto a = LaurentSeries::from_coeffs(-1, {1.0, 2.0, 3.0}, 1);
  auto b = LaurentSeries::from_coeffs(2, {1.0, 1.0}, 5);
  auto p = a * b;
  // a known to z^1 and val(b)=2 -> 3; b known to z^5 and val(a)=-1 -> 4
  CHECK(p.trunc_order() == 3);
  CHECK((a + b).trunc_order() == 1);
  CHECK((a / b).trunc_order() == std::min(1 - 2, -2 + 3 + -1));
}

TEST_CASE("ring axioms on random series") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_series(rng, -3, 12);
    auto b = random_series(rng, -2, 10);
    auto c = random_series(rng, 0, 14);
    auto l1 = (a * b) * c, r1 = a * (b * c);
    int t = std::min(l1.trunc_order(), r1.trunc_order());
    CHECK(max_diff(l1, r1, -5, t) < 1e-13 * std::max(1.0, l1.max_abs()));
    auto l2 = a * (b + c), r2 = a * b + a * c;
    t = std::min(l2.trunc_order(), r2.trunc_order());
    CHECK(max_diff(l2, r2, -5, t) < 1e-13 * std::max(1.0, l2.max_abs()));
    auto q = (a * b) / b;
    t = std::min(q.trunc_order(), a.trunc_order());
    double cond = inverse(b).max_abs() * (a * b).max_abs();
    CHECK(max_diff(q, a, -3, t) < 1e-13 * std::max(1.0, cond));
  }
}

TEST_CASE("functional inverse") {
  auto z = LaurentSeries::variable(20);
  auto id = functional_inverse(z);
  CHECK(std::abs(id[1] - 1.0) < 1e-15);
  for (int k = 2; k <= 20; ++k) CHECK(std::abs(id[k]) < 1e-15);

  cplx c(2.0, -1.0);
  auto cz = functional_inverse(LaurentSeries::monomial(c, 1));
  CHECK(std::abs(cz[1] - 1.0 / c) < 1e-15);

  // Lagrange inversion: [z^n] h = (1/n)[w^{n-1}] (1+w)^{-n} = (-1)^{n-1} C_{n-1}
  auto f = LaurentSeries::from_coeffs(1, {1.0, 1.0}, 18);
  auto h = functional_inverse(f);
  for (int n = 1; n <= 18; ++n) {
    auto bs = binomial_series(-static_cast<double>(n), n - 1);
    cplx expected = bs[n - 1] / static_cast<double>(n);
    CHECK(std::abs(h[n] - expected) < 1e-9 * std::max(1.0, std::abs(expected)));
  }
  CHECK(std::abs(h[2] + 1.0) < 1e-14);
  CHECK(std::abs(h[3] - 2.0) < 1e-14);
  CHECK(std::abs(h[4] + 5.0) < 1e-13);

  CHECK_THROWS_AS(functional_inverse(LaurentSeries::monomial(1.0, 2, 10)), NotInvertible);
}

TEST_CASE("compose with inverse is the identity") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<cplx> c(16);
    double decay = 1.0;
    for (auto& x : c) {
      x = decay * cplx{d(rng), d(rng)};
      decay *= 0.6;
    }
    c[0] = {1.0 + std::abs(d(rng)), d(rng)};
    auto f = LaurentSeries::from_coeffs(1, c, 16);
    auto h = functional_inverse(f);
    auto fh = compose(f, h);
    auto hf = compose(h, f);
    double scale = std::max(1.0, h.max_abs());
    for (int k = 1; k <= 16; ++k) {
      cplx target = k == 1 ? 1.0 : 0.0;
      if (scale <= 1e3) {
        CHECK(std::abs(fh[k] - target) < 1e-12 * scale);
        CHECK(std::abs(hf[k] - target) < 1e-12 * scale);
      }
    }
  }
}

TEST_CASE("compose with Laurent outer series") {
  // f = 1/z + z, g = z + z^2, f(g) = 1/(z(1+z)) + z + z^2
  auto f = LaurentSeries::from_coeffs(-1, {1.0, 0.0, 1.0});
  auto g = LaurentSeries::from_coeffs(1, {1.0, 1.0}, 15);
  auto fg = compose(f, g);
  CHECK(std::abs(fg[-1] - 1.0) < 1e-15);
  for (int k = 0; k <= 10; ++k) {
    cplx expected = (k % 2 ? 1.0 : -1.0) + (k == 1 ? 1.0 : 0.0) + (k == 2 ? 1.0 : 0.0);
    CHECK(std::abs(fg[k] - expected) < 1e-13);
  }
}

TEST_CASE("fractional powers") {
  auto f = LaurentSeries::from_coeffs(0, {1.0, 1.0}, 20);
  auto s = pow_frac(f, 1, 2, 0);
  auto bs = binomial_series(0.5, 20);
  for (int n = 0; n <= 20; ++n) CHECK(std::abs(s[n] - bs[n]) < 1e-14);
  CHECK(std::abs(s[2] + 0.125) < 1e-15);

  auto z2 = LaurentSeries::monomial(1.0, 2);
  auto r = pow_frac(z2, 1, 2, 0);
  CHECK(r.valuation() == 1);
  CHECK(std::abs(r[1] - 1.0) < 1e-15);
  auto r1 = pow_frac(z2, 1, 2, 1);
  CHECK(std::abs(r1[1] + 1.0) < 1e-15);

  auto g = LaurentSeries::from_coeffs(3, {1.0, 1.0}, 23);
  auto p = pow_frac(g, 2, 3, 0);
  CHECK(p.valuation() == 2);
  auto el = exp_log_series(2.0 / 3.0, 20);
  for (int n = 0; n <= 20; ++n) CHECK(std::abs(p[2 + n] - el[n]) < 1e-13);
  CHECK(std::abs(p[3] - 2.0 / 3.0) < 1e-15);
  CHECK(std::abs(p[4] + 1.0 / 9.0) < 1e-15);

  CHECK_THROWS_AS(pow_frac(LaurentSeries::monomial(1.0, 1), 1, 2, 0), BranchUndefined);
}

TEST_CASE("pow_frac round trip") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_series(rng, 0, 18);
    f.set(0, {1.5, 0.3});
    f = f.shifted(6);
    for (auto [p, q] : {std::pair{1, 2}, {2, 3}, {-1, 3}, {5, 6}}) {
      for (int br = 0; br < q; ++br) {
        auto g = pow_frac(f, p, q, br);
        auto lhs = pow_int(g, q);
        auto rhs = pow_int(f, p);
        int t = std::min(lhs.trunc_order(), rhs.trunc_order());
        CHECK(max_diff(lhs, rhs, rhs.valuation(), t) < 1e-12 * std::max(1.0, rhs.max_abs()));
      }
    }
  }
}

TEST_CASE("residues and primitives") {
  CHECK(residue(SeriesDifferential(LaurentSeries::monomial(1.0, -1))) == cplx(1.0));
  for (int k : {-3, -2, 0, 1, 4}) CHECK(residue(SeriesDifferential(LaurentSeries::monomial(1.0, k))) == cplx(0.0));
  auto prim = primitive(SeriesDifferential(LaurentSeries::monomial(2.0, 1)));
  CHECK(prim.valuation() == 2);
  CHECK(prim[2] == cplx(1.0));
  CHECK(prim[0] == cplx(0.0));
  CHECK_THROWS_AS(primitive(SeriesDifferential(LaurentSeries::monomial(1.0, -1))), NonzeroResidue);
  auto r = integrate_residue(SeriesDifferential(LaurentSeries::from_coeffs(-2, {3.0, 5.0})), IntegrateMode::residue);
  CHECK(r.value == cplx(5.0));
}

TEST_CASE("symplectic pairing") {
  CHECK(std::abs(symplectic_pairing(basis_e(1), basis_f(1)) - 1.0) < 1e-15);
  CHECK(std::abs(symplectic_pairing(basis_e(1), basis_e(2))) < 1e-15);
  for (int i = 1; i <= 5; ++i)
    for (int j = 1; j <= 5; ++j) {
      CHECK(std::abs(symplectic_pairing(basis_e(i), basis_f(j)) - (i == j ? 1.0 : 0.0)) < 1e-15);
      CHECK(std::abs(symplectic_pairing(basis_f(i), basis_e(j)) + (i == j ? 1.0 : 0.0)) < 1e-15);
      CHECK(std::abs(symplectic_pairing(basis_f(i), basis_f(j))) < 1e-15);
      CHECK(std::abs(symplectic_pairing(basis_e(i), basis_e(j))) < 1e-15);
    }
  std::mt19937 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_series(rng, -8, 8);
    auto g = random_series(rng, -8, 8);
    auto h = random_series(rng, -8, 8);
    f.set(-1, 0.0);
    g.set(-1, 0.0);
    h.set(-1, 0.0);
    SeriesDifferential F(f), G(g), H(h);
    CHECK(std::abs(symplectic_pairing(F, F)) < 1e-13);
    CHECK(std::abs(symplectic_pairing(F, G) + symplectic_pairing(G, F)) < 1e-13);
    cplx a(0.3, -1.2);
    SeriesDifferential FG(f.scaled(a) + g);
    CHECK(std::abs(symplectic_pairing(FG, H) - a * symplectic_pairing(F, H) - symplectic_pairing(G, H)) < 1e-13);
  }
}

TEST_CASE("sqrt shift flow") {
  auto f = SeriesDifferential(LaurentSeries::from_coeffs(-5, {1.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0, 1.0}, 10));
  auto same = sqrt_shift_flow(f, 0.0);
  CHECK(max_diff(same.base, f.base, -5, 10) == 0.0);

  // z d(z^2) = 2 z^2 dz -> 2 z^2 (1 + a/(2z^2) - a^2/(8z^4) + ...) dz
  cplx a(0.7, 0.2);
  auto w = sqrt_shift_flow(SeriesDifferential(LaurentSeries::monomial(2.0, 2)), a, -30);
  CHECK(std::abs(w.base[2] - 2.0) < 1e-15);
  CHECK(std::abs(w.base[0] - a) < 1e-15);
  CHECK(std::abs(w.base[-2] + a * a / 4.0) < 1e-15);
  CHECK(std::abs(w.base[-4] - a * a * a / 8.0) < 1e-15);
  CHECK(std::abs(residue(w)) < 1e-15);

  // numerical oracle: the expansion matches f(zeta) d zeta/dz at a sample point
  cplx z0(2.3, 0.9);
  cplx zeta = std::sqrt(z0 * z0 + a);
  auto g = LaurentSeries::from_coeffs(-3, {0.5, 1.0, 0.0, 0.0, 2.0, -1.0});
  auto gw = sqrt_shift_flow(SeriesDifferential(g), a, -80);
  cplx exact = g.eval(zeta) * z0 / zeta;
  CHECK(std::abs(gw.base.eval(z0) - exact) < 1e-12);
  CHECK(std::abs(residue(gw)) < 1e-15);

  // round trip with -a
  auto back = sqrt_shift_flow(sqrt_shift_flow(SeriesDifferential(g), a, -120), -a, -120);
  CHECK(max_diff(back.base, g, -20, 2) < 1e-12);
}

TEST_CASE("parity split") {
  auto z = LaurentSeries::variable();
  auto [o, e] = parity_split(z + z * z);
  CHECK(o[1] == cplx(1.0));
  CHECK(o[2] == cplx(0.0));
  CHECK(e[2] == cplx(1.0));
  CHECK(e[1] == cplx(0.0));
  std::mt19937 rng(9);
  auto f = random_series(rng, -4, 9);
  auto [odd, even] = parity_split(f);
  auto fm = f.subs_scale(-1.0);
  for (int k = -4; k <= 9; ++k) {
    CHECK(std::abs((f[k] - fm[k]) - 2.0 * odd[k]) < 1e-15);
    CHECK(std::abs(odd[k] + even[k] - f[k]) < 1e-15);
  }
  auto ev = LaurentSeries::from_coeffs(-2, {1.0, 0.0, 3.0, 0.0, 5.0});
  auto [o2, e2] = parity_split(ev);
  CHECK(o2.max_abs() == 0.0);
  CHECK(max_diff(e2, ev, -2, 2) == 0.0);
}
