#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "swtr/airy.hpp"
#include "swtr/errors.hpp"

using namespace swtr;

namespace {

// Intersection numbers <tau_{d_1} ... tau_{d_n}>_g from the DVV recursion.
class KontsevichWitten {
 public:
  double operator()(int g, std::vector<int> d) {
    std::sort(d.begin(), d.end());
    int sum = 0;
    for (int x : d) sum += x;
    if (sum != 3 * g - 3 + static_cast<int>(d.size())) return 0.0;
    for (int x : d)
      if (x < 0) return 0.0;
    if (g == 0 && d == std::vector<int>{0, 0, 0}) return 1.0;
    if (g == 1 && d == std::vector<int>{1}) return 1.0 / 24.0;
    auto key = std::make_pair(g, d);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    // peel off the largest entry
    int k = d.back();
    std::vector<int> rest(d.begin(), d.end() - 1);
    double acc = 0.0;
    for (std::size_t j = 0; j < rest.size(); ++j) {
      std::vector<int> r = rest;
      int dj = r[j];
      r[j] = dj + k - 1;
      acc += df(2 * k + 2 * dj - 1) / df(2 * dj - 1) * (*this)(g, r);
    }
    for (int a = 0; a <= k - 2; ++a) {
      int b = k - 2 - a;
      double w = 0.5 * df(2 * a + 1) * df(2 * b + 1);
      if (g >= 1) {
        std::vector<int> r = rest;
        r.push_back(a);
        r.push_back(b);
        acc += w * (*this)(g - 1, r);
      }
      const int m = static_cast<int>(rest.size());
      for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> I1{a}, I2{b};
        for (int p = 0; p < m; ++p) (mask >> p & 1u ? I1 : I2).push_back(rest[p]);
        for (int g1 = 0; g1 <= g; ++g1) {
          int g2 = g - g1;
          if (2 * g1 - 2 + static_cast<int>(I1.size()) <= 0 || 2 * g2 - 2 + static_cast<int>(I2.size()) <= 0) continue;
          acc += w * (*this)(g1, I1) * (*this)(g2, I2);
        }
      }
    }
    double v = acc / df(2 * k + 1);
    memo_[key] = v;
    return v;
  }

  static double df(int n) {
    double r = 1.0;
    for (int i = n; i > 1; i -= 2) r *= i;
    return r;
  }

 private:
  std::map<std::pair<int, std::vector<int>>, double> memo_;
};

Eigen::MatrixXcd random_symmetric(int n, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXcd s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = cplx(u(rng), u(rng));
  return s;
}

GaugeData random_gauge(const IndexSpace& sp, int cutoff, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  GaugeData g = GaugeData::identity(sp);
  g.cutoff = cutoff;
  int m = sp.prefix(cutoff);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) g.c(i, j) += cplx(u(rng), u(rng));
  g.d = g.c.inverse();
  g.s = random_symmetric(sp.dim(), rng, 0.3);
  return g;
}

double tensor_diff(const AiryTensors& a, const AiryTensors& b) { return max_abs_diff(a, b); }

}  // namespace

TEST_CASE("closed-form tensors: golden values and residue evaluation") {
  auto t = build_residue_constraint_tensors(15, {"a"});
  CHECK(t.A(0, 0, 0) == cplx(0.25));
  CHECK(t.eps[2] == cplx(1.0 / 16.0));
  auto r = build_tensors_by_residue(15, {"a"}, Variant::residue_constraints);
  CHECK(max_abs_diff(t, r) < 1e-12);
  // b^k_{ij} = j/4 at k = i + j - 3, i odd
  CHECK(t.B(4, 6, 7 + 5 - 3 - 1) == cplx(7.0 / 4.0));
  CHECK(t.C(8, 2, 2) == cplx(0.25));
  CHECK(t.C(7, 0, 3) == cplx(0.0));
}

TEST_CASE("closed-form tensors are block diagonal in the ramification label") {
  auto t = build_residue_constraint_tensors(9, {"p", "q"});
  auto r = build_tensors_by_residue(9, {"p", "q"}, Variant::residue_constraints);
  CHECK(max_abs_diff(t, r) < 1e-12);
  const auto& sp = t.sp;
  CHECK(t.A(sp.flat(1, 1), sp.flat(1, 1), sp.flat(1, 1)) == cplx(0.25));
  CHECK(t.A(sp.flat(1, 0), sp.flat(1, 1), sp.flat(1, 1)) == cplx(0.0));
  CHECK(t.eps[static_cast<std::size_t>(sp.flat(3, 1))] == cplx(1.0 / 16.0));
}

TEST_CASE("rows with even first index vanish") {
  for (Variant v : {Variant::residue_constraints, Variant::tr_variant}) {
    auto t = build_tensors_by_residue(12, {"a"}, v);
    double m = 0.0;
    for (int i = 1; i < 12; i += 2) {
      m = std::max(m, std::abs(t.eps[i]));
      for (int j = 0; j < 12; ++j)
        for (int k = 0; k < 12; ++k) m = std::max({m, std::abs(t.A(i, j, k)), std::abs(t.B(i, j, k)), std::abs(t.C(i, j, k))});
    }
    CHECK(m == 0.0);
  }
}

TEST_CASE("TR variant agrees with residue constraints on odd modes") {
  auto a = build_residue_constraint_tensors(15, {"a"});
  auto t = build_tr_variant_tensors(15, {"a"});
  double m = 0.0;
  for (int i = 0; i < 15; ++i)
    for (int j = 0; j < 15; j += 2)
      for (int k = 0; k < 15; k += 2) {
        m = std::max(m, std::abs(a.A(i, j, k) - t.A(i, j, k)));
        m = std::max(m, std::abs(a.B(i, j, k) - t.B(i, j, k)));
        m = std::max(m, std::abs(a.C(i, j, k) - t.C(i, j, k)));
      }
  for (int i = 0; i < 15; ++i) m = std::max(m, std::abs(a.eps[i] - t.eps[i]));
  CHECK(m < 1e-14);
}

TEST_CASE("gauge: identity, s-only and validation") {
  auto t = build_residue_constraint_tensors(10, {"a"});
  auto id = gauge_transform(t, GaugeData::identity(t.sp));
  CHECK(tensor_diff(t, id) == 0.0);

  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(10, 10);
  s(0, 0) = 0.8;
  s(0, 2) = s(2, 0) = 0.3;
  auto g = gauge_transform(t, GaugeData::from_s(t.sp, s));
  CHECK(std::abs(g.eps[0] - 0.2) < 1e-15);
  CHECK(std::abs(g.eps[2] - 1.0 / 16.0) < 1e-15);
  CHECK(g.A.v == t.A.v);
  // b + a s: b^{1}_{11} picks up a_{111} s^{11}
  CHECK(std::abs(g.B(0, 0, 0) - (t.B(0, 0, 0) + 0.25 * 0.8)) < 1e-15);

  GaugeData bad = GaugeData::from_s(t.sp, s);
  bad.s(1, 4) = 1.0;
  CHECK_FALSE(validate_gauge(bad).ok());
  CHECK_THROWS_AS(gauge_transform(t, bad), InvalidGauge);

  GaugeData notinv = GaugeData::identity(t.sp);
  notinv.cutoff = 3;
  notinv.c(0, 1) = 0.5;
  CHECK_FALSE(validate_gauge(notinv).ok());

  GaugeData leak = GaugeData::identity(t.sp);
  leak.cutoff = 2;
  leak.c(5, 5) = 2.0;
  leak.d(5, 5) = 0.5;
  auto rep = validate_gauge(leak);
  CHECK_FALSE(rep.ok());
  CHECK(rep.checks[0].pass);
  CHECK_FALSE(rep.checks[2].pass);
}

TEST_CASE("gauge composition equals successive transformations") {
  std::mt19937_64 rng(11);
  auto t = build_residue_constraint_tensors(8, {"a"});
  auto g1 = random_gauge(t.sp, 3, rng);
  auto g2 = random_gauge(t.sp, 4, rng);
  CHECK(validate_gauge(g1, 1e-10).ok());
  auto seq = gauge_transform(gauge_transform(t, g1), g2);
  auto once = gauge_transform(t, compose_gauges(g1, g2));
  CHECK(max_abs_diff(seq, once) < 1e-12);
}

TEST_CASE("ATR initial data and intersection numbers") {
  auto t = build_residue_constraint_tensors(default_kmax(4), {"a"});
  auto tab = atr_run(t, 4);
  CHECK(std::abs(tab.value(0, 3, {0, 0, 0}) - 0.5) < 1e-13);
  CHECK(std::abs(tab.value(1, 1, {2}) - 1.0 / 16.0) < 1e-13);

  KontsevichWitten kw;
  double worst = 0.0;
  for (const auto& [key, cell] : tab.cells) {
    auto [g, n] = key;
    double norm = std::pow(0.5, 2 * g - 2 + n);
    cell.for_each([&](const std::vector<int>& idx, cplx v) {
      std::vector<int> d;
      double pre = norm;
      bool odd = true;
      for (int f : idx) {
        int k = f + 1;
        if (k % 2 == 0) odd = false;
        d.push_back((k - 1) / 2);
        pre *= KontsevichWitten::df(k);
      }
      double expect = odd ? pre * kw(g, d) : 0.0;
      worst = std::max(worst, std::abs(v - expect) / std::max(1.0, std::abs(expect)));
    });
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("ATR output structure") {
  std::mt19937_64 rng(5);
  auto t0 = build_residue_constraint_tensors(default_kmax(4), {"a", "b"});
  auto t = gauge_transform(t0, GaugeData::from_s(t0.sp, random_symmetric(t0.sp.dim(), rng, 0.5)));
  auto tab = atr_run(t, 4);
  CHECK(tab.cells.size() == 10);
  for (const auto& [key, ci] : tab.info) {
    INFO("cell " << key.first << "," << key.second);
    CHECK(ci.sym_dev < 1e-10);
    CHECK(ci.odd_only);
    CHECK(ci.max_index <= 6 * key.first + 2 * key.second - 4);
  }
}

TEST_CASE("ATR rejects an insufficient index range") {
  auto t = build_residue_constraint_tensors(10, {"a"});
  CHECK_THROWS_AS(atr_run(t, 4), TruncationInsufficient);
  CHECK_NOTHROW(atr_run(t, 2));
}

TEST_CASE("ATR flags coefficients beyond the support bound") {
  auto t = build_residue_constraint_tensors(default_kmax(2), {"a"});
  t.eps[5] = 1.0;
  CHECK_THROWS_AS(atr_run(t, 2), TruncationInsufficient);
}

TEST_CASE("sgn table export") {
  auto t = build_residue_constraint_tensors(default_kmax(1), {"a"});
  auto tab = atr_run(t, 1);
  auto csv = tab.to_csv();
  CHECK(csv.find("g,n,indices,re,im\n") == 0);
  CHECK(csv.find("0,3,(1 1 1),0.5,0\n") != std::string::npos);
  CHECK(csv.find("1,1,(3),0.0625,0\n") != std::string::npos);
  CHECK(tab.to_json().find("\"basis_tag\": \"airy\"") != std::string::npos);
}

TEST_CASE("Hamiltonians: zero element and even modes") {
  WElement zero = WElement::from_coordinates({"a"}, {{}}, {{}});
  for (Variant v : {Variant::residue_constraints, Variant::tr_variant}) {
    auto hs = eval_hamiltonians(zero, v, 12);
    for (const auto& h : hs[0]) CHECK(h == cplx{});
  }
  WElement w = WElement::from_coordinates({"a"}, {{}}, {{0.0, 0.7, 0.0, -0.2}});
  auto h = eval_hamiltonians(w, Variant::residue_constraints, 6)[0];
  CHECK(std::abs(h[1] + 0.7) < 1e-15);
  CHECK(std::abs(h[3] - 0.2) < 1e-15);
}

TEST_CASE("Hamiltonians from tensors match residue evaluation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> x(4), y(6);
  for (auto& v : x) v = {u(rng), u(rng)};
  for (auto& v : y) v = {u(rng), u(rng)};
  auto w = WElement::from_coordinates({"a"}, {x}, {y});
  auto t = build_residue_constraint_tensors(24, {"a"});
  auto ht = hamiltonians_from_tensors(t, w, 12)[0];
  auto hr = eval_hamiltonians(w, Variant::residue_constraints, 12)[0];
  for (int i = 0; i < 12; ++i) CHECK(std::abs(ht[i] - hr[i]) < 1e-12);

  auto ttr = build_tr_variant_tensors(24, {"a"});
  auto htr = hamiltonians_from_tensors(ttr, w, 12)[0];
  auto hrr = eval_hamiltonians(w, Variant::tr_variant, 12)[0];
  for (int i = 0; i < 12; ++i) CHECK(std::abs(htr[i] - hrr[i]) < 1e-12);
}

TEST_CASE("disc embedding: closed-form J values") {
  const double a = 0.07;
  auto w = embed_disc(a, LaurentSeries::monomial(1.0, 1), "a");
  CHECK(std::abs(w.J(-1, 0) - a) < 1e-12);
  for (int k = 2; k <= 6; ++k) {
    double expect = std::pow(a, k) * double_factorial(2 * k - 3) / (factorial(k) * std::pow(2.0, k - 1));
    CHECK(std::abs(w.J(2 * k - 3, 0) - expect) < 1e-12);
  }
  CHECK(std::abs(w.J(0, 0)) < 1e-15);
  CHECK(std::abs(w.J(2, 0)) < 1e-15);
}

TEST_CASE("disc embedding lies on the Lagrangian") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    cplx a = 0.07 * cplx(u(rng), u(rng));
    std::vector<cplx> c{0.0, cplx(1.0 + 0.3 * u(rng), 0.3 * u(rng))};
    for (int m = 2; m < 6; ++m) c.emplace_back(u(rng), u(rng));
    auto w = embed_disc(a, LaurentSeries::from_coeffs(0, c), "a");
    auto hs = eval_hamiltonians(w, Variant::residue_constraints, 15);
    for (const auto& h : hs[0]) worst = std::max(worst, std::abs(h));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("disc embedding rejects degenerate discs") {
  CHECK_THROWS_AS(embed_disc(0.01, LaurentSeries::monomial(1.0, 2), "a"), DegenerateDisc);
  CHECK_THROWS_AS(embed_disc(0.01, LaurentSeries::monomial(1.0, -1), "a"), DegenerateDisc);
}

TEST_CASE("no finite element with x^1 != 0 solves all Hamiltonians") {
  auto r = triviality_search(2024, 40);
  CHECK(r.trials == 40);
  CHECK(r.min_max_h > 1e-8);
}
