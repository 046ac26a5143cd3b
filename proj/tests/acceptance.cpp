#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "swtr/errors.hpp"
#include "swtr/prepotential.hpp"

#include "oracles.hpp"

using namespace swtr;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);
const cplx kU0(0.3, 0.1);

struct Outcome {
  bool pass = false;
  std::string detail;
};

Eigen::MatrixXcd random_symmetric(int n, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXcd s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = cplx(u(rng), u(rng));
  return s;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

Outcome golden_tensors() {
  AiryTensors t = build_residue_constraint_tensors(15, {"a"});
  AiryTensors r = build_tensors_by_residue(15, {"a"}, Variant::residue_constraints);
  const IndexSpace& sp = t.sp;
  const double e1 = std::abs(t.A(0, 0, 0) - 0.25), e2 = std::abs(t.eps[sp.flat(3, 0)] - 1.0 / 16.0);
  const double d = max_abs_diff(t, r);
  return {e1 < 1e-13 && e2 < 1e-13 && d < 1e-12,
          "a_111 err " + sci(e1) + ", eps_3 err " + sci(e2) + ", closed form vs residues " + sci(d)};
}

Outcome atr_golden() {
  SgnTable S = atr_run(build_residue_constraint_tensors(default_kmax(1), {"a"}), 1);
  const double e1 = std::abs(S.value(0, 3, {0, 0, 0}) - 0.5);
  const double e2 = std::abs(S.value(1, 1, {S.sp.flat(3, 0)}) - 1.0 / 16.0);
  return {e1 < 1e-13 && e2 < 1e-13, "S_03;111 err " + sci(e1) + ", S_11;3 err " + sci(e2)};
}

Outcome disc_embedding() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    cplx a = 0.07 * cplx(u(rng), u(rng));
    std::vector<cplx> c{0.0, cplx(1.0 + 0.3 * u(rng), 0.3 * u(rng))};
    for (int m = 2; m < 6; ++m) c.emplace_back(u(rng), u(rng));
    auto w = embed_disc(a, LaurentSeries::from_coeffs(0, c), "a");
    for (const auto& row : eval_hamiltonians(w, Variant::residue_constraints, 15))
      for (cplx h : row) worst = std::max(worst, std::abs(h));
  }
  const double a = 0.07;
  auto w = embed_disc(a, LaurentSeries::monomial(1.0, 1), "a");
  double jerr = std::abs(w.J(-1, 0) - a);
  for (int k = 2; k <= 6; ++k) {
    const double want = std::pow(a, k) * double_factorial(2 * k - 3) / (factorial(k) * std::pow(2.0, k - 1));
    jerr = std::max(jerr, std::abs(w.J(2 * k - 3, 0) - want));
  }
  return {worst < 1e-10 && jerr < 1e-12, "max |H| over 20 discs " + sci(worst) + ", closed-form J err " + sci(jerr)};
}

Outcome atr_eo_equivalence() {
  auto t1 = build_residue_constraint_tensors(default_kmax(4), {"a"});
  auto t2 = build_residue_constraint_tensors(default_kmax(4), {"a", "b"});
  const double d1 = atr_eo_crosscheck(t1, GaugeData::from_s(t1.sp, random_symmetric(t1.sp.dim(), 41, 0.5)), 4);
  const double d2 = atr_eo_crosscheck(t2, GaugeData::from_s(t2.sp, random_symmetric(t2.sp.dim(), 42, 0.5)), 4);
  return {d1 < 1e-9 && d2 < 1e-9, "max deviation, 1 point " + sci(d1) + ", 2 points " + sci(d2)};
}

Outcome output_structure() {
  bool ok = true;
  double sym = 0.0, even = 0.0;
  int worst_excess = -1000;
  for (int nram : {1, 2}) {
    std::vector<std::string> labels{"a", "b"};
    labels.resize(nram);
    const int kmax = default_kmax(4);
    auto o = eo_run(LocalSpectralCurve::with_s(labels, random_symmetric(kmax * nram, 50 + nram, 0.5)), 4);
    for (const auto& [key, ci] : o.table.info) sym = std::max(sym, ci.sym_dev);
    auto rep = support_bound_check(o, 1e-10);
    ok = ok && rep.ok();
    for (const auto& r : rep.rows) {
      even = std::max(even, r.max_even);
      worst_excess = std::max(worst_excess, r.max_index - r.bound);
    }
  }
  ok = ok && sym < 1e-10 && even < 1e-10 && worst_excess <= 0;
  return {ok, "symmetry dev " + sci(sym) + ", max even coefficient " + sci(even) +
                  ", max index minus bound " + std::to_string(worst_excess)};
}

Outcome hyperelliptic_g1() {
  SWCurve c = new_curve(1, {kU0});
  CycleBasis cyc = build_cycles(c);
  PeriodData pd = periods(c, cyc);
  BergmanData B = bergman_kernel(c, cyc, pd);

  // tau against d b / d a through u
  const double h = 1e-4;
  SwPoint pp = sw_point(1, {kU0 + h}, 1.0, &cyc), pm = sw_point(1, {kU0 - h}, 1.0, &cyc);
  SwPoint pp2 = sw_point(1, {kU0 + 0.5 * h}, 1.0, &cyc), pm2 = sw_point(1, {kU0 - 0.5 * h}, 1.0, &cyc);
  const cplx d1 = (pp.pd.b[0] - pm.pd.b[0]) / (pp.pd.a[0] - pm.pd.a[0]);
  const cplx d2 = (pp2.pd.b[0] - pm2.pd.b[0]) / (pp2.pd.a[0] - pm2.pd.a[0]);
  const double tau_err = std::abs((4.0 * d2 - d1) / 3.0 - pd.tau(0, 0)) / std::abs(pd.tau(0, 0));

  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> U(-1.8, 1.8);
  double sym = 0.0, theta = 0.0;
  int tested = 0;
  while (tested < 20) {
    const cplx zq(U(rng), U(rng)), zp(U(rng), U(rng));
    if (std::abs(zp - zq) < 0.3 || !oracle::segment_clear(c, zq, zp, 0.15)) continue;
    const CurvePoint q{zq, cyc.y_principal(zq)};
    auto [want, p] = oracle::theta_kernel(c, q, zp, pd.A_hol(0, 0), pd.tau(0, 0));
    const cplx got = B.eval(p, q);
    sym = std::max(sym, std::abs(got - B.eval(q, p)) / std::max(1.0, std::abs(got)));
    theta = std::max(theta, std::abs(got - want) / std::max(1.0, std::abs(want)));
    ++tested;
  }
  double aper = 0.0, bper = 0.0;
  for (cplx zq : {cplx(2.7, 1.9), cplx(-2.2, 2.5), cplx(0.4, -2.6)}) {
    const CurvePoint q{zq, cyc.y_principal(zq)};
    DiffFn Bq = [&](const CurvePoint& p) {
      Eigen::VectorXcd v(1);
      v[0] = B.eval(p, q);
      return v;
    };
    aper = std::max(aper, std::abs(integrate_A(c, cyc, 1, Bq)[0]));
    const cplx want = 2.0 * kPi * kI * pd.omega(q)[0];
    bper = std::max(bper, std::abs(integrate_B(c, cyc, 1, Bq)[0] - want) / std::max(1.0, std::abs(want)));
  }
  const bool ok = tau_err < 1e-5 && sym < 1e-9 && aper < 1e-8 && bper < 1e-6 && theta < 1e-6;
  return {ok, "tau vs db/da " + sci(tau_err) + ", symmetry " + sci(sym) + ", A-periods " + sci(aper) +
                  ", B-periods " + sci(bper) + ", theta oracle " + sci(theta)};
}

Outcome local_global() {
  double worst_b = 0.0, worst_pair = 0.0;
  for (const std::vector<cplx>& u : {std::vector<cplx>{kU0}, std::vector<cplx>{cplx(0.3, 0.2), cplx(-0.8, 0.3)}}) {
    const int g = static_cast<int>(u.size());
    SWCurve c = new_curve(g, u);
    CycleBasis cyc = build_cycles(c);
    PeriodData pd = periods(c, cyc);
    BergmanData B = bergman_kernel(c, cyc, pd);
    auto charts = standard_charts(c, c, cyc);
    LocalExpansions le = local_expansions(B, charts, 6);
    const IndexSpace sp = le.space();
    const double scale = le.c.cwiseAbs().maxCoeff();
    const int K = 5;
    for (std::size_t al = 0; al < charts.size(); ++al) {
      DiffFn e = [&](const CurvePoint& p) { return ebar_global(B, charts[al], K, p, 0.5 * charts[al].radius); };
      Eigen::MatrixXcd A(g, K), Bp(g, K);
      for (int i = 1; i <= g; ++i) {
        A.row(i - 1) = integrate_A(c, cyc, i, e).transpose();
        Bp.row(i - 1) = integrate_B(c, cyc, i, e).transpose();
      }
      Eigen::MatrixXcd pairing = Bp - pd.tau * A;
      for (int k = 1; k <= K; ++k)
        for (int j = 0; j < g; ++j) {
          const cplx want = 2.0 * kPi * kI * le.c(sp.flat(k, static_cast<int>(al)), j);
          const double den = 2.0 * kPi * std::max(std::abs(want) / (2.0 * kPi), 1e-3 * scale);
          worst_b = std::max(worst_b, std::abs(Bp(j, k - 1) - want) / den);
          worst_pair = std::max(worst_pair, std::abs(pairing(j, k - 1) - want) / den);
        }
    }
  }
  return {worst_b < 1e-6 && worst_pair < 1e-6,
          "g = 1, 2, k <= 5: B-period rel err " + sci(worst_b) + ", bilinear pairing " + sci(worst_pair)};
}

Outcome main_theorem() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-0.9, 0.9);
  std::vector<cplx> u2{cplx(U(rng), U(rng)), cplx(U(rng), U(rng))};
  std::vector<std::vector<cplx>> points{{kU0}, {cplx(-0.45, 0.6)}, u2};
  std::string matched;
  bool ok = true;
  double worst = 0.0;
  std::ostringstream os;
  for (const auto& u : points) {
    VerifyConfig cfg;
    cfg.genus = static_cast<int>(u.size());
    cfg.u0 = u;
    Eigen::VectorXcd d(cfg.genus);
    for (int k = 0; k < cfg.genus; ++k) d[k] = cplx(3e-3, 1e-3 * (k + 1));
    cfg.delta = {d};
    cfg.seed = 2024;
    VerifyReport rep = verify_theorem(cfg);
    ok = ok && rep.pass;
    if (matched.empty()) matched = rep.matched_convention;
    ok = ok && !rep.matched_convention.empty() && rep.matched_convention == matched;
    for (const auto& c : rep.checks)
      if (!c.mandatory && c.informative && c.name.find("[" + matched + "]") != std::string::npos)
        worst = std::max(worst, c.rel_err);
    os << "g=" << cfg.genus << " " << (rep.pass ? "ok" : "FAILED") << " (" << rep.matched_convention << "); ";
  }
  ok = ok && worst < 1e-3;
  return {ok, os.str() + "convention " + (matched.empty() ? "none" : matched) + ", worst rel err " + sci(worst)};
}

Outcome triviality() {
  auto r = triviality_search(2024, 40);
  return {r.trials == 40 && r.min_max_h > 1e-8,
          std::to_string(r.trials) + " trials, smallest max |H| " + sci(r.min_max_h)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, 1.0, golden_tensors},     {2, 1.0, atr_golden},      {3, 5.0, disc_embedding},
      {4, 30.0, atr_eo_equivalence}, {5, 10.0, output_structure}, {6, 120.0, hyperelliptic_g1},
      {7, 60.0, local_global},      {8, 600.0, main_theorem},  {9, 5.0, triviality},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && dt < c.limit_s;
    if (!pass) ++failed;
    std::printf("criterion %d: %s  %s  [%.2f s, limit %.0f s]\n", c.id, pass ? "PASS" : "FAIL", o.detail.c_str(), dt,
                c.limit_s);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
