#include <cmath>
#include <limits>

#include "swtr/errors.hpp"
#include "swtr/sw.hpp"

namespace swtr {

LaurentSeries shift_series(const LaurentSeries& f, cplx c) {
  if (f.min_exp() < 0) {
    for (int e = f.min_exp(); e < 0; ++e)
      if (f[e] != cplx(0.0)) throw std::invalid_argument("shift_series: negative powers");
  }
  const int top = std::min(f.top(), f.trunc_order());
  std::vector<cplx> out(static_cast<std::size_t>(std::max(top, 0) + 1), 0.0);
  // sum_n f_n (c + s)^n, coefficientwise in s
  for (int n = 0; n <= top; ++n) {
    cplx fn = f[n];
    if (fn == cplx(0.0)) continue;
    cplx cp = 1.0;
    std::vector<cplx> cpow(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) {
      cpow[k] = cp;
      cp *= c;
    }
    double b = 1.0;  // C(n, m)
    for (int m = 0; m <= n; ++m) {
      out[m] += fn * b * cpow[n - m];
      b = b * (n - m) / (m + 1);
    }
  }
  return LaurentSeries::from_coeffs(0, out, f.exact() ? kExact : top);
}

namespace {

// Taylor coefficients of P at z0 by direct differentiation.
std::vector<cplx> taylor_coeffs(const std::vector<cplx>& p, cplx z0) {
  const int n = static_cast<int>(p.size());
  std::vector<cplx> out(n, 0.0);
  for (int m = 0; m < n; ++m) {
    // sum_j p_j C(j, m) z0^{j-m}
    cplx acc = 0.0;
    for (int j = m; j < n; ++j) {
      double b = 1.0;
      for (int r = 0; r < m; ++r) b = b * (j - r) / (r + 1);
      acc += p[j] * b * std::pow(z0, j - m);
    }
    out[m] = acc;
  }
  return out;
}

LaurentSeries even_in_t(const LaurentSeries& f_eta, int order) {
  // f(eta) even -> series in t = eta^2
  std::vector<cplx> c(static_cast<std::size_t>(order / 2 + 1), 0.0);
  for (int m = 0; 2 * m <= std::min(order, f_eta.trunc_order()); ++m) c[m] = f_eta[2 * m];
  return LaurentSeries::from_coeffs(0, c, static_cast<int>(c.size()) - 1);
}

}  // namespace

LaurentSeries critical_inverse(const std::vector<cplx>& P, cplx zi, int order) {
  auto tc = taylor_coeffs(P, zi);
  std::vector<cplx> q(tc.begin() + 2, tc.end());
  if (q.empty() || std::abs(q[0]) < 1e-300) throw SingularCurve("degenerate critical point");
  LaurentSeries Q = LaurentSeries::from_coeffs(0, q, order);
  LaurentSeries eta_of_delta = pow_frac(Q, 1, 2, 0).shifted(1);
  return functional_inverse(eta_of_delta.truncated(order));
}

CurvePoint StandardChart::point(cplx etabar, const SWCurve& ref) const {
  const cplx z = z_of_etabar.eval(etabar);
  return {z, ref.y_near(z, y_of_etabar.eval(etabar))};
}

cplx StandardChart::dz_detabar(cplx etabar) const { return z_of_etabar.derivative().eval(etabar); }

std::vector<StandardChart> standard_charts(const SWCurve& c, const SWCurve& ref, const CycleBasis& cyc_ref,
                                           const ChartOptions& opt) {
  const int N = opt.order;
  if (c.g != ref.g) throw OutOfNeighbourhood("genus differs from the reference curve");
  const cplx L2 = 2.0 * ref.lambda_pow();
  std::vector<StandardChart> out;
  for (const RamPoint& r : ramification_points(ref, cyc_ref)) {
    StandardChart ch;
    ch.ram = r;
    ch.order = N;
    ch.branch = 0;
    const cplx zi = r.z, xi = r.x;
    const double sheet = static_cast<double>(r.sheet);
    const cplx y0 = r.sheet > 0 ? r.y : -r.y;  // principal-sheet value at z_i

    ch.z_of_eta = critical_inverse(ref.P_coeffs, zi, N);
    // Y_+(x_i + t) = y0 sqrt(1 + (2 x_i t + t^2) / y0^2)
    LaurentSeries rad = LaurentSeries::from_coeffs(0, {1.0, 2.0 * xi / (y0 * y0), 1.0 / (y0 * y0)}, N);
    ch.Yplus_t = pow_frac(rad, 1, 2, 0).scaled(y0);

    auto [zodd, zev] = parity_split(ch.z_of_eta);
    LaurentSeries eta2 = LaurentSeries::monomial(1.0, 2, N);
    LaurentSeries Y_eta = compose(ch.Yplus_t, eta2);
    LaurentSeries integrand = (zodd * LaurentSeries::monomial(1.0, 1, N)) / Y_eta;
    LaurentSeries H3 = primitive(SeriesDifferential(integrand)).scaled(3.0);
    LaurentSeries hplus = pow_frac(H3.truncated(N), 1, 3, ch.branch);
    ch.etabar_of_eta = hplus.scaled(sheet);
    ch.eta_of_etabar = functional_inverse(ch.etabar_of_eta.truncated(N));
    ch.z_of_etabar = compose(ch.z_of_eta, ch.eta_of_etabar) + zi;
    LaurentSeries t_of_etabar = ch.eta_of_etabar * ch.eta_of_etabar;
    ch.y_of_etabar = compose(ch.Yplus_t, t_of_etabar).scaled(sheet);

    ch.F_series = even_in_t(hplus * hplus, N);
    ch.Finv_series = functional_inverse(ch.F_series.truncated(N / 2));
    ch.Fprime0 = ch.F_series[1];
    ch.zeven_t = even_in_t(zev, N) + zi;

    LaurentSeries Fp_t = ch.F_series.derivative();
    LaurentSeries num = ch.z_of_etabar - compose(ch.zeven_t, t_of_etabar);
    LaurentSeries den = compose(ch.Yplus_t, t_of_etabar) * compose(Fp_t, t_of_etabar);
    ch.ybar_of_etabar = (num / den).scaled(sheet);

    // singular values of t: other critical values and the branch values of Y
    double Rt = std::numeric_limits<double>::infinity();
    for (cplx zj : ref.critical_points)
      if (std::abs(zj - zi) > 1e-12) Rt = std::min(Rt, std::abs(ref.P(zj) - xi));
    Rt = std::min({Rt, std::abs(L2 - xi), std::abs(-L2 - xi)});
    ch.d_min = std::abs(hplus[1]) * std::sqrt(Rt);
    ch.eps = 0.2 * ch.d_min;
    ch.M = 0.5 * ch.d_min;
    ch.radius = 0.35 * ch.d_min;

    // the matching critical point of c
    cplx best = c.critical_points.front();
    for (cplx zj : c.critical_points)
      if (std::abs(zj - zi) < std::abs(best - zi)) best = zj;
    ch.target_critical = best;
    const cplx tshift = c.P(best) - xi;
    if (std::abs(tshift) > 0.5 * Rt) throw OutOfNeighbourhood("critical value moved outside the chart");
    ch.shift = ch.F_series.eval(tshift);
    if (std::abs(ch.shift) >= opt.guard * ch.eps * ch.eps)
      throw OutOfNeighbourhood("|F(P(z_i(u); u))| = " + std::to_string(std::abs(ch.shift)) + " exceeds the guard " +
                               std::to_string(opt.guard * ch.eps * ch.eps) + " at " + r.label);
    out.push_back(std::move(ch));
  }
  return out;
}

}  // namespace swtr
