#include <cmath>
#include <numbers>
#include <sstream>

#include "swtr/errors.hpp"
#include "swtr/sw.hpp"

namespace swtr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Ring {
  std::vector<cplx> eb;  // etabar nodes
  std::vector<CurvePoint> pts;
  std::vector<cplx> dz;  // dz / d etabar
};

Ring make_ring(const StandardChart& ch, const SWCurve& curve, double radius, int nodes) {
  Ring r;
  LaurentSeries dzs = ch.z_of_etabar.derivative();
  for (int n = 0; n < nodes; ++n) {
    const cplx e = std::polar(radius, kTwoPi * n / nodes);
    r.eb.push_back(e);
    r.pts.push_back(ch.point(e, curve));
    r.dz.push_back(dzs.eval(e));
  }
  return r;
}

// P_{kk'} = [etabar1^{k-1} etabar2^{k'-1}] of the regular part of B in the chart pair.
Eigen::MatrixXcd regular_block(const BergmanData& b, const Ring& r1, const Ring& r2, bool same, int kmax,
                               double* fmax) {
  const int N1 = static_cast<int>(r1.eb.size()), N2 = static_cast<int>(r2.eb.size());
  Eigen::MatrixXcd F(N1, N2);
  double mx = 0.0;
  for (int n = 0; n < N1; ++n)
    for (int m = 0; m < N2; ++m) {
      cplx v = b.eval(r1.pts[n], r2.pts[m]) * r1.dz[n] * r2.dz[m];
      if (same) {
        const cplx d = r1.eb[n] - r2.eb[m];
        v -= 1.0 / (d * d);
      }
      F(n, m) = v;
      mx = std::max(mx, std::abs(v));
    }
  if (fmax) *fmax = std::max(*fmax, mx);
  Eigen::MatrixXcd W1(kmax, N1), W2(N2, kmax);
  for (int k = 1; k <= kmax; ++k) {
    for (int n = 0; n < N1; ++n) W1(k - 1, n) = std::pow(r1.eb[n], -(k - 1)) / static_cast<double>(N1);
    for (int m = 0; m < N2; ++m) W2(m, k - 1) = std::pow(r2.eb[m], -(k - 1)) / static_cast<double>(N2);
  }
  return W1 * F * W2;
}

}  // namespace

LocalExpansions local_expansions(const BergmanData& b, const std::vector<StandardChart>& charts, int kmax,
                                 const ExtractOptions& opt) {
  const int nram = static_cast<int>(charts.size());
  const int g = b.curve.g;
  LocalExpansions le;
  le.kmax = kmax;
  for (const auto& ch : charts) le.labels.push_back(ch.ram.label);
  const IndexSpace sp = le.space();

  le.c = Eigen::MatrixXcd::Zero(sp.dim(), g);
  for (int al = 0; al < nram; ++al) {
    const auto& ch = charts[al];
    LaurentSeries base = ch.z_of_etabar.derivative() / ch.y_of_etabar;
    LaurentSeries zp = LaurentSeries::monomial(1.0, 0);
    for (int m = 0; m < g; ++m) {
      LaurentSeries hol = zp * base;
      for (int k = 1; k <= kmax; ++k)
        for (int j = 0; j < g; ++j) le.c(sp.flat(k, al), j) += b.pd.norm_matrix(j, m) * hol[k - 1] / static_cast<double>(k);
      zp = zp * ch.z_of_etabar;
    }
  }

  auto extract = [&](double scale, double* fmax) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(sp.dim(), sp.dim());
    std::vector<Ring> inner, outer;
    for (const auto& ch : charts) {
      outer.push_back(make_ring(ch, b.curve, scale * ch.radius, opt.nodes));
      inner.push_back(make_ring(ch, b.curve, 0.8 * scale * ch.radius, opt.nodes));
    }
    for (int al = 0; al < nram; ++al)
      for (int be = 0; be < nram; ++be) {
        Eigen::MatrixXcd P = regular_block(b, outer[al], inner[be], al == be, kmax, fmax);
        for (int k = 1; k <= kmax; ++k)
          for (int l = 1; l <= kmax; ++l) s(sp.flat(k, al), sp.flat(l, be)) = P(k - 1, l - 1) / static_cast<double>(k * l);
      }
    return s;
  };
  double fmax = 0.0;
  le.s = extract(1.0, &fmax);
  Eigen::MatrixXcd s2 = extract(0.75, &fmax);
  double dev = 0.0, asym = 0.0;
  for (int f1 = 0; f1 < sp.dim(); ++f1)
    for (int f2 = 0; f2 < sp.dim(); ++f2) {
      const int k = sp.k_of(f1), l = sp.k_of(f2);
      const double r1 = 0.75 * charts[sp.alpha_of(f1)].radius, r2 = 0.6 * charts[sp.alpha_of(f2)].radius;
      const double w = k * l * std::pow(r1, k - 1) * std::pow(r2, l - 1) / std::max(1.0, fmax);
      dev = std::max(dev, std::abs(le.s(f1, f2) - s2(f1, f2)) * w);
      // B is symmetric; the two Cauchy rings are not
      asym = std::max(asym, std::abs(le.s(f1, f2) - le.s(f2, f1)) * w);
    }
  le.s = 0.5 * (le.s + le.s.transpose()).eval();
  le.s_check = std::max(dev, asym);
  if (le.s_check > opt.tol) {
    std::ostringstream os;
    os << "Bergman regular part unstable: radius deviation " << dev << ", asymmetry " << asym;
    throw ExtractionNotConverged(os.str());
  }
  return le;
}

Eigen::VectorXcd ebar_global(const BergmanData& b, const StandardChart& ch, int kmax, const CurvePoint& p,
                             double radius, int nodes) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(kmax);
  LaurentSeries dzs = ch.z_of_etabar.derivative();
  for (int n = 0; n < nodes; ++n) {
    const cplx e = std::polar(radius, kTwoPi * n / nodes);
    const cplx v = b.eval(p, ch.point(e, b.curve)) * dzs.eval(e) * e / static_cast<double>(nodes);
    cplx ep = 1.0;
    for (int k = 1; k <= kmax; ++k) {
      ep /= e;
      out[k - 1] += v * ep / static_cast<double>(k);
    }
  }
  return out;
}

WElement sw_embed_global(const SWCurve& c, const SWCurve& ref, const std::vector<StandardChart>& charts) {
  WElement out;
  for (const auto& ch : charts) {
    const int N = ch.order;
    const double sheet = static_cast<double>(ch.ram.sheet);
    cplx zu = c.critical_points.front();
    for (cplx z : c.critical_points)
      if (std::abs(z - ch.ram.z) < std::abs(zu - ch.ram.z)) zu = z;
    const cplx tu = c.P(zu) - ch.ram.x;
    const cplx a = ch.F_series.eval(tu);
    if (std::abs(a) >= 0.5 * ch.eps * ch.eps) throw OutOfNeighbourhood("deformation outside the chart at " + ch.ram.label);

    // t = x - x_i(u0) as a series in zeta, F(x) = zeta^2 + a
    LaurentSeries z2 = LaurentSeries::monomial(1.0, 2, N);
    LaurentSeries T = compose(shift_series(ch.Finv_series, a), z2);
    LaurentSeries s = T - tu;
    s.set(0, 0.0);
    LaurentSeries eta_u = pow_frac(s.shifted(-2), 1, 2, 0).shifted(1);
    LaurentSeries zu_of_eta = critical_inverse(c.P_coeffs, zu, N);
    LaurentSeries zev0 = compose(shift_series(ch.zeven_t, tu), s);
    LaurentSeries Yp = compose(shift_series(ch.Yplus_t, tu), s);
    LaurentSeries Fp = compose(shift_series(ch.F_series.derivative(), tu), s);
    LaurentSeries den = Yp * Fp;

    LaurentSeries best;
    for (double sg : {1.0, -1.0}) {
      LaurentSeries zz = compose(zu_of_eta, eta_u.scaled(sg)) + zu;
      LaurentSeries yb = ((zz - zev0) / den).scaled(sheet);
      if (best.data().empty() || std::abs(yb[1] - 1.0) < std::abs(best[1] - 1.0)) best = yb;
    }
    const int K = std::min(best.trunc_order(), N - 4);
    std::vector<cplx> poly(static_cast<std::size_t>(K + 1));
    for (int k = 0; k <= K; ++k) poly[k] = best[k];
    LaurentSeries y_poly = LaurentSeries::from_coeffs(0, poly);
    WElement w = embed_disc(a, y_poly, ch.ram.label);
    out.labels.push_back(ch.ram.label);
    out.series.push_back(w.series.front());
  }
  (void)ref;
  return out;
}

GDecomposition decompose_in_G(const WElement& local, const PeriodData& pd, const LocalExpansions& le) {
  const int nram = static_cast<int>(le.labels.size());
  if (local.labels != le.labels) throw ConfigError("local data labels do not match the expansion labels");
  const int g = static_cast<int>(pd.norm_matrix.rows());
  const IndexSpace sp = le.space();
  GDecomposition d;
  d.xi.assign(nram, std::vector<cplx>(le.kmax, 0.0));
  for (int al = 0; al < nram; ++al)
    for (int k = 1; k <= le.kmax; ++k) d.xi[al][k - 1] = local.J(k, al);

  const int meq = std::min(3, le.kmax);
  Eigen::MatrixXcd M(nram * meq, g);
  Eigen::VectorXcd rhs(nram * meq);
  for (int be = 0; be < nram; ++be)
    for (int m = 1; m <= meq; ++m) {
      const int row = be * meq + m - 1;
      cplx r = local.x(m, be);
      for (int al = 0; al < nram; ++al)
        for (int k = 1; k <= le.kmax; ++k) r -= d.xi[al][k - 1] * le.s(sp.flat(k, al), sp.flat(m, be));
      rhs[row] = r;
      for (int j = 0; j < g; ++j) M(row, j) = le.c(sp.flat(m, be), j);
    }
  d.a = M.colPivHouseholderQr().solve(rhs);
  d.residual = (M * d.a - rhs).cwiseAbs().maxCoeff();
  return d;
}

}  // namespace swtr
