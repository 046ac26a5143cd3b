#include <cmath>
#include <numbers>

#include "swtr/errors.hpp"
#include "swtr/sw.hpp"

namespace swtr {

namespace {

cplx F_poly(const std::vector<cplx>& f, cplx x, cplx z) {
  const int n = static_cast<int>(f.size());
  auto coef = [&](int j) { return j < n ? f[j] : cplx(0.0); };
  cplx r = 0.0, xz = 1.0;
  for (int k = 0; 2 * k < n; ++k, xz *= x * z) r += xz * (2.0 * coef(2 * k) + coef(2 * k + 1) * (x + z));
  return r;
}

}  // namespace

cplx BergmanData::base(const CurvePoint& p, const CurvePoint& q) const {
  const cplx d = p.z - q.z;
  return (2.0 * p.y * q.y + F_poly(F_coeffs, p.z, q.z)) / (4.0 * p.y * q.y * d * d);
}

cplx BergmanData::eval(const CurvePoint& p, const CurvePoint& q) const {
  const int g = curve.g;
  Eigen::VectorXcd hp(g), hq(g);
  cplx zp = 1.0, zq = 1.0;
  for (int j = 0; j < g; ++j, zp *= p.z, zq *= q.z) {
    hp[j] = zp / p.y;
    hq[j] = zq / q.y;
  }
  return base(p, q) + (hp.transpose() * correction * hq).value();
}

BergmanData bergman_kernel(const SWCurve& c, const CycleBasis& cyc, const PeriodData& pd, const QuadOptions& opt) {
  const int g = c.g;
  BergmanData b;
  b.curve = c;
  b.cycles = cyc;
  b.pd = pd;
  b.F_coeffs = c.f_coeffs;

  // A_i-period of the base kernel in p is poly_i(z_q) / y_q with poly_i of degree g-1;
  // sample it off the contours and fit.
  double R = 0.0;
  for (cplx e : c.branch_points) R = std::max(R, std::abs(e));
  for (const auto& e : cyc.A) R = std::max(R, std::abs(e.center) + std::abs(e.half) * e.rho);
  R = 1.5 * R + 1.0;
  const int ns = g + 3;
  std::vector<cplx> zs(ns);
  for (int s = 0; s < ns; ++s) zs[s] = std::polar(R, 2.0 * std::numbers::pi * (s + 0.25) / ns);
  Eigen::MatrixXcd G(g, g);
  Eigen::MatrixXcd V(ns, g);
  for (int s = 0; s < ns; ++s) {
    cplx zp = 1.0;
    for (int k = 0; k < g; ++k, zp *= zs[s]) V(s, k) = zp;
  }
  double fit_err = 0.0;
  for (int i = 1; i <= g; ++i) {
    Eigen::VectorXcd I = integrate_A(
        c, cyc, i,
        [&](const CurvePoint& p) {
          Eigen::VectorXcd v(ns);
          for (int s = 0; s < ns; ++s) {
            const cplx d = p.z - zs[s];
            v[s] = F_poly(b.F_coeffs, p.z, zs[s]) / (4.0 * p.y * d * d);
          }
          return v;
        },
        opt);
    Eigen::VectorXcd coef = V.colPivHouseholderQr().solve(I);
    fit_err = std::max(fit_err, (V * coef - I).cwiseAbs().maxCoeff() / std::max(1.0, I.cwiseAbs().maxCoeff()));
    G.row(i - 1) = coef.transpose();
  }
  if (fit_err > 1e-7) throw NormalizationSolveFailed("A-period of the base kernel is not a degree g-1 polynomial");
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(pd.A_hol);
  if (!lu.isInvertible()) throw NormalizationSolveFailed("A-period matrix is singular");
  b.correction = -lu.solve(G);
  const double asym = (b.correction - b.correction.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-6 * std::max(1.0, b.correction.cwiseAbs().maxCoeff()))
    throw NormalizationSolveFailed("correction matrix is not symmetric");
  return b;
}

std::vector<RamPoint> ramification_points(const SWCurve& c, const CycleBasis& cyc) {
  std::vector<RamPoint> out;
  for (std::size_t i = 0; i < c.critical_points.size(); ++i) {
    const cplx z = c.critical_points[i];
    const cplx y = cyc.y_principal(z);
    for (int sheet : {1, -1}) {
      RamPoint r;
      r.i = static_cast<int>(i) + 1;
      r.sheet = sheet;
      r.label = std::to_string(r.i) + (sheet > 0 ? "+" : "-");
      r.z = z;
      r.x = c.P(z);
      r.y = static_cast<double>(sheet) * y;
      r.w = c.w({z, r.y});
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace swtr
