#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/Polynomials>

#include "swtr/errors.hpp"
#include "swtr/sw.hpp"

namespace swtr {

cplx poly_eval(const std::vector<cplx>& c, cplx z) {
  cplx r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * z + *it;
  return r;
}

namespace {

std::vector<cplx> poly_derivative(const std::vector<cplx>& c) {
  std::vector<cplx> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
  if (d.empty()) d.push_back(0.0);
  return d;
}

std::vector<cplx> poly_mul(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  std::vector<cplx> r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

bool lex_less(cplx a, cplx b) {
  if (std::abs(a.real() - b.real()) > 1e-12) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

std::vector<cplx> poly_roots(const std::vector<cplx>& c) {
  std::vector<cplx> p = c;
  while (p.size() > 1 && p.back() == cplx(0.0)) p.pop_back();
  const int deg = static_cast<int>(p.size()) - 1;
  if (deg < 1) return {};
  if (deg == 1) return {-p[0] / p[1]};
  Eigen::VectorXcd coeffs(deg + 1);
  for (int k = 0; k <= deg; ++k) coeffs[k] = p[k];
  Eigen::PolynomialSolver<cplx, Eigen::Dynamic> solver(coeffs);
  std::vector<cplx> roots(solver.roots().data(), solver.roots().data() + deg);
  const auto dp = poly_derivative(p);
  for (auto& r : roots) {
    for (int it = 0; it < 6; ++it) {
      cplx d = poly_eval(dp, r);
      if (std::abs(d) < 1e-300) break;
      cplx step = poly_eval(p, r) / d;
      if (!std::isfinite(std::abs(step)) || std::abs(step) > 1e-3 * (1.0 + std::abs(r))) break;
      r -= step;
    }
  }
  std::sort(roots.begin(), roots.end(), lex_less);
  return roots;
}

cplx SWCurve::P(cplx z) const { return poly_eval(P_coeffs, z); }
cplx SWCurve::dP(cplx z) const { return poly_eval(poly_derivative(P_coeffs), z); }
cplx SWCurve::d2P(cplx z) const { return poly_eval(poly_derivative(poly_derivative(P_coeffs)), z); }
cplx SWCurve::f(cplx z) const { return poly_eval(f_coeffs, z); }
cplx SWCurve::df(cplx z) const { return poly_eval(poly_derivative(f_coeffs), z); }
cplx SWCurve::lambda_pow() const { return std::pow(Lambda, g + 1); }

cplx SWCurve::y_near(cplx z, cplx y_ref) const {
  cplx s = std::sqrt(f(z));
  return std::abs(s - y_ref) <= std::abs(s + y_ref) ? s : -s;
}

cplx SWCurve::w(const CurvePoint& p) const { return (P(p.z) + p.y) / (2.0 * lambda_pow()); }

SWCurve new_curve(int g, const std::vector<cplx>& u, cplx Lambda, double tol) {
  if (g < 1) throw ConfigError("genus must be at least 1");
  if (static_cast<int>(u.size()) != g) throw ConfigError("expected " + std::to_string(g) + " moduli");
  SWCurve c;
  c.g = g;
  c.u = u;
  c.Lambda = Lambda;
  c.P_coeffs.assign(g + 2, 0.0);
  for (int k = 0; k < g; ++k) c.P_coeffs[k] = u[k];
  c.P_coeffs[g + 1] = 1.0;
  const cplx L = c.lambda_pow();
  c.f_coeffs = poly_mul(c.P_coeffs, c.P_coeffs);
  c.f_coeffs[0] -= 4.0 * L * L;

  for (double sgn : {1.0, -1.0}) {
    auto q = c.P_coeffs;
    q[0] -= sgn * 2.0 * L;
    for (cplx r : poly_roots(q)) c.branch_points.push_back(r);
  }
  std::sort(c.branch_points.begin(), c.branch_points.end(), lex_less);
  for (std::size_t i = 0; i < c.branch_points.size(); ++i)
    for (std::size_t j = i + 1; j < c.branch_points.size(); ++j)
      if (std::abs(c.branch_points[i] - c.branch_points[j]) < tol)
        throw SingularCurve("branch points collide near z = " + std::to_string(c.branch_points[i].real()) + " + " +
                            std::to_string(c.branch_points[i].imag()) + "i");
  c.critical_points = poly_roots(poly_derivative(c.P_coeffs));
  for (cplx z : c.critical_points)
    if (std::abs(c.f(z)) < tol) throw SingularCurve("ramification point coincides with a branch point");
  return c;
}

}  // namespace swtr
