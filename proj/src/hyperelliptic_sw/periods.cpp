#include <cmath>

#include "swtr/errors.hpp"
#include "swtr/sw.hpp"

namespace swtr {

cplx dS_coeff(const SWCurve& c, const CurvePoint& p) { return p.z * c.dP(p.z) / p.y; }

Eigen::VectorXcd PeriodData::omega(const CurvePoint& p) const {
  const int g = static_cast<int>(norm_matrix.rows());
  Eigen::VectorXcd hol(g);
  cplx zp = 1.0;
  for (int j = 0; j < g; ++j, zp *= p.z) hol[j] = zp / p.y;
  return norm_matrix * hol;
}

PeriodData periods(const SWCurve& c, const CycleBasis& cyc, const QuadOptions& opt) {
  const int g = c.g;
  DiffFn integrand = [&](const CurvePoint& p) {
    Eigen::VectorXcd v(g + 1);
    cplx zp = 1.0;
    for (int j = 0; j < g; ++j, zp *= p.z) v[j] = zp / p.y;
    v[g] = dS_coeff(c, p);
    return v;
  };
  PeriodData pd;
  pd.a.resize(g);
  pd.b.resize(g);
  pd.A_hol.resize(g, g);
  pd.B_hol.resize(g, g);
  for (int i = 1; i <= g; ++i) {
    Eigen::VectorXcd A = integrate_A(c, cyc, i, integrand, opt);
    Eigen::VectorXcd B = integrate_B(c, cyc, i, integrand, opt);
    pd.A_hol.row(i - 1) = A.head(g).transpose();
    pd.B_hol.row(i - 1) = B.head(g).transpose();
    pd.a[i - 1] = A[g];
    pd.b[i - 1] = B[g];
  }
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(pd.A_hol.transpose());
  if (!lu.isInvertible()) throw NormalizationSolveFailed("A-period matrix of z^{j-1} dz/y is singular");
  pd.norm_matrix = lu.inverse();
  pd.tau = pd.norm_matrix * pd.B_hol.transpose();
  return pd;
}

}  // namespace swtr
