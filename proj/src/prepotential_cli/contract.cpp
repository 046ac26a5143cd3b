#include <algorithm>
#include <cmath>
#include <numbers>

#include "swtr/errors.hpp"
#include "swtr/prepotential.hpp"

namespace swtr {

namespace {

// all nondecreasing tuples of length n over 1..g
void sorted_tuples(int n, int g, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  for (int j = cur.empty() ? 1 : cur.back(); j <= g; ++j) {
    cur.push_back(j);
    sorted_tuples(n, g, cur, out);
    cur.pop_back();
  }
}

}  // namespace

BPeriodMap bperiod_contract(const SgnTable& S, const Eigen::MatrixXcd& c) {
  if (S.basis_tag != "bergman") throw BasisMismatch("B-period contraction needs the Bergman basis, got " + S.basis_tag);
  const int g = static_cast<int>(c.cols());
  const int rows = static_cast<int>(c.rows());
  if (rows % S.sp.nram != 0) throw ConfigError("c rows are not a multiple of the label count");
  const cplx two_pi_i(0.0, 2.0 * std::numbers::pi);

  BPeriodMap out;
  for (const auto& [key, cell] : S.cells) {
    const int n = key.second;
    std::vector<std::vector<int>> js;
    std::vector<int> cur;
    sorted_tuples(n, g, cur, js);
    std::vector<cplx> acc(js.size(), 0.0);
    cell.for_each([&](const std::vector<int>& idx, cplx v) {
      if (v == cplx{}) return;
      for (int f : idx)
        if (f >= rows) throw ConfigError("c does not cover index " + S.index_label(f));
      std::vector<int> perm = idx;
      std::sort(perm.begin(), perm.end());
      do {
        for (std::size_t t = 0; t < js.size(); ++t) {
          cplx p = v;
          for (int m = 0; m < n; ++m) p *= c(perm[m], js[t][m] - 1);
          acc[t] += p;
        }
      } while (std::next_permutation(perm.begin(), perm.end()));
    });
    const cplx pref = std::pow(two_pi_i, n);
    for (std::size_t t = 0; t < js.size(); ++t) out[{key.first, n, js[t]}] = pref * acc[t];
  }
  return out;
}

SwPoint sw_point(int g, const std::vector<cplx>& u, cplx Lambda, const CycleBasis* reference, const QuadOptions& q) {
  SwPoint p;
  p.curve = new_curve(g, u, Lambda);
  p.cycles = build_cycles(p.curve, reference);
  p.pd = periods(p.curve, p.cycles, q);
  return p;
}

PeriodInversion invert_periods(const Eigen::VectorXcd& a_target, const SwPoint& start, double tol, int max_iter,
                               const QuadOptions& q) {
  const int g = start.curve.g;
  const double scale = std::max(1.0, a_target.cwiseAbs().maxCoeff());
  PeriodInversion r;
  r.u = start.curve.u;
  r.point = start;
  Eigen::VectorXcd res = r.point.pd.a - a_target;
  r.residual = res.cwiseAbs().maxCoeff();
  for (r.iterations = 0; r.iterations < max_iter && r.residual > tol * scale; ++r.iterations) {
    Eigen::VectorXcd du = r.point.pd.A_hol.fullPivLu().solve(res);
    double lambda = 1.0;
    bool accepted = false;
    for (int half = 0; half < 20 && !accepted; ++half, lambda *= 0.5) {
      std::vector<cplx> u = r.u;
      for (int j = 0; j < g; ++j) u[j] += lambda * du[j];
      try {
        SwPoint p = sw_point(g, u, start.curve.Lambda, &r.point.cycles, q);
        Eigen::VectorXcd nres = p.pd.a - a_target;
        const double nr = nres.cwiseAbs().maxCoeff();
        if (nr < r.residual || nr <= tol * scale) {
          r.u = u;
          r.point = std::move(p);
          res = nres;
          r.residual = nr;
          accepted = true;
        }
      } catch (const Error&) {
      }
    }
    if (!accepted) break;
  }
  if (r.residual > tol * scale)
    throw InversionNotConverged("a(u) = a_target residual " + std::to_string(r.residual) + " after " +
                                std::to_string(r.iterations) + " iterations");
  return r;
}

}  // namespace swtr
