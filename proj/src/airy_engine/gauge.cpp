#include <sstream>

#include "swtr/airy.hpp"
#include "swtr/errors.hpp"

namespace swtr {

namespace {

// Y[.. i ..] = sum_j X[.. j ..] M(j, i) on the given mode.
Tensor3 mode_product(const Tensor3& X, int mode, const Eigen::MatrixXcd& M) {
  const int n = X.n;
  Tensor3 Y(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int j = 0; j < n; ++j) {
        cplx x;
        switch (mode) {
          case 0: x = X(j, a, b); break;
          case 1: x = X(a, j, b); break;
          default: x = X(a, b, j); break;
        }
        if (x == cplx{}) continue;
        for (int i = 0; i < n; ++i) {
          cplx m = M(j, i);
          if (m == cplx{}) continue;
          switch (mode) {
            case 0: Y(i, a, b) += x * m; break;
            case 1: Y(a, i, b) += x * m; break;
            default: Y(a, b, i) += x * m; break;
          }
        }
      }
  return Y;
}

Tensor3 swap_last(const Tensor3& X) {
  Tensor3 Y(X.n);
  for (int a = 0; a < X.n; ++a)
    for (int b = 0; b < X.n; ++b)
      for (int c = 0; c < X.n; ++c) Y(a, c, b) = X(a, b, c);
  return Y;
}

void add_into(Tensor3& Y, const Tensor3& X) {
  for (std::size_t i = 0; i < Y.v.size(); ++i) Y.v[i] += X.v[i];
}

}  // namespace

GaugeData GaugeData::identity(const IndexSpace& sp) {
  GaugeData g;
  g.sp = sp;
  int n = sp.dim();
  g.c = Eigen::MatrixXcd::Identity(n, n);
  g.d = Eigen::MatrixXcd::Identity(n, n);
  g.s = Eigen::MatrixXcd::Zero(n, n);
  g.cutoff = 0;
  return g;
}

GaugeData GaugeData::from_s(const IndexSpace& sp, const Eigen::MatrixXcd& s) {
  GaugeData g = identity(sp);
  g.s = s;
  return g;
}

bool GaugeReport::ok() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

GaugeReport validate_gauge(const GaugeData& g, double tol) {
  GaugeReport r;
  const int n = g.sp.dim();
  auto I = Eigen::MatrixXcd::Identity(n, n);
  bool shapes = g.c.rows() == n && g.c.cols() == n && g.d.rows() == n && g.d.cols() == n && g.s.rows() == n &&
                g.s.cols() == n;
  if (!shapes) {
    r.checks.push_back({"shape", false, 0.0, "matrices must be dim x dim"});
    return r;
  }
  double c1 = std::max((g.c * g.d - I).cwiseAbs().maxCoeff(), (g.d * g.c - I).cwiseAbs().maxCoeff());
  r.checks.push_back({"C.1 c d = d c = id", c1 <= tol, c1, ""});
  r.checks.push_back({"C.2 convergence", true, 0.0, "finite index range: all contractions are finite sums"});
  double c3 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (g.sp.k_of(i) <= g.cutoff && g.sp.k_of(j) <= g.cutoff) continue;
      cplx delta = i == j ? 1.0 : 0.0;
      c3 = std::max({c3, std::abs(g.c(i, j) - delta), std::abs(g.d(i, j) - delta)});
    }
  r.checks.push_back({"C.3 identity beyond cutoff", c3 <= tol, c3, "cutoff k = " + std::to_string(g.cutoff)});
  double c4 = (g.s - g.s.transpose()).cwiseAbs().maxCoeff();
  r.checks.push_back({"C.4 s symmetric", c4 <= tol * std::max(1.0, g.s.cwiseAbs().maxCoeff()), c4, ""});
  return r;
}

AiryTensors gauge_transform(const AiryTensors& t, const GaugeData& g) {
  if (g.sp.dim() != t.sp.dim()) throw InvalidGauge("index space mismatch");
  GaugeReport rep = validate_gauge(g);
  if (!rep.ok()) {
    std::ostringstream os;
    for (const auto& c : rep.checks)
      if (!c.pass) os << c.name << " (residual " << c.residual << ") ";
    throw InvalidGauge(os.str());
  }
  const Eigen::MatrixXcd& C = g.c;
  const Eigen::MatrixXcd Dt = g.d.transpose();
  const Eigen::MatrixXcd& S = g.s;

  AiryTensors out;
  out.sp = t.sp;
  out.labels = t.labels;

  out.A = mode_product(mode_product(mode_product(t.A, 0, C), 1, C), 2, C);

  Tensor3 bb = t.B;
  add_into(bb, mode_product(t.A, 2, S));
  out.B = mode_product(mode_product(mode_product(bb, 0, C), 1, C), 2, Dt);

  Tensor3 cc = t.C;
  Tensor3 bs = mode_product(t.B, 1, S);  // bs(j1, j3, j2) = sum_p b^{j2}_{j1 p} s^{p j3}
  add_into(cc, swap_last(bs));
  add_into(cc, bs);
  add_into(cc, mode_product(mode_product(t.A, 1, S), 2, S));
  out.C = mode_product(mode_product(mode_product(cc, 0, C), 1, Dt), 2, Dt);

  const int n = t.sp.dim();
  out.eps.assign(static_cast<std::size_t>(n), cplx{});
  std::vector<cplx> as(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    cplx acc = t.eps[l];
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        cplx a = t.A(l, j, k);
        if (a != cplx{}) acc += a * S(j, k);
      }
    as[l] = acc;
  }
  for (int i = 0; i < n; ++i) {
    cplx acc{};
    for (int l = 0; l < n; ++l) acc += as[l] * C(l, i);
    out.eps[i] = acc;
  }
  return out;
}

GaugeData compose_gauges(const GaugeData& g1, const GaugeData& g2) {
  GaugeData g;
  g.sp = g1.sp;
  g.c = g1.c * g2.c;
  g.d = g2.d * g1.d;
  g.s = g1.s + g1.c * g2.s * g1.c.transpose();
  g.cutoff = std::max(g1.cutoff, g2.cutoff);
  return g;
}

}  // namespace swtr
