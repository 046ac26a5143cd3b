#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "swtr/errors.hpp"
#include "swtr/sw.hpp"

namespace swtr {

namespace {

constexpr double kPi = std::numbers::pi;

struct GLRule {
  std::array<double, 16> x{}, w{};
  GLRule() {
    using Q = boost::math::quadrature::gauss<double, 16>;
    const auto& ab = Q::abscissa();
    const auto& wt = Q::weights();
    for (int k = 0; k < 8; ++k) {
      x[k] = -ab[k];
      w[k] = wt[k];
      x[8 + k] = ab[k];
      w[8 + k] = wt[k];
    }
  }
};

const GLRule& gl_rule() {
  static const GLRule r;
  return r;
}

Eigen::VectorXcd gl_panel(const VecFn& f, double a, double b) {
  const auto& r = gl_rule();
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  Eigen::VectorXcd s;
  for (int k = 0; k < 16; ++k) {
    Eigen::VectorXcd v = f(m + h * r.x[k]);
    if (s.size() == 0) s = Eigen::VectorXcd::Zero(v.size());
    s += (r.w[k] * h) * v;
  }
  return s;
}

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Proper intersection of [p0,p1] and [q0,q1]; returns parameters.
bool seg_intersect(cplx p0, cplx p1, cplx q0, cplx q1, double& s, double& t) {
  const cplx d1 = p1 - p0, d2 = q1 - q0;
  const double den = cross(d1, d2);
  if (std::abs(den) < 1e-300) return false;
  s = cross(q0 - p0, d2) / den;
  t = cross(q0 - p0, d1) / den;
  return s >= 0.0 && s <= 1.0 && t >= 0.0 && t <= 1.0;
}

double point_seg_dist(cplx p, cplx a, cplx b) {
  const cplx d = b - a;
  const double L2 = std::norm(d);
  double t = L2 > 0 ? std::clamp(((p - a) * std::conj(d)).real() / L2, 0.0, 1.0) : 0.0;
  return std::abs(p - (a + t * d));
}

double seg_seg_dist(cplx a0, cplx a1, cplx b0, cplx b1) {
  double s, t;
  if (seg_intersect(a0, a1, b0, b1, s, t)) return 0.0;
  return std::min({point_seg_dist(a0, b0, b1), point_seg_dist(a1, b0, b1), point_seg_dist(b0, a0, a1),
                   point_seg_dist(b1, a0, a1)});
}

std::vector<cplx> ellipse_polyline(const Ellipse& e, int n = 720) {
  std::vector<cplx> pts(n + 1);
  for (int k = 0; k <= n; ++k) pts[k] = e.point(2.0 * kPi * k / n);
  return pts;
}

// Signed crossings of oriented polylines; hits within `skip` of a shared vertex are ignored.
int signed_crossings(const std::vector<cplx>& P, const std::vector<cplx>& Q, bool* shared_vertex = nullptr) {
  int total = 0;
  for (std::size_t i = 0; i + 1 < P.size(); ++i)
    for (std::size_t j = 0; j + 1 < Q.size(); ++j) {
      double s, t;
      if (!seg_intersect(P[i], P[i + 1], Q[j], Q[j + 1], s, t)) continue;
      cplx hit = P[i] + s * (P[i + 1] - P[i]);
      bool at_vertex = false;
      for (cplx v : {P.front(), P.back()})
        for (cplx w : {Q.front(), Q.back()})
          if (std::abs(v - w) < 1e-12 && std::abs(hit - v) < 1e-9) at_vertex = true;
      if (at_vertex) {
        if (shared_vertex) *shared_vertex = true;
        continue;
      }
      // count a hit exactly at a segment joint once
      if ((s == 0.0 && i > 0) || (t == 0.0 && j > 0)) continue;
      total += cross(P[i + 1] - P[i], Q[j + 1] - Q[j]) > 0 ? 1 : -1;
    }
  return total;
}

double polyline_point_dist(const std::vector<cplx>& L, cplx p) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < L.size(); ++i) d = std::min(d, point_seg_dist(p, L[i], L[i + 1]));
  return d;
}

double polyline_seg_dist(const std::vector<cplx>& L, cplx a, cplx b) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < L.size(); ++i) d = std::min(d, seg_seg_dist(L[i], L[i + 1], a, b));
  return d;
}

// interior part of a polyline, trimmed by frac of the total length at both ends
std::vector<cplx> trimmed(const std::vector<cplx>& L, double frac) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < L.size(); ++i) len += std::abs(L[i + 1] - L[i]);
  const double cut = frac * len;
  auto at = [&](double s) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < L.size(); ++i) {
      double l = std::abs(L[i + 1] - L[i]);
      if (acc + l >= s) return L[i] + (s - acc) / l * (L[i + 1] - L[i]);
      acc += l;
    }
    return L.back();
  };
  std::vector<cplx> out{at(cut)};
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < L.size(); ++i) {
    acc += std::abs(L[i + 1] - L[i]);
    if (acc > cut && acc < len - cut) out.push_back(L[i + 1]);
  }
  out.push_back(at(len - cut));
  return out;
}

struct Geometry {
  const SWCurve& c;
  std::vector<cplx> bp;
  std::vector<std::pair<int, int>> cuts;
  std::vector<Ellipse> A;
};

Ellipse make_ellipse(cplx a, cplx b, double rho) { return Ellipse{0.5 * (a + b), 0.5 * (b - a), rho}; }

// Largest ellipse around cut i keeping clear of the other cuts and the critical points.
bool fit_ellipse(const Geometry& G, int i, Ellipse& out) {
  const auto [ia, ib] = G.cuts[i];
  const cplx a = G.bp[ia], b = G.bp[ib];
  double d_cut = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < G.cuts.size(); ++j)
    if (static_cast<int>(j) != i)
      d_cut = std::min(d_cut, seg_seg_dist(a, b, G.bp[G.cuts[j].first], G.bp[G.cuts[j].second]));
  double d_crit = std::numeric_limits<double>::infinity();
  for (cplx z : G.c.critical_points) d_crit = std::min(d_crit, point_seg_dist(z, a, b));
  const double h = 0.5 * std::abs(b - a);
  const double minor = std::min(0.4 * d_cut, 0.5 * d_crit);
  const double q = 2.0 * minor / h;
  double rho = std::min(2.5, 0.5 * (q + std::sqrt(q * q + 4.0)));
  if (!(rho > 1.02)) return false;
  out = make_ellipse(a, b, rho);
  return true;
}

std::vector<std::vector<cplx>> link_shapes(cplx s, cplx e) {
  std::vector<std::vector<cplx>> out{{s, e}};
  for (double t : {0.25, -0.25, 0.5, -0.5, 0.8, -0.8}) {
    cplx mid = 0.5 * (s + e) + cplx(0.0, t) * (e - s);
    out.push_back({s, mid, e});
  }
  return out;
}

// Validity and clearance of a link joining branch points is (start) and ie (end).
double link_clearance(const Geometry& G, const std::vector<cplx>& L, int is, int ie, int from_cut, int to_cut) {
  // no crossing with any cut, other than touching its own endpoints
  for (std::size_t j = 0; j < G.cuts.size(); ++j) {
    std::vector<cplx> cut{G.bp[G.cuts[j].first], G.bp[G.cuts[j].second]};
    bool shared = false;
    int n = 0;
    for (std::size_t i = 0; i + 1 < L.size(); ++i) {
      double s, t;
      if (!seg_intersect(L[i], L[i + 1], cut[0], cut[1], s, t)) continue;
      cplx hit = L[i] + s * (L[i + 1] - L[i]);
      if (std::abs(hit - G.bp[is]) < 1e-9 || std::abs(hit - G.bp[ie]) < 1e-9) {
        shared = true;
        continue;
      }
      ++n;
    }
    (void)shared;
    if (n) return -1.0;
  }
  // leaving/entering a cut along the cut itself is not allowed
  auto along = [&](cplx p, cplx q, int cut) {
    cplx a = G.bp[G.cuts[cut].first], b = G.bp[G.cuts[cut].second];
    cplx other = std::abs(p - a) < 1e-12 ? b : a;
    double ang = std::abs(std::arg((q - p) / (other - p)));
    return ang < 0.15;
  };
  if (along(L[0], L[1], from_cut) || along(L.back(), L[L.size() - 2], to_cut)) return -1.0;

  std::vector<cplx> core = trimmed(L, 0.08);
  double clear = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < G.bp.size(); ++k)
    if (static_cast<int>(k) != is && static_cast<int>(k) != ie) clear = std::min(clear, polyline_point_dist(L, G.bp[k]));
  for (std::size_t j = 0; j < G.cuts.size(); ++j)
    if (static_cast<int>(j) != from_cut && static_cast<int>(j) != to_cut)
      clear = std::min(clear, polyline_seg_dist(L, G.bp[G.cuts[j].first], G.bp[G.cuts[j].second]));
  for (cplx z : G.c.critical_points) clear = std::min(clear, polyline_point_dist(L, z));
  // ellipses other than those of the two cuts must not be touched
  for (std::size_t j = 0; j < G.A.size(); ++j) {
    if (static_cast<int>(j) == from_cut || static_cast<int>(j) == to_cut) continue;
    auto E = ellipse_polyline(G.A[j], 360);
    if (signed_crossings(E, L) != 0) return -1.0;
    for (cplx p : core) clear = std::min(clear, polyline_point_dist(E, p));
  }
  return clear;
}

bool finish_and_check(CycleBasis& cyc) {
  const int g = cyc.genus();
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j)
      for (int k : {cyc.link_ends[i].first, cyc.link_ends[i].second})
        for (int l : {cyc.link_ends[j].first, cyc.link_ends[j].second})
          if (k == l) return false;
  cyc.intersection = intersection_matrix(cyc);
  Eigen::MatrixXi J = Eigen::MatrixXi::Zero(2 * g, 2 * g);
  J.topRightCorner(g, g) = Eigen::MatrixXi::Identity(g, g);
  J.bottomLeftCorner(g, g) = -Eigen::MatrixXi::Identity(g, g);
  return cyc.intersection == J;
}

std::vector<int> match_points(const std::vector<cplx>& ref, const std::vector<cplx>& now) {
  std::vector<int> map(ref.size(), -1);
  std::vector<bool> used(now.size(), false);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < now.size(); ++j)
      if (!used[j] && std::abs(ref[i] - now[j]) < best) {
        best = std::abs(ref[i] - now[j]);
        map[i] = static_cast<int>(j);
      }
    used[map[i]] = true;
  }
  return map;
}

}  // namespace

Eigen::VectorXcd integrate_adaptive(const VecFn& f, double lo, double hi, const QuadOptions& opt, long* nodes_used) {
  struct Panel {
    double a, b;
    Eigen::VectorXcd whole;
  };
  std::vector<Panel> stack;
  const int n0 = std::max(1, opt.initial_panels);
  long nodes = 0;
  for (int k = n0 - 1; k >= 0; --k) {
    double a = lo + (hi - lo) * k / n0, b = lo + (hi - lo) * (k + 1) / n0;
    stack.push_back({a, b, gl_panel(f, a, b)});
    nodes += 16;
  }
  Eigen::VectorXcd total;
  double scale = 0.0;
  for (const auto& p : stack) scale += p.whole.cwiseAbs().maxCoeff();
  while (!stack.empty()) {
    Panel p = std::move(stack.back());
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    Eigen::VectorXcd l = gl_panel(f, p.a, m), r = gl_panel(f, m, p.b);
    nodes += 32;
    if (nodes > opt.max_nodes) throw QuadratureNotConverged("quadrature exceeded " + std::to_string(opt.max_nodes) + " nodes");
    const double err = (l + r - p.whole).cwiseAbs().maxCoeff();
    const double frac = (p.b - p.a) / (hi - lo);
    // below this the panel difference is rounding noise
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (l.cwiseAbs() + r.cwiseAbs()).maxCoeff();
    if (err <= std::max({opt.abs_tol * frac, opt.rel_tol * scale * frac, noise}) || p.b - p.a < 1e-14 * (hi - lo)) {
      if (total.size() == 0) total = Eigen::VectorXcd::Zero(l.size());
      total += l + r;
    } else {
      stack.push_back({m, p.b, std::move(r)});
      stack.push_back({p.a, m, std::move(l)});
    }
  }
  if (nodes_used) *nodes_used = nodes;
  return total;
}

cplx Ellipse::point(double th) const {
  const cplx e(std::cos(th), std::sin(th));
  return center + half * (rho * e + 1.0 / (rho * e)) * 0.5;
}

cplx Ellipse::deriv(double th) const {
  const cplx e(std::cos(th), std::sin(th));
  const cplx I(0.0, 1.0);
  return half * (I * rho * e - I / (rho * e)) * 0.5;
}

cplx CycleBasis::y_principal(cplx z) const { return y_principal_offset(-1, z); }

cplx CycleBasis::y_principal_offset(int ib, cplx d) const {
  const cplx z = ib < 0 ? d : bp[ib] + d;
  auto diff = [&](int k) { return k == ib ? d : z - bp[k]; };
  cplx y = 1.0;
  for (const auto& [ia, ib2] : cuts) {
    const cplx v = z - 0.5 * (bp[ia] + bp[ib2]);
    // 1 - (r / v)^2 in factored form, accurate next to the branch points
    y *= v * std::sqrt(diff(ia) * diff(ib2) / (v * v));
  }
  return y;
}

double winding_number(const std::vector<cplx>& L, cplx z) {
  double w = 0.0;
  for (std::size_t i = 0; i + 1 < L.size(); ++i) w += std::arg((L[i + 1] - z) / (L[i] - z));
  if (std::abs(L.back() - L.front()) > 0) w += std::arg((L.front() - z) / (L.back() - z));
  return w / (2.0 * kPi);
}

Eigen::MatrixXi intersection_matrix(const CycleBasis& cyc) {
  const int g = cyc.genus();
  Eigen::MatrixXi I = Eigen::MatrixXi::Zero(2 * g, 2 * g);
  std::vector<std::vector<cplx>> E;
  for (const auto& e : cyc.A) E.push_back(ellipse_polyline(e));
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      if (i != j) I(i, j) = signed_crossings(E[i], E[j]);
      int ab = 0;
      for (int k = j; k < g; ++k) ab += signed_crossings(E[i], cyc.links[k]);
      I(i, g + j) = ab;
      I(g + j, i) = -ab;
    }
  // both sheets reverse together, so interior link crossings count twice
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      if (i == j) continue;
      int bb = 0;
      for (int l = i; l < g; ++l)
        for (int m = j; m < g; ++m)
          if (l != m) bb += 2 * signed_crossings(cyc.links[l], cyc.links[m]);
      I(g + i, g + j) = bb;
    }
  return I;
}

CycleBasis build_cycles(const SWCurve& c, const CycleBasis* reference) {
  const int g = c.g;
  const auto& bp = c.branch_points;
  const int nb = static_cast<int>(bp.size());

  if (reference) {
    if (reference->bp.size() != bp.size()) throw CycleConstructionFailed("reference basis has a different genus");
    auto map = match_points(reference->bp, bp);
    CycleBasis cyc;
    cyc.bp = bp;
    for (auto [a, b] : reference->cuts) cyc.cuts.push_back({map[a], map[b]});
    for (int i = 0; i < g; ++i)
      cyc.A.push_back(make_ellipse(bp[cyc.cuts[i].first], bp[cyc.cuts[i].second], reference->A[i].rho));
    for (int k = 0; k < g; ++k) {
      auto L = reference->links[k];
      auto [s, e] = reference->link_ends[k];
      cyc.link_ends.push_back({map[s], map[e]});
      L.front() = bp[map[s]];
      L.back() = bp[map[e]];
      cyc.links.push_back(L);
    }
    Geometry G{c, bp, cyc.cuts, cyc.A};
    for (int k = 0; k < g; ++k)
      if (link_clearance(G, cyc.links[k], cyc.link_ends[k].first, cyc.link_ends[k].second, k + 1, k) < 0)
        throw CycleConstructionFailed("reference link no longer valid after deformation");
    if (!finish_and_check(cyc)) throw CycleConstructionFailed("deformed basis is not symplectic");
    return cyc;
  }

  cplx centroid = 0.0;
  for (cplx z : bp) centroid += z;
  centroid /= static_cast<double>(nb);
  std::vector<int> order(nb);
  for (int k = 0; k < nb; ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return std::arg(bp[a] - centroid) < std::arg(bp[b] - centroid); });

  CycleBasis best;
  double best_score = -1.0;
  for (int offset = 0; offset < 2; ++offset) {
    std::vector<std::pair<int, int>> cuts;
    for (int k = 0; k <= g; ++k) cuts.push_back({order[(2 * k + offset) % nb], order[(2 * k + 1 + offset) % nb]});
    bool crossing = false;
    for (int i = 0; i <= g && !crossing; ++i)
      for (int j = i + 1; j <= g; ++j) {
        double s, t;
        if (seg_intersect(bp[cuts[i].first], bp[cuts[i].second], bp[cuts[j].first], bp[cuts[j].second], s, t))
          crossing = true;
      }
    if (crossing) continue;
    for (int rot = 0; rot <= g; ++rot) {
      Geometry G{c, bp, {}, {}};
      for (int k = 0; k <= g; ++k) G.cuts.push_back(cuts[(k + rot) % (g + 1)]);
      bool ok = true;
      for (int i = 0; i < g && ok; ++i) {
        Ellipse e;
        ok = fit_ellipse(G, i, e);
        G.A.push_back(e);
      }
      if (!ok) continue;
      // in[k]: endpoint of cut k receiving link k; out[k]: endpoint of cut k starting link k-1
      for (int mask = 0; mask < (1 << (g + 1)); ++mask) {
        auto ends = [&](int k, bool incoming) {
          bool flip = (mask >> k) & 1;
          return (flip ^ incoming) ? G.cuts[k].first : G.cuts[k].second;
        };
        CycleBasis cyc;
        cyc.bp = bp;
        cyc.cuts = G.cuts;
        cyc.A = G.A;
        double score = std::numeric_limits<double>::infinity();
        for (int k = 0; k < g && score > 0; ++k) {
          int is = ends(k + 1, false), ie = ends(k, true);
          double best_link = -1.0;
          std::vector<cplx> chosen;
          for (auto& L : link_shapes(bp[is], bp[ie])) {
            double cl = link_clearance(G, L, is, ie, k + 1, k);
            bool clash = false;
            for (const auto& prev : cyc.links)
              if (signed_crossings(prev, L) != 0 || polyline_point_dist(prev, L[L.size() / 2]) < 1e-6) clash = true;
            if (clash) continue;
            if (cl > best_link * 1.05) {
              best_link = cl;
              chosen = L;
            }
          }
          if (best_link <= 0) {
            score = -1;
            break;
          }
          cyc.links.push_back(chosen);
          cyc.link_ends.push_back({is, ie});
          score = std::min(score, best_link);
        }
        if (score <= 0) continue;
        if (!finish_and_check(cyc)) continue;
        if (score > best_score * 1.05) {
          best_score = score;
          best = cyc;
        }
      }
    }
  }
  if (best_score <= 0) throw CycleConstructionFailed("branch-point pairing heuristic found no admissible cuts");
  return best;
}

Eigen::VectorXcd integrate_A(const SWCurve& c, const CycleBasis& cyc, int i, const DiffFn& f, const QuadOptions& opt) {
  const Ellipse& e = cyc.A.at(i - 1);
  (void)c;
  return integrate_adaptive(
      [&](double th) {
        const cplx z = e.point(th);
        return Eigen::VectorXcd(f({z, cyc.y_principal(z)}) * e.deriv(th));
      },
      0.0, 2.0 * kPi, opt);
}

namespace {

// int over the straight piece p -> q of (f(z, y) - f(z, -y)) dz, with sqrt-type endpoints
// resolved by z = p + (q - p) s^2 near a singular start (and symmetrically at the end).
int branch_index(const CycleBasis& cyc, cplx p) {
  for (std::size_t k = 0; k < cyc.bp.size(); ++k)
    if (cyc.bp[k] == p) return static_cast<int>(k);
  return -1;
}

Eigen::VectorXcd piece(const CycleBasis& cyc, const DiffFn& f, cplx p, cplx q, bool sing_start, bool sing_end,
                       const QuadOptions& opt) {
  // d = z - base, with base a branch point when ib >= 0
  auto diff = [&](int ib, cplx base, cplx d) -> Eigen::VectorXcd {
    const cplx z = base + d;
    const cplx y = ib < 0 ? cyc.y_principal(z) : cyc.y_principal_offset(ib, d);
    return f({z, y}) - f({z, -y});
  };
  if (sing_start && sing_end) {
    const cplx m = 0.5 * (p + q);
    return piece(cyc, f, p, m, true, false, opt) + piece(cyc, f, m, q, false, true, opt);
  }
  if (sing_start) {
    const int ib = branch_index(cyc, p);
    return integrate_adaptive(
        [&](double s) { return Eigen::VectorXcd(diff(ib, p, (q - p) * s * s) * (2.0 * s * (q - p))); }, 0.0, 1.0, opt);
  }
  if (sing_end) {
    const int ib = branch_index(cyc, q);
    return integrate_adaptive(
        [&](double s) { return Eigen::VectorXcd(diff(ib, q, (p - q) * s * s) * (2.0 * s * (q - p))); }, 0.0, 1.0, opt);
  }
  return integrate_adaptive([&](double s) { return Eigen::VectorXcd(diff(-1, p, (q - p) * s) * (q - p)); }, 0.0, 1.0,
                            opt);
}

}  // namespace

Eigen::VectorXcd integrate_B(const SWCurve& c, const CycleBasis& cyc, int i, const DiffFn& f, const QuadOptions& opt) {
  (void)c;
  const int g = cyc.genus();
  if (i < 1 || i > g) throw ConfigError("B-cycle index out of range");
  Eigen::VectorXcd total;
  for (int k = i - 1; k < g; ++k) {
    const auto& L = cyc.links[k];
    for (std::size_t s = 0; s + 1 < L.size(); ++s) {
      Eigen::VectorXcd v = piece(cyc, f, L[s], L[s + 1], s == 0, s + 2 == L.size(), opt);
      if (total.size() == 0) total = Eigen::VectorXcd::Zero(v.size());
      total += v;
    }
  }
  return total;
}

}  // namespace swtr
