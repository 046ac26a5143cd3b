#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <string>

#include "swtr/errors.hpp"
#include "swtr/spectral.hpp"

namespace swtr {

int LocalSpectralCurve::label_index(const std::string& label) const {
  auto it = std::find(ram.begin(), ram.end(), label);
  if (it == ram.end()) throw ConfigError("unknown ramification label '" + label + "'");
  return static_cast<int>(it - ram.begin());
}

void LocalSpectralCurve::validate() const {
  if (ram.empty()) throw ConfigError("no ramification points");
  if (denom.size() != ram.size()) throw ConfigError("one denominator per ramification point required");
  if (kmax < 1) throw ConfigError("kmax must be positive");
  const int n = space().dim();
  if (bergman_reg.rows() != n || bergman_reg.cols() != n) throw ConfigError("bergman_reg must be dim x dim");
  double scale = std::max(1.0, bergman_reg.cwiseAbs().maxCoeff());
  if ((bergman_reg - bergman_reg.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ConfigError("bergman_reg must be symmetric");
  for (const auto& d : denom) {
    if (d.valuation() != 2) throw ConfigError("denominator must have a double zero at the origin");
    for (int e = d.min_exp(); e <= std::min(d.top(), d.trunc_order()); ++e)
      if (e % 2 != 0 && std::abs(d[e]) > 1e-14 * std::abs(d[2]))
        throw ConfigError("denominator must be even in z (odd differential)");
  }
}

LocalSpectralCurve LocalSpectralCurve::airy(const std::vector<std::string>& ram, int kmax) {
  LocalSpectralCurve c;
  c.ram = ram;
  c.kmax = kmax;
  c.denom.assign(ram.size(), LaurentSeries::monomial(4.0, 2));
  int n = c.space().dim();
  c.bergman_reg = Eigen::MatrixXcd::Zero(n, n);
  return c;
}

LocalSpectralCurve LocalSpectralCurve::with_s(const std::vector<std::string>& ram, const Eigen::MatrixXcd& s) {
  int nram = static_cast<int>(ram.size());
  if (nram == 0 || s.rows() % nram != 0) throw ConfigError("s dimension is not a multiple of the label count");
  LocalSpectralCurve c = airy(ram, static_cast<int>(s.rows()) / nram);
  c.bergman_reg = s;
  return c;
}

namespace {

bool stable(int g, int n) { return n >= 1 && 2 * g - 2 + n > 0; }

class EoEngine {
 public:
  EoEngine(const LocalSpectralCurve& c, SgnTable& tab, int max_pole, int pad)
      : c_(c), tab_(tab), sp_(c.space()), trunc_(max_pole + pad) {
    const int n = sp_.dim();
    ebar_.assign(static_cast<std::size_t>(n), {});
    for (int f = 0; f < n; ++f) {
      for (int al = 0; al < sp_.nram; ++al) {
        LaurentSeries s = LaurentSeries::zero(trunc_);
        if (sp_.alpha_of(f) == al) s.set(-sp_.k_of(f) - 1, 1.0);
        for (int j = 1; j <= sp_.kmax && j - 1 <= trunc_; ++j) {
          cplx v = c.bergman_reg(f, sp_.flat(j, al));
          if (v != cplx{}) s.add_to(j - 1, v * static_cast<double>(j));
        }
        ebar_[f].push_back({s, s.subs_scale(-1.0)});
      }
    }
    for (int al = 0; al < sp_.nram; ++al) {
      // -1/(4 z^2) - sum s^{(i,al)(j,al)} i j z^{i-1} (-z)^{j-1}
      LaurentSeries b = LaurentSeries::zero(trunc_);
      b.set(-2, -0.25);
      for (int i = 1; i <= sp_.kmax; ++i)
        for (int j = 1; j <= sp_.kmax; ++j) {
          int e = i + j - 2;
          if (e > trunc_) continue;
          cplx v = c.bergman_reg(sp_.flat(i, al), sp_.flat(j, al));
          if (v == cplx{}) continue;
          b.add_to(e, -v * static_cast<double>(i * j) * ((j - 1) % 2 ? -1.0 : 1.0));
        }
      b_diag_.push_back(b);

      const LaurentSeries& d = c.denom[al];
      int need = 2 * max_pole + 5 + pad;
      if (!d.exact() && d.trunc_order() < need)
        throw TruncationInsufficient("denominator known only to order " + std::to_string(d.trunc_order()));
      inv_denom_.push_back(inverse(d.truncated(need)));
    }
  }

  struct Table {
    int dim = 0;
    SliceIndex slices;
    SymTensor ranker;
    // cached phi^I(+-z) at each alpha, indexed [rank][alpha * 2 + sign]
    std::vector<std::vector<std::unique_ptr<LaurentSeries>>> cache;
  };

  void add_table(int g, int n) {
    auto t = std::make_unique<Table>();
    const SymTensor& cell = tab_.cell(g, n);
    t->dim = cell.dim();
    t->slices = SliceIndex(cell);
    t->ranker = SymTensor(cell.dim(), n - 1);
    t->cache.resize(t->ranker.size());
    tables_[{g, n}] = std::move(t);
  }

  bool available(int g, int n) const { return (g == 0 && n == 2) || tables_.count({g, n}) != 0; }

  // sum_f S_{g,n}[f, I] ebar^f(sign * z) at alpha, as a coefficient of dz
  // (the sign of d(-z) is not included).
  const LaurentSeries& phi(int g, int n, const std::vector<int>& I, int al, bool neg) {
    static const LaurentSeries zero;
    if (g == 0 && n == 2) {
      int f = I[0];
      if (sp_.alpha_of(f) != al) return zero;
      int k = sp_.k_of(f);
      auto& slot = f02_[{f, neg}];
      if (!slot) slot = std::make_unique<LaurentSeries>(LaurentSeries::monomial(static_cast<double>(k) * (neg && (k - 1) % 2 ? -1.0 : 1.0), k - 1));
      return *slot;
    }
    Table& t = *tables_.at({g, n});
    if (!t.ranker.in_range(I)) return zero;
    auto& row = t.cache[t.ranker.rank_sorted(I.data())];
    if (row.empty()) row.resize(static_cast<std::size_t>(2 * sp_.nram));
    auto& slot = row[static_cast<std::size_t>(2 * al + (neg ? 1 : 0))];
    if (!slot) {
      LaurentSeries acc;
      bool any = false;
      for (const auto& [f, v] : t.slices.at(I)) {
        const LaurentSeries& e = neg ? ebar_[f][al].second : ebar_[f][al].first;
        acc = any ? acc + e.scaled(v) : e.scaled(v);
        any = true;
      }
      slot = std::make_unique<LaurentSeries>(std::move(acc));
    }
    return *slot;
  }

  // r_J(z) dz^2 = omega_{g-1,n+1}(z, -z, J) + sum' omega(z, I1) omega(-z, I2) at alpha
  LaurentSeries source(int g, int n, const std::vector<int>& J, int al) {
    LaurentSeries r = LaurentSeries::zero(trunc_);
    const int m = n - 1;
    if (g >= 1) {
      if (g == 1 && n == 1) {
        r = r + b_diag_[al];
      } else if (available(g - 1, n + 1)) {
        const Table& t = *tables_.at({g - 1, n + 1});
        std::vector<int> tup;
        for (int f1 = 0; f1 < t.dim; ++f1) {
          tup.assign(J.begin(), J.end());
          tup.insert(std::upper_bound(tup.begin(), tup.end(), f1), f1);
          const LaurentSeries& psi = phi(g - 1, n + 1, tup, al, true);
          if (psi.data().empty()) continue;
          r = r - ebar_[f1][al].first * psi;
        }
      }
    }
    std::vector<int> I1, I2;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      I1.clear();
      I2.clear();
      for (int p = 0; p < m; ++p) (mask >> p & 1u ? I1 : I2).push_back(J[p]);
      int n1 = 1 + static_cast<int>(I1.size()), n2 = 1 + static_cast<int>(I2.size());
      for (int g1 = 0; g1 <= g; ++g1) {
        int g2 = g - g1;
        if (!available(g1, n1) || !available(g2, n2)) continue;
        const LaurentSeries& a = phi(g1, n1, I1, al, false);
        if (a.data().empty()) continue;
        const LaurentSeries& b = phi(g2, n2, I2, al, true);
        if (b.data().empty()) continue;
        r = r - a * b;
      }
    }
    return r;
  }

  // -Res z^{k1} r(z) / D(z) dz
  cplx project(int k1, const LaurentSeries& r, int al) const {
    const LaurentSeries& q = inv_denom_[al];
    // coefficients of r are needed up to exponent 1 - k1
    if (r.trunc_order() < 1 - k1) throw TruncationInsufficient("local series too short for the kernel projection");
    cplx acc{};
    for (int e = r.min_exp(); e <= r.top(); ++e) {
      cplx rv = r[e];
      if (rv == cplx{}) continue;
      int qe = -1 - e - k1;
      if (qe < q.min_exp()) continue;
      acc += q[qe] * rv;
    }
    return -acc;
  }

 private:
  const LocalSpectralCurve& c_;
  SgnTable& tab_;
  IndexSpace sp_;
  int trunc_;
  std::vector<std::vector<std::pair<LaurentSeries, LaurentSeries>>> ebar_;
  std::vector<LaurentSeries> b_diag_;
  std::vector<LaurentSeries> inv_denom_;
  std::map<std::pair<int, int>, std::unique_ptr<Table>> tables_;
  std::map<std::pair<int, bool>, std::unique_ptr<LaurentSeries>> f02_;
};

}  // namespace

OmegaGN eo_run(const LocalSpectralCurve& curve, int chi_max, const EoOptions& opt) {
  curve.validate();
  if (chi_max < 1) throw ConfigError("chi_max must be at least 1");
  OmegaGN out;
  out.curve = curve;
  out.chi_max = chi_max;
  SgnTable& tab = out.table;
  tab.basis_tag = "bergman";
  tab.sp = curve.space();
  tab.labels = curve.ram;
  const auto& sp = tab.sp;

  int max_kb = 0;
  for (int chi = 1; chi <= chi_max; ++chi)
    for (int g = 0; 2 * g - 1 <= chi; ++g) max_kb = std::max(max_kb, cell_kbound(g, chi + 2 - 2 * g, opt.extra));
  if (max_kb > sp.kmax)
    throw TruncationInsufficient("cells need index bound " + std::to_string(max_kb) + " but kmax = " +
                                 std::to_string(sp.kmax));

  EoEngine eng(curve, tab, max_kb + 1, opt.order_pad);
  for (int chi = 1; chi <= chi_max; ++chi) {
    for (int g = 0; 2 * g - 1 <= chi; ++g) {
      const int n = chi + 2 - 2 * g;
      if (!stable(g, n)) continue;
      CellInfo ci;
      ci.kbound = cell_kbound(g, n, opt.extra);
      ci.support_bound = 6 * g + 2 * n - 4;
      const int D = sp.prefix(ci.kbound);
      SymTensor cell(D, n);
      std::vector<char> seen(cell.size(), 0);
      std::vector<int> tup;
      SymTensor::for_each_sorted(D, n - 1, [&](const std::vector<int>& J) {
        for (int al = 0; al < sp.nram; ++al) {
          LaurentSeries r = eng.source(g, n, J, al);
          for (int k1 = 1; k1 <= ci.kbound; ++k1) {
            cplx w = k1 % 2 ? eng.project(k1, r, al) : cplx{};
            int f1 = sp.flat(k1, al);
            tup.assign(J.begin(), J.end());
            tup.insert(std::upper_bound(tup.begin(), tup.end(), f1), f1);
            std::size_t rk = cell.rank_sorted(tup.data());
            if (!seen[rk]) {
              seen[rk] = 1;
              cell.set_sorted(tup.data(), w);
            } else {
              ci.sym_dev = std::max(ci.sym_dev, std::abs(cell.get_sorted(tup.data()) - w));
            }
          }
        }
      });
      cell.for_each([&](const std::vector<int>& idx, cplx v) {
        if (std::abs(v) <= opt.support_tol) return;
        for (int f : idx)
          if (sp.k_of(f) > ci.support_bound)
            throw TruncationInsufficient("omega_{" + std::to_string(g) + "," + std::to_string(n) +
                                         "} has a pole beyond order " + std::to_string(ci.support_bound + 1));
      });
      tab.cells[{g, n}] = std::move(cell);
      tab.info[{g, n}] = ci;
      eng.add_table(g, n);
    }
  }
  fill_support_info(tab, opt.support_tol);
  return out;
}

cplx ebar_value(const LocalSpectralCurve& curve, int flat, int alpha, cplx z) {
  const IndexSpace sp = curve.space();
  cplx v{};
  if (sp.alpha_of(flat) == alpha) v += std::pow(z, -sp.k_of(flat) - 1);
  cplx zp = 1.0;
  for (int j = 1; j <= sp.kmax; ++j) {
    cplx s = curve.bergman_reg(flat, sp.flat(j, alpha));
    if (s != cplx{}) v += s * static_cast<double>(j) * zp;
    zp *= z;
  }
  return v;
}

cplx omega_eval(const OmegaGN& o, int g, int n, const std::vector<std::pair<std::string, cplx>>& points) {
  if (static_cast<int>(points.size()) != n) throw ConfigError("number of points does not match n");
  std::vector<int> al;
  std::vector<cplx> zs;
  for (const auto& [label, z] : points) {
    double r = std::abs(z);
    if (!(r > 0.0) || !(r < 1.0)) throw OutOfAnnulus("evaluation point outside 0 < |z| < 1");
    al.push_back(o.curve.label_index(label));
    zs.push_back(z);
  }
  const IndexSpace sp = o.curve.space();
  if (g == 0 && n == 2) {
    cplx v{};
    if (al[0] == al[1]) v += 1.0 / ((zs[0] - zs[1]) * (zs[0] - zs[1]));
    cplx z1p = 1.0;
    for (int i = 1; i <= sp.kmax; ++i, z1p *= zs[0]) {
      cplx z2p = 1.0;
      for (int j = 1; j <= sp.kmax; ++j, z2p *= zs[1]) {
        cplx s = o.curve.bergman_reg(sp.flat(i, al[0]), sp.flat(j, al[1]));
        if (s != cplx{}) v += s * static_cast<double>(i * j) * z1p * z2p;
      }
    }
    return v;
  }
  if (!o.table.has(g, n)) throw ConfigError("omega_{" + std::to_string(g) + "," + std::to_string(n) + "} not computed");
  const SymTensor& cell = o.table.cell(g, n);
  std::vector<std::vector<cplx>> E(static_cast<std::size_t>(n), std::vector<cplx>(static_cast<std::size_t>(cell.dim())));
  for (int m = 0; m < n; ++m)
    for (int f = 0; f < cell.dim(); ++f) E[m][f] = ebar_value(o.curve, f, al[m], zs[m]);
  cplx total{};
  cell.for_each([&](const std::vector<int>& idx, cplx v) {
    if (v == cplx{}) return;
    std::vector<int> perm = idx;
    do {
      cplx p = v;
      for (int m = 0; m < n; ++m) p *= E[m][perm[m]];
      total += p;
    } while (std::next_permutation(perm.begin(), perm.end()));
  });
  return total;
}

double atr_eo_crosscheck(const AiryTensors& t, const GaugeData& g, int chi_max) {
  const int n = t.sp.dim();
  auto I = Eigen::MatrixXcd::Identity(n, n);
  if (g.c.rows() != n || (g.c - I).cwiseAbs().maxCoeff() > 1e-14 || (g.d - I).cwiseAbs().maxCoeff() > 1e-14)
    throw InvalidGauge("crosscheck expects c = d = identity (e-bar basis)");
  SgnTable atr = atr_run(gauge_transform(t, g), chi_max);
  OmegaGN eo = eo_run(LocalSpectralCurve::with_s(t.labels, g.s), chi_max);
  double dev = 0.0;
  for (const auto& [key, cell] : atr.cells) {
    if (!eo.table.has(key.first, key.second)) return std::numeric_limits<double>::infinity();
    const SymTensor& other = eo.table.cell(key.first, key.second);
    cell.for_each([&](const std::vector<int>& idx, cplx v) { dev = std::max(dev, std::abs(v - other.get(idx))); });
    other.for_each([&](const std::vector<int>& idx, cplx v) { dev = std::max(dev, std::abs(v - cell.get(idx))); });
  }
  if (eo.table.cells.size() != atr.cells.size()) return std::numeric_limits<double>::infinity();
  return dev;
}

bool SupportReport::ok() const {
  for (const auto& r : rows)
    if (!r.ok) return false;
  return true;
}

SupportReport support_bound_check(const OmegaGN& o, double tol) {
  SupportReport rep;
  const auto& sp = o.table.sp;
  for (const auto& [key, cell] : o.table.cells) {
    SupportRow row;
    row.g = key.first;
    row.n = key.second;
    row.bound = 6 * row.g + 2 * row.n - 4;
    cell.for_each([&](const std::vector<int>& idx, cplx v) {
      double a = std::abs(v);
      bool even = false;
      for (int f : idx) {
        if (sp.k_of(f) % 2 == 0) even = true;
        if (a > tol) row.max_index = std::max(row.max_index, sp.k_of(f));
      }
      if (even) row.max_even = std::max(row.max_even, a);
    });
    row.ok = row.max_index <= row.bound && row.max_even <= tol;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace swtr
