#include <algorithm>
#include <string>

#include "swtr/airy.hpp"
#include "swtr/errors.hpp"

namespace swtr {

SliceIndex::SliceIndex(const SymTensor& t, double drop_tol) : ranker_(t.dim(), std::max(t.order() - 1, 0)) {
  nz_.assign(ranker_.size(), {});
  std::vector<int> rest;
  t.for_each([&](const std::vector<int>& idx, cplx v) {
    if (std::abs(v) <= drop_tol || v == cplx{}) return;
    for (std::size_t p = 0; p < idx.size(); ++p) {
      if (p > 0 && idx[p] == idx[p - 1]) continue;
      rest.assign(idx.begin(), idx.end());
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(p));
      nz_[ranker_.rank_sorted(rest.data())].emplace_back(idx[p], v);
    }
  });
}

const std::vector<std::pair<int, cplx>>& SliceIndex::at(const std::vector<int>& sorted_rest) const {
  static const std::vector<std::pair<int, cplx>> empty;
  if (nz_.empty() || !ranker_.in_range(sorted_rest)) return empty;
  return nz_[ranker_.rank_sorted(sorted_rest.data())];
}

int cell_kbound(int g, int n, int extra) { return 6 * g + 2 * n - 4 + extra; }

int default_kmax(int chi_max) {
  int g_max = (chi_max + 1) / 2;
  int n_max = chi_max + 2;
  return 6 * g_max + 2 * n_max + 3;
}

namespace {

bool stable(int g, int n) { return n >= 1 && 2 * g - 2 + n > 0; }

class Recursion {
 public:
  Recursion(const AiryTensors& t, SgnTable& tab) : t_(t), tab_(tab), n_(t.sp.dim()) {
    row_live_.assign(static_cast<std::size_t>(n_), false);
    c_rows_.assign(static_cast<std::size_t>(n_), {});
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        bool cj = false;
        for (int k = 0; k < n_; ++k) {
          if (t.B(i, j, k) != cplx{}) row_live_[i] = true;
          if (t.C(i, j, k) != cplx{}) cj = true;
        }
        if (cj) {
          row_live_[i] = true;
          c_rows_[i].push_back(j);
        }
      }
  }

  void add_slices(int g, int n) { slices_[{g, n}] = SliceIndex(tab_.cell(g, n)); }

  const SliceIndex* slice(int g, int n) const {
    auto it = slices_.find({g, n});
    return it == slices_.end() ? nullptr : &it->second;
  }

  cplx entry(int g, int n, int i1, const std::vector<int>& rest) const {
    if (!row_live_[i1]) return {};
    cplx acc{};
    const int m = n - 1;
    std::vector<int> others;
    if (const SliceIndex* sl = slice(g, n - 1)) {
      cplx bsum{};
      for (int p = 0; p < m; ++p) {
        others.assign(rest.begin(), rest.end());
        others.erase(others.begin() + p);
        for (const auto& [j, v] : sl->at(others)) bsum += t_.B(i1, rest[p], j) * v;
      }
      acc += 2.0 * bsum;
    }
    std::vector<int> I1, I2;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
      I1.clear();
      I2.clear();
      for (int p = 0; p < m; ++p) (mask >> p & 1u ? I1 : I2).push_back(rest[p]);
      int n1 = 1 + static_cast<int>(I1.size()), n2 = 1 + static_cast<int>(I2.size());
      for (int g1 = 0; g1 <= g; ++g1) {
        const SliceIndex* s1 = slice(g1, n1);
        const SliceIndex* s2 = slice(g - g1, n2);
        if (!s1 || !s2) continue;
        const auto& l1 = s1->at(I1);
        if (l1.empty()) continue;
        const auto& l2 = s2->at(I2);
        for (const auto& [j1, v1] : l1)
          for (const auto& [j2, v2] : l2) acc += t_.C(i1, j1, j2) * v1 * v2;
      }
    }
    if (g >= 1) {
      if (const SliceIndex* sl = slice(g - 1, n + 1)) {
        std::vector<int> tup;
        for (int j1 : c_rows_[i1]) {
          tup.assign(rest.begin(), rest.end());
          tup.insert(std::upper_bound(tup.begin(), tup.end(), j1), j1);
          for (const auto& [j2, v] : sl->at(tup)) acc += t_.C(i1, j1, j2) * v;
        }
      }
    }
    return acc;
  }

 private:
  const AiryTensors& t_;
  SgnTable& tab_;
  int n_;
  std::vector<bool> row_live_;
  std::vector<std::vector<int>> c_rows_;
  std::map<std::pair<int, int>, SliceIndex> slices_;
};

void guard(const SgnTable& tab, int g, int n, const SymTensor& cell, double tol) {
  int bound = 6 * g + 2 * n - 4;
  cell.for_each([&](const std::vector<int>& idx, cplx v) {
    if (std::abs(v) <= tol) return;
    for (int f : idx)
      if (tab.sp.k_of(f) > bound)
        throw TruncationInsufficient("cell (" + std::to_string(g) + "," + std::to_string(n) +
                                     ") has nonzero coefficient beyond index " + std::to_string(bound));
  });
}

}  // namespace

SgnTable atr_run(const AiryTensors& t, int chi_max, const AtrOptions& opt) {
  SgnTable tab;
  tab.sp = t.sp;
  tab.labels = t.labels;
  const auto& sp = t.sp;
  for (int chi = 1; chi <= chi_max; ++chi)
    for (int g = 0; 2 * g - 1 <= chi; ++g) {
      int kb = cell_kbound(g, chi + 2 - 2 * g, opt.extra);
      if (kb > sp.kmax)
        throw TruncationInsufficient("cell needs index bound " + std::to_string(kb) + " but kmax = " +
                                     std::to_string(sp.kmax));
    }

  Recursion rec(t, tab);
  for (int chi = 1; chi <= chi_max; ++chi) {
    for (int g = 0; 2 * g - 1 <= chi; ++g) {
      const int n = chi + 2 - 2 * g;
      if (!stable(g, n)) continue;
      CellInfo ci;
      ci.kbound = cell_kbound(g, n, opt.extra);
      ci.support_bound = 6 * g + 2 * n - 4;
      const int D = sp.prefix(ci.kbound);
      SymTensor cell(D, n);

      if (g == 0 && n == 3) {
        for (int i = 0; i < sp.dim(); ++i)
          for (int j = 0; j < sp.dim(); ++j)
            for (int k = 0; k < sp.dim(); ++k) {
              cplx a = t.A(i, j, k);
              if (std::abs(a) <= opt.support_tol) continue;
              if (std::max({i, j, k}) >= D)
                throw TruncationInsufficient("initial cubic tensor exceeds the (0,3) index bound");
              std::vector<int> s{i, j, k};
              std::sort(s.begin(), s.end());
              ci.sym_dev = std::max(ci.sym_dev, std::abs(2.0 * a - 2.0 * t.A(s[0], s[1], s[2])));
              cell.set_sorted(s.data(), 2.0 * t.A(s[0], s[1], s[2]));
            }
      } else if (g == 1 && n == 1) {
        for (int i = 0; i < sp.dim(); ++i) {
          if (std::abs(t.eps[i]) <= opt.support_tol) continue;
          if (i >= D) throw TruncationInsufficient("initial linear term exceeds the (1,1) index bound");
          cell.set_sorted(&i, t.eps[i]);
        }
      } else {
        std::vector<int> rest;
        SymTensor::for_each_sorted(D, n, [&](const std::vector<int>& tup) {
          rest.assign(tup.begin() + 1, tup.end());
          cplx v = rec.entry(g, n, tup[0], rest);
          cell.set_sorted(tup.data(), v);
          if (!opt.check_symmetry) return;
          for (int p = 1; p < n; ++p) {
            if (tup[p] == tup[p - 1]) continue;
            rest.assign(tup.begin(), tup.end());
            rest.erase(rest.begin() + p);
            cplx w = rec.entry(g, n, tup[p], rest);
            ci.sym_dev = std::max(ci.sym_dev, std::abs(w - v));
          }
        });
      }
      guard(tab, g, n, cell, opt.support_tol);
      tab.cells[{g, n}] = std::move(cell);
      tab.info[{g, n}] = ci;
      rec.add_slices(g, n);
    }
  }
  fill_support_info(tab, opt.support_tol);
  return tab;
}

}  // namespace swtr
