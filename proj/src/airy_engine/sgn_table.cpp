#include <algorithm>
#include <charconv>
#include <sstream>

#include <json.hpp>

#include "swtr/airy.hpp"

namespace swtr {

SymTensor::SymTensor(int dim, int order) : dim_(dim), order_(order) {
  int top = dim + order + 1;
  binom_.assign(static_cast<std::size_t>(top + 1), std::vector<std::uint64_t>(static_cast<std::size_t>(order + 2), 0));
  for (int m = 0; m <= top; ++m) {
    binom_[m][0] = 1;
    for (int r = 1; r <= std::min(m, order + 1); ++r) binom_[m][r] = binom_[m - 1][r - 1] + (r <= m - 1 ? binom_[m - 1][r] : 0);
  }
  std::size_t count = order == 0 ? 1 : binom_[static_cast<std::size_t>(dim + order - 1)][static_cast<std::size_t>(order)];
  data_.assign(count, cplx{});
}

std::size_t SymTensor::rank_sorted(const int* idx) const {
  // multiset i_0 <= ... <= i_{n-1} maps to the strict set i_m + m; colex rank
  std::size_t r = 0;
  for (int m = 0; m < order_; ++m) r += binom_[static_cast<std::size_t>(idx[m] + m)][static_cast<std::size_t>(m + 1)];
  return r;
}

bool SymTensor::in_range(const std::vector<int>& idx) const {
  for (int i : idx)
    if (i < 0 || i >= dim_) return false;
  return true;
}

cplx SymTensor::get(std::vector<int> idx) const {
  if (!in_range(idx)) return {};
  std::sort(idx.begin(), idx.end());
  return data_[rank_sorted(idx.data())];
}

void SymTensor::for_each_sorted(int dim, int order, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> t(static_cast<std::size_t>(order), 0);
  if (order == 0) {
    f(t);
    return;
  }
  if (dim <= 0) return;
  while (true) {
    f(t);
    int p = order - 1;
    while (p >= 0 && t[p] == dim - 1) --p;
    if (p < 0) break;
    ++t[p];
    for (int q = p + 1; q < order; ++q) t[q] = t[p];
  }
}

void SymTensor::for_each(const std::function<void(const std::vector<int>&, cplx)>& f) const {
  for_each_sorted(dim_, order_, [&](const std::vector<int>& t) { f(t, data_[rank_sorted(t.data())]); });
}

cplx SgnTable::value(int g, int n, const std::vector<int>& flat) const {
  auto it = cells.find({g, n});
  if (it == cells.end()) return {};
  return it->second.get(flat);
}

std::string SgnTable::index_label(int f) const {
  int k = sp.k_of(f);
  if (sp.nram == 1) return std::to_string(k);
  int al = sp.alpha_of(f);
  std::string lab = al < static_cast<int>(labels.size()) ? labels[al] : std::to_string(al);
  return std::to_string(k) + "_" + lab;
}

namespace {

std::string shortest(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string SgnTable::to_csv() const {
  std::ostringstream os;
  os << "g,n,indices,re,im\n";
  for (const auto& [key, t] : cells) {
    t.for_each([&](const std::vector<int>& idx, cplx v) {
      if (v == cplx{}) return;
      os << key.first << ',' << key.second << ",(";
      for (std::size_t m = 0; m < idx.size(); ++m) os << (m ? " " : "") << index_label(idx[m]);
      os << ")," << shortest(v.real()) << ',' << shortest(v.imag()) << '\n';
    });
  }
  return os.str();
}

std::string SgnTable::to_json() const {
  nlohmann::ordered_json j;
  j["basis_tag"] = basis_tag;
  j["kmax"] = sp.kmax;
  j["labels"] = labels;
  auto cells_j = nlohmann::ordered_json::array();
  for (const auto& [key, t] : cells) {
    nlohmann::ordered_json c;
    c["g"] = key.first;
    c["n"] = key.second;
    if (auto it = info.find(key); it != info.end()) {
      c["kbound"] = it->second.kbound;
      c["support_bound"] = it->second.support_bound;
      c["max_index"] = it->second.max_index;
      c["odd_only"] = it->second.odd_only;
      c["sym_dev"] = it->second.sym_dev;
    }
    auto entries = nlohmann::ordered_json::array();
    t.for_each([&](const std::vector<int>& idx, cplx v) {
      if (v == cplx{}) return;
      nlohmann::ordered_json e;
      auto ks = nlohmann::ordered_json::array();
      auto as = nlohmann::ordered_json::array();
      for (int f : idx) {
        ks.push_back(sp.k_of(f));
        as.push_back(sp.alpha_of(f));
      }
      e["k"] = ks;
      e["alpha"] = as;
      e["re"] = v.real();
      e["im"] = v.imag();
      entries.push_back(e);
    });
    c["entries"] = entries;
    cells_j.push_back(c);
  }
  j["cells"] = cells_j;
  return j.dump(2);
}

void fill_support_info(SgnTable& tab, double tol) {
  for (const auto& [key, t] : tab.cells) {
    CellInfo& ci = tab.info[key];
    ci.support_bound = 6 * key.first + 2 * key.second - 4;
    ci.max_index = 0;
    ci.odd_only = true;
    t.for_each([&](const std::vector<int>& idx, cplx v) {
      if (std::abs(v) <= tol) return;
      for (int f : idx) {
        int k = tab.sp.k_of(f);
        ci.max_index = std::max(ci.max_index, k);
        if (k % 2 == 0) ci.odd_only = false;
      }
    });
  }
}

}  // namespace swtr
