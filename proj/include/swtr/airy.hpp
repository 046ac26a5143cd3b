#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "swtr/laurent.hpp"

namespace swtr {

// Mode index (k, alpha) with k >= 1, flattened k-major so that all indices with
// k <= K form the prefix [0, K * nram).
struct IndexSpace {
  int kmax = 0;
  int nram = 1;
  int dim() const { return kmax * nram; }
  int flat(int k, int alpha) const { return (k - 1) * nram + alpha; }
  int k_of(int f) const { return f / nram + 1; }
  int alpha_of(int f) const { return f % nram; }
  int prefix(int kcap) const { return std::min(kcap, kmax) * nram; }
};

// Dense 3-tensor over flat indices. Conventions:
//   A(i,j,k) = a_{ijk};  B(i,j,k) = b^k_{ij};  C(i,j,k) = c_i^{jk}.
struct Tensor3 {
  int n = 0;
  std::vector<cplx> v;
  Tensor3() = default;
  explicit Tensor3(int dim) : n(dim), v(static_cast<std::size_t>(dim) * dim * dim) {}
  cplx& operator()(int i, int j, int k) { return v[(static_cast<std::size_t>(i) * n + j) * n + k]; }
  cplx operator()(int i, int j, int k) const { return v[(static_cast<std::size_t>(i) * n + j) * n + k]; }
};

enum class Variant { residue_constraints, tr_variant };

struct AiryTensors {
  IndexSpace sp;
  std::vector<std::string> labels;
  Tensor3 A, B, C;
  std::vector<cplx> eps;
  int kmax() const { return sp.kmax; }
};

// Closed forms of the residue-constraints Airy structure, block diagonal in alpha.
AiryTensors build_residue_constraint_tensors(int kmax, const std::vector<std::string>& ram);
// Tensors obtained by evaluating residues of f/e basis products with LaurentSeries.
// For residue_constraints the prefactor is +1/(4i) (see README); for tr_variant it is
// -1/(4i) with the last factor evaluated at -z.
AiryTensors build_tensors_by_residue(int kmax, const std::vector<std::string>& ram, Variant variant);
AiryTensors build_tr_variant_tensors(int kmax, const std::vector<std::string>& ram);

double max_abs_diff(const AiryTensors& a, const AiryTensors& b);

// Gauge data (c, d, s); c(j, i) = c^j_i, d(i, j) = d^i_j, s symmetric.
struct GaugeData {
  IndexSpace sp;
  Eigen::MatrixXcd c, d, s;
  int cutoff = 0;  // c = d = identity on indices with k > cutoff

  static GaugeData identity(const IndexSpace& sp);
  static GaugeData from_s(const IndexSpace& sp, const Eigen::MatrixXcd& s);
};

struct GaugeCheck {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  std::string note;
};
struct GaugeReport {
  std::vector<GaugeCheck> checks;
  bool ok() const;
};

GaugeReport validate_gauge(const GaugeData& g, double tol = 1e-12);
AiryTensors gauge_transform(const AiryTensors& t, const GaugeData& g);
// Gauge equivalent to applying g1 first and then g2.
GaugeData compose_gauges(const GaugeData& g1, const GaugeData& g2);

// Symmetric tensor of order n over [0, dim), stored on sorted index tuples.
class SymTensor {
 public:
  SymTensor() = default;
  SymTensor(int dim, int order);

  int dim() const { return dim_; }
  int order() const { return order_; }
  std::size_t size() const { return data_.size(); }

  std::size_t rank_sorted(const int* idx) const;
  cplx get(std::vector<int> idx) const;  // any index order
  cplx get_sorted(const int* idx) const { return data_[rank_sorted(idx)]; }
  void set_sorted(const int* idx, cplx v) { data_[rank_sorted(idx)] = v; }
  bool in_range(const std::vector<int>& idx) const;

  // Visit every sorted tuple in rank-independent lexicographic order.
  void for_each(const std::function<void(const std::vector<int>&, cplx)>& f) const;
  static void for_each_sorted(int dim, int order, const std::function<void(const std::vector<int>&)>& f);

  const std::vector<cplx>& data() const { return data_; }

 private:
  int dim_ = 0, order_ = 0;
  std::vector<std::vector<std::uint64_t>> binom_;
  std::vector<cplx> data_;
};

// Nonzero entries of a symmetric tensor grouped by the multiset of all but one index:
// for sorted I, at(I) lists (j, T(j, I)).
class SliceIndex {
 public:
  SliceIndex() = default;
  explicit SliceIndex(const SymTensor& t, double drop_tol = 0.0);
  const std::vector<std::pair<int, cplx>>& at(const std::vector<int>& sorted_rest) const;

 private:
  SymTensor ranker_;
  std::vector<std::vector<std::pair<int, cplx>>> nz_;
};

struct CellInfo {
  int kbound = 0;        // index bound k <= kbound stored in the cell
  int support_bound = 0; // 6g + 2n - 4
  double sym_dev = 0.0;  // max deviation between first-slot choices
  int max_index = 0;     // largest k with |coefficient| > support tolerance
  bool odd_only = true;  // all coefficients with an even k vanish
};

struct SgnTable {
  std::string basis_tag = "airy";
  IndexSpace sp;
  std::vector<std::string> labels;
  std::map<std::pair<int, int>, SymTensor> cells;
  std::map<std::pair<int, int>, CellInfo> info;

  bool has(int g, int n) const { return cells.count({g, n}) != 0; }
  const SymTensor& cell(int g, int n) const { return cells.at({g, n}); }
  // value at arbitrary (k, alpha) tuple; zero outside the stored bound
  cplx value(int g, int n, const std::vector<int>& flat) const;

  std::string to_csv() const;
  std::string to_json() const;
  std::string index_label(int f) const;
};

struct AtrOptions {
  int extra = 2;              // guard band above 6g+2n-4
  bool check_symmetry = true; // recompute with every distinct first index
  double support_tol = 1e-10;
};

// Largest index bound used by a cell.
int cell_kbound(int g, int n, int extra);
int default_kmax(int chi_max);

SgnTable atr_run(const AiryTensors& t, int chi_max, const AtrOptions& opt = {});

// Cell info (max index, odd support) from stored values.
void fill_support_info(SgnTable& tab, double tol);

// Element of W^Ram: per label the coefficient function of a residue-free differential.
struct WElement {
  std::vector<std::string> labels;
  std::vector<SeriesDifferential> series;

  // J_m = coefficient of z^{-m-1}; J_{+k} = y_k, J_{-k} = k x^k.
  cplx J(int m, int alpha) const;
  cplx x(int k, int alpha) const { return J(-k, alpha) / static_cast<double>(k); }
  cplx y(int k, int alpha) const { return J(k, alpha); }

  // w = sum (y_k e^k + x^k f_k) with x[alpha][k-1], y[alpha][k-1].
  static WElement from_coordinates(const std::vector<std::string>& labels,
                                   const std::vector<std::vector<cplx>>& x,
                                   const std::vector<std::vector<cplx>>& y);
};

// H_{(k,alpha)} for k = 1..imax, indexed [alpha][k-1]. Evaluated as residues.
std::vector<std::vector<cplx>> eval_hamiltonians(const WElement& w, Variant variant, int imax);
// Same quantities assembled from tensors: -y_i + a x x + 2 b x y + c y y.
std::vector<std::vector<cplx>> hamiltonians_from_tensors(const AiryTensors& t, const WElement& w, int imax);

// Laurent data of z d(z^2) - exp(a L)(y d(z^2)) for a disc x = z^2 + a, y = y(z).
// y_series must be an exact polynomial; coefficients below min_exp are dropped.
WElement embed_disc(cplx a, const LaurentSeries& y_series, const std::string& alpha, int min_exp = -64);

// Randomized search for a zero of all Hamiltonians among elements with finitely many
// x-modes (x^1 != 0) and at most max_y_modes nonzero y-modes. Each trial fixes x and the
// y-support at random and minimizes sum |H_i|^2 (i <= imax) over the y values with
// Levenberg-Marquardt; min_max_h is the smallest max_i |H_i| reached.
struct TrivialityResult {
  double min_max_h = 0.0;
  int trials = 0;
};
TrivialityResult triviality_search(std::uint64_t seed, int trials, int max_y_modes = 6, int imax = 30);

double double_factorial(int n);
double factorial(int n);

}  // namespace swtr
