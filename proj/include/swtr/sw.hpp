#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swtr/airy.hpp"
#include "swtr/laurent.hpp"

namespace swtr {

// A point of y^2 = P(z)^2 - 4 Lambda^{2g+2}, with y carrying the sheet.
struct CurvePoint {
  cplx z;
  cplx y;
};

struct SWCurve {
  int g = 0;
  std::vector<cplx> u;         // u_1 .. u_g
  cplx Lambda = 1.0;
  std::vector<cplx> P_coeffs;  // ascending; z^{g+1} + u_g z^{g-1} + ... + u_1
  std::vector<cplx> f_coeffs;  // ascending; P^2 - 4 Lambda^{2g+2}
  std::vector<cplx> branch_points;
  std::vector<cplx> critical_points;  // roots of P', sorted by (re, im)
  std::string sheet_convention = "principal sheet: y ~ +z^(g+1) at infinity, w = (P + y) / (2 Lambda^(g+1))";

  cplx P(cplx z) const;
  cplx dP(cplx z) const;
  cplx d2P(cplx z) const;
  cplx f(cplx z) const;
  cplx df(cplx z) const;
  cplx lambda_pow() const;  // Lambda^{g+1}
  // sqrt(f(z)) on the branch closest to y_ref
  cplx y_near(cplx z, cplx y_ref) const;
  // w on the sheet of p
  cplx w(const CurvePoint& p) const;
};

// Throws SingularCurve when two branch points are closer than tol.
SWCurve new_curve(int g, const std::vector<cplx>& u, cplx Lambda = 1.0, double tol = 1e-6);

// Polynomial helpers (ascending coefficients).
cplx poly_eval(const std::vector<cplx>& c, cplx z);
std::vector<cplx> poly_roots(const std::vector<cplx>& c);

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-13;
  long max_nodes = 1L << 20;
  int initial_panels = 8;
};

// Adaptive composite Gauss-Legendre (16 nodes per panel, panel bisection) of a vector-valued
// integrand on [lo, hi]. Throws QuadratureNotConverged past max_nodes.
using VecFn = std::function<Eigen::VectorXcd(double)>;
Eigen::VectorXcd integrate_adaptive(const VecFn& f, double lo, double hi, const QuadOptions& opt = {},
                                    long* nodes_used = nullptr);

struct Ellipse {
  cplx center;
  cplx half;  // half of the enclosed segment, as a complex vector
  double rho = 1.5;
  cplx point(double th) const;
  cplx deriv(double th) const;
};

// Canonical homology basis. Cuts are straight segments between paired branch points; the last
// cut carries no A-cycle. A_i: counterclockwise ellipse around cut i on the principal sheet.
// links[k]: polyline from a branch point of cut k+2 to a branch point of cut k+1 (0-based k),
// lifted to a loop that runs on the principal sheet and returns on the other one.
// B_i = links[i-1] + ... + links[g-1].
struct CycleBasis {
  std::vector<cplx> bp;
  std::vector<std::pair<int, int>> cuts;
  std::vector<Ellipse> A;
  std::vector<std::vector<cplx>> links;
  std::vector<std::pair<int, int>> link_ends;  // branch point indices (start, end)
  Eigen::MatrixXi intersection;  // (A_1..A_g, B_1..B_g)

  // y on the principal sheet, cuts along the segments
  cplx y_principal(cplx z) const;
  // same at z = bp[ib] + d, keeping d exact; ib < 0 means z = d
  cplx y_principal_offset(int ib, cplx d) const;
  int genus() const { return static_cast<int>(A.size()); }
};

// With reference != nullptr the pairing and path shapes are carried over by nearest-neighbour
// matching of branch points. Throws CycleConstructionFailed.
CycleBasis build_cycles(const SWCurve& c, const CycleBasis* reference = nullptr);
// Signed crossing count of two oriented closed polylines (A against B, B against B).
Eigen::MatrixXi intersection_matrix(const CycleBasis& cyc);
double winding_number(const std::vector<cplx>& closed_polyline, cplx z);

// Differential f(p) dz given by its dz coefficient; vector-valued to share quadrature nodes.
using DiffFn = std::function<Eigen::VectorXcd(const CurvePoint&)>;
Eigen::VectorXcd integrate_A(const SWCurve& c, const CycleBasis& cyc, int i, const DiffFn& f,
                             const QuadOptions& opt = {});
Eigen::VectorXcd integrate_B(const SWCurve& c, const CycleBasis& cyc, int i, const DiffFn& f,
                             const QuadOptions& opt = {});

struct PeriodData {
  Eigen::VectorXcd a, b;
  Eigen::MatrixXcd tau;          // tau(i, j) = B_j-period of omega_i
  Eigen::MatrixXcd norm_matrix;  // omega_i = sum_j N(i, j) z^{j-1} dz / y
  Eigen::MatrixXcd A_hol;        // A_hol(i, j) = A_i-period of z^{j-1} dz / y
  Eigen::MatrixXcd B_hol;        // B_hol(i, j) = B_i-period of z^{j-1} dz / y

  Eigen::VectorXcd omega(const CurvePoint& p) const;  // dz coefficients of omega_1..omega_g
};

cplx dS_coeff(const SWCurve& c, const CurvePoint& p);  // z P'(z) / y
PeriodData periods(const SWCurve& c, const CycleBasis& cyc, const QuadOptions& opt = {});

// Normalized Bergman kernel: base bidifferential
//   B0 = (2 y1 y2 + F(z1, z2)) / (4 y1 y2 (z1 - z2)^2) dz1 dz2,  F(z, z) = 2 f(z),
// plus sum C(j, k) z1^{j-1} z2^{k-1} dz1 dz2 / (y1 y2) fixing the A-periods.
struct BergmanData {
  SWCurve curve;
  CycleBasis cycles;
  PeriodData pd;
  Eigen::MatrixXcd correction;
  std::vector<cplx> F_coeffs;  // F(z1, z2) = sum_k z1^k z2^k (2 f_{2k} + f_{2k+1} (z1 + z2))

  cplx base(const CurvePoint& p, const CurvePoint& q) const;
  cplx eval(const CurvePoint& p, const CurvePoint& q) const;  // dz_p dz_q coefficient
};

// Throws NormalizationSolveFailed.
BergmanData bergman_kernel(const SWCurve& c, const CycleBasis& cyc, const PeriodData& pd,
                           const QuadOptions& opt = {});

struct RamPoint {
  int i = 0;      // 1-based critical point index
  int sheet = 1;  // +1 principal, -1 other
  std::string label;
  cplx z, x, y, w;
};

// Ordered 1+, 1-, 2+, 2-, ...
std::vector<RamPoint> ramification_points(const SWCurve& c, const CycleBasis& cyc);

struct ChartOptions {
  int order = 40;
  double guard = 0.5;  // |F(P(z_i(u); u))| < guard * eps^2
};

// Standard coordinate at a ramification point of the reference curve. With t = x - x_i,
// x = P(z) and eta^2 = t:
//   etabar^3 = 3 sheet * int_0^eta tau z_odd(tau) / Y_+(x_i + tau^2) dtau,  F(x) = etabar^2,
// where Y_+ continues the principal-sheet y through z_i. The cube root is branch 0 of
// pow_frac on the + sheet; the - sheet uses etabar_- = -etabar_+, so F is shared.
struct StandardChart {
  RamPoint ram;
  int order = 0;
  int branch = 0;
  LaurentSeries z_of_eta;        // z - z_i
  LaurentSeries etabar_of_eta;   // odd
  LaurentSeries eta_of_etabar;
  LaurentSeries z_of_etabar;     // z
  LaurentSeries y_of_etabar;     // curve y on this sheet
  LaurentSeries ybar_of_etabar;  // chart y; equals etabar
  LaurentSeries F_series;        // F(x_i + t) in t
  LaurentSeries Finv_series;     // t as a series in F
  LaurentSeries Yplus_t;         // Y_+(x_i + t)
  LaurentSeries zeven_t;         // even part of z(eta) as a series in t
  cplx Fprime0;
  double d_min = 0.0, eps = 0.0, M = 0.0, radius = 0.0;
  cplx shift = 0.0;              // F(P(z_i(u); u)) of the curve the chart set was built for
  cplx target_critical = 0.0;    // z_i(u)

  CurvePoint point(cplx etabar, const SWCurve& ref) const;
  cplx dz_detabar(cplx etabar) const;
};

// Charts of ref, checked against c. Throws OutOfNeighbourhood.
std::vector<StandardChart> standard_charts(const SWCurve& c, const SWCurve& ref, const CycleBasis& cyc_ref,
                                           const ChartOptions& opt = {});

// z - z_i as a series in eta with eta^2 = P(z) - P(z_i), branch 0 of the square root.
LaurentSeries critical_inverse(const std::vector<cplx>& P, cplx zi, int order);

// f(c + s) as a series in s; f must be a Taylor series.
LaurentSeries shift_series(const LaurentSeries& f, cplx c);

struct ExtractOptions {
  int nodes = 64;
  double tol = 1e-8;
};

struct LocalExpansions {
  std::vector<std::string> labels;
  int kmax = 0;
  Eigen::MatrixXcd s;  // IndexSpace{kmax, |labels|} flat indices
  Eigen::MatrixXcd c;  // c(flat(k, alpha), j - 1)
  double s_check = 0.0;  // deviation between two extraction radii, and asymmetry before symmetrizing

  IndexSpace space() const { return IndexSpace{kmax, static_cast<int>(labels.size())}; }
};

// Throws ExtractionNotConverged.
LocalExpansions local_expansions(const BergmanData& b, const std::vector<StandardChart>& charts, int kmax,
                                 const ExtractOptions& opt = {});

// e-bar^{k, alpha}(p) for k = 1..kmax as dz coefficients, by the contour
// (1 / 2 pi i k) oint B(p, q) etabar(q)^{-k} over |etabar| = radius.
Eigen::VectorXcd ebar_global(const BergmanData& b, const StandardChart& ch, int kmax, const CurvePoint& p,
                             double radius, int nodes = 64);

// Laurent data of dS(ref) - s* dS(c) in the etabar coordinates. Throws OutOfNeighbourhood.
WElement sw_embed_global(const SWCurve& c, const SWCurve& ref, const std::vector<StandardChart>& charts);

struct GDecomposition {
  std::vector<std::vector<cplx>> xi;  // xi[alpha][k - 1], k = 1..kmax
  Eigen::VectorXcd a;
  double residual = 0.0;              // max mismatch of the fitted regular parts
};

GDecomposition decompose_in_G(const WElement& local, const PeriodData& pd, const LocalExpansions& le);

}  // namespace swtr
