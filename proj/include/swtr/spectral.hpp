#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "swtr/airy.hpp"
#include "swtr/laurent.hpp"

namespace swtr {

// Local spectral data at a set of ramification points, each with local coordinate z and
// involution z -> -z.
//   denom[alpha]: D(z) with omega_{0,1}(z) - omega_{0,1}(-z) = D(z) dz, D = d_2 z^2 + d_4 z^4 + ...
//   bergman_reg:  s over IndexSpace{kmax, |ram|}; the regular part of omega_{0,2} near
//                 (alpha, beta) is sum s^{(k,alpha)(k',beta)} f_k(z1) f_k'(z2), f_k = k z^{k-1} dz.
struct LocalSpectralCurve {
  std::vector<std::string> ram;
  std::vector<LaurentSeries> denom;
  int kmax = 0;
  Eigen::MatrixXcd bergman_reg;

  IndexSpace space() const { return IndexSpace{kmax, static_cast<int>(ram.size())}; }
  int label_index(const std::string& label) const;  // throws ConfigError
  void validate() const;                             // throws ConfigError

  // D = 4 z^2 at every point, s = 0.
  static LocalSpectralCurve airy(const std::vector<std::string>& ram, int kmax);
  static LocalSpectralCurve with_s(const std::vector<std::string>& ram, const Eigen::MatrixXcd& s);
};

struct EoOptions {
  int extra = 2;       // guard band above 6g+2n-4, as in atr_run
  int order_pad = 2;   // additional known orders of every local series
  double support_tol = 1e-10;
};

// omega_{g,n} as coefficient tensors on the e-bar basis, together with the curve.
struct OmegaGN {
  LocalSpectralCurve curve;
  SgnTable table;  // basis_tag "bergman"
  int chi_max = 0;
};

OmegaGN eo_run(const LocalSpectralCurve& curve, int chi_max, const EoOptions& opt = {});

// e-bar^{(k,beta)} evaluated at local coordinate z near ramification point alpha.
cplx ebar_value(const LocalSpectralCurve& curve, int flat, int alpha, cplx z);

// Coefficient function of omega_{g,n}(p_1, ..., p_n) with p_m given by (label, z) in the
// local frame of that label. (g, n) = (0, 2) evaluates the Bergman kernel itself.
// Throws OutOfAnnulus unless 0 < |z| < 1 for every point.
cplx omega_eval(const OmegaGN& o, int g, int n, const std::vector<std::pair<std::string, cplx>>& points);

// ATR on gauge_transform(t, g) against EO on the curve with bergman_reg = g.s and D = 4 z^2.
// Requires c = d = identity. Returns the componentwise max deviation over all cells.
double atr_eo_crosscheck(const AiryTensors& t, const GaugeData& g, int chi_max);

struct SupportRow {
  int g = 0, n = 0;
  int max_index = 0;
  int bound = 0;
  double max_even = 0.0;  // largest |coefficient| with an even index
  bool ok = false;
};
struct SupportReport {
  std::vector<SupportRow> rows;
  bool ok() const;
};
SupportReport support_bound_check(const OmegaGN& o, double tol = 1e-10);

}  // namespace swtr
