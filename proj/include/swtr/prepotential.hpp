#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "swtr/spectral.hpp"
#include "swtr/sw.hpp"

namespace swtr {

// (g, n, j_1 <= ... <= j_n) -> B-period integral, j 1-based
using BPeriodMap = std::map<std::tuple<int, int, std::vector<int>>, cplx>;

// oint_{B_j1} ... oint_{B_jn} omega_{g,n} = (2 pi i)^n sum S_{g,n;f_1..f_n} prod_m c(f_m, j_m - 1).
// c rows use the flat indices of S.sp. Throws BasisMismatch unless S is in the Bergman basis.
BPeriodMap bperiod_contract(const SgnTable& S, const Eigen::MatrixXcd& c);

// Curve, transported cycles and periods at moduli u.
struct SwPoint {
  SWCurve curve;
  CycleBasis cycles;
  PeriodData pd;
};

SwPoint sw_point(int g, const std::vector<cplx>& u, cplx Lambda, const CycleBasis* reference,
                 const QuadOptions& q = {});

struct PeriodInversion {
  std::vector<cplx> u;
  SwPoint point;
  int iterations = 0;
  double residual = 0.0;
};

// Damped Newton for a(u) = a_target starting at start, with da/du = -A_hol.
// Cycles are carried along the iterates. Throws InversionNotConverged.
PeriodInversion invert_periods(const Eigen::VectorXcd& a_target, const SwPoint& start, double tol = 1e-10,
                               int max_iter = 50, const QuadOptions& q = {});

struct VerifyConfig {
  int genus = 1;
  std::vector<cplx> u0;
  cplx Lambda = 1.0;
  std::vector<Eigen::VectorXcd> delta;  // displacement vectors
  std::string delta_space = "a";        // "a" or "u"
  int chi_max = 1;
  int chart_order = 40;
  int kmax_s = 8;
  int extract_nodes = 64;
  double fd_step_rel = 1e-3;  // h = fd_step_rel * max(1, |a|)
  double tol = 1e-3;          // theorem comparison, relative
  double route_tol = 1e-5;    // FD of b against FD of tau
  double sym_tol = 1e-6;
  double min_order = 1.8;     // observed FD convergence order
  bool check_n4 = false;
  double tol_n4 = 1e-3;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string precision = "double";

  void validate() const;  // throws ConfigError
};

VerifyConfig parse_verify_config(const nlohmann::json& j);  // throws ConfigError
VerifyConfig load_verify_config(const std::string& path);    // throws ConfigError

struct CheckResult {
  std::string name;
  cplx lhs = 0.0, rhs = 0.0;
  double abs_err = 0.0, rel_err = 0.0, tol = 0.0;
  bool pass = false;
  bool mandatory = true;
  bool informative = true;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::map<std::string, bool> conventions;  // "general", "sw" -> all theorem checks pass
  std::string matched_convention;           // empty when neither matches
  Eigen::MatrixXi intersection;
  Eigen::MatrixXcd d3F_fd;                  // (i, j * g + k), FD of tau
  Eigen::MatrixXcd d3F_theorem;             // same layout, contraction only, no convention factor
  nlohmann::ordered_json environment;
  nlohmann::ordered_json timing;
  bool pass = false;

  nlohmann::ordered_json to_json(bool with_timing = true) const;
};

// Conventions for d^n F = factor * oint^n omega_{0,n}:
//   general: (1 / 2 pi i)^{n-1};  sw: (-1)^n (1 / 2 pi i)^{n-1}.
cplx convention_factor(const std::string& convention, int n);

// Curve, charts, local expansions and omega_{g,n} at u0.
struct PipelineArtifacts {
  SwPoint ref;
  std::vector<StandardChart> charts;
  LocalExpansions le;
  OmegaGN omega;
};
PipelineArtifacts reference_pipeline(const VerifyConfig& cfg);

// With cfg.out_dir set, also writes report.json, sgn_table.csv, periods.json and theorem_n3.csv.
VerifyReport verify_theorem(const VerifyConfig& cfg);
nlohmann::ordered_json periods_json(const SwPoint& p, const LocalExpansions* le = nullptr,
                                    const std::vector<StandardChart>* charts = nullptr);

}  // namespace swtr
