#include <cmath>
#include <fstream>
#include <numbers>

#include "swtr/errors.hpp"
#include "swtr/prepotential.hpp"

namespace swtr {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

cplx parse_cplx(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_object() && j.contains("re")) return {j.at("re").get<double>(), j.value("im", 0.0)};
  throw ConfigError(what + ": expected a number, [re, im] or {re, im}");
}

std::vector<cplx> parse_cvec(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array");
  std::vector<cplx> v;
  for (const auto& e : j) v.push_back(parse_cplx(e, what));
  return v;
}

ojson cj(cplx z) { return ojson::array({z.real(), z.imag()}); }

ojson cvec(const std::vector<cplx>& v) {
  ojson a = ojson::array();
  for (cplx z : v) a.push_back(cj(z));
  return a;
}

ojson cvec(const Eigen::VectorXcd& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(cj(v[i]));
  return a;
}

ojson cmat(const Eigen::MatrixXcd& m) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(cvec(Eigen::VectorXcd(m.row(i).transpose())));
  return a;
}

ojson imat(const Eigen::MatrixXi& m) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ojson r = ojson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    a.push_back(r);
  }
  return a;
}

}  // namespace

void VerifyConfig::validate() const {
  if (genus < 1) throw ConfigError("genus must be at least 1");
  if (static_cast<int>(u0.size()) != genus) throw ConfigError("u0 needs genus entries");
  if (chi_max < 1) throw ConfigError("chi_max must be at least 1");
  if (delta.empty()) throw ConfigError("displacement grid is empty");
  for (const auto& d : delta)
    if (d.size() != genus) throw ConfigError("displacement vectors need genus entries");
  if (delta_space != "a" && delta_space != "u") throw ConfigError("delta_space must be \"a\" or \"u\"");
  if (!(tol > 0) || !(route_tol > 0) || !(sym_tol > 0) || !(tol_n4 > 0) || !(fd_step_rel > 0))
    throw ConfigError("tolerances and steps must be positive");
  if (chart_order < 8 || kmax_s < 1 || extract_nodes < 8) throw ConfigError("series orders too small");
  if (check_n4 && chi_max < 2) throw ConfigError("the n = 4 check needs chi_max >= 2");
  if (precision == "extended") throw ConfigError("extended precision is not supported");
  if (precision != "double") throw ConfigError("precision must be double or extended");
}

VerifyConfig parse_verify_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  VerifyConfig c;
  try {
    c.genus = j.value("genus", c.genus);
    if (!j.contains("u0")) throw ConfigError("u0 is required");
    c.u0 = parse_cvec(j.at("u0"), "u0");
    if (j.contains("Lambda")) c.Lambda = parse_cplx(j.at("Lambda"), "Lambda");
    if (j.contains("delta")) {
      for (const auto& d : j.at("delta")) {
        auto v = parse_cvec(d, "delta");
        c.delta.push_back(Eigen::Map<Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size())));
      }
    } else {
      // coordinate directions scaled by the FD step
      for (int k = 0; k < c.genus; ++k) c.delta.push_back(Eigen::VectorXcd::Unit(c.genus, k) * 1e-3);
    }
    c.delta_space = j.value("delta_space", c.delta_space);
    c.chi_max = j.value("chi_max", c.chi_max);
    c.chart_order = j.value("chart_order", c.chart_order);
    c.kmax_s = j.value("kmax_s", c.kmax_s);
    c.extract_nodes = j.value("extract_nodes", c.extract_nodes);
    c.fd_step_rel = j.value("fd_step_rel", c.fd_step_rel);
    c.tol = j.value("tol", c.tol);
    c.route_tol = j.value("route_tol", c.route_tol);
    c.sym_tol = j.value("sym_tol", c.sym_tol);
    c.min_order = j.value("min_order", c.min_order);
    c.check_n4 = j.value("check_n4", c.check_n4);
    c.tol_n4 = j.value("tol_n4", c.tol_n4);
    c.seed = j.value("seed", c.seed);
    c.out_dir = j.value("out", c.out_dir);
    c.precision = j.value("precision", c.precision);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

VerifyConfig load_verify_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config " + path + " is not valid JSON");
  return parse_verify_config(j);
}

cplx convention_factor(const std::string& convention, int n) {
  const cplx f = std::pow(1.0 / cplx(0.0, 2.0 * std::numbers::pi), n - 1);
  if (convention == "general") return f;
  if (convention == "sw") return (n % 2 ? -1.0 : 1.0) * f;
  throw ConfigError("unknown convention " + convention);
}

ojson VerifyReport::to_json(bool with_timing) const {
  ojson j;
  j["pass"] = pass;
  j["matched_convention"] = matched_convention;
  ojson conv;
  for (const auto& [k, v] : conventions) conv[k] = v;
  j["conventions"] = conv;
  j["intersection"] = imat(intersection);
  j["d3F_fd"] = cmat(d3F_fd);
  j["d3F_bperiod"] = cmat(d3F_theorem);
  ojson cs = ojson::array();
  for (const auto& c : checks) {
    ojson e;
    e["name"] = c.name;
    e["lhs"] = cj(c.lhs);
    e["rhs"] = cj(c.rhs);
    e["abs_err"] = c.abs_err;
    e["rel_err"] = c.rel_err;
    e["tol"] = c.tol;
    e["pass"] = c.pass;
    e["mandatory"] = c.mandatory;
    e["informative"] = c.informative;
    cs.push_back(e);
  }
  j["checks"] = cs;
  j["environment"] = environment;
  if (with_timing) j["timing"] = timing;
  return j;
}

ojson periods_json(const SwPoint& p, const LocalExpansions* le, const std::vector<StandardChart>* charts) {
  ojson j;
  const SWCurve& c = p.curve;
  ojson curve;
  curve["genus"] = c.g;
  curve["u"] = cvec(c.u);
  curve["Lambda"] = cj(c.Lambda);
  curve["P_coeffs"] = cvec(c.P_coeffs);
  curve["branch_points"] = cvec(c.branch_points);
  curve["critical_points"] = cvec(c.critical_points);
  curve["sheet_convention"] = c.sheet_convention;
  j["curve"] = curve;
  ojson cyc;
  ojson cuts = ojson::array();
  for (auto [a, b] : p.cycles.cuts) cuts.push_back({a, b});
  cyc["cuts"] = cuts;
  cyc["intersection"] = imat(p.cycles.intersection);
  j["cycles"] = cyc;
  ojson per;
  per["a"] = cvec(p.pd.a);
  per["b"] = cvec(p.pd.b);
  per["tau"] = cmat(p.pd.tau);
  per["A_hol"] = cmat(p.pd.A_hol);
  per["B_hol"] = cmat(p.pd.B_hol);
  per["norm_matrix"] = cmat(p.pd.norm_matrix);
  j["periods"] = per;
  if (charts) {
    ojson cs = ojson::array();
    for (const auto& ch : *charts) {
      ojson e;
      e["label"] = ch.ram.label;
      e["z"] = cj(ch.ram.z);
      e["x"] = cj(ch.ram.x);
      e["y"] = cj(ch.ram.y);
      e["w"] = cj(ch.ram.w);
      e["Fprime0"] = cj(ch.Fprime0);
      e["d_min"] = ch.d_min;
      e["radius"] = ch.radius;
      cs.push_back(e);
    }
    j["charts"] = cs;
  }
  if (le) {
    ojson l;
    l["labels"] = le->labels;
    l["kmax"] = le->kmax;
    l["s_check"] = le->s_check;
    l["c"] = cmat(le->c);
    l["s"] = cmat(le->s);
    j["local"] = l;
  }
  return j;
}

}  // namespace swtr
