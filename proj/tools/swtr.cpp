#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "swtr/errors.hpp"
#include "swtr/prepotential.hpp"

using namespace swtr;
using ojson = nlohmann::ordered_json;

namespace {

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / name);
  if (!out) throw ConfigError("cannot write " + name + " in " + dir);
  out << text;
}

void check_precision(const std::string& p) {
  if (p == "extended") throw ConfigError("extended precision is not supported");
}

int airy_selftest(const std::string& out_dir) {
  ojson rep;
  bool ok = true;
  auto record = [&](const std::string& name, cplx got, cplx want, double tol) {
    const bool pass = std::abs(got - want) < tol;
    ok = ok && pass;
    rep["checks"].push_back({{"name", name}, {"value", {got.real(), got.imag()}}, {"expected", {want.real(), want.imag()}},
                             {"tol", tol}, {"pass", pass}});
  };
  AiryTensors t = build_residue_constraint_tensors(15, {"a"});
  const IndexSpace& sp = t.sp;
  record("a_111", t.A(sp.flat(1, 0), sp.flat(1, 0), sp.flat(1, 0)), 0.25, 1e-13);
  record("eps_3", t.eps[sp.flat(3, 0)], 1.0 / 16.0, 1e-13);
  AiryTensors r = build_tensors_by_residue(15, {"a"}, Variant::residue_constraints);
  record("closed_form_vs_residue", max_abs_diff(t, r), 0.0, 1e-12);
  SgnTable S = atr_run(build_residue_constraint_tensors(6, {"a"}), 1);
  record("S_03_111", S.value(0, 3, {0, 0, 0}), 0.5, 1e-13);
  record("S_11_3", S.value(1, 1, {sp.flat(3, 0)}), 1.0 / 16.0, 1e-13);
  rep["pass"] = ok;
  const std::string text = rep.dump(2) + "\n";
  std::cout << text;
  if (!out_dir.empty()) write_file(out_dir, "report.json", text);
  return ok ? 0 : 1;
}

int eo_run_cmd(int points, const std::string& s_mode, int chi_max, std::uint64_t seed, const std::string& out_dir) {
  if (points < 1) throw ConfigError("--points must be positive");
  if (chi_max < 1) throw ConfigError("--chi-max must be positive");
  std::vector<std::string> labels;
  for (int p = 1; p <= points; ++p) labels.push_back(std::to_string(p));
  const int kmax = 3 * chi_max + 3;
  LocalSpectralCurve curve;
  if (s_mode == "zero") {
    curve = LocalSpectralCurve::airy(labels, kmax);
  } else if (s_mode == "random") {
    const int n = kmax * points;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    Eigen::MatrixXcd s(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = cplx(u(rng), u(rng));
    curve = LocalSpectralCurve::with_s(labels, s);
  } else {
    throw ConfigError("--s must be zero or random");
  }
  OmegaGN o = eo_run(curve, chi_max);
  const std::string csv = o.table.to_csv();
  std::cout << csv;
  if (!out_dir.empty()) write_file(out_dir, "sgn_table.csv", csv);
  return 0;
}

int sw_periods_cmd(const std::string& config, const std::string& out_dir) {
  VerifyConfig cfg = load_verify_config(config);
  cfg.validate();
  PipelineArtifacts art = reference_pipeline(cfg);
  const std::string text = periods_json(art.ref, &art.le, &art.charts).dump(2) + "\n";
  std::cout << text;
  if (!out_dir.empty()) write_file(out_dir, "periods.json", text);
  return 0;
}

int verify_cmd(VerifyConfig cfg) {
  VerifyReport rep = verify_theorem(cfg);
  for (const auto& c : rep.checks)
    if (c.mandatory || !c.pass)
      std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << " rel_err=" << c.rel_err << " tol=" << c.tol
                << (c.mandatory ? "" : " (convention-specific)") << '\n';
  std::cerr << "matched convention: " << (rep.matched_convention.empty() ? "none" : rep.matched_convention) << '\n';
  std::cout << rep.to_json().dump(2) << '\n';
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological recursion and Seiberg-Witten prepotential checks"};
  app.require_subcommand(1);

  std::string out_dir, precision = "double", config, s_mode = "zero";
  int chi_max = 0, points = 1;
  std::uint64_t seed = 0;
  double tol = 0.0;

  auto* airy = app.add_subcommand("airy-selftest", "golden values of the Airy tensors and ATR");
  airy->add_option("--out", out_dir, "output directory");
  airy->add_option("--precision", precision)->check(CLI::IsMember({"double", "extended"}));

  auto* eo = app.add_subcommand("eo-run", "run the EO recursion on a local spectral curve and print the table");
  eo->add_option("--points", points, "number of ramification points");
  eo->add_option("--s", s_mode, "Bergman regular part: zero or random");
  eo->add_option("--chi-max", chi_max, "largest 2g-2+n")->required();
  eo->add_option("--seed", seed);
  eo->add_option("--out", out_dir);
  eo->add_option("--precision", precision)->check(CLI::IsMember({"double", "extended"}));

  auto* swp = app.add_subcommand("sw-periods", "periods, charts and local expansions of a curve");
  swp->add_option("--config", config)->required();
  swp->add_option("--out", out_dir);
  swp->add_option("--precision", precision)->check(CLI::IsMember({"double", "extended"}));

  auto* ver = app.add_subcommand("verify-theorem", "compare prepotential derivatives with B-periods of omega_{0,n}");
  ver->add_option("--config", config)->required();
  ver->add_option("--chi-max", chi_max);
  ver->add_option("--out", out_dir);
  ver->add_option("--seed", seed);
  ver->add_option("--tol", tol);
  ver->add_option("--precision", precision)->check(CLI::IsMember({"double", "extended"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    check_precision(precision);
    if (*airy) return airy_selftest(out_dir);
    if (*eo) return eo_run_cmd(points, s_mode, chi_max, seed, out_dir);
    if (*swp) return sw_periods_cmd(config, out_dir);
    if (*ver) {
      VerifyConfig cfg = load_verify_config(config);
      if (ver->count("--chi-max")) cfg.chi_max = chi_max;
      if (ver->count("--out")) cfg.out_dir = out_dir;
      if (ver->count("--seed")) cfg.seed = seed;
      if (ver->count("--tol")) cfg.tol = tol;
      if (ver->count("--precision")) cfg.precision = precision;
      return verify_cmd(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 2;
}
