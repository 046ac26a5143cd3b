#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "swtr/airy.hpp"

namespace swtr {

namespace {

struct HamiltonianResidual {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const AiryTensors* t = nullptr;
  std::vector<cplx> x;
  std::vector<int> ymodes;
  int imax = 0;

  int inputs() const { return 2 * static_cast<int>(ymodes.size()); }
  int values() const { return 2 * imax; }

  std::vector<cplx> hamiltonians(const Eigen::VectorXd& p) const {
    const int n = t->sp.dim();
    std::vector<cplx> y(static_cast<std::size_t>(n));
    for (std::size_t m = 0; m < ymodes.size(); ++m) y[ymodes[m] - 1] = {p[2 * m], p[2 * m + 1]};
    std::vector<cplx> h(static_cast<std::size_t>(imax));
    for (int i = 0; i < imax; ++i) {
      cplx acc = -y[i];
      for (int j = 0; j < n; ++j) {
        if (x[j] == cplx{} && y[j] == cplx{}) continue;
        for (int k = 0; k < n; ++k)
          acc += t->A(i, j, k) * x[j] * x[k] + 2.0 * t->B(i, j, k) * x[j] * y[k] + t->C(i, j, k) * y[j] * y[k];
      }
      h[i] = acc;
    }
    return h;
  }

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    auto h = hamiltonians(p);
    for (int i = 0; i < imax; ++i) {
      r[2 * i] = h[i].real();
      r[2 * i + 1] = h[i].imag();
    }
    return 0;
  }
};

}  // namespace

TrivialityResult triviality_search(std::uint64_t seed, int trials, int max_y_modes, int imax) {
  const int ypool = 2 * max_y_modes;
  const int kmax = std::max(imax, ypool);
  AiryTensors t = build_residue_constraint_tensors(kmax, {"a"});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> mag(0.5, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * 3.141592653589793);

  TrivialityResult res;
  res.min_max_h = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    HamiltonianResidual f;
    f.t = &t;
    f.imax = imax;
    f.x.assign(static_cast<std::size_t>(t.sp.dim()), cplx{});
    f.x[0] = std::polar(mag(rng), phase(rng));
    for (int k = 2; k <= 3; ++k) f.x[k - 1] = {unif(rng), unif(rng)};
    std::vector<int> pool(static_cast<std::size_t>(ypool));
    std::iota(pool.begin(), pool.end(), 1);
    std::shuffle(pool.begin(), pool.end(), rng);
    f.ymodes.assign(pool.begin(), pool.begin() + max_y_modes);
    std::sort(f.ymodes.begin(), f.ymodes.end());

    Eigen::VectorXd p(f.inputs());
    for (int i = 0; i < p.size(); ++i) p[i] = unif(rng);
    Eigen::NumericalDiff<HamiltonianResidual> nd(f);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<HamiltonianResidual>> lm(nd);
    lm.parameters.maxfev = 4000;
    lm.parameters.xtol = 1e-14;
    lm.parameters.ftol = 1e-14;
    lm.minimize(p);

    double worst = 0.0;
    for (cplx h : f.hamiltonians(p)) worst = std::max(worst, std::abs(h));
    res.min_max_h = std::min(res.min_max_h, worst);
    ++res.trials;
  }
  return res;
}

}  // namespace swtr
