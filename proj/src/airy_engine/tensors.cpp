#include <cmath>

#include "swtr/airy.hpp"

namespace swtr {

namespace {

AiryTensors blank(int kmax, const std::vector<std::string>& ram) {
  AiryTensors t;
  t.sp = IndexSpace{kmax, static_cast<int>(ram.size())};
  t.labels = ram;
  int n = t.sp.dim();
  t.A = Tensor3(n);
  t.B = Tensor3(n);
  t.C = Tensor3(n);
  t.eps.assign(static_cast<std::size_t>(n), cplx{});
  return t;
}

LaurentSeries f_mode(int k) { return LaurentSeries::monomial(static_cast<double>(k), k - 1); }
LaurentSeries e_mode(int k) { return LaurentSeries::monomial(1.0, -k - 1); }

// Res(pref * p q r / z) where p, q, r are coefficient functions of f/e differentials.
cplx triple_residue(cplx pref, const LaurentSeries& p, const LaurentSeries& q, const LaurentSeries& r) {
  LaurentSeries integrand = (p * q * r).shifted(-1).scaled(pref);
  return residue(SeriesDifferential(integrand));
}

}  // namespace

AiryTensors build_residue_constraint_tensors(int kmax, const std::vector<std::string>& ram) {
  AiryTensors t = blank(kmax, ram);
  const auto& sp = t.sp;
  for (int al = 0; al < sp.nram; ++al) {
    auto F = [&](int k) { return sp.flat(k, al); };
    t.A(F(1), F(1), F(1)) = 0.25;
    for (int i = 1; i <= kmax; i += 2)
      for (int j = 1; j <= kmax; ++j) {
        int k = i + j - 3;
        if (k >= 1 && k <= kmax) t.B(F(i), F(j), F(k)) = 0.25 * j;
      }
    for (int j = 1; j <= kmax; ++j)
      for (int k = 1; k <= kmax; ++k) {
        int i = j + k + 3;
        if ((j + k) % 2 == 0 && i <= kmax) t.C(F(i), F(j), F(k)) = 0.25;
      }
    if (kmax >= 3) t.eps[static_cast<std::size_t>(F(3))] = 1.0 / 16.0;
  }
  return t;
}

AiryTensors build_tensors_by_residue(int kmax, const std::vector<std::string>& ram, Variant variant) {
  AiryTensors t = blank(kmax, ram);
  const auto& sp = t.sp;
  const bool tr = variant == Variant::tr_variant;
  std::vector<LaurentSeries> fz(static_cast<std::size_t>(kmax + 1)), ez(fz.size()), fl(fz.size()), el(fz.size());
  for (int k = 1; k <= kmax; ++k) {
    fz[k] = f_mode(k);
    ez[k] = e_mode(k);
    // the last factor of the TR variant is evaluated at -z: phi(-z) d(-z)
    fl[k] = tr ? fz[k].subs_scale(-1.0).scaled(-1.0) : fz[k];
    el[k] = tr ? ez[k].subs_scale(-1.0).scaled(-1.0) : ez[k];
  }
  for (int al = 0; al < sp.nram; ++al) {
    auto F = [&](int k) { return sp.flat(k, al); };
    for (int i = 1; i <= kmax; i += 2) {
      cplx pref = (tr ? -1.0 : 1.0) / (4.0 * i);
      for (int j = 1; j <= kmax; ++j)
        for (int k = 1; k <= kmax; ++k) {
          t.A(F(i), F(j), F(k)) = triple_residue(pref, fz[i], fz[j], fl[k]);
          t.B(F(i), F(j), F(k)) = triple_residue(pref, fz[i], fz[j], el[k]);
          t.C(F(i), F(j), F(k)) = triple_residue(pref, fz[i], ez[j], el[k]);
        }
      // B(z,-z) singular part -dz^2/(4z^2) inserted in the kernel residue
      LaurentSeries sing = LaurentSeries::monomial(-0.25, -2);
      t.eps[static_cast<std::size_t>(F(i))] =
          residue(SeriesDifferential((fz[i] * sing).shifted(-1).scaled(-1.0 / (4.0 * i))));
    }
  }
  return t;
}

AiryTensors build_tr_variant_tensors(int kmax, const std::vector<std::string>& ram) {
  return build_tensors_by_residue(kmax, ram, Variant::tr_variant);
}

double max_abs_diff(const AiryTensors& a, const AiryTensors& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.A.v.size(); ++i) {
    m = std::max(m, std::abs(a.A.v[i] - b.A.v[i]));
    m = std::max(m, std::abs(a.B.v[i] - b.B.v[i]));
    m = std::max(m, std::abs(a.C.v[i] - b.C.v[i]));
  }
  for (std::size_t i = 0; i < a.eps.size(); ++i) m = std::max(m, std::abs(a.eps[i] - b.eps[i]));
  return m;
}

namespace {

// product n (n - step) (n - 2 step) ... > 1, exact in integers while below 2^53
double falling_product(int n, int step) {
  std::uint64_t r = 1;
  double d = 1.0;
  bool exact = true;
  for (int i = n; i > 1; i -= step) {
    if (exact && r < (std::uint64_t{1} << 53) / static_cast<std::uint64_t>(i)) {
      r *= static_cast<std::uint64_t>(i);
      d = static_cast<double>(r);
    } else {
      exact = false;
      d *= i;
    }
  }
  return d;
}

}  // namespace

double factorial(int n) { return falling_product(n, 1); }
double double_factorial(int n) { return falling_product(n, 2); }

}  // namespace swtr
