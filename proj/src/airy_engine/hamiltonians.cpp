#include "swtr/airy.hpp"
#include "swtr/errors.hpp"

namespace swtr {

cplx WElement::J(int m, int alpha) const { return series.at(static_cast<std::size_t>(alpha)).base[-m - 1]; }

WElement WElement::from_coordinates(const std::vector<std::string>& labels,
                                    const std::vector<std::vector<cplx>>& x,
                                    const std::vector<std::vector<cplx>>& y) {
  WElement w;
  w.labels = labels;
  for (std::size_t al = 0; al < labels.size(); ++al) {
    LaurentSeries s;
    if (al < y.size())
      for (std::size_t k = 1; k <= y[al].size(); ++k) s.add_to(-static_cast<int>(k) - 1, y[al][k - 1]);
    if (al < x.size())
      for (std::size_t k = 1; k <= x[al].size(); ++k)
        s.add_to(static_cast<int>(k) - 1, static_cast<double>(k) * x[al][k - 1]);
    w.series.emplace_back(std::move(s));
  }
  return w;
}

std::vector<std::vector<cplx>> eval_hamiltonians(const WElement& w, Variant variant, int imax) {
  std::vector<std::vector<cplx>> out(w.series.size(), std::vector<cplx>(static_cast<std::size_t>(imax)));
  for (std::size_t al = 0; al < w.series.size(); ++al) {
    // u = z - w(z)/(2 z dz)
    const LaurentSeries& wh = w.series[al].base;
    LaurentSeries u = LaurentSeries::monomial(1.0, 1) - wh.shifted(-1).scaled(0.5);
    LaurentSeries quad = variant == Variant::residue_constraints ? u * u : (u * u.subs_scale(-1.0)).scaled(-1.0);
    for (int i = 1; i <= imax; ++i) {
      LaurentSeries integrand;
      if (i % 2 == 0) {
        // Res(u z^{2n} d(z^2))
        integrand = u * LaurentSeries::monomial(2.0, i + 1);
      } else {
        // (1/2) Res(u u' z^{2n-2} d(z^2)) with i = 2n - 1
        integrand = quad * LaurentSeries::monomial(1.0, i);
      }
      out[al][static_cast<std::size_t>(i - 1)] = residue(SeriesDifferential(integrand));
    }
  }
  return out;
}

std::vector<std::vector<cplx>> hamiltonians_from_tensors(const AiryTensors& t, const WElement& w, int imax) {
  const auto& sp = t.sp;
  int n = sp.dim();
  std::vector<cplx> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
  for (int f = 0; f < n; ++f) {
    int k = sp.k_of(f), al = sp.alpha_of(f);
    x[f] = w.x(k, al);
    y[f] = w.y(k, al);
  }
  std::vector<std::vector<cplx>> out(static_cast<std::size_t>(sp.nram), std::vector<cplx>(static_cast<std::size_t>(imax)));
  for (int i = 1; i <= std::min(imax, sp.kmax); ++i)
    for (int al = 0; al < sp.nram; ++al) {
      int fi = sp.flat(i, al);
      cplx h = -y[fi];
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) h += t.A(fi, j, k) * x[j] * x[k] + 2.0 * t.B(fi, j, k) * x[j] * y[k] + t.C(fi, j, k) * y[j] * y[k];
      out[al][static_cast<std::size_t>(i - 1)] = h;
    }
  return out;
}

WElement embed_disc(cplx a, const LaurentSeries& y_series, const std::string& alpha, int min_exp) {
  for (int e = y_series.min_exp(); e < 0 && e <= y_series.top(); ++e)
    if (y_series[e] != cplx{}) throw DegenerateDisc("y must be a power series");
  if (y_series[1] == cplx{}) throw DegenerateDisc("linear coefficient of y vanishes (tangency order > 1)");
  // 2 zeta y(zeta) d zeta pulled back through zeta = sqrt(z^2 - a)
  SeriesDifferential ydx(y_series.shifted(1).scaled(2.0));
  SeriesDifferential flowed = sqrt_shift_flow(ydx, -a, min_exp);
  WElement w;
  w.labels = {alpha};
  w.series.emplace_back(LaurentSeries::monomial(2.0, 2) - flowed.base);
  return w;
}

}  // namespace swtr
