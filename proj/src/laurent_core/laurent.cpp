#include "swtr/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "swtr/errors.hpp"

namespace swtr {

namespace {

int sat_add(int t, int v) {
  if (t >= kExact || v >= kExact) return kExact;
  long long s = static_cast<long long>(t) + v;
  if (s >= kExact) return kExact;
  return static_cast<int>(s);
}

const std::string& pick_label(const LaurentSeries& a, const LaurentSeries& b) {
  return a.label.empty() ? b.label : a.label;
}

bool is_monomial(const LaurentSeries& f) {
  int v = f.valuation();
  for (int e = v + 1; e <= f.top(); ++e)
    if (f[e] != cplx{}) return false;
  return true;
}

cplx cpow_int(cplx c, int p) {
  cplx r = 1.0;
  cplx b = p < 0 ? 1.0 / c : c;
  for (int n = std::abs(p); n > 0; n >>= 1) {
    if (n & 1) r *= b;
    b *= b;
  }
  return r;
}

}  // namespace

LaurentSeries LaurentSeries::monomial(cplx c, int e, int trunc) {
  LaurentSeries s;
  s.trunc_ = std::min(trunc, kExact);
  s.min_ = e;
  if (e <= s.trunc_) s.c_.assign(1, c);
  s.normalize_storage();
  return s;
}

LaurentSeries LaurentSeries::from_coeffs(int min_exp, std::vector<cplx> c, int trunc) {
  LaurentSeries s;
  s.min_ = min_exp;
  s.trunc_ = std::min(trunc, kExact);
  s.c_ = std::move(c);
  s.normalize_storage();
  return s;
}

LaurentSeries LaurentSeries::zero(int trunc) {
  LaurentSeries s;
  s.trunc_ = std::min(trunc, kExact);
  s.normalize_storage();
  return s;
}

void LaurentSeries::normalize_storage() {
  if (exact()) {
    trunc_ = kExact;
    while (!c_.empty() && c_.back() == cplx{}) c_.pop_back();
  } else {
    long long n = static_cast<long long>(trunc_) - min_ + 1;
    c_.resize(static_cast<std::size_t>(std::max<long long>(0, n)));
  }
}

int LaurentSeries::valuation() const {
  for (std::size_t i = 0; i < c_.size(); ++i)
    if (c_[i] != cplx{}) return min_ + static_cast<int>(i);
  return exact() ? kExact : trunc_ + 1;
}

cplx LaurentSeries::operator[](int e) const {
  if (e > trunc_) throw UnknownCoefficient("exponent " + std::to_string(e) + " beyond trunc_order " + std::to_string(trunc_));
  if (e < min_ || e > top()) return {};
  return c_[static_cast<std::size_t>(e - min_)];
}

void LaurentSeries::set(int e, cplx v) {
  if (e > trunc_) throw UnknownCoefficient("cannot set exponent " + std::to_string(e) + " beyond trunc_order");
  if (c_.empty()) {
    if (v == cplx{}) return;
    min_ = e;
    c_.assign(1, v);
    normalize_storage();
    return;
  }
  if (e < min_) {
    c_.insert(c_.begin(), static_cast<std::size_t>(min_ - e), cplx{});
    min_ = e;
  }
  if (e > top()) c_.resize(static_cast<std::size_t>(e - min_ + 1));
  c_[static_cast<std::size_t>(e - min_)] = v;
  if (exact()) normalize_storage();
}

LaurentSeries LaurentSeries::truncated(int t) const {
  LaurentSeries s = *this;
  if (t >= trunc_) return s;
  s.trunc_ = t;
  s.normalize_storage();
  return s;
}

LaurentSeries LaurentSeries::shifted(int m) const {
  LaurentSeries s = *this;
  s.min_ += m;
  s.trunc_ = sat_add(trunc_, m);
  return s;
}

LaurentSeries LaurentSeries::derivative() const {
  LaurentSeries s;
  s.label = label;
  s.min_ = min_ - 1;
  s.trunc_ = exact() ? kExact : trunc_ - 1;
  s.c_.resize(c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) s.c_[i] = c_[i] * static_cast<double>(min_ + static_cast<int>(i));
  s.normalize_storage();
  return s;
}

LaurentSeries LaurentSeries::scaled(cplx f) const {
  LaurentSeries s = *this;
  for (auto& c : s.c_) c *= f;
  if (s.exact()) s.normalize_storage();
  return s;
}

LaurentSeries LaurentSeries::subs_scale(cplx lambda) const {
  LaurentSeries s = *this;
  for (std::size_t i = 0; i < c_.size(); ++i) s.c_[i] *= cpow_int(lambda, min_ + static_cast<int>(i));
  return s;
}

cplx LaurentSeries::eval(cplx z) const {
  if (c_.empty()) return {};
  cplx acc{};
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * z + c_[i];
  return acc * cpow_int(z, min_);
}

double LaurentSeries::max_abs() const {
  double m = 0.0;
  for (const auto& c : c_) m = std::max(m, std::abs(c));
  return m;
}

LaurentSeries inverse(const LaurentSeries& b) {
  int v = b.valuation();
  if (v >= kExact || v > b.trunc_order()) throw DivisionByZeroSeries("divisor vanishes up to its truncation");
  cplx c0 = b[v];
  if (b.exact() && is_monomial(b)) return LaurentSeries::monomial(1.0 / c0, -v);
  int R = b.exact() ? kDefaultOrder : b.trunc_order() - v;
  std::vector<cplx> u(static_cast<std::size_t>(R + 1));
  for (int k = 0; k <= R; ++k) u[k] = b[v + k] / c0;
  std::vector<cplx> g(static_cast<std::size_t>(R + 1));
  g[0] = 1.0;
  for (int n = 1; n <= R; ++n) {
    cplx s{};
    for (int k = 1; k <= n; ++k) s += u[k] * g[n - k];
    g[n] = -s;
  }
  for (auto& x : g) x /= c0;
  auto out = LaurentSeries::from_coeffs(-v, std::move(g), -v + R);
  out.label = b.label;
  return out;
}

LaurentSeries ring_ops(const LaurentSeries& a, const LaurentSeries& b, RingOp op) {
  switch (op) {
    case RingOp::add:
    case RingOp::sub: {
      int t = std::min(a.trunc_order(), b.trunc_order());
      int lo = std::min(a.min_exp(), b.min_exp());
      int hi = std::min(t, std::max(a.top(), b.top()));
      std::vector<cplx> c(static_cast<std::size_t>(std::max(0, hi - lo + 1)));
      double sg = op == RingOp::add ? 1.0 : -1.0;
      for (int e = lo; e <= hi; ++e) {
        cplx x = (e >= a.min_exp() && e <= a.top()) ? a[e] : cplx{};
        cplx y = (e >= b.min_exp() && e <= b.top()) ? b[e] : cplx{};
        c[static_cast<std::size_t>(e - lo)] = x + sg * y;
      }
      auto out = LaurentSeries::from_coeffs(lo, std::move(c), t);
      out.label = pick_label(a, b);
      return out;
    }
    case RingOp::mul: {
      int va = a.valuation(), vb = b.valuation();
      if ((va >= kExact) || (vb >= kExact)) {
        auto z = LaurentSeries::zero();
        z.label = pick_label(a, b);
        return z;
      }
      int t = std::min(sat_add(a.trunc_order(), vb), sat_add(b.trunc_order(), va));
      int lo = va + vb;
      int hi = std::min(t, a.top() + b.top());
      std::vector<cplx> c(static_cast<std::size_t>(std::max(0, hi - lo + 1)));
      const auto& ad = a.data();
      const auto& bd = b.data();
      for (int i = va; i <= a.top(); ++i) {
        cplx x = ad[static_cast<std::size_t>(i - a.min_exp())];
        if (x == cplx{}) continue;
        int jmax = std::min(b.top(), hi - i);
        for (int j = vb; j <= jmax; ++j) c[static_cast<std::size_t>(i + j - lo)] += x * bd[static_cast<std::size_t>(j - b.min_exp())];
      }
      auto out = LaurentSeries::from_coeffs(lo, std::move(c), t);
      out.label = pick_label(a, b);
      return out;
    }
    case RingOp::div:
      return ring_ops(a, inverse(b), RingOp::mul);
  }
  throw std::logic_error("unknown ring op");
}

LaurentSeries operator+(const LaurentSeries& a, cplx s) { return a + LaurentSeries::monomial(s, 0); }

LaurentSeries pow_int(const LaurentSeries& f, int n) {
  LaurentSeries base = n < 0 ? inverse(f) : f;
  LaurentSeries r = LaurentSeries::monomial(1.0, 0);
  for (int k = std::abs(n); k > 0; k >>= 1) {
    if (k & 1) r = r * base;
    if (k > 1) base = base * base;
  }
  r.label = f.label;
  return r;
}

LaurentSeries compose(const LaurentSeries& f, const LaurentSeries& g) {
  for (int e = g.min_exp(); e <= std::min(0, g.top()); ++e)
    if (g[e] != cplx{}) throw std::invalid_argument("compose: inner series must have min_exp >= 1");
  int vg = g.valuation();
  int vf = f.valuation();
  if (vf >= kExact || vf > f.trunc_order()) {
    if (f.exact() || vg >= kExact) return LaurentSeries::zero();
    return LaurentSeries::zero((f.trunc_order() + 1) * vg - 1);
  }
  if (vg >= kExact) {
    // g == 0 exactly: only the constant term survives
    if (vf < 0) throw DivisionByZeroSeries("compose: negative powers of a zero series");
    return LaurentSeries::monomial(f[0], 0);
  }
  if (vg > g.trunc_order()) throw UnknownCoefficient("compose: inner series unknown");
  if (vf < 0 && vg != 1) throw std::invalid_argument("compose: negative powers need an inner series of valuation 1");

  long long T = kExact;
  if (!f.exact()) T = std::min<long long>(T, static_cast<long long>(f.trunc_order() + 1) * vg - 1);
  int Rg;
  if (!g.exact()) Rg = g.trunc_order() - vg;
  else if (vf < 0 && !is_monomial(g)) Rg = kDefaultOrder;
  else Rg = kExact;
  if (Rg < kExact) T = std::min<long long>(T, static_cast<long long>(vf) * vg + Rg);
  int t = static_cast<int>(std::min<long long>(T, kExact));

  LaurentSeries acc = LaurentSeries::zero(t);
  int ftop = std::min(f.top(), f.trunc_order());
  if (vf < 0) {
    LaurentSeries ginv = inverse(g).truncated(t + 1);
    LaurentSeries p = ginv;
    for (int m = -1; m >= vf; --m) {
      if (m <= ftop && f[m] != cplx{}) acc = acc + p.scaled(f[m]).truncated(t);
      if (m > vf) p = (p * ginv).truncated(t);
    }
  }
  if (vf <= 0 && 0 <= ftop) acc = acc + LaurentSeries::monomial(f[0], 0, t);
  LaurentSeries gt = g.truncated(t);
  LaurentSeries p = gt;
  for (int m = 1; m <= ftop; ++m) {
    if (static_cast<long long>(m) * vg > t) break;
    if (m >= vf && f[m] != cplx{}) acc = acc + p.scaled(f[m]).truncated(t);
    if (m < ftop) p = (p * gt).truncated(t);
  }
  acc = acc.truncated(t);
  acc.label = g.label;
  return acc;
}

LaurentSeries functional_inverse(const LaurentSeries& f) {
  for (int e = f.min_exp(); e <= std::min(0, f.top()); ++e)
    if (f[e] != cplx{}) throw NotInvertible("series has terms of order <= 0");
  cplx c1 = f[1];
  if (c1 == cplx{}) throw NotInvertible("linear coefficient vanishes");
  if (f.exact() && is_monomial(f)) return LaurentSeries::monomial(1.0 / c1, 1);
  int T = f.exact() ? kDefaultOrder : f.trunc_order();
  LaurentSeries ft = f.truncated(T);
  LaurentSeries fp = ft.derivative();
  std::vector<cplx> h0(static_cast<std::size_t>(T), cplx{});
  h0[0] = 1.0 / c1;
  LaurentSeries h = LaurentSeries::from_coeffs(1, h0);
  LaurentSeries z = LaurentSeries::variable();
  int iters = 2;
  for (int n = 1; n < T; n *= 2) ++iters;
  for (int it = 0; it < iters; ++it) {
    LaurentSeries num = compose(ft, h) - z;
    LaurentSeries den = compose(fp, h);
    LaurentSeries corr = (num / den).truncated(T);
    h = (h - corr).truncated(T);
    h = LaurentSeries::from_coeffs(h.min_exp(), h.data());
  }
  auto out = LaurentSeries::from_coeffs(h.min_exp(), h.data(), T);
  out.label = f.label;
  return out;
}

LaurentSeries compose_invert(const LaurentSeries& f, ComposeMode mode, const LaurentSeries* g) {
  if (mode == ComposeMode::functional_inverse) return functional_inverse(f);
  if (!g) throw std::invalid_argument("compose mode needs an inner series");
  return compose(f, *g);
}

LaurentSeries pow_frac(const LaurentSeries& f, int p, int q, int branch) {
  if (q <= 0) throw BranchUndefined("q must be positive");
  int v = f.valuation();
  if (v >= kExact || v > f.trunc_order()) throw BranchUndefined("series vanishes up to truncation");
  long long mp = static_cast<long long>(v) * p;
  if (mp % q != 0) throw BranchUndefined("m*p = " + std::to_string(mp) + " not divisible by q = " + std::to_string(q));
  int lead = static_cast<int>(mp / q);
  cplx c = f[v];
  cplx root = std::pow(cpow_int(c, p), 1.0 / q) * std::exp(cplx(0.0, 2.0 * std::numbers::pi * branch / q));
  if (f.exact() && is_monomial(f)) {
    auto out = LaurentSeries::monomial(root, lead);
    out.label = f.label;
    return out;
  }
  int R = f.exact() ? kDefaultOrder : f.trunc_order() - v;
  std::vector<cplx> u(static_cast<std::size_t>(R + 1));
  for (int k = 0; k <= R; ++k) u[k] = f[v + k] / c;
  double r = static_cast<double>(p) / q;
  std::vector<cplx> g(static_cast<std::size_t>(R + 1));
  g[0] = 1.0;
  for (int n = 1; n <= R; ++n) {
    cplx s{};
    for (int k = 1; k <= n; ++k) s += ((r + 1.0) * k - n) * u[k] * g[n - k];
    g[n] = s / static_cast<double>(n);
  }
  for (auto& x : g) x *= root;
  auto out = LaurentSeries::from_coeffs(lead, std::move(g), lead + R);
  out.label = f.label;
  return out;
}

cplx residue(const SeriesDifferential& f) { return f.base[-1]; }

bool residue_free(const SeriesDifferential& f, double rel_tol) {
  double m = f.base.max_abs();
  return std::abs(residue(f)) <= rel_tol * m;
}

LaurentSeries primitive(const SeriesDifferential& f, double rel_tol) {
  if (!residue_free(f, rel_tol)) {
    cplx r = residue(f);
    throw NonzeroResidue("residue " + std::to_string(r.real()) + "+" + std::to_string(r.imag()) + "i");
  }
  const auto& b = f.base;
  int lo = b.min_exp() + 1;
  std::vector<cplx> c(b.data().size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    int e = b.min_exp() + static_cast<int>(i);
    if (e != -1) c[i] = b.data()[i] / static_cast<double>(e + 1);
  }
  auto out = LaurentSeries::from_coeffs(lo, std::move(c), b.exact() ? kExact : b.trunc_order() + 1);
  out.label = b.label;
  return out;
}

IntegrateResult integrate_residue(const SeriesDifferential& f, IntegrateMode mode, double rel_tol) {
  IntegrateResult r;
  if (mode == IntegrateMode::residue) r.value = residue(f);
  else r.series = primitive(f, rel_tol);
  return r;
}

cplx symplectic_pairing(const SeriesDifferential& f, const SeriesDifferential& g, double rel_tol) {
  if (!residue_free(f, rel_tol)) throw NonzeroResidue("first argument of the pairing");
  LaurentSeries G = primitive(g, rel_tol);
  return (f.base * G)[-1];
}

cplx binomial(cplx r, int j) {
  cplx b = 1.0;
  for (int i = 0; i < j; ++i) b *= (r - static_cast<double>(i)) / static_cast<double>(i + 1);
  return b;
}

SeriesDifferential sqrt_shift_flow(const SeriesDifferential& f, cplx a, int min_exp_out) {
  if (a == cplx{}) return f;
  const auto& b = f.base;
  int lo = min_exp_out == kAutoMinExp ? b.min_exp() - 2 * kDefaultOrder : min_exp_out;
  int hi = b.exact() ? b.top() : std::min(b.top(), b.trunc_order());
  if (hi < lo) return SeriesDifferential(LaurentSeries::zero(b.trunc_order()));
  std::vector<cplx> c(static_cast<std::size_t>(hi - lo + 1));
  for (int m = b.min_exp(); m <= hi; ++m) {
    cplx fm = b[m];
    if (fm == cplx{}) continue;
    cplx r = 0.5 * static_cast<double>(m - 1);
    cplx bj = 1.0, aj = 1.0;
    for (int j = 0; m - 2 * j >= lo; ++j) {
      if (m - 2 * j <= hi) c[static_cast<std::size_t>(m - 2 * j - lo)] += fm * bj * aj;
      bj *= (r - static_cast<double>(j)) / static_cast<double>(j + 1);
      aj *= a;
      if (bj == cplx{}) break;
    }
  }
  auto out = LaurentSeries::from_coeffs(lo, std::move(c), b.trunc_order());
  out.label = b.label;
  return SeriesDifferential(std::move(out));
}

std::pair<LaurentSeries, LaurentSeries> parity_split(const LaurentSeries& f) {
  LaurentSeries odd = f, even = f;
  int hi = f.exact() ? f.top() : f.trunc_order();
  for (int e = f.min_exp(); e <= hi; ++e) {
    if (e % 2 == 0) odd.set(e, 0.0);
    else even.set(e, 0.0);
  }
  return {odd, even};
}

SeriesDifferential basis_e(int k) { return SeriesDifferential(LaurentSeries::monomial(1.0, -k - 1)); }
SeriesDifferential basis_f(int k) { return SeriesDifferential(LaurentSeries::monomial(static_cast<double>(k), k - 1)); }

}  // namespace swtr
