#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace swtr {

using cplx = std::complex<double>;

// Truncation sentinel: a series whose trunc_order is >= kExact has no unknown
// coefficients (everything above the stored range is zero).
inline constexpr int kExact = 1 << 28;

// Relative order used when an exact input produces an infinite series
// (1/(1-z), inverse of a polynomial, fractional power of a polynomial, ...).
inline constexpr int kDefaultOrder = 40;

class LaurentSeries {
 public:
  LaurentSeries() = default;  // exact zero

  static LaurentSeries monomial(cplx c, int e, int trunc = kExact);
  static LaurentSeries from_coeffs(int min_exp, std::vector<cplx> c, int trunc = kExact);
  static LaurentSeries zero(int trunc = kExact);
  static LaurentSeries variable(int trunc = kExact) { return monomial(1.0, 1, trunc); }

  int min_exp() const { return min_; }
  int trunc_order() const { return trunc_; }
  bool exact() const { return trunc_ >= kExact; }
  // highest exponent with storage (<= trunc_order)
  int top() const { return min_ + static_cast<int>(c_.size()) - 1; }
  // first exponent with a nonzero coefficient; trunc_order()+1 (or kExact) if none
  int valuation() const;

  // coefficient at e; zero below min_exp or above top() for exact series;
  // throws UnknownCoefficient above trunc_order.
  cplx operator[](int e) const;
  cplx coeff(int e) const { return (*this)[e]; }
  void set(int e, cplx v);
  void add_to(int e, cplx v) { set(e, (*this)[e] + v); }

  std::string label;  // opaque variable tag, carried through unary ops

  LaurentSeries truncated(int t) const;
  LaurentSeries shifted(int m) const;  // multiply by z^m
  LaurentSeries derivative() const;
  LaurentSeries scaled(cplx s) const;
  LaurentSeries subs_scale(cplx lambda) const;  // f(lambda z)
  LaurentSeries operator-() const { return scaled(-1.0); }

  cplx eval(cplx z) const;
  double max_abs() const;
  const std::vector<cplx>& data() const { return c_; }

 private:
  int min_ = 0;
  int trunc_ = kExact;
  std::vector<cplx> c_;  // c_[i] is the coefficient of z^(min_+i)
  void normalize_storage();
};

enum class RingOp { add, sub, mul, div };

LaurentSeries ring_ops(const LaurentSeries& a, const LaurentSeries& b, RingOp op);
LaurentSeries inverse(const LaurentSeries& b);

inline LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) { return ring_ops(a, b, RingOp::add); }
inline LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return ring_ops(a, b, RingOp::sub); }
inline LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) { return ring_ops(a, b, RingOp::mul); }
inline LaurentSeries operator/(const LaurentSeries& a, const LaurentSeries& b) { return ring_ops(a, b, RingOp::div); }
inline LaurentSeries operator*(cplx s, const LaurentSeries& a) { return a.scaled(s); }
inline LaurentSeries operator*(const LaurentSeries& a, cplx s) { return a.scaled(s); }
LaurentSeries operator+(const LaurentSeries& a, cplx s);
inline LaurentSeries operator+(cplx s, const LaurentSeries& a) { return a + s; }
inline LaurentSeries operator-(const LaurentSeries& a, cplx s) { return a + (-s); }

LaurentSeries pow_int(const LaurentSeries& f, int n);

enum class ComposeMode { compose, functional_inverse };

// f(g(z)); g must have valuation >= 1 (exactly 1 when f has negative exponents).
LaurentSeries compose(const LaurentSeries& f, const LaurentSeries& g);
// h with f(h(z)) = z; f = c1 z + O(z^2), c1 != 0.
LaurentSeries functional_inverse(const LaurentSeries& f);
LaurentSeries compose_invert(const LaurentSeries& f, ComposeMode mode, const LaurentSeries* g = nullptr);

// Branch-selected g with g^q = f^p. f = c z^m (1 + O(z)); branch picks the
// q-th root of c^p as principal root times exp(2 pi i branch / q).
LaurentSeries pow_frac(const LaurentSeries& f, int p, int q, int branch);

// A differential f(z) dz represented by its coefficient function.
struct SeriesDifferential {
  LaurentSeries base;
  SeriesDifferential() = default;
  explicit SeriesDifferential(LaurentSeries f) : base(std::move(f)) {}
};

inline constexpr double kResidueTol = 1e-11;

bool residue_free(const SeriesDifferential& f, double rel_tol = kResidueTol);
cplx residue(const SeriesDifferential& f);
LaurentSeries primitive(const SeriesDifferential& f, double rel_tol = kResidueTol);

enum class IntegrateMode { residue, primitive };
struct IntegrateResult {
  cplx value{};
  LaurentSeries series;
};
IntegrateResult integrate_residue(const SeriesDifferential& f, IntegrateMode mode, double rel_tol = kResidueTol);

// Omega(f, g) = Res(f * primitive(g)).
cplx symplectic_pairing(const SeriesDifferential& f, const SeriesDifferential& g, double rel_tol = kResidueTol);

// f(zeta) d zeta with zeta = sqrt(z^2 + a), re-expanded in z on the annulus |z|^2 > |a|.
// Coefficients below min_exp_out are dropped; the default keeps 2*kDefaultOrder
// exponents below the input window.
inline constexpr int kAutoMinExp = -kExact;
SeriesDifferential sqrt_shift_flow(const SeriesDifferential& f, cplx a, int min_exp_out = kAutoMinExp);

// (odd part, even part)
std::pair<LaurentSeries, LaurentSeries> parity_split(const LaurentSeries& f);

// Basis differentials of the symplectic series space.
SeriesDifferential basis_e(int k);  // z^{-k} dz / z
SeriesDifferential basis_f(int k);  // k z^k dz / z

cplx binomial(cplx r, int j);

}  // namespace swtr
