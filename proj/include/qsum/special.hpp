// Transcendental kernel layer: theta function with argument reduction,
// q-exponentials, q-Gamma and its logarithmic derivative, the Omega partial
// fractions, the q-logarithm and the modular map.
#ifndef QSUM_SPECIAL_HPP
#define QSUM_SPECIAL_HPP

#include <qsum/qcore.hpp>

#include <numbers>

namespace qsum {

// Point of the Riemann surface of the logarithm: positive modulus and an
// unbounded real argument.  Multiplication by a positive real preserves the
// argument.
struct SurfacePoint {
  double modulus;
  double argument;

  cplx project() const { return std::polar(modulus, argument); }
  cplx log() const { return {std::log(modulus), argument}; }
  SurfacePoint scaled(double r) const { return {modulus * r, argument}; }
  SurfacePoint rotated(double da) const { return {modulus, argument + da}; }
};

// theta(x) = sum_{n in Z} base^{n(n-1)/2} x^n, satisfying theta(x) = x theta(base x).
// Evaluated through the reduction theta(base^m y) = y^{-m} base^{-m(m-1)/2} theta(y)
// with |y| brought near 1; the prefactor is kept in log-space so quotients of
// thetas stay usable far outside the double range.
struct ThetaEval {
  double base;
  cplx value;       // may overflow to inf for extreme arguments; log_value is exact
  cplx dvalue;      // derivative w.r.t. the argument
  cplx log_value;   // log theta(x), any fixed branch
  cplx dlog;        // theta'(x)/theta(x)
  cplx xdlog;       // x theta'(x)/theta(x), stable even when x over/underflows
  int reduction_steps;
  double sum_scale;  // sum of |terms| of the reduced bilateral sum, for pole guards
  cplx raw;          // reduced bilateral sum itself
};

namespace detail {

// Bilateral sum evaluated entirely from ln(base) and log(x), so it stays
// usable for bases far below the double underflow threshold (these appear
// under the modular map).
inline ThetaEval theta_from_log(double lnb, cplx logx, double tol) {
  int m = static_cast<int>(std::lround(logx.real() / lnb));
  double mm = static_cast<double>(m);
  cplx logy = logx - mm * lnb;
  // peak of the term magnitudes; factor it out so nothing overflows
  double n0 = std::round(logy.real() / -lnb + 0.5);
  double peak = 0.5 * n0 * (n0 - 1.0) * lnb + n0 * logy.real();
  auto log_term = [&](double n) {
    return 0.5 * n * (n - 1.0) * lnb + n * logy - peak;
  };
  cplx s = std::exp(log_term(n0)), sn = n0 * s;
  double scale = std::abs(s);
  for (int dir : {+1, -1}) {
    int below = 0;
    for (int k = 1; below < 3; ++k) {
      double n = n0 + static_cast<double>(dir * k);
      cplx term = std::exp(log_term(n));
      s += term;
      sn += n * term;
      scale += std::abs(term);
      below = (std::abs(term) < tol) ? below + 1 : 0;
      if (k > 4000) throw NonConvergent("theta tail did not decay");
    }
  }
  ThetaEval t;
  t.base = std::exp(lnb);
  t.reduction_steps = m;
  t.raw = s;
  t.sum_scale = scale;
  // theta(base^m y) = y^{-m} base^{-m(m-1)/2} theta(y)
  t.log_value = -mm * logy - 0.5 * mm * (mm - 1.0) * lnb + peak + std::log(s);
  t.value = std::exp(t.log_value);
  t.xdlog = -mm + sn / s;
  t.dlog = t.xdlog * std::exp(-logx);
  t.dvalue = t.value * t.dlog;
  return t;
}

// Near base = 1 the bilateral sum cancels catastrophically away from the
// positive axis; route through the modular relation, whose companion base
// e^{4 pi^2 / ln base} is tiny.
inline ThetaEval theta_modular(double base, cplx logx, double tol) {
  constexpr double pi = std::numbers::pi;
  double lnb = std::log(base);
  cplx logw = logx - 0.5 * lnb;
  double lnb_star = 4.0 * pi * pi / lnb;
  cplx logz = 0.5 * lnb_star + cplx(0.0, -2.0 * pi) * logw / lnb;
  ThetaEval inner = theta_from_log(lnb_star, logz, tol);
  ThetaEval t;
  t.base = base;
  t.reduction_steps = inner.reduction_steps;
  t.raw = inner.raw;
  t.sum_scale = inner.sum_scale;
  t.log_value = 0.5 * std::log(2.0 * pi / -lnb) - logw * logw / (2.0 * lnb) +
                inner.log_value;
  t.value = std::exp(t.log_value);
  t.xdlog = -logw / lnb - cplx(0.0, 2.0 * pi) / lnb * inner.xdlog;
  t.dlog = t.xdlog * std::exp(-logx);
  t.dvalue = t.value * t.dlog;
  return t;
}

}  // namespace detail

inline ThetaEval theta(double base, cplx x, double tol = 1e-15) {
  if (!(base > 0.0 && base < 1.0)) throw DomainError("theta needs base in (0,1)");
  if (x == cplx(0.0)) throw ZeroArgument("theta at x = 0");
  cplx logx = std::log(x);
  if (base > 0.85) return detail::theta_modular(base, logx, tol);
  ThetaEval t = detail::theta_from_log(std::log(base), logx, tol);
  // Near the negative axis the bilateral sum cancels; the modular companion
  // base is smaller than `base` whenever ln(base) > -2 pi, and its sum is
  // well conditioned there, so switch to it when cancellation is detected.
  if (std::abs(t.raw) < 1e-4 * t.sum_scale && base > std::exp(-2.0 * std::numbers::pi)) {
    ThetaEval tm = detail::theta_modular(base, logx, tol);
    if (std::abs(tm.raw) * t.sum_scale > std::abs(t.raw) * tm.sum_scale)
      return tm;
  }
  return t;
}

// theta'(x)/theta(x) with a proximity guard on the zero spiral -base^Z.
inline cplx theta_dlog_guarded(const ThetaEval& t, const char* what) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (std::abs(t.raw) < 1e3 * eps * t.sum_scale)
    throw PoleAt(std::string(what) + ": theta argument on the zero spiral");
  return t.dlog;
}

// e_q(x) = (-(1-p)x; p)_infinity for q > 1: an entire function of order zero
// with zeros on -q^N/(1-p).
inline NumericResult eq_exp(const QParam& qp, cplx x, double tol = 1e-14) {
  if (qp.regime != Regime::GreaterThanOne)
    throw DomainError("eq_exp needs q > 1");
  return pochhammer(-(1.0 - qp.p) * x, qp.p, n_infinity, tol);
}

// e_base(x) = 1/((1-base)x; base)_infinity for base < 1: the sum
// sum x^n/[n]^! continued past its radius, with poles on base^{-N}/(1-base).
inline NumericResult ep_exp(double base, cplx x, double tol = 1e-14) {
  if (!(base > 0.0 && base < 1.0)) throw DomainError("ep_exp needs base in (0,1)");
  cplx a = (1.0 - base) * x;
  cplx abk = a;
  double mag = std::abs(a);
  NumericResult r;
  r.value = 1.0;
  while (mag > tol / 10.0) {
    cplx factor = 1.0 - abk;
    if (std::abs(factor) < 1e-12 * (1.0 + std::abs(abk)))
      throw PoleAt("ep_exp argument on the pole spiral");
    r.value *= factor;
    abk *= base;
    mag *= base;
    ++r.terms_used;
    if (r.terms_used > 100000) throw NonConvergent("ep_exp budget exhausted");
  }
  r.value = 1.0 / r.value;
  r.truncated = true;
  r.abs_err = std::abs(r.value) * mag / (1.0 - base);
  return r;
}

// Omega_m(x) = sum_{k=0}^{m-1} base^k x / (base^k x - 1); m < 0 means the
// convergent infinite sum.
inline NumericResult omega(std::int64_t m, cplx x, double base,
                           double tol = 1e-14) {
  if (!(base > 0.0 && base < 1.0)) throw DomainError("omega needs base in (0,1)");
  NumericResult r;
  cplx bx = x;
  std::int64_t k = 0;
  while (m < 0 || k < m) {
    cplx den = bx - 1.0;
    if (std::abs(den) < 1e-12 * (1.0 + std::abs(bx)))
      throw PoleAt("omega term denominator vanishes at base^-k");
    cplx term = bx / den;
    if (m < 0 && std::abs(term) < tol / 10.0 && std::abs(bx) < 0.5) {
      r.abs_err = std::abs(term) * base / (1.0 - base) * 2.0;
      r.truncated = true;
      break;
    }
    r.value += term;
    bx *= base;
    ++k;
    if (k > 100000) throw NonConvergent("omega budget exhausted");
  }
  r.terms_used = k;
  return r;
}

// A = Omega(base) = sum_{n>=0} base^{n+1}/(base^{n+1} - 1)
inline double const_A(double base, double tol = 1e-14) {
  return omega(-1, cplx(base), base, tol).value.real();
}

// a_n = sum_{k=0}^{n-1} 1/(base^{k+1} - 1) = Omega_n(base) - n
inline double coeff_a(std::int64_t n, double base) {
  double s = 0.0;
  double bk = base;
  for (std::int64_t k = 0; k < n; ++k) {
    s += 1.0 / (bk - 1.0);
    bk *= base;
  }
  return s;
}

// Gamma function of the q-calculus: (q;q)_inf / (q^x;q)_inf * (1-q)^{1-x},
// with poles at the non-positive integers.
inline NumericResult gamma_q(double base, cplx x, double tol = 1e-14) {
  if (!(base > 0.0 && base < 1.0)) throw DomainError("gamma_q needs base in (0,1)");
  double xr = x.real();
  if (std::abs(x.imag()) < 1e-12 && xr <= 0.5 &&
      std::abs(xr - std::round(xr)) < 1e-10)
    throw PoleAt("gamma_q at a non-positive integer");
  auto num = pochhammer(cplx(base), base, n_infinity, tol);
  cplx bx = std::exp(x * std::log(base));
  auto den = pochhammer(bx, base, n_infinity, tol);
  if (std::abs(den.value) <
      1e3 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(bx)))
    throw PoleAt("gamma_q denominator product vanishes");
  NumericResult r;
  r.value = num.value / den.value *
            std::exp((1.0 - x) * std::log(1.0 - base));
  r.abs_err = (num.abs_err + den.abs_err) * std::abs(r.value);
  r.terms_used = num.terms_used + den.terms_used;
  r.truncated = true;
  return r;
}

// Logarithmic derivative of gamma_q, through the Omega sum.
inline NumericResult psi_q(double base, cplx x, double tol = 1e-14) {
  double lnb = std::log(base);
  auto om = omega(-1, std::exp(x * lnb), base, tol);
  NumericResult r;
  r.value = -lnb * om.value - std::log(1.0 - base);
  r.abs_err = std::abs(lnb) * om.abs_err;
  r.terms_used = om.terms_used;
  r.truncated = om.truncated;
  return r;
}

// l(x) = -x theta'(-x)/theta(-x); satisfies l(base^{-1} x) - l(x) = 1.
inline NumericResult q_log(double base, cplx x, double tol = 1e-15) {
  auto t = theta(base, -x, tol);
  theta_dlog_guarded(t, "q_log");
  NumericResult r;
  // -x (d/dx)[theta(-x)]/theta(-x); this orientation satisfies
  // l(base x) = l(x) + 1 and l(x) = Omega(base/x) - Omega(x).
  // Equal to -u theta'(u)/theta(u) at u = -x, taken from the stable ratio.
  r.value = -t.xdlog;
  r.terms_used = 0;
  return r;
}

// Modular companion of (q, x): q* = e^{4 pi^2 / ln q}, x* = e^{-2 pi i log x / ln q}.
struct ModularPair {
  double q_star;
  cplx x_star;
  double branch_arg;
};

inline ModularPair modular_map(const QParam& qp, const SurfacePoint& x) {
  constexpr double pi = std::numbers::pi;
  ModularPair mp;
  mp.q_star = std::exp(4.0 * pi * pi / qp.lnq);
  mp.x_star = std::exp(cplx(0.0, -2.0 * pi) * x.log() / qp.lnq);
  mp.branch_arg = x.argument;
  return mp;
}

// Residual of the classical modular relation
// theta(sqrt(q) x) = sqrt(2 pi / ln(1/q)) e^{-log^2 x/(2 ln q)} theta_{q*}(sqrt(q*) x*)
// for q < 1.
inline double verify_modular(const QParam& qp, const SurfacePoint& x,
                             double tol = 1e-15) {
  if (qp.regime != Regime::LessThanOne)
    throw DomainError("verify_modular needs q < 1");
  constexpr double pi = std::numbers::pi;
  auto mp = modular_map(qp, x);
  cplx lhs = theta(qp.q, std::sqrt(qp.q) * x.project(), tol).value;
  cplx lx = x.log();
  cplx rhs = std::sqrt(2.0 * pi / -qp.lnq) *
             std::exp(-lx * lx / (2.0 * qp.lnq)) *
             theta(mp.q_star, std::sqrt(mp.q_star) * mp.x_star, tol).value;
  return std::abs(lhs - rhs);
}

}  // namespace qsum

#endif  // QSUM_SPECIAL_HPP
