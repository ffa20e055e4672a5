// Base q-arithmetic: brackets, factorials, Pochhammer symbols, and truncated
// formal power series with the q-difference operator d_q.
#ifndef QSUM_QCORE_HPP
#define QSUM_QCORE_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsum {

using cplx = std::complex<double>;

// Error taxonomy shared by all modules.  Each carries a human-readable kind
// name so the CLI can render failures uniformly.
struct NumericError : std::runtime_error {
  NumericError(std::string k, const std::string& msg)
      : std::runtime_error(k + ": " + msg), kind(std::move(k)) {}
  std::string kind;
};
struct DomainError : NumericError {
  explicit DomainError(const std::string& m) : NumericError("DomainError", m) {}
};
struct PoleAt : NumericError {
  explicit PoleAt(const std::string& m) : NumericError("PoleAt", m) {}
};
struct ZeroArgument : NumericError {
  explicit ZeroArgument(const std::string& m) : NumericError("ZeroArgument", m) {}
};
struct NonConvergent : NumericError {
  explicit NonConvergent(const std::string& m) : NumericError("NonConvergent", m) {}
};
struct PoleOnPath : NumericError {
  explicit PoleOnPath(const std::string& m) : NumericError("PoleOnPath", m) {}
};

enum class Regime { LessThanOne, GreaterThanOne };

// The deformation parameter q together with p = 1/q and ln q.
struct QParam {
  double q;
  double p;
  double lnq;
  Regime regime;

  explicit QParam(double q_)
      : q(q_), p(1.0 / q_), lnq(std::log(q_)),
        regime(q_ < 1.0 ? Regime::LessThanOne : Regime::GreaterThanOne) {
    if (!(q_ > 0.0) || q_ == 1.0)
      throw DomainError("q must lie in (0,1) or (1,inf), got " + std::to_string(q_));
  }
};

// Universal return of the numerical evaluators: value plus a first-order
// error estimate (sum of truncation tail bounds) and work counters.
struct NumericResult {
  cplx value{0.0, 0.0};
  double abs_err = 0.0;
  std::int64_t terms_used = 0;
  bool truncated = false;
};

// Truncated formal power series  sum_{n=0}^{N} coeffs[n] * x^{n+valuation_offset}.
// valuation_offset is 0 for series in C[[x]] and 1 for series in xC[[x]].
struct TruncSeries {
  std::vector<cplx> coeffs;
  int valuation_offset = 0;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
  cplx eval(cplx x) const {
    cplx s = 0.0;
    for (std::size_t n = coeffs.size(); n-- > 0;) s = s * x + coeffs[n];
    for (int k = 0; k < valuation_offset; ++k) s *= x;
    return s;
  }
};

// [n]_q = (q^n - 1)/(q - 1) = 1 + q + ... + q^{n-1}
inline double q_bracket(std::int64_t n, const QParam& qp) {
  if (n < 0) throw DomainError("q_bracket needs n >= 0");
  return std::expm1(static_cast<double>(n) * qp.lnq) / (qp.q - 1.0);
}

// [n]_q^! = [n]_q [n-1]_q ... [1]_q, with [0]_q^! = 1
inline double q_factorial(std::int64_t n, const QParam& qp) {
  if (n < 0) throw DomainError("q_factorial needs n >= 0");
  double f = 1.0;
  for (std::int64_t k = 2; k <= n; ++k) f *= q_bracket(k, qp);
  return f;
}

// log [n]_q^!, usable where the factorial itself overflows a double.
inline double log_q_factorial(std::int64_t n, const QParam& qp) {
  if (n < 0) throw DomainError("log_q_factorial needs n >= 0");
  double s = 0.0;
  for (std::int64_t k = 1; k <= n; ++k)
    s += std::log(std::abs(q_bracket(k, qp)));
  return s;
}

inline constexpr std::int64_t n_infinity = -1;

// (a;base)_n = prod_{k=0}^{n-1} (1 - a base^k).  Pass n_infinity for the
// infinite product, which requires base in (0,1); the truncation tail bound
// is folded into abs_err.
inline NumericResult pochhammer(cplx a, double base, std::int64_t n,
                                double tol = 1e-14) {
  NumericResult r;
  r.value = 1.0;
  if (n == 0) return r;
  if (n > 0) {
    cplx bk = 1.0;
    for (std::int64_t k = 0; k < n; ++k) {
      r.value *= (1.0 - a * bk);
      bk *= base;
    }
    r.terms_used = n;
    return r;
  }
  if (!(base > 0.0 && base < 1.0))
    throw DomainError("infinite Pochhammer product needs base in (0,1)");
  double mag = std::abs(a);
  std::int64_t k = 0;
  cplx abk = a;
  while (mag > tol / 10.0) {
    r.value *= (1.0 - abk);
    abk *= base;
    mag *= base;
    ++k;
    if (k > 100000) throw NonConvergent("Pochhammer budget exhausted");
  }
  r.terms_used = k;
  r.truncated = true;
  // |log tail| <= sum_{j>=k} |a| base^j = base^k |a| / (1-base)
  r.abs_err = std::abs(r.value) * (mag / (1.0 - base));
  return r;
}

// Cauchy product, truncated to the smaller of the two orders.
inline TruncSeries series_mul(const TruncSeries& f, const TruncSeries& g) {
  TruncSeries h;
  h.valuation_offset = f.valuation_offset + g.valuation_offset;
  int n = std::min(f.order(), g.order());
  h.coeffs.assign(n + 1, 0.0);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n && j <= g.order(); ++j)
      if (i <= f.order()) h.coeffs[i + j] += f.coeffs[i] * g.coeffs[j];
  return h;
}

// Sum of two series; offsets are aligned to the smaller one.
inline TruncSeries series_add(const TruncSeries& f, const TruncSeries& g) {
  const TruncSeries* lo = &f;
  const TruncSeries* hi = &g;
  if (lo->valuation_offset > hi->valuation_offset) std::swap(lo, hi);
  int shift = hi->valuation_offset - lo->valuation_offset;
  // highest exponent representable by both inputs
  int top = std::min(lo->order() + lo->valuation_offset,
                     hi->order() + hi->valuation_offset);
  TruncSeries h;
  h.valuation_offset = lo->valuation_offset;
  h.coeffs.assign(top - h.valuation_offset + 1, 0.0);
  for (int i = 0; i < static_cast<int>(h.coeffs.size()); ++i) {
    h.coeffs[i] = lo->coeffs[i];
    if (i - shift >= 0) h.coeffs[i] += hi->coeffs[i - shift];
  }
  return h;
}

inline TruncSeries series_scale(const TruncSeries& f, cplx c) {
  TruncSeries h = f;
  for (auto& v : h.coeffs) v *= c;
  return h;
}

// f(lambda * x)
inline TruncSeries series_dilate(const TruncSeries& f, cplx lambda) {
  TruncSeries h = f;
  cplx pw = 1.0;
  for (int k = 0; k < f.valuation_offset; ++k) pw *= lambda;
  for (auto& v : h.coeffs) {
    v *= pw;
    pw *= lambda;
  }
  return h;
}

// d_q f, where d_q x^n = [n]_q x^{n-1}.
inline TruncSeries series_dq(const TruncSeries& f, const QParam& qp) {
  TruncSeries h;
  int v = f.valuation_offset;
  if (v > 0) {
    h.valuation_offset = v - 1;
    h.coeffs.resize(f.coeffs.size());
    for (int n = 0; n <= f.order(); ++n)
      h.coeffs[n] = f.coeffs[n] * q_bracket(n + v, qp);
    return h;
  }
  h.valuation_offset = 0;
  if (f.order() < 1) {
    h.coeffs = {0.0};
    return h;
  }
  h.coeffs.resize(f.coeffs.size() - 1);
  for (int n = 1; n <= f.order(); ++n)
    h.coeffs[n - 1] = f.coeffs[n] * q_bracket(n, qp);
  return h;
}

}  // namespace qsum

#endif  // QSUM_QCORE_HPP
