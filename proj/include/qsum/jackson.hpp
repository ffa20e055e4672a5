// Discrete q-integrals: the finite integral from 0 to x and the bilateral
// integral over a whole q-orbit.
#ifndef QSUM_JACKSON_HPP
#define QSUM_JACKSON_HPP

#include <qsum/qcore.hpp>

#include <functional>

namespace qsum {

// The q-orbit anchor q^Z; two anchors describe the same spiral iff their
// ratio is an integer power of q.
struct Spiral {
  cplx anchor;
  QParam qp;

  bool same_as(const Spiral& other) const {
    cplx r = std::log(anchor / other.anchor) / qp.lnq;
    return std::abs(r.imag()) < 1e-12 &&
           std::abs(r.real() - std::round(r.real())) < 1e-12;
  }
};

using Evaluatable = std::function<cplx(cplx)>;

inline constexpr std::int64_t jackson_budget = 100000;

// (1-q) x sum_{n>=0} f(q^n x) q^n for q in (0,1).
inline NumericResult jackson_finite(const Evaluatable& f, cplx x,
                                    const QParam& qp, double tol = 1e-12) {
  if (qp.regime != Regime::LessThanOne)
    throw DomainError("jackson_finite needs q in (0,1)");
  NumericResult r;
  cplx pref = (1.0 - qp.q) * x;
  cplx qn = 1.0;
  cplx sum = 0.0;
  int below = 0;
  std::int64_t n = 0;
  double last = 0.0;
  for (; below < 3; ++n) {
    if (n > jackson_budget) {
      r.value = pref * sum;
      r.truncated = true;
      throw NonConvergent("jackson_finite budget exhausted");
    }
    cplx term = f(qn * x) * qn;
    sum += term;
    last = std::abs(term);
    below = (std::abs(pref) * last < tol) ? below + 1 : 0;
    qn *= qp.q;
  }
  r.value = pref * sum;
  r.terms_used = n;
  r.truncated = true;
  // once f is bounded on the remaining points the tail is geometric
  r.abs_err = std::abs(pref) * last * qp.q / (1.0 - qp.q);
  return r;
}

// (1-b) a sum_{n in Z} f(b^n a) b^n over the orbit a b^Z, with b the
// sub-unit representative of the spiral's base.  The two tails are walked
// outward from n = 0 and truncated independently.
inline NumericResult jackson_bilateral(const Evaluatable& f, const Spiral& s,
                                       double tol = 1e-12) {
  double b = std::min(s.qp.q, s.qp.p);
  cplx a = s.anchor;
  cplx pref = (1.0 - b) * a;
  NumericResult r;
  cplx sum = f(a);
  std::int64_t n = 1;
  double scale = std::abs(pref);
  for (int dir : {+1, -1}) {
    int below = 0;
    double last = 0.0;
    for (std::int64_t k = 1; below < 3; ++k, ++n) {
      if (k > jackson_budget)
        throw NonConvergent(dir > 0 ? "jackson_bilateral inner tail stalled"
                                    : "jackson_bilateral outer tail stalled");
      double bn = std::exp(static_cast<double>(dir * k) * std::log(b));
      cplx term = f(bn * a) * bn;
      sum += term;
      last = std::abs(term);
      below = (scale * last < tol) ? below + 1 : 0;
    }
    r.abs_err += scale * last / (1.0 - b);
  }
  r.value = pref * sum;
  r.terms_used = n;
  r.truncated = true;
  return r;
}

}  // namespace qsum

#endif  // QSUM_JACKSON_HPP
