// Basic hypergeometric series and the connection-formula suite: Heine's
// transformation, the two-term theta connection formula and its
// degenerations with logarithmic terms.
#ifndef QSUM_HYPERGEOM_HPP
#define QSUM_HYPERGEOM_HPP

#include <qsum/special.hpp>

#include <cmath>
#include <vector>

namespace qsum {

struct BasicHG {
  std::vector<cplx> upper;
  std::vector<cplx> lower;
  double base = 0.5;
};

namespace detail {

// z = anchor * base^j for an integer j in the given range?
inline bool on_power_spiral(cplx z, cplx anchor, double lnb, long jmin,
                            long jmax) {
  if (z == cplx(0.0) || anchor == cplx(0.0)) return false;
  cplx w = std::log(z / anchor) / lnb;
  if (std::abs(w.imag()) > 1e-9) return false;
  double j = std::round(w.real());
  if (std::abs(w.real() - j) > 1e-9) return false;
  return j >= static_cast<double>(jmin) && j <= static_cast<double>(jmax);
}

constexpr long spiral_far = 1000000000L;

}  // namespace detail

// Generalised basic series r_phi_s with the standard extra factor
// ((-1)^n base^{n(n-1)/2})^{1+s-r}.
inline NumericResult phi_rs(const BasicHG& hg, cplx x, double tol = 1e-12) {
  if (!(hg.base > 0.0 && hg.base < 1.0))
    throw DomainError("phi_rs needs base in (0,1)");
  double lnb = std::log(hg.base);
  for (cplx l : hg.lower)
    if (detail::on_power_spiral(l, cplx(1.0), lnb, -detail::spiral_far, 0))
      throw DomainError("phi_rs lower parameter on base^{-N}");
  int e = 1 + static_cast<int>(hg.lower.size()) -
          static_cast<int>(hg.upper.size());
  NumericResult r;
  cplx sum = 0.0, term = 1.0;
  int below = 0;
  std::int64_t n = 0;
  for (; below < 3; ++n) {
    if (n > 100000) throw NonConvergent("phi_rs series stalled");
    sum += term;
    double tn = std::abs(term);
    below = (tn < tol) ? below + 1 : 0;
    if (tn > 1e12 * std::max(1.0, std::abs(sum)))
      throw NonConvergent("phi_rs series diverges");
    double bn = std::exp(n * lnb);
    cplx step = x / (1.0 - std::exp((n + 1) * lnb));
    for (cplx u : hg.upper) step *= 1.0 - u * bn;
    for (cplx l : hg.lower) step /= 1.0 - l * bn;
    for (int k = 0; k < e; ++k) step *= -bn;
    term *= step;
  }
  r.value = sum;
  r.terms_used = n;
  r.truncated = true;
  r.abs_err = tol;
  return r;
}

// |2phi1(a,b;c;x) - Heine transform| with the transform
// (a;q)inf (bx;q)inf / ((c;q)inf (x;q)inf) 2phi1(c/a, x; bx; a).
inline double verify_heine(cplx a, cplx b, cplx c, double base, cplx x,
                           double tol = 1e-12) {
  cplx lhs = phi_rs({{a, b}, {c}, base}, x, tol).value;
  cplx pref = pochhammer(a, base, n_infinity, tol).value *
              pochhammer(b * x, base, n_infinity, tol).value /
              (pochhammer(c, base, n_infinity, tol).value *
               pochhammer(x, base, n_infinity, tol).value);
  cplx rhs = pref * phi_rs({{c / a, x}, {b * x}, base}, a, tol).value;
  return std::abs(lhs - rhs);
}

namespace detail {

// theta(-u x) / theta(-x) through log space
inline cplx theta_ratio(double base, cplx u, cplx x, double tol) {
  return std::exp(theta(base, -u * x, tol).log_value -
                  theta(base, -x, tol).log_value);
}

}  // namespace detail

// Residual of the two-term connection formula between the series at 0 and
// the two theta-weighted series in 1/x.  Both sides are evaluated as
// convergent series, which restricts |cq/(ab)| < |x| < 1.
inline double verify_watson(cplx a, cplx b, cplx c, double base, cplx x,
                            double tol = 1e-12) {
  double lnb = std::log(base);
  if (a * b * c * x == cplx(0.0))
    throw DomainError("verify_watson needs a, b, c, x nonzero");
  if (detail::on_power_spiral(a / b, cplx(1.0), lnb, -detail::spiral_far,
                              detail::spiral_far))
    throw DomainError("verify_watson needs a/b off the power spiral");
  if (detail::on_power_spiral(c, cplx(1.0), lnb, -detail::spiral_far, 0))
    throw DomainError("verify_watson needs c off base^{-N}");
  if (detail::on_power_spiral(x, cplx(1.0), lnb, -detail::spiral_far, 0) ||
      detail::on_power_spiral(x, c * base / (a * b), lnb, 0,
                              detail::spiral_far))
    throw DomainError("verify_watson argument on an excluded spiral");

  cplx lhs = phi_rs({{a, b}, {c}, base}, x, tol).value;
  auto half = [&](cplx a_, cplx b_) {
    cplx pref = pochhammer(b_, base, n_infinity, tol).value *
                pochhammer(c / a_, base, n_infinity, tol).value /
                (pochhammer(c, base, n_infinity, tol).value *
                 pochhammer(b_ / a_, base, n_infinity, tol).value);
    cplx arg = c * base / (a_ * b_ * x);
    cplx inner =
        phi_rs({{a_, a_ * base / c}, {a_ * base / b_}, base}, arg, tol).value;
    return pref * detail::theta_ratio(base, a_, x, tol) * inner;
  };
  return std::abs(lhs - half(a, b) - half(b, a));
}

// Residual of the degenerate connection formula for upper parameters
// (a, a q^m), including the logarithmic term; pass c = 0 for the
// theta-growth variant.  LHS is summed for |x| < 1.
inline double verify_watson_degenerate(long m, cplx a, cplx c, double base,
                                       cplx x, double tol = 1e-12) {
  if (m < 0) throw DomainError("verify_watson_degenerate needs m >= 0");
  const QParam qp(base);
  double lnb = qp.lnq;
  auto bpow = [&](double e) { return std::exp(e * lnb); };
  cplx aqm = a * bpow(static_cast<double>(m));
  cplx lhs = phi_rs({{a, aqm}, {c}, base}, x, tol).value;

  // Omega with m = -1 meaning the infinite sum
  auto Om = [&](std::int64_t mm, cplx z) {
    return omega(mm, z, base, tol).value;
  };

  cplx first = 0.0;
  if (m >= 1) {
    // finite head of the series in 1/x, n < m
    cplx P = 0.0, t = 1.0;
    for (long n = 0; n + 1 < m; ++n) {
      P += t;
      double bn = bpow(static_cast<double>(n));
      cplx step = (1.0 - a * bn) / ((1.0 - bpow(n + 1.0)) *
                                    (1.0 - bpow(n + 1.0 - m)));
      if (c != cplx(0.0)) {
        step *= (1.0 - a * base / c * bn) * c * bpow(1.0 - m) / (a * a * x);
      } else {
        step *= -bn * bpow(2.0 - m) / (a * x);  // q^{n(n-1)/2} (-q^{2-m}/ax)^n
      }
      t *= step;
    }
    P += t;
    cplx pref = pochhammer(aqm, base, n_infinity, tol).value /
                pochhammer(bpow(static_cast<double>(m)), base, n_infinity,
                           tol).value;
    if (c != cplx(0.0))
      pref *= pochhammer(c / a, base, n_infinity, tol).value /
              pochhammer(c, base, n_infinity, tol).value;
    first = pref * detail::theta_ratio(base, a, x, tol) * P;
  }

  // second term: [C_m + l(a q^m x)] Phi_m + sum C_{m,n} phi_{m,n}
  cplx Cm = Om(-1, cplx(base)) + Om(-1, cplx(bpow(1.0 + m))) -
            Om(-1, aqm) + 1.0;
  if (c != cplx(0.0)) Cm -= Om(-1, c * bpow(-static_cast<double>(m)) / a);
  // the logarithmic term enters through the derivative of theta taken at
  // the point -ax, which is the negative of the shift-normalised q-log
  cplx ell = -q_log(base, a * x, tol).value;

  cplx phi_sum = 0.0, corr_sum = 0.0, t = 1.0;
  for (long n = 0; n < 4000; ++n) {
    phi_sum += t;
    if (n >= 1) {
      cplx Cmn = Om(n, aqm) - Om(n, cplx(bpow(1.0 + m))) -
                 Om(n, cplx(base));
      Cmn += (c != cplx(0.0)) ? Om(n, a * bpow(1.0 + m) / c)
                              : cplx(static_cast<double>(n));
      corr_sum += Cmn * t;
    }
    double bn = bpow(static_cast<double>(n));
    cplx step = (1.0 - aqm * bn) /
                ((1.0 - bpow(n + 1.0)) * (1.0 - bpow(n + 1.0 + m)));
    if (c != cplx(0.0))
      step *= (1.0 - a * bpow(1.0 + m) / c * bn) * c * bpow(1.0 - m) /
              (a * a * x);
    else
      step *= -bn * bpow(2.0) / (a * x);
    t *= step;
    if (std::abs(t) < tol / 10.0 && n > m + 2) {
      phi_sum += t;
      break;
    }
  }

  cplx pref2 = pochhammer(a, base, n_infinity, tol).value /
               (pochhammer(base, base, n_infinity, tol).value *
                pochhammer(bpow(-static_cast<double>(m)), base, m).value);
  if (c != cplx(0.0))
    pref2 *= pochhammer(c * bpow(-static_cast<double>(m)) / a, base,
                        n_infinity, tol).value /
             pochhammer(c, base, n_infinity, tol).value;
  cplx second = pref2 * detail::theta_ratio(base, aqm, x, tol) *
                ((Cm + ell) * phi_sum + corr_sum);
  return std::abs(lhs - first - second);
}

// Residual of the single-term connection formula at the resonant point
// c = a q^{-k} with upper parameters (a, a q^m).
inline double verify_watson_ca_qk(long k, long m, cplx a, double base, cplx x,
                                  double tol = 1e-12) {
  if (k < 0 || m < 0) throw DomainError("verify_watson_ca_qk needs k, m >= 0");
  double lnb = std::log(base);
  auto bpow = [&](double e) { return std::exp(e * lnb); };
  cplx c = a * bpow(-static_cast<double>(k));
  cplx lhs = phi_rs({{a, a * bpow(static_cast<double>(m))}, {c}, base}, x,
                    tol).value;
  cplx pref = pochhammer(bpow(-static_cast<double>(k + m)), base, k).value /
              pochhammer(c, base, k).value;
  cplx arg = bpow(1.0 - k - m) / (a * x);
  cplx inner = phi_rs({{a * bpow(static_cast<double>(m)),
                        bpow(1.0 + m + k)},
                       {bpow(1.0 + m)},
                       base},
                      arg, tol).value;
  cplx tr = detail::theta_ratio(base, a * bpow(static_cast<double>(m)), x, tol);
  return std::abs(lhs - pref * tr * inner);
}

}  // namespace qsum

#endif  // QSUM_HYPERGEOM_HPP
