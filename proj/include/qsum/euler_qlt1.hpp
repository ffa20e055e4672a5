// The convergent deformed Euler function for q < 1: series, analytic
// continuation by its difference equation, partial-fraction expansion,
// residues, expansion at infinity, the classical Euler function, and the
// confluence experiments q -> 1.
#ifndef QSUM_EULER_QLT1_HPP
#define QSUM_EULER_QLT1_HPP

#include <qsum/transforms.hpp>

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace qsum {

struct EulerQltContext {
  QParam qp;
  double series_radius;

  explicit EulerQltContext(const QParam& q) : qp(q), series_radius(1.0 - q.q) {
    if (qp.regime != Regime::LessThanOne)
      throw DomainError("EulerQltContext needs q in (0,1)");
  }

  // simple poles at (q-1) q^k, k <= 0
  cplx pole(std::int64_t k) const {
    return (qp.q - 1.0) * std::exp(static_cast<double>(k) * qp.lnq);
  }
};

namespace detail {

// sum of the alternating factorial series inside half its disk of
// convergence, where the term ratio is below 1/2
inline cplx alt_factorial_sum(const QParam& qp, cplx z, double tol) {
  cplx sum = 0.0, term = z;
  double bracket = 0.0;
  for (int n = 1; n < 400; ++n) {
    sum += term;
    bracket = q_bracket(n, qp);
    term *= -bracket * z;
    if (std::abs(term) < tol / 4.0) break;
  }
  return sum;
}

}  // namespace detail

// Evaluate sum (-1)^n [n]_q^! x^{n+1} continued by
// y(x) = x/(x+1-q) y(qx) - (q-1)x/(x+1-q).
inline NumericResult euler_q(const EulerQltContext& ctx, cplx x,
                             double tol = 1e-12) {
  const QParam& qp = ctx.qp;
  NumericResult r;
  if (x == cplx(0.0)) return r;
  cplx A = 1.0, B = 0.0, z = x;
  while (std::abs(z) >= ctx.series_radius / 2.0) {
    cplx denom = z + 1.0 - qp.q;
    if (std::abs(denom) < 1e-8 * ctx.series_radius)
      throw PoleAt("euler_q at a pole of the continuation spiral");
    B += A * (-(qp.q - 1.0) * z / denom);
    A *= z / denom;
    z *= qp.q;
  }
  r.value = A * detail::alt_factorial_sum(qp, z, tol) + B;
  r.abs_err = std::abs(A) * tol / 2.0;
  r.truncated = true;
  return r;
}

// Partial-fraction form (1-q) sum (q^{n+1};q)_inf / (1 + (1-q)/(q^n x)).
inline NumericResult euler_q_heine(const EulerQltContext& ctx, cplx x,
                                   double tol = 1e-12) {
  const QParam& qp = ctx.qp;
  NumericResult r;
  if (x == cplx(0.0)) return r;
  cplx sum = 0.0;
  cplx qnx = x;
  int below = 0;
  std::int64_t n = 0;
  for (; below < 3 && n < 10000; ++n) {
    if (std::abs(qnx - (qp.q - 1.0)) < 1e-8 * ctx.series_radius)
      throw PoleAt("euler_q_heine at a pole of the expansion");
    cplx term = pochhammer(std::exp((n + 1) * qp.lnq), qp.q, n_infinity,
                           tol).value /
                (1.0 + (1.0 - qp.q) / qnx);
    sum += term;
    below = ((1.0 - qp.q) * std::abs(term) < tol) ? below + 1 : 0;
    qnx *= qp.q;
  }
  r.value = (1.0 - qp.q) * sum;
  r.terms_used = n;
  r.truncated = true;
  r.abs_err = tol;
  return r;
}

// Residue of the function times dx at the pole (q-1) q^k, k <= 0.
inline cplx euler_q_residue(const EulerQltContext& ctx, std::int64_t k) {
  if (k > 0) throw DomainError("euler_q_residue needs k <= 0");
  const QParam& qp = ctx.qp;
  double r2 = (1.0 - qp.q) * (1.0 - qp.q);
  return -r2 * std::exp(static_cast<double>(k) * qp.lnq) *
         pochhammer(std::exp((1.0 - static_cast<double>(k)) * qp.lnq), qp.q,
                    n_infinity).value;
}

// Expansion at infinity:
// (q-1)[l(qx/(q-1)) - 1 - A(q)] e_p(q/x)
//   + sum_{n>=1} (q-1) a_n / [n]_q^! q^{n(n-1)/2} (q/x)^n,
// with l the theta-based logarithm and e_p(q/x) = (-(1-q)q/x; q)_inf.
inline NumericResult euler_q_infinity(const EulerQltContext& ctx, cplx x,
                                      double tol = 1e-12) {
  const QParam& qp = ctx.qp;
  double q = qp.q;
  cplx lq = q_log(q, q * x / (q - 1.0), tol).value;
  cplx pref = (q - 1.0) * (lq - 1.0 - const_A(q, tol));
  cplx ep = pochhammer(-(1.0 - q) * q / x, q, n_infinity, tol).value;
  cplx qox = q / x;
  cplx pw = 1.0;
  double fn = 1.0;  // q^{n(n-1)/2} / [n]_q^!
  double an = 0.0;  // sum_{k<n} 1/(q^{k+1}-1)
  cplx sum = 0.0;
  int below = 0;
  for (int n = 1; below < 3 && n < 2000; ++n) {
    an += 1.0 / std::expm1(n * qp.lnq);
    fn /= q_bracket(n, qp);
    pw *= qox;
    cplx term = (q - 1.0) * an * fn * pw;
    sum += term;
    below = (std::abs(term) < tol) ? below + 1 : 0;
    fn *= std::exp(n * qp.lnq);
  }
  NumericResult r;
  r.value = pref * ep + sum;
  r.abs_err = tol;
  r.truncated = true;
  return r;
}

// Laplace integral of the resolvent kernel along a ray avoiding xi = -1.
inline NumericResult euler_classical(cplx x, Ray ray, double tol = 1e-12) {
  double cd = std::cos(ray.direction);
  double dist = cd < 0.0 ? std::abs(std::sin(ray.direction)) : 1.0;
  BorelFunction phi{[](cplx xi) { return 1.0 / (1.0 + xi); },
                    {cplx(-1.0)},
                    {},
                    {GrowthKind::Polynomial, 1.0 / std::max(dist, 1e-3), 0.0}};
  return laplace_ray(phi, ray, x, tol);
}

// (log x - gamma) e^{1/x} + sum_{n>=1} H_n / n! x^{-n}, summed to N terms.
inline NumericResult euler_classical_infinity(cplx x, int N) {
  cplx sum = 0.0, pw = 1.0;
  double Hn = 0.0, fact = 1.0;
  for (int n = 1; n <= N; ++n) {
    Hn += 1.0 / n;
    fact *= n;
    pw /= x;
    sum += Hn / fact * pw;
  }
  NumericResult r;
  r.value = (std::log(x) - std::numbers::egamma) * std::exp(1.0 / x) + sum;
  r.terms_used = N;
  r.truncated = true;
  double last = Hn / fact / std::pow(std::abs(x), N);
  r.abs_err = last * 2.0;
  return r;
}

namespace detail {

// Lanczos approximation, g = 7, suitable for the whole complex plane via
// the reflection formula.
inline cplx lanczos_gamma(cplx z) {
  static const double c[9] = {0.99999999999980993, 676.5203681218851,
                              -1259.1392167224028, 771.32342877765313,
                              -176.61502916214059, 12.507343278686905,
                              -0.13857109526572012, 9.9843695780195716e-6,
                              1.5056327351493116e-7};
  if (z.real() < 0.5) {
    return std::numbers::pi /
           (std::sin(std::numbers::pi * z) * lanczos_gamma(1.0 - z));
  }
  z -= 1.0;
  cplx a = c[0];
  cplx t = z + 7.5;
  for (int i = 1; i < 9; ++i) a += c[i] / (z + static_cast<double>(i));
  return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) *
         std::exp(-t) * a;
}

// Gauss hypergeometric function with unit lower parameter, continued off
// the cut [1, infinity) by the Pfaff transformation and the connection
// formula at infinity (requires a - b not an integer for the latter).
inline cplx gauss_2f1_unit(cplx a, cplx b, cplx z) {
  auto series = [](cplx aa, cplx bb, cplx cc, cplx zz) {
    cplx sum = 1.0, term = 1.0;
    for (int n = 0; n < 6000; ++n) {
      term *= (aa + static_cast<double>(n)) * (bb + static_cast<double>(n)) /
              ((cc + static_cast<double>(n)) * static_cast<double>(n + 1)) *
              zz;
      sum += term;
      if (std::abs(term) < 1e-16 * std::max(1.0, std::abs(sum))) return sum;
    }
    throw NonConvergent("gauss_2f1_unit series stalled");
  };
  if (std::abs(z) <= 0.9) return series(a, b, 1.0, z);
  cplx w = z / (z - 1.0);
  if (std::abs(w) <= 0.9)
    return std::pow(1.0 - z, -a) * series(a, 1.0 - b, 1.0, w);
  if (std::abs(z) < 1.1)
    throw NonConvergent("gauss_2f1_unit: argument too close to one");
  // connection at infinity
  cplx ga = lanczos_gamma(b - a) / (lanczos_gamma(b) * lanczos_gamma(1.0 - a));
  cplx gb = lanczos_gamma(a - b) / (lanczos_gamma(a) * lanczos_gamma(1.0 - b));
  cplx iz = 1.0 / z;
  cplx ta = ga * std::pow(-z, -a) * series(a, a, a - b + 1.0, iz);
  cplx tb = gb * std::pow(-z, -b) * series(b, b, b - a + 1.0, iz);
  return ta + tb;
}

// 2phi1(A, B; 0; q, X): direct series inside the unit disk, and for large
// arguments the two-term theta-weighted connection expansion (the c -> 0
// limit of the generic connection formula), which converges for every
// nonzero X when A/B is off the q-power spiral.  On that spiral the series
// is continued by its second order difference equation instead.
inline cplx phi21_c0(cplx A, cplx B, const QParam& qp, cplx X, double tol) {
  auto series = [&](cplx z) {
    cplx sum = 1.0, term = 1.0;
    for (int n = 0; n < 6000; ++n) {
      double qn = std::exp(n * qp.lnq);
      term *= (1.0 - A * qn) * (1.0 - B * qn) /
              (1.0 - std::exp((n + 1) * qp.lnq)) * z;
      sum += term;
      if (std::abs(term) < tol / 10.0 * std::max(1.0, std::abs(sum)))
        return sum;
    }
    throw NonConvergent("phi21_c0 series stalled");
  };
  double r0 = 0.9;
  if (std::abs(X) < r0) return series(X);
  cplx rho = std::log(A / B) / qp.lnq;
  bool ratio_on_spiral = std::abs(rho.imag()) < 1e-8 &&
                         std::abs(rho.real() - std::round(rho.real())) < 1e-8;
  if (!ratio_on_spiral) {
    auto half = [&](cplx A_, cplx B_) {
      cplx pref = pochhammer(B_, qp.q, n_infinity, tol).value /
                  pochhammer(B_ / A_, qp.q, n_infinity, tol).value;
      cplx ratio = std::exp(theta(qp.q, -A_ * X, tol).log_value -
                            theta(qp.q, -X, tol).log_value);
      cplx s = 1.0, term = 1.0;
      for (int n = 0; n < 2000; ++n) {
        double qn = std::exp(n * qp.lnq);
        double qn1 = std::exp((n + 1) * qp.lnq);
        term *= (1.0 - A_ * qn) /
                ((1.0 - A_ * qp.q / B_ * qn) * (1.0 - qn1)) * qn1 *
                (-qp.q / (B_ * X));
        s += term;
        if (std::abs(term) < tol / 10.0 * std::max(1.0, std::abs(s))) break;
      }
      return pref * ratio * s;
    };
    return half(A, B) + half(B, A);
  }
  // y(x) = [((A+B)x^2 - 1) y(qx) - A B x^2 y(q^2 x)] / (x^2 - 1)
  int k = static_cast<int>(
      std::ceil(std::log(std::abs(X) / (r0 / 2.0)) / -qp.lnq)) + 1;
  cplx hi = series(X * std::exp((k + 1) * qp.lnq));
  cplx lo = series(X * std::exp(k * qp.lnq));
  for (int j = k - 1; j >= 0; --j) {
    cplx zj = X * std::exp(j * qp.lnq);
    cplx z2 = zj * zj;
    cplx denom = z2 - 1.0;
    if (std::abs(denom) < 1e-8)
      throw PoleAt("phi21_c0 continuation hits the unit spiral");
    cplx y = (((A + B) * z2 - 1.0) * lo - A * B * z2 * hi) / denom;
    hi = lo;
    lo = y;
  }
  return lo;
}

}  // namespace detail

// Deformation error |E_q(x) - E(x)| along a grid of q -> 1.
inline std::vector<std::pair<double, double>> confluence_sweep_lt1(
    cplx x, const std::vector<double>& q_grid, double tol = 1e-12) {
  if (std::abs(x.imag()) == 0.0 && x.real() <= 0.0)
    throw DomainError("confluence_sweep_lt1 needs x off (-inf, 0]");
  Ray ray{std::arg(x)};
  cplx classical = euler_classical(x, ray, tol).value;
  std::vector<std::pair<double, double>> table;
  table.reserve(q_grid.size());
  for (double q : q_grid) {
    EulerQltContext ctx{QParam(q)};
    table.emplace_back(q, std::abs(euler_q(ctx, x, tol).value - classical));
  }
  return table;
}

// Deformed confluent hypergeometric series
// sum (q^a;q)_n (q^b;q)_n / (q;q)_n (x/(1-q))^n, by analytic continuation.
inline cplx confluent_phi(cplx a, cplx b, const QParam& qp, cplx x,
                          double tol = 1e-12) {
  if (qp.regime != Regime::LessThanOne)
    throw DomainError("confluent_phi needs q in (0,1)");
  cplx A = std::exp(a * qp.lnq), B = std::exp(b * qp.lnq);
  return detail::phi21_c0(A, B, qp, x / (1.0 - qp.q), tol);
}

// Deformation error against the Borel sum of sum (a)_n (b)_n / n! x^n,
// computed as the ray Laplace integral of the Gauss function over x.
inline std::vector<std::pair<double, double>> confluent_hypergeom_sweep(
    cplx a, cplx b, cplx x, Ray ray, const std::vector<double>& q_grid,
    double tol = 1e-12) {
  BorelFunction phi{
      [a, b](cplx xi) { return detail::gauss_2f1_unit(a, b, xi); },
      {cplx(1.0)},
      {},
      {GrowthKind::Polynomial, 8.0, 0.0}};
  cplx borel_sum = laplace_ray(phi, ray, x, tol).value / x;
  std::vector<std::pair<double, double>> table;
  table.reserve(q_grid.size());
  for (double q : q_grid) {
    QParam qp(q);
    table.emplace_back(q, std::abs(confluent_phi(a, b, qp, x, tol) -
                                   borel_sum));
  }
  return table;
}

}  // namespace qsum

#endif  // QSUM_EULER_QLT1_HPP
