// Formal Borel transforms (factorial and theta scalings), ray Laplace
// quadrature, circle-contour representations, the convergent discrete
// Laplace integral, and the q-convolution product on series.
#ifndef QSUM_TRANSFORMS_HPP
#define QSUM_TRANSFORMS_HPP

#include <qsum/jackson.hpp>
#include <qsum/special.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace qsum {

// Half line e^{i d} R+.
struct Ray {
  double direction = 0.0;
};

enum class GrowthKind { Polynomial, Exponential, QExponentialOrder1 };

// Bound on |phi| at infinity: K r^deg, K e^{rate r}, or
// K r^mu exp(ln^2 r / (2 ln q)) for the order-one q-scale.
struct Growth {
  GrowthKind kind = GrowthKind::Polynomial;
  double K = 1.0;
  double degree = 0.0;  // Polynomial
  double rate = 0.0;    // Exponential
  double mu = 0.0;      // QExponentialOrder1 power prefactor
  double lnq = 0.0;     // QExponentialOrder1 scale, ln q > 0

  double log_bound(double r) const {
    double lr = std::log(r);
    switch (kind) {
      case GrowthKind::Polynomial:
        return std::log(K) + degree * std::max(lr, 0.0);
      case GrowthKind::Exponential:
        return std::log(K) + rate * r;
      case GrowthKind::QExponentialOrder1:
        return std::log(K) + mu * std::max(lr, 0.0) + lr * lr / (2.0 * lnq);
    }
    return 0.0;
  }
};

// An analytic integrand for Laplace-type integrals together with the data
// needed to steer quadrature around its singularities.
struct BorelFunction {
  Evaluatable eval;
  std::vector<cplx> poles;           // isolated poles
  std::vector<Spiral> pole_spirals;  // whole geometric orbits of poles
  Growth growth;

  // every declared singularity sits on a fixed ray from the origin
  bool blocks_direction(double d) const {
    auto on_ray = [d](cplx z) {
      return std::abs(std::remainder(std::arg(z) - d, 2.0 * std::numbers::pi)) <
             1e-9;
    };
    for (cplx z : poles)
      if (on_ray(z)) return true;
    for (const Spiral& s : pole_spirals)
      if (on_ray(s.anchor)) return true;
    return false;
  }
};

// Divide the coefficient of x^{n+1} by [n]_q^!; the result starts at xi^0.
inline TruncSeries borel_q(const TruncSeries& f, const QParam& qp) {
  if (f.valuation_offset != 1)
    throw DomainError("borel_q needs a series with valuation offset 1");
  TruncSeries h;
  h.valuation_offset = 0;
  h.coeffs.resize(f.coeffs.size());
  for (int n = 0; n <= f.order(); ++n)
    h.coeffs[n] = f.coeffs[n] / q_factorial(n, qp);
  return h;
}

inline TruncSeries borel_q_inverse(const TruncSeries& phi, const QParam& qp) {
  if (phi.valuation_offset != 0)
    throw DomainError("borel_q_inverse needs a series with valuation offset 0");
  TruncSeries h;
  h.valuation_offset = 1;
  h.coeffs.resize(phi.coeffs.size());
  for (int n = 0; n <= phi.order(); ++n)
    h.coeffs[n] = phi.coeffs[n] * q_factorial(n, qp);
  return h;
}

// Divide the coefficient of x^{n+1} by q^{n(n-1)/2}.
inline TruncSeries borel_theta(const TruncSeries& f, const QParam& qp) {
  if (f.valuation_offset != 1)
    throw DomainError("borel_theta needs a series with valuation offset 1");
  TruncSeries h;
  h.valuation_offset = 0;
  h.coeffs.resize(f.coeffs.size());
  for (int n = 0; n <= f.order(); ++n)
    h.coeffs[n] =
        f.coeffs[n] * std::exp(-0.5 * static_cast<double>(n) *
                               static_cast<double>(n - 1) * qp.lnq);
  return h;
}

inline TruncSeries borel_theta_inverse(const TruncSeries& phi,
                                       const QParam& qp) {
  if (phi.valuation_offset != 0)
    throw DomainError(
        "borel_theta_inverse needs a series with valuation offset 0");
  TruncSeries h;
  h.valuation_offset = 1;
  h.coeffs.resize(phi.coeffs.size());
  for (int n = 0; n <= phi.order(); ++n)
    h.coeffs[n] =
        phi.coeffs[n] * std::exp(0.5 * static_cast<double>(n) *
                                 static_cast<double>(n - 1) * qp.lnq);
  return h;
}

namespace detail {

// Gauss-Legendre nodes and weights on [-1, 1], generated once by Newton
// iteration on the Legendre recurrence.
inline const std::array<std::pair<double, double>, 16>& gauss16() {
  static const auto table = [] {
    std::array<std::pair<double, double>, 16> t{};
    constexpr int n = 16;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 64; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      t[i] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
    }
    return t;
  }();
  return table;
}

// Composite 16-point Gauss-Legendre over [a, b] split into n panels.
template <typename F>
cplx gauss_panels(const F& g, double a, double b, int n) {
  const auto& gl = gauss16();
  double h = (b - a) / n;
  cplx sum = 0.0;
  for (int p = 0; p < n; ++p) {
    double mid = a + (p + 0.5) * h;
    cplx acc = 0.0;
    for (const auto& [node, w] : gl) acc += w * g(mid + 0.5 * h * node);
    sum += 0.5 * h * acc;
  }
  return sum;
}

}  // namespace detail

// int_0^{infinity e^{id}} phi(xi) e^{-xi/x} dxi, evaluated on the
// log-transformed axis xi = e^{id + u} with composite Gauss-Legendre
// panels and panel doubling.
inline NumericResult laplace_ray(const BorelFunction& phi, Ray ray, cplx x,
                                 double tol = 1e-12) {
  cplx dir = std::exp(cplx(0.0, ray.direction));
  double c = (dir / x).real();  // kernel decay rate along the ray
  if (!(c > 0.0))
    throw DomainError("laplace_ray needs Re(e^{id}/x) > 0");
  if (phi.blocks_direction(ray.direction))
    throw PoleOnPath("laplace_ray: declared pole on the integration ray");
  if (phi.growth.kind == GrowthKind::Exponential && phi.growth.rate >= c)
    throw NonConvergent("laplace_ray: growth rate exceeds kernel decay");

  // below xi0 the integrand is bounded by K, so the head contributes < K xi0
  double K = std::max(phi.growth.K, 1.0);
  double u_min = std::log(tol / (10.0 * K));
  double goal = -std::log(tol) + 3.0;
  double u_max = 0.0;
  while (c * std::exp(u_max) - phi.growth.log_bound(std::exp(u_max)) < goal) {
    u_max += 0.5;
    if (u_max > 700.0)
      throw NonConvergent("laplace_ray: tail never drops below tolerance");
  }

  auto g = [&](double u) {
    cplx xi = dir * std::exp(u);
    return phi.eval(xi) * xi * std::exp(-xi / x);
  };
  int panels = std::max(8, static_cast<int>(std::ceil((u_max - u_min) / 2.0)));
  cplx prev = detail::gauss_panels(g, u_min, u_max, panels);
  NumericResult r;
  for (int round = 0;; ++round) {
    if (round > 14) throw NonConvergent("laplace_ray: panel doubling stalled");
    panels *= 2;
    cplx cur = detail::gauss_panels(g, u_min, u_max, panels);
    double diff = std::abs(cur - prev);
    if (diff < tol * std::max(1.0, std::abs(cur))) {
      r.value = cur;
      r.abs_err = diff + tol / 5.0;  // head and tail truncation allowances
      r.terms_used = panels * 16;
      r.truncated = true;
      return r;
    }
    prev = cur;
  }
}

// Discrete counterpart on [0, x/(1-q)]: the Jackson integral of
// ((1-q) q xi / x; q)_infinity phi(xi), which vanishes beyond the outer
// endpoint of the spiral.
inline NumericResult q_laplace_convergent(const Evaluatable& phi, cplx x,
                                          const QParam& qp,
                                          double tol = 1e-12) {
  if (qp.regime != Regime::LessThanOne)
    throw DomainError("q_laplace_convergent needs q in (0,1)");
  auto integrand = [&](cplx xi) {
    cplx karg = (1.0 - qp.q) * qp.q * xi / x;
    return pochhammer(karg, qp.q, n_infinity, tol).value * phi(xi);
  };
  return jackson_finite(integrand, x / (1.0 - qp.q), qp, tol);
}

// Coefficients of phi from f via the circle contour |x| = R: the n-th
// trapezoid moment of f / x^{n+2} divided by [n]_q^!.  Node doubling until
// every kept coefficient stabilises.
inline TruncSeries contour_borel(const Evaluatable& f, double R,
                                 const QParam& qp, int order,
                                 double tol = 1e-12) {
  if (order < 0) throw DomainError("contour_borel needs order >= 0");
  int nodes = std::max(64, 4 * (order + 2));
  auto moments = [&](int N) {
    std::vector<cplx> c(order + 1, 0.0);
    for (int j = 0; j < N; ++j) {
      double th = 2.0 * std::numbers::pi * j / N;
      cplx z = R * std::exp(cplx(0.0, th));
      cplx fz = f(z);
      cplx zpow = 1.0 / z;  // z^{-(n+1)}
      for (int n = 0; n <= order; ++n) {
        c[n] += fz * zpow;
        zpow /= z;
      }
    }
    for (int n = 0; n <= order; ++n) c[n] /= static_cast<double>(N);
    return c;
  };
  std::vector<cplx> prev = moments(nodes);
  for (int round = 0;; ++round) {
    if (round > 10)
      throw NonConvergent("contour_borel: node doubling stalled");
    nodes *= 2;
    std::vector<cplx> cur = moments(nodes);
    double diff = 0.0, scale = 1.0;
    for (int n = 0; n <= order; ++n) {
      diff = std::max(diff, std::abs(cur[n] - prev[n]));
      scale = std::max(scale, std::abs(cur[n]));
    }
    if (diff < tol * scale) {
      TruncSeries phi;
      phi.valuation_offset = 0;
      phi.coeffs.resize(order + 1);
      for (int n = 0; n <= order; ++n)
        phi.coeffs[n] = cur[n] / q_factorial(n, qp);
      return phi;
    }
    prev = cur;
  }
}

// Reassemble f(x) = -(1/2 pi i) contour integral of phi(xi) k(-x/xi) d xi
// over |xi| = rho, where k is the entire resummation kernel paired with
// the coefficient scaling used to produce phi.
inline NumericResult contour_inverse(const Evaluatable& phi, double rho,
                                     cplx x, const Evaluatable& kernel,
                                     double tol = 1e-12) {
  auto integral = [&](int N) {
    cplx acc = 0.0;
    for (int j = 0; j < N; ++j) {
      double th = 2.0 * std::numbers::pi * j / N;
      cplx xi = rho * std::exp(cplx(0.0, th));
      acc += phi(xi) * kernel(-x / xi) * xi;  // d xi = i xi d th
    }
    // the overall -(1/2 pi i) * i * (2 pi / N) collapses to -1/N
    return -acc / static_cast<double>(N);
  };
  int nodes = 64;
  cplx prev = integral(nodes);
  NumericResult r;
  for (int round = 0;; ++round) {
    if (round > 12)
      throw NonConvergent("contour_inverse: node doubling stalled");
    nodes *= 2;
    cplx cur = integral(nodes);
    double diff = std::abs(cur - prev);
    if (diff < tol * std::max(1.0, std::abs(cur))) {
      r.value = cur;
      r.abs_err = diff;
      r.terms_used = nodes;
      r.truncated = true;
      return r;
    }
    prev = cur;
  }
}

// Bilinear extension of xi^n * xi^m = q^{-(nm+n+m+1)} xi^{n+m+1} on series
// starting at xi^0.  The result is reliable up to xi^{min(order)+1}.
inline TruncSeries q_convolution(const TruncSeries& f, const TruncSeries& g,
                                 const QParam& qp) {
  if (f.valuation_offset != 0 || g.valuation_offset != 0)
    throw DomainError("q_convolution needs series with valuation offset 0");
  int top = std::min(f.order(), g.order()) + 1;
  TruncSeries h;
  h.valuation_offset = 1;  // exponent of coeffs[k] is k + 1
  h.coeffs.assign(top, 0.0);
  for (int n = 0; n <= f.order(); ++n)
    for (int m = 0; m <= g.order() && n + m + 1 <= top; ++m)
      h.coeffs[n + m] += f.coeffs[n] * g.coeffs[m] *
                         std::exp(-static_cast<double>(n * m + n + m + 1) *
                                  qp.lnq);
  return h;
}

}  // namespace qsum

#endif  // QSUM_TRANSFORMS_HPP
