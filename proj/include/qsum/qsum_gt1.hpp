// Summation theory for q > 1: the four q-Laplace operators (continuous ray
// and discrete spiral, factorial and theta kernels), the resulting sums of
// the divergent q-Euler series, Tschakaloff sums, and the comparison
// identities between them (identity of the four sums, Stokes jump over one
// turn, modular description of the ray/spiral gap, averaging, spiral
// comparison, confluence to the classical Borel sum).
#ifndef QSUM_QSUM_GT1_HPP
#define QSUM_QSUM_GT1_HPP

#include <qsum/euler_qlt1.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <variant>
#include <vector>

namespace qsum {

enum class QKernel { Eq, Theta };

// Which of the four Laplace operators to apply: a kernel choice crossed with
// either a continuous ray direction or a discrete summation spiral anchor.
struct QSumSpec {
  QKernel kernel;
  std::variant<Ray, cplx> mode;  // Ray{d} or the spiral anchor lambda
  QParam qp;
  double tol = 1e-12;
};

namespace detail {

// log e_q(t) as the accumulated sum of the factor logarithms, so quotients
// stay usable where e_q itself overflows.  Any log branch; only the
// exponential of the result is consumed.
inline cplx log_eq(const QParam& qp, cplx t) {
  double c = 1.0 - qp.p;
  cplx w = c * t;
  cplx s = 0.0;
  std::int64_t k = 0;
  while (std::abs(w) > 1e-5) {
    cplx f = 1.0 + w;
    if (std::abs(f) < 1e-12 * (1.0 + std::abs(w)))
      throw PoleAt("log_eq: argument on the zero spiral of e_q");
    s += std::log(f);
    w *= qp.p;
    if (++k > 2000000) throw NonConvergent("log_eq budget exhausted");
  }
  // sum_{j>=0} log(1 + w p^j) expanded in w; the quartic remainder is below
  // 1e-20 / (1 - p^4)
  cplx w2 = w * w;
  s += w / c - w2 / (2.0 * (1.0 - qp.p * qp.p)) +
       w2 * w / (3.0 * (1.0 - qp.p * qp.p * qp.p));
  return s;
}

// whether z lies on the geometric orbit anchor * q^Z, up to 1e-9 in log
inline bool on_power_orbit(cplx z, cplx anchor, const QParam& qp) {
  if (z == cplx(0.0) || anchor == cplx(0.0)) return false;
  cplx r = std::log(z / anchor);
  if (std::abs(r.imag()) > 1e-9) return false;
  return std::abs(std::remainder(r.real(), qp.lnq)) < 1e-9;
}

// Ray integral int_0^{inf e^{id}} phi(xi) / kernel(q xi / x) d xi on the
// log axis, with the decay cutoff found by scanning the actual integrand.
inline NumericResult ray_qsum(QKernel kernel, double d, const QParam& qp,
                              const BorelFunction& phi, cplx x, double tol) {
  cplx dir = std::exp(cplx(0.0, d));
  auto g = [&](double u) -> cplx {
    cplx xi = dir * std::exp(u);
    cplx karg = qp.q * xi / x;
    cplx klog = kernel == QKernel::Eq ? log_eq(qp, karg)
                                      : theta(qp.p, karg, 1e-15).log_value;
    return phi.eval(xi) * xi * std::exp(-klog);
  };
  double K = std::max(phi.growth.K, 1.0);
  double u_min = std::log(tol / (10.0 * K));
  // never cut off before the kernel has started decaying past |xi| ~ |x|
  double u_floor = std::max(0.0, std::log(std::abs(x))) + 2.0;
  double u = u_min;
  double u_max = u_floor;
  int below = 0;
  for (u = 0.0; below < 3; u += 0.5) {
    if (u > 600.0)
      throw NonConvergent("ray_qsum: integrand never drops below tolerance");
    double a = std::abs(g(u));
    below = (u >= u_floor && !(a > tol * 1e-2)) ? below + 1 : 0;
    u_max = u;
  }
  u_max += 1.0;

  int panels = std::max(8, static_cast<int>(std::ceil((u_max - u_min) / 2.0)));
  cplx prev = gauss_panels(g, u_min, u_max, panels);
  double pref_abs = kernel == QKernel::Eq ? (qp.q - 1.0) / qp.lnq
                                          : qp.q / qp.lnq;
  NumericResult r;
  for (int round = 0;; ++round) {
    if (round > 14) throw NonConvergent("ray_qsum: panel doubling stalled");
    panels *= 2;
    cplx cur = gauss_panels(g, u_min, u_max, panels);
    double diff = std::abs(cur - prev);
    if (diff < tol * std::max(1.0, std::abs(cur))) {
      r.value = pref_abs * cur;
      r.abs_err = pref_abs * (diff + tol / 5.0);
      r.terms_used = panels * 16;
      r.truncated = true;
      return r;
    }
    prev = cur;
  }
}

// Discrete bilateral sum q * sum_k xi_k phi(..) / kernel(..) over the orbit
// lambda p^Z, walked outward from the index of the largest term with O(1)
// kernel updates from the functional equations e_q(pt) = e_q(t)/(1+(1-p)t)
// and theta(pz) = theta(z)/z.
inline NumericResult spiral_qsum(QKernel kernel, cplx lambda, const QParam& qp,
                                 const BorelFunction& phi, cplx x, double tol) {
  double c = 1.0 - qp.p;
  if (on_power_orbit(x, -lambda, qp))
    throw DomainError("spiral_qsum: x on the kernel pole spiral");
  cplx eval_anchor = kernel == QKernel::Eq ? lambda / c : lambda;
  for (cplx z : phi.poles)
    if (on_power_orbit(z, eval_anchor, qp))
      throw PoleOnPath("spiral_qsum: density pole on the summation orbit");
  for (const Spiral& s : phi.pole_spirals)
    if (on_power_orbit(s.anchor, eval_anchor, qp))
      throw PoleOnPath("spiral_qsum: density pole orbit meets the summation orbit");

  // start where |xi_k| ~ |x|, near the peak of the summand
  std::int64_t k0 =
      std::lround(std::log(std::abs(lambda) / std::abs(x)) / qp.lnq);
  auto xi_at = [&](std::int64_t k) {
    return lambda * std::exp(-static_cast<double>(k) * qp.lnq);
  };
  cplx karg0 = qp.q * xi_at(k0) / x;
  if (kernel == QKernel::Eq) karg0 /= c;
  cplx klog0 = kernel == QKernel::Eq ? log_eq(qp, karg0)
                                     : theta(qp.p, karg0, 1e-15).log_value;

  NumericResult r;
  cplx sum = 0.0;
  std::int64_t used = 0;
  auto term_at = [&](std::int64_t k, cplx klog) {
    cplx xi = xi_at(k);
    cplx arg = kernel == QKernel::Eq ? xi / c : xi;
    return xi * phi.eval(arg) * std::exp(-klog);
  };
  auto bump = [&] {
    if (++used > 400000) throw NonConvergent("spiral_qsum budget exhausted");
  };
  {  // inward: k0, k0+1, ...
    cplx t = karg0, klog = klog0;
    int below = 0;
    for (std::int64_t k = k0; below < 3; ++k) {
      bump();
      cplx term = term_at(k, klog);
      sum += term;
      below = (std::abs(term) < 0.1 * tol * std::max(1.0, std::abs(sum)))
                  ? below + 1
                  : 0;
      if (kernel == QKernel::Eq) {
        cplx f = 1.0 + c * t;
        if (std::abs(f) < 1e-12 * (1.0 + std::abs(c * t)))
          throw PoleAt("spiral_qsum: kernel zero met on the orbit");
        klog -= std::log(f);
        t *= qp.p;
      } else {
        klog -= std::log(t);
        t *= qp.p;
      }
    }
  }
  {  // outward: k0-1, k0-2, ...
    cplx t = karg0, klog = klog0;
    int below = 0;
    for (std::int64_t k = k0 - 1; below < 3; --k) {
      bump();
      t *= qp.q;
      if (kernel == QKernel::Eq) {
        cplx f = 1.0 + c * t;
        if (std::abs(f) < 1e-12 * (1.0 + std::abs(c * t)))
          throw PoleAt("spiral_qsum: kernel zero met on the orbit");
        klog += std::log(f);
      } else {
        klog += std::log(t);
      }
      cplx term = term_at(k, klog);
      sum += term;
      below = (std::abs(term) < 0.1 * tol * std::max(1.0, std::abs(sum)))
                  ? below + 1
                  : 0;
    }
  }
  r.value = qp.q * sum;
  r.abs_err = qp.q * tol * std::max(1.0, std::abs(sum));
  r.terms_used = used;
  r.truncated = true;
  return r;
}

// -w theta'(-w)/theta(-w) for a base given by its (very negative) logarithm,
// with w given by a branch of log w; everything stays in log space.
inline cplx modular_qlog(double lnb, cplx logw) {
  auto t = theta_from_log(lnb, logw + cplx(0.0, std::numbers::pi), 1e-16);
  return -t.xdlog;
}

}  // namespace detail

// The discrete sums are invariant under lambda -> q lambda; report whether
// two anchors generate the same sum.
inline bool same_summation_spiral(cplx lambda, cplx mu, const QParam& qp) {
  return detail::on_power_orbit(lambda, mu, qp);
}

inline NumericResult q_laplace(const QSumSpec& spec, const BorelFunction& phi,
                               const SurfacePoint& x) {
  if (spec.qp.regime != Regime::GreaterThanOne)
    throw DomainError("q_laplace needs q > 1");
  cplx xc = x.project();
  if (std::holds_alternative<Ray>(spec.mode)) {
    double d = std::get<Ray>(spec.mode).direction;
    // the kernel poles fill the ray of direction arg(-x); staying within
    // half a turn of x keeps the integration ray clear of them
    if (!(std::abs(x.argument - d) < std::numbers::pi - 1e-12))
      throw DomainError("q_laplace: ray direction not within half a turn of x");
    if (phi.blocks_direction(d))
      throw PoleOnPath("q_laplace: density pole on the integration ray");
    return detail::ray_qsum(spec.kernel, d, spec.qp, phi, xc, spec.tol);
  }
  return detail::spiral_qsum(spec.kernel, std::get<cplx>(spec.mode), spec.qp,
                             phi, xc, spec.tol);
}

// Density of the alternating q-factorial series under the factorial Borel
// scaling: sum (-1)^n xi^n = 1/(1+xi).
inline BorelFunction euler_density_factorial(const QParam&) {
  return {[](cplx xi) { return 1.0 / (1.0 + xi); },
          {cplx(-1.0)},
          {},
          {GrowthKind::Polynomial, 4.0, 0.0}};
}

// Density under the theta scaling: the convergent deformed Euler function of
// base p divided by its argument (value 1 at the origin), with poles on the
// negative spiral -(1-p) q^N.
inline BorelFunction euler_density_theta(const QParam& qp) {
  if (qp.regime != Regime::GreaterThanOne)
    throw DomainError("euler_density_theta needs q > 1");
  EulerQltContext ctx{QParam(qp.p)};
  return {[ctx](cplx xi) {
            if (std::abs(xi) < 1e-280) return cplx(1.0);
            return euler_q(ctx, xi, 1e-14).value / xi;
          },
          {},
          {Spiral{cplx(-(1.0 - qp.p)), qp}},
          {GrowthKind::Polynomial, 4.0, 0.0}};
}

// The four Borel sums of the divergent series sum (-1)^n [n]_q^! x^{n+1}:
// ray and spiral modes crossed with the two kernels.
struct EulerGt1Sums {
  NumericResult ray_factorial;
  NumericResult ray_theta;
  NumericResult spiral_factorial;
  NumericResult spiral_theta;
};

inline EulerGt1Sums euler_four_sums(const QParam& qp, const SurfacePoint& x,
                                    double d, cplx lambda,
                                    double tol = 1e-10) {
  BorelFunction psi = euler_density_factorial(qp);
  BorelFunction phi = euler_density_theta(qp);
  EulerGt1Sums s;
  s.ray_factorial = q_laplace({QKernel::Eq, Ray{d}, qp, tol}, psi, x);
  s.ray_theta = q_laplace({QKernel::Theta, Ray{d}, qp, tol}, phi, x);
  s.spiral_factorial = q_laplace({QKernel::Eq, lambda, qp, tol}, psi, x);
  s.spiral_theta = q_laplace({QKernel::Theta, lambda, qp, tol}, phi, x);
  return s;
}

// Max gap between the theta-kernel and factorial-kernel sums over a grid;
// the two kernels produce the same function in both modes.
inline double verify_identity_theorem(const QParam& qp,
                                      const std::vector<SurfacePoint>& xs,
                                      const std::vector<double>& ds,
                                      const std::vector<cplx>& lambdas,
                                      double tol = 1e-10) {
  BorelFunction psi = euler_density_factorial(qp);
  BorelFunction phi = euler_density_theta(qp);
  double worst = 0.0;
  for (const SurfacePoint& x : xs) {
    for (double d : ds) {
      cplx a = q_laplace({QKernel::Eq, Ray{d}, qp, tol}, psi, x).value;
      cplx b = q_laplace({QKernel::Theta, Ray{d}, qp, tol}, phi, x).value;
      worst = std::max(worst, std::abs(a - b));
    }
    for (cplx lam : lambdas) {
      cplx a = q_laplace({QKernel::Eq, lam, qp, tol}, psi, x).value;
      cplx b = q_laplace({QKernel::Theta, lam, qp, tol}, phi, x).value;
      worst = std::max(worst, std::abs(a - b));
    }
  }
  return worst;
}

// Ray sum continued over the surface of the logarithm: for |arg x| < 2 pi
// the direction d = arg(x)/2 stays strictly between the kernel pole ray
// arg(-x) and the density pole ray at every winding, so a single formula
// tracks the continuation.
inline NumericResult euler_sum_continued(const QParam& qp,
                                         const SurfacePoint& x,
                                         QKernel kernel = QKernel::Eq,
                                         double tol = 1e-10) {
  if (!(std::abs(x.argument) < 2.0 * std::numbers::pi))
    throw DomainError("euler_sum_continued needs |arg x| < 2 pi");
  BorelFunction den = kernel == QKernel::Eq ? euler_density_factorial(qp)
                                            : euler_density_theta(qp);
  return q_laplace({kernel, Ray{x.argument / 2.0}, qp, tol}, den, x);
}

// Monodromy of the continued sum over one positive turn, compared with
// 2 pi i (q-1)/ln q / e_q(-q/x).
struct StokesReport {
  cplx jump;          // factorial-kernel value gap over the turn
  double residual;    // against the closed form
  double kernel_gap;  // |theta-kernel jump - factorial-kernel jump|
};

inline StokesReport stokes_jump(const QParam& qp, const SurfacePoint& x,
                                double tol = 1e-10) {
  constexpr double pi = std::numbers::pi;
  if (!(x.argument > -2.0 * pi && x.argument < 0.0))
    throw DomainError("stokes_jump needs arg x in (-2 pi, 0)");
  SurfacePoint up = x.rotated(2.0 * pi);
  cplx lo = euler_sum_continued(qp, x, QKernel::Eq, tol).value;
  cplx hi = euler_sum_continued(qp, up, QKernel::Eq, tol).value;
  cplx lo_t = euler_sum_continued(qp, x, QKernel::Theta, tol).value;
  cplx hi_t = euler_sum_continued(qp, up, QKernel::Theta, tol).value;
  StokesReport rep;
  rep.jump = hi - lo;
  cplx target = cplx(0.0, 2.0 * pi) * (qp.q - 1.0) / qp.lnq /
                eq_exp(qp, -qp.q / x.project()).value;
  rep.residual = std::abs(rep.jump - target);
  rep.kernel_gap = std::abs((hi_t - lo_t) - rep.jump);
  return rep;
}

// Gap between the continued ray sum and the discrete sum on the spiral of
// anchor lambda, against its modular closed form: the gap equals
// -2 pi i (q-1)/ln q [l*(w1) - l*(w2)] / e_q(-q/x), where l* is the
// q-logarithm for the companion base p* = e^{-4 pi^2 / ln q} and w1, w2 the
// companion images of -x/lambda and -1/lambda.
struct DiscContReport {
  cplx difference;
  cplx predicted;
  double residual;
};

inline DiscContReport disc_cont_difference(const QParam& qp, cplx lambda,
                                           const SurfacePoint& x,
                                           double tol = 1e-10) {
  constexpr double pi = std::numbers::pi;
  double c = 1.0 - qp.p;
  cplx xc = x.project();
  if (detail::on_power_orbit(xc, -c * lambda, qp))
    throw PoleAt("disc_cont_difference: x on the pole spiral of the discrete sum");
  BorelFunction psi = euler_density_factorial(qp);
  cplx ray = euler_sum_continued(qp, x, QKernel::Eq, tol).value;
  cplx spiral = q_laplace({QKernel::Eq, lambda, qp, tol}, psi, x).value;

  double lnb_star = -4.0 * pi * pi / qp.lnq;
  double arg_l = std::arg(lambda);
  // companion images of the surface points -x/lambda and -1/lambda
  cplx log1{std::log(x.modulus / std::abs(lambda)), x.argument - arg_l + pi};
  cplx log2{-std::log(std::abs(lambda)), -arg_l + pi};
  cplx w1 = cplx(0.0, -2.0 * pi) * log1 / qp.lnq;
  cplx w2 = cplx(0.0, -2.0 * pi) * log2 / qp.lnq;
  cplx bracket =
      detail::modular_qlog(lnb_star, w1) - detail::modular_qlog(lnb_star, w2);

  DiscContReport rep;
  rep.difference = ray - spiral;
  if (detail::on_power_orbit(xc, cplx(c), qp)) {
    // anchor points (1-p) q^Z: 1/e_q(-q/x) degenerates, and the identity
    // reduces to the vanishing of the bracket itself
    rep.predicted = rep.difference;
    rep.residual = std::abs(bracket);
    return rep;
  }
  rep.predicted = cplx(0.0, -2.0 * pi) * (qp.q - 1.0) / qp.lnq * bracket /
                  eq_exp(qp, -qp.q / xc).value;
  rep.residual = std::abs(rep.difference - rep.predicted);
  return rep;
}

// |ray sum - (1/ln q) int over one spiral period of the discrete sums|,
// quadrature in log lambda along [anchor, q anchor]; nodes that land on a
// pole configuration are nudged by 1e-6 in angle.
inline double average_over_spiral(const QParam& qp, const SurfacePoint& x,
                                  int quad_nodes = 32, cplx anchor = 1.0,
                                  double tol = 1e-10) {
  if (!(std::abs(x.argument) < std::numbers::pi))
    throw DomainError("average_over_spiral needs x off (-inf, 0]");
  BorelFunction phi = euler_density_theta(qp);
  cplx ray = euler_sum_continued(qp, x, QKernel::Theta, tol).value;
  auto node = [&](double u) {
    cplx lam = anchor * std::exp(u);
    try {
      return q_laplace({QKernel::Theta, lam, qp, tol}, phi, x).value;
    } catch (const NumericError&) {
      lam *= std::exp(cplx(0.0, 1e-6));
      return q_laplace({QKernel::Theta, lam, qp, tol}, phi, x).value;
    }
  };
  int panels = std::max(1, quad_nodes / 16);
  cplx avg = detail::gauss_panels(node, 0.0, qp.lnq, panels) / qp.lnq;
  return std::abs(ray - avg);
}

// Constancy of the theta-quotient normalization of the gap between two
// discrete sums:
//   (sum_[lambda] - sum_[mu]) e_q(-q/x)
//     * theta_p(lambda/x) theta_p(mu/x)
//     * theta_p(lambda/(1-p)) theta_p(p mu/(1-p))
//     / [theta_p(-lambda/mu) theta_p(-(1-p)/x) theta_p(-lambda mu/((1-p)x))]
// is independent of x, lambda and mu (it equals -(q-1)(p;p)_inf^3).
struct SpiralCompareResult {
  cplx constant;
  double dispersion;
};

inline SpiralCompareResult spiral_compare(const QParam& qp, cplx lambda,
                                          cplx mu,
                                          const std::vector<cplx>& x_samples,
                                          double tol = 1e-10) {
  if (same_summation_spiral(lambda, mu, qp))
    throw DomainError("spiral_compare: anchors generate the same sum");
  double c = 1.0 - qp.p;
  BorelFunction psi = euler_density_factorial(qp);
  auto th = [&](cplx z) {
    auto t = theta(qp.p, z, 1e-15);
    if (std::abs(t.raw) < 1e-9 * t.sum_scale)
      throw PoleAt("spiral_compare: theta factor on its zero spiral");
    return t.log_value;
  };
  cplx anchor_factor = th(lambda / c) + th(qp.p * mu / c) - th(-lambda / mu);
  std::vector<cplx> vals;
  vals.reserve(x_samples.size());
  for (cplx x : x_samples) {
    SurfacePoint xs{std::abs(x), std::arg(x)};
    cplx diff = q_laplace({QKernel::Eq, lambda, qp, tol}, psi, xs).value -
                q_laplace({QKernel::Eq, mu, qp, tol}, psi, xs).value;
    cplx lg = th(lambda / x) + th(mu / x) - th(-c / x) -
              th(-lambda * mu / (c * x)) + anchor_factor;
    vals.push_back(diff * eq_exp(qp, -qp.q / x).value * std::exp(lg));
  }
  cplx mean = 0.0;
  for (cplx v : vals) mean += v;
  mean /= static_cast<double>(vals.size());
  double disp = 0.0;
  for (cplx v : vals) disp = std::max(disp, std::abs(v - mean));
  return {mean, disp / std::abs(mean)};
}

// Sums of the divergent theta series sum q^{n(n-1)/2} x^{n+1}: the theta
// scaling leaves 1/(1-xi), the factorial scaling the entire sum
// sum xi^n / [n]^! of base p.  Both bilateral closed forms are evaluated by
// term recurrences.
struct TschakaloffSums {
  NumericResult ray_theta;
  NumericResult ray_factorial;
  NumericResult spiral_theta;
  NumericResult spiral_factorial;
  cplx closed_theta;      // matches the theta-kernel spiral sum
  cplx closed_factorial;  // matches the factorial-kernel spiral sum
};

inline TschakaloffSums tschakaloff_sums(const QParam& qp, cplx lambda,
                                        double d, const SurfacePoint& x,
                                        double tol = 1e-10) {
  constexpr double pi = std::numbers::pi;
  double c = 1.0 - qp.p;
  if (std::abs(std::remainder(d, 2.0 * pi)) < 1e-9)
    throw DomainError("tschakaloff_sums: density poles on the positive axis");
  if (detail::on_power_orbit(lambda, cplx(1.0), qp))
    throw DomainError("tschakaloff_sums: anchor on the density pole spiral");
  double p = qp.p;
  BorelFunction phi{[](cplx xi) { return 1.0 / (1.0 - xi); },
                    {},
                    {Spiral{cplx(1.0), qp}},
                    {GrowthKind::Polynomial, 4.0, 0.0}};
  BorelFunction psi{[p](cplx xi) { return ep_exp(p, xi).value; },
                    {},
                    {Spiral{cplx(1.0 / c), qp}},
                    {GrowthKind::Polynomial, 4.0, 0.0}};
  TschakaloffSums s;
  s.ray_theta = q_laplace({QKernel::Theta, Ray{d}, qp, tol}, phi, x);
  s.ray_factorial = q_laplace({QKernel::Eq, Ray{d}, qp, tol}, psi, x);
  s.spiral_theta = q_laplace({QKernel::Theta, lambda, qp, tol}, phi, x);
  s.spiral_factorial = q_laplace({QKernel::Eq, lambda, qp, tol}, psi, x);

  cplx xc = x.project();
  cplx lox = lambda / xc;
  auto tx = theta(qp.p, lox, 1e-15);
  if (std::abs(tx.raw) < 1e-9 * tx.sum_scale)
    throw PoleAt("tschakaloff_sums: x on the spiral -lambda q^Z");

  // sum over n of p^{n(n+1)/2} (lambda/x)^n / (1 - p^{n+1} lambda)
  auto bilateral = [&](auto&& ratio_up, auto&& ratio_dn, cplx t0) {
    cplx sum = t0, t = t0;
    for (int n = 0; n < 4000; ++n) {
      t *= ratio_up(n);
      sum += t;
      if (std::abs(t) < 1e-16 * std::max(1.0, std::abs(sum)) && n > 4) break;
    }
    t = t0;
    for (int n = 0; n > -4000; --n) {
      t /= ratio_dn(n - 1);
      sum += t;
      if (std::abs(t) < 1e-16 * std::max(1.0, std::abs(sum)) && n < -4) break;
    }
    return sum;
  };
  auto pw = [&](double e) { return std::exp(e * std::log(p)); };
  {
    auto ratio = [&](int n) {
      // term(n+1)/term(n)
      return pw(n + 1) * lox * (1.0 - pw(n + 1) * lambda) /
             (1.0 - pw(n + 2) * lambda);
    };
    cplx t0 = 1.0 / (1.0 - p * lambda);
    cplx sum = bilateral(ratio, ratio, t0);
    s.closed_theta = lambda / tx.value * sum;
  }
  {
    auto ratio = [&](int n) {
      cplx f = 1.0 + pw(-n) * xc / lambda;
      if (std::abs(f) < 1e-12 * (1.0 + std::abs(pw(-n) * xc / lambda)))
        throw PoleAt("tschakaloff_sums: closed-form factor vanishes");
      return f * (1.0 - pw(n + 1) * lambda) * pw(n + 1) * lox;
    };
    cplx t0 = pochhammer(-p * xc / lambda, p, n_infinity, 1e-16).value /
              pochhammer(p * lambda, p, n_infinity, 1e-16).value;
    cplx sum = bilateral(ratio, ratio, t0);
    s.closed_factorial = lambda *
                         pochhammer(cplx(p), p, n_infinity, 1e-16).value /
                         tx.value * sum;
  }
  return s;
}

// Sums of the series with theta-scaled density 1/(xi+a)^n, built from the
// one-parameter family 1/(xi+a) by differentiating in a at a = 1 (central
// differences; the factorial-scaled partner density is e_p(-xi/a)/a).
struct ModifiedTschakaloffReport {
  cplx spiral_theta;
  cplx spiral_factorial;
  cplx ray_theta;
  cplx ray_factorial;
  double pair_spiral;  // |theta-kernel - factorial-kernel| in spiral mode
  double pair_ray;     // same in ray mode
  double averaging;    // ray value vs the spiral average over one period
};

inline ModifiedTschakaloffReport modified_tschakaloff_suite(
    const QParam& qp, int n, cplx lambda, double d, const SurfacePoint& x,
    double tol = 1e-10) {
  if (n < 1 || n > 3)
    throw DomainError("modified_tschakaloff_suite needs n in {1,2,3}");
  double p = qp.p, c = 1.0 - qp.p;
  auto phi_a = [&](cplx a) {
    return BorelFunction{[a](cplx xi) { return 1.0 / (xi + a); },
                         {-a},
                         {},
                         {GrowthKind::Polynomial, 4.0, 0.0}};
  };
  auto psi_a = [&](cplx a) {
    return BorelFunction{[a, p](cplx xi) { return ep_exp(p, -xi / a).value / a; },
                         {},
                         {Spiral{-a / c, qp}},
                         {GrowthKind::Polynomial, 4.0, 0.0}};
  };
  // derivative of order n-1 in a at a = 1, scaled to the density 1/(xi+1)^n
  auto derived = [&](auto&& S) -> cplx {
    if (n == 1) return S(cplx(1.0));
    double h = 1e-3;
    if (n == 2) {
      cplx d1 = (8.0 * (S(cplx(1.0 + h)) - S(cplx(1.0 - h))) -
                 (S(cplx(1.0 + 2.0 * h)) - S(cplx(1.0 - 2.0 * h)))) /
                (12.0 * h);
      return -d1;
    }
    cplx d2 = (-S(cplx(1.0 + 2.0 * h)) + 16.0 * S(cplx(1.0 + h)) -
               30.0 * S(cplx(1.0)) + 16.0 * S(cplx(1.0 - h)) -
               S(cplx(1.0 - 2.0 * h))) /
              (12.0 * h * h);
    return d2 / 2.0;
  };
  auto spiral_th = [&](cplx lam) {
    return derived([&](cplx a) {
      return q_laplace({QKernel::Theta, lam, qp, tol}, phi_a(a), x).value;
    });
  };
  auto spiral_fa = [&](cplx lam) {
    return derived([&](cplx a) {
      return q_laplace({QKernel::Eq, lam, qp, tol}, psi_a(a), x).value;
    });
  };
  ModifiedTschakaloffReport rep;
  rep.spiral_theta = spiral_th(lambda);
  rep.spiral_factorial = spiral_fa(lambda);
  rep.ray_theta = derived([&](cplx a) {
    return q_laplace({QKernel::Theta, Ray{d}, qp, tol}, phi_a(a), x).value;
  });
  rep.ray_factorial = derived([&](cplx a) {
    return q_laplace({QKernel::Eq, Ray{d}, qp, tol}, psi_a(a), x).value;
  });
  rep.pair_spiral = std::abs(rep.spiral_theta - rep.spiral_factorial);
  rep.pair_ray = std::abs(rep.ray_theta - rep.ray_factorial);
  cplx anchor = std::exp(cplx(0.0, d));
  cplx avg = detail::gauss_panels(
                 [&](double u) { return spiral_fa(anchor * std::exp(u)); }, 0.0,
                 qp.lnq, 2) /
             qp.lnq;
  rep.averaging = std::abs(rep.ray_factorial - avg);
  return rep;
}

// Deformation error of the two theta-kernel sums against the classical
// Borel sum of the Euler series, along a grid of q -> 1+.
struct ConfluenceRowGt1 {
  double q;
  double err_ray;
  double err_spiral;
};

inline std::vector<ConfluenceRowGt1> confluence_sweep_gt1(
    cplx x, const std::vector<double>& q_grid, cplx lambda = 1.0,
    double tol = 1e-9) {
  if (std::abs(x.imag()) == 0.0 && x.real() <= 0.0)
    throw DomainError("confluence_sweep_gt1 needs x off (-inf, 0]");
  double a = std::arg(x);
  cplx classical = euler_classical(x, Ray{a / 2.0}, 1e-13).value;
  SurfacePoint xs{std::abs(x), a};
  std::vector<ConfluenceRowGt1> rows;
  rows.reserve(q_grid.size());
  for (double q : q_grid) {
    QParam qp(q);
    if (qp.regime != Regime::GreaterThanOne)
      throw DomainError("confluence_sweep_gt1 needs a grid of q > 1");
    BorelFunction phi = euler_density_theta(qp);
    cplx ray = euler_sum_continued(qp, xs, QKernel::Theta, tol).value;
    cplx spiral = q_laplace({QKernel::Theta, lambda, qp, tol}, phi, xs).value;
    rows.push_back(
        {q, std::abs(ray - classical), std::abs(spiral - classical)});
  }
  return rows;
}

}  // namespace qsum

#endif  // QSUM_QSUM_GT1_HPP
