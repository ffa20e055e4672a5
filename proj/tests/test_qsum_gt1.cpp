#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qsum/qsum_gt1.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace qsum;
using std::numbers::pi;

namespace {

// partial sum of the divergent series sum (-1)^n [n]^! x^{n+1}
cplx euler_partial(const QParam& qp, cplx x, int n_terms) {
  cplx s = 0.0, t = x;
  for (int n = 0; n < n_terms; ++n) {
    s += t;
    t *= -q_bracket(n + 1, qp) * x;
  }
  return s;
}

BorelFunction monomial_density(int n) {
  return {[n](cplx xi) { return std::pow(xi, n); },
          {},
          {},
          {GrowthKind::Polynomial, 2.0, static_cast<double>(n)}};
}

SurfacePoint sp(cplx z) { return {std::abs(z), std::arg(z)}; }

}  // namespace

TEST_CASE("ray operators reproduce the factorial and theta moments") {
  for (double q : {1.5, 2.0, 3.0}) {
    QParam qp(q);
    SurfacePoint x{0.7, 0.3};
    cplx xc = x.project();
    for (int n : {0, 1, 2, 3, 5}) {
      BorelFunction mono = monomial_density(n);
      cplx got_eq =
          q_laplace({QKernel::Eq, Ray{0.3}, qp, 1e-12}, mono, x).value;
      cplx want_eq = q_factorial(n, qp) * std::pow(xc, n + 1);
      CHECK(std::abs(got_eq - want_eq) <= 1e-9 * std::abs(want_eq) + 1e-11);
      cplx got_th =
          q_laplace({QKernel::Theta, Ray{0.3}, qp, 1e-12}, mono, x).value;
      cplx want_th =
          std::pow(qp.q, 0.5 * n * (n - 1.0)) * std::pow(xc, n + 1);
      CHECK(std::abs(got_th - want_th) <= 1e-9 * std::abs(want_th) + 1e-11);
    }
  }
}

TEST_CASE("spiral operators reproduce the same moments") {
  for (double q : {1.5, 2.0, 3.0}) {
    QParam qp(q);
    SurfacePoint x{0.7, 0.3};
    cplx xc = x.project();
    cplx lambda = std::exp(cplx(0.0, 0.4));
    for (int n : {0, 1, 2, 4}) {
      BorelFunction mono = monomial_density(n);
      cplx got_eq = q_laplace({QKernel::Eq, lambda, qp, 1e-12}, mono, x).value;
      cplx want_eq = q_factorial(n, qp) * std::pow(xc, n + 1);
      CHECK(std::abs(got_eq - want_eq) <= 1e-9 * std::abs(want_eq) + 1e-11);
      cplx got_th =
          q_laplace({QKernel::Theta, lambda, qp, 1e-12}, mono, x).value;
      cplx want_th =
          std::pow(qp.q, 0.5 * n * (n - 1.0)) * std::pow(xc, n + 1);
      CHECK(std::abs(got_th - want_th) <= 1e-9 * std::abs(want_th) + 1e-11);
    }
  }
}

TEST_CASE("spiral sums are invariant under lambda -> q lambda") {
  QParam qp(2.0);
  SurfacePoint x{0.6, 0.2};
  BorelFunction psi = euler_density_factorial(qp);
  cplx lambda = std::exp(cplx(0.0, 0.7));
  cplx a = q_laplace({QKernel::Eq, lambda, qp, 1e-12}, psi, x).value;
  cplx b = q_laplace({QKernel::Eq, qp.q * lambda, qp, 1e-12}, psi, x).value;
  CHECK(std::abs(a - b) < 1e-12);
  CHECK(same_summation_spiral(lambda, qp.q * qp.q * lambda, qp));
  CHECK_FALSE(same_summation_spiral(lambda, 1.3 * lambda, qp));
}

TEST_CASE("the four sums of the divergent q-Euler series agree") {
  QParam qp(2.0);
  std::vector<SurfacePoint> xs{{0.5, 0.8}, {0.8, -0.6}, {0.35, 2.0}};
  std::vector<double> ds{0.4, -0.7};
  std::vector<cplx> lambdas{std::exp(cplx(0.0, 0.5)), cplx(0.0, 1.0)};
  CHECK(verify_identity_theorem(qp, xs, ds, lambdas, 1e-11) < 1e-8);
}

TEST_CASE("ray and spiral sums obey the q-Gevrey Taylor bound") {
  QParam qp(2.0);
  SurfacePoint x{0.18, 0.5};
  cplx xc = x.project();
  auto s = euler_four_sums(qp, x, 0.25, std::exp(cplx(0.0, 0.9)), 1e-12);
  for (int N : {2, 4, 6}) {
    double bound = 10.0 * q_factorial(N, qp) *
                   std::pow(x.modulus, N + 1);
    cplx part = euler_partial(qp, xc, N);
    CHECK(std::abs(s.ray_factorial.value - part) < bound);
    CHECK(std::abs(s.spiral_theta.value - part) < bound);
  }
}

TEST_CASE("every sum satisfies the q-Euler equation x^2 d_q y + y = x") {
  QParam qp(1.5);
  auto residual = [&](auto&& S, cplx xc) {
    cplx y = S(sp(xc));
    cplx yq = S(sp(qp.q * xc));
    cplx dq = (yq - y) / ((qp.q - 1.0) * xc);
    return std::abs(xc * xc * dq + y - xc);
  };
  cplx xc{0.4, 0.3};
  BorelFunction psi = euler_density_factorial(qp);
  BorelFunction phi = euler_density_theta(qp);
  CHECK(residual([&](SurfacePoint x) {
          return q_laplace({QKernel::Eq, Ray{0.3}, qp, 1e-12}, psi, x).value;
        }, xc) < 1e-9);
  CHECK(residual([&](SurfacePoint x) {
          return q_laplace({QKernel::Theta, cplx(1.0, 0.3), qp, 1e-12}, phi, x)
              .value;
        }, xc) < 1e-9);
}

TEST_CASE("spiral sums blow up near the pole spiral -lambda q^Z") {
  QParam qp(2.0);
  BorelFunction psi = euler_density_factorial(qp);
  cplx lambda = 1.0;
  double c = 1.0 - qp.p;
  // poles of the factorial-kernel spiral sum sit at -(1-p) lambda q^Z
  cplx pole = -c * lambda;
  auto at = [&](double eps) {
    return std::abs(
        q_laplace({QKernel::Eq, lambda, qp, 1e-12}, psi, sp(pole + eps))
            .value);
  };
  CHECK(at(1e-4) > 50.0 * at(1e-1));
  CHECK_THROWS_AS(
      q_laplace({QKernel::Eq, lambda, qp, 1e-12}, psi, sp(pole)),
      DomainError);
}

TEST_CASE("ray mode rejects bad directions and blocked rays") {
  QParam qp(2.0);
  BorelFunction psi = euler_density_factorial(qp);
  SurfacePoint x{0.5, 0.0};
  CHECK_THROWS_AS(q_laplace({QKernel::Eq, Ray{pi}, qp, 1e-12}, psi, x),
                  DomainError);
  SurfacePoint far{0.5, 2.5};
  CHECK_THROWS_AS(
      q_laplace({QKernel::Eq, Ray{2.5 - pi - 0.2}, qp, 1e-12}, psi, far),
      DomainError);
  // density pole ray of the theta density
  BorelFunction phi = euler_density_theta(qp);
  SurfacePoint y{0.5, 2.0};
  CHECK_THROWS_AS(q_laplace({QKernel::Theta, Ray{pi}, qp, 1e-12}, phi, y),
                  PoleOnPath);
  QParam small(0.5);
  CHECK_THROWS_AS(q_laplace({QKernel::Eq, Ray{0.0}, small, 1e-12}, psi, x),
                  DomainError);
}

TEST_CASE("continued sum jumps by 2 pi i (q-1)/ln q / e_q(-q/x) per turn") {
  for (double q : {1.5, 2.0}) {
    QParam qp(q);
    SurfacePoint x{0.4, -pi / 2.0};
    auto rep = stokes_jump(qp, x, 1e-11);
    CHECK(std::abs(rep.jump) > 1e-6);  // the monodromy is genuinely nonzero
    CHECK(rep.residual < 1e-8);
    CHECK(rep.kernel_gap < 1e-8);
  }
  QParam qp(2.0);
  CHECK_THROWS_AS(stokes_jump(qp, SurfacePoint{0.4, 0.5}, 1e-11),
                  DomainError);
  CHECK_THROWS_AS(euler_sum_continued(qp, SurfacePoint{0.4, 7.0}), DomainError);
}

TEST_CASE("ray minus spiral sum matches its modular closed form") {
  for (double q : {1.5, 2.0}) {
    QParam qp(q);
    // off the positive axis the gap is well above rounding noise, so the
    // closed form is checked relatively
    auto rep = disc_cont_difference(qp, 1.0, SurfacePoint{0.7, 2.2}, 1e-12);
    CHECK(std::abs(rep.difference) > 1e-8);
    CHECK(rep.residual < 1e-6 * std::abs(rep.difference));
    auto axis = disc_cont_difference(qp, 1.0, SurfacePoint{0.7, 0.0}, 1e-12);
    CHECK(axis.residual < 1e-12);
  }
  QParam qp(2.0);
  // rotated anchor
  auto rep = disc_cont_difference(qp, std::exp(cplx(0.0, 0.5)),
                                  SurfacePoint{0.6, 0.3}, 1e-12);
  CHECK(rep.residual < 1e-6 * std::abs(rep.difference) + 1e-13);
  // x on the anchor orbit (1-p) q^Z: both modular arguments coincide
  auto anchor = disc_cont_difference(qp, 1.0, SurfacePoint{0.5, 0.0}, 1e-12);
  CHECK(anchor.residual < 1e-10);
  // x on the pole spiral of the discrete sum
  CHECK_THROWS_AS(
      disc_cont_difference(qp, 1.0, SurfacePoint{0.5, pi}, 1e-12), PoleAt);
}

TEST_CASE("the gap between ray and spiral sums solves the homogeneous equation") {
  QParam qp(2.0);
  cplx xc = std::polar(0.7, 2.2);
  auto gap = [&](SurfacePoint z) {
    return disc_cont_difference(qp, 1.0, z, 1e-12).difference;
  };
  cplx D = gap({0.7, 2.2}), Dq = gap({qp.q * 0.7, 2.2});
  cplx dq = (Dq - D) / ((qp.q - 1.0) * xc);
  CHECK(std::abs(xc * xc * dq + D) < 1e-6 * std::abs(D));
}

TEST_CASE("the ray sum is the average of the spiral sums over one period") {
  for (double q : {1.5, 2.0}) {
    QParam qp(q);
    CHECK(average_over_spiral(qp, SurfacePoint{0.7, 0.0}, 32, 1.0, 1e-12) <
          1e-8);
  }
  QParam qp(2.0);
  // path anchored off the positive axis
  CHECK(average_over_spiral(qp, SurfacePoint{0.7, 0.1}, 32,
                            std::exp(cplx(0.0, pi / 6.0)), 1e-12) < 1e-8);
  CHECK_THROWS_AS(average_over_spiral(qp, SurfacePoint{0.7, pi}), DomainError);
}

TEST_CASE("normalized gap between two spiral sums is a pure constant") {
  // x near the negative axis keeps the gap between the two sums O(1e-3),
  // well clear of the cancellation floor of double precision
  std::vector<cplx> xs{cplx(-0.45, 0.25), cplx(-0.6, 0.3), cplx(-0.5, 0.2),
                       cplx(-0.35, -0.45)};
  for (double q : {1.5, 2.0}) {
    QParam qp(q);
    auto r1 = spiral_compare(qp, 1.0, std::exp(cplx(0.0, pi / 4.0)), xs,
                             1e-12);
    CHECK(r1.dispersion < 1e-6);
    auto r2 = spiral_compare(qp, std::exp(cplx(0.0, pi / 3.0)), cplx(1.3),
                             xs, 1e-12);
    CHECK(r2.dispersion < 1e-6);
    // pair independence and the closed form of the constant
    CHECK(std::abs(r1.constant - r2.constant) < 1e-6 * std::abs(r1.constant));
    cplx pp = pochhammer(cplx(qp.p), qp.p, n_infinity, 1e-15).value;
    cplx want = -(qp.q - 1.0) * pp * pp * pp;
    CHECK(std::abs(r1.constant - want) < 1e-6 * std::abs(want));
  }
  QParam qp(2.0);
  CHECK_THROWS_AS(spiral_compare(qp, 1.0, cplx(qp.q), xs, 1e-12), DomainError);
}

TEST_CASE("Tschakaloff sums: four operators, closed forms, functional equation") {
  QParam qp(2.0);
  cplx lambda{0.0, 1.0};
  SurfacePoint x{0.3, 0.0};
  auto s = tschakaloff_sums(qp, lambda, pi / 2.0, x, 1e-12);
  CHECK(std::abs(s.ray_theta.value - s.ray_factorial.value) < 1e-9);
  CHECK(std::abs(s.spiral_theta.value - s.spiral_factorial.value) < 1e-9);
  CHECK(std::abs(s.spiral_theta.value - s.closed_theta) < 1e-9);
  CHECK(std::abs(s.spiral_factorial.value - s.closed_factorial) < 1e-9);

  // x T(qx) - q T(x) + q x = 0 for each sum
  auto s2 = tschakaloff_sums(qp, lambda, pi / 2.0, sp(qp.q * cplx(0.3)),
                             1e-12);
  cplx xc = 0.3;
  cplx r1 = xc * s2.ray_theta.value - qp.q * s.ray_theta.value + qp.q * xc;
  cplx r2 =
      xc * s2.spiral_factorial.value - qp.q * s.spiral_factorial.value +
      qp.q * xc;
  CHECK(std::abs(r1) < 1e-8);
  CHECK(std::abs(r2) < 1e-8);

  CHECK_THROWS_AS(tschakaloff_sums(qp, lambda, 0.0, x, 1e-12), DomainError);
  CHECK_THROWS_AS(tschakaloff_sums(qp, cplx(2.0), pi / 2.0, x, 1e-12),
                  DomainError);
}

TEST_CASE("modified Tschakaloff family: kernel pairs agree and average") {
  QParam qp(2.0);
  cplx lambda{0.0, 1.0};
  SurfacePoint x{0.3, 0.0};
  for (int n : {1, 2}) {
    auto rep = modified_tschakaloff_suite(qp, n, lambda, pi / 2.0, x, 1e-12);
    double scale = std::max({1.0, std::abs(rep.spiral_theta),
                             std::abs(rep.ray_theta)});
    CHECK(rep.pair_spiral < 1e-6 * scale);
    CHECK(rep.pair_ray < 1e-6 * scale);
    CHECK(rep.averaging < 1e-6 * scale);
  }
  CHECK_THROWS_AS(modified_tschakaloff_suite(qp, 4, lambda, pi / 2.0, x),
                  DomainError);
}

TEST_CASE("theta-kernel sums converge to the classical Borel sum as q -> 1") {
  cplx x{0.5, 0.25};
  auto rows = confluence_sweep_gt1(x, {1.3, 1.1, 1.03, 1.01}, 1.0, 1e-10);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].err_ray < rows[i - 1].err_ray);
    CHECK(rows[i].err_spiral < rows[i - 1].err_spiral);
  }
  CHECK(rows.back().err_ray < 1e-2);
  CHECK_THROWS_AS(confluence_sweep_gt1(cplx(-1.0), {1.5}), DomainError);
}

TEST_CASE("q-exponential stays below the exponential on the positive axis") {
  for (double q : {1.2, 2.0, 4.0}) {
    QParam qp(q);
    for (double t : {0.1, 0.7, 2.0, 5.0}) {
      double e = eq_exp(qp, cplx(t)).value.real();
      CHECK(e > 0.0);
      CHECK(e <= std::exp(t) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("slope-one rewriting of the q-Euler operator on random series") {
  QParam qp(2.0);
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> coin(-1.0, 1.0);
  TruncSeries f;
  f.coeffs.resize(9);
  for (auto& c : f.coeffs) c = {coin(rng), coin(rng)};
  // x/(q-1) (sigma_q - 1) f  ==  x^2 d_q f, checked pointwise
  TruncSeries dil = series_dilate(f, qp.q);
  TruncSeries dq = series_dq(f, qp);
  for (cplx x0 : {cplx(0.3), cplx(0.2, 0.5), cplx(-0.4, 0.1)}) {
    cplx lhs = x0 / (qp.q - 1.0) * (dil.eval(x0) - f.eval(x0));
    cplx rhs = x0 * x0 * dq.eval(x0);
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}
