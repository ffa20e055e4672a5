#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qsum/jackson.hpp>
#include <qsum/special.hpp>

#include <cmath>

using namespace qsum;

TEST_CASE("finite integral of monomials and constants") {
  QParam qp(0.4);
  cplx x(0.7, 0.2);
  auto r = jackson_finite([](cplx t) { return t; }, x, qp);
  CHECK(std::abs(r.value - x * x / (1.0 + qp.q)) < 1e-12);
  auto rc = jackson_finite([](cplx) { return cplx(2.5, -1.0); }, x, qp);
  CHECK(std::abs(rc.value - cplx(2.5, -1.0) * x) < 1e-12);
  CHECK_THROWS_AS(jackson_finite([](cplx) { return cplx(1.0); }, x, QParam(2.0)),
                  DomainError);
}

TEST_CASE("q-difference derivative undoes the finite integral") {
  QParam qp(0.55);
  auto f = [](cplx t) { return std::exp(t) * (1.0 + t * t); };
  for (cplx x : {cplx(0.8, 0.1), cplx(-0.3, 0.6), cplx(1.4, -0.2)}) {
    auto F = [&](cplx u) { return jackson_finite(f, u, qp, 1e-14).value; };
    cplx dq = (F(x) - F(qp.q * x)) / ((1.0 - qp.q) * x);
    CHECK(std::abs(dq - f(x)) < 1e-9);
  }
}

TEST_CASE("finite integral matches termwise Taylor integration") {
  QParam qp(0.6);
  // f = sum t^n / (n+2)^2, analytic on the unit disk
  auto f = [](cplx t) {
    cplx s = 0.0, tn = 1.0;
    for (int n = 0; n < 80; ++n) {
      s += tn / static_cast<double>((n + 2) * (n + 2));
      tn *= t;
    }
    return s;
  };
  cplx x(0.35, 0.2);
  cplx expected = 0.0, xn = x;
  for (int n = 0; n < 80; ++n) {
    expected += xn / static_cast<double>((n + 2) * (n + 2)) /
                q_bracket(n + 1, qp);
    xn *= x;
  }
  auto r = jackson_finite(f, x, qp, 1e-14);
  CHECK(std::abs(r.value - expected) < 1e-10);
}

TEST_CASE("bilateral integral of a one-point mass") {
  QParam qp(0.5);
  Spiral s{cplx(0.9, 0.4), qp};
  auto f = [&](cplx t) {
    return std::abs(t - s.anchor) < 1e-9 ? cplx(3.0, 1.0) : cplx(0.0);
  };
  auto r = jackson_bilateral(f, s, 1e-14);
  CHECK(std::abs(r.value - (1.0 - qp.q) * s.anchor * cplx(3.0, 1.0)) < 1e-12);
}

TEST_CASE("bilateral integral is invariant under re-anchoring") {
  QParam qp(0.45);
  auto f = [](cplx t) { return std::exp(-t * t) / (1.0 + t); };
  Spiral s1{cplx(0.8, 0.3), qp};
  Spiral s2{qp.q * s1.anchor, qp};
  CHECK(s1.same_as(s2));
  CHECK_FALSE(s1.same_as(Spiral{cplx(0.7, 0.3), qp}));
  auto r1 = jackson_bilateral(f, s1, 1e-14);
  auto r2 = jackson_bilateral(f, s2, 1e-14);
  CHECK(std::abs(r1.value - r2.value) < 1e-12 * std::abs(r1.value));
}

TEST_CASE("bilateral integral is linear") {
  QParam qp(0.5);
  Spiral s{cplx(1.0), qp};
  auto f = [](cplx t) { return std::exp(-t * t); };
  auto g = [](cplx t) { return 1.0 / (4.0 + t * t); };
  cplx a(2.0, 1.0), b(-0.5, 0.3);
  auto lhs = jackson_bilateral(
      [&](cplx t) { return a * f(t) + b * g(t); }, s, 1e-14);
  cplx rhs = a * jackson_bilateral(f, s, 1e-14).value +
             b * jackson_bilateral(g, s, 1e-14).value;
  CHECK(std::abs(lhs.value - rhs) < 1e-13 * std::abs(rhs));
}

TEST_CASE("finite and bilateral forms coincide when the kernel kills the outer tail") {
  // kernel ((1-q) q xi / x; q)_inf vanishes at xi = q^n x/(1-q) for n < 0
  QParam qp(0.5);
  cplx x(0.9, 0.3);
  auto integrand = [&](cplx xi) {
    cplx karg = (1.0 - qp.q) * qp.q * xi / x;
    return pochhammer(karg, qp.q, n_infinity).value / (1.0 + xi);
  };
  auto fin = jackson_finite(integrand, x / (1.0 - qp.q), qp, 1e-14);
  auto bil = jackson_bilateral(integrand, Spiral{x / (1.0 - qp.q), qp}, 1e-14);
  CHECK(std::abs(fin.value - bil.value) < 1e-10);
}

TEST_CASE("discrete factorial representation for q greater than one") {
  // [n]_q^! = q * integral over the orbit p^Z of t^n / e_q(q t)
  QParam qp(2.0);
  for (int n : {0, 1, 2, 5}) {
    auto f = [&](cplx t) {
      return std::pow(t, n) / eq_exp(qp, qp.q * t).value;
    };
    auto r = jackson_bilateral(f, Spiral{cplx(1.0), qp}, 1e-14);
    double expected = q_factorial(n, qp);
    CHECK(std::abs(qp.q * r.value - expected) < 1e-8 * expected);
  }
}

TEST_CASE("budget exhaustion reports non-convergence") {
  QParam qp(0.5);
  // integrand blowing up along the outer tail of the spiral
  auto f = [](cplx t) { return std::exp(std::abs(t)); };
  CHECK_THROWS_AS(jackson_bilateral(f, Spiral{cplx(1.0), qp}, 1e-14),
                  NonConvergent);
}
