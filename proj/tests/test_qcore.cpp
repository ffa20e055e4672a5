#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <qsum/qcore.hpp>

#include <cmath>
#include <random>

using namespace qsum;

static TruncSeries random_series(std::mt19937& rng, int order, int offset) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TruncSeries f;
  f.valuation_offset = offset;
  f.coeffs.resize(order + 1);
  for (auto& c : f.coeffs) c = cplx(u(rng), u(rng));
  return f;
}

TEST_CASE("q_bracket basic values") {
  CHECK(q_bracket(3, QParam(2.0)) == doctest::Approx(7.0));
  CHECK(q_bracket(0, QParam(2.0)) == doctest::Approx(0.0));
  CHECK(q_bracket(0, QParam(0.3)) == doctest::Approx(0.0));
  CHECK(q_bracket(3, QParam(0.5)) == doctest::Approx(1.75));
}

TEST_CASE("q_factorial basic values") {
  CHECK(q_factorial(3, QParam(2.0)) == doctest::Approx(21.0));
  CHECK(q_factorial(0, QParam(2.0)) == doctest::Approx(1.0));
  CHECK(q_factorial(0, QParam(0.7)) == doctest::Approx(1.0));
  // direct product of brackets 1 * 1.5 * 1.75 * 1.875
  CHECK(q_factorial(4, QParam(0.5)) == doctest::Approx(4.921875).epsilon(1e-14));
}

TEST_CASE("pochhammer finite products") {
  CHECK(std::abs(pochhammer(cplx(2.0), 0.5, 2).value) < 1e-15);
  CHECK(pochhammer(cplx(0.3, 0.4), 0.5, 0).value == cplx(1.0));
}

TEST_CASE("pochhammer infinite product") {
  // oracle: plain partial product of (1 - 0.5^j), j >= 1
  double oracle = 1.0;
  for (int j = 1; j < 200; ++j) oracle *= 1.0 - std::pow(0.5, j);
  auto r = pochhammer(cplx(0.5), 0.5, n_infinity, 1e-14);
  CHECK(std::abs(r.value - oracle) < 1e-13);
  CHECK(std::abs(r.value.real() - 0.2887880951) < 1e-9);
  CHECK(r.abs_err < 1e-13);
  CHECK_THROWS_AS(pochhammer(cplx(0.5), 1.5, n_infinity), DomainError);
}

TEST_CASE("pochhammer splitting identity") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double base : {0.3, 0.5, 0.8}) {
    for (int trial = 0; trial < 10; ++trial) {
      cplx a(u(rng), u(rng));
      for (int m : {0, 1, 3, 7, 20}) {
        for (int n : {0, 2, 5, 20}) {
          cplx lhs = pochhammer(a, base, m + n).value;
          cplx rhs = pochhammer(a, base, m).value *
                     pochhammer(a * std::pow(base, m), base, n).value;
          CHECK(std::abs(lhs - rhs) <= 1e-11 * (1.0 + std::abs(lhs)));
        }
      }
    }
  }
}

TEST_CASE("series multiplication") {
  TruncSeries one_plus{{1.0, 1.0}, 0};
  TruncSeries one_minus{{1.0, -1.0}, 0};
  auto prod = series_mul(one_plus, one_minus);
  CHECK(std::abs(prod.coeffs[0] - 1.0) < 1e-15);
  CHECK(std::abs(prod.coeffs[1]) < 1e-15);

  std::mt19937 rng(1);
  auto f = random_series(rng, 6, 0);
  TruncSeries unit{{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, 0};
  auto fid = series_mul(f, unit);
  for (int n = 0; n <= 6; ++n) CHECK(std::abs(fid.coeffs[n] - f.coeffs[n]) < 1e-15);

  TruncSeries x{{1.0}, 1};
  auto x2 = series_mul(x, x);
  CHECK(x2.valuation_offset == 2);
  CHECK(std::abs(x2.coeffs[0] - 1.0) < 1e-15);
}

TEST_CASE("series_dq on monomials") {
  QParam qp(0.5);
  TruncSeries x2{{0.0, 0.0, 1.0}, 0};
  auto d = series_dq(x2, qp);
  CHECK(std::abs(d.coeffs[1] - q_bracket(2, qp)) < 1e-15);
  TruncSeries c{{3.0}, 0};
  auto dc = series_dq(c, qp);
  CHECK(std::abs(dc.eval(0.7)) < 1e-15);
}

TEST_CASE("q-difference equation satisfied by the alternating factorial series") {
  // y = sum (-1)^n [n]_q^! x^{n+1} solves x^2 d_q y + y = x to truncation order
  for (double qv : {0.5, 2.0}) {
    QParam qp(qv);
    int N = 10;
    TruncSeries y;
    y.valuation_offset = 1;
    y.coeffs.resize(N + 1);
    for (int n = 0; n <= N; ++n)
      y.coeffs[n] = (n % 2 ? -1.0 : 1.0) * q_factorial(n, qp);
    TruncSeries x2{{1.0}, 2};
    auto lhs = series_add(series_mul(x2, series_dq(y, qp)), y);
    TruncSeries minus_x{{-1.0}, 1};
    auto resid = series_add(lhs, minus_x);
    // all residual coefficients up to x^N vanish
    for (int i = 0; i + resid.valuation_offset <= N; ++i)
      CHECK(std::abs(resid.coeffs[i]) < 1e-9 * std::abs(y.coeffs[N]));
  }
}

TEST_CASE("q-Leibniz rule") {
  std::mt19937 rng(7);
  for (double qv : {0.4, 1.7}) {
    QParam qp(qv);
    auto f = random_series(rng, 8, 0);
    auto g = random_series(rng, 8, 0);
    auto lhs = series_dq(series_mul(f, g), qp);
    auto rhs = series_add(series_mul(series_dilate(f, qp.q), series_dq(g, qp)),
                          series_mul(series_dq(f, qp), g));
    int n = std::min(lhs.order(), rhs.order());
    for (int i = 0; i <= n; ++i)
      CHECK(std::abs(lhs.coeffs[i] - rhs.coeffs[i]) < 1e-12);
  }
}

TEST_CASE("factorial growth matches the theta scale for q > 1") {
  // exact: [n]_q^! = (p;p)_n q^{n(n-1)/2} / (1-p)^n, so the ratio against the
  // pure theta scale stabilizes at (p;p)_infinity
  QParam qp(2.0);
  std::int64_t n = 200;
  double log_scale = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1) * qp.lnq
                     - static_cast<double>(n) * std::log1p(-qp.p);
  double ratio = std::exp(log_q_factorial(n, qp) - log_scale);
  double limit = pochhammer(cplx(qp.p), qp.p, n_infinity).value.real();
  CHECK(std::abs(ratio - limit) < 1e-6);
  // and the ratio is flat in n once n is large
  double log_scale_100 = 0.5 * 100.0 * 99.0 * qp.lnq - 100.0 * std::log1p(-qp.p);
  double ratio_100 = std::exp(log_q_factorial(100, qp) - log_scale_100);
  CHECK(std::abs(ratio - ratio_100) < 1e-12);
}

TEST_CASE("QParam validation and regime") {
  CHECK_THROWS_AS(QParam(1.0), DomainError);
  CHECK_THROWS_AS(QParam(-2.0), DomainError);
  CHECK(QParam(0.5).regime == Regime::LessThanOne);
  CHECK(QParam(3.0).regime == Regime::GreaterThanOne);
  QParam qp(3.0);
  CHECK(qp.p * qp.q == doctest::Approx(1.0));
}
