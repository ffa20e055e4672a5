// Command-line front end: evaluate library functions, run the registered
// identity-verification suites, and emit confluence-sweep tables.
#include <CLI11.hpp>
#include <json.hpp>

#include <qsum/hypergeom.hpp>
#include <qsum/qsum_gt1.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace qsum;
using nlohmann::json;
using std::numbers::pi;

namespace {

struct Row {
  std::string param;
  cplx value = 0.0;
  double abs_err = 0.0;
  double residual = 0.0;
  bool pass = true;
};

struct Options {
  double q = 2.0;
  double tol = 1e-8;
  cplx x{1.0, 0.0};
  SurfacePoint xs{1.0, 0.0};
  cplx lambda{1.0, 0.0};
  double d = 0.0;
  std::uint32_t seed = 12345;
  std::vector<double> q_grid;
};

// complex values enter as modulus@argument_in_radians; a bare real r > 0
// means r@0 and r < 0 means |r|@pi
SurfacePoint parse_point(const std::string& s) {
  auto at = s.find('@');
  try {
    if (at == std::string::npos) {
      double v = std::stod(s);
      if (v >= 0.0) return {v, 0.0};
      return {-v, pi};
    }
    return {std::stod(s.substr(0, at)), std::stod(s.substr(at + 1))};
  } catch (const std::exception&) {
    throw CLI::ValidationError("complex value", "expected modulus@argument: " + s);
  }
}

int thread_budget(std::size_t n_cases) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QSUM_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
  }
  return static_cast<int>(std::min<std::size_t>(hw, std::max<std::size_t>(1, n_cases)));
}

// run f(i) for i in [0, n) on the allowed number of threads; results land in
// a fixed slot per index so the report is deterministic
void parallel_cases(std::size_t n, const std::function<void(std::size_t)>& f) {
  int nt = thread_budget(n);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
  for (auto& th : pool) th.join();
}

std::string fmt_cplx(cplx z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

// ---- verify suites ---------------------------------------------------------

using Suite = std::function<std::vector<Row>(const Options&)>;

std::vector<Row> suite_theta_triple(const Options& o) {
  std::mt19937 rng(o.seed);
  std::uniform_real_distribution<double> mod(0.2, 5.0), ang(-pi, pi);
  std::vector<Row> rows;
  for (double base : {0.3, 0.5, 0.8}) {
    double worst = 0.0;
    cplx at_worst = 0.0;
    for (int i = 0; i < 30; ++i) {
      cplx x = std::polar(mod(rng), ang(rng));
      cplx direct = theta(base, x, 1e-15).value;
      cplx prod = pochhammer(cplx(base), base, n_infinity).value *
                  pochhammer(-x, base, n_infinity).value *
                  pochhammer(-base / x, base, n_infinity).value;
      double r = std::abs(direct - prod) / std::abs(prod);
      if (r > worst) {
        worst = r;
        at_worst = x;
      }
      // functional equation theta(x) = x theta(base x)
      double f = std::abs(direct - x * theta(base, base * x, 1e-15).value) /
                 std::abs(direct);
      worst = std::max(worst, f);
    }
    Row row;
    row.param = "base=" + std::to_string(base);
    row.value = at_worst;
    row.residual = worst;
    row.pass = worst < o.tol;
    rows.push_back(row);
  }
  return rows;
}

std::vector<Row> suite_theta_modular(const Options& o) {
  double q = o.q < 1.0 ? o.q : 0.5;
  QParam qp(q);
  std::mt19937 rng(o.seed);
  std::uniform_real_distribution<double> mod(0.5, 2.0), ang(-2.5, 2.5);
  std::vector<Row> rows;
  for (int i = 0; i < 10; ++i) {
    SurfacePoint x{mod(rng), ang(rng)};
    Row row;
    row.param = "x=" + std::to_string(x.modulus) + "@" +
                std::to_string(x.argument);
    row.residual = verify_modular(qp, x, 1e-15);
    row.pass = row.residual < o.tol;
    rows.push_back(row);
  }
  return rows;
}

std::vector<Row> suite_gamma_shift(const Options& o) {
  double base = o.q < 1.0 ? o.q : 0.7;
  std::mt19937 rng(o.seed);
  std::uniform_real_distribution<double> u(0.3, 2.0);
  std::vector<Row> rows;
  for (int i = 0; i < 10; ++i) {
    cplx x(u(rng), u(rng) - 1.15);
    cplx bracket = (1.0 - std::exp(x * std::log(base))) / (1.0 - base);
    cplx lhs = gamma_q(base, x + 1.0).value;
    Row row;
    row.param = "x=" + fmt_cplx(x);
    row.value = lhs;
    row.residual =
        std::abs(lhs - bracket * gamma_q(base, x).value) / std::abs(lhs);
    row.pass = row.residual < o.tol;
    rows.push_back(row);
  }
  return rows;
}

std::vector<Row> suite_psi_omega(const Options& o) {
  double base = o.q < 1.0 ? o.q : 0.6;
  std::mt19937 rng(o.seed);
  std::uniform_real_distribution<double> u(0.2, 1.8);
  std::vector<Row> rows;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    cplx x(u(rng), u(rng) - 1.0);
    cplx bx = std::exp(x * std::log(base));
    cplx lhs = psi_q(base, x + 1.0).value - psi_q(base, x).value;
    cplx rhs = std::log(base) * omega(1, bx, base).value;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  Row shift;
  shift.param = "psi-shift";
  shift.residual = worst;
  shift.pass = worst < o.tol;
  rows.push_back(shift);
  Row aconst;
  aconst.param = "psi-vs-A";
  double A = const_A(base);
  double viaPsi =
      -(psi_q(base, cplx(1.0)).value.real() + std::log(1.0 - base)) /
      std::log(base);
  aconst.value = A;
  aconst.residual = std::abs(A - viaPsi);
  aconst.pass = aconst.residual < o.tol;
  rows.push_back(aconst);
  return rows;
}

std::vector<Row> suite_qlog_shift(const Options& o) {
  double base = o.q < 1.0 ? o.q : 0.5;
  std::mt19937 rng(o.seed);
  std::uniform_real_distribution<double> mod(0.3, 3.0), ang(-2.8, 2.8);
  std::vector<Row> rows;
  for (int i = 0; i < 10; ++i) {
    cplx x = std::polar(mod(rng), ang(rng));
    Row row;
    row.param = "x=" + fmt_cplx(x);
    cplx l = q_log(base, x).value;
    row.value = l;
    row.residual = std::abs(q_log(base, base * x).value - l - 1.0);
    row.pass = row.residual < o.tol;
    rows.push_back(row);
  }
  return rows;
}

std::vector<Row> suite_euler_triple(const Options& o) {
  std::vector<Row> rows;
  for (double q : {0.3, 0.5, 0.7}) {
    EulerQltContext ctx{QParam(q)};
    std::mt19937 rng(o.seed);
    std::uniform_real_distribution<double> mod(0.5, 5.0), ang(-pi, pi);
    double worst = 0.0;
    for (int i = 0; i < 15; ++i) {
      cplx x = std::polar(mod(rng), ang(rng));
      bool near_pole = false;
      for (int k = -3; k < 12; ++k)
        if (std::abs(x - ctx.pole(k)) < 0.1 * std::abs(ctx.pole(k)))
          near_pole = true;
      if (near_pole) continue;
      cplx a = euler_q(ctx, x, 1e-13).value;
      cplx b = euler_q_heine(ctx, x, 1e-13).value;
      cplx c = euler_q_infinity(ctx, x, 1e-13).value;
      double s = std::max(1.0, std::abs(a));
      worst = std::max({worst, std::abs(a - b) / s, std::abs(a - c) / s});
    }
    Row row;
    row.param = "q=" + std::to_string(q);
    row.residual = worst;
    row.pass = worst < o.tol;
    rows.push_back(row);
  }
  return rows;
}

std::vector<Row> suite_euler_residue(const Options& o) {
  double q = o.q < 1.0 ? o.q : 0.5;
  EulerQltContext ctx{QParam(q)};
  std::vector<Row> rows;
  for (std::int64_t k : {0, -1, -2}) {
    cplx pole = ctx.pole(k);
    cplx res = euler_q_residue(ctx, k);
    double h = 1e-5 * std::abs(pole);
    // (z - pole) f(z) = res + c1 h + O(h^2); eliminate the linear term
    cplx est_h = h * euler_q(ctx, pole + h, 1e-13).value;
    cplx est_h2 = 0.5 * h * euler_q(ctx, pole + 0.5 * h, 1e-13).value;
    Row row;
    row.param = "k=" + std::to_string(k);
    row.value = res;
    row.residual = std::abs(2.0 * est_h2 - est_h - res) / std::abs(res);
    row.pass = row.residual < o.tol;
    rows.push_back(row);
  }
  return rows;
}

std::vector<Row> suite_heine(const Options& o) {
  double base = o.q < 1.0 ? o.q : 0.5;
  std::mt19937 rng(o.seed);
  std::uniform_real_distribution<double> u(-0.45, 0.45);
  std::vector<Row> rows;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    cplx a(0.3 + u(rng), u(rng)), b(0.4 + u(rng), u(rng));
    cplx c(0.25 + u(rng), u(rng)), x(0.3 + 0.5 * u(rng), 0.5 * u(rng));
    worst = std::max(worst, verify_heine(a, b, c, base, x, 1e-13));
  }
  Row row;
  row.param = "base=" + std::to_string(base);
  row.residual = worst;
  row.pass = worst < o.tol;
  rows.push_back(row);
  return rows;
}

std::vector<Row> suite_watson(const Options& o) {
  double base = o.q < 1.0 ? o.q : 0.5;
  std::mt19937 rng(o.seed);
  // admissibility needs |c q / (a b)| < |x| < 1, well away from both walls
  std::uniform_real_distribution<double> u(-0.08, 0.08);
  std::vector<Row> rows;
  double worst = 0.0;
  for (int i = 0; i < 12; ++i) {
    cplx a(0.8 + u(rng), 0.2 + u(rng)), b(0.55 + u(rng), -0.1 + u(rng));
    cplx c(0.1 + 0.3 * u(rng), 0.05 + 0.3 * u(rng));
    cplx x(0.45 + u(rng), 0.4 + u(rng));
    worst = std::max(worst, verify_watson(a, b, c, base, x, 1e-13));
  }
  Row row;
  row.param = "base=" + std::to_string(base);
  row.residual = worst;
  row.pass = worst < o.tol;
  rows.push_back(row);
  return rows;
}

std::vector<Row> suite_watson_degenerate(const Options& o) {
  double base = o.q < 1.0 ? o.q : 0.5;
  std::vector<Row> rows;
  {
    Row row;
    row.param = "b=a*q^m";
    double worst = 0.0;
    worst = std::max(worst, verify_watson_degenerate(1, cplx(0.8, 0.1),
                                                     cplx(0.05), base,
                                                     cplx(0.6, 0.1)));
    worst = std::max(worst, verify_watson_degenerate(2, cplx(0.3, 0.15),
                                                     cplx(0.02, 0.01), base,
                                                     cplx(0.6, 0.1)));
    row.residual = worst;
    row.pass = worst < o.tol;
    rows.push_back(row);
  }
  {
    Row row;
    row.param = "b=a,c=0";
    double worst = 0.0;
    worst = std::max(worst, verify_watson_degenerate(0, cplx(0.3, 0.15),
                                                     cplx(0.0), base,
                                                     cplx(0.4, 0.2)));
    worst = std::max(worst, verify_watson_degenerate(2, cplx(0.3, 0.15),
                                                     cplx(0.0), base,
                                                     cplx(0.4, 0.2)));
    row.residual = worst;
    row.pass = worst < o.tol;
    rows.push_back(row);
  }
  {
    Row row;
    row.param = "b=a*q^m,a=c*q^k";
    double worst = 0.0;
    worst = std::max(worst, verify_watson_ca_qk(1, 1, cplx(4.5), base,
                                                cplx(0.6)));
    worst = std::max(worst, verify_watson_ca_qk(2, 1, cplx(9.5), base,
                                                cplx(0.7)));
    row.residual = worst;
    row.pass = worst < o.tol;
    rows.push_back(row);
  }
  return rows;
}

std::vector<Row> suite_identity(const Options& o) {
  QParam qp(o.q > 1.0 ? o.q : 2.0);
  std::vector<SurfacePoint> xs{{0.4, 0.5}, {0.55, -0.7}, {0.7, 0.2},
                               {0.35, 1.4}, {0.6, -1.1}};
  std::vector<double> ds{0.3, -0.5, 0.9, 1.4, -1.2};
  std::vector<cplx> lambdas{std::exp(cplx(0.0, 0.4)),
                            std::exp(cplx(0.0, -0.8)), cplx(1.2),
                            cplx(0.0, 1.0), std::exp(cplx(0.0, 2.2))};
  Row row;
  row.param = "q=" + std::to_string(qp.q);
  row.residual = verify_identity_theorem(qp, xs, ds, lambdas, 1e-11);
  row.pass = row.residual < o.tol;
  return {row};
}

std::vector<Row> suite_qfactorial(const Options& o) {
  std::vector<Row> rows;
  for (double q : {1.5, 2.0, 3.0}) {
    QParam qp(q);
    SurfacePoint x{0.7, 0.3};
    cplx xc = x.project();
    double worst = 0.0;
    for (int n = 0; n <= 5; ++n) {
      BorelFunction mono{[n](cplx xi) { return std::pow(xi, n); },
                         {},
                         {},
                         {GrowthKind::Polynomial, 2.0, double(n)}};
      cplx want_f = q_factorial(n, qp) * std::pow(xc, n + 1);
      cplx want_t = std::pow(q, 0.5 * n * (n - 1.0)) * std::pow(xc, n + 1);
      for (double d : {0.1, 0.6, -0.4}) {
        cplx ve = q_laplace({QKernel::Eq, Ray{d}, qp, 1e-12}, mono, x).value;
        cplx vt =
            q_laplace({QKernel::Theta, Ray{d}, qp, 1e-12}, mono, x).value;
        worst = std::max({worst, std::abs(ve - want_f) / std::abs(want_f),
                          std::abs(vt - want_t) / std::abs(want_t)});
      }
      for (cplx lam : {cplx(1.0), std::exp(cplx(0.0, 0.5)), cplx(0.0, 1.0)}) {
        cplx ve = q_laplace({QKernel::Eq, lam, qp, 1e-12}, mono, x).value;
        cplx vt = q_laplace({QKernel::Theta, lam, qp, 1e-12}, mono, x).value;
        worst = std::max({worst, std::abs(ve - want_f) / std::abs(want_f),
                          std::abs(vt - want_t) / std::abs(want_t)});
      }
    }
    Row row;
    row.param = "q=" + std::to_string(q);
    row.residual = worst;
    row.pass = worst < o.tol;
    rows.push_back(row);
  }
  return rows;
}

std::vector<Row> suite_stokes(const Options& o) {
  std::vector<Row> rows;
  for (double q : {1.5, 2.0}) {
    auto rep = stokes_jump(QParam(q), SurfacePoint{0.4, -pi / 2.0}, 1e-11);
    Row row;
    row.param = "q=" + std::to_string(q);
    row.value = rep.jump;
    row.residual = std::max(rep.residual, rep.kernel_gap);
    row.pass = row.residual < o.tol;
    rows.push_back(row);
  }
  return rows;
}

std::vector<Row> suite_disc_cont(const Options& o) {
  std::vector<Row> rows;
  for (double q : {1.5, 2.0}) {
    auto rep =
        disc_cont_difference(QParam(q), 1.0, SurfacePoint{0.7, 2.2}, 1e-12);
    Row row;
    row.param = "q=" + std::to_string(q);
    row.value = rep.difference;
    row.residual = rep.residual / std::abs(rep.difference);
    row.pass = row.residual < o.tol;
    rows.push_back(row);
  }
  return rows;
}

std::vector<Row> suite_averaging(const Options& o) {
  std::vector<Row> rows;
  for (double q : {1.5, 2.0}) {
    Row row;
    row.param = "q=" + std::to_string(q);
    row.residual =
        average_over_spiral(QParam(q), SurfacePoint{0.7, 0.0}, 32, 1.0, 1e-12);
    row.pass = row.residual < o.tol;
    rows.push_back(row);
  }
  return rows;
}

std::vector<Row> suite_spiral_compare(const Options& o) {
  std::vector<cplx> xs{cplx(-0.45, 0.25), cplx(-0.6, 0.3), cplx(-0.5, 0.2),
                       cplx(-0.35, -0.45)};
  std::vector<Row> rows;
  for (double q : {1.5, 2.0}) {
    QParam qp(q);
    auto r = spiral_compare(qp, 1.0, std::exp(cplx(0.0, pi / 4.0)), xs, 1e-12);
    cplx pp = pochhammer(cplx(qp.p), qp.p, n_infinity, 1e-15).value;
    cplx want = -(qp.q - 1.0) * pp * pp * pp;
    Row row;
    row.param = "q=" + std::to_string(q);
    row.value = r.constant;
    row.residual =
        std::max(r.dispersion, std::abs(r.constant - want) / std::abs(want));
    row.pass = row.residual < o.tol;
    rows.push_back(row);
  }
  return rows;
}

std::vector<Row> suite_tschakaloff(const Options& o) {
  QParam qp(o.q > 1.0 ? o.q : 2.0);
  auto s = tschakaloff_sums(qp, cplx(0.0, 1.0), pi / 2.0,
                            SurfacePoint{0.3, 0.0}, 1e-12);
  Row row;
  row.param = "q=" + std::to_string(qp.q);
  row.value = s.spiral_theta.value;
  row.residual = std::max(
      {std::abs(s.ray_theta.value - s.ray_factorial.value),
       std::abs(s.spiral_theta.value - s.spiral_factorial.value),
       std::abs(s.spiral_theta.value - s.closed_theta),
       std::abs(s.spiral_factorial.value - s.closed_factorial)});
  row.pass = row.residual < o.tol;
  return {row};
}

std::vector<Row> suite_modified_tschakaloff(const Options& o) {
  QParam qp(o.q > 1.0 ? o.q : 2.0);
  std::vector<Row> rows;
  for (int n : {1, 2}) {
    auto rep = modified_tschakaloff_suite(qp, n, cplx(0.0, 1.0), pi / 2.0,
                                          SurfacePoint{0.3, 0.0}, 1e-12);
    Row row;
    row.param = "n=" + std::to_string(n);
    row.value = rep.spiral_theta;
    row.residual = std::max({rep.pair_spiral, rep.pair_ray, rep.averaging});
    row.pass = row.residual < o.tol;
    rows.push_back(row);
  }
  return rows;
}

const std::map<std::string, Suite>& suites() {
  static const std::map<std::string, Suite> reg{
      {"theta-triple", suite_theta_triple},
      {"theta-modular", suite_theta_modular},
      {"gamma-shift", suite_gamma_shift},
      {"psi-omega", suite_psi_omega},
      {"qlog-shift", suite_qlog_shift},
      {"euler-triple", suite_euler_triple},
      {"euler-residue", suite_euler_residue},
      {"heine", suite_heine},
      {"watson", suite_watson},
      {"watson-degenerate", suite_watson_degenerate},
      {"thm-identity", suite_identity},
      {"qfactorial", suite_qfactorial},
      {"stokes", suite_stokes},
      {"disc-cont", suite_disc_cont},
      {"averaging", suite_averaging},
      {"spiral-compare", suite_spiral_compare},
      {"tschakaloff", suite_tschakaloff},
      {"modified-tschakaloff", suite_modified_tschakaloff},
  };
  return reg;
}

// ---- eval targets ----------------------------------------------------------

Row eval_target(const std::string& target, const Options& o) {
  Row row;
  row.param = target;
  auto fill = [&](const NumericResult& r) {
    row.value = r.value;
    row.abs_err = r.abs_err;
  };
  if (target == "theta") {
    auto t = theta(o.q, o.x, 1e-15);
    row.value = t.value;
    row.abs_err = 1e-14 * std::abs(t.value);
  } else if (target == "eq-exp") {
    fill(eq_exp(QParam(o.q), o.x));
  } else if (target == "ep-exp") {
    fill(ep_exp(o.q, o.x));
  } else if (target == "gamma-q") {
    fill(gamma_q(o.q, o.x));
  } else if (target == "psi-q") {
    fill(psi_q(o.q, o.x));
  } else if (target == "q-log") {
    fill(q_log(o.q, o.x));
  } else if (target == "euler-lt1") {
    fill(euler_q(EulerQltContext{QParam(o.q)}, o.x, o.tol));
  } else if (target == "euler-gt1-ray") {
    QParam qp(o.q);
    fill(q_laplace({QKernel::Eq, Ray{o.d}, qp, o.tol},
                   euler_density_factorial(qp), o.xs));
  } else if (target == "euler-gt1-spiral") {
    QParam qp(o.q);
    fill(q_laplace({QKernel::Eq, o.lambda, qp, o.tol},
                   euler_density_factorial(qp), o.xs));
  } else if (target == "tschakaloff-spiral") {
    QParam qp(o.q);
    auto s = tschakaloff_sums(qp, o.lambda, o.d == 0.0 ? pi / 2.0 : o.d,
                              o.xs, o.tol);
    fill(s.spiral_theta);
  } else {
    throw CLI::ValidationError("--target", "unknown eval target: " + target);
  }
  return row;
}

// ---- sweep targets ---------------------------------------------------------

std::vector<Row> sweep_target(const std::string& target, const Options& o) {
  std::vector<Row> rows;
  auto push = [&](double q, double err) {
    Row row;
    row.param = "q=" + std::to_string(q);
    row.value = err;
    row.residual = err;
    rows.push_back(row);
  };
  if (target == "confluence-lt1") {
    for (auto [q, err] : confluence_sweep_lt1(o.x, o.q_grid, 1e-12))
      push(q, err);
  } else if (target == "confluence-gt1") {
    for (auto r : confluence_sweep_gt1(o.x, o.q_grid, o.lambda, 1e-9)) {
      Row row;
      row.param = "q=" + std::to_string(r.q);
      row.value = cplx(r.err_ray, r.err_spiral);
      row.residual = std::max(r.err_ray, r.err_spiral);
      rows.push_back(row);
    }
  } else if (target == "confluence-2f0") {
    for (auto [q, err] : confluent_hypergeom_sweep(
             cplx(0.3), cplx(0.4), o.x, Ray{std::arg(o.x)}, o.q_grid, 1e-12))
      push(q, err);
  } else {
    throw CLI::ValidationError("--target", "unknown sweep target: " + target);
  }
  // monotone decrease is the pass criterion for sweeps
  for (std::size_t i = 0; i < rows.size(); ++i)
    rows[i].pass = i == 0 || rows[i].residual < rows[i - 1].residual;
  return rows;
}

// ---- output ----------------------------------------------------------------

void emit(const std::string& command, const std::string& target,
          const std::vector<Row>& rows, const std::string& format,
          bool with_timestamp) {
  if (format == "csv") {
    std::printf("param,value_re,value_im,abs_err,residual,pass\n");
    for (const Row& r : rows)
      std::printf("%s,%.15g,%.15g,%.3g,%.3g,%d\n", r.param.c_str(),
                  r.value.real(), r.value.imag(), r.abs_err, r.residual,
                  r.pass ? 1 : 0);
    return;
  }
  json doc;
  doc["schema"] = 1;
  doc["command"] = command;
  doc["target"] = target;
  if (with_timestamp) {
    auto now = std::chrono::system_clock::now();
    doc["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(
                           now.time_since_epoch())
                           .count();
  }
  doc["rows"] = json::array();
  for (const Row& r : rows)
    doc["rows"].push_back({{"param", r.param},
                           {"value_re", r.value.real()},
                           {"value_im", r.value.imag()},
                           {"abs_err", r.abs_err},
                           {"residual", r.residual},
                           {"pass", r.pass}});
  bool all = std::all_of(rows.begin(), rows.end(),
                         [](const Row& r) { return r.pass; });
  doc["status"] = all ? "PASS" : "FAIL";
  std::printf("%s\n", doc.dump(2).c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"q-analogues of Borel-Laplace summation"};
  app.require_subcommand(1);

  Options o;
  std::string target, format = "json", x_str = "1", lambda_str = "1";
  std::string grid_str;
  bool no_timestamp = false, list = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--target", target, "registered function or identity");
    sub->add_option("--q", o.q, "base q");
    sub->add_option("--x", x_str, "point, modulus@argument");
    sub->add_option("--lambda", lambda_str, "spiral anchor, modulus@argument");
    sub->add_option("--d", o.d, "ray direction (radians)");
    sub->add_option("--tol", o.tol, "tolerance")
        ->check(CLI::Range(1e-14, 1e-2));
    sub->add_option("--seed", o.seed, "seed for randomized sample grids");
    sub->add_option("--output", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--no-timestamp", no_timestamp,
                  "suppress the timestamp field in json output");
  };

  CLI::App* eval = app.add_subcommand("eval", "evaluate one function");
  add_common(eval);
  CLI::App* verify = app.add_subcommand("verify", "run an identity suite");
  add_common(verify);
  verify->add_flag("--list", list, "list registered identities");
  CLI::App* sweep = app.add_subcommand("sweep", "emit a confluence table");
  add_common(sweep);
  sweep->add_option("--q-grid", grid_str, "comma-separated q values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (app.exit(e) == 0) return 0;  // --help
    return 2;
  }

  try {
    SurfacePoint xp = parse_point(x_str);
    o.xs = xp;
    o.x = xp.project();
    o.lambda = parse_point(lambda_str).project();
    for (std::size_t pos = 0; pos < grid_str.size();) {
      auto comma = grid_str.find(',', pos);
      if (comma == std::string::npos) comma = grid_str.size();
      o.q_grid.push_back(std::stod(grid_str.substr(pos, comma - pos)));
      pos = comma + 1;
    }

    if (verify->parsed()) {
      if (list) {
        for (const auto& [name, _] : suites()) std::printf("%s\n", name.c_str());
        return 0;
      }
      if (target.empty()) {
        std::fprintf(stderr, "verify needs --target or --list\n");
        return 2;
      }
      std::vector<std::string> names;
      if (target == "all")
        for (const auto& [name, _] : suites()) names.push_back(name);
      else
        names.push_back(target);
      std::vector<std::vector<Row>> parts(names.size());
      bool ok = true;
      std::exception_ptr first_error;
      parallel_cases(names.size(), [&](std::size_t i) {
        try {
          auto it = suites().find(names[i]);
          if (it == suites().end())
            throw CLI::ValidationError("--target",
                                       "unknown identity: " + names[i]);
          parts[i] = it->second(o);
        } catch (...) {
          if (!first_error) first_error = std::current_exception();
        }
      });
      if (first_error) std::rethrow_exception(first_error);
      std::vector<Row> rows;
      for (std::size_t i = 0; i < names.size(); ++i)
        for (Row r : parts[i]) {
          r.param = names[i] + "/" + r.param;
          rows.push_back(r);
        }
      std::sort(rows.begin(), rows.end(),
                [](const Row& a, const Row& b) { return a.param < b.param; });
      for (auto& r : rows) ok = ok && r.pass;
      emit("verify", target, rows, format, !no_timestamp);
      return ok ? 0 : 1;
    }
    if (eval->parsed()) {
      if (target.empty()) {
        std::fprintf(stderr, "eval needs --target\n");
        return 2;
      }
      emit("eval", target, {eval_target(target, o)}, format, !no_timestamp);
      return 0;
    }
    // sweep
    if (target.empty() || o.q_grid.empty()) {
      std::fprintf(stderr, "sweep needs --target and --q-grid\n");
      return 2;
    }
    auto rows = sweep_target(target, o);
    bool ok = std::all_of(rows.begin(), rows.end(),
                          [](const Row& r) { return r.pass; });
    emit("sweep", target, rows, format, !no_timestamp);
    return ok ? 0 : 1;
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric error: %s (q=%g x=%s)\n", e.what(), o.q,
                 x_str.c_str());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
