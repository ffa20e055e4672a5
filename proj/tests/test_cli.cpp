#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args) {
  std::string cmd = std::string(QSUMMATION_BIN) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
    out.append(buf.data(), n);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("verify --list enumerates at least twelve identities") {
  auto r = run("verify --list");
  CHECK(r.exit_code == 0);
  auto names = lines(r.out);
  CHECK(names.size() >= 12);
  // sorted, hence deterministic
  for (std::size_t i = 1; i < names.size(); ++i) CHECK(names[i - 1] < names[i]);
}

TEST_CASE("eval emits a json record with the documented value") {
  auto r = run("eval --target theta --q 0.5 --x 1 --no-timestamp");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"schema\": 1") != std::string::npos);
  CHECK(r.out.find("3.28326512") != std::string::npos);
  CHECK(r.out.find("timestamp") == std::string::npos);
  auto with_ts = run("eval --target theta --q 0.5 --x 1");
  CHECK(with_ts.out.find("timestamp") != std::string::npos);
}

TEST_CASE("complex arguments use the modulus@argument form") {
  auto r = run("eval --target euler-gt1-ray --q 2 --x 0.5@-1.5707 --d -0.7 "
               "--no-timestamp");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("\"value_im\"") != std::string::npos);
}

TEST_CASE("verify passes and is byte-identical across reruns") {
  std::string args =
      "verify --target thm-identity --q 2 --tol 1e-7 --seed 7 --no-timestamp";
  auto a = run(args);
  auto b = run(args);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("\"status\": \"PASS\"") != std::string::npos);
  // the full registry is deterministic too
  std::string all =
      "verify --target all --tol 1e-6 --seed 3 --no-timestamp --output csv";
  auto c = run(all);
  auto d = run(all);
  CHECK(c.exit_code == 0);
  CHECK(c.out == d.out);
  CHECK(c.out.find("param,value_re,value_im,abs_err,residual,pass") == 0);
}

TEST_CASE("thread cap does not change the report") {
  std::string args =
      "verify --target all --tol 1e-6 --seed 3 --no-timestamp --output csv";
  setenv("QSUM_THREADS", "1", 1);
  auto single = run(args);
  setenv("QSUM_THREADS", "4", 1);
  auto multi = run(args);
  unsetenv("QSUM_THREADS");
  CHECK(single.out == multi.out);
}

TEST_CASE("exit codes follow the contract") {
  // 0: success
  CHECK(run("verify --target heine --tol 1e-6 --no-timestamp").exit_code == 0);
  // 1: a suite that fails its tolerance
  CHECK(run("verify --target thm-identity --q 2 --tol 1e-14 --no-timestamp")
            .exit_code == 1);
  // 2: usage errors
  CHECK(run("verify --target no-such-identity").exit_code == 2);
  CHECK(run("eval").exit_code == 2);
  CHECK(run("eval --target theta --tol 0.5").exit_code == 2);
  CHECK(run("frobnicate").exit_code == 2);
  CHECK(run("sweep --target confluence-lt1 --x 1").exit_code == 2);
}

TEST_CASE("sweep emits a monotone csv table") {
  auto r = run("sweep --target confluence-lt1 --x 1 "
               "--q-grid 0.9,0.99,0.999 --output csv");
  CHECK(r.exit_code == 0);
  auto rows = lines(r.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "param,value_re,value_im,abs_err,residual,pass");
  double prev = 1e300;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto last_comma = rows[i].rfind(',');
    CHECK(rows[i].substr(last_comma + 1) == "1");
    auto cols = rows[i];
    // residual column is the second to last
    auto tail = cols.substr(0, last_comma);
    double err = std::stod(tail.substr(tail.rfind(',') + 1));
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("numeric domain errors are reported, not crashed") {
  auto r = run("eval --target euler-gt1-ray --q 2 --x 1@3.14159265358979 "
               "--d 0");
  CHECK(r.exit_code == 1);
}
