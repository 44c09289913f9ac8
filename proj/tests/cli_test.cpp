#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "coupon/specialfn.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"coupon"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out, err;
  const int code = coupon::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Sets an environment variable for the lifetime of the object.
class ScopedEnv {
 public:
  ScopedEnv(const char* name, const std::string& value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old, had_ = true;
    ::setenv(name, value.c_str(), 1);
  }
  ~ScopedEnv() {
    if (had_) ::setenv(name_, old_.c_str(), 1);
    else ::unsetenv(name_);
  }

 private:
  const char* name_;
  std::string old_;
  bool had_ = false;
};

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("coupon_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(CliCurve, AnchorRow) {
  const Result r = run({"curve", "--nu", "1", "--a", "0.1", "--step", "0.001"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "x,y,lambda");
  EXPECT_EQ(first, "2,1,1");
}

TEST(CliCurve, GoldenFile) {
  const Result r = run({"curve", "--nu", "1", "--a", "1", "--step", "0.125"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, slurp(fs::path(COUPON_TEST_DATA_DIR) / "curve_nu1_a1_step0.125.csv"));
}

TEST(CliCurve, ByteIdenticalRepeats) {
  const Result a = run({"curve", "--nu", "0.5", "--a", "0.2"});
  const Result b = run({"curve", "--nu", "0.5", "--a", "0.2"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(CliCurve, UsageErrors) {
  EXPECT_EQ(run({"curve", "--nu", "1", "--a", "2.5"}).code, coupon::cli::kExitUsage);
  EXPECT_EQ(run({"curve", "--nu", "1"}).code, coupon::cli::kExitUsage);
  EXPECT_EQ(run({"curve", "--nu", "0", "--a", "0.5"}).code, coupon::cli::kExitUsage);
  EXPECT_EQ(run({"curve", "--nu", "1", "--a", "0.5", "--format", "json"}).code,
            coupon::cli::kExitUsage);
  EXPECT_EQ(run({"curve", "--nu", "x", "--a", "0.5"}).code, coupon::cli::kExitUsage);
  const Result r = run({});
  EXPECT_EQ(r.code, coupon::cli::kExitUsage);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
}

TEST(CliStirling, Value) {
  const Result r = run({"stirling", "7", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\n7,3,301,"), std::string::npos) << r.out;

  const Result j = run({"stirling", "7", "3", "--format", "json"});
  ASSERT_EQ(j.code, 0);
  const json doc = json::parse(j.out);
  EXPECT_EQ(doc["stirling"], "301");
  EXPECT_TRUE(doc["chi"].is_number());

  const Result big = run({"stirling", "100", "50", "--format", "json"});
  ASSERT_EQ(big.code, 0);
  EXPECT_GT(json::parse(big.out)["stirling"].get<std::string>().size(), 90u);

  const Result edge = run({"stirling", "5", "5", "--format", "json"});
  ASSERT_EQ(edge.code, 0);
  EXPECT_TRUE(json::parse(edge.out)["chi"].is_null());
}

TEST(CliStirling, Errors) {
  EXPECT_EQ(run({"stirling", "5", "6"}).code, coupon::cli::kExitUsage);
  EXPECT_EQ(run({"stirling", "5"}).code, coupon::cli::kExitUsage);
  EXPECT_EQ(run({"stirling", "20", "5", "--cap", "10"}).code, coupon::cli::kExitUsage);
  EXPECT_EQ(run({"stirling", "--verify", "--lambdas", "0.3", "--ells", "5"}).code,
            coupon::cli::kExitUsage);
}

TEST(CliStirling, VerifyDefaultGrid) {
  const Result r = run({"stirling", "--verify", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["rows"].size(), 15u);
  const double max_chi = doc["max_l_abs_chi"];
  const double max_r = doc["max_l_abs_r_minus_rho"];
  EXPECT_TRUE(std::isfinite(max_chi));
  EXPECT_TRUE(std::isfinite(max_r));
  EXPECT_GT(max_chi, 0.0);
  EXPECT_LT(max_chi, 1.0);

  const Result csv = run({"stirling", "--verify", "--lambdas", "1", "--ells", "50,100"});
  ASSERT_EQ(csv.code, 0);
  EXPECT_NE(csv.out.find("# max_l_abs_chi="), std::string::npos);
}

TEST(CliSimulate, SeedDeterminism) {
  const Result a = run({"simulate", "--N", "200", "--n", "100", "--trials", "100", "--a", "0.2",
                        "--seed", "7"});
  const Result b = run({"simulate", "--N", "200", "--n", "100", "--trials", "100", "--a", "0.2",
                        "--seed", "7"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const json doc = json::parse(a.out);
  EXPECT_EQ(doc["sup_distances"].size(), 100u);
  EXPECT_EQ(doc["seed"], 7);

  const Result c = run({"simulate", "--N", "200", "--n", "100", "--trials", "100", "--a", "0.2",
                        "--seed", "8"});
  EXPECT_NE(a.out, c.out);
}

TEST(CliSimulate, JobsIndependent) {
  const Result a = run({"simulate", "--N", "300", "--n", "100", "--trials", "40", "--seed", "3",
                        "--jobs", "1"});
  const Result b = run({"simulate", "--N", "300", "--n", "100", "--trials", "40", "--seed", "3",
                        "--jobs", "8"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(CliSimulate, Errors) {
  EXPECT_EQ(run({"simulate", "--N", "100", "--n", "200"}).code, coupon::cli::kExitUsage);
  EXPECT_EQ(run({"simulate", "--N", "100", "--n", "100"}).code, coupon::cli::kExitUsage);
  EXPECT_EQ(run({"simulate", "--N", "200", "--n", "100", "--a", "2"}).code,
            coupon::cli::kExitUsage);
  EXPECT_EQ(run({"simulate", "--N", "200", "--n", "100", "--backend", "fast"}).code,
            coupon::cli::kExitUsage);
  EXPECT_EQ(run({"simulate", "--N", "200", "--n", "100", "--format", "csv"}).code,
            coupon::cli::kExitUsage);
  // Good's estimate is outside its validity window near the ends of the path.
  EXPECT_EQ(run({"simulate", "--N", "200", "--n", "100", "--backend", "saddle"}).code,
            coupon::cli::kExitNumeric);
}

TEST(CliSimulate, TrajectoryOut) {
  const fs::path dir = scratch_dir("traj");
  const ScopedEnv env(coupon::cli::kOutputDirEnv, dir.string());
  const Result r = run({"simulate", "--N", "60", "--n", "20", "--trials", "3",
                        "--trajectory-out", "traj.csv", "--out", "batch.json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const std::string traj = slurp(dir / "traj.csv");
  // Reversed chain: z[0] = n, z[N] = 0.
  EXPECT_EQ(traj.rfind("t,z\n0,20\n", 0), 0u);
  EXPECT_NE(traj.find("\n60,0\n"), std::string::npos);
  EXPECT_EQ(json::parse(slurp(dir / "batch.json"))["N"], 60);
  fs::remove_all(dir);
}

TEST(CliKorshunov, ConstantAndIdentity) {
  const Result r = run({"korshunov", "--k", "2", "--n", "1000", "--trials", "100000", "--jobs",
                        "8", "--clopper-pearson"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_NEAR(doc["korshunov"].get<double>(), 0.59362, 1e-5);
  const double rho = std::exp(-coupon::xi_of_lambda(1.0));
  EXPECT_NEAR(doc["pollaczek_pi0"].get<double>(), (1 - 2 * rho) / (1 - rho), 1e-15);
  const double est = doc["estimate"], se = doc["stderr"];
  EXPECT_LT(std::abs(est - doc["korshunov"].get<double>()), 3 * se + 0.01);
  ASSERT_EQ(doc["clopper_pearson"].size(), 2u);
  EXPECT_LT(doc["clopper_pearson"][0].get<double>(), est);
  EXPECT_GT(doc["clopper_pearson"][1].get<double>(), est);
}

TEST(CliKorshunov, Errors) {
  EXPECT_EQ(run({"korshunov", "--k", "1"}).code, coupon::cli::kExitUsage);
  EXPECT_EQ(run({"korshunov", "--n", "1"}).code, coupon::cli::kExitUsage);
  EXPECT_EQ(run({"korshunov", "--trials", "0"}).code, coupon::cli::kExitUsage);
  EXPECT_EQ(run({"korshunov", "--jobs", "0"}).code, coupon::cli::kExitUsage);
}

TEST(CliLdp, RowsAndGap) {
  const Result r = run({"ldp", "--n-list", "1,50,100,200", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  ASSERT_EQ(doc["rows"].size(), 4u);
  EXPECT_EQ(doc["rows"][0]["N"], 2);
  EXPECT_EQ(doc["rows"][0]["log_p_over_n"].get<double>(), 0.0);
  double prev = INFINITY;
  for (std::size_t i = 1; i < 4; ++i) {
    const double gap = std::abs(doc["rows"][i]["gap"].get<double>());
    EXPECT_LT(gap, prev);
    EXPECT_LE(gap, 10.0 / doc["rows"][i]["n"].get<double>());
    prev = gap;
  }
  const Result csv = run({"ldp"});
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.rfind("n,N,log_p_over_n,neg_j,gap\n50,100,", 0), 0u);
}

TEST(CliLdp, Errors) {
  EXPECT_EQ(run({"ldp", "--nu", "0"}).code, coupon::cli::kExitUsage);
  EXPECT_EQ(run({"ldp", "--nu", "0.5", "--n-list", "3"}).code, coupon::cli::kExitUsage);
  EXPECT_EQ(run({"ldp", "--n-list", "0"}).code, coupon::cli::kExitUsage);
}

TEST(CliOutput, RelativePathUsesEnvDir) {
  const fs::path dir = scratch_dir("env");
  const ScopedEnv env(coupon::cli::kOutputDirEnv, dir.string());
  const Result r = run({"stirling", "7", "3", "--out", "s.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(dir / "s.csv"), run({"stirling", "7", "3"}).out);

  const fs::path abs = dir / "abs.csv";
  ASSERT_EQ(run({"stirling", "7", "3", "-o", abs.c_str()}).code, 0);
  EXPECT_TRUE(fs::exists(abs));
  fs::remove_all(dir);
}

TEST(CliOutput, UnwritablePathIsIoError) {
  const Result r = run({"stirling", "7", "3", "--out", "/nonexistent-dir/x/y.csv"});
  EXPECT_EQ(r.code, coupon::cli::kExitIo);
  EXPECT_NE(r.err.find("cannot open"), std::string::npos);
}

TEST(CliHelp, ExitsZero) {
  const Result r = run({"--help"});
  EXPECT_EQ(r.code, coupon::cli::kExitOk);
  EXPECT_NE(r.out.find("korshunov"), std::string::npos);
}

}  // namespace
