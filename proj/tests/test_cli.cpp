#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "seikit/cli.hpp"
#include "support.hpp"

using namespace sei;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scenario(const std::string& dir, const std::string& name) {
  return (testing_support::source_dir() / "scenarios" / dir / (name + ".json")).string();
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("seikit_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

}  // namespace

TEST(CliArgs, NoArgumentsIsUsageError) {
  const auto r = run({});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("check"), std::string::npos);
  EXPECT_NE(r.err.find("corpus"), std::string::npos);
}

TEST(CliArgs, UnknownFlag) {
  EXPECT_EQ(run({"check", "--scenario", scenario("worked", "root_zero_map"), "--property", "SSEP", "--bogus"}).code, 3);
  EXPECT_EQ(run({"frobnicate"}).code, 3);
  EXPECT_EQ(run({"check", "--property", "SSEP"}).code, 3);
}

TEST(CliArgs, VersionAndHelp) {
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, "0.1.0\n");
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliCheck, ConvexCounterexampleTuple) {
  const auto r = run({"check", "--scenario", scenario("worked", "root_zero_map"), "--property", "ssec", "--tuple", "1|2|1|0.5"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("s=(1) t=(2) alpha=1 lambda=0.5"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("lhs=1.224744871391589"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("rhs=1.2071067811865475"), std::string::npos) << r.out;
}

// 1 and 2 are not nodes of the 9-point grid on [-3, 3]; the grid finds an earlier witness.
TEST(CliCheck, GridConvexWitness) {
  const auto r = run({"check", "--scenario", scenario("worked", "root_zero_map"), "--property", "SSEC", "--grid", "9"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("s=(-1.5) t=(2.25) alpha=1 lambda=0.25"), std::string::npos) << r.out;
}

TEST(CliCheck, ExitCodes) {
  EXPECT_EQ(run({"check", "--scenario", scenario("worked", "step_ramp"), "--property", "SQSEP"}).code, 0);
  EXPECT_EQ(run({"check", "--scenario", scenario("worked", "root_zero_map"), "--property", "SSEP"}).code, 1);
  EXPECT_EQ(run({"check", "--scenario", scenario("extra", "abs_zero_map"), "--property", "SSEI"}).code, 2);
  EXPECT_EQ(run({"check", "--scenario", scenario("worked", "root_zero_map"), "--property", "NOPE"}).code, 3);
  EXPECT_EQ(run({"check", "--scenario", "/nonexistent.json", "--property", "SSEP"}).code, 3);
  EXPECT_EQ(run({"check", "--scenario", scenario("worked", "root_zero_map"), "--property", "SSEP", "--tuple", "9|1|0|0"}).code,
            3);
}

TEST(CliCheck, DerivedRegions) {
  EXPECT_EQ(run({"check", "--scenario", scenario("worked", "step_ramp"), "--property", "LEVEL_SET_SEI", "--level", "1"}).code,
            0);
  EXPECT_EQ(run({"check", "--scenario", scenario("worked", "step_ramp"), "--property", "LEVEL_SET_SEI"}).code, 3);
  const auto epi = run({"check", "--scenario", scenario("worked", "plateau_atan"), "--property", "EPIGRAPH_GINVEX",
                        "--tuple", "1|4|1|1", "--offsets", "2"});
  EXPECT_EQ(epi.code, 1);
}

TEST(CliReport, ManifestRoundTrip) {
  TempDir tmp;
  const auto path = (tmp.path() / "r.json").string();
  const std::vector<std::string> args = {"check", "--scenario", scenario("worked", "plateau_atan"), "--property", "SSEP",
                                         "--tuple", "1|4|1|1", "--report", path};
  ASSERT_EQ(run(args).code, 1);
  const auto doc = read_json(path);
  EXPECT_EQ(doc["exit_code"], 1);
  EXPECT_EQ(doc["manifest"]["argv"].get<std::vector<std::string>>(), args);
  EXPECT_EQ(doc["manifest"]["version"], "0.1.0");
  EXPECT_EQ(doc["manifest"]["command"], "check");
  EXPECT_TRUE(doc["manifest"].contains("timestamp"));
  EXPECT_EQ(doc["manifest"]["config"]["plan"]["explicit_tuples"].size(), 1u);
  EXPECT_EQ(doc["manifest"]["config"]["options"]["tol"], 1e-9);
  const auto& rep = doc["report"];
  EXPECT_EQ(rep["verdict"], "violated");
  EXPECT_EQ(rep["witness"]["lhs"], 7.0);
  EXPECT_EQ(rep["witness"]["rhs"], -2.0);
  EXPECT_EQ(rep["witness"]["s"], json::array({1.0}));
  EXPECT_EQ(rep["witness"]["origin"], "explicit");
  EXPECT_EQ(rep["samples_tested"], 1);
}

TEST(CliReport, ErrorsAreReported) {
  TempDir tmp;
  const auto path = (tmp.path() / "e.json").string();
  EXPECT_EQ(run({"check", "--scenario", "/nonexistent.json", "--property", "SSEP", "--report", path}).code, 3);
  const auto doc = read_json(path);
  EXPECT_EQ(doc["exit_code"], 3);
  EXPECT_TRUE(doc.contains("error"));
  EXPECT_EQ(run({"check", "--scenario", scenario("worked", "root_zero_map"), "--property", "SSEP", "--report",
                 "/nonexistent-dir/x.json"})
                .code,
            3);
}

TEST(CliTheorem, ConsistentExitsZero) {
  EXPECT_EQ(run({"theorem", "--scenario", scenario("worked", "root_zero_map"), "--id", "bridge"}).code, 0);
  EXPECT_EQ(run({"theorem", "--scenario", scenario("extra", "quad_zero_map"), "--id", "linear", "--with",
                 scenario("extra", "abs_zero_map"), "--weights", "2,3"})
                .code,
            0);
  const auto c = run({"theorem", "--scenario", scenario("extra", "abs_zero_map"), "--id", "compose", "--g", "x1 + 1"});
  EXPECT_EQ(c.code, 3);
  EXPECT_NE(c.err.find("g(2*1) = 3 but 2*g(1) = 4"), std::string::npos) << c.err;
  EXPECT_EQ(run({"theorem", "--scenario", scenario("worked", "root_zero_map"), "--id", "nope"}).code, 3);
  EXPECT_EQ(run({"theorem", "--scenario", scenario("extra", "infeasible"), "--id", "feasible-sei"}).code, 3);
}

TEST(CliSolve, ExitCodes) {
  const auto ok = run({"solve", "--scenario", scenario("extra", "root_constrained")});
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("optimal-candidate"), std::string::npos) << ok.out;
  EXPECT_EQ(run({"solve", "--scenario", scenario("extra", "infeasible")}).code, 1);
  EXPECT_EQ(run({"solve", "--scenario", scenario("extra", "sphere"), "--max-evals", "3"}).code, 2);
  EXPECT_EQ(run({"solve", "--scenario", scenario("extra", "root_constrained"), "--alpha", "1"}).code, 0);
  EXPECT_EQ(run({"solve", "--scenario", scenario("extra", "root_constrained"), "--alpha", "2"}).code, 3);
}

TEST(CliSolve, ReportCarriesStarts) {
  TempDir tmp;
  const auto path = (tmp.path() / "s.json").string();
  ASSERT_EQ(run({"solve", "--scenario", scenario("extra", "root_constrained"), "--report", path}).code, 0);
  const auto doc = read_json(path);
  EXPECT_EQ(doc["report"]["status"], "optimal-candidate");
  EXPECT_EQ(doc["report"]["starts"].size(), 16u);
  EXPECT_TRUE(doc.contains("local_global"));
  EXPECT_TRUE(doc.contains("optimal_set"));
}

TEST(CliCorpus, BundledCorporaPass) {
  for (const char* dir : {"worked", "extra"}) {
    const auto r = run({"corpus", (testing_support::source_dir() / "scenarios" / dir).string()});
    EXPECT_EQ(r.code, 0) << r.out;
  }
}

TEST(CliCorpus, FlippedExpectationFails) {
  TempDir tmp;
  const auto src = testing_support::source_dir() / "scenarios" / "worked";
  fs::copy_file(src / "plateau_atan.json", tmp.path() / "plateau_atan.json");
  json sidecar = read_json(src / "plateau_atan.expect.json");
  sidecar["checks"][0]["expect"]["verdict"] = "holds-on-samples";
  std::ofstream(tmp.path() / "plateau_atan.expect.json") << sidecar.dump(2);
  const auto r = run({"corpus", tmp.path().string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("plateau_atan.json"), std::string::npos);
  EXPECT_NE(r.out.find("FAIL"), std::string::npos) << r.out;
}

TEST(CliCorpus, EmptyDirectory) {
  TempDir tmp;
  const auto r = run({"corpus", tmp.path().string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0/0 passed"), std::string::npos) << r.out;
}

TEST(CliCorpus, MissingSidecar) {
  TempDir tmp;
  fs::copy_file(testing_support::source_dir() / "scenarios" / "worked" / "step_ramp.json", tmp.path() / "step_ramp.json");
  const auto r = run({"corpus", tmp.path().string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("missing sidecar"), std::string::npos) << r.out;
}

TEST(CliCorpus, MissingDirectory) { EXPECT_EQ(run({"corpus", "/nonexistent-corpus"}).code, 3); }

TEST(CliParsing, TuplesAndScalars) {
  const auto t = cli::parse_tuple("-1/2,-1/3|-1/4,-1/9|0|0.5");
  EXPECT_EQ(t.s, (Point{-0.5, -1.0 / 3}));
  EXPECT_EQ(t.t, (Point{-0.25, -1.0 / 9}));
  EXPECT_EQ(t.lambda, 0.5);
  EXPECT_THROW(cli::parse_tuple("1|2|3"), Error);
  EXPECT_DOUBLE_EQ(cli::parse_scalar("2*pi"), 2 * M_PI);
  EXPECT_THROW(cli::parse_scalar("x1"), Error);
}
