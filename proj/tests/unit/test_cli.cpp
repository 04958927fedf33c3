#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cqrl/regions.hpp"
#include "cqrl/tolerances.hpp"
#include "cqrl_cli/acceptance.hpp"
#include "cqrl_cli/cli.hpp"
#include "expect_kind.hpp"

using namespace cqrl;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cqrl");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name, const std::string& content) {
  const auto p = fs::temp_directory_path() / ("cqrl_test_" + name);
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST(Cli, ParseQuery) {
  auto q = cli::parse_query("I(X1,X2;Y|U)");
  EXPECT_EQ(q.kind, 'I');
  EXPECT_EQ(q.a, (std::vector<std::string>{"X1", "X2"}));
  EXPECT_EQ(q.b, (std::vector<std::string>{"Y"}));
  EXPECT_EQ(q.c, (std::vector<std::string>{"U"}));
  q = cli::parse_query(" H( A , B ) ");
  EXPECT_EQ(q.kind, 'H');
  EXPECT_EQ(q.a, (std::vector<std::string>{"A", "B"}));
  EXPECT_KIND(cli::parse_query("I(A)"), ErrorKind::ParseError);
  EXPECT_KIND(cli::parse_query("K(A;B)"), ErrorKind::ParseError);
  EXPECT_KIND(cli::parse_query("I(A;B"), ErrorKind::ParseError);
}

TEST(Cli, ParseAngle) {
  EXPECT_NEAR(cli::parse_angle("deg:90"), std::numbers::pi / 2, 1e-15);
  EXPECT_DOUBLE_EQ(cli::parse_angle("1.25"), 1.25);
  EXPECT_KIND(cli::parse_angle("deg:abc"), ErrorKind::ParseError);
}

TEST(Cli, InfoMatchesFactOne) {
  const auto r = run_cli({"info", "--example", "ex2", "--pmf", R"({"x1":[0.875,0.125],"x2":[1,0],"x3":[1,0]})", "--query",
                          "I(X1;Y1)"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["queries"][0]["value"].get<double>(), 0.4887060689542704, 1e-12);
}

TEST(Cli, InfoFromStateFile) {
  const auto p = temp_file("state.json", R"({
    "registers": [{"name": "A", "alphabet": 2}],
    "quantum": {"name": "B", "dim": 2},
    "points": [{"x": [0], "p": 0.5, "matrix_re": [1, 0, 0, 0]},
               {"x": [1], "p": 0.5, "matrix_re": [0, 0, 0, 1]}]})");
  const auto r = run_cli({"info", "--state", p.string(), "--query", "I(A;B)", "--query", "H(B|A)"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["queries"][0]["value"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(j["queries"][1]["value"].get<double>(), 0.0, 1e-12);
}

TEST(Cli, MalformedJsonExitsTwo) {
  const auto p = temp_file("bad.json", "{\"evaluator\": ");
  EXPECT_EQ(run_cli({"region", "--example", "ex1", "--config", p.string(), "--rates", "0.1,0.1,0.1"}).code, cli::kParse);
  EXPECT_EQ(run_cli({"info", "--example", "ex2", "--pmf", "{oops", "--query", "H(Y1)"}).code, cli::kParse);
  EXPECT_EQ(run_cli({"bogus-subcommand"}).code, cli::kParse);
  EXPECT_EQ(run_cli({"sim", "ex1"}).code, cli::kParse);  // --seed is required
}

TEST(Cli, RegionEvaluatesConfig) {
  regions::Thm1Config c;
  c.field = 2;
  c.p_x1 = Pmf::bernoulli(0.25);
  c.p_u2 = Pmf::uniform(2);
  c.p_u3 = Pmf::uniform(2);
  c.f2 = {0, 1};
  c.f3 = {0, 1};
  const auto p = temp_file("thm1.json", regions::config_to_json(c).dump());
  auto r = run_cli({"region", "--example", "ex1", "--delta1", "0.1", "--tau", "0.25", "--config", p.string(), "--rates",
                    "0.1,0.1,0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(nlohmann::json::parse(r.out)["feasible"].get<bool>());
  r = run_cli({"region", "--example", "ex1", "--delta1", "0.1", "--tau", "0.25", "--config", p.string(), "--rates",
               "0.9,0.1,0.1", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("label"), std::string::npos);
}

TEST(Cli, ScanOverCapExitsFour) {
  const auto r = run_cli({"scan", "--example", "ex2", "--r2", "0.1", "--r3", "0.1", "--scan-cap", "10"});
  EXPECT_EQ(r.code, cli::kBudget) << r.err;
}

TEST(Cli, SimIsByteIdenticalAndWritesManifest) {
  const auto out = fs::temp_directory_path() / "cqrl_test_sim.csv";
  const std::vector<std::string> args = {"sim", "ex1", "--seed", "5", "--n", "12", "--trials", "200", "--threads", "2"};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto with_file = args;
  with_file.push_back("--output");
  with_file.push_back(out.string());
  ASSERT_EQ(run_cli(with_file).code, 0);
  std::ifstream in(out);
  const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(file, a.out);
  std::ifstream man(out.string() + ".manifest.json");
  ASSERT_TRUE(man.good());
  const auto m = nlohmann::json::parse(man);
  EXPECT_EQ(m["command"], "sim");
  EXPECT_EQ(m["seed"], 5);
  EXPECT_EQ(m["exit_code"], 0);
  EXPECT_TRUE(m.contains("version"));
  EXPECT_TRUE(m.contains("parameters"));
}

TEST(Cli, TiltlabSrmAndHn) {
  auto r = run_cli({"tiltlab", "srm", "--seed", "1", "--phi", "deg:30"});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run_cli({"tiltlab", "hn", "--seed", "1", "--cases", "10", "--max-dim", "4"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Cli, ExampleVerdicts) {
  auto r = run_cli({"example", "ex2", "--no-scan"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["verdict"], "separation conditions hold (unstructured scan skipped)");
  r = run_cli({"example", "ex3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(nlohmann::json::parse(r.out).contains("theta_renamed"));
  EXPECT_EQ(run_cli({"example", "ex9"}).code, cli::kParse);
}

TEST(Cli, VerifySubsetPasses) {
  const auto r = run_cli({"verify", "--only", "1,5"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("[PASS]  1."), std::string::npos);
  EXPECT_NE(r.out.find("[PASS]  5."), std::string::npos);
}

TEST(Acceptance, IgnoresCustomTolerances) {
  Tolerances loose;
  loose.rate = 0.5;
  set_tolerances(loose);
  const auto res = cli::run_acceptance({{5}, 1});
  EXPECT_DOUBLE_EQ(tolerances().rate, 0.5);
  set_tolerances(Tolerances{});
  ASSERT_EQ(res.size(), 1u);
  EXPECT_TRUE(res[0].pass);
}
