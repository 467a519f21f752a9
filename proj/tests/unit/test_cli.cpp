#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / "gradplay_cli_tests" / info->name();
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string Dir(const std::string& name) const { return (root_ / name).string(); }

  Result Run(std::vector<std::string> args) const {
    std::ostringstream out, err;
    const int code = gradplay::cli::Run(args, out, err);
    return {code, out.str(), err.str()};
  }

  static std::string Slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static json ReadJson(const std::string& path) { return json::parse(Slurp(path)); }

  fs::path root_;
};

}  // namespace

TEST_F(CliTest, ClassifyExamples) {
  auto r = Run({"classify", "--family", "potential-quadratic", "--params", "a=1,b=2,c=1",
                "--out", Dir("a")});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = ReadJson(Dir("a") + "/classify.json");
  ASSERT_EQ(j["reports"].size(), 1u);
  EXPECT_EQ(j["reports"][0]["point"], json::array({0.0, 0.0}));
  EXPECT_TRUE(j["reports"][0]["flags"]["dne"].get<bool>());
  EXPECT_TRUE(j["reports"][0]["flags"]["strict_saddle"].get<bool>());
  EXPECT_TRUE(fs::exists(Dir("a") + "/classify.csv"));
  EXPECT_TRUE(fs::exists(Dir("a") + "/manifest.json"));

  r = Run({"classify", "--family", "zero-sum-quadratic", "--params", "a=2,b=2,c=1", "--out",
           Dir("b")});
  ASSERT_EQ(r.code, 0) << r.err;
  j = ReadJson(Dir("b") + "/classify.json");
  EXPECT_TRUE(j["reports"][0]["flags"]["lase"].get<bool>());
  EXPECT_FALSE(j["reports"][0]["flags"]["dne"].get<bool>());
}

TEST_F(CliTest, UsageErrors) {
  auto r = Run({"classify", "--family", "zero-sum-quadratic", "--params", "a=2,b2,c=1", "--out",
                Dir("a")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("b2"), std::string::npos);
  EXPECT_EQ(ReadJson(Dir("a") + "/manifest.json")["exit_code"], 2);

  EXPECT_EQ(Run({"classify", "--family", "nope", "--out", Dir("b")}).code, 2);
  EXPECT_EQ(Run({"classify", "--out", Dir("b")}).code, 2);
  EXPECT_EQ(Run({"frobnicate"}).code, 2);
  EXPECT_EQ(Run({}).code, 2);
  EXPECT_EQ(Run({"classify", "--bogus", "1", "--out", Dir("b")}).code, 2);
  EXPECT_EQ(Run({"simulate", "--family", "potential-quadratic", "--params", "a=1,b=2,c=1",
                 "--x0", "1,2,3", "--out", Dir("b")}).code, 2);
  EXPECT_EQ(Run({"simulate", "--family", "potential-quadratic", "--params", "a=1,b=2,c=1",
                 "--x0", "1,0", "--gamma", "-0.1", "--out", Dir("b")}).code, 2);
  EXPECT_EQ(Run({"check", "--tol", "0", "--out", Dir("b")}).code, 2);
  EXPECT_EQ(Run({"--version"}).code, 0);
  EXPECT_EQ(Run({"classify", "--help"}).code, 0);
}

TEST_F(CliTest, SeedsAreMandatoryForStochasticCommands) {
  const std::vector<std::string> game = {"--family", "potential-quadratic", "--params",
                                         "a=1,b=2,c=1"};
  auto with = [&](std::vector<std::string> head) {
    head.insert(head.end(), game.begin(), game.end());
    head.push_back("--out");
    head.push_back(Dir("x"));
    return head;
  };
  EXPECT_EQ(Run(with({"simulate", "--x0", "1,0", "--noise", "gaussian"})).code, 2);
  EXPECT_EQ(Run(with({"avoidance"})).code, 2);
  EXPECT_EQ(Run({"lq-census", "--samples", "5", "--out", Dir("x")}).code, 2);
  EXPECT_EQ(Run({"lq-sweep", "--samples", "5", "--out", Dir("x")}).code, 2);
}

TEST_F(CliTest, SimulateRotationNormGrows) {
  auto r = Run({"simulate", "--family", "zero-sum-quadratic", "--params", "a=0,b=1,c=0",
                "--x0", "1,0", "--gamma", "0.1", "--max-iters", "500", "--out", Dir("a")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(Slurp(Dir("a") + "/trajectory.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "t,x_1,x_2");
  double prev = -1.0;
  int rows = 0;
  while (std::getline(csv, line)) {
    double t, x1, x2;
    char c1, c2;
    std::istringstream row(line);
    row >> t >> c1 >> x1 >> c2 >> x2;
    const double norm = x1 * x1 + x2 * x2;
    EXPECT_GT(norm, prev);
    prev = norm;
    ++rows;
  }
  EXPECT_EQ(rows, 501);
}

TEST_F(CliTest, NonFiniteTrajectoryIsNumericalFailure) {
  auto r = Run({"simulate", "--family", "potential-quadratic", "--params", "a=1,b=2,c=1",
                "--x0", "1,0.5", "--gamma", "0.9", "--blowup", "inf", "--max-iters", "100000",
                "--out", Dir("a")});
  EXPECT_EQ(r.code, 4) << r.err;
  const json m = ReadJson(Dir("a") + "/manifest.json");
  EXPECT_EQ(m["exit_code"], 4);
  EXPECT_FALSE(m["error"].get<std::string>().empty());
}

TEST_F(CliTest, AvoidanceExample) {
  auto r = Run({"avoidance", "--family", "potential-quadratic", "--params", "a=1,b=2,c=1",
                "--radius", "0.1", "--trials", "1000", "--seed", "7", "--out", Dir("a")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = ReadJson(Dir("a") + "/avoidance.json");
  EXPECT_GE(j["avoidance_rate"].get<double>(), 0.999);
  EXPECT_TRUE(fs::exists(Dir("a") + "/avoidance_trials.csv"));

  r = Run({"avoidance", "--family", "potential-quadratic", "--params", "a=1,b=0.5,c=1",
           "--seed", "7", "--out", Dir("b")});
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, CycleCommand) {
  auto r = Run({"cycle", "--family", "van-der-pol", "--params", "mu=1", "--x0", "0.1,0",
                "--out", Dir("a")});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = ReadJson(Dir("a") + "/cycle.json");
  EXPECT_TRUE(j["detected"].get<bool>());
  EXPECT_EQ(j["cycle"]["classification"], "linearly_stable");
  r = Run({"cycle", "--family", "potential-quadratic", "--params", "a=1,b=0.5,c=1", "--x0",
           "1,0", "--out", Dir("b")});
  ASSERT_EQ(r.code, 0);
  EXPECT_FALSE(ReadJson(Dir("b") + "/cycle.json")["detected"].get<bool>());
}

TEST_F(CliTest, ReproducibleOutputsAndConfigRoundTrip) {
  const std::vector<std::string> args = {"lq-sweep", "--vary", "q", "--grid", "0.2,0.7",
                                         "--r", "0.1", "--samples", "30", "--repeats", "2",
                                         "--seed", "42", "--records"};
  auto a_args = args, b_args = args;
  a_args.insert(a_args.end(), {"--out", Dir("a")});
  b_args.insert(b_args.end(), {"--out", Dir("b")});
  ASSERT_EQ(Run(a_args).code, 0);
  ASSERT_EQ(Run(b_args).code, 0);
  const json ma = ReadJson(Dir("a") + "/manifest.json");
  const json mb = ReadJson(Dir("b") + "/manifest.json");
  EXPECT_EQ(ma["outputs"], mb["outputs"]);
  EXPECT_EQ(ma["outputs"].size(), 3u);
  for (const auto& [name, digest] : ma["outputs"].items()) {
    EXPECT_EQ(Slurp(Dir("a") + "/" + name), Slurp(Dir("b") + "/" + name));
    EXPECT_EQ(digest, gradplay::cli::FileSha256(Dir("a") + "/" + name));
  }
  std::istringstream csv(Slurp(Dir("a") + "/sweep.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "grid_value,mean_frequency,ci_low,ci_high,failures");

  // Re-running from the manifest alone reproduces the outputs.
  ASSERT_EQ(Run({"lq-sweep", "--config", Dir("a") + "/manifest.json", "--out", Dir("c")}).code, 0);
  EXPECT_EQ(ReadJson(Dir("c") + "/manifest.json")["outputs"], ma["outputs"]);
  // A manifest from another command is refused.
  EXPECT_EQ(Run({"lq-census", "--config", Dir("a") + "/manifest.json", "--out", Dir("d")}).code,
            2);
}

TEST_F(CliTest, FlagsOverrideConfig) {
  const std::string cfg = Dir("cfg.json");
  std::ofstream(cfg) << R"({"family": "zero-sum-quadratic", "params": "a=2,b=2,c=1",
                            "tol": 1e-6, "point": [0, 0]})";
  auto r = Run({"classify", "--config", cfg, "--params", "a=1,b=1,c=-1", "--out", Dir("a")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json m = ReadJson(Dir("a") + "/manifest.json");
  EXPECT_EQ(m["config"]["params"], "a=1,b=1,c=-1");
  EXPECT_EQ(m["config"]["tol"], 1e-6);
  const json j = ReadJson(Dir("a") + "/classify.json");
  EXPECT_TRUE(j["reports"][0]["flags"]["dne"].get<bool>());

  std::ofstream(Dir("bad.json")) << R"({"family": "zero-sum-quadratic", "warp": 3})";
  EXPECT_EQ(Run({"classify", "--config", Dir("bad.json"), "--out", Dir("b")}).code, 2);
  std::ofstream(Dir("broken.json")) << "{not json";
  EXPECT_EQ(Run({"classify", "--config", Dir("broken.json"), "--out", Dir("b")}).code, 2);
}

TEST_F(CliTest, InlineGameJson) {
  const std::string game =
      R"({"dims":[1,1],"costs":[[{"coef":0.5,"exp":[2,0]},{"coef":2,"exp":[1,1]}],)"
      R"([{"coef":0.5,"exp":[0,2]},{"coef":2,"exp":[1,1]}]],"label":"inline"})";
  auto r = Run({"classify", "--game-json", game, "--point", "0,0", "--out", Dir("a")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = ReadJson(Dir("a") + "/classify.json");
  EXPECT_TRUE(j["reports"][0]["flags"]["strict_saddle"].get<bool>());
}

TEST_F(CliTest, CensusCommand) {
  auto r = Run({"lq-census", "--q", "0.01", "--r", "0.1", "--samples", "60", "--seed", "3",
                "--records", "--out", Dir("a")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = ReadJson(Dir("a") + "/census.json");
  const auto& c = j["counts"];
  EXPECT_EQ(c["strict_saddle"].get<int>() + c["lase"].get<int>() +
                c["degenerate_or_failed"].get<int>(),
            60);
  std::istringstream lines(Slurp(Dir("a") + "/census_records.jsonl"));
  int n = 0;
  for (std::string line; std::getline(lines, line);) {
    const json rec = json::parse(line);
    EXPECT_TRUE(rec.contains("outcome"));
    ++n;
  }
  EXPECT_EQ(n, 60);
  EXPECT_EQ(Run({"lq-census", "--samples", "0", "--seed", "1", "--out", Dir("b")}).code, 2);
  EXPECT_EQ(Run({"lq-census", "--z0", "1,2", "--seed", "1", "--out", Dir("b")}).code, 2);
}

TEST_F(CliTest, CheckPasses) {
  auto r = Run({"check", "--out", Dir("a")});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_TRUE(ReadJson(Dir("a") + "/check.json")["all_passed"].get<bool>());
}
