#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "heis/runner.hpp"

using namespace heis;
namespace fs = std::filesystem;

namespace {

class RunnerTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("heis_runner_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }

  // Runs, then checks that every artifact carries the hash and the manifest lists it.
  RunResult run(const std::string& sub, std::map<std::string, std::string> v, const std::string& out) {
    v["out_dir"] = path(out);
    const config::ExperimentConfig cfg(sub, v);
    std::ostringstream log;
    const auto r = run_experiment(cfg, log);
    EXPECT_EQ(r.config_hash, cfg.hash());
    for (const auto& f : r.outputs) {
      const auto p = dir_ / out / f;
      if (p.extension() == ".json") {
        EXPECT_EQ(io::json::parse(slurp(p)).at("config_hash"), r.config_hash) << f;
      } else if (p.extension() == ".csv") {
        std::ifstream in(p);
        EXPECT_EQ(io::csv_config_hash(in), r.config_hash) << f;
      }
    }
    const auto m = io::json::parse(slurp(dir_ / out / "manifest.json"));
    EXPECT_EQ(m.at("config_hash"), r.config_hash);
    EXPECT_EQ(m.at("subcommand"), sub);
    EXPECT_EQ(m.at("outputs").size(), r.outputs.size());
    EXPECT_TRUE(m.contains("wall_time"));
    EXPECT_TRUE(m.at("versions").contains("heis"));
    EXPECT_EQ(config::parse_one(m.at("config").get<std::string>()), cfg);
    return r;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(RunnerTest, BallTextAndBinary) {
  run("ball", {{"R", "2"}}, "t");
  std::ifstream t(path("t/ball.csv"));
  EXPECT_EQ(io::read_ball_text(t), io::ball_records(word_ball(2)));
  run("ball", {{"R", "1"}, {"group", "h3"}, {"format", "binary"}}, "b");
  std::ifstream b(path("b/ball.bin"), std::ios::binary);
  EXPECT_EQ(io::read_ball_binary(b).size(), 5u);
  EXPECT_THROW(run("ball", {{"R", "1"}, {"format", "xml"}}, "x"), DomainError);
  EXPECT_THROW(run("ball", {{"R", "6"}, {"cap", "100"}}, "c"), ResourceError);
}

TEST_F(RunnerTest, PerimeterFromFamilyAndFile) {
  run("perimeter", {{"set", "singleton"}}, "a");
  const auto j = io::json::parse(slurp(dir_ / "a" / "perimeter.json"));
  EXPECT_EQ(j.at("h_perim"), 8);
  EXPECT_NEAR(j.at("v_perim_hi").get<double>(), 2.5651, 1e-4);
  write("set.csv", "a,b,c,d,e\n0,0,0,0,0\n0,0,0,0,1\n");
  run("perimeter", {{"set", path("set.csv")}}, "b");
  EXPECT_EQ(io::json::parse(slurp(dir_ / "b" / "perimeter.json")).at("size"), 2);
}

TEST_F(RunnerTest, IsoScanIsDeterministic) {
  std::map<std::string, std::string> v{{"max_ball", "2"}, {"random_count", "10"}, {"seed", "7"}};
  run("iso-scan", v, "a");
  run("iso-scan", v, "b");
  EXPECT_EQ(slurp(dir_ / "a" / "scan.csv"), slurp(dir_ / "b" / "scan.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "scan_summary.json"), slurp(dir_ / "b" / "scan_summary.json"));
  const auto s = io::json::parse(slurp(dir_ / "a" / "scan_summary.json"));
  EXPECT_GT(s.at("sets").get<int>(), 10);
}

TEST_F(RunnerTest, PoincareGlobalAndLocal) {
  write("phi.json", R"({"cuts": [{"weight": 1, "points": [[0,0,0,0,0]]}]})");
  run("poincare", {{"phi", path("phi.json")}}, "g");
  const auto j = io::json::parse(slurp(dir_ / "g" / "poincare.json"));
  EXPECT_EQ(j.at("rhs"), 16.0);
  write("bad.json", "{not json");
  EXPECT_THROW(run("poincare", {{"phi", path("bad.json")}}, "x"), DomainError);
  EXPECT_THROW(run("poincare", {{"phi", path("phi.json")}, {"mode", "sideways"}}, "y"), DomainError);
}

TEST_F(RunnerTest, CriterionValue) {
  run("criterion", {{"omega", "linear:D=2"}, {"R", "100"}}, "a");
  const auto j = io::json::parse(slurp(dir_ / "a" / "criterion.json"));
  EXPECT_NEAR(j.at("value").get<double>(), std::log(50.0) / 4, 1e-8);
}

TEST_F(RunnerTest, MetricCommands) {
  write("k23.txt", "5\n0 2 1 1 1\n2 0 1 1 1\n1 1 0 2 2\n1 1 2 0 2\n1 1 2 2 0\n");
  run("c1", {{"metric", path("k23.txt")}}, "c");
  EXPECT_NEAR(io::json::parse(slurp(dir_ / "c" / "certificate.json")).at("c1").get<double>(), 4.0 / 3, 1e-9);
  run("negtype", {{"metric", path("k23.txt")}}, "n");
  const auto n = io::json::parse(slurp(dir_ / "n" / "negtype.json"));
  EXPECT_FALSE(n.at("negative_type").get<bool>());
  EXPECT_GT(n.at("witness_form").get<double>(), 0);
  write("c4.txt", "4\n0 1 1 0\n1 0 0 1\n1 0 0 1\n0 1 1 0\n\n0 1 1 1\n1 0 1 1\n1 1 0 1\n1 1 1 0\n");
  run("gap", {{"instance", path("c4.txt")}}, "g");
  const auto g = io::json::parse(slurp(dir_ / "g" / "gap.json"));
  EXPECT_NEAR(g.at("opt").get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(g.at("sdp").get<double>(), 0.5, 1e-7);
  write("short.txt", "3\n0 1\n");
  EXPECT_THROW(run("c1", {{"metric", path("short.txt")}}, "x"), DomainError);
}

TEST_F(RunnerTest, HeisGap) {
  run("heis-gap", {{"R", "1"}}, "a");
  const auto j = io::json::parse(slurp(dir_ / "a" / "heis_gap.json"));
  EXPECT_EQ(j.at("n"), 5);
  EXPECT_TRUE(j.contains("c1"));
  EXPECT_THROW(run("heis-gap", {{"R", "2"}, {"group", "h5"}}, "b"), CapabilityError);
}

TEST_F(RunnerTest, VbarAndLipgraphAreDeterministic) {
  std::map<std::string, std::string> v{{"region", "zslab:0.5"}, {"budget", "2000"}, {"s_min", "-4"}};
  run("vbar", v, "a");
  v["threads"] = "1";
  run("vbar", v, "b");
  EXPECT_EQ(slurp(dir_ / "a" / "curve.csv"), slurp(dir_ / "b" / "curve.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "vbar.json"), slurp(dir_ / "b" / "vbar.json"));
  std::ifstream in(path("a/curve.csv"));
  EXPECT_EQ(io::read_curve_csv(in).size(), 1u + 4 * 7);  // [−4, log₂ 8], step 1/4
  std::map<std::string, std::string> w{{"family", "sinusoid:0.3,1"}, {"r", "1"}, {"calibrate", "0.3"},
                                       {"budget", "2000"}, {"lip_budget", "2000"}};
  run("lipgraph", w, "c");
  const auto j = io::json::parse(slurp(dir_ / "c" / "lipgraph.json"));
  EXPECT_NEAR(j.at("lambda_hat").get<double>(), 0.3, 1e-9);
  EXPECT_TRUE(j.at("slice").at("within").get<bool>());
  w["calibrate"] = "0.5";
  w["family"] = "zero";
  EXPECT_THROW(run("lipgraph", w, "d"), DomainError);
}
