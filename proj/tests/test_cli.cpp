#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rockland/cli.hpp"

using namespace rockland;

namespace {

std::string model(const std::string& name) { return std::string(ROCKLAND_MODELS_DIR) + "/" + name + ".rk"; }

struct Run {
  int status;
  std::string out, err;
};

Run run(const std::string& cmd, CliOptions o) {
  std::ostringstream out, err;
  int s = run_command(cmd, o, out, err);
  return {s, out.str(), err.str()};
}

CliOptions with_model(const std::string& name) {
  CliOptions o;
  o.model_path = model(name);
  return o;
}

nlohmann::ordered_json read_json(const std::string& path) {
  std::ifstream in(path);
  return nlohmann::ordered_json::parse(in);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("rockland_test_" + name)).string();
}

}  // namespace

TEST(Cli, AnalyzeChainOnFiveCoordinates) {
  auto o = with_model("chain5");
  o.json_path = temp_path("chain5.json");
  auto r = run("analyze", o);
  EXPECT_EQ(r.status, 0) << r.err;
  auto j = read_json(o.json_path);
  EXPECT_EQ(j["dimensions"]["q"], 15);
  EXPECT_EQ(j["dimensions"]["N"], 6);
  EXPECT_EQ(j["dimensions"]["step"], 5);
  EXPECT_EQ(j["dimensions"]["p"], 1);
  EXPECT_EQ(j["schema"], "1");
  EXPECT_NE(r.out.find("q = 15"), std::string::npos);
}

TEST(Cli, AnalyzeShearAndQuadraticChain) {
  auto a = run("analyze", with_model("monomial_shear_k2_h1"));
  EXPECT_NE(a.out.find("degrees = X1:1 X2:1"), std::string::npos);
  EXPECT_NE(a.out.find("q = 4"), std::string::npos);
  auto b = run("analyze", with_model("quadratic_chain_k1"));
  EXPECT_NE(b.out.find("q = 8"), std::string::npos);
  auto k = run("analyze", with_model("kolmogorov"));
  EXPECT_NE(k.out.find("degrees = X1:1 X0:2"), std::string::npos);
  EXPECT_EQ(k.status, 0);
}

TEST(Cli, GammaRefusesWithoutExistence) {
  for (const char* name : {"quartic_shear_k1", "quartic_shear_k2"}) {
    auto r = run("gamma", with_model(name));
    EXPECT_EQ(r.status, 2) << name;
    EXPECT_NE(r.err.find("requires nu < q"), std::string::npos) << r.err;
  }
}

TEST(Cli, LiftGrushin) {
  auto o = with_model("grushin");
  o.json_path = temp_path("lift.json");
  auto r = run("lift", o);
  EXPECT_EQ(r.status, 0) << r.out;
  auto j = read_json(o.json_path);
  EXPECT_EQ(j["dimensions"]["Q"], 4);
  EXPECT_GE(j["checks"].size(), 12u);
  for (const auto& c : j["checks"]) EXPECT_EQ(c["status"], "pass") << c["name"];
  // keys keep their documented order
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"schema", "command", "model", "dimensions", "settings", "checks", "results",
                                            "artifacts", "passed"}));
}

TEST(Cli, HeatAndDistance) {
  auto h = run("heat", with_model("grushin_quartic"));
  EXPECT_EQ(h.status, 0) << h.out;
  EXPECT_NE(h.out.find("q' = 7"), std::string::npos);
  auto o = with_model("grushin");
  o.at = {"0,0;1,0"};
  o.csv_path = temp_path("dist.csv");
  auto d = run("distance", o);
  EXPECT_EQ(d.status, 0);
  std::ifstream csv(o.csv_path);
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_EQ(header, "pair,upper,lower,certified_lower,segments,stagnated");
  EXPECT_NEAR(std::stod(row.substr(row.find(',') + 1)), 1.0, 1e-3);
}

TEST(Cli, BadInputsAreReported) {
  CliOptions o;
  o.model_path = temp_path("bad.rk");
  {
    std::ofstream f(o.model_path);
    f << "dilation [1,2];\nfield X = x1^(1/2)*d2;\n";
  }
  auto r = run("analyze", o);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("line 2, column 14"), std::string::npos) << r.err;
  auto p = with_model("grushin");
  p.at = {"1,2,3;0,0"};
  EXPECT_EQ(run("distance", p).status, 2);
}

TEST(Cli, EmptyAndFailingReports) {
  Report empty("report");
  auto j = empty.to_json();
  EXPECT_TRUE(j["checks"].empty());
  EXPECT_TRUE(j["passed"]);
  EXPECT_EQ(nlohmann::json::parse(empty.dump()), nlohmann::json::parse(j.dump()));

  Report bad("verify");
  bad.add_check(CheckResult::numeric("residual", 2e-3, 1e-3, 9));
  auto b = bad.to_json();
  EXPECT_EQ(b["checks"][0]["status"], "fail");
  EXPECT_GT(b["checks"][0]["residual"].get<double>(), b["checks"][0]["tolerance"].get<double>());
  EXPECT_EQ(b["checks"][0]["seed"], 9);
  EXPECT_EQ(bad.exit_status(), 1);
}

TEST(Cli, GrushinFullPipeline) {
  auto o = with_model("grushin");
  o.json_path = temp_path("report.json");
  auto r = run("report", o);
  EXPECT_EQ(r.status, 0) << r.out << r.err;
  auto j = read_json(o.json_path);
  EXPECT_GE(j["checks"].size(), 12u);
  for (const auto& c : j["checks"]) EXPECT_EQ(c["status"], "pass") << c["name"];
  EXPECT_EQ(j["settings"]["flags"]["seed"], 7);

  // the same identities with an impossible tolerance fail and set the exit status
  auto v = with_model("grushin");
  v.tol = 1e-30;
  v.skip_left_inverse = true;
  auto f = run("verify", v);
  EXPECT_EQ(f.status, 1);
  EXPECT_NE(f.out.find("FAIL kernel_calibration"), std::string::npos) << f.out;
}
