#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "iterx/cli.hpp"

using namespace iterx;

namespace {

struct CliRun {
  int code;
  std::string out, err;
  io::Json json() const { return io::Json::parse(out); }
};

CliRun run(std::vector<std::string> args, const std::string& stdin_text = "") {
  std::ostringstream out, err;
  std::istringstream in(stdin_text);
  int code = run_command(args, out, err, in);
  return {code, out.str(), err.str()};
}

std::string sample(const std::string& name) { return std::string(ITERX_SAMPLES_DIR) + "/maps/" + name; }

std::string strip_timestamp(const std::string& s) {
  return std::regex_replace(s, std::regex(R"("timestamp"\s*:\s*"[^"]*")"), "\"timestamp\":\"\"");
}

}  // namespace

TEST(Cli, ApfExample43) {
  CliRun r = run({"apf", "--map", sample("example43.json"), "--depth", "3"});
  ASSERT_EQ(r.code, 0) << r.err << r.out;
  auto j = r.json();
  EXPECT_EQ(j["verdict"], "pass");
  auto cert = j["certificate"];
  EXPECT_EQ(cert["m"], 2);
  EXPECT_EQ(cert["r"], 6);
  EXPECT_EQ(cert["c"], 1);
  ASSERT_EQ(cert["levels"].size(), 3u);
  for (const auto& l : cert["levels"]) {
    EXPECT_EQ(l["slope"], "-1/64");
    EXPECT_EQ(l["norm_ok"], true);
  }
  EXPECT_EQ(cert["verdict"], "pass");
}

TEST(Cli, AnalyzeXSquaredMinusOne) {
  CliRun r = run({"analyze", "--map", sample("xsq_minus_1.json")});
  ASSERT_EQ(r.code, 0) << r.err << r.out;
  auto j = r.json();
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_EQ(j["pcf"]["verdict"], "PCF");
  auto orbits = j["pcf"]["orbits"];
  ASSERT_EQ(orbits.size(), 2u);
  EXPECT_EQ(orbits[0]["point"], "inf");
  EXPECT_EQ(orbits[0]["period"], 1);
  EXPECT_EQ(orbits[1]["point"], "0");
  EXPECT_EQ(orbits[1]["period"], 2);
}

TEST(Cli, VerifyRootsSquareMap) {
  CliRun r = run({"verify-roots", "--map", sample("xsq.json"), "--base", "2", "--m", "2", "--j", "1"});
  ASSERT_EQ(r.code, 0) << r.err << r.out;
  EXPECT_EQ(r.json()["verdict"], "pass");
}

TEST(Cli, OtherSubcommands) {
  EXPECT_EQ(run({"chebyshev", "--d", "2", "--base", "5", "--n", "1"}).code, 0);
  EXPECT_EQ(run({"lattes", "--a", "0", "--b", "1", "--d", "2", "--x0", "2", "--n", "1"}).code, 0);
  EXPECT_EQ(run({"ramification", "--cyclotomic", "2,3"}).code, 0);
}

TEST(Cli, MathematicalFailureExitsOne) {
  CliRun r = run({"apf", "--map", sample("xsq_plus_x_plus_1.json")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("NotPowerLikeWithin"), std::string::npos) << r.out;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"analyze", "--map", sample("does_not_exist.json")}).code, 2);
  EXPECT_EQ(run({"apf", "--map", sample("example43.json"), "--tolerance", "2"}).code, 2);
  EXPECT_EQ(run({"apf", "--map", sample("example43.json"), "--precision", "0"}).code, 2);
  EXPECT_EQ(run({"analyze", "--map", "-"}, "{\"num\": [0], \"den\": [1]}").code, 2);
  EXPECT_EQ(run({"analyze", "--map", "-"}, "not json").code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, DeterministicApartFromTimestamp) {
  std::vector<std::string> args{"apf", "--map", sample("xsq_plus_2.json"), "--depth", "3"};
  CliRun a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_NE(a.out.find("\"timestamp\""), std::string::npos);
  EXPECT_EQ(strip_timestamp(a.out), strip_timestamp(b.out));
  CliRun c = run({"analyze", "--map", sample("x4_minus_2x2.json")}), d = run({"analyze", "--map", sample("x4_minus_2x2.json")});
  EXPECT_EQ(strip_timestamp(c.out), strip_timestamp(d.out));
}

TEST(Cli, MapFromStdinMatchesFile) {
  std::ifstream f(sample("xsq_minus_1.json"));
  std::stringstream text;
  text << f.rdbuf();
  CliRun a = run({"analyze", "--map", "-"}, text.str());
  CliRun b = run({"analyze", "--map", sample("xsq_minus_1.json")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.json()["pcf"], b.json()["pcf"]);
  EXPECT_EQ(a.json()["critical"], b.json()["critical"]);
}

TEST(Cli, OutputFile) {
  std::string path = testing::TempDir() + "iterx_cli_report.json";
  CliRun r = run({"verify-roots", "--map", sample("xsq.json"), "--base", "2", "--m", "2", "--j", "1", "--output", path});
  ASSERT_EQ(r.code, 0);
  std::ifstream f(path);
  io::Json j = io::Json::parse(f);
  EXPECT_EQ(j["command"], "verify-roots");
}
