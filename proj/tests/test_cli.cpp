#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cli/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = ccesnet::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json read(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ccesnet_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& rel) const { return (dir_ / rel).string(); }
  fs::path dir_;
};

}  // namespace

TEST(Cli, VersionAndHelp) {
  auto v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find('.'), std::string::npos);
  auto h = run({"--help"});
  EXPECT_EQ(h.code, 0);
  for (const char* sub : {"ingest", "triangulate", "calibrate", "solve", "shock", "cluster", "report", "synth"}) {
    EXPECT_NE(h.out.find(sub), std::string::npos) << sub;
  }
  EXPECT_EQ(run({"shock", "--help"}).code, 0);
}

TEST(Cli, UsageErrorIsJson) {
  auto r = run({});
  EXPECT_EQ(r.code, 2);
  const auto e = json::parse(r.err);
  EXPECT_EQ(e.at("code"), "usage");
  for (const char* key : {"module", "message", "context"}) EXPECT_TRUE(e.contains(key)) << key;
}

TEST_F(CliTest, MissingDataIsIoError) {
  auto r = run({"ingest", "--data", path("nowhere"), "--out", path("o")});
  EXPECT_EQ(r.code, 11);
  const auto e = json::parse(r.err);
  EXPECT_EQ(e.at("code"), "io");
  EXPECT_EQ(e.at("module"), "io_data");
}

TEST_F(CliTest, UnknownConfigKeyRejected) {
  fs::create_directories(dir_);
  std::ofstream(path("bad.json")) << R"({"no_such_key": 1})";
  auto r = run({"synth", "--n", "5", "--config", path("bad.json"), "--out", path("s")});
  EXPECT_EQ(r.code, 10);
}

TEST_F(CliTest, TwoInputFixtureCalibrates) {
  ASSERT_EQ(run({"synth", "--fixture", "two-input", "--out", path("s")}).code, 0);
  ASSERT_EQ(run({"ingest", "--data", path("s"), "--config", path("s/config.json"), "--out", path("i")}).code, 0);
  auto c = run({"calibrate", "--input", path("i/two_state.json"), "--out", path("c")});
  ASSERT_EQ(c.code, 0) << c.err;
  const auto cal = read(path("c/calibration.json"));
  const json* out = nullptr;
  for (const auto& s : cal.at("sectors")) {
    if (s.at("sigmas").size() == 2) out = &s;
  }
  ASSERT_NE(out, nullptr);
  EXPECT_NEAR(out->at("theta").get<double>(), 0.9457, 1e-3);
  EXPECT_NEAR(out->at("sigmas")[0].get<double>(), 3.54, 0.01);
  EXPECT_NEAR(out->at("sigmas")[1].get<double>(), 1.88, 0.01);
}

TEST_F(CliTest, ManifestListsEveryOutput) {
  ASSERT_EQ(run({"synth", "--n", "12", "--seed", "3", "--out", path("s")}).code, 0);
  const auto m = read(path("s/manifest.json"));
  EXPECT_EQ(m.at("subcommand"), "synth");
  for (const char* key : {"version", "inputs", "config", "config_digest", "threads", "timestamps", "outputs"}) {
    EXPECT_TRUE(m.contains(key)) << key;
  }
  std::set<std::string> listed;
  for (const auto& o : m.at("outputs")) {
    listed.insert(o.at("file").get<std::string>());
    EXPECT_EQ(o.at("sha256").get<std::string>().size(), 64u);
    EXPECT_EQ(o.at("bytes").get<std::uintmax_t>(), fs::file_size(dir_ / "s" / o.at("file").get<std::string>()));
  }
  for (const auto& f : fs::directory_iterator(dir_ / "s")) {
    if (f.path().filename() != "manifest.json") EXPECT_TRUE(listed.count(f.path().filename().string())) << f.path();
  }
}

TEST_F(CliTest, UnitScenarioIsNeutral) {
  ASSERT_EQ(run({"synth", "--n", "10", "--seed", "4", "--out", path("s")}).code, 0);
  ASSERT_EQ(run({"ingest", "--data", path("s"), "--config", path("s/config.json"), "--out", path("i")}).code, 0);
  ASSERT_EQ(run({"calibrate", "--input", path("i/two_state.json"), "--out", path("c")}).code, 0);
  auto r = run({"shock", "--economy", path("c/calibration.json"), "--scenario", path("s/scenario_unit.json"),
                "--baseline", "both", "--out", path("w")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto w = read(path("w/welfare.json"));
  for (const char* baseline : {"cces", "leontief"}) {
    ASSERT_TRUE(w.contains(baseline)) << baseline;
    EXPECT_NEAR(w.at(baseline).at("delta_star").get<double>(), 1.0, 1e-12) << baseline;
    EXPECT_NEAR(w.at(baseline).at("delta_f").get<double>(), 0.0, 1e-9) << baseline;
  }
}

TEST_F(CliTest, UnknownScenarioSectorRejected) {
  ASSERT_EQ(run({"synth", "--n", "6", "--seed", "2", "--out", path("s")}).code, 0);
  ASSERT_EQ(run({"ingest", "--data", path("s"), "--config", path("s/config.json"), "--out", path("i")}).code, 0);
  ASSERT_EQ(run({"calibrate", "--input", path("i/two_state.json"), "--out", path("c")}).code, 0);
  std::ofstream(path("bogus.json")) << R"({"label": "x", "z": {"NOPE": 1.1}})";
  auto r = run({"shock", "--economy", path("c/calibration.json"), "--scenario", path("bogus.json"), "--out",
                path("w")});
  EXPECT_EQ(r.code, 10);
  EXPECT_EQ(json::parse(r.err).at("code"), "invalid_argument");
}
