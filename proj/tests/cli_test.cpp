#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "criteria.hpp"

namespace fs = std::filesystem;
using criteria::run_cli;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("locauth-cli-" + std::to_string(::getpid()) + "-" +
           ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string q(const fs::path& p) const { return "'" + p.string() + "'"; }
  std::string scenario(const char* name) const { return q(criteria::scenario_dir() / name); }

  fs::path dir;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_F(CliTest, VectorsMatchOracleAndDocs) {
  const auto [code, out] = run_cli("vectors");
  EXPECT_EQ(code, 0);
  EXPECT_EQ(out, criteria::oracle_vectors());
  EXPECT_EQ(run_cli("vectors").second, out);
  const auto doc = slurp(fs::path(LOCAUTH_DOCS_DIR) / "vectors.md");
  EXPECT_NE(doc.find("```\n" + out + "```"), std::string::npos);
}

TEST_F(CliTest, SetupRefusesOverwrite) {
  const auto ks = dir / "ks";
  EXPECT_EQ(run_cli("setup --out " + q(ks) + " --seed 1").first, 0);
  EXPECT_EQ(run_cli("setup --out " + q(ks) + " --seed 2").first, 3);
  EXPECT_EQ(run_cli("setup --out " + q(ks) + " --seed 2 --force").first, 0);
}

TEST_F(CliTest, RegisterAndRunWithKeystore) {
  const auto ks = dir / "ks";
  ASSERT_EQ(run_cli("setup --out " + q(ks) + " --seed 1").first, 0);
  const std::string alice =
      "register --keystore " + q(ks) +
      " --user alice --password tulip-7 --attr firm:xyz --attr dept:financial --attr clearance=5 --seed 2";
  EXPECT_EQ(run_cli(alice).first, 0);
  EXPECT_EQ(run_cli(alice).first, 2);  // duplicate
  EXPECT_EQ(run_cli("register --keystore " + q(ks) +
                    " --user bob --password river-2 --attr firm:xyz --attr role:intern --attr clearance=2")
                .first,
            0);

  const auto log = dir / "office.jsonl";
  const auto [code, out] = run_cli("run " + scenario("office.json") + " --keystore " + q(ks) +
                                   " --out " + q(log));
  EXPECT_EQ(code, 0);
  EXPECT_NE(out.find("logins succeeded:     3"), std::string::npos);
  const auto events = locauth::sim::EventLog::read(log);
  EXPECT_EQ(criteria::select(events, "Authenticated", {{"user", "alice"}}).size(), 3u);
  EXPECT_TRUE(criteria::select(events, "LoginSent", {{"user", "bob"}}).empty());

  // A scenario user missing from the registry is an input error.
  EXPECT_EQ(run_cli("run " + scenario("wormhole.json") + " --keystore " + q(ks)).first, 2);
}

TEST_F(CliTest, RunExitCodes) {
  EXPECT_EQ(run_cli("run " + scenario("office.json")).first, 0);
  EXPECT_EQ(run_cli("run " + scenario("replay.json")).first, 0);

  const auto bad = dir / "bad.json";
  std::ofstream(bad) << "{\"schema\": 1, \"beacons\": [";
  EXPECT_EQ(run_cli("run " + q(bad)).first, 2);
  std::ofstream(bad) << "{\"schema\": 9}";
  EXPECT_EQ(run_cli("run " + q(bad)).first, 2);
  EXPECT_EQ(run_cli("run " + q(dir / "missing.json")).first, 2);
  EXPECT_EQ(run_cli("frobnicate").first, 2);
}

TEST_F(CliTest, AttackGames) {
  for (const char* delta : {"1", "5000", "50000"}) {
    const auto [code, out] = run_cli("attack replay " + scenario("replay.json") + " --delta-ms " + delta);
    EXPECT_EQ(code, 0) << delta;
    EXPECT_NE(out.find("overall replay: Pass"), std::string::npos) << out;
  }
  EXPECT_EQ(run_cli("attack wormhole " + scenario("wormhole.json")).first, 0);
  EXPECT_EQ(run_cli("attack dos " + scenario("dos.json")).first, 0);
  EXPECT_EQ(run_cli("attack dos " + scenario("office.json")).first, 2);
}

TEST_F(CliTest, PolicyCheck) {
  const std::string policy = "--policy 'firm:xyz AND dept:financial AND clearance > 3'";
  EXPECT_EQ(run_cli("policy-check " + policy + " --attr firm:xyz --attr dept:financial --attr clearance=4").first, 0);
  EXPECT_EQ(run_cli("policy-check " + policy + " --attr intern --attr clearance=2").first, 1);
  EXPECT_EQ(run_cli("policy-check --policy 'a AND' --attr a").first, 2);
}
