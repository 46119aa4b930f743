#include <gtest/gtest.h>

#include "criteria.hpp"
#include "locauth/adversary.hpp"
#include "locauth/report.hpp"
#include "locauth/sim/world.hpp"

using namespace locauth;
using namespace locauth::adversary;
using criteria::select;

namespace {

sim::Scenario load(const std::string& name) {
  return sim::Scenario::load(criteria::scenario_dir() / name);
}

}  // namespace

TEST(Adversary, ReplayPastExpiryPasses) {
  const auto run = run_replay_game(load("replay.json"), 1000, 1);
  EXPECT_TRUE(run.outcome.passed()) << run.outcome.reason;
  ASSERT_EQ(run.attacks.size(), 1u);
  EXPECT_FALSE(run.attacks[0].control);
  EXPECT_FALSE(run.attacks[0].extension);
  EXPECT_EQ(exit_code(run.log), 0);
  EXPECT_EQ(run.log.count("GameVerdict"), 1u);
}

TEST(Adversary, InWindowReplayIsAControl) {
  const auto log = sim::simulate(load("controls.json"), 1);
  const auto verdicts = evaluate(log);
  ASSERT_EQ(verdicts.size(), 1u);
  EXPECT_TRUE(verdicts[0].passed()) << verdicts[0].reason;
  EXPECT_TRUE(verdicts[0].control);
  EXPECT_TRUE(verdicts[0].extension);
  EXPECT_FALSE(select(log, "Authenticated", {{"user", "carol"}, {"trigger", "attack:0"}}).empty());
  EXPECT_FALSE(select(log, "Rejected", {{"origin", "attack:0"}, {"reason", "ReplayedNonce"}}).empty());
}

TEST(Adversary, AttackerHoldsNoKeysAndNeverDecrypts) {
  // The attacker only records and re-sends bytes; no attacker-origin login
  // ever authenticates across every shipped scenario.
  for (const char* name : {"replay.json", "controls.json", "wormhole.json", "dos.json"}) {
    const auto log = sim::simulate(load(name), 2);
    for (const auto& e : select(log, "Authenticated")) {
      EXPECT_FALSE(e["origin"].get<std::string>().starts_with("attack:")) << name;
    }
    EXPECT_EQ(log.count("InvariantViolation"), 0u) << name;
  }
}

TEST(Adversary, VerdictIsDerivedFromTheLog) {
  auto run = run_replay_game(load("replay.json"), 1000, 1);
  sim::EventLog forged;
  bool changed = false;
  for (auto e : run.log.events()) {
    if (e["kind"] == "GameVerdict") continue;
    if (!changed && e["kind"] == "Rejected" && e["origin"] == "attack:0") {
      e["kind"] = "Authenticated";
      e["user"] = "alice";
      e.erase("reason");
      changed = true;
    }
    forged.push(e);
  }
  ASSERT_TRUE(changed);
  const auto verdicts = evaluate(forged);
  ASSERT_EQ(verdicts.size(), 1u);
  EXPECT_FALSE(verdicts[0].passed());
  judge(forged);
  EXPECT_EQ(exit_code(forged), 1);
}

TEST(Adversary, ExitCodeFromLog) {
  sim::EventLog log;
  log.append(0, "BeaconTick");
  EXPECT_EQ(exit_code(log), 0);
  log.append(5, "InvariantViolation");
  EXPECT_EQ(exit_code(log), 1);

  sim::EventLog failing;
  GameOutcome out;
  out.game = GameKind::Dos;
  out.verdict = Verdict::Fail;
  out.reason = "synthetic";
  failing.push(out.to_event(10));
  EXPECT_EQ(exit_code(failing), 1);
  EXPECT_EQ(failing.events()[0]["kind"], "GameVerdict");
}

TEST(Adversary, MisSpecifiedGames) {
  EXPECT_THROW(run_replay_game(load("office.json"), 1000, 1), sim::ScenarioError);
  EXPECT_THROW(run_wormhole_game(load("office.json"), 1), sim::ScenarioError);
  EXPECT_THROW(run_dos_game(load("replay.json"), 1), sim::ScenarioError);
}

TEST(Adversary, WormholeAfterWindowFailsForTheReplayReason) {
  auto s = load("wormhole.json");
  s.attacks.resize(1);
  std::get<sim::WormholeAttack>(s.attacks[0]).tunnel_delay_us = s.period_ms * 1000;
  const auto run = run_wormhole_game(s, 1);
  EXPECT_TRUE(run.outcome.passed()) << run.outcome.reason;
  const auto tunneled = select(run.log, "AttackTunneled");
  ASSERT_FALSE(tunneled.empty());
  for (const auto& e : tunneled) EXPECT_GT(e["current_period"], e["period"]);
  for (const auto& e : select(run.log, "Rejected", {{"origin", "attack:0"}})) {
    EXPECT_EQ(e["reason"], "TokenMismatch");
  }
}

TEST(Report, SummaryMatchesLog) {
  auto log = sim::simulate(load("office.json"), 1);
  judge(log);
  const auto s = summarize(log);
  EXPECT_EQ(s.authenticated, log.count("Authenticated"));
  EXPECT_EQ(s.logins_sent, log.count("LoginSent"));
  EXPECT_EQ(s.sessions_established, log.count("SessionEstablished"));
  EXPECT_NE(render_summary(s).find("logins succeeded:     " + std::to_string(s.authenticated)), std::string::npos);
}

TEST(Criteria, Office) {
  const auto r = criteria::office_happy_path();
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Criteria, Travel) {
  const auto r = criteria::mobility_travel();
  EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Criteria, Ticks) {
  const auto r = criteria::tick_timing();
  EXPECT_TRUE(r.ok) << r.detail;
}
