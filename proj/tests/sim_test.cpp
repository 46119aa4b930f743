#include <gtest/gtest.h>

#include "criteria.hpp"
#include "locauth/sim/world.hpp"

using namespace locauth;
using namespace locauth::sim;
using criteria::select;

namespace {

nlohmann::json minimal() {
  return nlohmann::json::parse(R"({
    "schema": 1,
    "token": {"period_ms": 1000},
    "beacons": [{"id": "00000000-0000-0000-0000-000000000001", "name": "B1",
                 "x_m": 0, "y_m": 0, "policy": "a"}],
    "users": [{"username": "u", "password": "pw-1234", "attrs": ["a"],
               "trace": [{"t_ms": 0, "x_m": 3, "y_m": 4}]}],
    "duration_ms": 1500
  })");
}

void expect_rejected(const nlohmann::json& doc, const std::string& needle) {
  try {
    Scenario::from_json(doc);
    ADD_FAILURE() << "accepted: " << doc.dump();
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(Geometry, InterpolatesAndClamps) {
  const Trace tr = {{0, {0, 0}}, {1000, {10, 0}}};
  EXPECT_EQ(position_at(tr, 500), (Point2D{5, 0}));
  EXPECT_EQ(position_at(tr, -5), (Point2D{0, 0}));
  EXPECT_EQ(position_at(tr, 5000), (Point2D{10, 0}));
  EXPECT_THROW(validate_trace({}), std::invalid_argument);
  EXPECT_THROW(validate_trace({{5, {}}, {5, {}}}), std::invalid_argument);
}

TEST(Geometry, RangeIsInclusive) {
  EXPECT_TRUE(in_range({0, 0}, 10.0, {10, 0}));
  EXPECT_FALSE(in_range({0, 0}, 10.0, {10.0001, 0}));
  EXPECT_TRUE(in_range({0, 0}, 10.0, {0, 0}));
  EXPECT_DOUBLE_EQ(distance({0, 0}, {3, 4}), 5.0);
}

TEST(Scenario, ParsesDefaults) {
  const auto s = Scenario::from_json(minimal());
  EXPECT_EQ(s.period_ms, 1000);
  EXPECT_EQ(s.duration_us, 1'500'000);
  ASSERT_EQ(s.beacons.size(), 1u);
  EXPECT_EQ(s.beacons[0].interval_us, 102'400);
  EXPECT_DOUBLE_EQ(s.beacons[0].range_m, 10.0);
  EXPECT_EQ(s.fallback_misses, 3);
  EXPECT_EQ(Scenario::from_json(s.to_json()).to_json(), s.to_json());
}

TEST(Scenario, SchemaViolations) {
  auto doc = minimal();
  doc["schema"] = 2;
  expect_rejected(doc, "schema");

  doc = minimal();
  doc["surprise"] = true;
  expect_rejected(doc, "surprise");

  doc = minimal();
  doc.erase("duration_ms");
  expect_rejected(doc, "duration_ms");

  doc = minimal();
  doc["adjacency"] = nlohmann::json::array({nlohmann::json::array({"B1", "B7"})});
  expect_rejected(doc, "B7");

  doc = minimal();
  doc["beacons"][0]["policy"] = "a AND";
  expect_rejected(doc, "policy");

  doc = minimal();
  doc["users"][0]["trace"] = nlohmann::json::array();
  expect_rejected(doc, "trace");

  doc = minimal();
  doc["attacks"] = {{{"kind", "jam"}, {"area", "B1"}, {"channels", {0, 3}}, {"from_ms", 0}, {"to_ms", 1}}};
  expect_rejected(doc, "channel");

  doc = minimal();
  doc["beacons"].push_back({{"id", "00000000-0000-0000-0000-000000000002"}, {"name", "B2"},
                            {"x_m", 15}, {"y_m", 0}, {"policy", "a"}});
  doc["attacks"] = {{{"kind", "wormhole"}, {"from", "B1"}, {"to", "B2"}, {"record_at_ms", 0}}};
  expect_rejected(doc, "overlap");

  EXPECT_THROW(Scenario::parse("{not json"), ScenarioError);
}

TEST(World, SingleUserSinglePeriod) {
  const auto s = Scenario::from_json(minimal());
  auto doc = minimal();
  doc["duration_ms"] = 1000;
  const auto log = simulate(Scenario::from_json(doc), 3);
  EXPECT_EQ(log.count("Authenticated"), 1u);
  EXPECT_EQ(log.count("SessionEstablished"), 1u);
  EXPECT_EQ(log.count("RunComplete"), 1u);
  EXPECT_EQ(simulate(s, 3).count("Authenticated"), 2u);
}

TEST(World, UserOutOfRangeSeesNothing) {
  auto doc = minimal();
  doc["users"][0]["trace"] = {{{"t_ms", 0}, {"x_m", 10.0001}, {"y_m", 0}}};
  const auto log = simulate(Scenario::from_json(doc), 3);
  EXPECT_EQ(log.count("BroadcastDelivered"), 0u);
  EXPECT_EQ(log.count("LoginSent"), 0u);
  EXPECT_GT(log.count("BeaconTick"), 0u);

  doc["users"][0]["trace"] = {{{"t_ms", 0}, {"x_m", 10}, {"y_m", 0}}};
  EXPECT_GT(simulate(Scenario::from_json(doc), 3).count("LoginSent"), 0u);
}

TEST(World, DeterministicForSeedAndSensitiveToIt) {
  const auto s = Scenario::from_json(minimal());
  EXPECT_EQ(simulate(s, 5).to_jsonl(), simulate(s, 5).to_jsonl());
  EXPECT_NE(simulate(s, 5).to_jsonl(), simulate(s, 6).to_jsonl());
}

TEST(World, CausalityAndGeometry) {
  const auto s = Scenario::load(criteria::scenario_dir() / "office.json");
  const auto log = simulate(s, 1);
  std::int64_t last = 0;
  for (const auto& e : log.events()) {
    const auto t = e["t_us"].get<std::int64_t>();
    ASSERT_GE(t, last);
    last = t;
  }
  // Every login is sent from inside the range of the beacon it answers.
  for (const auto& e : select(log, "LoginSent")) {
    const auto t = e["t_us"].get<std::int64_t>();
    const auto& user = e["user"].get<std::string>() == "alice" ? s.users[0] : s.users[1];
    const auto& beacon = *std::find_if(s.beacons.begin(), s.beacons.end(),
                                       [&](const BeaconSpec& b) { return b.name == e["beacon"]; });
    EXPECT_TRUE(in_range(beacon.pos, beacon.range_m, position_at(user.trace, t)));
  }
}

TEST(World, KeepaliveAvoidsExpiry) {
  // One re-authentication per period, with a ttl longer than the period.
  auto doc = minimal();
  doc["session"] = {{"ttl_ms", 2500}};
  doc["duration_ms"] = 10000;
  const auto log = simulate(Scenario::from_json(doc), 4);
  EXPECT_EQ(log.count("SessionExpired"), 0u);
  EXPECT_EQ(log.count("SessionEstablished"), 1u);
  EXPECT_EQ(log.count("SessionRefreshed"), log.count("Authenticated") - 1);

  // Walking away lets the session lapse.
  doc["users"][0]["trace"] = {{{"t_ms", 0}, {"x_m", 3}, {"y_m", 4}},
                              {{"t_ms", 1500}, {"x_m", 3}, {"y_m", 4}},
                              {{"t_ms", 1501}, {"x_m", 50}, {"y_m", 0}}};
  const auto away = simulate(Scenario::from_json(doc), 4);
  ASSERT_EQ(away.count("SessionExpired"), 1u);
  const auto last_auth_ms = select(away, "Authenticated").back()["t_us"].get<std::int64_t>() / 1000;
  EXPECT_EQ(select(away, "SessionExpired").front()["t_us"], (last_auth_ms + 2500) * 1000);
}

TEST(World, RunIsOneShot) {
  const auto s = Scenario::from_json(minimal());
  World w(s, provision(s, 1), 1);
  w.run(100'000);
  EXPECT_THROW(w.run(200'000), std::logic_error);
}

TEST(EventLog, JsonlRoundTrip) {
  const auto log = simulate(Scenario::from_json(minimal()), 1);
  const auto text = log.to_jsonl();
  EXPECT_EQ(EventLog::from_jsonl(text).to_jsonl(), text);
  EXPECT_THROW(EventLog::from_jsonl("{\"t_us\":0}\nnope\n"), std::invalid_argument);
}
