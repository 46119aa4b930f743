#include <gtest/gtest.h>

#include "locauth/sessions.hpp"

using namespace locauth;
using namespace locauth::sessions;

namespace {

const BeaconId kB1 = BeaconId::parse("000000000000000000000000000000b1");
const BeaconId kB2 = BeaconId::parse("000000000000000000000000000000b2");
const BeaconId kB9 = BeaconId::parse("000000000000000000000000000000b9");

protocol::Authenticated at(const std::string& user, const BeaconId& b) { return {user, b, {}}; }

AdjacencyGraph office_graph() {
  AdjacencyGraph g;
  g.add_edge(kB1, kB2);
  return g;
}

}  // namespace

TEST(Adjacency, SymmetricNoSelfLoops) {
  const auto g = office_graph();
  EXPECT_TRUE(g.adjacent(kB1, kB2));
  EXPECT_TRUE(g.adjacent(kB2, kB1));
  EXPECT_FALSE(g.adjacent(kB1, kB9));
  AdjacencyGraph h;
  EXPECT_THROW(h.add_edge(kB1, kB1), std::invalid_argument);
  h.add_edge(kB2, kB1);
  h.add_edge(kB1, kB2);
  EXPECT_EQ(h.edge_count(), 1u);
}

TEST(Sessions, EstablishSetsTtlAndReplaces) {
  SessionStore store;
  ManualClock clock(1000);
  const auto& s = store.establish(at("alice", kB1), clock);
  EXPECT_EQ(s.expires_at_ms, 1000 + 300000);
  EXPECT_TRUE(std::holds_alternative<FullLogin>(s.origin));
  clock.advance(10);
  store.establish(at("alice", kB2), clock);
  EXPECT_EQ(store.size(), 1u);
  EXPECT_EQ(store.lookup("alice", clock)->beacon, kB2);
}

TEST(Sessions, LookupHonoursExpiry) {
  SessionStore store(SessionConfig{5000, true});
  ManualClock clock(0);
  store.establish(at("alice", kB1), clock);
  clock.set(4999);
  EXPECT_TRUE(store.lookup("alice", clock));
  clock.set(5000);
  EXPECT_FALSE(store.lookup("alice", clock));
  EXPECT_FALSE(store.lookup("nobody", clock));
}

TEST(Sessions, TravelToAdjacentBeacon) {
  SessionStore store(SessionConfig{5000, true});
  ManualClock clock(0);
  store.establish(at("alice", kB1), clock);
  clock.set(3000);
  const auto r = store.travel(at("alice", kB2), office_graph(), clock);
  ASSERT_TRUE(std::holds_alternative<Session>(r));
  const auto& s = std::get<Session>(r);
  EXPECT_EQ(s.username, "alice");
  EXPECT_EQ(s.beacon, kB2);
  EXPECT_EQ(s.expires_at_ms, 8000);
  ASSERT_TRUE(std::holds_alternative<Traveled>(s.origin));
  EXPECT_EQ(std::get<Traveled>(s.origin).from, kB1);
}

TEST(Sessions, KeepaliveRefreshesExpiryOnly) {
  SessionStore store(SessionConfig{5000, true});
  ManualClock clock(0);
  store.establish(at("alice", kB1), clock);
  clock.set(4000);
  const auto r = store.travel(at("alice", kB1), office_graph(), clock);
  ASSERT_TRUE(std::holds_alternative<Session>(r));
  EXPECT_EQ(std::get<Session>(r).beacon, kB1);
  EXPECT_EQ(std::get<Session>(r).expires_at_ms, 9000);

  SessionStore fixed(SessionConfig{5000, false});
  fixed.establish(at("alice", kB1), clock);
  clock.set(6000);
  EXPECT_EQ(std::get<Session>(fixed.travel(at("alice", kB2), office_graph(), clock)).expires_at_ms,
            9000);
}

TEST(Sessions, TravelRejections) {
  SessionStore store(SessionConfig{5000, true});
  ManualClock clock(0);
  store.establish(at("alice", kB1), clock);
  auto r = store.travel(at("alice", kB9), office_graph(), clock);
  ASSERT_TRUE(std::holds_alternative<TravelRejected>(r));
  EXPECT_EQ(std::get<TravelRejected>(r).reason, TravelError::NonAdjacent);
  EXPECT_EQ(store.lookup("alice", clock)->beacon, kB1);

  clock.set(6000);
  r = store.travel(at("alice", kB2), office_graph(), clock);
  ASSERT_TRUE(std::holds_alternative<TravelRejected>(r));
  EXPECT_EQ(std::get<TravelRejected>(r).reason, TravelError::SessionExpired);

  r = store.travel(at("bob", kB2), office_graph(), clock);
  ASSERT_TRUE(std::holds_alternative<TravelRejected>(r));
  EXPECT_EQ(std::get<TravelRejected>(r).reason, TravelError::SessionExpired);
}

TEST(Sessions, RevokeAndSweep) {
  SessionStore store(SessionConfig{5000, true});
  ManualClock clock(0);
  EXPECT_TRUE(store.sweep_expired(clock).empty());
  store.establish(at("bob", kB1), clock);
  clock.set(2000);
  store.establish(at("alice", kB2), clock);
  clock.set(5000);
  auto gone = store.sweep_expired(clock);
  ASSERT_EQ(gone.size(), 1u);
  EXPECT_EQ(gone[0].username, "bob");
  EXPECT_EQ(store.size(), 1u);
  EXPECT_TRUE(store.revoke("alice"));
  EXPECT_FALSE(store.revoke("alice"));
  EXPECT_EQ(store.size(), 0u);
}
