#include <gtest/gtest.h>

#include "locauth/abe/attribute.hpp"
#include "locauth/protocol.hpp"
#include "oracle.hpp"

using namespace locauth;
using namespace locauth::protocol;

namespace {

constexpr std::int64_t kPeriod = 30000;
const char* kOfficePolicy = "firm:xyz AND dept:financial AND clearance > 3";

abe::AttributeSet attrs(std::vector<std::string> items) { return abe::parse_attribute_set(items); }

class ProtocolTest : public ::testing::Test {
 protected:
  void SetUp() override {
    auto [pk, msk] = abe::setup(128, rng);
    MasterSecret master{};
    master.fill(0x5a);
    service.emplace(pk, msk, master, ServiceConfig{kPeriod, 0});
    service->register_backend(b1, kOfficePolicy);
    service->register_backend(b2, kOfficePolicy);
    alice = service->register_user("alice", "pw1234",
                                   attrs({"firm:xyz", "dept:financial", "clearance=4"}), rng);
    bob = service->register_user("bob", "intern-pw", attrs({"intern", "clearance=2"}), rng);
  }

  ClientResult answer(const BroadcastMessage& msg, const Registration& who, std::string_view pw) {
    return client_handle_broadcast(msg, who.bundle, pw, service->params(), clock, kPeriod, rng);
  }

  LoginMessage login_for(const Registration& who, std::string_view pw, const BeaconId& at) {
    const auto msg = service->broadcast_step(at, clock, rng);
    auto res = answer(msg, who, pw);
    EXPECT_TRUE(std::holds_alternative<LoginMessage>(res));
    return std::get<LoginMessage>(res);
  }

  Rng rng = Rng::from_seed(99);
  ManualClock clock{10 * kPeriod + 5};
  BeaconId b1 = BeaconId::parse("00000000-0000-0000-0000-0000000000b1");
  BeaconId b2 = BeaconId::parse("00000000-0000-0000-0000-0000000000b2");
  std::optional<LocAuthService> service;
  Registration alice;
  Registration bob;
};

}  // namespace

TEST(ProtocolKeys, AuthHashAndKdfsMatchOracle) {
  SessionToken tok;
  for (std::size_t i = 0; i < tok.bytes.size(); ++i) tok.bytes[i] = static_cast<std::uint8_t>(i);
  Salt salt{};
  salt.fill(0xa0);
  const auto verifier = derive_verifier("correct horse", salt);
  const oracle::Buf tokb(tok.bytes.begin(), tok.bytes.end());
  const oracle::Buf saltb(salt.begin(), salt.end());
  const auto v_oracle = oracle::pbkdf2_sha256(oracle::buf("correct horse"), saltb, kPbkdf2Iterations);
  EXPECT_EQ(oracle::Buf(verifier.begin(), verifier.end()), v_oracle);

  const auto h = auth_hash(tok, verifier);
  EXPECT_EQ(oracle::Buf(h.begin(), h.end()), oracle::sha256(oracle::cat({tokb, oracle::Buf{0x1f}, v_oracle})));

  const auto ok = outer_key(tok);
  EXPECT_EQ(oracle::Buf(ok.begin(), ok.end()),
            oracle::hkdf_sha256(tokb, {}, oracle::buf("loc-auth/outer"), 32));
  CToken c;
  c.bytes = tok.bytes;
  const auto ik = inner_key(c);
  EXPECT_EQ(oracle::Buf(ik.begin(), ik.end()),
            oracle::hkdf_sha256(tokb, {}, oracle::buf("loc-auth/inner"), 32));
}

TEST_F(ProtocolTest, HappyPath) {
  const auto login = login_for(alice, "pw1234", b1);
  const auto res = service->verify_login(login.encode(), b1, clock);
  ASSERT_TRUE(res.authenticated());
  EXPECT_EQ(res.success().username, "alice");
  EXPECT_EQ(res.success().beacon, b1);
  EXPECT_EQ(res.success().period.value, 10u);
}

TEST_F(ProtocolTest, WireRoundTrip) {
  const auto msg = service->broadcast_step(b1, clock, rng);
  const auto wire = msg.encode();
  const auto back = BroadcastMessage::decode(wire);
  EXPECT_EQ(back.beacon, b1);
  EXPECT_EQ(back.encode(), wire);
  const auto login = login_for(alice, "pw1234", b1);
  EXPECT_EQ(LoginMessage::decode(login.encode()).encode(), login.encode());
  EXPECT_EQ(login.header().size(), kHeaderSize);
  EXPECT_ANY_THROW(LoginMessage::decode(Bytes(10)));
}

TEST_F(ProtocolTest, BroadcastTokenAndRandomization) {
  const auto m1 = service->broadcast_step(b1, clock, rng);
  const auto m2 = service->broadcast_step(b1, clock, rng);
  EXPECT_NE(m1.encode(), m2.encode());
  const auto p1 = abe::decrypt(service->params(), alice.bundle.key, m1.ciphertext);
  const auto p2 = abe::decrypt(service->params(), alice.bundle.key, m2.ciphertext);
  ASSERT_EQ(p1.size(), kBroadcastPayloadSize);
  EXPECT_EQ(p1, p2);
  clock.advance(kPeriod);
  const auto m3 = service->broadcast_step(b1, clock, rng);
  const auto p3 = abe::decrypt(service->params(), alice.bundle.key, m3.ciphertext);
  EXPECT_NE(Bytes(p1.begin(), p1.begin() + kTokenSize), Bytes(p3.begin(), p3.begin() + kTokenSize));
}

TEST_F(ProtocolTest, UnqualifiedUserStaysSilent) {
  const auto msg = service->broadcast_step(b1, clock, rng);
  const auto res = answer(msg, bob, "intern-pw");
  ASSERT_TRUE(std::holds_alternative<NoAction>(res));
  EXPECT_EQ(std::get<NoAction>(res).reason, NoActionReason::PolicyNotSatisfied);
}

TEST_F(ProtocolTest, TamperedBroadcastYieldsNoAction) {
  auto msg = service->broadcast_step(b1, clock, rng);
  msg.ciphertext.sealed[3] ^= 0x80;
  const auto res = answer(msg, alice, "pw1234");
  ASSERT_TRUE(std::holds_alternative<NoAction>(res));
  EXPECT_EQ(std::get<NoAction>(res).reason, NoActionReason::IntegrityFailure);
}

TEST_F(ProtocolTest, HeaderBindingIsChecked) {
  auto msg = service->broadcast_step(b1, clock, rng);
  msg.beacon = b2;
  auto res = answer(msg, alice, "pw1234");
  ASSERT_TRUE(std::holds_alternative<NoAction>(res));
  EXPECT_EQ(std::get<NoAction>(res).reason, NoActionReason::BindingMismatch);

  msg = service->broadcast_step(b1, clock, rng);
  msg.period.value += 1;
  res = answer(msg, alice, "pw1234");
  ASSERT_TRUE(std::holds_alternative<NoAction>(res));
  EXPECT_EQ(std::get<NoAction>(res).reason, NoActionReason::BindingMismatch);
}

TEST_F(ProtocolTest, RejectReasons) {
  // Next period: the token no longer matches.
  auto login = login_for(alice, "pw1234", b1);
  clock.advance(kPeriod);
  EXPECT_EQ(service->verify_login(login, b1, clock).reason(), RejectReason::TokenMismatch);

  // Delivered at a different beacon.
  login = login_for(alice, "pw1234", b1);
  EXPECT_EQ(service->verify_login(login, b2, clock).reason(), RejectReason::TokenMismatch);

  login = login_for(alice, "wrong", b1);
  EXPECT_EQ(service->verify_login(login, b1, clock).reason(), RejectReason::HashMismatch);

  auto forged = alice;
  forged.bundle.seed.fill(0);
  login = login_for(forged, "pw1234", b1);
  EXPECT_EQ(service->verify_login(login, b1, clock).reason(), RejectReason::CTokenMismatch);

  auto stranger = alice;
  stranger.bundle.username = "mallory";
  login = login_for(stranger, "pw1234", b1);
  EXPECT_EQ(service->verify_login(login, b1, clock).reason(), RejectReason::UnknownUser);

  login = login_for(alice, "pw1234", b1);
  const auto wire = login.encode();
  EXPECT_TRUE(service->verify_login(wire, b1, clock).authenticated());
  EXPECT_EQ(service->verify_login(wire, b1, clock).reason(), RejectReason::ReplayedNonce);

  EXPECT_EQ(service->verify_login(Bytes{0x01, 0x02, 0x03}, b1, clock).reason(),
            RejectReason::MalformedMessage);

  auto bad_header = login_for(alice, "pw1234", b1);
  bad_header.beacon = b2;
  EXPECT_EQ(service->verify_login(bad_header, b1, clock).reason(), RejectReason::TokenMismatch);
}

TEST_F(ProtocolTest, SkewWindowAcceptsPreviousPeriod) {
  auto [pk, msk] = abe::setup(128, rng);
  MasterSecret master{};
  LocAuthService lenient(pk, msk, master, ServiceConfig{kPeriod, 1});
  lenient.register_backend(b1, "firm:xyz");
  const auto reg = lenient.register_user("carol", "pw", attrs({"firm:xyz"}), rng);
  const auto msg = lenient.broadcast_step(b1, clock, rng);
  const auto login = std::get<LoginMessage>(
      client_handle_broadcast(msg, reg.bundle, "pw", lenient.params(), clock, kPeriod, rng));
  clock.advance(kPeriod);
  EXPECT_TRUE(lenient.verify_login(login, b1, clock).authenticated());
  EXPECT_TRUE(reg.weak_password);
}

TEST_F(ProtocolTest, OneBroadcastManyUsers) {
  const auto carol = service->register_user(
      "carol", "carol-pw", attrs({"firm:xyz", "dept:financial", "clearance=9"}), rng);
  const auto msg = service->broadcast_step(b1, clock, rng);
  const auto la = std::get<LoginMessage>(answer(msg, alice, "pw1234"));
  const auto lc = std::get<LoginMessage>(answer(msg, carol, "carol-pw"));
  EXPECT_EQ(service->verify_login(la, b1, clock).success().username, "alice");
  EXPECT_EQ(service->verify_login(lc, b1, clock).success().username, "carol");
}

TEST_F(ProtocolTest, RepliesAreRandomized) {
  const auto msg = service->broadcast_step(b1, clock, rng);
  const auto l1 = std::get<LoginMessage>(answer(msg, alice, "pw1234")).encode();
  const auto l2 = std::get<LoginMessage>(answer(msg, alice, "pw1234")).encode();
  EXPECT_NE(l1, l2);
}

TEST_F(ProtocolTest, NoSecretsOnTheWire) {
  const auto msg = service->broadcast_step(b1, clock, rng);
  const auto login = std::get<LoginMessage>(answer(msg, alice, "pw1234"));
  const auto* rec = service->registry().find("alice");
  ASSERT_NE(rec, nullptr);
  MasterSecret master{};
  master.fill(0x5a);
  for (const auto& wire : {msg.encode(), login.encode()}) {
    EXPECT_FALSE(contains_subsequence(wire, rec->seed));
    EXPECT_FALSE(contains_subsequence(wire, rec->verifier));
    EXPECT_FALSE(contains_subsequence(wire, master));
    EXPECT_FALSE(contains_subsequence(wire, as_bytes("pw1234")));
    EXPECT_FALSE(contains_subsequence(wire, as_bytes("alice")));
  }
}

TEST_F(ProtocolTest, RegistrationRules) {
  EXPECT_THROW(service->register_user("alice", "x", attrs({"a"}), rng), DuplicateUser);
  EXPECT_THROW(service->register_user("", "x", attrs({"a"}), rng), std::invalid_argument);
  EXPECT_THROW(service->register_user("dave", "x", {}, rng), std::invalid_argument);
  const auto weak = service->register_user("erin", "", attrs({"a"}), rng);
  EXPECT_TRUE(weak.weak_password);
  EXPECT_FALSE(alice.weak_password);
  const auto* rec = service->registry().find("alice");
  ASSERT_NE(rec, nullptr);
  EXPECT_EQ(rec->verifier, derive_verifier("pw1234", rec->salt));
  EXPECT_EQ(ClientBundle::deserialize(alice.bundle.serialize()).key, alice.bundle.key);
}

TEST_F(ProtocolTest, PolicyChangesOnTheFly) {
  const auto old_msg = service->broadcast_step(b1, clock, rng);
  service->register_backend(b1, "intern");
  const auto new_msg = service->broadcast_step(b1, clock, rng);
  EXPECT_EQ(new_msg.ciphertext.policy, abe::parse_policy("intern"));
  EXPECT_TRUE(std::holds_alternative<LoginMessage>(answer(old_msg, alice, "pw1234")));
  EXPECT_TRUE(std::holds_alternative<NoAction>(answer(new_msg, alice, "pw1234")));
  EXPECT_TRUE(std::holds_alternative<LoginMessage>(answer(new_msg, bob, "intern-pw")));
  EXPECT_THROW(service->register_backend(b1, ""), abe::PolicyError);
  EXPECT_THROW(service->broadcast_step(BeaconId::parse("ffffffffffffffffffffffffffffffff"), clock, rng),
               std::out_of_range);
}
