#include <gtest/gtest.h>

#include <set>

#include "locauth/tokens.hpp"
#include "oracle.hpp"

using namespace locauth;

namespace {

MasterSecret fixed_master() {
  MasterSecret m{};
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<std::uint8_t>(i);
  return m;
}

oracle::Buf to_buf(ByteView v) { return oracle::Buf(v.begin(), v.end()); }

}  // namespace

TEST(BeaconId, ParsesUuidAndBareHex) {
  const auto a = BeaconId::parse("00112233-4455-6677-8899-AABBCCDDEEFF");
  const auto b = BeaconId::parse("00112233445566778899aabbccddeeff");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.to_string(), "00112233-4455-6677-8899-aabbccddeeff");
  EXPECT_ANY_THROW(BeaconId::parse("0011"));
  EXPECT_ANY_THROW(BeaconId::parse("00112233-4455-6677-8899-aabbccddeefg"));
}

TEST(Tokens, SessionTokenMatchesOracle) {
  const auto master = fixed_master();
  const auto beacon = BeaconId::parse("00112233-4455-6677-8899-aabbccddeeff");
  for (std::uint64_t p : {0ull, 1ull, 56666666ull, (1ull << 32) + 5}) {
    const auto tok = derive_session_token(master, beacon, PeriodIndex{p});
    const auto expect = oracle::truncate(
        oracle::hmac_sha256(to_buf(master), oracle::cat({to_buf(beacon.bytes()), oracle::be64(p)})),
        16);
    EXPECT_EQ(to_buf(tok.bytes), expect) << p;
    EXPECT_EQ(tok, derive_session_token(master, beacon, PeriodIndex{p}));
  }
}

TEST(Tokens, CTokenMatchesOracle) {
  UserSeed seed{};
  seed.fill(0x42);
  for (std::uint64_t p : {0ull, 7ull, 123456789ull}) {
    const auto tok = derive_c_token(seed, PeriodIndex{p});
    EXPECT_EQ(to_buf(tok.bytes), oracle::truncate(oracle::hmac_sha256(to_buf(seed), oracle::be64(p)), 16));
  }
  EXPECT_NE(derive_c_token(seed, PeriodIndex{4}), derive_c_token(seed, PeriodIndex{5}));
}

TEST(Tokens, PerBeaconAndPerPeriodSeparation) {
  const auto master = fixed_master();
  std::set<std::array<std::uint8_t, kTokenSize>> seen;
  for (int b = 0; b < 8; ++b) {
    std::array<std::uint8_t, 16> raw{};
    raw[15] = static_cast<std::uint8_t>(b);
    for (std::uint64_t p = 0; p < 32; ++p) {
      seen.insert(derive_session_token(master, BeaconId(raw), PeriodIndex{p}).bytes);
    }
  }
  EXPECT_EQ(seen.size(), 8u * 32u);
}

TEST(Tokens, PeriodBoundaries) {
  EXPECT_EQ(current_period(0, 30000).value, 0u);
  EXPECT_EQ(current_period(29999, 30000).value, 0u);
  EXPECT_EQ(current_period(30000, 30000).value, 1u);
  EXPECT_EQ(current_period(3 * 30000 + 1, 30000).value, 3u);
  EXPECT_THROW(current_period(-1, 30000), std::invalid_argument);
  EXPECT_THROW(current_period(0, 0), std::invalid_argument);
  ManualClock clock(59999);
  EXPECT_EQ(current_period(clock, 30000).value, 1u);
  clock.advance(1);
  EXPECT_EQ(current_period(clock, 30000).value, 2u);
}
