#include <gtest/gtest.h>

#include <set>

#include "locauth/bytes.hpp"
#include "locauth/crypto.hpp"
#include "locauth/rng.hpp"
#include "oracle.hpp"

using namespace locauth;

namespace {

oracle::Buf to_buf(ByteView v) { return oracle::Buf(v.begin(), v.end()); }

}  // namespace

TEST(Bytes, HexRoundTrip) {
  const Bytes b = {0x00, 0x7f, 0x80, 0xff};
  EXPECT_EQ(to_hex(b), "007f80ff");
  EXPECT_EQ(from_hex("007F80ff"), b);
  EXPECT_THROW(from_hex("abc"), DecodeError);
  EXPECT_THROW(from_hex("zz"), DecodeError);
  EXPECT_THROW(array_from_hex<3>("0011"), DecodeError);
}

TEST(Bytes, ReaderBoundsAreChecked) {
  const Bytes b = {0x01, 0x02, 0x03};
  ByteReader r(b);
  EXPECT_EQ(r.u16_be(), 0x0102);
  EXPECT_THROW(r.u16_be(), DecodeError);
  EXPECT_EQ(r.u8(), 0x03);
  EXPECT_TRUE(r.done());
}

TEST(Oracle, Sha256KnownAnswers) {
  EXPECT_EQ(oracle::hex(oracle::sha256(oracle::buf(""))),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(oracle::hex(oracle::sha256(oracle::buf("abc"))),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(oracle::hex(oracle::sha256(
                oracle::buf("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"))),
            "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST(Crypto, Sha256MatchesOracleAcrossBlockBoundaries) {
  for (std::size_t n : {0u, 1u, 55u, 56u, 63u, 64u, 65u, 119u, 120u, 1000u}) {
    oracle::Buf msg(n);
    for (std::size_t i = 0; i < n; ++i) msg[i] = static_cast<std::uint8_t>(i * 31 + 7);
    EXPECT_EQ(to_buf(crypto::sha256(msg)), oracle::sha256(msg)) << n;
  }
}

TEST(Crypto, HmacRfc4231Case2) {
  const auto key = as_bytes("Jefe");
  const auto msg = as_bytes("what do ya want for nothing?");
  EXPECT_EQ(to_hex(crypto::hmac_sha256(key, msg)),
            "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
  EXPECT_EQ(oracle::hex(oracle::hmac_sha256(oracle::buf("Jefe"),
                                            oracle::buf("what do ya want for nothing?"))),
            "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST(Crypto, HkdfRfc5869Case1) {
  const auto ikm = from_hex("0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b0b");
  const auto salt = from_hex("000102030405060708090a0b0c");
  const auto info = from_hex("f0f1f2f3f4f5f6f7f8f9");
  const std::string okm =
      "3cb25f25faacd57a90434f64d0362f2a2d2d0a90cf1a5a4c5db02d56ecc4c5bf34007208d5b887185865";
  EXPECT_EQ(to_hex(crypto::hkdf_sha256(ikm, salt, info, 42)), okm);
  EXPECT_EQ(oracle::hex(oracle::hkdf_sha256(to_buf(ikm), to_buf(salt), to_buf(info), 42)), okm);
}

TEST(Crypto, HkdfEmptySaltMatchesOracle) {
  const auto ikm = from_hex("00112233445566778899aabbccddeeff");
  const auto info = as_bytes("loc-auth/outer");
  EXPECT_EQ(to_buf(crypto::hkdf_sha256(ikm, {}, info, 32)),
            oracle::hkdf_sha256(to_buf(ikm), {}, oracle::buf("loc-auth/outer"), 32));
}

TEST(Crypto, Pbkdf2KnownAnswerAndOracle) {
  // Widely published PBKDF2-HMAC-SHA256 vector (password/salt, c = 1 and 4096).
  EXPECT_EQ(to_hex(crypto::pbkdf2_sha256("password", as_bytes("salt"), 1)),
            "120fb6cffcf8b32c43e7225256c4f837a86548c92ccc35480805987cb70be17b");
  EXPECT_EQ(to_hex(crypto::pbkdf2_sha256("password", as_bytes("salt"), 4096)),
            "c5e478d59288c841aa530db6845c4c8d962893a001ce4e11a4963873aa98134a");
  EXPECT_EQ(to_buf(crypto::pbkdf2_sha256("hunter22", as_bytes("NaCl-0123456789a"), 1000)),
            oracle::pbkdf2_sha256(oracle::buf("hunter22"), oracle::buf("NaCl-0123456789a"), 1000));
}

TEST(Crypto, AeadRoundTripAndTamper) {
  crypto::AeadKey key{};
  key[0] = 1;
  crypto::Nonce nonce{};
  const auto pt = as_bytes("attack at dawn");
  const auto aad = as_bytes("hdr");
  auto ct = crypto::aead_seal(key, nonce, pt, aad);
  ASSERT_EQ(ct.size(), pt.size() + crypto::kTagSize);
  auto opened = crypto::aead_open(key, nonce, ct, aad);
  ASSERT_TRUE(opened);
  EXPECT_EQ(*opened, Bytes(pt.begin(), pt.end()));

  EXPECT_FALSE(crypto::aead_open(key, nonce, ct, as_bytes("hdR")));
  ct[0] ^= 1;
  EXPECT_FALSE(crypto::aead_open(key, nonce, ct, aad));
  EXPECT_FALSE(crypto::aead_open(key, nonce, Bytes(5), aad));
}

TEST(Rng, SeededStreamsAreReproducibleAndForksIndependent) {
  auto a = Rng::from_seed(42);
  auto b = Rng::from_seed(42);
  EXPECT_EQ(a.bytes<64>(), b.bytes<64>());
  EXPECT_NE(Rng::from_seed(1).next_u64(), Rng::from_seed(2).next_u64());

  const auto root = Rng::from_seed(7);
  auto f1 = root.fork("tick", 0, 1);
  auto f2 = root.fork("tick", 0, 2);
  auto f1again = root.fork("tick", 0, 1);
  EXPECT_EQ(f1.next_u64(), f1again.next_u64());
  EXPECT_NE(root.fork("tick", 0, 1).next_u64(), f2.next_u64());
}

TEST(Rng, UniformStaysInRange) {
  auto r = Rng::from_seed(3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = r.uniform(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}
