#include <gtest/gtest.h>

#include <array>

#include "abe_gen.hpp"
#include "locauth/abe/attribute.hpp"
#include "locauth/abe/cpabe.hpp"
#include "locauth/abe/group.hpp"
#include "locauth/abe/policy.hpp"

using namespace locauth;
using namespace locauth::abe;

namespace {

struct Authority {
  PublicParams pk;
  MasterKey msk;
};

Authority make_authority(std::uint64_t seed) {
  auto rng = Rng::from_seed(seed);
  auto [pk, msk] = setup(128, rng);
  return {std::move(pk), std::move(msk)};
}

AttributeSet attrs(std::initializer_list<const char*> names) {
  AttributeSet out;
  for (const char* n : names) out.insert(Attribute::parse(n));
  return out;
}

bool holds(std::uint64_t v, Comparator c, std::uint64_t k) {
  switch (c) {
    case Comparator::Less: return v < k;
    case Comparator::LessEqual: return v <= k;
    case Comparator::Greater: return v > k;
    case Comparator::GreaterEqual: return v >= k;
    case Comparator::Equal: return v == k;
  }
  return false;
}

}  // namespace

TEST(Group, PairingIsBilinear) {
  auto rng = Rng::from_seed(1);
  const auto a = Scalar::random(rng);
  const auto b = Scalar::random(rng);
  const auto lhs = Gt::pairing(G1::generator() * a, G2::generator() * b);
  const auto rhs = Gt::pairing(G1::generator(), G2::generator()).pow(a * b);
  EXPECT_EQ(lhs, rhs);
  EXPECT_FALSE(lhs.is_one());
}

TEST(Group, MultiPairingEqualsProduct) {
  auto rng = Rng::from_seed(2);
  std::vector<std::pair<G1, G2>> pairs;
  Gt product;
  for (int i = 0; i < 4; ++i) {
    pairs.emplace_back(G1::generator() * Scalar::random(rng), G2::generator() * Scalar::random(rng));
    product = product * Gt::pairing(pairs.back().first, pairs.back().second);
  }
  EXPECT_EQ(multi_pairing(pairs), product);
}

TEST(Group, SerializationRoundTrips) {
  auto rng = Rng::from_seed(3);
  const auto p = G1::generator() * Scalar::random(rng);
  const auto q = G2::generator() * Scalar::random(rng);
  EXPECT_EQ(G1::decompress(p.compress()), p);
  EXPECT_EQ(G2::decompress(q.compress()), q);
  const auto t = Gt::pairing(p, q);
  EXPECT_EQ(Gt::deserialize(t.serialize()), t);

  Bytes junk(G1::kCompressedSize, 0xff);
  EXPECT_ANY_THROW(G1::decompress(junk));
  EXPECT_ANY_THROW(Scalar::from_bytes(Bytes(32, 0xff)));
}

TEST(Group, ScalarInverse) {
  const auto x = Scalar::from_u64(12345);
  EXPECT_EQ(x * x.inverse(), Scalar::from_u64(1));
}

TEST(Group, HashToG1IsDeterministicAndDomainSeparated) {
  const auto a = hash_attribute(Attribute::parse("firm:xyz"));
  EXPECT_EQ(a, hash_attribute(Attribute::parse("FIRM:xyz")));
  EXPECT_FALSE(a == hash_attribute(Attribute::parse("firm:xyy")));
  EXPECT_FALSE(a == G1::hash(as_bytes("firm:xyz"), "other-dst"));
  EXPECT_TRUE(a.in_group());
}

TEST(Setup, MasterKeyMatchesPublicParams) {
  const auto auth = make_authority(10);
  // e(h, g2^alpha) = e(g1, g2)^(alpha beta)
  EXPECT_EQ(Gt::pairing(auth.pk.h, auth.msk.g2_alpha), auth.pk.egg_alpha.pow(auth.msk.beta));
  EXPECT_TRUE(auth.pk.valid());
}

TEST(Setup, SecurityLevels) {
  auto rng = Rng::from_seed(11);
  EXPECT_NO_THROW(setup(100, rng));
  EXPECT_THROW(setup(80, rng), UnsupportedSecurityLevel);
  EXPECT_THROW(setup(192, rng), UnsupportedSecurityLevel);
}

TEST(Lagrange, TwoPointBasisAtZero) {
  const std::array<std::uint32_t, 2> idx = {1, 2};
  EXPECT_EQ(lagrange_at_zero(1, idx), Scalar::from_u64(2));
  EXPECT_EQ(lagrange_at_zero(2, idx), -Scalar::from_u64(1));
}

TEST(Lagrange, ReconstructsPolynomialAtZero) {
  // q(x) = 7 + 3x + 5x^2 sampled at 2, 4, 5.
  auto q = [](std::uint64_t x) { return Scalar::from_u64(7 + 3 * x + 5 * x * x); };
  const std::array<std::uint32_t, 3> idx = {2, 4, 5};
  Scalar sum = Scalar::from_u64(0);
  for (auto i : idx) sum = sum + lagrange_at_zero(i, idx) * q(i);
  EXPECT_EQ(sum, Scalar::from_u64(7));
}

TEST(Attribute, Canonicalization) {
  EXPECT_EQ(Attribute::parse("  Dept:Financial ").name(), "dept:financial");
  EXPECT_THROW(Attribute::parse(""), std::invalid_argument);
  EXPECT_THROW(Attribute::parse("has space"), std::invalid_argument);
  EXPECT_THROW(Attribute::parse(std::string(256, 'a')), std::invalid_argument);
}

TEST(Attribute, NumericExpansion) {
  const std::vector<std::string> items = {"firm:xyz", "clearance=5"};
  const auto set = parse_attribute_set(items);
  EXPECT_EQ(set.size(), 1u + kDefaultNumericWidth);
  EXPECT_TRUE(set.contains(Attribute::parse("clearance:bit0=1")));
  EXPECT_TRUE(set.contains(Attribute::parse("clearance:bit1=0")));
  EXPECT_TRUE(set.contains(Attribute::parse("clearance:bit2=1")));
  EXPECT_TRUE(set.contains(Attribute::parse("clearance:bit7=0")));
}

TEST(Policy, AndBindsTighterThanOr) {
  const auto t = parse_policy("a OR b AND c");
  ASSERT_TRUE(t.is_or());
  EXPECT_TRUE(satisfies(attrs({"a"}), t));
  EXPECT_TRUE(satisfies(attrs({"b", "c"}), t));
  EXPECT_FALSE(satisfies(attrs({"b"}), t));
  EXPECT_EQ(parse_policy("A and (B or C)"), parse_policy("a AND (b OR c)"));
}

TEST(Policy, OfficeExample) {
  const auto t = parse_policy("firm:xyz AND dept:financial AND clearance > 3");
  const std::vector<std::string> alice = {"firm:xyz", "dept:financial", "clearance=5"};
  const std::vector<std::string> bob = {"firm:xyz", "role:intern", "clearance=2"};
  const std::vector<std::string> low = {"firm:xyz", "dept:financial", "clearance=3"};
  EXPECT_TRUE(satisfies(parse_attribute_set(alice), t));
  EXPECT_FALSE(satisfies(parse_attribute_set(bob), t));
  EXPECT_FALSE(satisfies(parse_attribute_set(low), t));
}

TEST(Policy, Errors) {
  EXPECT_THROW(parse_policy(""), PolicyError);
  EXPECT_THROW(parse_policy("a AND"), PolicyError);
  EXPECT_THROW(parse_policy("(a OR b"), PolicyError);
  EXPECT_THROW(parse_policy("x > 256"), PolicyError);
  try {
    parse_policy("a AND )");
    FAIL();
  } catch (const PolicyError& e) {
    EXPECT_EQ(e.position(), 6u);
  }
}

TEST(Policy, TreeEncodingRoundTrips) {
  const auto t = parse_policy("firm:xyz AND (dept:a OR dept:b) AND level >= 2");
  const auto enc = encode_tree(t);
  ByteReader r(enc);
  EXPECT_EQ(decode_tree(r), t);
  EXPECT_TRUE(r.done());
}

TEST(Comparison, ExhaustiveAgainstIntegerPredicate) {
  const std::array<Comparator, 5> cmps = {Comparator::Less, Comparator::LessEqual,
                                          Comparator::Greater, Comparator::GreaterEqual,
                                          Comparator::Equal};
  const std::array<std::uint64_t, 5> ks = {0, 1, 3, 127, 255};
  int checks = 0;
  for (auto c : cmps) {
    for (auto k : ks) {
      const auto tree = compile_comparison("n", c, k);
      for (std::uint64_t v = 0; v < 256; ++v) {
        const auto bits = numeric_attributes("n", v);
        const AttributeSet set(bits.begin(), bits.end());
        ASSERT_EQ(satisfies(set, tree), holds(v, c, k)) << v << " " << to_string(c) << " " << k;
        ++checks;
      }
    }
  }
  EXPECT_EQ(checks, 6400);
  EXPECT_THROW(compile_comparison("n", Comparator::Less, 256), std::out_of_range);
}

TEST(CpAbe, RoundTripAndPolicyRejection) {
  const auto auth = make_authority(20);
  auto rng = Rng::from_seed(21);
  const auto key = keygen(auth.msk, auth.pk, attrs({"firm:xyz", "dept:financial"}), rng);
  const auto policy = parse_policy("firm:xyz AND (dept:financial OR dept:legal)");
  const auto payload = as_bytes("token|beacon|period");
  const auto ct = encrypt(auth.pk, policy, payload, rng);
  EXPECT_EQ(decrypt(auth.pk, key, ct), Bytes(payload.begin(), payload.end()));

  const auto other = keygen(auth.msk, auth.pk, attrs({"firm:xyz", "dept:it"}), rng);
  EXPECT_THROW(decrypt(auth.pk, other, ct), PolicyNotSatisfied);
}

TEST(CpAbe, TamperingIsDetected) {
  const auto auth = make_authority(22);
  auto rng = Rng::from_seed(23);
  const auto key = keygen(auth.msk, auth.pk, attrs({"a"}), rng);
  auto ct = encrypt(auth.pk, parse_policy("a"), as_bytes("hello"), rng);
  ct.sealed[0] ^= 1;
  EXPECT_THROW(decrypt(auth.pk, key, ct), IntegrityFailure);
}

TEST(CpAbe, SerializationRoundTrips) {
  const auto auth = make_authority(24);
  auto rng = Rng::from_seed(25);
  const auto key = keygen(auth.msk, auth.pk, attrs({"a", "b", "c"}), rng);
  const auto ct = encrypt(auth.pk, parse_policy("a AND (b OR d)"), as_bytes("x"), rng);
  EXPECT_EQ(AbeCiphertext::deserialize(ct.serialize()), ct);
  EXPECT_EQ(UserSecretKey::deserialize(key.serialize()), key);
  EXPECT_EQ(PublicParams::deserialize(auth.pk.serialize()), auth.pk);
  const auto msk2 = MasterKey::deserialize(auth.msk.serialize());
  EXPECT_EQ(msk2.beta, auth.msk.beta);

  auto bytes = ct.serialize();
  bytes.pop_back();
  const auto truncated = AbeCiphertext::deserialize(bytes);
  EXPECT_THROW(decrypt(auth.pk, key, truncated), IntegrityFailure);
  EXPECT_ANY_THROW(AbeCiphertext::deserialize(Bytes(bytes.begin(), bytes.begin() + 10)));
}

TEST(CpAbe, EncryptionIsRandomized) {
  const auto auth = make_authority(26);
  auto rng = Rng::from_seed(27);
  const auto policy = parse_policy("a OR b");
  for (int i = 0; i < 50; ++i) {
    const auto c1 = encrypt(auth.pk, policy, as_bytes("same"), rng).serialize();
    const auto c2 = encrypt(auth.pk, policy, as_bytes("same"), rng).serialize();
    ASSERT_NE(c1, c2);
  }
}

TEST(CpAbe, LimitsAreEnforced) {
  const auto auth = make_authority(28);
  auto rng = Rng::from_seed(29);
  EXPECT_THROW(keygen(auth.msk, auth.pk, {}, rng), std::invalid_argument);
  EXPECT_ANY_THROW(encrypt(auth.pk, parse_policy("a"), Bytes(kMaxPayloadSize + 1), rng));
  EXPECT_NO_THROW(encrypt(auth.pk, parse_policy("a"), Bytes(kMaxPayloadSize), rng));
}

TEST(CpAbe, CollusionSmoke) {
  const auto auth = make_authority(30);
  auto rng = Rng::from_seed(31);
  const auto k1 = keygen(auth.msk, auth.pk, attrs({"a"}), rng);
  const auto k2 = keygen(auth.msk, auth.pk, attrs({"b"}), rng);
  const auto ct = encrypt(auth.pk, parse_policy("a AND b"), as_bytes("secret"), rng);
  EXPECT_THROW(decrypt(auth.pk, k1, ct), PolicyNotSatisfied);
  EXPECT_THROW(decrypt(auth.pk, k2, ct), PolicyNotSatisfied);

  // Pooling components from two keys satisfies the tree syntactically, but the
  // per-key randomness r does not cancel.
  for (const auto& base : {k1, k2}) {
    UserSecretKey pooled = base;
    for (const auto& k : {k1, k2}) {
      for (const auto& [a, comp] : k.components) pooled.components[a] = comp;
    }
    EXPECT_THROW(decrypt(auth.pk, pooled, ct), IntegrityFailure);
  }
}

TEST(CpAbe, OracleEquivalenceSample) {
  const auto auth = make_authority(40);
  auto rng = Rng::from_seed(41);
  for (int trial = 0; trial < 30; ++trial) {
    const auto tree = testgen::random_tree(rng, 1 + static_cast<int>(rng.uniform(8)));
    const auto set = testgen::random_attrs(rng);
    const auto key = keygen(auth.msk, auth.pk, set, rng);
    const auto payload = rng.bytes<24>();
    const auto ct = encrypt(auth.pk, tree, payload, rng);
    bool ok = false;
    try {
      ok = decrypt(auth.pk, key, ct) == Bytes(payload.begin(), payload.end());
    } catch (const PolicyNotSatisfied&) {
    }
    ASSERT_EQ(ok, satisfies(set, tree)) << to_string(tree);
  }
}
