#include "locauth/abe/cpabe.hpp"

#include <algorithm>

namespace locauth::abe {

namespace {

constexpr std::uint8_t kParamsTag = 0x10;
constexpr std::uint8_t kMasterTag = 0x11;
constexpr std::uint8_t kUserKeyTag = 0x12;

template <typename T>
void put(Bytes& out, const T& fixed) {
  append(out, fixed);
}

crypto::AeadKey dem_key(const Gt& k) {
  auto ser = k.serialize();
  return crypto::sha256({ser, as_bytes(kDemLabel)});
}

// Polynomial of degree k-1 with q(0) = secret; hands each child share q(i).
void share_secret(const AccessTree& node, const Scalar& secret, Rng& rng,
                  std::vector<Scalar>& leaf_shares) {
  if (node.is_leaf()) {
    leaf_shares.push_back(secret);
    return;
  }
  std::vector<Scalar> coeffs{secret};
  for (std::uint32_t d = 1; d < node.threshold(); ++d) coeffs.push_back(Scalar::random(rng));
  for (std::size_t idx = 0; idx < node.children().size(); ++idx) {
    const Scalar x = Scalar::from_u64(idx + 1);
    Scalar y;  // Horner
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) y = y * x + *it;
    share_secret(node.children()[idx], y, rng, leaf_shares);
  }
}

struct LeafWeight {
  std::size_t leaf_index;
  Scalar weight;
};

// Picks the lexicographically smallest satisfying child subset at each gate and
// folds the Lagrange coefficients down to per-leaf weights.
void collect_weights(const AccessTree& node, const AttributeSet& attrs, std::size_t first_leaf,
                     const Scalar& weight, std::vector<LeafWeight>& out) {
  if (node.is_leaf()) {
    out.push_back({first_leaf, weight});
    return;
  }
  std::vector<std::uint32_t> chosen;
  std::vector<std::size_t> offsets;
  std::size_t offset = first_leaf;
  for (std::size_t idx = 0; idx < node.children().size(); ++idx) {
    const auto& child = node.children()[idx];
    if (chosen.size() < node.threshold() && satisfies(attrs, child)) {
      chosen.push_back(static_cast<std::uint32_t>(idx + 1));
      offsets.push_back(offset);
    }
    offset += child.leaf_count();
  }
  for (std::size_t c = 0; c < chosen.size(); ++c) {
    Scalar w = weight * lagrange_at_zero(chosen[c], chosen);
    collect_weights(node.children()[chosen[c] - 1], attrs, offsets[c], w, out);
  }
}

}  // namespace

G1 hash_attribute(const Attribute& attr) { return G1::hash(as_bytes(attr.name()), kAttributeHashDst); }

Scalar lagrange_at_zero(std::uint32_t i, std::span<const std::uint32_t> indices) {
  Scalar num = Scalar::from_u64(1);
  Scalar den = Scalar::from_u64(1);
  const Scalar xi = Scalar::from_u64(i);
  for (auto j : indices) {
    if (j == i) continue;
    const Scalar xj = Scalar::from_u64(j);
    num = num * (-xj);    // (0 - x_j)
    den = den * (xi - xj);
  }
  return num * den.inverse();
}

// ---- setup / keygen / encrypt / decrypt -------------------------------------------

std::pair<PublicParams, MasterKey> setup(unsigned security_bits, Rng& rng) {
  if (security_bits < 100 || security_bits > 128) {
    throw UnsupportedSecurityLevel("security level " + std::to_string(security_bits) +
                                   " not supported; BLS12-381 offers 100..128");
  }
  const Scalar alpha = Scalar::random(rng);
  const Scalar beta = Scalar::random(rng);

  PublicParams pp;
  pp.g1 = G1::generator();
  pp.g2 = G2::generator();
  pp.h = pp.g1 * beta;
  MasterKey msk{beta, pp.g2 * alpha};
  pp.egg_alpha = Gt::pairing(pp.g1, msk.g2_alpha);
  return {pp, msk};
}

UserSecretKey keygen(const MasterKey& msk, const PublicParams& params, const AttributeSet& attrs,
                     Rng& rng) {
  if (attrs.empty()) throw std::invalid_argument("keygen: empty attribute set");
  const Scalar r = Scalar::random(rng);
  UserSecretKey key;
  key.d = (msk.g2_alpha + params.g2 * r) * msk.beta.inverse();
  const G1 g1_r = params.g1 * r;
  for (const auto& attr : attrs) {
    const Scalar rj = Scalar::random(rng);
    key.components.emplace(attr, KeyComponent{g1_r + hash_attribute(attr) * rj, params.g2 * rj});
  }
  return key;
}

AbeCiphertext encrypt(const PublicParams& params, const AccessTree& policy, ByteView payload,
                      Rng& rng) {
  if (payload.size() > kMaxPayloadSize) {
    throw std::invalid_argument("payload exceeds " + std::to_string(kMaxPayloadSize) + " bytes");
  }
  const Scalar s = Scalar::random(rng);
  const Gt k = params.egg_alpha.pow(Scalar::random(rng));

  AbeCiphertext ct;
  ct.policy = policy;
  ct.c_tilde = k * params.egg_alpha.pow(s);
  ct.c = params.h * s;

  std::vector<Scalar> shares;
  shares.reserve(policy.leaf_count());
  share_secret(policy, s, rng, shares);
  const auto attrs = leaves_in_order(policy);
  ct.leaves.reserve(shares.size());
  for (std::size_t i = 0; i < shares.size(); ++i) {
    ct.leaves.push_back({params.g2 * shares[i], hash_attribute(attrs[i]) * shares[i]});
  }

  ct.nonce = rng.bytes<crypto::kNonceSize>();
  ct.sealed = crypto::aead_seal(dem_key(k), ct.nonce, payload);
  return ct;
}

Bytes decrypt(const PublicParams& params, const UserSecretKey& key, const AbeCiphertext& ct) {
  (void)params;
  if (ct.leaves.size() != ct.policy.leaf_count()) throw IntegrityFailure();
  if (!satisfies(key.attributes(), ct.policy)) throw PolicyNotSatisfied();

  std::vector<LeafWeight> weights;
  collect_weights(ct.policy, key.attributes(), 0, Scalar::from_u64(1), weights);
  const auto attrs = leaves_in_order(ct.policy);

  // prod e(D_j, C_y)^w / e(C'_y, D'_j)^w  =  e(g1,g2)^(r s); then divide by e(C, D).
  std::vector<std::pair<G1, G2>> pairs;
  pairs.reserve(2 * weights.size() + 1);
  for (const auto& [idx, w] : weights) {
    const auto& comp = key.components.at(attrs[idx]);
    const auto& leaf = ct.leaves[idx];
    pairs.emplace_back(comp.d * w, leaf.c);
    pairs.emplace_back(-(leaf.c_prime * w), comp.d_prime);
  }
  pairs.emplace_back(-ct.c, key.d);
  const Gt blinding_inverse = multi_pairing(pairs);  // e(g1,g2)^(-alpha s)
  const Gt k = ct.c_tilde * blinding_inverse;

  auto plain = crypto::aead_open(dem_key(k), ct.nonce, ct.sealed);
  if (!plain) throw IntegrityFailure();
  return std::move(*plain);
}

// ---- serialization ------------------------------------------------------------------

Bytes PublicParams::serialize() const {
  Bytes out{kFormatVersion, kParamsTag};
  put(out, g1.compress());
  put(out, g2.compress());
  put(out, h.compress());
  put(out, egg_alpha.serialize());
  return out;
}

PublicParams PublicParams::deserialize(ByteView in) {
  ByteReader r(in);
  if (r.u8() != kFormatVersion || r.u8() != kParamsTag) throw DecodeError("not a params blob");
  PublicParams pp;
  pp.g1 = G1::decompress(r.take(G1::kCompressedSize));
  pp.g2 = G2::decompress(r.take(G2::kCompressedSize));
  pp.h = G1::decompress(r.take(G1::kCompressedSize));
  pp.egg_alpha = Gt::deserialize(r.take(Gt::kSerializedSize));
  r.expect_done();
  if (!pp.valid()) throw DecodeError("public params contain an identity element");
  return pp;
}

bool PublicParams::valid() const {
  return !g1.is_identity() && !g2.is_identity() && !h.is_identity() && !egg_alpha.is_one() &&
         g1.in_group() && g2.in_group() && h.in_group() && egg_alpha.in_group();
}

Bytes MasterKey::serialize() const {
  Bytes out{kFormatVersion, kMasterTag};
  put(out, beta.to_bytes());
  put(out, g2_alpha.compress());
  return out;
}

MasterKey MasterKey::deserialize(ByteView in) {
  ByteReader r(in);
  if (r.u8() != kFormatVersion || r.u8() != kMasterTag) throw DecodeError("not a master key blob");
  MasterKey msk;
  msk.beta = Scalar::from_bytes(r.take(Scalar::kSize));
  msk.g2_alpha = G2::decompress(r.take(G2::kCompressedSize));
  r.expect_done();
  if (msk.beta.is_zero() || msk.g2_alpha.is_identity()) throw DecodeError("degenerate master key");
  return msk;
}

AttributeSet UserSecretKey::attributes() const {
  AttributeSet out;
  for (const auto& [attr, comp] : components) out.insert(attr);
  return out;
}

Bytes UserSecretKey::serialize() const {
  Bytes out{kFormatVersion, kUserKeyTag};
  put(out, d.compress());
  put_u16_be(out, static_cast<std::uint16_t>(components.size()));
  for (const auto& [attr, comp] : components) {
    out.push_back(static_cast<std::uint8_t>(attr.name().size()));
    append(out, as_bytes(attr.name()));
    put(out, comp.d.compress());
    put(out, comp.d_prime.compress());
  }
  return out;
}

UserSecretKey UserSecretKey::deserialize(ByteView in) {
  ByteReader r(in);
  if (r.u8() != kFormatVersion || r.u8() != kUserKeyTag) throw DecodeError("not a user key blob");
  UserSecretKey key;
  key.d = G2::decompress(r.take(G2::kCompressedSize));
  const auto n = r.u16_be();
  for (unsigned i = 0; i < n; ++i) {
    auto raw = r.take(r.u8());
    std::string name(raw.begin(), raw.end());
    Attribute attr = [&] {
      try {
        return Attribute::parse(name);
      } catch (const std::invalid_argument& e) {
        throw DecodeError(e.what());
      }
    }();
    if (attr.name() != name) throw DecodeError("key attribute not canonical");
    KeyComponent comp{G1::decompress(r.take(G1::kCompressedSize)),
                      G2::decompress(r.take(G2::kCompressedSize))};
    if (!key.components.emplace(std::move(attr), comp).second) {
      throw DecodeError("duplicate attribute in key");
    }
  }
  r.expect_done();
  return key;
}

Bytes AbeCiphertext::serialize() const {
  Bytes out{kFormatVersion};
  encode_tree(out, policy);
  put(out, c_tilde.serialize());
  put(out, c.compress());
  for (const auto& leaf : leaves) {
    put(out, leaf.c.compress());
    put(out, leaf.c_prime.compress());
  }
  put(out, nonce);
  append(out, sealed);
  return out;
}

AbeCiphertext AbeCiphertext::deserialize(ByteView in) {
  ByteReader r(in);
  if (r.u8() != kFormatVersion) throw DecodeError("unsupported ciphertext version");
  AbeCiphertext ct;
  ct.policy = decode_tree(r);
  ct.c_tilde = Gt::deserialize(r.take(Gt::kSerializedSize));
  ct.c = G1::decompress(r.take(G1::kCompressedSize));
  const auto n = ct.policy.leaf_count();
  ct.leaves.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    LeafCiphertext leaf;
    leaf.c = G2::decompress(r.take(G2::kCompressedSize));
    leaf.c_prime = G1::decompress(r.take(G1::kCompressedSize));
    ct.leaves.push_back(leaf);
  }
  ct.nonce = r.array<crypto::kNonceSize>();
  auto rest = r.rest();
  if (rest.size() < crypto::kTagSize) throw DecodeError("DEM ciphertext shorter than its tag");
  ct.sealed.assign(rest.begin(), rest.end());
  return ct;
}

}  // namespace locauth::abe
