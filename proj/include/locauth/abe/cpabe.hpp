#pragma once

// Ciphertext-policy ABE over an access tree, in the asymmetric pairing setting,
// with a hybrid AES-256-GCM payload.
//
//   public:  g1, g2, h = g1^beta, e(g1,g2)^alpha
//   master:  beta, g2^alpha
//   key:     D = g2^((alpha + r) / beta)
//            per attribute j:  D_j = g1^r * H(j)^r_j  (G1),  D'_j = g2^r_j  (G2)
//   cipher:  C~ = K * e(g1,g2)^(alpha s),  C = h^s
//            per leaf y:  C_y = g2^q_y(0)  (G2),  C'_y = H(att(y))^q_y(0)  (G1)
//
// K is a fresh random GT element; SHA-256(K || "loc-auth/dem") keys the AEAD.

#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "locauth/abe/access_tree.hpp"
#include "locauth/abe/group.hpp"
#include "locauth/crypto.hpp"
#include "locauth/rng.hpp"

namespace locauth::abe {

inline constexpr std::string_view kAttributeHashDst = "loc-auth/attr";
inline constexpr std::string_view kDemLabel = "loc-auth/dem";
inline constexpr std::uint8_t kFormatVersion = 0x01;
inline constexpr std::size_t kMaxPayloadSize = 1024;

class AbeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The key's attributes do not satisfy the ciphertext's access tree.
class PolicyNotSatisfied : public AbeError {
 public:
  PolicyNotSatisfied() : AbeError("attributes do not satisfy the access policy") {}
};

/// The AEAD tag failed: the ciphertext was altered or the key components are inconsistent.
class IntegrityFailure : public AbeError {
 public:
  IntegrityFailure() : AbeError("ciphertext integrity check failed") {}
};

class UnsupportedSecurityLevel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PublicParams {
  G1 g1;
  G2 g2;
  G1 h;
  Gt egg_alpha;

  Bytes serialize() const;
  /// Rejects identity or out-of-group elements.
  static PublicParams deserialize(ByteView in);
  bool valid() const;

  friend bool operator==(const PublicParams&, const PublicParams&) = default;
};

struct MasterKey {
  Scalar beta;
  G2 g2_alpha;

  Bytes serialize() const;
  static MasterKey deserialize(ByteView in);
};

struct KeyComponent {
  G1 d;        // D_j
  G2 d_prime;  // D'_j

  friend bool operator==(const KeyComponent&, const KeyComponent&) = default;
};

struct UserSecretKey {
  G2 d;
  std::map<Attribute, KeyComponent> components;

  AttributeSet attributes() const;

  Bytes serialize() const;
  static UserSecretKey deserialize(ByteView in);

  friend bool operator==(const UserSecretKey&, const UserSecretKey&) = default;
};

struct LeafCiphertext {
  G2 c;        // C_y
  G1 c_prime;  // C'_y

  friend bool operator==(const LeafCiphertext&, const LeafCiphertext&) = default;
};

struct AbeCiphertext {
  AccessTree policy;
  Gt c_tilde;
  G1 c;
  std::vector<LeafCiphertext> leaves;  // preorder, one per tree leaf
  crypto::Nonce nonce{};
  Bytes sealed;  // AES-256-GCM ciphertext || tag

  /// 0x01 | tree | C~ | C | (C_y | C'_y)* | nonce | sealed
  Bytes serialize() const;
  static AbeCiphertext deserialize(ByteView in);

  friend bool operator==(const AbeCiphertext&, const AbeCiphertext&) = default;
};

/// BLS12-381 is the only curve offered; it covers requested levels 100..128 bits.
std::pair<PublicParams, MasterKey> setup(unsigned security_bits, Rng& rng);

/// Throws std::invalid_argument on an empty attribute set.
UserSecretKey keygen(const MasterKey& msk, const PublicParams& params, const AttributeSet& attrs,
                     Rng& rng);

AbeCiphertext encrypt(const PublicParams& params, const AccessTree& policy, ByteView payload,
                      Rng& rng);

/// Throws PolicyNotSatisfied or IntegrityFailure.
Bytes decrypt(const PublicParams& params, const UserSecretKey& key, const AbeCiphertext& ct);

/// Lagrange basis coefficient for index `i` over `indices`, evaluated at x = 0.
Scalar lagrange_at_zero(std::uint32_t i, std::span<const std::uint32_t> indices);

G1 hash_attribute(const Attribute& attr);

}  // namespace locauth::abe
