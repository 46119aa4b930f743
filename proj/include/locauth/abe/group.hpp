#pragma once

// Value types over the BLS12-381 pairing groups (Type-III: e: G1 x G2 -> GT).

#include <blst.h>

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

#include "locauth/bytes.hpp"
#include "locauth/rng.hpp"

namespace locauth::abe {

/// Element of Z_r, r the prime order of all three groups.
class Scalar {
 public:
  static constexpr std::size_t kSize = 32;

  Scalar();
  static Scalar from_u64(std::uint64_t v);
  /// Uniform non-zero element.
  static Scalar random(Rng& rng);
  /// Big-endian canonical encoding; throws DecodeError when >= r.
  static Scalar from_bytes(ByteView be);

  std::array<std::uint8_t, kSize> to_bytes() const;
  bool is_zero() const;
  Scalar inverse() const;

  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  Scalar operator-() const;
  friend bool operator==(const Scalar& a, const Scalar& b);

  /// Little-endian scalar bytes in the form blst's multiplication routines take.
  blst_scalar to_blst() const;

 private:
  blst_fr v_;
};

class G1 {
 public:
  static constexpr std::size_t kCompressedSize = 48;

  G1();  // identity
  static G1 generator();
  /// Hash-to-curve (RFC 9380, BLS12381G1_XMD:SHA-256_SSWU_RO_) under `dst`.
  static G1 hash(ByteView msg, std::string_view dst);
  /// Validates curve and subgroup membership; throws DecodeError.
  static G1 decompress(ByteView in);

  std::array<std::uint8_t, kCompressedSize> compress() const;
  bool is_identity() const;
  bool in_group() const;
  blst_p1_affine affine() const;

  friend G1 operator+(const G1& a, const G1& b);
  friend G1 operator*(const G1& p, const Scalar& k);
  G1 operator-() const;
  friend bool operator==(const G1& a, const G1& b);

 private:
  blst_p1 p_;
};

class G2 {
 public:
  static constexpr std::size_t kCompressedSize = 96;

  G2();  // identity
  static G2 generator();
  static G2 decompress(ByteView in);

  std::array<std::uint8_t, kCompressedSize> compress() const;
  bool is_identity() const;
  bool in_group() const;
  blst_p2_affine affine() const;

  friend G2 operator+(const G2& a, const G2& b);
  friend G2 operator*(const G2& p, const Scalar& k);
  G2 operator-() const;
  friend bool operator==(const G2& a, const G2& b);

 private:
  blst_p2 p_;
};

/// Element of the target group, stored as an Fp12 value.
class Gt {
 public:
  static constexpr std::size_t kSerializedSize = 12 * 48;

  Gt();  // identity
  static Gt pairing(const G1& p, const G2& q);
  /// Validates canonical field encoding and subgroup membership; throws DecodeError.
  static Gt deserialize(ByteView in);

  /// Twelve big-endian Fp coefficients, lowest tower index first.
  std::array<std::uint8_t, kSerializedSize> serialize() const;
  bool is_one() const;
  bool in_group() const;
  Gt inverse() const;
  Gt pow(const Scalar& k) const;

  friend Gt operator*(const Gt& a, const Gt& b);
  friend Gt operator/(const Gt& a, const Gt& b) { return a * b.inverse(); }
  friend bool operator==(const Gt& a, const Gt& b);

 private:
  friend Gt multi_pairing(std::span<const std::pair<G1, G2>> pairs);
  blst_fp12 v_;
};

/// Product of e(P_i, Q_i), sharing a single final exponentiation.
Gt multi_pairing(std::span<const std::pair<G1, G2>> pairs);

}  // namespace locauth::abe
