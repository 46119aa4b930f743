#include "locauth/abe/group.hpp"

#include <cstring>

namespace locauth::abe {

// ---- Scalar ---------------------------------------------------------------

Scalar::Scalar() { std::memset(&v_, 0, sizeof(v_)); }

Scalar Scalar::from_u64(std::uint64_t v) {
  const std::uint64_t limbs[4] = {v, 0, 0, 0};
  Scalar out;
  blst_fr_from_uint64(&out.v_, limbs);
  return out;
}

Scalar Scalar::random(Rng& rng) {
  for (;;) {
    // 64 bytes reduced mod r: statistical distance from uniform is ~2^-255.
    auto wide = rng.bytes<64>();
    blst_scalar s;
    blst_scalar_from_be_bytes(&s, wide.data(), wide.size());
    Scalar out;
    blst_fr_from_scalar(&out.v_, &s);
    if (!out.is_zero()) return out;
  }
}

Scalar Scalar::from_bytes(ByteView be) {
  if (be.size() != kSize) throw DecodeError("scalar must be 32 bytes");
  blst_scalar s;
  blst_scalar_from_bendian(&s, be.data());
  if (!blst_scalar_fr_check(&s)) throw DecodeError("scalar out of range");
  Scalar out;
  blst_fr_from_scalar(&out.v_, &s);
  return out;
}

std::array<std::uint8_t, Scalar::kSize> Scalar::to_bytes() const {
  blst_scalar s = to_blst();
  std::array<std::uint8_t, kSize> out{};
  blst_bendian_from_scalar(out.data(), &s);
  return out;
}

bool Scalar::is_zero() const {
  blst_fr zero;
  std::memset(&zero, 0, sizeof(zero));
  return std::memcmp(&v_, &zero, sizeof(zero)) == 0;
}

Scalar Scalar::inverse() const {
  Scalar out;
  blst_fr_inverse(&out.v_, &v_);
  return out;
}

Scalar operator+(const Scalar& a, const Scalar& b) {
  Scalar out;
  blst_fr_add(&out.v_, &a.v_, &b.v_);
  return out;
}

Scalar operator-(const Scalar& a, const Scalar& b) {
  Scalar out;
  blst_fr_sub(&out.v_, &a.v_, &b.v_);
  return out;
}

Scalar operator*(const Scalar& a, const Scalar& b) {
  Scalar out;
  blst_fr_mul(&out.v_, &a.v_, &b.v_);
  return out;
}

Scalar Scalar::operator-() const {
  Scalar out;
  blst_fr_cneg(&out.v_, &v_, true);
  return out;
}

bool operator==(const Scalar& a, const Scalar& b) {
  return std::memcmp(&a.v_, &b.v_, sizeof(blst_fr)) == 0;
}

blst_scalar Scalar::to_blst() const {
  blst_scalar s;
  blst_scalar_from_fr(&s, &v_);
  return s;
}

// ---- G1 -------------------------------------------------------------------

G1::G1() { std::memset(&p_, 0, sizeof(p_)); }

G1 G1::generator() {
  G1 out;
  out.p_ = *blst_p1_generator();
  return out;
}

G1 G1::hash(ByteView msg, std::string_view dst) {
  G1 out;
  blst_hash_to_g1(&out.p_, msg.data(), msg.size(),
                  reinterpret_cast<const byte*>(dst.data()), dst.size(), nullptr, 0);
  return out;
}

G1 G1::decompress(ByteView in) {
  if (in.size() != kCompressedSize) throw DecodeError("G1 point must be 48 bytes");
  blst_p1_affine a;
  if (blst_p1_uncompress(&a, in.data()) != BLST_SUCCESS) throw DecodeError("bad G1 encoding");
  if (!blst_p1_affine_in_g1(&a)) throw DecodeError("G1 point not in subgroup");
  G1 out;
  blst_p1_from_affine(&out.p_, &a);
  return out;
}

std::array<std::uint8_t, G1::kCompressedSize> G1::compress() const {
  std::array<std::uint8_t, kCompressedSize> out{};
  blst_p1_compress(out.data(), &p_);
  return out;
}

bool G1::is_identity() const { return blst_p1_is_inf(&p_); }
bool G1::in_group() const { return blst_p1_in_g1(&p_); }

blst_p1_affine G1::affine() const {
  blst_p1_affine a;
  blst_p1_to_affine(&a, &p_);
  return a;
}

G1 operator+(const G1& a, const G1& b) {
  G1 out;
  blst_p1_add_or_double(&out.p_, &a.p_, &b.p_);
  return out;
}

G1 operator*(const G1& p, const Scalar& k) {
  blst_scalar s = k.to_blst();
  G1 out;
  blst_p1_mult(&out.p_, &p.p_, s.b, 255);
  return out;
}

G1 G1::operator-() const {
  G1 out = *this;
  blst_p1_cneg(&out.p_, true);
  return out;
}

bool operator==(const G1& a, const G1& b) { return blst_p1_is_equal(&a.p_, &b.p_); }

// ---- G2 -------------------------------------------------------------------

G2::G2() { std::memset(&p_, 0, sizeof(p_)); }

G2 G2::generator() {
  G2 out;
  out.p_ = *blst_p2_generator();
  return out;
}

G2 G2::decompress(ByteView in) {
  if (in.size() != kCompressedSize) throw DecodeError("G2 point must be 96 bytes");
  blst_p2_affine a;
  if (blst_p2_uncompress(&a, in.data()) != BLST_SUCCESS) throw DecodeError("bad G2 encoding");
  if (!blst_p2_affine_in_g2(&a)) throw DecodeError("G2 point not in subgroup");
  G2 out;
  blst_p2_from_affine(&out.p_, &a);
  return out;
}

std::array<std::uint8_t, G2::kCompressedSize> G2::compress() const {
  std::array<std::uint8_t, kCompressedSize> out{};
  blst_p2_compress(out.data(), &p_);
  return out;
}

bool G2::is_identity() const { return blst_p2_is_inf(&p_); }
bool G2::in_group() const { return blst_p2_in_g2(&p_); }

blst_p2_affine G2::affine() const {
  blst_p2_affine a;
  blst_p2_to_affine(&a, &p_);
  return a;
}

G2 operator+(const G2& a, const G2& b) {
  G2 out;
  blst_p2_add_or_double(&out.p_, &a.p_, &b.p_);
  return out;
}

G2 operator*(const G2& p, const Scalar& k) {
  blst_scalar s = k.to_blst();
  G2 out;
  blst_p2_mult(&out.p_, &p.p_, s.b, 255);
  return out;
}

G2 G2::operator-() const {
  G2 out = *this;
  blst_p2_cneg(&out.p_, true);
  return out;
}

bool operator==(const G2& a, const G2& b) { return blst_p2_is_equal(&a.p_, &b.p_); }

// ---- Gt -------------------------------------------------------------------

Gt::Gt() { v_ = *blst_fp12_one(); }

Gt Gt::pairing(const G1& p, const G2& q) {
  std::pair<G1, G2> one[] = {{p, q}};
  return multi_pairing(one);
}

namespace {

// Visits the twelve Fp coefficients in a fixed order.
template <typename Fp12, typename Fn>
void for_each_fp(Fp12& v, Fn&& fn) {
  for (auto& fp6 : v.fp6) {
    for (auto& fp2 : fp6.fp2) {
      for (auto& fp : fp2.fp) fn(fp);
    }
  }
}

}  // namespace

std::array<std::uint8_t, Gt::kSerializedSize> Gt::serialize() const {
  std::array<std::uint8_t, kSerializedSize> out{};
  std::size_t off = 0;
  for_each_fp(v_, [&](const blst_fp& fp) {
    blst_bendian_from_fp(out.data() + off, &fp);
    off += 48;
  });
  return out;
}

Gt Gt::deserialize(ByteView in) {
  if (in.size() != kSerializedSize) throw DecodeError("GT element must be 576 bytes");
  Gt out;
  std::size_t off = 0;
  for_each_fp(out.v_, [&](blst_fp& fp) {
    blst_fp_from_bendian(&fp, in.data() + off);
    off += 48;
  });
  // blst reduces silently; a non-canonical coefficient shows up as a mismatch.
  auto again = out.serialize();
  if (!std::equal(again.begin(), again.end(), in.begin())) {
    throw DecodeError("non-canonical GT encoding");
  }
  if (!out.in_group()) throw DecodeError("GT element not in subgroup");
  return out;
}

bool Gt::is_one() const { return blst_fp12_is_one(&v_); }
bool Gt::in_group() const { return blst_fp12_in_group(&v_); }

Gt Gt::inverse() const {
  // Unitary elements invert by conjugation.
  Gt out = *this;
  blst_fp12_conjugate(&out.v_);
  return out;
}

Gt Gt::pow(const Scalar& k) const {
  blst_scalar s = k.to_blst();  // little-endian bytes
  std::array<blst_fp12, 16> table;
  table[0] = *blst_fp12_one();
  table[1] = v_;
  for (std::size_t i = 2; i < table.size(); ++i) blst_fp12_mul(&table[i], &table[i - 1], &v_);

  blst_fp12 acc = *blst_fp12_one();
  for (int byte_idx = 31; byte_idx >= 0; --byte_idx) {
    for (int shift = 4; shift >= 0; shift -= 4) {
      for (int i = 0; i < 4; ++i) blst_fp12_cyclotomic_sqr(&acc, &acc);
      unsigned nibble = (s.b[byte_idx] >> shift) & 0x0f;
      if (nibble != 0) blst_fp12_mul(&acc, &acc, &table[nibble]);
    }
  }
  Gt out;
  out.v_ = acc;
  return out;
}

Gt operator*(const Gt& a, const Gt& b) {
  Gt out;
  blst_fp12_mul(&out.v_, &a.v_, &b.v_);
  return out;
}

bool operator==(const Gt& a, const Gt& b) { return blst_fp12_is_equal(&a.v_, &b.v_); }

Gt multi_pairing(std::span<const std::pair<G1, G2>> pairs) {
  blst_fp12 acc = *blst_fp12_one();
  for (const auto& [p, q] : pairs) {
    if (p.is_identity() || q.is_identity()) continue;  // e(O, .) = 1
    auto pa = p.affine();
    auto qa = q.affine();
    blst_fp12 f;
    blst_miller_loop(&f, &qa, &pa);
    blst_fp12_mul(&acc, &acc, &f);
  }
  Gt out;
  blst_final_exp(&out.v_, &acc);
  return out;
}

}  // namespace locauth::abe
