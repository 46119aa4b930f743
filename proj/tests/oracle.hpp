#pragma once

// Independent reference implementations for cross-checking the library's
// OpenSSL-backed primitives. Straight from the FIPS 180-4 / RFC 2104 /
// RFC 5869 / RFC 8018 definitions; slow and simple on purpose.

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

namespace oracle {

using Buf = std::vector<std::uint8_t>;

inline Buf buf(std::string_view s) { return Buf(s.begin(), s.end()); }

inline Buf cat(std::initializer_list<Buf> parts) {
  Buf out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

inline std::string hex(const Buf& b) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (auto c : b) {
    s += digits[c >> 4];
    s += digits[c & 15];
  }
  return s;
}

inline Buf unhex(std::string_view h) {
  auto nib = [](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return c - '0';
    return static_cast<std::uint8_t>(c - 'a' + 10);
  };
  Buf out;
  for (std::size_t i = 0; i + 1 < h.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(nib(h[i]) << 4 | nib(h[i + 1])));
  }
  return out;
}

inline Buf be64(std::uint64_t v) {
  Buf out(8);
  for (int i = 7; i >= 0; --i) {
    out[i] = static_cast<std::uint8_t>(v);
    v >>= 8;
  }
  return out;
}

inline Buf sha256(const Buf& msg) {
  static constexpr std::uint32_t k[64] = {
      0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
      0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
      0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
      0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
      0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
      0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
      0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
      0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
      0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
      0xc67178f2};
  std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                        0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  auto rotr = [](std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); };

  Buf m = msg;
  const std::uint64_t bit_len = static_cast<std::uint64_t>(msg.size()) * 8;
  m.push_back(0x80);
  while (m.size() % 64 != 56) m.push_back(0);
  const auto len = be64(bit_len);
  m.insert(m.end(), len.begin(), len.end());

  for (std::size_t off = 0; off < m.size(); off += 64) {
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i) {
      w[i] = std::uint32_t{m[off + 4 * i]} << 24 | std::uint32_t{m[off + 4 * i + 1]} << 16 |
             std::uint32_t{m[off + 4 * i + 2]} << 8 | std::uint32_t{m[off + 4 * i + 3]};
    }
    for (int i = 16; i < 64; ++i) {
      const auto s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      const auto s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    auto a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int i = 0; i < 64; ++i) {
      const auto s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      const auto ch = (e & f) ^ (~e & g);
      const auto t1 = hh + s1 + ch + k[i] + w[i];
      const auto s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      const auto maj = (a & b) ^ (a & c) ^ (b & c);
      const auto t2 = s0 + maj;
      hh = g;
      g = f;
      f = e;
      e = d + t1;
      d = c;
      c = b;
      b = a;
      a = t1 + t2;
    }
    h[0] += a;
    h[1] += b;
    h[2] += c;
    h[3] += d;
    h[4] += e;
    h[5] += f;
    h[6] += g;
    h[7] += hh;
  }
  Buf out;
  for (auto word : h) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(word >> s));
  }
  return out;
}

inline Buf hmac_sha256(Buf key, const Buf& msg) {
  if (key.size() > 64) key = sha256(key);
  key.resize(64, 0);
  Buf ipad(64), opad(64);
  for (int i = 0; i < 64; ++i) {
    ipad[i] = key[i] ^ 0x36;
    opad[i] = key[i] ^ 0x5c;
  }
  return sha256(cat({opad, sha256(cat({ipad, msg}))}));
}

inline Buf hkdf_sha256(const Buf& ikm, Buf salt, const Buf& info, std::size_t len) {
  if (salt.empty()) salt = Buf(32, 0);
  const auto prk = hmac_sha256(salt, ikm);
  Buf okm, t;
  for (std::uint8_t i = 1; okm.size() < len; ++i) {
    t = hmac_sha256(prk, cat({t, info, Buf{i}}));
    okm.insert(okm.end(), t.begin(), t.end());
  }
  okm.resize(len);
  return okm;
}

/// Single 32-byte output block.
inline Buf pbkdf2_sha256(const Buf& password, const Buf& salt, std::uint32_t iterations) {
  auto u = hmac_sha256(password, cat({salt, Buf{0, 0, 0, 1}}));
  Buf out = u;
  for (std::uint32_t i = 1; i < iterations; ++i) {
    u = hmac_sha256(password, u);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] ^= u[j];
  }
  return out;
}

inline Buf truncate(Buf b, std::size_t n) {
  b.resize(n);
  return b;
}

}  // namespace oracle
