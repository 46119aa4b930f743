#pragma once

// Symmetric primitives used by the protocol layer. Thin wrappers over OpenSSL.

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string_view>

#include "locauth/bytes.hpp"

namespace locauth::crypto {

inline constexpr std::size_t kDigestSize = 32;
inline constexpr std::size_t kAeadKeySize = 32;
inline constexpr std::size_t kNonceSize = 12;
inline constexpr std::size_t kTagSize = 16;

using Digest = std::array<std::uint8_t, kDigestSize>;
using AeadKey = std::array<std::uint8_t, kAeadKeySize>;
using Nonce = std::array<std::uint8_t, kNonceSize>;

Digest sha256(ByteView data);
/// SHA-256 over the concatenation of `parts`.
Digest sha256(std::initializer_list<ByteView> parts);

Digest hmac_sha256(ByteView key, ByteView message);

/// RFC 5869 HKDF with SHA-256. An empty salt means HashLen zero bytes.
Bytes hkdf_sha256(ByteView ikm, ByteView salt, ByteView info, std::size_t length);

Digest pbkdf2_sha256(std::string_view password, ByteView salt, std::uint32_t iterations);

/// AES-256-GCM; returns ciphertext || 16-byte tag.
Bytes aead_seal(const AeadKey& key, const Nonce& nonce, ByteView plaintext, ByteView aad = {});

/// Returns nullopt when the tag does not verify.
std::optional<Bytes> aead_open(const AeadKey& key, const Nonce& nonce, ByteView sealed,
                               ByteView aad = {});

}  // namespace locauth::crypto
