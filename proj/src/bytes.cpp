#include "locauth/bytes.hpp"

#include <algorithm>

namespace locauth {

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

namespace {
int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}
}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw DecodeError("hex string has odd length");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_value(hex[i]);
    int lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0) throw DecodeError("invalid hex digit");
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

void put_u16_be(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

std::array<std::uint8_t, 8> u64_be(std::uint64_t v) {
  std::array<std::uint8_t, 8> out{};
  for (int i = 7; i >= 0; --i) {
    out[i] = static_cast<std::uint8_t>(v);
    v >>= 8;
  }
  return out;
}

void put_u64_be(Bytes& out, std::uint64_t v) { append(out, u64_be(v)); }

bool contains_subsequence(ByteView haystack, ByteView needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
         haystack.end();
}

std::uint8_t ByteReader::u8() { return take(1)[0]; }

std::uint16_t ByteReader::u16_be() {
  auto v = take(2);
  return static_cast<std::uint16_t>((v[0] << 8) | v[1]);
}

std::uint64_t ByteReader::u64_be() {
  auto v = take(8);
  std::uint64_t out = 0;
  for (auto b : v) out = (out << 8) | b;
  return out;
}

ByteView ByteReader::take(std::size_t n) {
  if (n > remaining()) {
    throw DecodeError("truncated input: need " + std::to_string(n) + " bytes, have " +
                      std::to_string(remaining()));
  }
  auto view = data_.subspan(pos_, n);
  pos_ += n;
  return view;
}

ByteView ByteReader::rest() { return take(remaining()); }

void ByteReader::expect_done() const {
  if (!done()) throw DecodeError(std::to_string(remaining()) + " trailing bytes");
}

}  // namespace locauth
