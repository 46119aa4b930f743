#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace locauth {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Raised when a byte string does not decode into the expected structure.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

template <std::size_t N>
std::array<std::uint8_t, N> array_from_hex(std::string_view hex) {
  Bytes raw = from_hex(hex);
  if (raw.size() != N) {
    throw DecodeError("expected " + std::to_string(N) + " bytes of hex, got " +
                      std::to_string(raw.size()));
  }
  std::array<std::uint8_t, N> out{};
  std::copy(raw.begin(), raw.end(), out.begin());
  return out;
}

inline void append(Bytes& out, ByteView data) { out.insert(out.end(), data.begin(), data.end()); }

void put_u16_be(Bytes& out, std::uint16_t v);
void put_u64_be(Bytes& out, std::uint64_t v);
std::array<std::uint8_t, 8> u64_be(std::uint64_t v);

/// True when `needle` occurs as a contiguous run inside `haystack`.
bool contains_subsequence(ByteView haystack, ByteView needle);

/// Cursor over a byte buffer; every read checks bounds and throws DecodeError.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  std::uint8_t u8();
  std::uint16_t u16_be();
  std::uint64_t u64_be();
  ByteView take(std::size_t n);
  ByteView rest();

  template <std::size_t N>
  std::array<std::uint8_t, N> array() {
    auto view = take(N);
    std::array<std::uint8_t, N> out{};
    std::copy(view.begin(), view.end(), out.begin());
    return out;
  }

  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return remaining() == 0; }
  void expect_done() const;

 private:
  ByteView data_;
  std::size_t pos_ = 0;
};

}  // namespace locauth
