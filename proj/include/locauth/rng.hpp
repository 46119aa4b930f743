#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

#include "locauth/bytes.hpp"

namespace locauth {

/// Explicit randomness source. A SHA-256 counter-mode stream keyed by a 32-byte
/// seed, so seeded instances are reproducible across runs and platforms.
/// Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  static Rng from_seed(std::uint64_t seed);
  static Rng from_seed_bytes(ByteView seed);
  /// Keyed from the operating system's entropy pool.
  static Rng from_os();

  void fill(std::span<std::uint8_t> out);

  template <std::size_t N>
  std::array<std::uint8_t, N> bytes() {
    std::array<std::uint8_t, N> out{};
    fill(out);
    return out;
  }

  std::uint64_t next_u64();
  /// Uniform in [0, bound); bound must be non-zero.
  std::uint64_t uniform(std::uint64_t bound);

  /// Independent child stream; does not advance this generator.
  Rng fork(std::string_view label, std::uint64_t a = 0, std::uint64_t b = 0) const;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

 private:
  explicit Rng(const std::array<std::uint8_t, 32>& key) : key_(key) {}
  void refill();

  std::array<std::uint8_t, 32> key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint8_t, 32> block_{};
  std::size_t used_ = block_.size();
};

}  // namespace locauth
