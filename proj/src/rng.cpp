#include "locauth/rng.hpp"

#include <openssl/rand.h>

#include <stdexcept>

#include "locauth/crypto.hpp"

namespace locauth {

namespace {
constexpr std::string_view kDomain = "loc-auth/rng";
}

Rng Rng::from_seed(std::uint64_t seed) {
  auto be = u64_be(seed);
  return from_seed_bytes(be);
}

Rng Rng::from_seed_bytes(ByteView seed) {
  return Rng(crypto::sha256({as_bytes(kDomain), seed}));
}

Rng Rng::from_os() {
  std::array<std::uint8_t, 32> seed{};
  if (RAND_bytes(seed.data(), static_cast<int>(seed.size())) != 1) {
    throw std::runtime_error("RAND_bytes failed");
  }
  return from_seed_bytes(seed);
}

void Rng::refill() {
  auto ctr = u64_be(counter_++);
  block_ = crypto::sha256({key_, ctr});
  used_ = 0;
}

void Rng::fill(std::span<std::uint8_t> out) {
  for (auto& b : out) {
    if (used_ == block_.size()) refill();
    b = block_[used_++];
  }
}

std::uint64_t Rng::next_u64() {
  auto raw = bytes<8>();
  std::uint64_t v = 0;
  for (auto b : raw) v = (v << 8) | b;
  return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::uniform: zero bound");
  // Rejection sampling keeps the result unbiased.
  const std::uint64_t limit = max() - (max() % bound);
  for (;;) {
    auto v = next_u64();
    if (v < limit) return v % bound;
  }
}

Rng Rng::fork(std::string_view label, std::uint64_t a, std::uint64_t b) const {
  auto ea = u64_be(a);
  auto eb = u64_be(b);
  return Rng(crypto::sha256({key_, as_bytes("/fork/"), as_bytes(label), ea, eb}));
}

}  // namespace locauth
