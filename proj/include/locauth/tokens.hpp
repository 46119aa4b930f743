#pragma once

// Time-period token derivations: the per-beacon session token and the per-user
// c-token, both HMAC-SHA-256 truncated to 16 bytes.

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "locauth/bytes.hpp"

namespace locauth {

inline constexpr std::int64_t kDefaultPeriodMs = 30'000;
inline constexpr std::size_t kTokenSize = 16;
inline constexpr std::size_t kSecretSize = 32;

using MasterSecret = std::array<std::uint8_t, kSecretSize>;
using UserSeed = std::array<std::uint8_t, kSecretSize>;

/// 16-byte beacon identifier, written as a canonical UUID string.
class BeaconId {
 public:
  BeaconId() = default;
  explicit BeaconId(const std::array<std::uint8_t, 16>& bytes) : bytes_(bytes) {}

  /// Accepts "xxxxxxxx-xxxx-xxxx-xxxx-xxxxxxxxxxxx" or 32 bare hex digits.
  static BeaconId parse(std::string_view text);

  const std::array<std::uint8_t, 16>& bytes() const { return bytes_; }
  std::string to_string() const;

  friend auto operator<=>(const BeaconId&, const BeaconId&) = default;
  friend bool operator==(const BeaconId&, const BeaconId&) = default;

 private:
  std::array<std::uint8_t, 16> bytes_{};
};

/// floor(now_ms / period_ms).
struct PeriodIndex {
  std::uint64_t value = 0;

  friend auto operator<=>(const PeriodIndex&, const PeriodIndex&) = default;
  friend bool operator==(const PeriodIndex&, const PeriodIndex&) = default;
};

struct SessionToken {
  std::array<std::uint8_t, kTokenSize> bytes{};
  friend bool operator==(const SessionToken&, const SessionToken&) = default;
};

struct CToken {
  std::array<std::uint8_t, kTokenSize> bytes{};
  friend bool operator==(const CToken&, const CToken&) = default;
};

/// Injectable time source in milliseconds since the epoch.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() const = 0;
};

class ManualClock final : public Clock {
 public:
  explicit ManualClock(std::int64_t now_ms = 0) : now_ms_(now_ms) {}
  std::int64_t now_ms() const override { return now_ms_; }
  void set(std::int64_t now_ms) { now_ms_ = now_ms; }
  void advance(std::int64_t delta_ms) { now_ms_ += delta_ms; }

 private:
  std::int64_t now_ms_;
};

class SystemClock final : public Clock {
 public:
  std::int64_t now_ms() const override;
};

/// HMAC-SHA-256(master_secret, beacon_id || period_be64)[0..16)
SessionToken derive_session_token(const MasterSecret& master_secret, const BeaconId& beacon,
                                  PeriodIndex period);

/// HMAC-SHA-256(user_seed, period_be64)[0..16)
CToken derive_c_token(const UserSeed& user_seed, PeriodIndex period);

/// Throws std::invalid_argument unless period_ms > 0 and now_ms >= 0.
PeriodIndex current_period(std::int64_t now_ms, std::int64_t period_ms);
PeriodIndex current_period(const Clock& clock, std::int64_t period_ms);

}  // namespace locauth
