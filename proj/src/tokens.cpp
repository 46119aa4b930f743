#include "locauth/tokens.hpp"

#include <chrono>
#include <stdexcept>

#include "locauth/crypto.hpp"

namespace locauth {

BeaconId BeaconId::parse(std::string_view text) {
  std::string hex;
  hex.reserve(32);
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '-') {
      if (i != 8 && i != 13 && i != 18 && i != 23) throw DecodeError("misplaced '-' in UUID");
      continue;
    }
    hex.push_back(c);
  }
  if (hex.size() != 32) throw DecodeError("UUID must carry 32 hex digits: '" + std::string(text) + "'");
  return BeaconId(array_from_hex<16>(hex));
}

std::string BeaconId::to_string() const {
  auto hex = to_hex(bytes_);
  return hex.substr(0, 8) + "-" + hex.substr(8, 4) + "-" + hex.substr(12, 4) + "-" +
         hex.substr(16, 4) + "-" + hex.substr(20);
}

std::int64_t SystemClock::now_ms() const {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

SessionToken derive_session_token(const MasterSecret& master_secret, const BeaconId& beacon,
                                  PeriodIndex period) {
  Bytes msg(beacon.bytes().begin(), beacon.bytes().end());
  put_u64_be(msg, period.value);
  auto mac = crypto::hmac_sha256(master_secret, msg);
  SessionToken out;
  std::copy_n(mac.begin(), kTokenSize, out.bytes.begin());
  return out;
}

CToken derive_c_token(const UserSeed& user_seed, PeriodIndex period) {
  auto msg = u64_be(period.value);
  auto mac = crypto::hmac_sha256(user_seed, msg);
  CToken out;
  std::copy_n(mac.begin(), kTokenSize, out.bytes.begin());
  return out;
}

PeriodIndex current_period(std::int64_t now_ms, std::int64_t period_ms) {
  if (period_ms <= 0) throw std::invalid_argument("period_ms must be positive");
  if (now_ms < 0) throw std::invalid_argument("clock before epoch");
  return PeriodIndex{static_cast<std::uint64_t>(now_ms / period_ms)};
}

PeriodIndex current_period(const Clock& clock, std::int64_t period_ms) {
  return current_period(clock.now_ms(), period_ms);
}

}  // namespace locauth
