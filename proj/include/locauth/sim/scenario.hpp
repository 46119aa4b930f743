#pragma once

// Scenario documents: beacons, users with mobility traces, adjacency and
// embedded attack scripts. Times are read as (possibly fractional)
// milliseconds and stored as integer microseconds.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "locauth/sessions.hpp"
#include "locauth/sim/geometry.hpp"
#include "locauth/tokens.hpp"

namespace locauth::sim {

inline constexpr int kScenarioSchema = 1;
inline constexpr std::int64_t kDefaultIntervalUs = 102'400;  // 100 TU
inline constexpr int kChannelCount = 3;
inline constexpr int kDefaultFallbackMisses = 3;

/// Schema violations and dangling references. The CLI maps these to exit 2.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Converts a millisecond quantity to whole microseconds (rounded).
std::int64_t ms_to_us(double ms);

struct BeaconSpec {
  BeaconId id;
  std::string name;  // optional; defaults to the UUID string
  Point2D pos;
  double range_m = kDefaultRangeM;
  std::int64_t interval_us = kDefaultIntervalUs;
  std::string policy;

  const std::string& label() const { return name; }
};

struct UserSpec {
  std::string username;
  std::string password;
  std::vector<std::string> attrs;
  Trace trace;
};

enum class AttackTarget { Broadcast, Login, Both };

std::string_view to_string(AttackTarget t);

inline bool targets_broadcast(AttackTarget t) { return t != AttackTarget::Login; }
inline bool targets_login(AttackTarget t) { return t != AttackTarget::Broadcast; }

/// Record at beacon `beacon` from `record_at_us` on; re-send each recording at
/// (recorded period + 1) * d + delta. A control run uses delta <= 0.
struct ReplayAttack {
  BeaconId beacon;
  std::int64_t record_at_us = 0;
  std::int64_t delta_us = 1000;
  AttackTarget target = AttackTarget::Both;
  bool control = false;
};

/// Record at `from`, re-send at `to` after `tunnel_delay_us`.
struct WormholeAttack {
  BeaconId from;
  BeaconId to;
  std::int64_t record_at_us = 0;
  std::int64_t tunnel_delay_us = 0;
  AttackTarget target = AttackTarget::Both;
};

/// Noise on a subset of the area's advertising channels over [from, to).
struct JamAttack {
  BeaconId area;
  std::set<int> channels;
  std::int64_t from_us = 0;
  std::int64_t to_us = 0;

  bool full() const { return static_cast<int>(channels.size()) == kChannelCount; }
};

using AttackScript = std::variant<ReplayAttack, WormholeAttack, JamAttack>;

std::string_view attack_kind(const AttackScript& a);

struct Scenario {
  std::int64_t period_ms = kDefaultPeriodMs;
  unsigned skew_periods = 0;
  std::int64_t ttl_ms = sessions::kDefaultTtlMs;
  int fallback_misses = kDefaultFallbackMisses;
  std::int64_t duration_us = 0;
  std::vector<BeaconSpec> beacons;
  std::vector<std::pair<BeaconId, BeaconId>> adjacency;
  std::vector<UserSpec> users;
  std::vector<AttackScript> attacks;

  /// Parses and validates. Throws ScenarioError.
  static Scenario from_json(const nlohmann::json& doc);
  static Scenario parse(std::string_view text);
  static Scenario load(const std::filesystem::path& path);

  nlohmann::json to_json() const;

  /// Re-checks every invariant (used after programmatic edits). Throws ScenarioError.
  void validate() const;

  const BeaconSpec& beacon(const BeaconId& id) const;
  std::optional<std::size_t> beacon_index(const BeaconId& id) const;
  sessions::AdjacencyGraph adjacency_graph() const;
};

}  // namespace locauth::sim
