#pragma once

// Authenticated-session lifecycle: expiry, keepalive, and relocation of a
// session between adjacent beacon cells.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "locauth/protocol.hpp"
#include "locauth/tokens.hpp"

namespace locauth::sessions {

inline constexpr std::int64_t kDefaultTtlMs = 300'000;

struct FullLogin {
  friend bool operator==(const FullLogin&, const FullLogin&) = default;
};
struct Traveled {
  BeaconId from;
  friend bool operator==(const Traveled&, const Traveled&) = default;
};
using SessionOrigin = std::variant<FullLogin, Traveled>;

struct Session {
  std::string username;
  BeaconId beacon;
  std::int64_t established_at_ms = 0;
  std::int64_t expires_at_ms = 0;
  SessionOrigin origin;
};

/// Undirected beacon adjacency; symmetric, no self-loops.
class AdjacencyGraph {
 public:
  /// Throws std::invalid_argument on a self-loop.
  void add_edge(const BeaconId& a, const BeaconId& b);
  bool adjacent(const BeaconId& a, const BeaconId& b) const;
  std::size_t edge_count() const { return edges_.size(); }

 private:
  std::set<std::pair<BeaconId, BeaconId>> edges_;  // stored with first < second
};

enum class TravelError { SessionExpired, NonAdjacent };

std::string_view to_string(TravelError e);

struct TravelRejected {
  TravelError reason;
};

using TravelResult = std::variant<Session, TravelRejected>;

struct SessionConfig {
  std::int64_t ttl_ms = kDefaultTtlMs;
  /// Travel and keepalive push the deadline out to now + ttl.
  bool sliding_expiry = true;
};

/// At most one active session per user. Single writer.
class SessionStore {
 public:
  explicit SessionStore(SessionConfig config = {});

  const SessionConfig& config() const { return config_; }

  /// Starts a full-login session, replacing any previous one for the user.
  const Session& establish(const protocol::Authenticated& login, const Clock& clock);

  /// Moves the user's active session to `login.beacon` if that beacon is the
  /// current one or adjacent to it. A rejected travel leaves the store unchanged.
  TravelResult travel(const protocol::Authenticated& login, const AdjacencyGraph& graph,
                      const Clock& clock);

  /// The active (unexpired) session, if any.
  std::optional<Session> lookup(std::string_view username, const Clock& clock) const;

  /// Ends a session early (e.g. after a rejected travel). Returns whether one existed.
  bool revoke(std::string_view username);

  /// Removes and returns every session with expires_at <= now, ordered by username.
  std::vector<Session> sweep_expired(const Clock& clock);

  std::size_t size() const { return sessions_.size(); }

 private:
  SessionConfig config_;
  std::map<std::string, Session, std::less<>> sessions_;
};

}  // namespace locauth::sessions
