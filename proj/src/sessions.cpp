#include "locauth/sessions.hpp"

#include <stdexcept>

namespace locauth::sessions {

void AdjacencyGraph::add_edge(const BeaconId& a, const BeaconId& b) {
  if (a == b) throw std::invalid_argument("adjacency graph cannot contain self-loops");
  edges_.insert(a < b ? std::pair{a, b} : std::pair{b, a});
}

bool AdjacencyGraph::adjacent(const BeaconId& a, const BeaconId& b) const {
  if (a == b) return false;
  return edges_.contains(a < b ? std::pair{a, b} : std::pair{b, a});
}

std::string_view to_string(TravelError e) {
  switch (e) {
    case TravelError::SessionExpired: return "SessionExpired";
    case TravelError::NonAdjacent: return "NonAdjacent";
  }
  return "?";
}

SessionStore::SessionStore(SessionConfig config) : config_(config) {
  if (config_.ttl_ms <= 0) throw std::invalid_argument("ttl_ms must be positive");
}

const Session& SessionStore::establish(const protocol::Authenticated& login, const Clock& clock) {
  const auto now = clock.now_ms();
  Session s{login.username, login.beacon, now, now + config_.ttl_ms, FullLogin{}};
  return sessions_.insert_or_assign(login.username, std::move(s)).first->second;
}

TravelResult SessionStore::travel(const protocol::Authenticated& login,
                                  const AdjacencyGraph& graph, const Clock& clock) {
  const auto now = clock.now_ms();
  auto it = sessions_.find(login.username);
  if (it == sessions_.end() || it->second.expires_at_ms <= now) {
    return TravelRejected{TravelError::SessionExpired};
  }
  Session& s = it->second;
  if (login.beacon == s.beacon) {
    if (config_.sliding_expiry) s.expires_at_ms = now + config_.ttl_ms;
    return s;
  }
  if (!graph.adjacent(s.beacon, login.beacon)) return TravelRejected{TravelError::NonAdjacent};

  s.origin = Traveled{s.beacon};
  s.beacon = login.beacon;
  if (config_.sliding_expiry) s.expires_at_ms = now + config_.ttl_ms;
  return s;
}

std::optional<Session> SessionStore::lookup(std::string_view username, const Clock& clock) const {
  auto it = sessions_.find(username);
  if (it == sessions_.end() || it->second.expires_at_ms <= clock.now_ms()) return std::nullopt;
  return it->second;
}

bool SessionStore::revoke(std::string_view username) {
  auto it = sessions_.find(username);
  if (it == sessions_.end()) return false;
  sessions_.erase(it);
  return true;
}

std::vector<Session> SessionStore::sweep_expired(const Clock& clock) {
  const auto now = clock.now_ms();
  std::vector<Session> out;
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    if (it->second.expires_at_ms <= now) {
      out.push_back(std::move(it->second));
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
  return out;
}

}  // namespace locauth::sessions
