#include "locauth/sim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "locauth/abe/policy.hpp"

namespace locauth::sim {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw ScenarioError(what); }

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + ": missing field '" + key + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(where + ": not finite");
  return d;
}

std::int64_t integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where + ": expected an integer");
  return v.get<std::int64_t>();
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where + ": expected a string");
  return v.get<std::string>();
}

void only_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) fail(where + ": expected an object");
  for (const auto& [k, _] : obj.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) fail(where + ": unknown field '" + k + "'");
  }
}

double ms_of(std::int64_t us) { return static_cast<double>(us) / 1000.0; }

AttackTarget parse_target(const json& v, const std::string& where) {
  const auto s = text(v, where);
  if (s == "broadcast") return AttackTarget::Broadcast;
  if (s == "login") return AttackTarget::Login;
  if (s == "both") return AttackTarget::Both;
  fail(where + ": target must be broadcast, login or both");
}

class BeaconResolver {
 public:
  explicit BeaconResolver(const std::vector<BeaconSpec>& beacons) {
    for (const auto& b : beacons) {
      by_name_.emplace(b.name, b.id);
      ids_.insert(b.id);
    }
  }

  BeaconId operator()(const json& v, const std::string& where) const {
    const auto s = text(v, where);
    if (auto it = by_name_.find(s); it != by_name_.end()) return it->second;
    BeaconId id;
    try {
      id = BeaconId::parse(s);
    } catch (const std::exception&) {
      fail(where + ": unknown beacon '" + s + "'");
    }
    if (!ids_.contains(id)) fail(where + ": unknown beacon '" + s + "'");
    return id;
  }

 private:
  std::map<std::string, BeaconId> by_name_;
  std::set<BeaconId> ids_;
};

BeaconSpec parse_beacon(const json& j, std::size_t i) {
  const std::string where = "beacons[" + std::to_string(i) + "]";
  only_keys(j, {"id", "name", "x_m", "y_m", "range_m", "interval_ms", "policy"}, where);
  BeaconSpec b;
  try {
    b.id = BeaconId::parse(text(require(j, "id", where), where + ".id"));
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    fail(where + ".id: " + e.what());
  }
  b.name = j.contains("name") ? text(j["name"], where + ".name") : b.id.to_string();
  b.pos = {number(require(j, "x_m", where), where + ".x_m"),
           number(require(j, "y_m", where), where + ".y_m")};
  if (j.contains("range_m")) b.range_m = number(j["range_m"], where + ".range_m");
  if (j.contains("interval_ms")) b.interval_us = ms_to_us(number(j["interval_ms"], where + ".interval_ms"));
  b.policy = text(require(j, "policy", where), where + ".policy");
  return b;
}

UserSpec parse_user(const json& j, std::size_t i) {
  const std::string where = "users[" + std::to_string(i) + "]";
  only_keys(j, {"username", "password", "attrs", "trace"}, where);
  UserSpec u;
  u.username = text(require(j, "username", where), where + ".username");
  u.password = text(require(j, "password", where), where + ".password");
  const auto& attrs = require(j, "attrs", where);
  if (!attrs.is_array()) fail(where + ".attrs: expected an array");
  for (const auto& a : attrs) u.attrs.push_back(text(a, where + ".attrs"));
  const auto& trace = require(j, "trace", where);
  if (!trace.is_array()) fail(where + ".trace: expected an array");
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const std::string w = where + ".trace[" + std::to_string(k) + "]";
    only_keys(trace[k], {"t_ms", "x_m", "y_m"}, w);
    u.trace.push_back({ms_to_us(number(require(trace[k], "t_ms", w), w + ".t_ms")),
                       {number(require(trace[k], "x_m", w), w + ".x_m"),
                        number(require(trace[k], "y_m", w), w + ".y_m")}});
  }
  return u;
}

AttackScript parse_attack(const json& j, std::size_t i, const BeaconResolver& beacon) {
  const std::string where = "attacks[" + std::to_string(i) + "]";
  if (!j.is_object()) fail(where + ": expected an object");
  const auto kind = text(require(j, "kind", where), where + ".kind");
  if (kind == "replay") {
    only_keys(j, {"kind", "beacon", "record_at_ms", "delta_ms", "target", "control"}, where);
    ReplayAttack a;
    a.beacon = beacon(require(j, "beacon", where), where + ".beacon");
    if (j.contains("record_at_ms")) a.record_at_us = ms_to_us(number(j["record_at_ms"], where));
    if (j.contains("delta_ms")) a.delta_us = ms_to_us(number(j["delta_ms"], where + ".delta_ms"));
    if (j.contains("target")) a.target = parse_target(j["target"], where + ".target");
    if (j.contains("control")) {
      if (!j["control"].is_boolean()) fail(where + ".control: expected a boolean");
      a.control = j["control"].get<bool>();
    }
    return a;
  }
  if (kind == "wormhole") {
    only_keys(j, {"kind", "from", "to", "record_at_ms", "tunnel_delay_ms", "target"}, where);
    WormholeAttack a;
    a.from = beacon(require(j, "from", where), where + ".from");
    a.to = beacon(require(j, "to", where), where + ".to");
    if (j.contains("record_at_ms")) a.record_at_us = ms_to_us(number(j["record_at_ms"], where));
    if (j.contains("tunnel_delay_ms")) {
      a.tunnel_delay_us = ms_to_us(number(j["tunnel_delay_ms"], where + ".tunnel_delay_ms"));
    }
    if (j.contains("target")) a.target = parse_target(j["target"], where + ".target");
    return a;
  }
  if (kind == "jam") {
    only_keys(j, {"kind", "area", "channels", "from_ms", "to_ms"}, where);
    JamAttack a;
    a.area = beacon(require(j, "area", where), where + ".area");
    const auto& ch = require(j, "channels", where);
    if (!ch.is_array()) fail(where + ".channels: expected an array");
    for (const auto& c : ch) a.channels.insert(static_cast<int>(integer(c, where + ".channels")));
    a.from_us = ms_to_us(number(require(j, "from_ms", where), where + ".from_ms"));
    a.to_us = ms_to_us(number(require(j, "to_ms", where), where + ".to_ms"));
    return a;
  }
  fail(where + ".kind: unknown attack kind '" + kind + "'");
}

}  // namespace

std::int64_t ms_to_us(double ms) {
  if (!std::isfinite(ms) || std::fabs(ms) > 9.0e12) throw ScenarioError("time out of range");
  return std::llround(ms * 1000.0);
}

std::string_view to_string(AttackTarget t) {
  switch (t) {
    case AttackTarget::Broadcast: return "broadcast";
    case AttackTarget::Login: return "login";
    case AttackTarget::Both: return "both";
  }
  return "?";
}

std::string_view attack_kind(const AttackScript& a) {
  if (std::holds_alternative<ReplayAttack>(a)) return "replay";
  if (std::holds_alternative<WormholeAttack>(a)) return "wormhole";
  return "jam";
}

Scenario Scenario::from_json(const json& doc) {
  only_keys(doc, {"schema", "token", "session", "client", "beacons", "adjacency", "users",
                  "attacks", "duration_ms"},
            "scenario");
  if (integer(require(doc, "schema", "scenario"), "schema") != kScenarioSchema) {
    fail("schema: unsupported version (expected 1)");
  }
  Scenario s;
  if (doc.contains("token")) {
    const auto& t = doc["token"];
    only_keys(t, {"period_ms", "skew_periods"}, "token");
    if (t.contains("period_ms")) s.period_ms = integer(t["period_ms"], "token.period_ms");
    if (t.contains("skew_periods")) {
      const auto skew = integer(t["skew_periods"], "token.skew_periods");
      if (skew < 0 || skew > 1) fail("token.skew_periods: must be 0 or 1");
      s.skew_periods = static_cast<unsigned>(skew);
    }
  }
  if (doc.contains("session")) {
    const auto& t = doc["session"];
    only_keys(t, {"ttl_ms"}, "session");
    if (t.contains("ttl_ms")) s.ttl_ms = integer(t["ttl_ms"], "session.ttl_ms");
  }
  if (doc.contains("client")) {
    const auto& c = doc["client"];
    only_keys(c, {"fallback_misses"}, "client");
    if (c.contains("fallback_misses")) {
      s.fallback_misses = static_cast<int>(integer(c["fallback_misses"], "client.fallback_misses"));
    }
  }
  const auto& beacons = require(doc, "beacons", "scenario");
  if (!beacons.is_array()) fail("beacons: expected an array");
  for (std::size_t i = 0; i < beacons.size(); ++i) s.beacons.push_back(parse_beacon(beacons[i], i));

  // Names must be unique before references can be resolved by name.
  std::set<std::string> names;
  for (const auto& b : s.beacons) {
    if (!names.insert(b.name).second) fail("beacons: duplicate beacon name '" + b.name + "'");
  }
  const BeaconResolver resolve(s.beacons);

  if (doc.contains("adjacency")) {
    const auto& adj = doc["adjacency"];
    if (!adj.is_array()) fail("adjacency: expected an array");
    for (std::size_t i = 0; i < adj.size(); ++i) {
      const std::string where = "adjacency[" + std::to_string(i) + "]";
      if (!adj[i].is_array() || adj[i].size() != 2) fail(where + ": expected a pair");
      s.adjacency.emplace_back(resolve(adj[i][0], where), resolve(adj[i][1], where));
    }
  }
  const auto& users = require(doc, "users", "scenario");
  if (!users.is_array()) fail("users: expected an array");
  for (std::size_t i = 0; i < users.size(); ++i) s.users.push_back(parse_user(users[i], i));
  if (doc.contains("attacks")) {
    const auto& attacks = doc["attacks"];
    if (!attacks.is_array()) fail("attacks: expected an array");
    for (std::size_t i = 0; i < attacks.size(); ++i) {
      s.attacks.push_back(parse_attack(attacks[i], i, resolve));
    }
  }
  s.duration_us = ms_to_us(number(require(doc, "duration_ms", "scenario"), "duration_ms"));
  s.validate();
  return s;
}

Scenario Scenario::parse(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  return from_json(doc);
}

Scenario Scenario::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Scenario::validate() const {
  if (period_ms <= 0) fail("token.period_ms: must be positive");
  if (ttl_ms <= 0) fail("session.ttl_ms: must be positive");
  if (fallback_misses <= 0) fail("client.fallback_misses: must be positive");
  if (duration_us <= 0) fail("duration_ms: must be positive");
  if (beacons.empty()) fail("beacons: at least one beacon is required");

  std::set<BeaconId> ids;
  for (const auto& b : beacons) {
    const std::string where = "beacon '" + b.name + "'";
    if (!ids.insert(b.id).second) fail(where + ": duplicate id");
    if (!std::isfinite(b.pos.x_m) || !std::isfinite(b.pos.y_m)) fail(where + ": position not finite");
    if (!(b.range_m > 0) || !std::isfinite(b.range_m)) fail(where + ": range_m must be positive");
    if (b.interval_us <= 0) fail(where + ": interval_ms must be positive");
    try {
      (void)abe::parse_policy(b.policy);
    } catch (const std::exception& e) {
      fail(where + ": invalid policy: " + e.what());
    }
  }
  for (const auto& [a, b] : adjacency) {
    if (!ids.contains(a) || !ids.contains(b)) fail("adjacency: unknown beacon");
    if (a == b) fail("adjacency: self-loop on " + beacon(a).name);
  }

  std::set<std::string> usernames;
  for (const auto& u : users) {
    if (u.username.empty()) fail("users: empty username");
    if (!usernames.insert(u.username).second) fail("users: duplicate username '" + u.username + "'");
    try {
      validate_trace(u.trace);
    } catch (const std::invalid_argument& e) {
      fail("user '" + u.username + "': " + e.what());
    }
  }

  for (std::size_t i = 0; i < attacks.size(); ++i) {
    const std::string where = "attacks[" + std::to_string(i) + "]";
    if (const auto* r = std::get_if<ReplayAttack>(&attacks[i])) {
      if (!ids.contains(r->beacon)) fail(where + ": unknown beacon");
      if (r->record_at_us < 0) fail(where + ": record_at_ms must be >= 0");
      if (!r->control && r->delta_us <= 0) {
        fail(where + ": delta_ms must be > 0 (use \"control\": true for in-window replays)");
      }
    } else if (const auto* w = std::get_if<WormholeAttack>(&attacks[i])) {
      if (!ids.contains(w->from) || !ids.contains(w->to)) fail(where + ": unknown beacon");
      if (w->record_at_us < 0) fail(where + ": record_at_ms must be >= 0");
      if (w->tunnel_delay_us < 0) fail(where + ": tunnel_delay_ms must be >= 0");
      if (w->from != w->to) {
        const auto& l = beacon(w->from);
        const auto& p = beacon(w->to);
        if (distance(l.pos, p.pos) <= l.range_m + p.range_m) {
          fail(where + ": ranges of '" + l.name + "' and '" + p.name + "' overlap");
        }
      }
    } else {
      const auto& j = std::get<JamAttack>(attacks[i]);
      if (!ids.contains(j.area)) fail(where + ": unknown beacon");
      if (j.channels.empty()) fail(where + ": channels must be non-empty");
      for (int c : j.channels) {
        if (c < 0 || c >= kChannelCount) fail(where + ": channel out of range 0..2");
      }
      if (j.from_us < 0 || j.to_us <= j.from_us) fail(where + ": need 0 <= from_ms < to_ms");
    }
  }
}

json Scenario::to_json() const {
  json doc = json::object();
  doc["schema"] = kScenarioSchema;
  doc["token"] = {{"period_ms", period_ms}, {"skew_periods", skew_periods}};
  doc["session"] = {{"ttl_ms", ttl_ms}};
  doc["client"] = {{"fallback_misses", fallback_misses}};
  doc["beacons"] = json::array();
  for (const auto& b : beacons) {
    doc["beacons"].push_back({{"id", b.id.to_string()},
                              {"name", b.name},
                              {"x_m", b.pos.x_m},
                              {"y_m", b.pos.y_m},
                              {"range_m", b.range_m},
                              {"interval_ms", ms_of(b.interval_us)},
                              {"policy", b.policy}});
  }
  doc["adjacency"] = json::array();
  for (const auto& [a, b] : adjacency) doc["adjacency"].push_back({a.to_string(), b.to_string()});
  doc["users"] = json::array();
  for (const auto& u : users) {
    json trace = json::array();
    for (const auto& w : u.trace) {
      trace.push_back({{"t_ms", ms_of(w.t_us)}, {"x_m", w.pos.x_m}, {"y_m", w.pos.y_m}});
    }
    doc["users"].push_back(
        {{"username", u.username}, {"password", u.password}, {"attrs", u.attrs}, {"trace", trace}});
  }
  doc["attacks"] = json::array();
  for (const auto& a : attacks) {
    if (const auto* r = std::get_if<ReplayAttack>(&a)) {
      doc["attacks"].push_back({{"kind", "replay"},
                                {"beacon", r->beacon.to_string()},
                                {"record_at_ms", ms_of(r->record_at_us)},
                                {"delta_ms", ms_of(r->delta_us)},
                                {"target", to_string(r->target)},
                                {"control", r->control}});
    } else if (const auto* w = std::get_if<WormholeAttack>(&a)) {
      doc["attacks"].push_back({{"kind", "wormhole"},
                                {"from", w->from.to_string()},
                                {"to", w->to.to_string()},
                                {"record_at_ms", ms_of(w->record_at_us)},
                                {"tunnel_delay_ms", ms_of(w->tunnel_delay_us)},
                                {"target", to_string(w->target)}});
    } else {
      const auto& j = std::get<JamAttack>(a);
      doc["attacks"].push_back({{"kind", "jam"},
                                {"area", j.area.to_string()},
                                {"channels", j.channels},
                                {"from_ms", ms_of(j.from_us)},
                                {"to_ms", ms_of(j.to_us)}});
    }
  }
  doc["duration_ms"] = ms_of(duration_us);
  return doc;
}

const BeaconSpec& Scenario::beacon(const BeaconId& id) const {
  for (const auto& b : beacons) {
    if (b.id == id) return b;
  }
  throw ScenarioError("unknown beacon " + id.to_string());
}

std::optional<std::size_t> Scenario::beacon_index(const BeaconId& id) const {
  for (std::size_t i = 0; i < beacons.size(); ++i) {
    if (beacons[i].id == id) return i;
  }
  return std::nullopt;
}

sessions::AdjacencyGraph Scenario::adjacency_graph() const {
  sessions::AdjacencyGraph g;
  for (const auto& [a, b] : adjacency) g.add_edge(a, b);
  return g;
}

}  // namespace locauth::sim
