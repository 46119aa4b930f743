#include "locauth/sim/world.hpp"

#include <functional>
#include <queue>
#include <stdexcept>
#include <variant>

#include "locauth/abe/attribute.hpp"
#include "locauth/crypto.hpp"
#include "locauth/sessions.hpp"

namespace locauth::sim {

namespace {

constexpr std::string_view kBeaconSource = "beacon";

std::string attack_tag(std::size_t i) { return "attack:" + std::to_string(i); }
std::string user_tag(const std::string& name) { return "user:" + name; }

std::string short_digest(ByteView wire) {
  const auto d = crypto::sha256(wire);
  return to_hex(ByteView(d.data(), 8));
}

std::int64_t us_to_ms(std::int64_t t_us) { return t_us / 1000; }

// A broadcast as it travels through the medium. Honest ticks are encrypted
// on first use; the tick's forked RNG makes the bytes independent of when.
struct Broadcast {
  BeaconId beacon;
  std::uint64_t period = 0;
  std::int64_t tick_t_us = 0;
  std::uint64_t tick = 0;
  std::optional<Bytes> wire;
};
using BroadcastPtr = std::shared_ptr<Broadcast>;

struct TickEv {
  std::size_t beacon;
  std::uint64_t k;
};
struct DeliverBroadcastEv {
  std::size_t user;
  std::size_t area;
  BroadcastPtr msg;
  std::string source;
};
struct DeliverLoginEv {
  std::size_t beacon;
  Bytes wire;
  std::string origin;
  std::string trigger;
};
struct InjectBroadcastEv {
  std::size_t attack;
  std::size_t area;
  BroadcastPtr msg;
};
struct InjectLoginEv {
  std::size_t attack;
  std::size_t beacon;
  Bytes wire;
  std::uint64_t period;
};
struct JamEv {
  std::size_t attack;
  bool start;
};
struct SweepEv {};

using Payload =
    std::variant<TickEv, DeliverBroadcastEv, DeliverLoginEv, InjectBroadcastEv, InjectLoginEv,
                 JamEv, SweepEv>;

struct Queued {
  std::int64_t t_us;
  std::uint64_t seq;
  Payload payload;
};

struct Later {
  bool operator()(const Queued& a, const Queued& b) const {
    return a.t_us != b.t_us ? a.t_us > b.t_us : a.seq > b.seq;
  }
};

struct Recorder {
  bool have_broadcast = false;
  bool have_login = false;
};

struct ClientState {
  protocol::PasswordVerifier verifier{};
  std::uint64_t replies = 0;
  // A device answers each (beacon, period) header at most once per period of
  // its own clock: own period -> headers handled in it.
  std::uint64_t own_period = 0;
  std::set<std::pair<BeaconId, std::uint64_t>> handled;
  // Consecutive jammed expected broadcasts per area, and whether fallback fired.
  std::map<std::size_t, int> misses;
};

}  // namespace

struct World::Impl {
  Scenario scenario;
  protocol::LocAuthService service;
  std::map<std::string, protocol::ClientBundle> bundles;
  std::set<std::string> weak;
  Rng root;
  sessions::SessionStore sessions;
  sessions::AdjacencyGraph graph;
  std::vector<ClientState> clients;
  std::vector<Recorder> recorders;
  std::map<std::size_t, std::set<std::size_t>> active_jams;  // area -> attack indices
  ManualClock clock;
  EventLog log;
  std::priority_queue<Queued, std::vector<Queued>, Later> queue;
  std::uint64_t next_seq = 0;
  std::int64_t until_us = 0;
  bool ran = false;

  Impl(Scenario s, Provisioning p, std::uint64_t seed)
      : scenario(std::move(s)),
        service(std::move(p.service)),
        bundles(std::move(p.bundles)),
        weak(std::move(p.weak_passwords)),
        root(Rng::from_seed(seed)),
        sessions(sessions::SessionConfig{scenario.ttl_ms, true}),
        graph(scenario.adjacency_graph()) {
    for (const auto& b : scenario.beacons) service.register_backend(b.id, b.policy);
    for (const auto& u : scenario.users) {
      auto it = bundles.find(u.username);
      if (it == bundles.end()) throw ScenarioError("user '" + u.username + "' is not registered");
      ClientState c;
      c.verifier = protocol::derive_verifier(u.password, it->second.salt);
      clients.push_back(std::move(c));
    }
    recorders.resize(scenario.attacks.size());
  }

  void push(std::int64_t t_us, Payload p) {
    if (t_us < until_us) queue.push({t_us, next_seq++, std::move(p)});
  }

  const std::string& label(std::size_t beacon) const { return scenario.beacons[beacon].name; }
  const std::string& label(const BeaconId& id) const { return scenario.beacon(id).name; }

  std::uint64_t period_at(std::int64_t t_us) const {
    return current_period(us_to_ms(t_us), scenario.period_ms).value;
  }

  std::int64_t period_start_us(std::uint64_t period) const {
    return static_cast<std::int64_t>(period) * scenario.period_ms * 1000;
  }

  Point2D user_pos(std::size_t u, std::int64_t t_us) const {
    return position_at(scenario.users[u].trace, t_us);
  }

  bool user_in_range(std::size_t u, std::size_t b, std::int64_t t_us) const {
    const auto& beacon = scenario.beacons[b];
    return in_range(beacon.pos, beacon.range_m, user_pos(u, t_us));
  }

  bool jammed(std::size_t area) const {
    auto it = active_jams.find(area);
    if (it == active_jams.end()) return false;
    std::set<int> channels;
    for (std::size_t a : it->second) {
      const auto& jam = std::get<JamAttack>(scenario.attacks[a]);
      channels.insert(jam.channels.begin(), jam.channels.end());
    }
    return static_cast<int>(channels.size()) >= kChannelCount;
  }

  // Beacon the attacker listens at, if attack `i` records anything.
  std::optional<std::size_t> record_area(std::size_t i) const {
    const auto& a = scenario.attacks[i];
    if (const auto* r = std::get_if<ReplayAttack>(&a)) return scenario.beacon_index(r->beacon);
    if (const auto* w = std::get_if<WormholeAttack>(&a)) return scenario.beacon_index(w->from);
    return std::nullopt;
  }

  std::int64_t record_at(std::size_t i) const {
    const auto& a = scenario.attacks[i];
    if (const auto* r = std::get_if<ReplayAttack>(&a)) return r->record_at_us;
    return std::get<WormholeAttack>(a).record_at_us;
  }

  AttackTarget target(std::size_t i) const {
    const auto& a = scenario.attacks[i];
    if (const auto* r = std::get_if<ReplayAttack>(&a)) return r->target;
    return std::get<WormholeAttack>(a).target;
  }

  // When and where attack `i` re-sends something recorded at `t_us` in `period`.
  std::pair<std::int64_t, std::size_t> resend(std::size_t i, std::int64_t t_us,
                                              std::uint64_t period) const {
    const auto& a = scenario.attacks[i];
    if (const auto* r = std::get_if<ReplayAttack>(&a)) {
      return {period_start_us(period + 1) + r->delta_us, *scenario.beacon_index(r->beacon)};
    }
    const auto& w = std::get<WormholeAttack>(a);
    return {t_us + w.tunnel_delay_us, *scenario.beacon_index(w.to)};
  }

  const Bytes& materialize(Broadcast& b) {
    if (!b.wire) {
      const ManualClock at(us_to_ms(b.tick_t_us));
      auto rng = root.fork("tick", *scenario.beacon_index(b.beacon), b.tick);
      b.wire = service.broadcast_step(b.beacon, at, rng).encode();
    }
    return *b.wire;
  }

  // Logs AttackSkipped when the re-send would lie in the past.
  std::optional<std::pair<std::int64_t, std::size_t>> plan_resend(std::size_t i, std::int64_t t_us,
                                                                  std::uint64_t period,
                                                                  std::string_view what) {
    const auto plan = resend(i, t_us, period);
    if (plan.first < t_us) {
      auto& e = log.append(t_us, "AttackSkipped");
      e["attack"] = i;
      e["what"] = what;
      e["reason"] = "re-send time precedes the recording";
      return std::nullopt;
    }
    return plan;
  }

  void on_tick(std::int64_t t, const TickEv& ev) {
    const auto& beacon = scenario.beacons[ev.beacon];
    const auto period = period_at(t);
    auto& e = log.append(t, "BeaconTick");
    e["beacon"] = beacon.name;
    e["tick"] = ev.k;
    e["period"] = period;

    auto msg = std::make_shared<Broadcast>(Broadcast{beacon.id, period, t, ev.k, std::nullopt});

    for (std::size_t i = 0; i < recorders.size(); ++i) {
      if (record_area(i) != ev.beacon || recorders[i].have_broadcast) continue;
      if (!targets_broadcast(target(i)) || t < record_at(i) || jammed(ev.beacon)) continue;
      recorders[i].have_broadcast = true;
      const auto& wire = materialize(*msg);
      auto& r = log.append(t, "AttackRecorded");
      r["attack"] = i;
      r["what"] = "broadcast";
      r["area"] = beacon.name;
      r["period"] = period;
      r["digest"] = short_digest(wire);
      if (const auto plan = plan_resend(i, t, period, "broadcast")) {
        // Attacker keeps only the recorded bytes.
        auto copy = std::make_shared<Broadcast>(Broadcast{beacon.id, period, t, ev.k, wire});
        push(plan->first, InjectBroadcastEv{i, plan->second, std::move(copy)});
      }
    }

    for (std::size_t u = 0; u < scenario.users.size(); ++u) {
      if (user_in_range(u, ev.beacon, t)) {
        push(t, DeliverBroadcastEv{u, ev.beacon, msg, std::string(kBeaconSource)});
      }
    }
    push(static_cast<std::int64_t>(ev.k + 1) * beacon.interval_us, TickEv{ev.beacon, ev.k + 1});
  }

  void on_deliver_broadcast(std::int64_t t, DeliverBroadcastEv& ev) {
    const auto& user = scenario.users[ev.user];
    auto& client = clients[ev.user];
    const bool honest_tick = ev.source == kBeaconSource;

    if (jammed(ev.area)) {
      auto& e = log.append(t, "BroadcastJammed");
      e["user"] = user.username;
      e["area"] = label(ev.area);
      e["source"] = ev.source;
      if (honest_tick && ++client.misses[ev.area] == scenario.fallback_misses) {
        auto& f = log.append(t, "FallbackRequired");
        f["user"] = user.username;
        f["beacon"] = label(ev.area);
        f["missed"] = scenario.fallback_misses;
      }
      return;
    }
    if (honest_tick) client.misses[ev.area] = 0;

    auto& d = log.append(t, "BroadcastDelivered");
    d["user"] = user.username;
    d["area"] = label(ev.area);
    d["source"] = ev.source;
    d["beacon"] = label(ev.msg->beacon);
    d["period"] = ev.msg->period;

    const auto now_period = period_at(t);
    if (now_period != client.own_period) {
      client.own_period = now_period;
      client.handled.clear();
    }
    if (!client.handled.emplace(ev.msg->beacon, ev.msg->period).second) return;

    protocol::ClientResult result = protocol::NoAction{protocol::NoActionReason::IntegrityFailure};
    try {
      const auto msg = protocol::BroadcastMessage::decode(materialize(*ev.msg));
      auto rng = root.fork("client", ev.user, client.replies++);
      result = protocol::client_handle_broadcast(msg, bundles.at(user.username), client.verifier,
                                                 service.params(), clock, scenario.period_ms, rng);
    } catch (const DecodeError&) {
    }

    if (const auto* none = std::get_if<protocol::NoAction>(&result)) {
      auto& e = log.append(t, "ClientNoAction");
      e["user"] = user.username;
      e["beacon"] = label(ev.msg->beacon);
      e["period"] = ev.msg->period;
      e["reason"] = protocol::to_string(none->reason);
      return;
    }
    const auto& login = std::get<protocol::LoginMessage>(result);
    Bytes wire = login.encode();
    auto& s = log.append(t, "LoginSent");
    s["user"] = user.username;
    s["area"] = label(ev.area);
    s["beacon"] = label(login.beacon);
    s["period"] = login.period.value;
    s["trigger"] = ev.source;
    s["digest"] = short_digest(wire);

    if (jammed(ev.area)) {
      auto& e = log.append(t, "LoginDropped");
      e["area"] = label(ev.area);
      e["origin"] = user_tag(user.username);
      return;
    }
    // Attackers record honest traffic only, not replies their own injections provoked.
    for (std::size_t i = 0; i < recorders.size() && honest_tick; ++i) {
      if (record_area(i) != ev.area || recorders[i].have_login) continue;
      if (!targets_login(target(i)) || t < record_at(i)) continue;
      recorders[i].have_login = true;
      auto& r = log.append(t, "AttackRecorded");
      r["attack"] = i;
      r["what"] = "login";
      r["area"] = label(ev.area);
      r["period"] = login.period.value;
      r["digest"] = short_digest(wire);
      if (const auto plan = plan_resend(i, t, login.period.value, "login")) {
        push(plan->first, InjectLoginEv{i, plan->second, wire, login.period.value});
      }
    }
    push(t, DeliverLoginEv{ev.area, std::move(wire), user_tag(user.username), ev.source});
  }

  std::string_view inject_kind(std::size_t attack) const {
    return std::holds_alternative<ReplayAttack>(scenario.attacks[attack]) ? "AttackReplayed"
                                                                          : "AttackTunneled";
  }

  void on_inject_broadcast(std::int64_t t, InjectBroadcastEv& ev) {
    auto& e = log.append(t, inject_kind(ev.attack));
    e["attack"] = ev.attack;
    e["what"] = "broadcast";
    e["area"] = label(ev.area);
    e["beacon"] = label(ev.msg->beacon);
    e["period"] = ev.msg->period;
    e["current_period"] = period_at(t);
    for (std::size_t u = 0; u < scenario.users.size(); ++u) {
      if (user_in_range(u, ev.area, t)) {
        push(t, DeliverBroadcastEv{u, ev.area, ev.msg, attack_tag(ev.attack)});
      }
    }
  }

  void on_inject_login(std::int64_t t, InjectLoginEv& ev) {
    auto& e = log.append(t, inject_kind(ev.attack));
    e["attack"] = ev.attack;
    e["what"] = "login";
    e["area"] = label(ev.beacon);
    e["period"] = ev.period;
    e["current_period"] = period_at(t);
    if (jammed(ev.beacon)) {
      auto& d = log.append(t, "LoginDropped");
      d["area"] = label(ev.beacon);
      d["origin"] = attack_tag(ev.attack);
      return;
    }
    push(t, DeliverLoginEv{ev.beacon, std::move(ev.wire), attack_tag(ev.attack),
                           attack_tag(ev.attack)});
  }

  void on_deliver_login(std::int64_t t, DeliverLoginEv& ev) {
    const auto& beacon = scenario.beacons[ev.beacon];
    const auto result = service.verify_login(ev.wire, beacon.id, clock);
    if (!result.authenticated()) {
      auto& e = log.append(t, "Rejected");
      e["beacon"] = beacon.name;
      e["reason"] = protocol::to_string(result.reason());
      e["origin"] = ev.origin;
      e["trigger"] = ev.trigger;
      return;
    }
    const auto& auth = result.success();
    auto& e = log.append(t, "Authenticated");
    e["user"] = auth.username;
    e["beacon"] = beacon.name;
    e["period"] = auth.period.value;
    e["origin"] = ev.origin;
    e["trigger"] = ev.trigger;
    if (ev.origin != user_tag(auth.username)) {
      auto& v = log.append(t, "InvariantViolation");
      v["what"] = "login not sent by the authenticated user's device was accepted";
      v["origin"] = ev.origin;
    }
    on_authenticated(t, auth);
  }

  void on_authenticated(std::int64_t t, const protocol::Authenticated& auth) {
    const auto existing = sessions.lookup(auth.username, clock);
    if (!existing) {
      const auto& s = sessions.establish(auth, clock);
      auto& e = log.append(t, "SessionEstablished");
      e["user"] = s.username;
      e["beacon"] = label(s.beacon);
      e["expires_at_ms"] = s.expires_at_ms;
      push(s.expires_at_ms * 1000, SweepEv{});
      return;
    }
    const auto moved = sessions.travel(auth, graph, clock);
    if (const auto* rej = std::get_if<sessions::TravelRejected>(&moved)) {
      auto& e = log.append(t, "TravelRejected");
      e["user"] = auth.username;
      e["from"] = label(existing->beacon);
      e["to"] = label(auth.beacon);
      e["reason"] = sessions::to_string(rej->reason);
      // The old session is void; a later full login starts a fresh one.
      sessions.revoke(auth.username);
      return;
    }
    const auto& s = std::get<sessions::Session>(moved);
    if (s.beacon == existing->beacon) {
      auto& e = log.append(t, "SessionRefreshed");
      e["user"] = s.username;
      e["beacon"] = label(s.beacon);
      e["expires_at_ms"] = s.expires_at_ms;
    } else {
      auto& e = log.append(t, "SessionTraveled");
      e["user"] = s.username;
      e["from"] = label(existing->beacon);
      e["to"] = label(s.beacon);
      e["expires_at_ms"] = s.expires_at_ms;
    }
    push(s.expires_at_ms * 1000, SweepEv{});
  }

  void on_jam(std::int64_t t, const JamEv& ev) {
    const auto& jam = std::get<JamAttack>(scenario.attacks[ev.attack]);
    const auto area = *scenario.beacon_index(jam.area);
    if (ev.start) {
      active_jams[area].insert(ev.attack);
    } else {
      active_jams[area].erase(ev.attack);
    }
    auto& e = log.append(t, ev.start ? "JamStarted" : "JamEnded");
    e["attack"] = ev.attack;
    e["area"] = label(area);
    e["channels"] = jam.channels;
  }

  void on_sweep(std::int64_t t) {
    for (const auto& s : sessions.sweep_expired(clock)) {
      auto& e = log.append(t, "SessionExpired");
      e["user"] = s.username;
      e["beacon"] = label(s.beacon);
    }
  }

  // Everything a verdict needs to know about the attack, so that verdicts
  // can be computed from the log alone.
  void log_script(std::size_t i) {
    const auto& a = scenario.attacks[i];
    auto& e = log.append(0, "AttackScripted");
    e["attack"] = i;
    e["attack_kind"] = attack_kind(a);
    if (const auto* r = std::get_if<ReplayAttack>(&a)) {
      e["area"] = label(r->beacon);
      e["target"] = to_string(r->target);
      e["delta_us"] = r->delta_us;
      e["control"] = r->control;
    } else if (const auto* w = std::get_if<WormholeAttack>(&a)) {
      e["from"] = label(w->from);
      e["to"] = label(w->to);
      e["target"] = to_string(w->target);
      e["tunnel_delay_us"] = w->tunnel_delay_us;
    } else {
      const auto& j = std::get<JamAttack>(a);
      e["area"] = label(j.area);
      e["channels"] = j.channels;
      e["from_us"] = j.from_us;
      e["to_us"] = j.to_us;
      e["interval_us"] = scenario.beacon(j.area).interval_us;
      e["fallback_misses"] = scenario.fallback_misses;
    }
  }

  EventLog run(std::int64_t until) {
    if (ran) throw std::logic_error("World::run may only be called once");
    ran = true;
    until_us = until;

    for (const auto& u : scenario.users) {
      if (weak.contains(u.username)) log.append(0, "WeakPassword")["user"] = u.username;
    }
    for (std::size_t i = 0; i < scenario.attacks.size(); ++i) log_script(i);
    for (std::size_t b = 0; b < scenario.beacons.size(); ++b) push(0, TickEv{b, 0});
    for (std::size_t i = 0; i < scenario.attacks.size(); ++i) {
      if (const auto* jam = std::get_if<JamAttack>(&scenario.attacks[i])) {
        push(jam->from_us, JamEv{i, true});
        push(jam->to_us, JamEv{i, false});
      }
    }

    while (!queue.empty()) {
      Queued q = queue.top();
      queue.pop();
      clock.set(us_to_ms(q.t_us));
      const auto t = q.t_us;
      std::visit(
          [&](auto& ev) {
            using T = std::decay_t<decltype(ev)>;
            if constexpr (std::is_same_v<T, TickEv>) on_tick(t, ev);
            else if constexpr (std::is_same_v<T, DeliverBroadcastEv>) on_deliver_broadcast(t, ev);
            else if constexpr (std::is_same_v<T, DeliverLoginEv>) on_deliver_login(t, ev);
            else if constexpr (std::is_same_v<T, InjectBroadcastEv>) on_inject_broadcast(t, ev);
            else if constexpr (std::is_same_v<T, InjectLoginEv>) on_inject_login(t, ev);
            else if constexpr (std::is_same_v<T, JamEv>) on_jam(t, ev);
            else on_sweep(t);
          },
          q.payload);
    }
    log.append(until, "RunComplete")["until_us"] = until;
    return std::move(log);
  }
};

Provisioning provision(const Scenario& scenario, std::uint64_t seed, unsigned security_bits) {
  const Rng root = Rng::from_seed(seed);
  auto setup_rng = root.fork("setup");
  auto [params, msk] = abe::setup(security_bits, setup_rng);
  auto master = root.fork("master").bytes<kSecretSize>();
  Provisioning p{protocol::LocAuthService(std::move(params), std::move(msk), master,
                                          protocol::ServiceConfig{scenario.period_ms,
                                                                  scenario.skew_periods}),
                 {},
                 {}};
  for (std::size_t i = 0; i < scenario.users.size(); ++i) {
    const auto& u = scenario.users[i];
    abe::AttributeSet attrs;
    try {
      attrs = abe::parse_attribute_set(u.attrs);
    } catch (const std::exception& e) {
      throw ScenarioError("user '" + u.username + "': " + e.what());
    }
    auto rng = root.fork("register", i);
    protocol::Registration reg;
    try {
      reg = p.service.register_user(u.username, u.password, attrs, rng);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError("user '" + u.username + "': " + e.what());
    }
    if (reg.weak_password) p.weak_passwords.insert(u.username);
    p.bundles.emplace(u.username, std::move(reg.bundle));
  }
  return p;
}

World::World(Scenario scenario, Provisioning provisioning, std::uint64_t seed)
    : impl_(std::make_unique<Impl>(std::move(scenario), std::move(provisioning), seed)) {}
World::~World() = default;
World::World(World&&) noexcept = default;
World& World::operator=(World&&) noexcept = default;

const Scenario& World::scenario() const { return impl_->scenario; }

EventLog World::run(std::int64_t until_us) { return impl_->run(until_us); }
EventLog World::run() { return impl_->run(impl_->scenario.duration_us); }

EventLog simulate(const Scenario& scenario, std::uint64_t seed,
                  std::optional<std::int64_t> until_us) {
  World world(scenario, provision(scenario, seed), seed);
  return world.run(until_us.value_or(scenario.duration_us));
}

}  // namespace locauth::sim
