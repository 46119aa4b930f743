#include "locauth/adversary.hpp"

#include <functional>
#include <map>

#include "locauth/sim/world.hpp"

namespace locauth::adversary {

using sim::Event;
using sim::EventLog;

namespace {

const std::string& str(const Event& e, const char* key) {
  static const std::string empty;
  auto it = e.find(key);
  return it != e.end() && it->is_string() ? it->get_ref<const std::string&>() : empty;
}

std::int64_t t_of(const Event& e) { return e["t_us"].get<std::int64_t>(); }

bool is(const Event& e, std::string_view kind) { return str(e, "kind") == kind; }

bool is_outcome(const Event& e) { return is(e, "Authenticated") || is(e, "Rejected"); }

std::size_t count_if(const EventLog& log, const std::function<bool(const Event&)>& pred) {
  std::size_t n = 0;
  for (const auto& e : log.events()) n += pred(e);
  return n;
}

struct Check {
  GameOutcome& out;

  // Records `n` under `key` and fails the outcome (first failure wins) unless `ok`.
  void expect(bool ok, const std::string& key, std::size_t n, const std::string& why) {
    out.observed[key] = n;
    if (!ok && out.verdict == Verdict::Pass) {
      out.verdict = Verdict::Fail;
      out.reason = why;
    }
  }
};

// All outcomes of one kind of re-sent traffic must carry `want` ("Authenticated"
// or a RejectReason), and there must be at least one.
void expect_outcomes(const EventLog& log, Check& check, const std::string& label,
                     const std::function<bool(const Event&)>& select, std::string_view want) {
  std::size_t total = 0;
  std::size_t matching = 0;
  for (const auto& e : log.events()) {
    if (!is_outcome(e) || !select(e)) continue;
    ++total;
    const bool ok = want == "Authenticated" ? is(e, "Authenticated")
                                            : is(e, "Rejected") && str(e, "reason") == want;
    matching += ok;
  }
  check.expect(total > 0, label + "_outcomes", total, label + ": nothing reached the service");
  check.expect(matching == total, label + "_" + std::string(want), matching,
               label + ": expected every outcome to be " + std::string(want));
}

const Event* find_event(const EventLog& log, std::string_view kind, std::size_t attack,
                        std::string_view what) {
  for (const auto& e : log.events()) {
    if (is(e, kind) && e.value("attack", std::int64_t{-1}) == static_cast<std::int64_t>(attack) &&
        str(e, "what") == what) {
      return &e;
    }
  }
  return nullptr;
}

bool targets(const Event& script, std::string_view what) {
  const auto& t = str(script, "target");
  return t == "both" || t == what;
}

// Shared by replay and wormhole: judge the re-sent broadcast and login.
void judge_resend(const EventLog& log, const Event& script, std::size_t i,
                  std::string_view resend_kind, bool control_allowed, GameOutcome& out) {
  Check check{out};
  const std::string tag = "attack:" + std::to_string(i);

  for (std::string_view what : {"broadcast", "login"}) {
    if (!targets(script, what)) continue;
    const std::string w(what);
    const Event* sent = find_event(log, resend_kind, i, what);
    check.expect(find_event(log, "AttackRecorded", i, what) != nullptr, w + "_recorded",
                 find_event(log, "AttackRecorded", i, what) != nullptr,
                 w + ": attacker recorded nothing");
    check.expect(sent != nullptr, w + "_resent", sent != nullptr, w + ": never re-sent");
    if (sent == nullptr) continue;

    // In-window at the same place: nothing about the location or time was forged.
    const bool in_window = (*sent)["period"] == (*sent)["current_period"];
    const bool control = control_allowed && in_window;
    out.control = out.control || control;

    if (what == "broadcast") {
      const auto replies = count_if(log, [&](const Event& e) {
        return is(e, "LoginSent") && str(e, "trigger") == tag;
      });
      check.expect(replies > 0, "honest_replies", replies,
                   "no honest device answered the re-sent broadcast");
      expect_outcomes(
          log, check, "reply",
          [&](const Event& e) {
            return str(e, "trigger") == tag && str(e, "origin").starts_with("user:");
          },
          control ? "Authenticated" : "TokenMismatch");
    } else {
      expect_outcomes(
          log, check, "resent_login", [&](const Event& e) { return str(e, "origin") == tag; },
          control ? "ReplayedNonce" : "TokenMismatch");
      out.extension = out.extension || control;
    }
  }
  const auto forged = count_if(log, [&](const Event& e) {
    return is(e, "Authenticated") && str(e, "origin") == tag;
  });
  check.expect(forged == 0, "attacker_authenticated", forged,
               "a login sent by the attacker was authenticated");
}

GameOutcome judge_replay(const EventLog& log, const Event& script, std::size_t i) {
  GameOutcome out{GameKind::Replay, Verdict::Pass, "", static_cast<std::int64_t>(i)};
  const bool control = script.value("control", false);
  judge_resend(log, script, i, "AttackReplayed", control, out);
  if (control && out.verdict == Verdict::Pass && !out.control) {
    out.verdict = Verdict::Fail;
    out.reason = "control run re-sent outside the recorded period";
  }
  return out;
}

GameOutcome judge_wormhole(const EventLog& log, const Event& script, std::size_t i) {
  GameOutcome out{GameKind::Wormhole, Verdict::Pass, "", static_cast<std::int64_t>(i)};
  judge_resend(log, script, i, "AttackTunneled", str(script, "from") == str(script, "to"), out);
  return out;
}

GameOutcome judge_jam(const EventLog& log, const Event& script, std::size_t i) {
  GameOutcome out{GameKind::Dos, Verdict::Pass, "", static_cast<std::int64_t>(i)};
  Check check{out};
  const auto& area = str(script, "area");
  const auto from = script["from_us"].get<std::int64_t>();
  const auto to = script["to_us"].get<std::int64_t>();
  const auto interval = script["interval_us"].get<std::int64_t>();
  const auto misses = script["fallback_misses"].get<std::int64_t>();
  const bool full = script["channels"].size() >= static_cast<std::size_t>(sim::kChannelCount);
  const auto during = [&](const Event& e) { return t_of(e) >= from && t_of(e) < to; };

  const auto jammed = count_if(log, [&](const Event& e) {
    return is(e, "BroadcastJammed") && str(e, "area") == area && during(e);
  });
  const auto delivered = count_if(log, [&](const Event& e) {
    return is(e, "BroadcastDelivered") && str(e, "area") == area && during(e);
  });
  const auto auth_during = count_if(log, [&](const Event& e) {
    return is(e, "Authenticated") && str(e, "beacon") == area && during(e);
  });

  if (!full) {
    check.expect(jammed == 0, "jammed_during", jammed, "a broadcast was lost to a partial jam");
    check.expect(delivered > 0, "delivered_during", delivered,
                 "no broadcast delivered during the partial jam");
    check.expect(auth_during > 0, "authenticated_during", auth_during,
                 "no login authenticated during the partial jam");
    return out;
  }
  const auto deadline = from + misses * interval;
  const auto fallback = count_if(log, [&](const Event& e) {
    return is(e, "FallbackRequired") && str(e, "beacon") == area && t_of(e) >= from &&
           t_of(e) <= deadline;
  });
  const auto recovered = count_if(log, [&](const Event& e) {
    return is(e, "Authenticated") && str(e, "beacon") == area && t_of(e) >= to;
  });
  check.expect(delivered == 0, "delivered_during", delivered,
               "a broadcast got through a full jam");
  check.expect(fallback > 0, "fallback_in_time", fallback,
               "no FallbackRequired within the missed-broadcast budget");
  check.expect(auth_during == 0, "authenticated_during", auth_during,
               "a login was authenticated during a full jam");
  check.expect(recovered > 0, "authenticated_after", recovered,
               "authentication did not recover after the jam");
  return out;
}

std::int64_t end_time(const EventLog& log) {
  return log.events().empty() ? 0 : t_of(log.events().back());
}

GameOutcome aggregate(GameKind game, const std::vector<GameOutcome>& parts) {
  GameOutcome out{game, Verdict::Pass, ""};
  for (const auto& p : parts) {
    out.control = out.control || p.control;
    out.extension = out.extension || p.extension;
    if (!p.passed() && out.passed()) {
      out.verdict = Verdict::Fail;
      out.reason = "attack " + std::to_string(p.attack) + ": " + p.reason;
    }
  }
  out.observed["games"] = parts.size();
  return out;
}

std::vector<GameOutcome> only(const std::vector<GameOutcome>& all, GameKind game) {
  std::vector<GameOutcome> out;
  for (const auto& o : all) {
    if (o.game == game) out.push_back(o);
  }
  return out;
}

GameRun play(const sim::Scenario& scenario, std::uint64_t seed, GameKind game) {
  GameRun run;
  run.log = sim::simulate(scenario, seed);
  run.attacks = only(judge(run.log), game);
  run.outcome = aggregate(game, run.attacks);
  return run;
}

template <typename T>
std::size_t count_scripts(const sim::Scenario& s) {
  std::size_t n = 0;
  for (const auto& a : s.attacks) n += std::holds_alternative<T>(a);
  return n;
}

}  // namespace

std::string_view to_string(GameKind g) {
  switch (g) {
    case GameKind::Replay: return "replay";
    case GameKind::Wormhole: return "wormhole";
    case GameKind::Dos: return "dos";
  }
  return "?";
}

std::string_view to_string(Verdict v) { return v == Verdict::Pass ? "Pass" : "Fail"; }

Event GameOutcome::to_event(std::int64_t t_us) const {
  Event e = Event::object();
  e["t_us"] = t_us;
  e["kind"] = "GameVerdict";
  e["game"] = to_string(game);
  if (attack >= 0) e["attack"] = attack;
  e["verdict"] = to_string(verdict);
  if (!reason.empty()) e["reason"] = reason;
  e["control"] = control;
  e["extension"] = extension;
  e["observed"] = observed;
  return e;
}

std::vector<GameOutcome> evaluate(const EventLog& log) {
  std::vector<GameOutcome> out;
  for (const auto& e : log.events()) {
    if (!is(e, "AttackScripted")) continue;
    const auto i = e["attack"].get<std::size_t>();
    const auto& kind = str(e, "attack_kind");
    if (kind == "replay") {
      out.push_back(judge_replay(log, e, i));
    } else if (kind == "wormhole") {
      out.push_back(judge_wormhole(log, e, i));
    } else {
      out.push_back(judge_jam(log, e, i));
    }
  }
  return out;
}

std::vector<GameOutcome> judge(EventLog& log) {
  auto outcomes = evaluate(log);
  const auto t = end_time(log);
  for (const auto& o : outcomes) log.push(o.to_event(t));
  return outcomes;
}

bool log_passes(const EventLog& log) {
  for (const auto& e : log.events()) {
    if (is(e, "InvariantViolation")) return false;
    if (is(e, "GameVerdict") && str(e, "verdict") != "Pass") return false;
  }
  return true;
}

int exit_code(const EventLog& log) { return log_passes(log) ? 0 : 1; }

GameRun run_replay_game(sim::Scenario scenario, std::int64_t delta_us, std::uint64_t seed) {
  if (count_scripts<sim::ReplayAttack>(scenario) == 0) {
    throw sim::ScenarioError("replay game: scenario has no replay attack");
  }
  if (scenario.users.empty()) throw sim::ScenarioError("replay game: scenario has no users");
  for (auto& a : scenario.attacks) {
    if (auto* r = std::get_if<sim::ReplayAttack>(&a)) {
      r->delta_us = delta_us;
      r->control = delta_us <= 0;
    }
  }
  scenario.validate();
  return play(scenario, seed, GameKind::Replay);
}

GameRun run_wormhole_game(const sim::Scenario& scenario, std::uint64_t seed) {
  if (count_scripts<sim::WormholeAttack>(scenario) == 0) {
    throw sim::ScenarioError("wormhole game: scenario has no wormhole attack");
  }
  scenario.validate();
  return play(scenario, seed, GameKind::Wormhole);
}

GameRun run_dos_game(const sim::Scenario& scenario, std::uint64_t seed) {
  std::size_t partial = 0;
  std::size_t full = 0;
  for (const auto& a : scenario.attacks) {
    if (const auto* j = std::get_if<sim::JamAttack>(&a)) (j->full() ? full : partial)++;
  }
  if (partial == 0 || full == 0) {
    throw sim::ScenarioError("dos game: needs one partial and one full jam");
  }
  return play(scenario, seed, GameKind::Dos);
}

}  // namespace locauth::adversary
