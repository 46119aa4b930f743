#pragma once

// Security games played inside the simulation: replay, wormhole and jamming.
// The attacker only records, re-sends, tunnels and jams bytes; it never holds
// keys. Verdicts are computed from the event log alone.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "locauth/sim/event_log.hpp"
#include "locauth/sim/scenario.hpp"

namespace locauth::adversary {

enum class GameKind { Replay, Wormhole, Dos };
enum class Verdict { Pass, Fail };

std::string_view to_string(GameKind g);
std::string_view to_string(Verdict v);

struct GameOutcome {
  GameKind game = GameKind::Replay;
  Verdict verdict = Verdict::Fail;
  std::string reason;
  /// Index of the attack script this verdict is about; -1 for an aggregate.
  std::int64_t attack = -1;
  /// In-window control run (a legitimate reply is expected to authenticate).
  bool control = false;
  /// The verdict relied on the login replay cache, which goes beyond the
  /// basic protocol.
  bool extension = false;
  /// Event counts that decided the verdict.
  nlohmann::ordered_json observed = nlohmann::ordered_json::object();

  bool passed() const { return verdict == Verdict::Pass; }
  /// The GameVerdict log line.
  sim::Event to_event(std::int64_t t_us) const;
};

/// One outcome per AttackScripted event in the log.
std::vector<GameOutcome> evaluate(const sim::EventLog& log);

/// evaluate() and append a GameVerdict event per outcome at the end of the run.
std::vector<GameOutcome> judge(sim::EventLog& log);

/// True iff every GameVerdict passed and no InvariantViolation was logged.
bool log_passes(const sim::EventLog& log);

/// Exit status for a finished log: 0 when log_passes, else 1.
int exit_code(const sim::EventLog& log);

struct GameRun {
  GameOutcome outcome;
  std::vector<GameOutcome> attacks;
  sim::EventLog log;
};

/// Sets every replay script's delta to `delta_us` (a non-positive delta makes
/// it an in-window control run), simulates and judges. Throws ScenarioError
/// when the scenario has no replay script or no users.
GameRun run_replay_game(sim::Scenario scenario, std::int64_t delta_us, std::uint64_t seed);

/// Throws ScenarioError when the scenario has no wormhole script.
GameRun run_wormhole_game(const sim::Scenario& scenario, std::uint64_t seed);

/// Needs at least one partial and one full jam script; passes iff both
/// behaviours hold in the same run. Throws ScenarioError otherwise.
GameRun run_dos_game(const sim::Scenario& scenario, std::uint64_t seed);

}  // namespace locauth::adversary
