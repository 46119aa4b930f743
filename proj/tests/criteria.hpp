#pragma once

// The acceptance checks. Each one recomputes its verdict from raw events or
// from independent oracles; the acceptance binary prints them and the unit
// suite asserts the same functions.

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "locauth/sim/event_log.hpp"

namespace criteria {

struct Check {
  bool ok = false;
  std::string detail;
};

struct Criterion {
  int number;
  std::string name;
  std::function<Check()> run;
};

std::filesystem::path scenario_dir();
std::filesystem::path cli_path();

/// Events of `kind` matching every key/value pair in `fields`.
std::vector<locauth::sim::Event> select(const locauth::sim::EventLog& log, const std::string& kind,
                                        const nlohmann::ordered_json& fields = {});

/// Runs the CLI with `args`; returns (exit status, stdout).
std::pair<int, std::string> run_cli(const std::string& args);

/// The vector listing recomputed with the test-side oracle.
std::string oracle_vectors();

Check abe_oracle_equivalence(int trials);
Check comparison_soundness();
Check office_happy_path();
Check replay_game();
Check wormhole_game();
Check dos_game();
Check mobility_travel();
Check determinism();
Check tick_timing();
Check vectors_match_oracle();

std::vector<Criterion> all();

}  // namespace criteria
