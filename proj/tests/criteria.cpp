#include "criteria.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "abe_gen.hpp"
#include "locauth/abe/cpabe.hpp"
#include "locauth/abe/policy.hpp"
#include "locauth/adversary.hpp"
#include "locauth/sim/world.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using namespace locauth;
using nlohmann::ordered_json;

namespace criteria {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_seconds(double s) {
  std::ostringstream os;
  os.precision(2);
  os << std::fixed << s << " s";
  return os.str();
}

bool starts_with(const sim::Event& e, const char* key, std::string_view prefix) {
  return e.contains(key) && e[key].is_string() && e[key].get<std::string>().starts_with(prefix);
}

std::size_t count_if(const std::vector<sim::Event>& evs,
                     const std::function<bool(const sim::Event&)>& pred) {
  return static_cast<std::size_t>(std::count_if(evs.begin(), evs.end(), pred));
}

/// Fails with `why` unless `cond`; collects the first failure.
struct Gate {
  bool ok = true;
  std::string why;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      why = what;
    }
  }
  Check done(const std::string& summary) const { return {ok, ok ? summary : why}; }
};

sim::Scenario load(const std::string& name) { return sim::Scenario::load(scenario_dir() / name); }

bool holds(std::uint64_t v, abe::Comparator c, std::uint64_t k) {
  switch (c) {
    case abe::Comparator::Less: return v < k;
    case abe::Comparator::LessEqual: return v <= k;
    case abe::Comparator::Greater: return v > k;
    case abe::Comparator::GreaterEqual: return v >= k;
    case abe::Comparator::Equal: return v == k;
  }
  return false;
}

std::string attack_tag(int i) { return "attack:" + std::to_string(i); }

}  // namespace

fs::path scenario_dir() { return LOCAUTH_SCENARIO_DIR; }
fs::path cli_path() { return LOCAUTH_CLI_PATH; }

std::vector<sim::Event> select(const sim::EventLog& log, const std::string& kind,
                               const ordered_json& fields) {
  std::vector<sim::Event> out;
  for (const auto& e : log.events()) {
    if (e["kind"] != kind) continue;
    bool match = true;
    if (fields.is_object()) {
      for (const auto& [k, v] : fields.items()) {
        if (!e.contains(k) || e[k] != v) {
          match = false;
          break;
        }
      }
    }
    if (match) out.push_back(e);
  }
  return out;
}

std::pair<int, std::string> run_cli(const std::string& args) {
  const std::string cmd = "'" + cli_path().string() + "' " + args + " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string oracle_vectors() {
  using oracle::Buf;
  auto counting = [](std::size_t n, std::uint8_t start) {
    Buf b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>(start + i);
    return b;
  };
  const Buf master = counting(32, 0x00);
  const Buf seed = counting(32, 0x20);
  const Buf salt = counting(16, 0xa0);
  const Buf beacon = oracle::unhex("00112233445566778899aabbccddeeff");
  const Buf password = oracle::buf("correct horse");
  const Buf verifier = oracle::pbkdf2_sha256(password, salt, 100000);

  std::string out;
  auto line = [&out](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  line("master_secret", oracle::hex(master));
  line("beacon_id", "00112233-4455-6677-8899-aabbccddeeff");
  line("user_seed", oracle::hex(seed));
  line("password", "\"correct horse\"");
  line("salt", oracle::hex(salt));
  line("pbkdf2_iterations", "100000");
  line("pwd_verifier", oracle::hex(verifier));
  for (std::uint64_t p : {0ull, 1ull, 56666666ull, 4294967301ull}) {
    const Buf token =
        oracle::truncate(oracle::hmac_sha256(master, oracle::cat({beacon, oracle::be64(p)})), 16);
    const Buf ctoken = oracle::truncate(oracle::hmac_sha256(seed, oracle::be64(p)), 16);
    out += "\n";
    line("period", std::to_string(p));
    line("session_token", oracle::hex(token));
    line("c_token", oracle::hex(ctoken));
    line("outer_key", oracle::hex(oracle::hkdf_sha256(token, {}, oracle::buf("loc-auth/outer"), 32)));
    line("inner_key", oracle::hex(oracle::hkdf_sha256(ctoken, {}, oracle::buf("loc-auth/inner"), 32)));
    line("auth_hash", oracle::hex(oracle::sha256(oracle::cat({token, Buf{0x1f}, verifier}))));
  }
  return out;
}

Check abe_oracle_equivalence(int trials) {
  const auto start = Clock::now();
  auto rng = Rng::from_seed(2024);
  const auto [pk, msk] = abe::setup(128, rng);
  int agree = 0;
  int satisfied = 0;
  for (int t = 0; t < trials; ++t) {
    const auto tree = testgen::random_tree(rng, 1 + static_cast<int>(rng.uniform(8)));
    const auto attrs = testgen::random_attrs(rng);
    const auto key = abe::keygen(msk, pk, attrs, rng);
    const auto payload = rng.bytes<40>();
    const auto ct = abe::encrypt(pk, tree, payload, rng);
    const bool expect = abe::satisfies(attrs, tree);
    bool got = false;
    try {
      got = abe::decrypt(pk, key, ct) == Bytes(payload.begin(), payload.end());
    } catch (const abe::PolicyNotSatisfied&) {
    }
    if (got == expect) ++agree;
    if (expect) ++satisfied;
  }
  const double elapsed = seconds_since(start);
  Gate g;
  g.require(agree == trials,
            std::to_string(trials - agree) + " of " + std::to_string(trials) + " trials disagree");
  g.require(satisfied > 0 && satisfied < trials, "trial mix is one-sided");
  g.require(elapsed <= 120.0, "took " + fmt_seconds(elapsed) + " (limit 120 s)");
  return g.done(std::to_string(agree) + "/" + std::to_string(trials) + " agree (" +
                std::to_string(satisfied) + " satisfiable) in " + fmt_seconds(elapsed));
}

Check comparison_soundness() {
  const auto start = Clock::now();
  constexpr std::array<abe::Comparator, 5> cmps = {
      abe::Comparator::Less, abe::Comparator::LessEqual, abe::Comparator::Greater,
      abe::Comparator::GreaterEqual, abe::Comparator::Equal};
  constexpr std::array<std::uint64_t, 5> ks = {0, 1, 3, 127, 255};
  int checks = 0;
  int mismatches = 0;
  for (auto c : cmps) {
    for (auto k : ks) {
      const auto tree = abe::compile_comparison("n", c, k);
      for (std::uint64_t v = 0; v < 256; ++v) {
        const auto bits = abe::numeric_attributes("n", v);
        const abe::AttributeSet set(bits.begin(), bits.end());
        if (abe::satisfies(set, tree) != holds(v, c, k)) ++mismatches;
        ++checks;
      }
    }
  }
  const double elapsed = seconds_since(start);
  Gate g;
  g.require(checks == 6400, "ran " + std::to_string(checks) + " checks");
  g.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  g.require(elapsed <= 5.0, "took " + fmt_seconds(elapsed) + " (limit 5 s)");
  return g.done(std::to_string(checks) + " checks, 0 mismatches in " + fmt_seconds(elapsed));
}

Check office_happy_path() {
  const auto scenario = load("office.json");
  const auto log = sim::simulate(scenario, 1);
  const auto& b1 = scenario.beacons.at(0);
  const auto& alice = scenario.users.at(0);

  // First instant (1 ms grid) at which alice is inside B1's range.
  std::int64_t enter_us = -1;
  for (std::int64_t t = 0; t <= scenario.duration_us; t += 1000) {
    if (sim::in_range(b1.pos, b1.range_m, sim::position_at(alice.trace, t))) {
      enter_us = t;
      break;
    }
  }

  const auto auth_alice = select(log, "Authenticated", {{"user", "alice"}});
  const auto sent_alice = select(log, "LoginSent", {{"user", "alice"}});
  const auto sent_bob = select(log, "LoginSent", {{"user", "bob"}});
  const auto noaction_bob =
      select(log, "ClientNoAction", {{"user", "bob"}, {"reason", "PolicyNotSatisfied"}});
  const auto period_us = scenario.period_ms * 1000;

  Gate g;
  g.require(enter_us == 1'000'000, "alice enters range at " + std::to_string(enter_us) + " us");
  g.require(auth_alice.size() == 3, "alice Authenticated " + std::to_string(auth_alice.size()) +
                                        " times (expected 3)");
  g.require(sent_alice.size() == 3, "alice sent " + std::to_string(sent_alice.size()) +
                                        " logins (expected 3)");
  g.require(!auth_alice.empty() && auth_alice.front()["t_us"].get<std::int64_t>() - enter_us <= period_us,
            "first Authenticated later than one period after entering range");
  g.require(sent_bob.empty(), "bob sent " + std::to_string(sent_bob.size()) + " logins");
  g.require(select(log, "Authenticated", {{"user", "bob"}}).empty(), "bob authenticated");
  g.require(noaction_bob.size() == 3,
            "bob NoAction " + std::to_string(noaction_bob.size()) + " times (expected 3)");
  g.require(log.count("Rejected") == 0, "unexpected Rejected events");
  g.require(log.count("Authenticated") == 3, "total Authenticated is not 3");
  g.require(log.count("LoginSent") == 3, "total LoginSent is not 3");
  return g.done("alice 3 Authenticated (first " +
                std::to_string(auth_alice.empty() ? 0 : auth_alice.front()["t_us"].get<std::int64_t>() - enter_us) +
                " us after entering range), bob 0 LoginSent / 3 NoAction");
}

Check replay_game() {
  const auto scenario = load("replay.json");
  const std::int64_t d_us = scenario.period_ms * 1000;
  const std::vector<std::pair<std::string, std::int64_t>> deltas = {
      {"1 ms", 1000}, {"1 period", d_us}, {"10 periods", 10 * d_us}};
  Gate g;
  std::string summary;
  for (const auto& [label, delta] : deltas) {
    const auto run = adversary::run_replay_game(scenario, delta, 1);
    const auto& log = run.log;
    const auto tag = attack_tag(0);
    const auto honest = select(log, "Rejected", {{"trigger", tag}, {"origin", "user:alice"}});
    const auto replayed = select(log, "Rejected", {{"origin", tag}});
    const auto attacker_auth = count_if(log.events(), [](const sim::Event& e) {
      return e["kind"] == "Authenticated" &&
             (starts_with(e, "origin", "attack:") || starts_with(e, "trigger", "attack:"));
    });
    auto all_token_mismatch = [](const std::vector<sim::Event>& evs) {
      return !evs.empty() && std::all_of(evs.begin(), evs.end(), [](const sim::Event& e) {
        return e["reason"] == "TokenMismatch";
      });
    };
    const auto resent = select(log, "AttackReplayed");
    const bool late = !resent.empty() && std::all_of(resent.begin(), resent.end(), [](const sim::Event& e) {
      return e["current_period"].get<std::uint64_t>() > e["period"].get<std::uint64_t>();
    });
    g.require(all_token_mismatch(honest), label + ": replayed m path not all TokenMismatch");
    g.require(all_token_mismatch(replayed), label + ": replayed m_r path not all TokenMismatch");
    g.require(attacker_auth == 0, label + ": attacker-attributable Authenticated");
    g.require(late, label + ": replays were not past expiry");
    g.require(run.outcome.passed(), label + ": verdict " + run.outcome.reason);
    summary += (summary.empty() ? "" : "; ") + label + ": m " + std::to_string(honest.size()) +
               "x, m_r " + std::to_string(replayed.size()) + "x TokenMismatch";
  }
  return g.done(summary);
}

Check wormhole_game() {
  const auto scenario = load("wormhole.json");
  const auto run = adversary::run_wormhole_game(scenario, 1);
  const auto& log = run.log;
  Gate g;

  // Attack 0 tunnels L -> P.
  const auto tunneled_m =
      select(log, "Rejected", {{"trigger", "attack:0"}, {"beacon", "P"}, {"origin", "user:dave"}});
  const auto tunneled_mr = select(log, "Rejected", {{"origin", "attack:0"}, {"beacon", "P"}});
  auto mismatch = [](const std::vector<sim::Event>& evs) {
    return !evs.empty() && std::all_of(evs.begin(), evs.end(), [](const sim::Event& e) {
      return e["reason"] == "TokenMismatch";
    });
  };
  const auto in_window = select(log, "AttackTunneled", {{"attack", 0}});
  g.require(!in_window.empty() && std::all_of(in_window.begin(), in_window.end(), [](const sim::Event& e) {
    return e["period"] == e["current_period"];
  }), "L->P tunnel was not within the valid window");
  g.require(mismatch(tunneled_m), "tunneled broadcast at P not rejected with TokenMismatch");
  g.require(mismatch(tunneled_mr), "tunneled login at P not rejected with TokenMismatch");

  // Attack 1 tunnels L -> L: a legitimate reply still authenticates.
  const auto control_auth = select(log, "Authenticated", {{"trigger", "attack:1"}});
  const auto control_dup = select(log, "Rejected", {{"origin", "attack:1"}, {"reason", "ReplayedNonce"}});
  g.require(!control_auth.empty(), "control tunnel L->L did not authenticate");
  g.require(!control_dup.empty(), "duplicate m_r in control not caught by the replay cache");

  const auto attacker_auth = count_if(log.events(), [](const sim::Event& e) {
    return e["kind"] == "Authenticated" && starts_with(e, "origin", "attack:");
  });
  g.require(attacker_auth == 0, "attacker-originated Authenticated");
  g.require(run.outcome.passed(), "verdict: " + run.outcome.reason);
  return g.done("L->P: m " + std::to_string(tunneled_m.size()) + "x, m_r " +
                std::to_string(tunneled_mr.size()) + "x TokenMismatch; L->L control: " +
                std::to_string(control_auth.size()) + " Authenticated, m_r ReplayedNonce");
}

Check dos_game() {
  const auto scenario = load("dos.json");
  const auto run = adversary::run_dos_game(scenario, 1);
  const auto& log = run.log;
  auto between = [](const std::vector<sim::Event>& evs, std::int64_t lo, std::int64_t hi) {
    return count_if(evs, [&](const sim::Event& e) {
      const auto t = e["t_us"].get<std::int64_t>();
      return t >= lo && t < hi;
    });
  };
  const auto auth = select(log, "Authenticated");
  const auto delivered = select(log, "BroadcastDelivered");
  const auto jammed = select(log, "BroadcastJammed");
  const auto fallback = select(log, "FallbackRequired");
  Gate g;
  std::string summary;
  int partial = 0;
  int full = 0;
  for (const auto& a : scenario.attacks) {
    const auto* jam = std::get_if<sim::JamAttack>(&a);
    if (jam == nullptr) continue;
    const auto interval = scenario.beacon(jam->area).interval_us;
    if (!jam->full()) {
      ++partial;
      g.require(between(jammed, jam->from_us, jam->to_us) == 0, "partial jam blocked a broadcast");
      g.require(between(delivered, jam->from_us, jam->to_us) > 0, "no delivery during partial jam");
      g.require(between(auth, jam->from_us, jam->to_us) > 0, "no Authenticated during partial jam");
    } else {
      ++full;
      const auto limit = jam->from_us + scenario.fallback_misses * interval;
      const auto fb = between(fallback, jam->from_us, limit + 1);
      g.require(between(delivered, jam->from_us, jam->to_us) == 0, "delivery during full jam");
      g.require(fb > 0, "no FallbackRequired within 3 broadcast intervals");
      g.require(between(auth, jam->from_us, jam->to_us) == 0, "Authenticated during full jam");
      g.require(between(auth, jam->to_us, scenario.duration_us + 1) > 0, "no recovery after jam");
      if (fb > 0) {
        const auto first = std::find_if(fallback.begin(), fallback.end(), [&](const sim::Event& e) {
          return e["t_us"].get<std::int64_t>() >= jam->from_us;
        });
        summary += "FallbackRequired " +
                   std::to_string((*first)["t_us"].get<std::int64_t>() - jam->from_us) +
                   " us into full jam; ";
      }
    }
  }
  g.require(partial > 0 && full > 0, "scenario lacks a partial or a full jam");
  g.require(run.outcome.passed(), "verdict: " + run.outcome.reason);
  return g.done(summary + "partial jam kept authentication working, recovery after full jam");
}

Check mobility_travel() {
  const auto scenario = load("travel.json");
  const auto log = sim::simulate(scenario, 1);
  const auto established = select(log, "SessionEstablished", {{"user", "alice"}});
  const auto traveled = select(log, "SessionTraveled", {{"user", "alice"}});
  const auto rejected = select(log, "TravelRejected", {{"user", "alice"}});
  Gate g;
  g.require(!established.empty() && established.front()["beacon"] == "B1",
            "first session not established at B1");
  g.require(traveled.size() == 1 && traveled.front()["from"] == "B1" && traveled.front()["to"] == "B2",
            "expected exactly one SessionTraveled B1 -> B2");
  g.require(select(log, "SessionEstablished", {{"beacon", "B2"}}).empty(),
            "a full session was established at B2");
  if (!established.empty() && !traveled.empty()) {
    const auto t0 = established.front()["t_us"].get<std::int64_t>();
    const auto t1 = traveled.front()["t_us"].get<std::int64_t>();
    const auto mid = count_if(established, [&](const sim::Event& e) {
      const auto t = e["t_us"].get<std::int64_t>();
      return t > t0 && t <= t1;
    });
    g.require(mid == 0, "a fresh session was established between B1 and the travel");
  }
  g.require(rejected.size() == 1 && rejected.front()["from"] == "B2" &&
                rejected.front()["to"] == "B9" && rejected.front()["reason"] == "NonAdjacent",
            "expected exactly one TravelRejected B2 -> B9 NonAdjacent");
  g.require(select(log, "SessionTraveled", {{"to", "B9"}}).empty(), "session traveled to B9");
  return g.done("SessionTraveled B1->B2 at " +
                (traveled.empty() ? std::string("?") : traveled.front()["t_us"].dump()) +
                " us; TravelRejected B2->B9 NonAdjacent at " +
                (rejected.empty() ? std::string("?") : rejected.front()["t_us"].dump()) + " us");
}

Check determinism() {
  const auto tmp = fs::temp_directory_path() / ("locauth-det-" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(scenario_dir())) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  Gate g;
  for (const auto& f : files) {
    std::array<std::string, 2> logs;
    for (int i = 0; i < 2; ++i) {
      const auto out = tmp / (f.stem().string() + "-" + std::to_string(i) + ".jsonl");
      const auto [code, text] = run_cli("run '" + f.string() + "' --seed 7 --out '" + out.string() + "'");
      g.require(code == 0, f.filename().string() + ": exit " + std::to_string(code));
      logs[i] = slurp(out);
    }
    g.require(!logs[0].empty(), f.filename().string() + ": empty log");
    g.require(logs[0] == logs[1], f.filename().string() + ": logs differ");
  }
  fs::remove_all(tmp);
  g.require(files.size() >= 6, "expected at least 6 shipped scenarios");
  return g.done(std::to_string(files.size()) + " scenarios byte-identical across reruns");
}

Check tick_timing() {
  const auto scenario = load("office.json");
  const auto log = sim::simulate(scenario, 1);
  Gate g;
  std::size_t checked = 0;
  for (const auto& b : scenario.beacons) {
    const auto ticks = select(log, "BeaconTick", {{"beacon", b.name}});
    g.require(ticks.size() >= 100, b.name + ": only " + std::to_string(ticks.size()) + " ticks");
    for (std::size_t k = 0; k < std::min<std::size_t>(100, ticks.size()); ++k) {
      const auto t = ticks[k]["t_us"].get<std::int64_t>();
      g.require(t == static_cast<std::int64_t>(k) * 102'400,
                b.name + " tick " + std::to_string(k) + " at " + std::to_string(t) + " us");
      g.require(ticks[k]["tick"].get<std::uint64_t>() == k, b.name + ": tick index mismatch");
      ++checked;
    }
  }
  return g.done(std::to_string(checked) + " ticks at exact multiples of 102400 us");
}

Check vectors_match_oracle() {
  const auto [code, out] = run_cli("vectors");
  const auto expect = oracle_vectors();
  Gate g;
  g.require(code == 0, "locauth vectors exited " + std::to_string(code));
  if (out != expect) {
    std::size_t i = 0;
    while (i < out.size() && i < expect.size() && out[i] == expect[i]) ++i;
    g.require(false, "output diverges from the oracle at byte " + std::to_string(i));
  }
  return g.done(std::to_string(out.size()) + " bytes identical to the oracle");
}

std::vector<Criterion> all() {
  return {
      {1, "ABE oracle equivalence (200 trials)", [] { return abe_oracle_equivalence(200); }},
      {2, "comparison compiler soundness", comparison_soundness},
      {3, "office happy path", office_happy_path},
      {4, "replay game", replay_game},
      {5, "wormhole game", wormhole_game},
      {6, "DoS game", dos_game},
      {7, "mobility travel", mobility_travel},
      {8, "determinism", determinism},
      {9, "tick timing", tick_timing},
      {10, "token/KDF vectors", vectors_match_oracle},
  };
}

}  // namespace criteria
