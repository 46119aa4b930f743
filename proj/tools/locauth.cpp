// locauth: operator entry point.
//
//   locauth setup --out DIR [--force] [--seed N]
//   locauth register --keystore DIR --user NAME --password PW --attr A [--attr B ...]
//   locauth run SCENARIO [--keystore DIR] [--seed N] [--out LOG]
//   locauth attack {replay|wormhole|dos} SCENARIO [--delta-ms X] [--seed N] [--out LOG]
//   locauth vectors
//   locauth policy-check --policy TEXT --attr A [--attr B ...]
//
// Exit status: 0 success, 1 a game failed / invariant violated / policy not
// satisfied, 2 bad input (usage, schema, unknown references), 3 other errors.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "locauth/abe/access_tree.hpp"
#include "locauth/abe/attribute.hpp"
#include "locauth/abe/policy.hpp"
#include "locauth/adversary.hpp"
#include "locauth/keystore.hpp"
#include "locauth/report.hpp"
#include "locauth/sim/world.hpp"
#include "locauth/vectors.hpp"

namespace fs = std::filesystem;
using namespace locauth;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitInput = 2;
constexpr int kExitError = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunFlags {
  std::string scenario;
  std::string keystore;
  std::uint64_t seed = 1;
  std::string out;
  std::optional<std::int64_t> period_ms;
  std::optional<std::int64_t> ttl_ms;
  std::optional<double> until_ms;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("scenario", f.scenario, "Scenario JSON file")->required();
  cmd->add_option("--keystore", f.keystore, "Use this keystore and its registry instead of fresh keys");
  cmd->add_option("--seed", f.seed, "Simulation seed")->capture_default_str();
  cmd->add_option("--out", f.out, "Write the JSONL event log here");
  cmd->add_option("--period-ms", f.period_ms, "Override token.period_ms");
  cmd->add_option("--ttl-ms", f.ttl_ms, "Override session.ttl_ms");
  cmd->add_option("--until-ms", f.until_ms, "Override duration_ms");
}

sim::Scenario load_scenario(const RunFlags& f) {
  auto s = sim::Scenario::load(f.scenario);
  if (f.period_ms) s.period_ms = *f.period_ms;
  if (f.ttl_ms) s.ttl_ms = *f.ttl_ms;
  if (f.until_ms) s.duration_us = sim::ms_to_us(*f.until_ms);
  s.validate();
  return s;
}

sim::Provisioning provision_from_keystore(const sim::Scenario& s, const fs::path& dir) {
  const auto ks = store::load_keystore(dir);
  sim::Provisioning p{protocol::LocAuthService(ks.params, ks.msk, ks.master_secret,
                                               {s.period_ms, s.skew_periods}),
                      {},
                      {}};
  const auto registry = store::load_registry(store::registry_path(dir));
  for (const auto& [name, rec] : registry.records()) p.service.add_user(rec);
  for (const auto& u : s.users) {
    if (registry.find(u.username) == nullptr) {
      throw sim::ScenarioError("user '" + u.username + "' is not in the registry");
    }
    p.bundles.emplace(u.username, store::load_bundle(dir, u.username));
  }
  return p;
}

int finish(sim::EventLog& log, const RunFlags& f) {
  if (!f.out.empty()) log.write(f.out);
  std::cout << render_summary(summarize(log));
  return adversary::exit_code(log);
}

int cmd_run(const RunFlags& f) {
  const auto scenario = load_scenario(f);
  auto provisioning = f.keystore.empty() ? sim::provision(scenario, f.seed)
                                         : provision_from_keystore(scenario, f.keystore);
  sim::World world(scenario, std::move(provisioning), f.seed);
  auto log = world.run();
  adversary::judge(log);
  return finish(log, f);
}

int cmd_attack(const std::string& game, std::optional<double> delta_ms, const RunFlags& f) {
  const auto scenario = load_scenario(f);
  adversary::GameRun run;
  if (game == "replay") {
    std::int64_t delta = 1000;
    if (delta_ms) {
      delta = sim::ms_to_us(*delta_ms);
    } else {
      for (const auto& a : scenario.attacks) {
        if (const auto* r = std::get_if<sim::ReplayAttack>(&a)) {
          delta = r->delta_us;
          break;
        }
      }
    }
    run = adversary::run_replay_game(scenario, delta, f.seed);
  } else if (game == "wormhole") {
    run = adversary::run_wormhole_game(scenario, f.seed);
  } else {
    run = adversary::run_dos_game(scenario, f.seed);
  }
  const int code = finish(run.log, f);
  std::cout << "overall " << adversary::to_string(run.outcome.game) << ": "
            << adversary::to_string(run.outcome.verdict);
  if (!run.outcome.reason.empty()) std::cout << " - " << run.outcome.reason;
  std::cout << '\n';
  return run.outcome.passed() ? code : kExitFail;
}

int cmd_setup(const std::string& out, bool force, std::optional<std::uint64_t> seed) {
  auto rng = seed ? Rng::from_seed(*seed) : Rng::from_os();
  store::create_keystore(out, rng, force);
  std::cout << "keystore written to " << out << '\n';
  return 0;
}

int cmd_register(const std::string& dir, const std::string& user, const std::string& password,
                 const std::vector<std::string>& attrs, std::optional<std::uint64_t> seed) {
  const auto ks = store::load_keystore(dir);
  store::DirectoryLock lock(dir);
  protocol::LocAuthService service(ks.params, ks.msk, ks.master_secret);
  const auto path = store::registry_path(dir);
  const auto existing = store::load_registry(path);
  for (const auto& [name, rec] : existing.records()) service.add_user(rec);

  abe::AttributeSet set;
  try {
    set = abe::parse_attribute_set(attrs);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto rng = seed ? Rng::from_seed(*seed) : Rng::from_os();
  protocol::Registration reg;
  try {
    reg = service.register_user(user, password, set, rng);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  store::save_bundle(dir, reg.bundle);
  store::save_registry(path, service.registry());
  if (reg.weak_password) std::cerr << "warning: weak password for '" << user << "'\n";
  std::cout << "registered " << user << " (" << set.size() << " attributes); bundle "
            << store::bundle_path(dir, user).string() << '\n';
  return 0;
}

int cmd_policy_check(const std::string& policy, const std::vector<std::string>& attrs) {
  abe::AccessTree tree;
  abe::AttributeSet set;
  try {
    tree = abe::parse_policy(policy);
    set = abe::parse_attribute_set(attrs);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const bool ok = abe::satisfies(set, tree);
  std::cout << "tree: " << abe::to_string(tree) << '\n'
            << "leaves: " << tree.leaf_count() << '\n'
            << (ok ? "satisfied" : "not satisfied") << '\n';
  return ok ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Location-based sign-on: key authority, registry and office simulator"};
  app.require_subcommand(1);

  auto* setup = app.add_subcommand("setup", "Generate a keystore");
  std::string setup_out;
  bool force = false;
  std::optional<std::uint64_t> setup_seed;
  setup->add_option("--out", setup_out, "Keystore directory")->required();
  setup->add_flag("--force", force, "Overwrite an existing keystore");
  setup->add_option("--seed", setup_seed, "Deterministic key generation (testing only)");

  auto* reg = app.add_subcommand("register", "Register a user and write the client bundle");
  std::string reg_dir, reg_user, reg_password;
  std::vector<std::string> reg_attrs;
  std::optional<std::uint64_t> reg_seed;
  reg->add_option("--keystore", reg_dir, "Keystore directory")->required();
  reg->add_option("--user", reg_user, "Username")->required();
  reg->add_option("--password", reg_password, "Password")->required();
  reg->add_option("--attr", reg_attrs, "Attribute, or name=value for numeric ones")->required();
  reg->add_option("--seed", reg_seed, "Deterministic registration (testing only)");

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Simulate a scenario and judge its attack games");
  add_run_flags(run, run_flags);

  RunFlags attack_flags;
  std::string game;
  std::optional<double> delta_ms;
  auto* attack = app.add_subcommand("attack", "Play one attack game from a scenario");
  attack->add_option("game", game, "replay, wormhole or dos")
      ->required()
      ->check(CLI::IsMember({"replay", "wormhole", "dos"}));
  add_run_flags(attack, attack_flags);
  attack->add_option("--delta-ms", delta_ms, "Replay delay past the recorded period");

  app.add_subcommand("vectors", "Print token and key-derivation test vectors");

  auto* check = app.add_subcommand("policy-check", "Evaluate a policy against attributes");
  std::string policy;
  std::vector<std::string> check_attrs;
  check->add_option("--policy", policy, "Policy text")->required();
  check->add_option("--attr", check_attrs, "Attribute, or name=value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*setup) return cmd_setup(setup_out, force, setup_seed);
    if (*reg) return cmd_register(reg_dir, reg_user, reg_password, reg_attrs, reg_seed);
    if (*run) return cmd_run(run_flags);
    if (*attack) return cmd_attack(game, delta_ms, attack_flags);
    if (*check) return cmd_policy_check(policy, check_attrs);
    std::cout << render_vectors();
    return 0;
  } catch (const sim::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return kExitInput;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
