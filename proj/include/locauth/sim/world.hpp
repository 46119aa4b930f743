#pragma once

// Discrete-event simulation of an office floor: beacons tick on their own
// interval, broadcasts reach every listener in range with zero delay, and
// client replies go back to the beacon of the area they were heard in.
//
// Event kinds written to the log (fields after t_us/kind):
//   WeakPassword        user
//   BeaconTick          beacon, tick, period
//   BroadcastDelivered  user, area, source, beacon, period
//   BroadcastJammed     user, area, source
//   ClientNoAction      user, beacon, period, reason
//   LoginSent           user, area, beacon, period, trigger, digest
//   LoginDropped        area, origin
//   Authenticated       user, beacon, period, origin, trigger
//   Rejected            beacon, reason, origin, trigger
//   SessionEstablished / SessionRefreshed / SessionTraveled / SessionExpired
//   TravelRejected      user, from, to, reason
//   AttackRecorded / AttackReplayed / AttackTunneled / AttackSkipped
//   AttackScripted      attack, attack_kind, plus the script parameters
//   JamStarted / JamEnded, FallbackRequired, InvariantViolation, RunComplete
//
// `source`/`trigger` is "beacon" or "attack:<i>"; `origin` is "user:<name>"
// or "attack:<i>".

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "locauth/protocol.hpp"
#include "locauth/sim/event_log.hpp"
#include "locauth/sim/scenario.hpp"

namespace locauth::sim {

/// Authority state plus the device-side bundle of every scenario user.
struct Provisioning {
  protocol::LocAuthService service;
  std::map<std::string, protocol::ClientBundle> bundles;
  std::set<std::string> weak_passwords;
};

/// Fresh keys and registrations for every scenario user, all drawn from `seed`.
Provisioning provision(const Scenario& scenario, std::uint64_t seed,
                       unsigned security_bits = 128);

class World {
 public:
  /// Binds each beacon's policy in the service. Throws ScenarioError when a
  /// scenario user has no bundle.
  World(Scenario scenario, Provisioning provisioning, std::uint64_t seed);
  ~World();
  World(World&&) noexcept;
  World& operator=(World&&) noexcept;

  const Scenario& scenario() const;

  /// Processes every event with t < until_us. One-shot: a second call throws
  /// std::logic_error.
  EventLog run(std::int64_t until_us);
  EventLog run();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// provision() followed by World::run().
EventLog simulate(const Scenario& scenario, std::uint64_t seed,
                  std::optional<std::int64_t> until_us = std::nullopt);

}  // namespace locauth::sim
