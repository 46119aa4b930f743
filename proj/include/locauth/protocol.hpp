#pragma once

// Wire messages and the three protocol roles: beacon broadcast, client sign-on
// construction, and service-side verification. All integers are big-endian.
//
//   BroadcastMessage  0x01 | 0x01 | beacon_id(16) | period(8) | abe_ciphertext
//     ABE payload:    session_token(16) | beacon_id(16) | period(8)
//   LoginMessage      0x01 | 0x02 | beacon_id(16) | period(8) | outer_nonce(12) | outer_ct
//     outer (key HKDF(token, "loc-auth/outer"), AAD = 26-byte header):
//                     username_len(2) | username | inner_nonce(12) | inner_ct
//     inner (key HKDF(c_token, "loc-auth/inner")):
//                     SHA-256(token | 0x1F | pwd_verifier)

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>

#include "locauth/abe/cpabe.hpp"
#include "locauth/abe/policy.hpp"
#include "locauth/crypto.hpp"
#include "locauth/rng.hpp"
#include "locauth/tokens.hpp"

namespace locauth::protocol {

inline constexpr std::uint8_t kWireVersion = 0x01;
inline constexpr std::uint8_t kBroadcastType = 0x01;
inline constexpr std::uint8_t kLoginType = 0x02;
inline constexpr std::size_t kHeaderSize = 2 + 16 + 8;
inline constexpr std::size_t kBroadcastPayloadSize = kTokenSize + 16 + 8;
inline constexpr std::uint32_t kPbkdf2Iterations = 100'000;
inline constexpr std::size_t kMaxUsernameLength = 255;
inline constexpr std::uint8_t kAuthHashSeparator = 0x1F;
inline constexpr std::string_view kOuterInfo = "loc-auth/outer";
inline constexpr std::string_view kInnerInfo = "loc-auth/inner";

using Salt = std::array<std::uint8_t, 16>;
using PasswordVerifier = crypto::Digest;
using AuthHash = crypto::Digest;

struct BroadcastMessage {
  BeaconId beacon;
  PeriodIndex period;
  abe::AbeCiphertext ciphertext;

  Bytes encode() const;
  static BroadcastMessage decode(ByteView wire);
};

struct LoginMessage {
  BeaconId beacon;
  PeriodIndex period;
  crypto::Nonce outer_nonce{};
  Bytes outer_sealed;

  /// version | type | beacon_id | period; bound as AAD of the outer layer.
  Bytes header() const;
  Bytes encode() const;
  static LoginMessage decode(ByteView wire);
};

struct UserRecord {
  std::string username;
  UserSeed seed{};
  Salt salt{};
  PasswordVerifier verifier{};
  abe::AttributeSet attributes;
};

/// Everything a user's device needs to run the client side of the protocol.
struct ClientBundle {
  std::string username;
  abe::UserSecretKey key;
  UserSeed seed{};
  Salt salt{};

  Bytes serialize() const;
  static ClientBundle deserialize(ByteView in);
};

class DuplicateUser : public std::invalid_argument {
 public:
  explicit DuplicateUser(const std::string& name)
      : std::invalid_argument("user '" + name + "' already registered") {}
};

/// The username database consulted during verification.
class Registry {
 public:
  void add(UserRecord record);
  const UserRecord* find(std::string_view username) const;
  const std::map<std::string, UserRecord, std::less<>>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::map<std::string, UserRecord, std::less<>> records_;
};

PasswordVerifier derive_verifier(std::string_view password, const Salt& salt);
AuthHash auth_hash(const SessionToken& token, const PasswordVerifier& verifier);
crypto::AeadKey outer_key(const SessionToken& token);
crypto::AeadKey inner_key(const CToken& c_token);

struct BeaconPolicyConfig {
  std::string policy_text;
  abe::AccessTree tree;
};

/// Compiles a backend's access rule. Throws abe::PolicyError.
BeaconPolicyConfig register_backend(std::string_view policy_text);

enum class RejectReason {
  UnknownUser,
  TokenMismatch,
  CTokenMismatch,
  HashMismatch,
  ReplayedNonce,
  MalformedMessage,
};

std::string_view to_string(RejectReason reason);

struct Authenticated {
  std::string username;
  BeaconId beacon;
  PeriodIndex period;
};

struct Rejected {
  RejectReason reason;
};

struct AuthResult {
  std::variant<Authenticated, Rejected> outcome;

  bool authenticated() const { return std::holds_alternative<Authenticated>(outcome); }
  const Authenticated& success() const { return std::get<Authenticated>(outcome); }
  /// Only meaningful when !authenticated().
  RejectReason reason() const { return std::get<Rejected>(outcome).reason; }
};

struct ServiceConfig {
  std::int64_t period_ms = kDefaultPeriodMs;
  /// Neighbouring periods also accepted at verification; 0 or 1.
  unsigned skew_periods = 0;
};

struct Registration {
  UserRecord record;
  ClientBundle bundle;
  bool weak_password = false;
};

/// The authentication authority: master material, username database, per-beacon
/// policies and the login replay cache. Not thread-safe; callers serialize access.
class LocAuthService {
 public:
  LocAuthService(abe::PublicParams params, abe::MasterKey msk, MasterSecret master_secret,
                 ServiceConfig config = {});

  const abe::PublicParams& params() const { return params_; }
  const ServiceConfig& config() const { return config_; }
  const Registry& registry() const { return registry_; }

  /// Binds (or replaces) the access rule broadcast by `beacon`.
  const BeaconPolicyConfig& register_backend(const BeaconId& beacon, std::string_view policy_text);
  const BeaconPolicyConfig* policy(const BeaconId& beacon) const;

  /// Throws DuplicateUser, or std::invalid_argument on a bad username / empty attribute set.
  Registration register_user(std::string_view username, std::string_view password,
                             const abe::AttributeSet& attrs, Rng& rng);
  /// Adds a record loaded from storage.
  void add_user(UserRecord record) { registry_.add(std::move(record)); }

  /// Throws std::out_of_range if `beacon` has no registered policy.
  BroadcastMessage broadcast_step(const BeaconId& beacon, const Clock& clock, Rng& rng) const;

  /// `receiving_beacon` is the beacon the login physically arrived at; its
  /// current token is the only one accepted.
  AuthResult verify_login(const LoginMessage& msg, const BeaconId& receiving_beacon,
                          const Clock& clock);
  AuthResult verify_login(ByteView wire, const BeaconId& receiving_beacon, const Clock& clock);

 private:
  abe::PublicParams params_;
  abe::MasterKey msk_;
  MasterSecret master_secret_;
  ServiceConfig config_;
  Registry registry_;
  std::map<BeaconId, BeaconPolicyConfig> policies_;

  std::optional<PeriodIndex> cache_period_;
  std::set<std::tuple<BeaconId, std::uint64_t, crypto::Nonce>> replay_cache_;
};

enum class NoActionReason { PolicyNotSatisfied, IntegrityFailure, BindingMismatch };

std::string_view to_string(NoActionReason reason);

struct NoAction {
  NoActionReason reason;
};

using ClientResult = std::variant<LoginMessage, NoAction>;

/// Client side of a sign-on. Silent (NoAction) when the broadcast cannot be
/// decrypted or its payload does not match the cleartext header.
ClientResult client_handle_broadcast(const BroadcastMessage& msg, const ClientBundle& bundle,
                                     const PasswordVerifier& verifier,
                                     const abe::PublicParams& params, const Clock& clock,
                                     std::int64_t period_ms, Rng& rng);

/// As above, deriving the verifier from the password and the bundle's salt.
ClientResult client_handle_broadcast(const BroadcastMessage& msg, const ClientBundle& bundle,
                                     std::string_view password, const abe::PublicParams& params,
                                     const Clock& clock, std::int64_t period_ms, Rng& rng);

}  // namespace locauth::protocol
