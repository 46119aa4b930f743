#include "locauth/protocol.hpp"

#include <openssl/crypto.h>

#include <algorithm>

namespace locauth::protocol {

namespace {

constexpr std::uint8_t kBundleTag = 0x20;

void put_header(Bytes& out, std::uint8_t type, const BeaconId& beacon, PeriodIndex period) {
  out.push_back(kWireVersion);
  out.push_back(type);
  append(out, beacon.bytes());
  put_u64_be(out, period.value);
}

std::pair<BeaconId, PeriodIndex> read_header(ByteReader& r, std::uint8_t expected_type) {
  if (r.u8() != kWireVersion) throw DecodeError("unsupported wire version");
  if (r.u8() != expected_type) throw DecodeError("unexpected message type");
  BeaconId beacon(r.array<16>());
  PeriodIndex period{r.u64_be()};
  return {beacon, period};
}

crypto::AeadKey hkdf_key(ByteView token, std::string_view info) {
  auto raw = crypto::hkdf_sha256(token, {}, as_bytes(info), crypto::kAeadKeySize);
  crypto::AeadKey key{};
  std::copy(raw.begin(), raw.end(), key.begin());
  return key;
}

void validate_username(std::string_view username) {
  if (username.empty() || username.size() > kMaxUsernameLength) {
    throw std::invalid_argument("username must be 1..255 bytes");
  }
}

}  // namespace

// ---- messages -------------------------------------------------------------------

Bytes BroadcastMessage::encode() const {
  Bytes out;
  put_header(out, kBroadcastType, beacon, period);
  append(out, ciphertext.serialize());
  return out;
}

BroadcastMessage BroadcastMessage::decode(ByteView wire) {
  ByteReader r(wire);
  auto [beacon, period] = read_header(r, kBroadcastType);
  return {beacon, period, abe::AbeCiphertext::deserialize(r.rest())};
}

Bytes LoginMessage::header() const {
  Bytes out;
  put_header(out, kLoginType, beacon, period);
  return out;
}

Bytes LoginMessage::encode() const {
  Bytes out = header();
  append(out, outer_nonce);
  append(out, outer_sealed);
  return out;
}

LoginMessage LoginMessage::decode(ByteView wire) {
  ByteReader r(wire);
  auto [beacon, period] = read_header(r, kLoginType);
  LoginMessage msg{beacon, period, r.array<crypto::kNonceSize>(), {}};
  auto rest = r.rest();
  if (rest.size() < crypto::kTagSize) throw DecodeError("login ciphertext shorter than its tag");
  msg.outer_sealed.assign(rest.begin(), rest.end());
  return msg;
}

Bytes ClientBundle::serialize() const {
  Bytes out{kWireVersion, kBundleTag};
  put_u16_be(out, static_cast<std::uint16_t>(username.size()));
  append(out, as_bytes(username));
  append(out, seed);
  append(out, salt);
  append(out, key.serialize());
  return out;
}

ClientBundle ClientBundle::deserialize(ByteView in) {
  ByteReader r(in);
  if (r.u8() != kWireVersion || r.u8() != kBundleTag) throw DecodeError("not a client bundle");
  ClientBundle b;
  auto name = r.take(r.u16_be());
  b.username.assign(name.begin(), name.end());
  b.seed = r.array<kSecretSize>();
  b.salt = r.array<16>();
  b.key = abe::UserSecretKey::deserialize(r.rest());
  return b;
}

// ---- registry / derivations -------------------------------------------------------

void Registry::add(UserRecord record) {
  validate_username(record.username);
  if (records_.contains(record.username)) throw DuplicateUser(record.username);
  auto name = record.username;
  records_.emplace(std::move(name), std::move(record));
}

const UserRecord* Registry::find(std::string_view username) const {
  auto it = records_.find(username);
  return it == records_.end() ? nullptr : &it->second;
}

PasswordVerifier derive_verifier(std::string_view password, const Salt& salt) {
  return crypto::pbkdf2_sha256(password, salt, kPbkdf2Iterations);
}

AuthHash auth_hash(const SessionToken& token, const PasswordVerifier& verifier) {
  const std::uint8_t sep[] = {kAuthHashSeparator};
  return crypto::sha256({token.bytes, sep, verifier});
}

crypto::AeadKey outer_key(const SessionToken& token) { return hkdf_key(token.bytes, kOuterInfo); }
crypto::AeadKey inner_key(const CToken& c_token) { return hkdf_key(c_token.bytes, kInnerInfo); }

BeaconPolicyConfig register_backend(std::string_view policy_text) {
  return {std::string(policy_text), abe::parse_policy(policy_text)};
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::UnknownUser: return "UnknownUser";
    case RejectReason::TokenMismatch: return "TokenMismatch";
    case RejectReason::CTokenMismatch: return "CTokenMismatch";
    case RejectReason::HashMismatch: return "HashMismatch";
    case RejectReason::ReplayedNonce: return "ReplayedNonce";
    case RejectReason::MalformedMessage: return "MalformedMessage";
  }
  return "?";
}

std::string_view to_string(NoActionReason reason) {
  switch (reason) {
    case NoActionReason::PolicyNotSatisfied: return "PolicyNotSatisfied";
    case NoActionReason::IntegrityFailure: return "IntegrityFailure";
    case NoActionReason::BindingMismatch: return "BindingMismatch";
  }
  return "?";
}

// ---- service --------------------------------------------------------------------------

LocAuthService::LocAuthService(abe::PublicParams params, abe::MasterKey msk,
                               MasterSecret master_secret, ServiceConfig config)
    : params_(std::move(params)),
      msk_(std::move(msk)),
      master_secret_(master_secret),
      config_(config) {
  if (config_.period_ms <= 0) throw std::invalid_argument("period_ms must be positive");
  if (config_.skew_periods > 1) throw std::invalid_argument("skew window is at most one period");
}

const BeaconPolicyConfig& LocAuthService::register_backend(const BeaconId& beacon,
                                                           std::string_view policy_text) {
  auto cfg = protocol::register_backend(policy_text);
  return policies_.insert_or_assign(beacon, std::move(cfg)).first->second;
}

const BeaconPolicyConfig* LocAuthService::policy(const BeaconId& beacon) const {
  auto it = policies_.find(beacon);
  return it == policies_.end() ? nullptr : &it->second;
}

Registration LocAuthService::register_user(std::string_view username, std::string_view password,
                                           const abe::AttributeSet& attrs, Rng& rng) {
  validate_username(username);
  if (registry_.find(username)) throw DuplicateUser(std::string(username));
  if (attrs.empty()) throw std::invalid_argument("user needs at least one attribute");

  Registration reg;
  reg.record.username = std::string(username);
  reg.record.seed = rng.bytes<kSecretSize>();
  reg.record.salt = rng.bytes<16>();
  reg.record.verifier = derive_verifier(password, reg.record.salt);
  reg.record.attributes = attrs;
  reg.bundle = {reg.record.username, abe::keygen(msk_, params_, attrs, rng), reg.record.seed,
                reg.record.salt};
  reg.weak_password = password.size() < 4;
  registry_.add(reg.record);
  return reg;
}

BroadcastMessage LocAuthService::broadcast_step(const BeaconId& beacon, const Clock& clock,
                                                Rng& rng) const {
  const auto* cfg = policy(beacon);
  if (!cfg) throw std::out_of_range("beacon " + beacon.to_string() + " has no policy");
  const auto period = current_period(clock, config_.period_ms);
  const auto token = derive_session_token(master_secret_, beacon, period);

  Bytes payload(token.bytes.begin(), token.bytes.end());
  append(payload, beacon.bytes());
  put_u64_be(payload, period.value);
  return {beacon, period, abe::encrypt(params_, cfg->tree, payload, rng)};
}

AuthResult LocAuthService::verify_login(ByteView wire, const BeaconId& receiving_beacon,
                                        const Clock& clock) {
  LoginMessage msg;
  try {
    msg = LoginMessage::decode(wire);
  } catch (const DecodeError&) {
    return {Rejected{RejectReason::MalformedMessage}};
  }
  return verify_login(msg, receiving_beacon, clock);
}

AuthResult LocAuthService::verify_login(const LoginMessage& msg, const BeaconId& receiving_beacon,
                                        const Clock& clock) {
  const auto now = current_period(clock, config_.period_ms);
  if (cache_period_ != now) {
    replay_cache_.clear();
    cache_period_ = now;
  }

  std::vector<PeriodIndex> candidates{now};
  if (config_.skew_periods == 1) {
    if (now.value > 0) candidates.push_back({now.value - 1});
    candidates.push_back({now.value + 1});
  }

  const Bytes aad = msg.header();
  std::optional<Bytes> outer;
  PeriodIndex matched;
  SessionToken token;
  for (auto p : candidates) {
    token = derive_session_token(master_secret_, receiving_beacon, p);
    outer = crypto::aead_open(outer_key(token), msg.outer_nonce, msg.outer_sealed, aad);
    if (outer) {
      matched = p;
      break;
    }
  }
  if (!outer) return {Rejected{RejectReason::TokenMismatch}};

  if (!replay_cache_.emplace(receiving_beacon, matched.value, msg.outer_nonce).second) {
    return {Rejected{RejectReason::ReplayedNonce}};
  }

  std::string username;
  crypto::Nonce inner_nonce{};
  Bytes inner_sealed;
  try {
    ByteReader r(*outer);
    auto name = r.take(r.u16_be());
    username.assign(name.begin(), name.end());
    inner_nonce = r.array<crypto::kNonceSize>();
    auto rest = r.rest();
    inner_sealed.assign(rest.begin(), rest.end());
  } catch (const DecodeError&) {
    return {Rejected{RejectReason::MalformedMessage}};
  }

  const auto* user = registry_.find(username);
  if (!user) return {Rejected{RejectReason::UnknownUser}};

  const auto c_token = derive_c_token(user->seed, matched);
  auto received = crypto::aead_open(inner_key(c_token), inner_nonce, inner_sealed);
  if (!received) return {Rejected{RejectReason::CTokenMismatch}};

  const auto expected = auth_hash(token, user->verifier);
  if (received->size() != expected.size() ||
      CRYPTO_memcmp(received->data(), expected.data(), expected.size()) != 0) {
    return {Rejected{RejectReason::HashMismatch}};
  }
  return {Authenticated{user->username, receiving_beacon, matched}};
}

// ---- client ------------------------------------------------------------------------------

ClientResult client_handle_broadcast(const BroadcastMessage& msg, const ClientBundle& bundle,
                                     const PasswordVerifier& verifier,
                                     const abe::PublicParams& params, const Clock& clock,
                                     std::int64_t period_ms, Rng& rng) {
  Bytes payload;
  try {
    payload = abe::decrypt(params, bundle.key, msg.ciphertext);
  } catch (const abe::PolicyNotSatisfied&) {
    return NoAction{NoActionReason::PolicyNotSatisfied};
  } catch (const abe::IntegrityFailure&) {
    return NoAction{NoActionReason::IntegrityFailure};
  }
  if (payload.size() != kBroadcastPayloadSize) return NoAction{NoActionReason::BindingMismatch};

  ByteReader r(payload);
  SessionToken token{r.array<kTokenSize>()};
  BeaconId bound_beacon(r.array<16>());
  PeriodIndex bound_period{r.u64_be()};
  if (bound_beacon != msg.beacon || bound_period != msg.period) {
    return NoAction{NoActionReason::BindingMismatch};
  }

  const auto c_token = derive_c_token(bundle.seed, current_period(clock, period_ms));
  const auto hash = auth_hash(token, verifier);
  const auto inner_nonce = rng.bytes<crypto::kNonceSize>();
  const auto inner = crypto::aead_seal(inner_key(c_token), inner_nonce, hash);

  Bytes outer_plain;
  put_u16_be(outer_plain, static_cast<std::uint16_t>(bundle.username.size()));
  append(outer_plain, as_bytes(bundle.username));
  append(outer_plain, inner_nonce);
  append(outer_plain, inner);

  LoginMessage login{msg.beacon, msg.period, rng.bytes<crypto::kNonceSize>(), {}};
  login.outer_sealed = crypto::aead_seal(outer_key(token), login.outer_nonce, outer_plain,
                                         login.header());
  return login;
}

ClientResult client_handle_broadcast(const BroadcastMessage& msg, const ClientBundle& bundle,
                                     std::string_view password, const abe::PublicParams& params,
                                     const Clock& clock, std::int64_t period_ms, Rng& rng) {
  return client_handle_broadcast(msg, bundle, derive_verifier(password, bundle.salt), params,
                                 clock, period_ms, rng);
}

}  // namespace locauth::protocol
