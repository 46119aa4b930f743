#include "locauth/vectors.hpp"

#include <numeric>

#include "locauth/protocol.hpp"

namespace locauth {

namespace {

template <std::size_t N>
std::array<std::uint8_t, N> counting(std::uint8_t start) {
  std::array<std::uint8_t, N> out{};
  std::iota(out.begin(), out.end(), start);
  return out;
}

constexpr std::uint64_t kPeriods[] = {0, 1, 56'666'666, (std::uint64_t{1} << 32) + 5};
constexpr const char* kPassword = "correct horse";

}  // namespace

std::vector<VectorEntry> token_vectors() {
  const auto master = counting<kSecretSize>(0x00);
  const auto seed = counting<kSecretSize>(0x20);
  const auto salt = counting<16>(0xa0);
  const auto beacon = BeaconId::parse("00112233-4455-6677-8899-aabbccddeeff");
  const auto verifier = protocol::derive_verifier(kPassword, salt);

  std::vector<VectorEntry> out = {
      {"master_secret", to_hex(master)},
      {"beacon_id", beacon.to_string()},
      {"user_seed", to_hex(seed)},
      {"password", std::string("\"") + kPassword + "\""},
      {"salt", to_hex(salt)},
      {"pbkdf2_iterations", std::to_string(protocol::kPbkdf2Iterations)},
      {"pwd_verifier", to_hex(verifier)},
  };
  for (const auto p : kPeriods) {
    const PeriodIndex period{p};
    const auto token = derive_session_token(master, beacon, period);
    const auto ctoken = derive_c_token(seed, period);
    out.push_back({"period", std::to_string(p)});
    out.push_back({"session_token", to_hex(token.bytes)});
    out.push_back({"c_token", to_hex(ctoken.bytes)});
    out.push_back({"outer_key", to_hex(protocol::outer_key(token))});
    out.push_back({"inner_key", to_hex(protocol::inner_key(ctoken))});
    out.push_back({"auth_hash", to_hex(protocol::auth_hash(token, verifier))});
  }
  return out;
}

std::string render_vectors() {
  std::string out;
  for (const auto& e : token_vectors()) {
    if (e.key == "period") out += '\n';
    out += e.key + " = " + e.value + '\n';
  }
  return out;
}

}  // namespace locauth
