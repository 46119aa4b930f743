#include "locauth/keystore.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "locauth/abe/attribute.hpp"

namespace locauth::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kParams = "params";
constexpr const char* kMsk = "msk";
constexpr const char* kMasterSecret = "master_secret";

[[noreturn]] void sys_fail(const std::string& what) {
  throw KeystoreError(what + ": " + std::strerror(errno));
}

void write_with_hex(const fs::path& dir, const std::string& stem, ByteView data, bool secret) {
  write_file(dir / (stem + ".bin"), data, secret);
  const auto hex = to_hex(data) + "\n";
  write_file(dir / (stem + ".hex"), as_bytes(hex), secret);
}

std::string string_field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw KeystoreError(where + ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

template <std::size_t N>
std::array<std::uint8_t, N> hex_array(const json& j, const char* key, const std::string& where) {
  try {
    return array_from_hex<N>(string_field(j, key, where));
  } catch (const KeystoreError&) {
    throw;
  } catch (const std::exception& e) {
    throw KeystoreError(where + "." + key + ": " + e.what());
  }
}

bool valid_username_file(const std::string& username) {
  if (username.empty() || username == "." || username == "..") return false;
  for (char c : username) {
    if (c == '/' || c == '\0') return false;
  }
  return true;
}

}  // namespace

DirectoryLock::DirectoryLock(const fs::path& dir) {
  const auto path = dir / ".lock";
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0600);
  if (fd_ < 0) sys_fail("cannot open " + path.string());
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw KeystoreError("keystore " + dir.string() + " is locked by another process");
  }
}

DirectoryLock::~DirectoryLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

void write_file(const fs::path& path, ByteView data, bool secret) {
  const auto tmp = fs::path(path.string() + ".tmp");
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, secret ? 0600 : 0644);
  if (fd < 0) sys_fail("cannot create " + tmp.string());
  // open() honours the umask; make the secret mode exact.
  if (secret && ::fchmod(fd, 0600) != 0) {
    ::close(fd);
    sys_fail("cannot chmod " + tmp.string());
  }
  std::size_t off = 0;
  while (off < data.size()) {
    const auto n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      sys_fail("cannot write " + tmp.string());
    }
    off += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0 || ::close(fd) != 0) sys_fail("cannot flush " + tmp.string());
  if (::rename(tmp.c_str(), path.c_str()) != 0) sys_fail("cannot rename to " + path.string());
}

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw KeystoreError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto s = ss.str();
  return Bytes(s.begin(), s.end());
}

bool keystore_exists(const fs::path& dir) {
  for (const char* stem : {kParams, kMsk, kMasterSecret}) {
    if (fs::exists(dir / (std::string(stem) + ".bin"))) return true;
  }
  return false;
}

Keystore create_keystore(const fs::path& dir, Rng& rng, bool force, unsigned security_bits) {
  fs::create_directories(dir);
  DirectoryLock lock(dir);
  if (keystore_exists(dir) && !force) {
    throw KeystoreError("keystore already exists in " + dir.string() + " (use --force)");
  }
  auto [params, msk] = abe::setup(security_bits, rng);
  Keystore ks{std::move(params), std::move(msk), rng.bytes<kSecretSize>()};
  write_with_hex(dir, kParams, ks.params.serialize(), false);
  write_with_hex(dir, kMsk, ks.msk.serialize(), true);
  write_with_hex(dir, kMasterSecret, ks.master_secret, true);
  return ks;
}

Keystore load_keystore(const fs::path& dir) {
  if (!keystore_exists(dir)) throw KeystoreError("no keystore in " + dir.string());
  Keystore ks;
  try {
    ks.params = abe::PublicParams::deserialize(read_file(dir / "params.bin"));
    ks.msk = abe::MasterKey::deserialize(read_file(dir / "msk.bin"));
  } catch (const KeystoreError&) {
    throw;
  } catch (const std::exception& e) {
    throw KeystoreError("corrupt keystore in " + dir.string() + ": " + e.what());
  }
  const auto secret = read_file(dir / "master_secret.bin");
  if (secret.size() != kSecretSize) throw KeystoreError("master_secret.bin has the wrong size");
  std::copy(secret.begin(), secret.end(), ks.master_secret.begin());

  if (!ks.params.valid()) throw KeystoreError("public parameters fail validation");
  // h = g1^beta and e(g1, g2^alpha) = e(g1, g2)^alpha tie the master key to the params.
  if (!(ks.params.g1 * ks.msk.beta == ks.params.h) ||
      !(abe::Gt::pairing(ks.params.g1, ks.msk.g2_alpha) == ks.params.egg_alpha)) {
    throw KeystoreError("master key does not match the public parameters");
  }
  return ks;
}

nlohmann::ordered_json registry_to_json(const protocol::Registry& registry) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  doc["schema"] = 1;
  doc["users"] = nlohmann::ordered_json::array();
  for (const auto& [name, rec] : registry.records()) {
    nlohmann::ordered_json u = nlohmann::ordered_json::object();
    u["username"] = rec.username;
    u["seed"] = to_hex(rec.seed);
    u["salt"] = to_hex(rec.salt);
    u["verifier"] = to_hex(rec.verifier);
    u["attributes"] = nlohmann::ordered_json::array();
    for (const auto& a : rec.attributes) u["attributes"].push_back(a.name());
    doc["users"].push_back(std::move(u));
  }
  return doc;
}

protocol::Registry registry_from_json(const json& doc) {
  if (!doc.is_object() || doc.value("schema", 0) != 1 || !doc.contains("users") ||
      !doc["users"].is_array()) {
    throw KeystoreError("registry: expected {\"schema\": 1, \"users\": [...]}");
  }
  protocol::Registry registry;
  for (std::size_t i = 0; i < doc["users"].size(); ++i) {
    const auto& u = doc["users"][i];
    const std::string where = "registry.users[" + std::to_string(i) + "]";
    if (!u.is_object()) throw KeystoreError(where + ": expected an object");
    protocol::UserRecord rec;
    rec.username = string_field(u, "username", where);
    rec.seed = hex_array<kSecretSize>(u, "seed", where);
    rec.salt = hex_array<16>(u, "salt", where);
    rec.verifier = hex_array<32>(u, "verifier", where);
    if (!u.contains("attributes") || !u["attributes"].is_array()) {
      throw KeystoreError(where + ": missing attributes");
    }
    try {
      for (const auto& a : u["attributes"]) rec.attributes.insert(abe::Attribute::parse(a.get<std::string>()));
      registry.add(std::move(rec));
    } catch (const std::exception& e) {
      throw KeystoreError(where + ": " + e.what());
    }
  }
  return registry;
}

fs::path registry_path(const fs::path& dir) { return dir / "registry.json"; }

protocol::Registry load_registry(const fs::path& path) {
  if (!fs::exists(path)) return {};
  const auto bytes = read_file(path);
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw KeystoreError("registry " + path.string() + ": malformed JSON");
  }
  return registry_from_json(doc);
}

void save_registry(const fs::path& path, const protocol::Registry& registry) {
  const auto text = registry_to_json(registry).dump(2) + "\n";
  write_file(path, as_bytes(text), true);
}

fs::path bundle_path(const fs::path& dir, const std::string& username) {
  if (!valid_username_file(username)) throw KeystoreError("username not usable as a file name");
  return dir / "users" / (username + ".bundle");
}

void save_bundle(const fs::path& dir, const protocol::ClientBundle& bundle) {
  const auto path = bundle_path(dir, bundle.username);
  fs::create_directories(path.parent_path());
  const auto bytes = bundle.serialize();
  write_file(path, bytes, true);
  const auto hex = to_hex(bytes) + "\n";
  write_file(fs::path(path.string() + ".hex"), as_bytes(hex), true);
}

protocol::ClientBundle load_bundle(const fs::path& dir, const std::string& username) {
  const auto path = bundle_path(dir, username);
  if (!fs::exists(path)) throw KeystoreError("no bundle for user '" + username + "'");
  try {
    return protocol::ClientBundle::deserialize(read_file(path));
  } catch (const KeystoreError&) {
    throw;
  } catch (const std::exception& e) {
    throw KeystoreError("corrupt bundle " + path.string() + ": " + e.what());
  }
}

}  // namespace locauth::store
