#pragma once

// File-backed authority state.
//
//   <dir>/params.bin         ABE public parameters        (+ params.hex)
//   <dir>/msk.bin            ABE master key, mode 0600    (+ msk.hex)
//   <dir>/master_secret.bin  token master secret, 0600    (+ master_secret.hex)
//   <dir>/registry.json      username database
//   <dir>/users/<name>.bundle  client bundle, 0600        (+ .hex)
//   <dir>/.lock              advisory lock held while a command runs

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "locauth/abe/cpabe.hpp"
#include "locauth/protocol.hpp"
#include "locauth/rng.hpp"

namespace locauth::store {

class KeystoreError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Keystore {
  abe::PublicParams params;
  abe::MasterKey msk;
  MasterSecret master_secret{};
};

/// Exclusive flock() on <dir>/.lock for the lifetime of the object.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& dir);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  int fd_ = -1;
};

/// Generates and writes fresh material. Refuses to touch an existing keystore
/// unless `force`.
Keystore create_keystore(const std::filesystem::path& dir, Rng& rng, bool force,
                         unsigned security_bits = 128);

/// Reads and checks the files (group membership, msk matches params).
Keystore load_keystore(const std::filesystem::path& dir);

bool keystore_exists(const std::filesystem::path& dir);

nlohmann::ordered_json registry_to_json(const protocol::Registry& registry);
protocol::Registry registry_from_json(const nlohmann::json& doc);

std::filesystem::path registry_path(const std::filesystem::path& dir);
/// An absent file is an empty registry.
protocol::Registry load_registry(const std::filesystem::path& path);
void save_registry(const std::filesystem::path& path, const protocol::Registry& registry);

std::filesystem::path bundle_path(const std::filesystem::path& dir, const std::string& username);
void save_bundle(const std::filesystem::path& dir, const protocol::ClientBundle& bundle);
protocol::ClientBundle load_bundle(const std::filesystem::path& dir, const std::string& username);

/// Writes via a temporary file and rename; `secret` files get mode 0600.
void write_file(const std::filesystem::path& path, ByteView data, bool secret);
Bytes read_file(const std::filesystem::path& path);

}  // namespace locauth::store
