#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>

#include "locauth/keystore.hpp"

namespace fs = std::filesystem;
using namespace locauth;
using namespace locauth::store;

namespace {

class KeystoreTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("locauth-ks-" + std::to_string(::getpid()) + "-" +
           ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  static fs::perms mode(const fs::path& p) {
    return fs::status(p).permissions() & fs::perms::all;
  }

  fs::path dir;
};

}  // namespace

TEST_F(KeystoreTest, CreateLoadRoundTrip) {
  auto rng = Rng::from_seed(1);
  const auto created = create_keystore(dir, rng, false);
  const auto loaded = load_keystore(dir);
  EXPECT_EQ(loaded.params.serialize(), created.params.serialize());
  EXPECT_EQ(loaded.msk.serialize(), created.msk.serialize());
  EXPECT_EQ(loaded.master_secret, created.master_secret);
  const auto hex = read_file(dir / "params.hex");
  ASSERT_FALSE(hex.empty());
  EXPECT_EQ(hex.back(), '\n');
  EXPECT_EQ(from_hex(std::string(hex.begin(), hex.end() - 1)), created.params.serialize());
}

TEST_F(KeystoreTest, SecretFilesAreOwnerOnly) {
  auto rng = Rng::from_seed(2);
  create_keystore(dir, rng, false);
  const auto owner_rw = fs::perms::owner_read | fs::perms::owner_write;
  EXPECT_EQ(mode(dir / "msk.bin"), owner_rw);
  EXPECT_EQ(mode(dir / "master_secret.bin"), owner_rw);
  EXPECT_EQ(mode(dir / "master_secret.hex"), owner_rw);
  EXPECT_EQ(mode(dir / "params.bin"), owner_rw | fs::perms::group_read | fs::perms::others_read);
}

TEST_F(KeystoreTest, RefusesToOverwriteWithoutForce) {
  auto rng = Rng::from_seed(3);
  const auto first = create_keystore(dir, rng, false);
  EXPECT_THROW(create_keystore(dir, rng, false), KeystoreError);
  EXPECT_EQ(load_keystore(dir).master_secret, first.master_secret);
  const auto second = create_keystore(dir, rng, true);
  EXPECT_NE(load_keystore(dir).master_secret, first.master_secret);
  EXPECT_EQ(load_keystore(dir).master_secret, second.master_secret);
}

TEST_F(KeystoreTest, DetectsCorruptionAndMismatch) {
  auto rng = Rng::from_seed(4);
  create_keystore(dir, rng, false);
  const auto other = fs::path(dir.string() + "-other");
  fs::remove_all(other);
  create_keystore(other, rng, false);
  fs::copy_file(other / "msk.bin", dir / "msk.bin", fs::copy_options::overwrite_existing);
  fs::remove_all(other);
  EXPECT_THROW(load_keystore(dir), KeystoreError);
  fs::remove_all(dir);
  EXPECT_THROW(load_keystore(dir), KeystoreError);
}

TEST_F(KeystoreTest, LockIsExclusive) {
  fs::create_directories(dir);
  {
    DirectoryLock lock(dir);
    EXPECT_THROW(DirectoryLock second(dir), KeystoreError);
  }
  EXPECT_NO_THROW(DirectoryLock again(dir));
}

TEST_F(KeystoreTest, RegistryAndBundleSurviveRestart) {
  auto rng = Rng::from_seed(5);
  const auto ks = create_keystore(dir, rng, false);
  protocol::LocAuthService service(ks.params, ks.msk, ks.master_secret);
  const std::vector<std::string> attrs = {"firm:xyz", "clearance=5"};
  const auto reg = service.register_user("alice", "pw1234", abe::parse_attribute_set(attrs), rng);
  save_registry(registry_path(dir), service.registry());
  save_bundle(dir, reg.bundle);

  const auto first = read_file(registry_path(dir));
  const auto registry = load_registry(registry_path(dir));
  ASSERT_NE(registry.find("alice"), nullptr);
  EXPECT_EQ(registry.find("alice")->verifier, reg.record.verifier);
  EXPECT_EQ(registry.find("alice")->attributes, reg.record.attributes);
  save_registry(registry_path(dir), registry);
  EXPECT_EQ(read_file(registry_path(dir)), first);

  EXPECT_EQ(load_bundle(dir, "alice").serialize(), reg.bundle.serialize());
  EXPECT_EQ(mode(bundle_path(dir, "alice")), fs::perms::owner_read | fs::perms::owner_write);
  EXPECT_THROW(load_bundle(dir, "bob"), KeystoreError);
  EXPECT_EQ(load_registry(dir / "absent.json").size(), 0u);
}
