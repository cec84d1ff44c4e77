#include <gtest/gtest.h>

#include "ibrs/channel.hpp"
#include "test_support.hpp"

namespace ibrs {
namespace {

class ChannelTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SeededRng rng(3, "channel");
    sys_ = new SetupResult(setup(rng));
  }
  static void TearDownTestSuite() { delete sys_; }

  static SymmetricKey key_for(const std::string& rsu, const std::string& vid) {
    return derive_shared_key_rsu(keygen_rsu(sys_->master, rsu).rsk, hash_to_g1(as_bytes(vid)));
  }

  static std::vector<G1> pids(std::size_t n, std::size_t offset = 0) {
    std::vector<G1> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(hash_to_g1(ByteWriter().u64(i + offset).bytes()));
    return out;
  }

  static SetupResult* sys_;
};

SetupResult* ChannelTest::sys_ = nullptr;

ErrorCode open_error(const SymmetricKey& key, const SealedRingList& s) {
  try {
    open_ring_list(key, s);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

TEST_F(ChannelTest, RoundtripAcrossSizes) {
  SeededRng rng(1);
  const auto key = key_for("rsu", "veh");
  const auto all = pids(1000);
  for (std::size_t n : {1u, 2u, 17u, 256u, 1000u}) {
    const std::vector<G1> list(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
    const auto sealed = seal_ring_list(key, list, 5000, rng);
    const auto wire = SealedRingList::from_bytes(sealed.to_bytes());
    const auto opened = open_ring_list(key, wire);
    EXPECT_EQ(opened.pids, list);
    EXPECT_EQ(opened.expires_at, 5000u);
  }
}

TEST_F(ChannelTest, EveryBitOfCiphertextMacAndExpiryIsAuthenticated) {
  SeededRng rng(2);
  const auto key = key_for("rsu", "veh");
  const auto sealed = seal_ring_list(key, pids(3), 77, rng);
  for (std::size_t bit = 0; bit < sealed.ciphertext.size() * 8; ++bit) {
    auto s = sealed;
    test::flip_bit(s.ciphertext, bit);
    ASSERT_EQ(open_error(key, s), ErrorCode::kMacFailure);
  }
  for (std::size_t bit = 0; bit < sealed.mac.size() * 8; ++bit) {
    auto s = sealed;
    test::flip_bit(s.mac, bit);
    ASSERT_EQ(open_error(key, s), ErrorCode::kMacFailure);
  }
  for (unsigned bit = 0; bit < 64; ++bit) {
    auto s = sealed;
    s.expires_at ^= std::uint64_t{1} << bit;
    ASSERT_EQ(open_error(key, s), ErrorCode::kMacFailure);
  }
}

TEST_F(ChannelTest, MacCheckedBeforeDecrypt) {
  SeededRng rng(3);
  const auto key = key_for("rsu", "veh");
  auto sealed = seal_ring_list(key, pids(2), 1, rng);
  sealed.mac[0] ^= 1;
  const auto before = channel_counters();
  EXPECT_THROW(open_ring_list(key, sealed), Error);
  const auto after = channel_counters();
  EXPECT_EQ(after.mac_checks, before.mac_checks + 1);
  EXPECT_EQ(after.decryptions, before.decryptions);
}

TEST_F(ChannelTest, WrongKeyNeverOpens) {
  SeededRng rng(4);
  int accepted = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto k1 = derive_symmetric_key(pair(G1::random(rng), G2::generator()));
    const auto k2 = derive_symmetric_key(pair(G1::random(rng), G2::generator()));
    const auto sealed = seal_ring_list(k1, pids(2), 9, rng);
    accepted += open_error(k2, sealed) == ErrorCode::kMacFailure ? 0 : 1;
  }
  EXPECT_EQ(accepted, 0);
}

TEST_F(ChannelTest, EqualLengthListsGiveEqualLengthCiphertexts) {
  SeededRng rng(5);
  const auto key = key_for("rsu", "veh");
  const auto a = seal_ring_list(key, pids(5, 0), 1, rng);
  const auto b = seal_ring_list(key, pids(5, 100), 2, rng);
  EXPECT_EQ(a.ciphertext.size(), b.ciphertext.size());
  EXPECT_EQ(a.to_bytes().size(), b.to_bytes().size());
  EXPECT_NE(a.ciphertext, b.ciphertext);
}

TEST_F(ChannelTest, HeaderAndShapeErrors) {
  SeededRng rng(6);
  const auto key = key_for("rsu", "veh");
  auto sealed = seal_ring_list(key, pids(2), 1, rng);
  auto bad_alg = sealed;
  bad_alg.cipher = 9;
  EXPECT_EQ(open_error(key, bad_alg), ErrorCode::kUnsupportedAlgorithm);
  EXPECT_THROW(seal_ring_list(key, {}, 1, rng), Error);
  Bytes wire = sealed.to_bytes();
  wire.pop_back();
  EXPECT_THROW(SealedRingList::from_bytes(wire), Error);
}

}  // namespace
}  // namespace ibrs
