#include <gtest/gtest.h>

#include <algorithm>
#include <memory>

#include "ibrs/entities.hpp"
#include "test_support.hpp"

namespace ibrs {
namespace {

constexpr Timestamp kNow = 1'700'000'010;

struct Net {
  SeededRng rng;
  SetupResult sys;
  Trc trc;
  std::vector<std::unique_ptr<Rsu>> rsus;
  std::vector<std::unique_ptr<Vehicle>> vehicles;
  std::vector<std::string> vids;
  std::vector<VehicleCredential> creds;  // test-side copies for direct signing

  Net(std::uint64_t seed, std::size_t n_rsu, std::size_t n_veh, RsuConfig rcfg = {}, VehicleConfig vcfg = {})
      : rng(seed, "net"), sys(setup(rng)), trc(sys.pp, sys.master) {
    for (std::size_t i = 0; i < n_rsu; ++i)
      rsus.push_back(std::make_unique<Rsu>(sys.pp, trc.register_rsu("RSU-" + std::to_string(i)), rcfg));
    for (std::size_t i = 0; i < n_veh; ++i) {
      vids.push_back("VIN-" + std::to_string(seed) + "-" + std::to_string(i));
      creds.push_back(trc.register_vehicle(vids.back()));
      vehicles.push_back(std::make_unique<Vehicle>(sys.pp, creds.back(), vcfg));
    }
    refresh(kNow);
  }

  void refresh(Timestamp now) {
    for (auto& r : rsus) r->refresh_prl(trc.prl(), trc.decoys(64, rng), now);
  }
};

TEST(Trc, RegistrationAndDuplicates) {
  Net net(1, 1, 0);
  const auto cred = net.trc.register_vehicle("VIN-A");
  EXPECT_TRUE(credential_consistent(net.sys.pp, cred));
  EXPECT_EQ(net.trc.registry().vid_of(cred.pid), "VIN-A");
  const auto rsu = net.trc.register_rsu("RSU-X");
  EXPECT_TRUE(credential_consistent(net.sys.pp, rsu));
  try {
    net.trc.register_vehicle("VIN-A");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateIdentity);
  }
  EXPECT_THROW(net.trc.register_rsu("RSU-X"), Error);
}

TEST(Trc, RevokeIdempotentAndUnknown) {
  Net net(2, 1, 3);
  EXPECT_EQ(net.trc.revoke(net.vids[0]).version, 1u);
  EXPECT_EQ(net.trc.revoke(net.vids[0]).version, 1u);
  EXPECT_EQ(net.trc.prl().revoked.size(), 1u);
  try {
    net.trc.revoke("VIN-nobody");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownIdentity);
  }
}

TEST(Trc, DecoysAreRegisteredAndUnrevoked) {
  Net net(3, 1, 10);
  net.trc.revoke(net.vids[4]);
  const auto d = net.trc.decoys(100, net.rng);
  EXPECT_EQ(d.size(), 9u);
  for (const auto& p : d) {
    EXPECT_TRUE(net.trc.registry().vid_of(p).has_value());
    EXPECT_FALSE(net.trc.prl().contains(p));
  }
}

TEST(Handshake, SucceedsAndListContainsRequester) {
  Net net(4, 1, 5);
  auto& v = *net.vehicles[0];
  ASSERT_EQ(acquire_ring(v, *net.rsus[0], kNow, net.rng), std::nullopt);
  ASSERT_TRUE(v.has_ring(kNow));
  const auto& pids = v.ring_list()->pids;
  EXPECT_NE(std::find(pids.begin(), pids.end(), v.pid()), pids.end());
  EXPECT_EQ(v.ring_list()->expires_at, net.rsus[0]->epoch_expiry(kNow));
  EXPECT_TRUE(net.rsus[0]->has_cached_key(v.pid()));
}

TEST(Handshake, TamperedSealedListLeavesStateUnchanged) {
  Net net(5, 1, 4);
  auto& v = *net.vehicles[0];
  auto& rsu = *net.rsus[0];
  ASSERT_EQ(acquire_ring(v, rsu, kNow, net.rng), std::nullopt);
  const RingList before = *v.ring_list();

  const Bytes req = v.request_ring(rsu.rid_broadcast(), net.rng);
  Bytes reply = rsu.handle_ring_request(req, kNow + 1, net.rng);
  test::flip_bit(reply, 8 * (wire::kFrameHeaderSize + 3 + 4) + 5);  // first byte of C*
  try {
    v.accept_ring(reply, kNow + 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMacFailure);
  }
  EXPECT_EQ(v.ring_list()->pids, before.pids);
  EXPECT_EQ(v.ring_list()->expires_at, before.expires_at);
}

TEST(Handshake, ExpiredListDiscarded) {
  Net net(6, 1, 3);
  auto& v = *net.vehicles[0];
  auto& rsu = *net.rsus[0];
  const Bytes req = v.request_ring(rsu.rid_broadcast(), net.rng);
  const Bytes reply = rsu.handle_ring_request(req, kNow, net.rng);
  try {
    v.accept_ring(reply, rsu.epoch_expiry(kNow));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRingListExpired);
  }
  EXPECT_FALSE(v.ring_list().has_value());
}

TEST(Handshake, MalformedCiphertextIsDecryptError) {
  Net net(7, 1, 2);
  Bytes req = net.vehicles[0]->request_ring(net.rsus[0]->rid_broadcast(), net.rng);
  req.back() ^= 0x40;  // last byte of the masked PID
  try {
    net.rsus[0]->handle_ring_request(req, kNow, net.rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDecryptionFailed);
  }
}

TEST(Handshake, AcceptWithoutRequestIsRejected) {
  Net net(8, 1, 2);
  auto& a = *net.vehicles[0];
  auto& b = *net.vehicles[1];
  const Bytes reply = net.rsus[0]->handle_ring_request(a.request_ring(net.rsus[0]->rid_broadcast(), net.rng), kNow,
                                                       net.rng);
  EXPECT_THROW(b.accept_ring(reply, kNow), Error);
}

TEST(Handshake, SealedListForAnotherVehicleFailsMac) {
  Net net(9, 1, 2);
  auto& a = *net.vehicles[0];
  auto& b = *net.vehicles[1];
  const Bytes rid = net.rsus[0]->rid_broadcast();
  const Bytes reply = net.rsus[0]->handle_ring_request(a.request_ring(rid, net.rng), kNow, net.rng);
  b.request_ring(rid, net.rng);
  try {
    b.accept_ring(reply, kNow);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMacFailure);
  }
}

TEST(Rsu, RevokedRequestRejectedAfterRefresh) {
  Net net(10, 1, 4);
  auto& v = *net.vehicles[1];
  auto& rsu = *net.rsus[0];
  ASSERT_EQ(acquire_ring(v, rsu, kNow, net.rng), std::nullopt);

  net.trc.revoke(net.vids[1]);
  // Before the refresh the RSU has not seen the revocation.
  EXPECT_EQ(acquire_ring(v, rsu, kNow + 1, net.rng), std::nullopt);
  net.refresh(kNow + 2);
  EXPECT_EQ(acquire_ring(v, rsu, kNow + 3, net.rng), ErrorCode::kRevoked);
  EXPECT_FALSE(rsu.has_cached_key(v.pid()));

  for (const auto& p : rsu.ring_list(kNow + 3)) EXPECT_FALSE(p == v.pid());
  // The list issued before revocation still works until it expires.
  ASSERT_TRUE(v.has_ring(kNow + 3));
  const auto env = v.broadcast(as_bytes("still valid"), kNow + 3, net.rng);
  EXPECT_TRUE(net.vehicles[0]->receive(env, kNow + 3));
}

TEST(Rsu, ListPaddedToFloorAndSorted) {
  Net net(11, 1, 40, RsuConfig{300, 32});
  ASSERT_EQ(acquire_ring(*net.vehicles[0], *net.rsus[0], kNow, net.rng), std::nullopt);
  const auto& pids = net.vehicles[0]->ring_list()->pids;
  EXPECT_EQ(pids.size(), 32u);
  for (std::size_t i = 1; i < pids.size(); ++i) EXPECT_LT(pids[i - 1].to_bytes(), pids[i].to_bytes());
}

TEST(Rsu, EpochRollClearsRequesters) {
  Net net(12, 1, 3, RsuConfig{300, 0});
  auto& rsu = *net.rsus[0];
  ASSERT_EQ(acquire_ring(*net.vehicles[0], rsu, kNow, net.rng), std::nullopt);
  EXPECT_EQ(rsu.ring_list(kNow).size(), 1u);
  EXPECT_TRUE(rsu.ring_list(rsu.epoch_expiry(kNow)).empty());
}

TEST(Vehicle, BroadcastRingContainsSignerAndVerifies) {
  Net net(13, 1, 12);
  auto& v = *net.vehicles[0];
  ASSERT_EQ(acquire_ring(v, *net.rsus[0], kNow, net.rng), std::nullopt);
  const auto& list = v.ring_list()->pids;
  for (std::size_t n = 2; n <= 8; ++n) {
    const auto env = v.broadcast(as_bytes("beacon"), kNow, net.rng, n);
    EXPECT_EQ(env.ring.size(), n);
    EXPECT_TRUE(env.ring.index_of(v.pid()).has_value());
    for (const auto& p : env.ring.members()) EXPECT_NE(std::find(list.begin(), list.end(), p), list.end());
    EXPECT_TRUE(net.vehicles[1]->receive(env, kNow));
  }
}

TEST(Vehicle, RingSizeBeyondListErrors) {
  Net net(14, 1, 5, RsuConfig{300, 4});
  auto& v = *net.vehicles[0];
  ASSERT_EQ(acquire_ring(v, *net.rsus[0], kNow, net.rng), std::nullopt);
  const auto len = v.ring_list()->pids.size();
  EXPECT_NO_THROW(v.broadcast(as_bytes("m"), kNow, net.rng, len));
  try {
    v.broadcast(as_bytes("m"), kNow, net.rng, len + 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientRing);
  }
}

TEST(Vehicle, BroadcastNeedsUnexpiredList) {
  Net net(15, 1, 4);
  auto& v = *net.vehicles[0];
  try {
    v.broadcast(as_bytes("m"), kNow, net.rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoRingList);
  }
  ASSERT_EQ(acquire_ring(v, *net.rsus[0], kNow, net.rng), std::nullopt);
  try {
    v.broadcast(as_bytes("m"), v.ring_list()->expires_at, net.rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRingListExpired);
  }
}

TEST(Vehicle, ReceiveReplayAndStale) {
  Net net(16, 1, 4);
  auto& tx = *net.vehicles[0];
  auto& rx = *net.vehicles[1];
  ASSERT_EQ(acquire_ring(tx, *net.rsus[0], kNow, net.rng), std::nullopt);
  const auto env = tx.broadcast(as_bytes("hello"), kNow, net.rng);

  EXPECT_TRUE(rx.receive(env, kNow + 1));
  EXPECT_EQ(rx.replay_cache_size(), 1u);
  {
    PairingCounter pc;
    const auto v = rx.receive(env, kNow + 2);
    EXPECT_EQ(v.reason, RejectReason::kReplay);
    EXPECT_EQ(pc.count(), 0u);
  }
  {
    PairingCounter pc;
    const auto v = rx.receive(env, kNow + 6);
    EXPECT_EQ(v.reason, RejectReason::kStale);
    EXPECT_EQ(pc.count(), 0u);
  }
  // Envelopes from the future beyond the window are stale too.
  EXPECT_EQ(net.vehicles[2]->receive(env, kNow - 6).reason, RejectReason::kStale);
  // Window boundary is inclusive.
  EXPECT_TRUE(net.vehicles[2]->receive(env, kNow + 5));
  EXPECT_EQ(rx.replay_cache_size(), 0u);
}

TEST(Vehicle, OwnEnvelopeEchoIsReplay) {
  Net net(26, 1, 3);
  auto& v = *net.vehicles[0];
  ASSERT_EQ(acquire_ring(v, *net.rsus[0], kNow, net.rng), std::nullopt);
  const auto env = v.broadcast(as_bytes("echo"), kNow, net.rng);
  EXPECT_EQ(v.receive(env, kNow).reason, RejectReason::kReplay);
}

TEST(Vehicle, ReceiveRejectsForgery) {
  Net net(17, 1, 4);
  auto& tx = *net.vehicles[0];
  ASSERT_EQ(acquire_ring(tx, *net.rsus[0], kNow, net.rng), std::nullopt);
  auto env = tx.broadcast(as_bytes("hello"), kNow, net.rng);
  env.message[0] ^= 1;
  EXPECT_EQ(net.vehicles[1]->receive(env, kNow).reason, RejectReason::kEquation);
  EXPECT_EQ(net.vehicles[1]->replay_cache_size(), 0u);
}

TEST(Vehicle, BatchReceiveFiltersThenVerifies) {
  Net net(18, 1, 6);
  auto& tx = *net.vehicles[0];
  auto& rx = *net.vehicles[1];
  ASSERT_EQ(acquire_ring(tx, *net.rsus[0], kNow, net.rng), std::nullopt);
  std::vector<BroadcastEnvelope> envs;
  envs.push_back(tx.broadcast(as_bytes("a"), kNow, net.rng));
  envs.push_back(tx.broadcast(as_bytes("b"), kNow - 30, net.rng));  // stale
  envs.push_back(tx.broadcast(as_bytes("c"), kNow + 1, net.rng));
  envs.push_back(envs[0]);  // duplicate inside the batch

  PairingCounter pc;
  const auto r = rx.receive_batch(envs, kNow, net.rng);
  ASSERT_EQ(r.filtered.size(), 4u);
  EXPECT_TRUE(r.filtered[0]);
  EXPECT_EQ(r.filtered[1].reason, RejectReason::kStale);
  EXPECT_EQ(r.filtered[1].index, 1u);
  EXPECT_TRUE(r.filtered[2]);
  EXPECT_EQ(r.filtered[3].reason, RejectReason::kReplay);
  ASSERT_TRUE(r.batch.has_value());
  EXPECT_TRUE(*r.batch);
  EXPECT_EQ(pc.count(), 2u);
  EXPECT_EQ(rx.replay_cache_size(), 2u);

  // Already-seen envelopes are now filtered as replays and nothing is verified.
  const auto again = rx.receive_batch(std::span(envs).first(1), kNow, net.rng);
  EXPECT_EQ(again.filtered[0].reason, RejectReason::kReplay);
  EXPECT_FALSE(again.batch.has_value());
}

TEST(Vehicle, BatchWithOneForgeryRejects) {
  Net net(19, 1, 6);
  auto& tx = *net.vehicles[0];
  auto& rx = *net.vehicles[1];
  ASSERT_EQ(acquire_ring(tx, *net.rsus[0], kNow, net.rng), std::nullopt);
  std::vector<BroadcastEnvelope> envs;
  for (int i = 0; i < 5; ++i) envs.push_back(tx.broadcast(as_bytes("m" + std::to_string(i)), kNow, net.rng));
  envs[3].t += 1;
  const auto r = rx.receive_batch(envs, kNow, net.rng);
  ASSERT_TRUE(r.batch.has_value());
  EXPECT_FALSE(*r.batch);
  EXPECT_EQ(rx.replay_cache_size(), 0u);
}

TEST(Lea, TracesEverySignerIndexInRingOf16) {
  Net net(20, 1, 24);
  Lea lea(net.sys.pp, net.sys.trace);
  for (std::size_t s = 0; s < 3; ++s) {
    auto& v = *net.vehicles[s];
    ASSERT_EQ(acquire_ring(v, *net.rsus[0], kNow, net.rng), std::nullopt);
    for (std::size_t trial = 0; trial < 16; ++trial) {
      const auto env = v.broadcast(as_bytes("trace me"), kNow, net.rng, 16);
      EXPECT_EQ(lea.trace(env, net.trc), net.vids[s]);
    }
  }
  // Exhaustive over k with a directly constructed ring.
  for (std::size_t k = 0; k < 16; ++k) {
    std::vector<G1> members;
    for (std::size_t i = 0, j = 1; i < 16; ++i) members.push_back(i == k ? net.creds[0].pid : net.creds[j++].pid);
    const auto env = sign_envelope(net.sys.pp, net.creds[0], SignerRing::create(members), k, as_bytes("k"), kNow,
                                   net.rng);
    EXPECT_EQ(lea.trace(env, net.trc), net.vids[0]) << "k=" << k;
  }
}

TEST(Lea, OutOfRegistryMemberIsTrcError) {
  Net net(22, 1, 4);
  auto& v = *net.vehicles[0];
  ASSERT_EQ(acquire_ring(v, *net.rsus[0], kNow, net.rng), std::nullopt);
  auto env = v.broadcast(as_bytes("m"), kNow, net.rng);
  std::vector<G1> members(env.ring.members().begin(), env.ring.members().end());
  members.push_back(hash_to_g1(as_bytes("VIN-ghost")));
  env.ring = SignerRing::create(members);
  Lea lea(net.sys.pp, net.sys.trace);
  try {
    lea.trace(env, net.trc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownIdentity);
  }
}

TEST(Lea, NoMatchForOutOfRingSigner) {
  Net net(23, 1, 6);
  auto& v = *net.vehicles[0];
  ASSERT_EQ(acquire_ring(v, *net.rsus[0], kNow, net.rng), std::nullopt);
  // Ring {0, 1}; tag built for vehicle 5, which is not a member.
  const SignerRing ring = SignerRing::create({net.creds[0].pid, net.creds[1].pid});
  auto env = sign_envelope(net.sys.pp, net.creds[0], ring, 0, as_bytes("m"), kNow, net.rng);
  env.tag = make_tag(net.sys.pp, net.vids[5], env.t);
  Lea lea(net.sys.pp, net.sys.trace);
  EXPECT_EQ(lea.trace(env, net.trc), std::nullopt);
}

// A malicious vehicle advertising an invalid key cannot reach honest rings:
// lists come only from the RSU and hold registered pseudonyms only.
TEST(Adversary, MaliciousKeyCannotPoisonRings) {
  Net net(24, 1, 8);
  const G1 bogus = G1::generator() * Scalar::random(net.rng);  // valid point, never registered
  Bytes bad_bytes(G1::kSize, 0);
  bad_bytes[0] = 0x80;
  bad_bytes.back() = 1;  // off-curve compressed encoding
  EXPECT_THROW(G1::from_bytes(bad_bytes), Error);

  for (auto& v : net.vehicles) ASSERT_EQ(acquire_ring(*v, *net.rsus[0], kNow, net.rng), std::nullopt);
  for (const auto& p : net.vehicles[0]->ring_list()->pids) {
    EXPECT_FALSE(p == bogus);
    EXPECT_TRUE(net.trc.registry().vid_of(p).has_value());
  }
  for (std::size_t i = 0; i < net.vehicles.size(); ++i) {
    const auto env = net.vehicles[i]->broadcast(as_bytes("honest"), kNow, net.rng, 4);
    for (std::size_t j = 0; j < net.vehicles.size(); ++j) {
      if (j == i) continue;
      EXPECT_TRUE(net.vehicles[j]->receive(env, kNow)) << i << "->" << j;
    }
  }
}

TEST(EndToEnd, RandomTopologies) {
  SeededRng topo(25, "topologies");
  for (int round = 0; round < 4; ++round) {
    const std::size_t n_rsu = 1 + topo.uniform(4);
    const std::size_t n_veh = 2 + topo.uniform(63);
    Net net(100 + static_cast<std::uint64_t>(round), n_rsu, n_veh);
    Lea lea(net.sys.pp, net.sys.trace);
    for (std::size_t i = 0; i < n_veh; ++i) {
      auto& v = *net.vehicles[i];
      ASSERT_EQ(acquire_ring(v, *net.rsus[topo.uniform(n_rsu)], kNow, net.rng), std::nullopt);
    }
    for (int b = 0; b < 6; ++b) {
      const std::size_t s = topo.uniform(n_veh);
      const std::size_t r = (s + 1 + topo.uniform(n_veh - 1)) % n_veh;
      auto& tx = *net.vehicles[s];
      const std::size_t max_n = std::min<std::size_t>(tx.ring_list()->pids.size(), 16);
      const auto env = tx.broadcast(as_bytes("e2e"), kNow, net.rng, 2 + topo.uniform(max_n - 1));
      const auto round_trip = wire::decode_envelope(wire::encode(env));
      EXPECT_TRUE(net.vehicles[r]->receive(round_trip, kNow + 1));
      EXPECT_EQ(lea.trace(round_trip, net.trc), net.vids[s]);
    }
  }
}

}  // namespace
}  // namespace ibrs
