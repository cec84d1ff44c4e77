#include <gtest/gtest.h>

#include "ibrs/scheme.hpp"
#include "test_support.hpp"

namespace ibrs {
namespace {

using test::World;

class SchemeTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { world_ = new World(7, 24); }
  static void TearDownTestSuite() {
    delete world_;
    world_ = nullptr;
  }
  static const World& w() { return *world_; }
  static const PublicParams& pp() { return world_->pp(); }

  static World* world_;
};

World* SchemeTest::world_ = nullptr;

// ---- setup and keys ----

TEST(Setup, ParamsConsistentAndReproducible) {
  SeededRng a(11), b(11), c(12);
  const auto s1 = setup(a);
  const auto s2 = setup(b);
  const auto s3 = setup(c);
  EXPECT_TRUE(s1.pp.consistent());
  EXPECT_EQ(pair(s1.pp.pk1, s1.pp.q), pair(s1.pp.p, s1.pp.pk2));
  EXPECT_EQ(s1.pp.to_bytes(), s2.pp.to_bytes());
  EXPECT_NE(s1.pp.pk1, s3.pp.pk1);
  EXPECT_EQ(s1.pp.pk_trac, s1.pp.q * s1.trace.s_trac);
  EXPECT_EQ(PublicParams::from_bytes(s1.pp.to_bytes()).to_bytes(), s1.pp.to_bytes());
}

TEST(Setup, SizeOnlyProfileRejected) {
  SeededRng rng(1);
  try {
    setup(rng, find_profile("mnt159"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProfileNotOperational);
  }
}

TEST_F(SchemeTest, VehicleKeygen) {
  const auto c = keygen_vehicle(w().sys.master, "WVW-001");
  EXPECT_TRUE(credential_consistent(pp(), c));
  EXPECT_EQ(pair(c.psk, pp().q), pair(c.pid, pp().pk2));
  const auto again = keygen_vehicle(w().sys.master, "WVW-001");
  EXPECT_EQ(again.pid, c.pid);
  EXPECT_EQ(again.psk, c.psk);
  EXPECT_EQ(c.pid, hash_to_g1(as_bytes("WVW-001")));
  EXPECT_THROW(keygen_vehicle(w().sys.master, ""), Error);
}

TEST_F(SchemeTest, RsuKeygen) {
  const auto c = keygen_rsu(w().sys.master, "rsu-north");
  EXPECT_TRUE(credential_consistent(pp(), c));
  EXPECT_EQ(pair(pp().p, c.rsk), pair(pp().pk1, c.rid));
  EXPECT_EQ(keygen_rsu(w().sys.master, "rsu-north").rsk, c.rsk);
  EXPECT_EQ(c.rid, hash_to_g2(as_bytes("rsu-north")));
}

TEST_F(SchemeTest, InconsistentCredentialDetected) {
  auto c = keygen_vehicle(w().sys.master, "WVW-002");
  c.psk = c.psk + pp().p;
  EXPECT_FALSE(credential_consistent(pp(), c));
}

// ---- IBE and shared keys ----

TEST_F(SchemeTest, IbeRoundtripAndRandomized) {
  SeededRng rng(20);
  const auto rsu = keygen_rsu(w().sys.master, "rsu-1");
  for (const auto& v : w().vehicles) {
    const auto ct = ibe_encrypt(pp(), rsu.rid, v.pid, rng);
    EXPECT_EQ(ct.v.size(), pp().profile.g1_len);
    EXPECT_EQ(ibe_decrypt(pp(), rsu.rsk, ct), v.pid);
  }
  const auto c1 = ibe_encrypt(pp(), rsu.rid, w().vehicles[0].pid, rng);
  const auto c2 = ibe_encrypt(pp(), rsu.rid, w().vehicles[0].pid, rng);
  EXPECT_NE(c1.u, c2.u);
  EXPECT_NE(c1.v, c2.v);
}

TEST_F(SchemeTest, IbeWrongKeyFailsToDecode) {
  SeededRng rng(21);
  const auto right = keygen_rsu(w().sys.master, "rsu-right");
  const auto wrong = keygen_rsu(w().sys.master, "rsu-wrong");
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto ct = ibe_encrypt(pp(), right.rid, w().vehicles[static_cast<std::size_t>(i) % 24].pid, rng);
    try {
      (void)ibe_decrypt(pp(), wrong.rsk, ct);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDecryptionFailed);
      ++failures;
    }
  }
  EXPECT_EQ(failures, 1000);
}

TEST_F(SchemeTest, IbeTamperedNeverYieldsOriginal) {
  SeededRng rng(22);
  const auto rsu = keygen_rsu(w().sys.master, "rsu-1");
  const G1& pid = w().vehicles[3].pid;
  for (int i = 0; i < 200; ++i) {
    auto ct = ibe_encrypt(pp(), rsu.rid, pid, rng);
    Bytes u = ct.u.to_bytes();
    test::flip_bit(u, rng.uniform(u.size() * 8));
    try {
      ct.u = G1::from_bytes(u);
    } catch (const Error&) {
      continue;  // rejected at decode
    }
    try {
      EXPECT_NE(ibe_decrypt(pp(), rsu.rsk, ct), pid);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDecryptionFailed);
    }
  }
}

TEST_F(SchemeTest, SharedKeysAgree) {
  const auto r1 = keygen_rsu(w().sys.master, "rsu-a");
  const auto r2 = keygen_rsu(w().sys.master, "rsu-b");
  const auto& v = w().vehicles[0];
  const auto k_rsu = derive_shared_key_rsu(r1.rsk, v.pid);
  const auto k_veh = derive_shared_key_vehicle(v.psk, r1.rid);
  EXPECT_TRUE(k_rsu == k_veh);
  EXPECT_FALSE(k_rsu == derive_shared_key_rsu(r2.rsk, v.pid));
  // oracle: e(PID, RID)^s using the master secret directly
  EXPECT_TRUE(k_rsu == derive_symmetric_key(pair(v.pid, r1.rid).pow(w().sys.master.s)));
}

// ---- tags and signatures ----

TEST_F(SchemeTest, TagDeterministicAndTimeBound) {
  const auto& v = w().vehicles[1];
  EXPECT_EQ(make_tag(pp(), v.vid, 100), make_tag(pp(), v.vid, 100));
  EXPECT_NE(make_tag(pp(), v.vid, 100), make_tag(pp(), v.vid, 101));
  const Gt oracle = pair(hash_to_g1(detail::trace_preimage(v.vid, 100)), pp().q).pow(w().sys.trace.s_trac);
  EXPECT_EQ(make_tag(pp(), v.vid, 100).value, oracle);
}

TEST_F(SchemeTest, RingConstruction) {
  const auto& v = w().vehicles;
  EXPECT_THROW(SignerRing::create({v[0].pid}), Error);
  try {
    SignerRing::create({v[0].pid, v[1].pid, v[0].pid});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateRingMember);
  }
  EXPECT_THROW(SignerRing::create({v[0].pid, G1::identity()}), Error);
  const auto ring = SignerRing::create({v[2].pid, v[0].pid});
  EXPECT_EQ(ring.index_of(v[0].pid), 1u);
  EXPECT_FALSE(ring.index_of(v[5].pid).has_value());
  EXPECT_EQ(ring.to_bytes().size(), 2 * G1::kSize);
}

TEST_F(SchemeTest, SignVerifyAllRingSizes) {
  SeededRng rng(30);
  for (std::size_t n = 2; n <= 10; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto env = w().honest_envelope(static_cast<std::size_t>(rng.uniform(24)), n, rng);
      ASSERT_TRUE(verify_single(pp(), env)) << "n'=" << n;
    }
  }
}

TEST_F(SchemeTest, SignerMustSitAtIndex) {
  SeededRng rng(31);
  const auto& v = w().vehicles;
  const auto ring = SignerRing::create({v[0].pid, v[1].pid, v[2].pid});
  const auto tag = make_tag(pp(), v[0].vid, 5);
  try {
    ring_sign(pp(), v[0], ring, 1, as_bytes("m"), 5, tag, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSignerNotInRing);
  }
  EXPECT_THROW(ring_sign(pp(), v[0], ring, 3, as_bytes("m"), 5, tag, rng), Error);
}

TEST_F(SchemeTest, MismatchedSecretKeyRejected) {
  SeededRng rng(32);
  const auto& v = w().vehicles;
  auto impostor = v[0];
  impostor.psk = v[1].psk;  // right pseudonym, someone else's key
  const auto ring = SignerRing::create({v[0].pid, v[2].pid});
  const auto tag = make_tag(pp(), impostor.vid, 9);
  const auto sig = ring_sign(pp(), impostor, ring, 0, as_bytes("hello"), 9, tag, rng);
  const BroadcastEnvelope env{Bytes{'h', 'e', 'l', 'l', 'o'}, sig, ring, 9, tag};
  const auto verdict = verify_single(pp(), env);
  EXPECT_FALSE(verdict);
  EXPECT_EQ(verdict.reason, RejectReason::kEquation);
}

// sum_i (U_i + h_i PID_i) == (h_k + r') PID_k, checked without pairings.
TEST_F(SchemeTest, SignatureAlgebraWhiteBox) {
  SeededRng rng(33);
  for (std::size_t n = 2; n <= 8; ++n) {
    const std::size_t k = static_cast<std::size_t>(rng.uniform(n));
    const auto ring = w().ring_with_signer(4, n, k, rng);
    const auto tag = make_tag(pp(), w().vehicles[4].vid, 77);
    const Bytes m{1, 2, 3};
    Scalar nonce;
    const auto sig = detail::ring_sign(pp(), w().vehicles[4], ring, k, m, 77, tag, rng, &nonce);
    G1 sum;
    for (std::size_t i = 0; i < n; ++i) sum += sig.u[i] + ring[i] * ring_hash(m, tag, 77, ring, sig.u[i]);
    const Scalar h_k = ring_hash(m, tag, 77, ring, sig.u[k]);
    EXPECT_EQ(sum, ring[k] * (h_k + nonce));
    EXPECT_EQ(sig.v, w().vehicles[4].psk * (h_k + nonce));
  }
}

TEST_F(SchemeTest, MessageBitFlipRejected) {
  SeededRng rng(34);
  auto env = w().honest_envelope(2, 3, rng);
  ASSERT_TRUE(verify_single(pp(), env));
  test::flip_bit(env.message, rng.uniform(env.message.size() * 8));
  EXPECT_EQ(verify_single(pp(), env).reason, RejectReason::kEquation);
}

TEST_F(SchemeTest, RandomUReplacementNeverAccepted) {
  SeededRng rng(35);
  const auto base = w().honest_envelope(5, 4, rng);
  int accepts = 0;
  for (int i = 0; i < 1000; ++i) {
    auto env = base;
    env.sigma.u[rng.uniform(env.sigma.u.size())] = G1::random(rng);
    accepts += verify_single(pp(), env).accepted ? 1 : 0;
  }
  EXPECT_EQ(accepts, 0);
}

TEST_F(SchemeTest, StructuralRejectsAreDistinct) {
  SeededRng rng(36);
  auto env = w().honest_envelope(1, 3, rng);
  env.sigma.u.pop_back();
  EXPECT_EQ(verify_single(pp(), env).reason, RejectReason::kStructure);
  auto env2 = w().honest_envelope(1, 3, rng);
  env2.sigma.v = G1::identity();
  EXPECT_EQ(verify_single(pp(), env2).reason, RejectReason::kStructure);
}

TEST_F(SchemeTest, EverySignerIndexGivesSameShape) {
  SeededRng rng(37);
  const std::size_t n = 6;
  std::vector<G1> members;
  for (std::size_t i = 0; i < n; ++i) members.push_back(w().vehicles[i].pid);
  const auto ring = SignerRing::create(members);
  const Bytes m{'x'};
  for (std::size_t k = 0; k < n; ++k) {
    const auto env = sign_envelope(pp(), w().vehicles[k], ring, k, m, 1000, rng);
    EXPECT_TRUE(verify_single(pp(), env));
    EXPECT_EQ(env.sigma.u.size(), n);
    EXPECT_EQ(env.ring, ring);
    EXPECT_EQ(env.message, m);
  }
}

// ---- batch verification ----

TEST_F(SchemeTest, BatchAcceptsHonest) {
  SeededRng rng(40);
  std::vector<BroadcastEnvelope> envs;
  for (int i = 0; i < 50; ++i) envs.push_back(w().honest_envelope(static_cast<std::size_t>(i) % 24, 2, rng));
  EXPECT_TRUE(verify_batch(pp(), envs, rng));
  EXPECT_TRUE(verify_batch(pp(), envs, rng, {.lambda = 64, .unit_weights = true}));
}

TEST_F(SchemeTest, BatchOfOneMatchesSingle) {
  SeededRng rng(41);
  auto good = w().honest_envelope(0, 2, rng);
  auto bad = good;
  bad.t += 1;
  EXPECT_EQ(verify_batch(pp(), std::span(&good, 1), rng).accepted, verify_single(pp(), good).accepted);
  EXPECT_EQ(verify_batch(pp(), std::span(&bad, 1), rng).accepted, verify_single(pp(), bad).accepted);
}

TEST_F(SchemeTest, BatchRejectsOneCorrupted) {
  SeededRng rng(42);
  std::vector<BroadcastEnvelope> envs;
  for (int i = 0; i < 50; ++i) envs.push_back(w().honest_envelope(static_cast<std::size_t>(i) % 24, 2, rng));
  for (int trial = 0; trial < 50; ++trial) {
    auto batch = envs;
    auto& victim = batch[rng.uniform(batch.size())];
    victim.sigma.v = victim.sigma.v + pp().p;
    ASSERT_FALSE(verify_batch(pp(), batch, rng));
  }
}

// Two offsetting errors cancel in the plain sum but not under random multipliers.
TEST_F(SchemeTest, SmallExponentsDefeatCancellation) {
  SeededRng rng(43);
  std::vector<BroadcastEnvelope> envs{w().honest_envelope(0, 2, rng), w().honest_envelope(1, 2, rng)};
  const G1 x = G1::random(rng);
  envs[0].sigma.v = envs[0].sigma.v + x;
  envs[1].sigma.v = envs[1].sigma.v - x;
  EXPECT_FALSE(verify_single(pp(), envs[0]));
  EXPECT_TRUE(verify_batch(pp(), envs, rng, {.lambda = 64, .unit_weights = true}));
  EXPECT_FALSE(verify_batch(pp(), envs, rng));
}

TEST_F(SchemeTest, BatchStructuralErrorNamesIndex) {
  SeededRng rng(44);
  std::vector<BroadcastEnvelope> envs{w().honest_envelope(0, 2, rng), w().honest_envelope(1, 3, rng)};
  envs[1].sigma.u.pop_back();
  const auto v = verify_batch(pp(), envs, rng);
  EXPECT_EQ(v.reason, RejectReason::kStructure);
  EXPECT_EQ(v.index, 1u);
  EXPECT_EQ(verify_batch(pp(), std::span<const BroadcastEnvelope>(), rng).reason, RejectReason::kEmptyBatch);
  EXPECT_THROW(verify_batch(pp(), envs, rng, {.lambda = 0}), Error);
}

TEST_F(SchemeTest, PairingCountIndependentOfSize) {
  SeededRng rng(45);
  for (std::size_t n : {2u, 7u, 16u}) {
    const auto env = w().honest_envelope(3, n, rng);
    PairingCounter c;
    ASSERT_TRUE(verify_single(pp(), env));
    EXPECT_EQ(c.count(), 2u);
  }
  std::vector<BroadcastEnvelope> envs;
  for (int eta : {1, 5, 20}) {
    while (envs.size() < static_cast<std::size_t>(eta)) envs.push_back(w().honest_envelope(envs.size() % 24, 3, rng));
    PairingCounter c;
    ASSERT_TRUE(verify_batch(pp(), envs, rng));
    EXPECT_EQ(c.count(), 2u) << "eta=" << eta;
  }
}

// ---- tracing ----

TEST_F(SchemeTest, TraceOpenCancelsExponent) {
  const auto& v = w().vehicles[6];
  const auto tag = make_tag(pp(), v.vid, 1234);
  const Gt opened = trace_open(w().sys.trace, tag);
  EXPECT_EQ(opened, pair(hash_to_g1(detail::trace_preimage(v.vid, 1234)), pp().q));
  EXPECT_EQ(opened.pow(w().sys.trace.s_trac), tag.value);
  EXPECT_NE(trace_open(w().sys.trace, make_tag(pp(), v.vid, 1235)), opened);
  EXPECT_NE(trace_open(w().sys.trace, make_tag(pp(), w().vehicles[7].vid, 1234)), opened);
}

TEST_F(SchemeTest, TraceFindsEverySigner) {
  SeededRng rng(46);
  std::vector<G1> members;
  for (std::size_t i = 0; i < 8; ++i) members.push_back(w().vehicles[i].pid);
  const auto ring = SignerRing::create(members);
  for (std::size_t k = 0; k < 8; ++k) {
    const auto tag = make_tag(pp(), w().vehicles[k].vid, 500);
    const auto vid = trace_match(pp(), w().registry, ring, 500, trace_open(w().sys.trace, tag));
    ASSERT_TRUE(vid.has_value());
    EXPECT_EQ(*vid, w().vehicles[k].vid);
  }
}

TEST_F(SchemeTest, TraceOutsiderTagMatchesNothing) {
  const auto ring = SignerRing::create({w().vehicles[0].pid, w().vehicles[1].pid});
  const auto outsider = make_tag(pp(), w().vehicles[9].vid, 600);
  EXPECT_FALSE(trace_match(pp(), w().registry, ring, 600, trace_open(w().sys.trace, outsider)).has_value());
  // right signer, wrong timestamp
  const auto shifted = make_tag(pp(), w().vehicles[0].vid, 601);
  EXPECT_FALSE(trace_match(pp(), w().registry, ring, 600, trace_open(w().sys.trace, shifted)).has_value());
}

TEST_F(SchemeTest, TraceAcrossTimestamps) {
  const auto ring = SignerRing::create({w().vehicles[2].pid, w().vehicles[3].pid});
  const auto t1 = make_tag(pp(), w().vehicles[3].vid, 10);
  const auto t2 = make_tag(pp(), w().vehicles[3].vid, 20);
  EXPECT_NE(t1, t2);
  EXPECT_EQ(trace_match(pp(), w().registry, ring, 10, trace_open(w().sys.trace, t1)), w().vehicles[3].vid);
  EXPECT_EQ(trace_match(pp(), w().registry, ring, 20, trace_open(w().sys.trace, t2)), w().vehicles[3].vid);
}

TEST_F(SchemeTest, TraceUnknownMemberAndDuplicateMatch) {
  const auto stranger = keygen_vehicle(w().sys.master, "not-registered");
  const auto ring = SignerRing::create({w().vehicles[0].pid, stranger.pid});
  try {
    trace_candidates(pp(), w().registry, ring, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownIdentity);
  }
  const Gt g = pair(G1::generator(), G2::generator());
  const std::vector<Gt> twice{g, g};
  EXPECT_THROW(match_candidate(twice, g), Error);
}

// Known limitation of the scheme: a pseudonym is never checked to be a hash
// output, so anyone can pick PID = x*P, compute x*PK1 as its key and sign.
// Such an envelope verifies but the TRC cannot resolve the member, so it is
// untraceable. Ring lists from RSUs only ever carry registered pseudonyms.
TEST_F(SchemeTest, SelfMadePseudonymVerifiesButIsUntraceable) {
  SeededRng rng(99);
  const Scalar x = Scalar::random(rng);
  const VehicleCredential rogue{"rogue", pp().p * x, pp().pk1 * x};
  EXPECT_TRUE(credential_consistent(pp(), rogue));
  EXPECT_FALSE(w().registry.vid_of(rogue.pid).has_value());

  const auto ring = SignerRing::create({rogue.pid, w().vehicles[0].pid});
  const auto env = sign_envelope(pp(), rogue, ring, 0, as_bytes("m"), 1, rng);
  EXPECT_TRUE(verify_single(pp(), env));
  EXPECT_THROW(trace_match(pp(), w().registry, ring, env.t, trace_open(w().sys.trace, env.tag)), Error);
}

TEST(Registry, Bijective) {
  IdentityRegistry reg;
  const G1 a = hash_to_g1(as_bytes("a"));
  reg.add("a", a);
  EXPECT_THROW(reg.add("a", hash_to_g1(as_bytes("b"))), Error);
  EXPECT_THROW(reg.add("c", a), Error);
  EXPECT_EQ(reg.vid_of(a), "a");
  EXPECT_EQ(reg.pid_of("a"), a);
  EXPECT_FALSE(reg.pid_of("zzz").has_value());
}

}  // namespace
}  // namespace ibrs
