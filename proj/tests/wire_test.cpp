#include <gtest/gtest.h>

#include "ibrs/wire.hpp"
#include "test_support.hpp"

namespace ibrs {
namespace {

class WireTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { world_ = new test::World(5, 20); }
  static void TearDownTestSuite() { delete world_; }
  static test::World* world_;
};

test::World* WireTest::world_ = nullptr;

TEST_F(WireTest, EnvelopeRoundtripAndSizeModel) {
  SeededRng rng(1);
  const wire::SizeModel model{default_profile()};
  for (std::size_t n = 2; n <= 16; n += 2) {
    const auto env = world_->honest_envelope(n % 20, n, rng);
    const Bytes frame = wire::encode(env);
    ASSERT_EQ(frame.size(), model.envelope_frame(env.message.size(), n));
    const auto back = wire::decode_envelope(frame);
    EXPECT_EQ(back.message, env.message);
    EXPECT_EQ(back.sigma, env.sigma);
    EXPECT_EQ(back.ring, env.ring);
    EXPECT_EQ(back.t, env.t);
    EXPECT_EQ(back.tag, env.tag);
    EXPECT_EQ(wire::encode(back), frame);
    EXPECT_TRUE(verify_single(world_->pp(), back));
    EXPECT_EQ(wire::signature_bytes(env.sigma).size(), model.signature(n));
  }
}

TEST_F(WireTest, EnvelopeLayoutOffsets) {
  SeededRng rng(2);
  const auto env = world_->honest_envelope(0, 2, rng);
  const Bytes f = wire::encode(env);
  const std::size_t m = env.message.size();
  EXPECT_EQ(f[0], 4);  // envelope frame
  ByteReader r(f);
  r.u8();
  EXPECT_EQ(r.u32(), f.size() - wire::kFrameHeaderSize);
  EXPECT_EQ(r.u32(), m);
  r.raw(m);
  EXPECT_EQ(r.u16(), 2);  // |U|
  EXPECT_EQ(Bytes(f.begin() + 5 + 4 + static_cast<std::ptrdiff_t>(m) + 2, f.begin() + 5 + 4 + static_cast<std::ptrdiff_t>(m) + 2 + 48),
            env.sigma.u[0].to_bytes());
  r.raw(3 * 48);
  EXPECT_EQ(r.u16(), 2);  // ring
  r.raw(2 * 48);
  EXPECT_EQ(r.u64(), env.t);
  const ByteView tag = r.raw(576);
  EXPECT_EQ(Bytes(tag.begin(), tag.end()), env.tag.value.to_bytes());
  EXPECT_TRUE(r.done());
}

TEST(SizeModel, ThreeGroupElementsForTwoMemberRing) {
  const wire::SizeModel ours{default_profile()};
  EXPECT_EQ(ours.signature_elements(2), 3 * ours.pseudonym());
  const wire::SizeModel reference{find_profile("mnt159")};
  EXPECT_EQ(reference.pseudonym(), 30u);
  EXPECT_EQ(reference.signature_elements(2), 90u);
}

TEST_F(WireTest, ControlFramesRoundtrip) {
  SeededRng rng(3);
  const auto rsu = keygen_rsu(world_->sys.master, "rsu-7");
  const auto rid = wire::decode_rid_broadcast(wire::encode(wire::RidBroadcast{"rsu-7", rsu.rid}));
  EXPECT_EQ(rid.rsu_id, "rsu-7");
  EXPECT_EQ(rid.rid, rsu.rid);

  const auto ct = ibe_encrypt(world_->pp(), rsu.rid, world_->vehicles[0].pid, rng);
  const auto req = wire::decode_ring_request(wire::encode(wire::RingRequest{ct}));
  EXPECT_EQ(ibe_decrypt(world_->pp(), rsu.rsk, req.ciphertext), world_->vehicles[0].pid);

  const auto key = derive_shared_key_rsu(rsu.rsk, world_->vehicles[0].pid);
  const auto sealed = seal_ring_list(key, {world_->vehicles[1].pid}, 99, rng);
  EXPECT_EQ(wire::decode_sealed_list(wire::encode(sealed)).to_bytes(), sealed.to_bytes());

  const wire::TraceRequest tr{{world_->vehicles[0].pid, world_->vehicles[1].pid}, 42};
  const auto tr2 = wire::decode_trace_request(wire::encode(tr));
  EXPECT_EQ(tr2.ring, tr.ring);
  EXPECT_EQ(tr2.t, 42u);

  const wire::TraceResponse resp{{pair(G1::generator(), G2::generator()), Gt::one()}};
  EXPECT_EQ(wire::decode_trace_response(wire::encode(resp)).candidates, resp.candidates);

  EXPECT_EQ(wire::decode_resolve_request(wire::encode(wire::ResolveRequest{world_->vehicles[2].pid})).pid,
            world_->vehicles[2].pid);
  EXPECT_EQ(wire::decode_resolve_response(wire::encode(wire::ResolveResponse{"VIN"})).vid, "VIN");
  EXPECT_FALSE(wire::decode_resolve_response(wire::encode(wire::ResolveResponse{})).vid.has_value());
}

TEST_F(WireTest, MalformedFramesRejected) {
  SeededRng rng(4);
  const auto env = world_->honest_envelope(1, 3, rng);
  Bytes f = wire::encode(env);
  Bytes unknown = f;
  unknown[0] = 0x42;
  EXPECT_THROW(wire::decode_frame(unknown), Error);
  EXPECT_THROW(wire::decode_rid_broadcast(f), Error);  // wrong type
  Bytes truncated(f.begin(), f.end() - 1);
  EXPECT_THROW(wire::decode_envelope(truncated), Error);
  Bytes trailing = f;
  trailing.push_back(0);
  EXPECT_THROW(wire::decode_envelope(trailing), Error);
}

TEST_F(WireTest, DuplicateRingMemberRejectedAtDecode) {
  SeededRng rng(5);
  const auto env = world_->honest_envelope(1, 2, rng);
  Bytes payload = wire::envelope_payload(env);
  // overwrite ring[1] with ring[0]
  const std::size_t ring_at = 4 + env.message.size() + 2 + 3 * 48 + 2;
  std::copy(payload.begin() + static_cast<std::ptrdiff_t>(ring_at),
            payload.begin() + static_cast<std::ptrdiff_t>(ring_at + 48),
            payload.begin() + static_cast<std::ptrdiff_t>(ring_at + 48));
  try {
    wire::decode_envelope(wire::encode_frame(wire::FrameType::kEnvelope, payload));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateRingMember);
  }
}

TEST_F(WireTest, CountMismatchSurvivesDecodeAndFailsVerify) {
  SeededRng rng(6);
  auto env = world_->honest_envelope(1, 3, rng);
  env.sigma.u.pop_back();
  const auto back = wire::decode_envelope(wire::encode(env));
  EXPECT_EQ(verify_single(world_->pp(), back).reason, RejectReason::kStructure);
}

TEST_F(WireTest, DigestTracksCanonicalBytes) {
  SeededRng rng(7);
  auto env = world_->honest_envelope(1, 2, rng);
  const auto d = wire::envelope_digest(env);
  EXPECT_EQ(wire::envelope_digest(wire::decode_envelope(wire::encode(env))), d);
  env.t += 1;
  EXPECT_NE(wire::envelope_digest(env), d);
}

}  // namespace
}  // namespace ibrs
