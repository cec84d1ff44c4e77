#include "ibrs/wire.hpp"

#include <openssl/sha.h>

namespace ibrs::wire {

namespace {

std::string to_string(ByteView v) { return std::string(v.begin(), v.end()); }

void write_g1_list(ByteWriter& w, std::span<const G1> pts) {
  w.u16(static_cast<std::uint16_t>(pts.size()));
  for (const auto& p : pts) w.raw(p.to_bytes());
}

std::vector<G1> read_g1_list(ByteReader& r) {
  const std::uint16_t n = r.u16();
  std::vector<G1> out;
  out.reserve(n);
  for (std::uint16_t i = 0; i < n; ++i) out.push_back(G1::from_bytes(r.raw(G1::kSize)));
  return out;
}

bool known_type(std::uint8_t t) { return t >= 1 && t <= 8; }

}  // namespace

Bytes encode_frame(FrameType type, ByteView payload) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(type)).lp(payload);
  return w.take();
}

Frame decode_frame(ByteView bytes) {
  ByteReader r(bytes);
  const std::uint8_t t = r.u8();
  if (!known_type(t)) throw Error(ErrorCode::kBadEncoding, "unknown frame type " + std::to_string(t));
  const ByteView payload = r.lp();
  r.expect_done();
  return Frame{static_cast<FrameType>(t), Bytes(payload.begin(), payload.end())};
}

Bytes expect_frame(ByteView bytes, FrameType type) {
  Frame f = decode_frame(bytes);
  if (f.type != type) throw Error(ErrorCode::kBadEncoding, "unexpected frame type");
  return std::move(f.payload);
}

// ---- encoders ----------------------------------------------------------------

Bytes encode(const RidBroadcast& m) {
  ByteWriter w;
  w.lp(as_bytes(m.rsu_id)).raw(m.rid.to_bytes());
  return encode_frame(FrameType::kRidBroadcast, w.bytes());
}

Bytes encode(const RingRequest& m) {
  ByteWriter w;
  w.raw(m.ciphertext.u.to_bytes()).lp(m.ciphertext.v);
  return encode_frame(FrameType::kRingRequest, w.bytes());
}

Bytes encode(const SealedRingList& m) { return encode_frame(FrameType::kSealedList, m.to_bytes()); }

Bytes signature_bytes(const RingSignature& sig) {
  ByteWriter w;
  write_g1_list(w, sig.u);
  w.raw(sig.v.to_bytes());
  return w.take();
}

Bytes envelope_payload(const BroadcastEnvelope& env) {
  ByteWriter w;
  w.lp(env.message).raw(signature_bytes(env.sigma));
  write_g1_list(w, env.ring.members());
  w.u64(env.t).raw(env.tag.value.to_bytes());
  return w.take();
}

Bytes encode(const BroadcastEnvelope& m) { return encode_frame(FrameType::kEnvelope, envelope_payload(m)); }

Bytes encode(const TraceRequest& m) {
  ByteWriter w;
  w.u64(m.t);
  write_g1_list(w, m.ring);
  return encode_frame(FrameType::kTraceRequest, w.bytes());
}

Bytes encode(const TraceResponse& m) {
  ByteWriter w;
  w.u16(static_cast<std::uint16_t>(m.candidates.size()));
  for (const auto& c : m.candidates) w.raw(c.to_bytes());
  return encode_frame(FrameType::kTraceResponse, w.bytes());
}

Bytes encode(const ResolveRequest& m) { return encode_frame(FrameType::kResolveRequest, m.pid.to_bytes()); }

Bytes encode(const ResolveResponse& m) {
  ByteWriter w;
  w.u8(m.vid ? 1 : 0);
  if (m.vid) w.lp(as_bytes(*m.vid));
  return encode_frame(FrameType::kResolveResponse, w.bytes());
}

// ---- decoders ----------------------------------------------------------------

RidBroadcast decode_rid_broadcast(ByteView frame) {
  const Bytes payload = expect_frame(frame, FrameType::kRidBroadcast);
  ByteReader r(payload);
  RidBroadcast m;
  m.rsu_id = to_string(r.lp());
  m.rid = G2::from_bytes(r.raw(G2::kSize));
  r.expect_done();
  return m;
}

RingRequest decode_ring_request(ByteView frame) {
  const Bytes payload = expect_frame(frame, FrameType::kRingRequest);
  ByteReader r(payload);
  RingRequest m;
  m.ciphertext.u = G1::from_bytes(r.raw(G1::kSize));
  const ByteView v = r.lp();
  m.ciphertext.v.assign(v.begin(), v.end());
  r.expect_done();
  return m;
}

SealedRingList decode_sealed_list(ByteView frame) {
  return SealedRingList::from_bytes(expect_frame(frame, FrameType::kSealedList));
}

BroadcastEnvelope decode_envelope(ByteView frame) {
  const Bytes payload = expect_frame(frame, FrameType::kEnvelope);
  ByteReader r(payload);
  const ByteView m = r.lp();
  RingSignature sig;
  sig.u = read_g1_list(r);
  sig.v = G1::from_bytes(r.raw(G1::kSize));
  SignerRing ring = SignerRing::create(read_g1_list(r));
  const Timestamp t = r.u64();
  TraceTag tag{Gt::from_bytes(r.raw(Gt::kSize))};
  r.expect_done();
  return BroadcastEnvelope{Bytes(m.begin(), m.end()), std::move(sig), std::move(ring), t, std::move(tag)};
}

TraceRequest decode_trace_request(ByteView frame) {
  const Bytes payload = expect_frame(frame, FrameType::kTraceRequest);
  ByteReader r(payload);
  TraceRequest m;
  m.t = r.u64();
  m.ring = read_g1_list(r);
  r.expect_done();
  return m;
}

TraceResponse decode_trace_response(ByteView frame) {
  const Bytes payload = expect_frame(frame, FrameType::kTraceResponse);
  ByteReader r(payload);
  TraceResponse m;
  const std::uint16_t n = r.u16();
  for (std::uint16_t i = 0; i < n; ++i) m.candidates.push_back(Gt::from_bytes(r.raw(Gt::kSize)));
  r.expect_done();
  return m;
}

ResolveRequest decode_resolve_request(ByteView frame) {
  const Bytes payload = expect_frame(frame, FrameType::kResolveRequest);
  return ResolveRequest{G1::from_bytes(payload)};
}

ResolveResponse decode_resolve_response(ByteView frame) {
  const Bytes payload = expect_frame(frame, FrameType::kResolveResponse);
  ByteReader r(payload);
  ResolveResponse m;
  if (r.u8() != 0) m.vid = to_string(r.lp());
  r.expect_done();
  return m;
}

std::array<std::uint8_t, 32> envelope_digest(const BroadcastEnvelope& env) {
  const Bytes payload = envelope_payload(env);
  std::array<std::uint8_t, 32> out{};
  SHA256(payload.data(), payload.size(), out.data());
  return out;
}

}  // namespace ibrs::wire
