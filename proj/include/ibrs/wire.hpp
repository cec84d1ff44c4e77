#pragma once

// Type-tagged, length-prefixed message frames exchanged between entities.
// Byte layouts are documented in docs/wire-format.md.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ibrs/bytes.hpp"
#include "ibrs/channel.hpp"
#include "ibrs/pairing.hpp"
#include "ibrs/scheme.hpp"

namespace ibrs::wire {

enum class FrameType : std::uint8_t {
  kRidBroadcast = 1,
  kRingRequest = 2,
  kSealedList = 3,
  kEnvelope = 4,
  kTraceRequest = 5,
  kTraceResponse = 6,
  kResolveRequest = 7,
  kResolveResponse = 8,
};

inline constexpr std::size_t kFrameHeaderSize = 5;  // type u8 + length u32

struct Frame {
  FrameType type;
  Bytes payload;
};

Bytes encode_frame(FrameType type, ByteView payload);
/// Rejects unknown types, truncation and trailing bytes.
Frame decode_frame(ByteView bytes);
/// Decodes and checks the type tag.
Bytes expect_frame(ByteView bytes, FrameType type);

struct RidBroadcast {
  std::string rsu_id;
  G2 rid;
};

struct RingRequest {
  IbeCiphertext ciphertext;
};

struct TraceRequest {
  std::vector<G1> ring;  // L_s verbatim
  Timestamp t = 0;
};

struct TraceResponse {
  std::vector<Gt> candidates;
};

struct ResolveRequest {
  G1 pid;
};

struct ResolveResponse {
  std::optional<std::string> vid;
};

Bytes encode(const RidBroadcast& m);
Bytes encode(const RingRequest& m);
Bytes encode(const SealedRingList& m);
Bytes encode(const BroadcastEnvelope& m);
Bytes encode(const TraceRequest& m);
Bytes encode(const TraceResponse& m);
Bytes encode(const ResolveRequest& m);
Bytes encode(const ResolveResponse& m);

RidBroadcast decode_rid_broadcast(ByteView frame);
RingRequest decode_ring_request(ByteView frame);
SealedRingList decode_sealed_list(ByteView frame);
/// Element validation failures surface as the pairing-core error codes; a
/// U/ring count mismatch is left for the verifier to report.
BroadcastEnvelope decode_envelope(ByteView frame);
TraceRequest decode_trace_request(ByteView frame);
TraceResponse decode_trace_response(ByteView frame);
ResolveRequest decode_resolve_request(ByteView frame);
ResolveResponse decode_resolve_response(ByteView frame);

/// Envelope payload without the frame header.
Bytes envelope_payload(const BroadcastEnvelope& env);
/// u16 count, U_1..U_n, V.
Bytes signature_bytes(const RingSignature& sig);

/// SHA-256 of the canonical envelope payload (replay-cache key).
std::array<std::uint8_t, 32> envelope_digest(const BroadcastEnvelope& env);

/// Size model for any curve profile, matching the encoders byte for byte.
struct SizeModel {
  const CurveProfile& profile;

  std::size_t pseudonym() const noexcept { return profile.g1_len; }
  /// Group elements only: (n'+1) compressed G1.
  std::size_t signature_elements(std::size_t ring_size) const noexcept { return (ring_size + 1) * profile.g1_len; }
  std::size_t signature(std::size_t ring_size) const noexcept { return 2 + signature_elements(ring_size); }
  std::size_t ring(std::size_t ring_size) const noexcept { return 2 + ring_size * profile.g1_len; }
  /// lp(m) + signature + ring + t + tag
  std::size_t envelope_payload(std::size_t msg_len, std::size_t ring_size) const noexcept {
    return 4 + msg_len + signature(ring_size) + ring(ring_size) + 8 + profile.gt_len;
  }
  std::size_t envelope_frame(std::size_t msg_len, std::size_t ring_size) const noexcept {
    return kFrameHeaderSize + envelope_payload(msg_len, ring_size);
  }
};

}  // namespace ibrs::wire
