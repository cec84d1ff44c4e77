#pragma once

// Protocol roles: the trusted authority (TRC), road-side units, vehicles with
// a software-modelled HSM boundary, and the tracing authority (LEA). All
// cross-entity traffic is expressed as wire frames.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ibrs/channel.hpp"
#include "ibrs/scheme.hpp"
#include "ibrs/wire.hpp"

namespace ibrs {

/// Revoked pseudonyms (compressed encodings) with a monotone version.
struct PrlSnapshot {
  std::uint64_t version = 0;
  std::set<Bytes> revoked;

  bool contains(const G1& pid) const { return revoked.count(pid.to_bytes()) != 0; }
};

class Trc {
 public:
  Trc(PublicParams pp, MasterSecret master) : pp_(std::move(pp)), master_(std::move(master)) {}

  const PublicParams& params() const noexcept { return pp_; }
  const IdentityRegistry& registry() const noexcept { return registry_; }

  /// Throws kDuplicateIdentity.
  VehicleCredential register_vehicle(const std::string& vid);
  RsuCredential register_rsu(const std::string& id);

  /// Adds the vehicle's PID to the PRL; idempotent. Throws kUnknownIdentity.
  const PrlSnapshot& revoke(const std::string& vid);
  const PrlSnapshot& prl() const noexcept { return prl_; }

  /// Up to `count` registered, non-revoked pseudonyms for ring-list padding.
  std::vector<G1> decoys(std::size_t count, Rng& rng) const;

  /// TraceRequest frame in, TraceResponse frame out. Throws kUnknownIdentity.
  Bytes handle_trace_request(ByteView frame) const;
  /// ResolveRequest frame in, ResolveResponse frame out.
  Bytes handle_resolve_request(ByteView frame) const;

 private:
  PublicParams pp_;
  MasterSecret master_;
  IdentityRegistry registry_;
  std::set<std::string> rsus_;
  PrlSnapshot prl_;
};

struct RsuConfig {
  Timestamp ring_ttl = 300;     // seconds per ring-list epoch
  std::size_t ring_floor = 32;  // minimum list size after decoy padding
};

class Rsu {
 public:
  Rsu(PublicParams pp, RsuCredential cred, RsuConfig cfg = {});

  const std::string& id() const noexcept { return cred_.id; }
  Bytes rid_broadcast() const;

  /// Installs a PRL snapshot and fresh decoys; purges revoked pseudonyms from
  /// the key cache and the current list.
  void refresh_prl(const PrlSnapshot& prl, std::vector<G1> decoys, Timestamp now);
  std::optional<Timestamp> prl_fetched_at() const noexcept { return prl_fetched_at_; }

  /// RingRequest frame in, SealedList frame out. Throws kDecryptionFailed,
  /// kRevoked or a decode error.
  Bytes handle_ring_request(ByteView frame, Timestamp now, Rng& rng);

  /// List served during the epoch containing `now`.
  std::vector<G1> ring_list(Timestamp now);
  Timestamp epoch_expiry(Timestamp now) const noexcept { return (now / cfg_.ring_ttl + 1) * cfg_.ring_ttl; }
  bool has_cached_key(const G1& pid) const { return key_cache_.count(pid.to_bytes()) != 0; }
  std::size_t cached_keys() const noexcept { return key_cache_.size(); }

 private:
  void roll_epoch(Timestamp now);

  PublicParams pp_;
  RsuCredential cred_;
  RsuConfig cfg_;
  PrlSnapshot prl_;
  std::optional<Timestamp> prl_fetched_at_;
  std::vector<G1> decoys_;
  std::map<Bytes, SymmetricKey> key_cache_;
  std::uint64_t epoch_ = 0;
  std::set<Bytes> requesters_;  // current epoch
};

struct VehicleConfig {
  Timestamp freshness_window = 5;  // seconds
  std::size_t ring_size = 2;       // n'
};

/// Per-envelope outcome of the freshness/replay filter plus the batch decision.
struct BatchReceipt {
  std::vector<Verdict> filtered;  // accepted == passed the filter
  std::optional<Verdict> batch;   // absent when nothing survived the filter
};

class Vehicle {
 public:
  Vehicle(PublicParams pp, VehicleCredential cred, VehicleConfig cfg = {});

  const G1& pid() const noexcept { return hsm_.pid(); }
  const VehicleConfig& config() const noexcept { return cfg_; }

  /// RidBroadcast frame in, RingRequest frame out; remembers the RSU key.
  Bytes request_ring(ByteView rid_frame, Rng& rng);
  /// SealedList frame in. Throws kMacFailure, kDecryptionFailed,
  /// kRingListExpired or kInvalidArgument (no pending request); the held list
  /// is unchanged on any failure.
  void accept_ring(ByteView sealed_frame, Timestamp now);

  bool has_ring(Timestamp now) const noexcept { return ring_ && !ring_->expired(now); }
  const std::optional<RingList>& ring_list() const noexcept { return ring_; }

  /// Picks n'-1 distinct others from the held list, places the signer at a
  /// random position and signs. Throws kNoRingList, kRingListExpired,
  /// kInsufficientRing.
  BroadcastEnvelope broadcast(ByteView m, Timestamp now, Rng& rng, std::optional<std::size_t> ring_size = {});

  /// Freshness, then replay, then signature check. Stale and replayed
  /// envelopes are rejected without any pairing evaluation.
  Verdict receive(const BroadcastEnvelope& env, Timestamp now);
  BatchReceipt receive_batch(std::span<const BroadcastEnvelope> envs, Timestamp now, Rng& rng,
                             const BatchOptions& opts = {});

  std::size_t replay_cache_size() const noexcept { return seen_.size(); }

 private:
  // Holds the credential; secret keys and derived symmetric keys never leave it.
  class Hsm {
   public:
    explicit Hsm(VehicleCredential cred) : cred_(std::move(cred)) {}
    const G1& pid() const noexcept { return cred_.pid; }
    RingList open(const std::string& rsu_id, const G2& rid, const SealedRingList& sealed);
    BroadcastEnvelope sign(const PublicParams& pp, const SignerRing& ring, std::size_t k, ByteView m, Timestamp t,
                           Rng& rng) const;

   private:
    VehicleCredential cred_;
    std::map<std::string, SymmetricKey> key_cache_;
  };

  std::optional<RejectReason> filter(const BroadcastEnvelope& env, Timestamp now);
  void evict(Timestamp now);

  PublicParams pp_;
  VehicleConfig cfg_;
  Hsm hsm_;
  std::optional<wire::RidBroadcast> pending_;
  std::optional<RingList> ring_;
  std::map<std::array<std::uint8_t, 32>, Timestamp> seen_;
};

class Lea {
 public:
  Lea(PublicParams pp, TraceSecret trace) : pp_(std::move(pp)), trace_(std::move(trace)) {}

  /// Opens the tag, asks the TRC for per-member candidates, matches, then
  /// resolves the matching pseudonym. Errors from the TRC propagate.
  std::optional<std::string> trace(const BroadcastEnvelope& env, const Trc& trc) const;

 private:
  PublicParams pp_;
  TraceSecret trace_;
};

/// Full V2I handshake: RID broadcast, encrypted request, sealed reply.
/// Returns the error code on failure and leaves the vehicle's list untouched.
std::optional<ErrorCode> acquire_ring(Vehicle& vehicle, Rsu& rsu, Timestamp now, Rng& rng);

}  // namespace ibrs
