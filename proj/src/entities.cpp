#include "ibrs/entities.hpp"

#include <algorithm>

namespace ibrs {

// ---- TRC ------------------------------------------------------------------------

VehicleCredential Trc::register_vehicle(const std::string& vid) {
  if (registry_.contains(vid)) throw Error(ErrorCode::kDuplicateIdentity, "vehicle already registered: " + vid);
  VehicleCredential cred = keygen_vehicle(master_, vid);
  registry_.add(vid, cred.pid);
  return cred;
}

RsuCredential Trc::register_rsu(const std::string& id) {
  if (!rsus_.insert(id).second) throw Error(ErrorCode::kDuplicateIdentity, "RSU already registered: " + id);
  return keygen_rsu(master_, id);
}

const PrlSnapshot& Trc::revoke(const std::string& vid) {
  const auto pid = registry_.pid_of(vid);
  if (!pid) throw Error(ErrorCode::kUnknownIdentity, "cannot revoke unknown vehicle: " + vid);
  if (prl_.revoked.insert(pid->to_bytes()).second) ++prl_.version;
  return prl_;
}

std::vector<G1> Trc::decoys(std::size_t count, Rng& rng) const {
  std::vector<G1> pool;
  for (const auto& vid : registry_.vids()) {
    const G1 pid = *registry_.pid_of(vid);
    if (!prl_.contains(pid)) pool.push_back(pid);
  }
  // partial Fisher-Yates
  const std::size_t take = std::min(count, pool.size());
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  return pool;
}

Bytes Trc::handle_trace_request(ByteView frame) const {
  const auto req = wire::decode_trace_request(frame);
  const SignerRing ring = SignerRing::create(req.ring);
  return wire::encode(wire::TraceResponse{trace_candidates(pp_, registry_, ring, req.t)});
}

Bytes Trc::handle_resolve_request(ByteView frame) const {
  const auto req = wire::decode_resolve_request(frame);
  return wire::encode(wire::ResolveResponse{registry_.vid_of(req.pid)});
}

// ---- RSU ------------------------------------------------------------------------

Rsu::Rsu(PublicParams pp, RsuCredential cred, RsuConfig cfg) : pp_(std::move(pp)), cred_(std::move(cred)), cfg_(cfg) {
  if (cfg_.ring_ttl == 0) throw Error(ErrorCode::kInvalidArgument, "ring_ttl must be positive");
}

Bytes Rsu::rid_broadcast() const { return wire::encode(wire::RidBroadcast{cred_.id, cred_.rid}); }

void Rsu::refresh_prl(const PrlSnapshot& prl, std::vector<G1> decoys, Timestamp now) {
  if (prl.version >= prl_.version) prl_ = prl;
  prl_fetched_at_ = now;
  decoys_.clear();
  for (auto& d : decoys)
    if (!prl_.contains(d)) decoys_.push_back(std::move(d));
  for (auto it = key_cache_.begin(); it != key_cache_.end();)
    it = prl_.revoked.count(it->first) != 0 ? key_cache_.erase(it) : std::next(it);
  for (auto it = requesters_.begin(); it != requesters_.end();)
    it = prl_.revoked.count(*it) != 0 ? requesters_.erase(it) : std::next(it);
}

void Rsu::roll_epoch(Timestamp now) {
  const std::uint64_t epoch = now / cfg_.ring_ttl;
  if (epoch != epoch_) {
    epoch_ = epoch;
    requesters_.clear();
  }
}

std::vector<G1> Rsu::ring_list(Timestamp now) {
  roll_epoch(now);
  std::set<Bytes> chosen(requesters_.begin(), requesters_.end());
  for (const auto& d : decoys_) {
    if (chosen.size() >= cfg_.ring_floor) break;
    chosen.insert(d.to_bytes());
  }
  // std::set order: sorted by compressed encoding
  std::vector<G1> out;
  out.reserve(chosen.size());
  for (const auto& b : chosen) out.push_back(G1::from_bytes(b));
  return out;
}

Bytes Rsu::handle_ring_request(ByteView frame, Timestamp now, Rng& rng) {
  roll_epoch(now);
  const auto req = wire::decode_ring_request(frame);
  const G1 pid = ibe_decrypt(pp_, cred_.rsk, req.ciphertext);
  if (prl_.contains(pid)) throw Error(ErrorCode::kRevoked, "requesting pseudonym is revoked");

  Bytes key_id = pid.to_bytes();
  auto it = key_cache_.find(key_id);
  if (it == key_cache_.end()) it = key_cache_.emplace(key_id, derive_shared_key_rsu(cred_.rsk, pid)).first;
  requesters_.insert(std::move(key_id));

  const auto sealed = seal_ring_list(it->second, ring_list(now), epoch_expiry(now), rng);
  return wire::encode(sealed);
}

// ---- Vehicle --------------------------------------------------------------------

Vehicle::Vehicle(PublicParams pp, VehicleCredential cred, VehicleConfig cfg)
    : pp_(std::move(pp)), cfg_(cfg), hsm_(std::move(cred)) {
  if (cfg_.ring_size < SignerRing::kMinSize) throw Error(ErrorCode::kInvalidArgument, "ring size below two");
}

RingList Vehicle::Hsm::open(const std::string& rsu_id, const G2& rid, const SealedRingList& sealed) {
  const std::string cache_id = rsu_id + '\0' + to_hex(rid.to_bytes());
  auto it = key_cache_.find(cache_id);
  if (it == key_cache_.end()) it = key_cache_.emplace(cache_id, derive_shared_key_vehicle(cred_.psk, rid)).first;
  return open_ring_list(it->second, sealed);
}

BroadcastEnvelope Vehicle::Hsm::sign(const PublicParams& pp, const SignerRing& ring, std::size_t k, ByteView m,
                                     Timestamp t, Rng& rng) const {
  return sign_envelope(pp, cred_, ring, k, m, t, rng);
}

Bytes Vehicle::request_ring(ByteView rid_frame, Rng& rng) {
  auto rid = wire::decode_rid_broadcast(rid_frame);
  const auto ct = ibe_encrypt(pp_, rid.rid, hsm_.pid(), rng);
  pending_ = std::move(rid);
  return wire::encode(wire::RingRequest{ct});
}

void Vehicle::accept_ring(ByteView sealed_frame, Timestamp now) {
  if (!pending_) throw Error(ErrorCode::kInvalidArgument, "no ring request outstanding");
  const auto sealed = wire::decode_sealed_list(sealed_frame);
  RingList list = hsm_.open(pending_->rsu_id, pending_->rid, sealed);
  if (list.expired(now)) throw Error(ErrorCode::kRingListExpired);
  ring_ = std::move(list);
  pending_.reset();
}

BroadcastEnvelope Vehicle::broadcast(ByteView m, Timestamp now, Rng& rng, std::optional<std::size_t> ring_size) {
  if (!ring_) throw Error(ErrorCode::kNoRingList);
  if (ring_->expired(now)) throw Error(ErrorCode::kRingListExpired);
  const std::size_t n = ring_size.value_or(cfg_.ring_size);
  if (n < SignerRing::kMinSize) throw Error(ErrorCode::kInvalidArgument, "ring size below two");

  std::vector<G1> others;
  for (const auto& p : ring_->pids)
    if (!(p == hsm_.pid())) others.push_back(p);
  if (others.size() < n - 1)
    throw Error(ErrorCode::kInsufficientRing, "need " + std::to_string(n - 1) + " other members, list has " +
                                                  std::to_string(others.size()));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform(others.size() - i));
    std::swap(others[i], others[j]);
  }
  others.resize(n - 1);
  const auto k = static_cast<std::size_t>(rng.uniform(n));
  others.insert(others.begin() + static_cast<std::ptrdiff_t>(k), hsm_.pid());
  auto env = hsm_.sign(pp_, SignerRing::create(std::move(others)), k, m, now, rng);
  // our own envelope echoed back is a replay
  seen_.emplace(wire::envelope_digest(env), env.t);
  return env;
}

void Vehicle::evict(Timestamp now) {
  for (auto it = seen_.begin(); it != seen_.end();) {
    const Timestamp t = it->second;
    const Timestamp age = now > t ? now - t : t - now;
    it = age > cfg_.freshness_window ? seen_.erase(it) : std::next(it);
  }
}

std::optional<RejectReason> Vehicle::filter(const BroadcastEnvelope& env, Timestamp now) {
  const Timestamp age = now > env.t ? now - env.t : env.t - now;
  if (age > cfg_.freshness_window) return RejectReason::kStale;
  if (seen_.count(wire::envelope_digest(env)) != 0) return RejectReason::kReplay;
  return std::nullopt;
}

Verdict Vehicle::receive(const BroadcastEnvelope& env, Timestamp now) {
  evict(now);
  if (auto r = filter(env, now)) return Verdict::reject(*r);
  Verdict v = verify_single(pp_, env);
  if (v) seen_.emplace(wire::envelope_digest(env), env.t);
  return v;
}

BatchReceipt Vehicle::receive_batch(std::span<const BroadcastEnvelope> envs, Timestamp now, Rng& rng,
                                    const BatchOptions& opts) {
  evict(now);
  BatchReceipt out;
  std::vector<BroadcastEnvelope> survivors;
  std::set<std::array<std::uint8_t, 32>> in_batch;
  for (std::size_t i = 0; i < envs.size(); ++i) {
    auto r = filter(envs[i], now);
    if (!r && !in_batch.insert(wire::envelope_digest(envs[i])).second) r = RejectReason::kReplay;
    if (r) {
      out.filtered.push_back(Verdict::reject(*r, i));
      continue;
    }
    out.filtered.push_back(Verdict::accept());
    survivors.push_back(envs[i]);
  }
  if (survivors.empty()) return out;
  out.batch = verify_batch(pp_, survivors, rng, opts);
  if (*out.batch)
    for (const auto& env : survivors) seen_.emplace(wire::envelope_digest(env), env.t);
  return out;
}

// ---- LEA ------------------------------------------------------------------------

std::optional<std::string> Lea::trace(const BroadcastEnvelope& env, const Trc& trc) const {
  const Gt opened = trace_open(trace_, env.tag);
  const std::vector<G1> members(env.ring.members().begin(), env.ring.members().end());
  const Bytes reply = trc.handle_trace_request(wire::encode(wire::TraceRequest{members, env.t}));
  const auto resp = wire::decode_trace_response(reply);
  if (resp.candidates.size() != members.size())
    throw Error(ErrorCode::kIntegrityViolation, "trace response size mismatch");
  const auto hit = match_candidate(resp.candidates, opened);
  if (!hit) return std::nullopt;
  const Bytes resolved = trc.handle_resolve_request(wire::encode(wire::ResolveRequest{members[*hit]}));
  return wire::decode_resolve_response(resolved).vid;
}

// ---- handshake --------------------------------------------------------------------

std::optional<ErrorCode> acquire_ring(Vehicle& vehicle, Rsu& rsu, Timestamp now, Rng& rng) {
  try {
    const Bytes request = vehicle.request_ring(rsu.rid_broadcast(), rng);
    const Bytes reply = rsu.handle_ring_request(request, now, rng);
    vehicle.accept_ring(reply, now);
    return std::nullopt;
  } catch (const Error& e) {
    return e.code();
  }
}

}  // namespace ibrs
