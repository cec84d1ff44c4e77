#include "ibrs/scheme.hpp"

#include <openssl/crypto.h>

#include <set>

#include "ibrs/error.hpp"

namespace ibrs {

namespace {

constexpr std::string_view kIbeMaskLabel = "ibrs/ibe-mask/v1";
constexpr std::string_view kSharedKeyLabel = "ibrs/shared-key/v1";

// Common prefix m || tag || t || L_s of every h_i preimage.
class RingHasher {
 public:
  RingHasher(ByteView m, const TraceTag& tag, Timestamp t, const SignerRing& ring) {
    w_.lp(m).lp(tag.value.to_bytes()).u64(t).lp(ring.to_bytes());
    prefix_len_ = w_.size();
  }

  Scalar operator()(const G1& u) {
    Bytes buf = w_.bytes();
    buf.resize(prefix_len_);
    ByteWriter tail;
    tail.lp(u.to_bytes());
    buf.insert(buf.end(), tail.bytes().begin(), tail.bytes().end());
    return hash_to_scalar(buf);
  }

 private:
  ByteWriter w_;
  std::size_t prefix_len_ = 0;
};

// sum_i (U_i + h_i PID_i); the caller has checked the lengths.
G1 ring_aggregate(const BroadcastEnvelope& env) {
  RingHasher hasher(env.message, env.tag, env.t, env.ring);
  G1 acc;
  const auto members = env.ring.members();
  for (std::size_t i = 0; i < members.size(); ++i) {
    acc += env.sigma.u[i];
    acc += members[i] * hasher(env.sigma.u[i]);
  }
  return acc;
}

std::optional<RejectReason> structural_check(const BroadcastEnvelope& env) {
  if (env.ring.size() < SignerRing::kMinSize) return RejectReason::kStructure;
  if (env.sigma.u.size() != env.ring.size()) return RejectReason::kStructure;
  if (env.sigma.v.is_identity()) return RejectReason::kStructure;
  return std::nullopt;
}

}  // namespace

// ---- PublicParams -------------------------------------------------------------

bool PublicParams::consistent() const {
  if (p.is_identity() || q.is_identity() || pk1.is_identity() || pk2.is_identity() || pk_trac.is_identity())
    return false;
  return pair(pk1, q) == pair(p, pk2);
}

Bytes PublicParams::to_bytes() const {
  ByteWriter w;
  w.lp(as_bytes(profile.name))
      .raw(p.to_bytes())
      .raw(q.to_bytes())
      .raw(pk1.to_bytes())
      .raw(pk2.to_bytes())
      .raw(pk_trac.to_bytes())
      .lp(as_bytes(hash_suite));
  return w.take();
}

PublicParams PublicParams::from_bytes(ByteView bytes) {
  ByteReader r(bytes);
  PublicParams pp;
  const ByteView name = r.lp();
  pp.profile = find_profile(std::string_view(reinterpret_cast<const char*>(name.data()), name.size()));
  pp.p = G1::from_bytes(r.raw(G1::kSize));
  pp.q = G2::from_bytes(r.raw(G2::kSize));
  pp.pk1 = G1::from_bytes(r.raw(G1::kSize));
  pp.pk2 = G2::from_bytes(r.raw(G2::kSize));
  pp.pk_trac = G2::from_bytes(r.raw(G2::kSize));
  const ByteView suite = r.lp();
  pp.hash_suite.assign(suite.begin(), suite.end());
  r.expect_done();
  if (!pp.consistent()) throw Error(ErrorCode::kIntegrityViolation, "public parameters inconsistent");
  return pp;
}

// ---- SignerRing ----------------------------------------------------------------

SignerRing SignerRing::create(std::vector<G1> members) {
  if (members.size() < kMinSize) throw Error(ErrorCode::kInvalidArgument, "ring needs at least two members");
  std::set<Bytes> seen;
  for (const auto& m : members) {
    if (m.is_identity()) throw Error(ErrorCode::kInvalidArgument, "identity element in ring");
    if (!seen.insert(m.to_bytes()).second) throw Error(ErrorCode::kDuplicateRingMember);
  }
  return SignerRing(std::move(members));
}

std::optional<std::size_t> SignerRing::index_of(const G1& pid) const noexcept {
  for (std::size_t i = 0; i < members_.size(); ++i)
    if (members_[i] == pid) return i;
  return std::nullopt;
}

Bytes SignerRing::to_bytes() const {
  Bytes out;
  out.reserve(members_.size() * G1::kSize);
  for (const auto& m : members_) {
    const Bytes b = m.to_bytes();
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

// ---- keys -----------------------------------------------------------------------

bool operator==(const SymmetricKey& a, const SymmetricKey& b) noexcept {
  return a.bytes_.size() == b.bytes_.size() && CRYPTO_memcmp(a.bytes_.data(), b.bytes_.data(), a.bytes_.size()) == 0;
}

SymmetricKey derive_symmetric_key(const Gt& shared) {
  return SymmetricKey(kdf(shared, SymmetricKey::kSize, kSharedKeyLabel));
}

SetupResult setup(Rng& rng, const CurveProfile& profile) {
  if (!profile.operational)
    throw Error(ErrorCode::kProfileNotOperational, "profile " + std::string(profile.name) + " is size-only");
  SetupResult out;
  out.master.s = Scalar::random(rng);
  out.trace.s_trac = Scalar::random(rng);
  PublicParams& pp = out.pp;
  pp.profile = profile;
  pp.p = G1::generator();
  pp.q = G2::generator();
  pp.pk1 = pp.p * out.master.s;
  pp.pk2 = pp.q * out.master.s;
  pp.pk_trac = pp.q * out.trace.s_trac;
  return out;
}

VehicleCredential keygen_vehicle(const MasterSecret& master, std::string_view vid) {
  if (vid.empty()) throw Error(ErrorCode::kInvalidArgument, "empty vehicle identity");
  VehicleCredential c;
  c.vid = std::string(vid);
  c.pid = hash_to_g1(as_bytes(vid));
  c.psk = c.pid * master.s;
  return c;
}

RsuCredential keygen_rsu(const MasterSecret& master, std::string_view id) {
  if (id.empty()) throw Error(ErrorCode::kInvalidArgument, "empty RSU identity");
  RsuCredential c;
  c.id = std::string(id);
  c.rid = hash_to_g2(as_bytes(id));
  c.rsk = c.rid * master.s;
  return c;
}

bool credential_consistent(const PublicParams& pp, const VehicleCredential& cred) {
  return pair(cred.psk, pp.q) == pair(cred.pid, pp.pk2);
}

bool credential_consistent(const PublicParams& pp, const RsuCredential& cred) {
  return pair(pp.p, cred.rsk) == pair(pp.pk1, cred.rid);
}

// ---- IBE ---------------------------------------------------------------------------

IbeCiphertext ibe_encrypt(const PublicParams& pp, const G2& rid, const G1& pid, Rng& rng) {
  const Scalar r = Scalar::random(rng);
  const Gt g = pair(pp.pk1, rid);
  const Bytes mask = kdf(g.pow(r), G1::kSize, kIbeMaskLabel);
  IbeCiphertext ct;
  ct.u = pp.p * r;
  ct.v = pid.to_bytes();
  for (std::size_t i = 0; i < ct.v.size(); ++i) ct.v[i] ^= mask[i];
  return ct;
}

G1 ibe_decrypt(const PublicParams& pp, const G2& rsk, const IbeCiphertext& ct) {
  (void)pp;
  if (ct.v.size() != G1::kSize) throw Error(ErrorCode::kDecryptionFailed, "ciphertext body has wrong length");
  const Bytes mask = kdf(pair(ct.u, rsk), G1::kSize, kIbeMaskLabel);
  Bytes plain = ct.v;
  for (std::size_t i = 0; i < plain.size(); ++i) plain[i] ^= mask[i];
  try {
    G1 pid = G1::from_bytes(plain);
    if (pid.is_identity()) throw Error(ErrorCode::kDecryptionFailed, "decrypted identity element");
    return pid;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDecryptionFailed) throw;
    throw Error(ErrorCode::kDecryptionFailed, std::string("pseudonym decode failed: ") + e.what());
  }
}

SymmetricKey derive_shared_key_rsu(const G2& rsk, const G1& pid) { return derive_symmetric_key(pair(pid, rsk)); }

SymmetricKey derive_shared_key_vehicle(const G1& psk, const G2& rid) { return derive_symmetric_key(pair(psk, rid)); }

// ---- signing -----------------------------------------------------------------------

namespace detail {

Bytes trace_preimage(std::string_view vid, Timestamp t) {
  ByteWriter w;
  w.raw(as_bytes(vid)).u64(t);
  return w.take();
}

RingSignature ring_sign(const PublicParams& pp, const VehicleCredential& cred, const SignerRing& ring,
                        std::size_t k, ByteView m, Timestamp t, const TraceTag& tag, Rng& rng,
                        Scalar* nonce_out) {
  (void)pp;
  if (k >= ring.size() || !(ring[k] == cred.pid))
    throw Error(ErrorCode::kSignerNotInRing, "ring[k] is not the signer's pseudonym");

  RingHasher hasher(m, tag, t, ring);
  const auto members = ring.members();
  RingSignature sig;
  sig.u.resize(ring.size());

  G1 others;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i == k) continue;
    sig.u[i] = G1::random(rng);
    others += sig.u[i] + members[i] * hasher(sig.u[i]);
  }
  const Scalar nonce = Scalar::random(rng);
  sig.u[k] = members[k] * nonce - others;
  const Scalar h_k = hasher(sig.u[k]);
  sig.v = cred.psk * (h_k + nonce);
  if (nonce_out != nullptr) *nonce_out = nonce;
  return sig;
}

}  // namespace detail

TraceTag make_tag(const PublicParams& pp, std::string_view vid, Timestamp t) {
  return TraceTag{pair(hash_to_g1(detail::trace_preimage(vid, t)), pp.pk_trac)};
}

RingSignature ring_sign(const PublicParams& pp, const VehicleCredential& cred, const SignerRing& ring,
                        std::size_t k, ByteView m, Timestamp t, const TraceTag& tag, Rng& rng) {
  return detail::ring_sign(pp, cred, ring, k, m, t, tag, rng, nullptr);
}

BroadcastEnvelope sign_envelope(const PublicParams& pp, const VehicleCredential& cred, const SignerRing& ring,
                                std::size_t k, ByteView m, Timestamp t, Rng& rng) {
  TraceTag tag = make_tag(pp, cred.vid, t);
  RingSignature sig = ring_sign(pp, cred, ring, k, m, t, tag, rng);
  return BroadcastEnvelope{Bytes(m.begin(), m.end()), std::move(sig), ring, t, std::move(tag)};
}

// ---- verification ---------------------------------------------------------------------

std::string_view to_string(RejectReason r) noexcept {
  switch (r) {
    case RejectReason::kNone: return "none";
    case RejectReason::kStructure: return "structure";
    case RejectReason::kEquation: return "equation";
    case RejectReason::kStale: return "stale";
    case RejectReason::kReplay: return "replay";
    case RejectReason::kEmptyBatch: return "empty-batch";
  }
  return "unknown";
}

Scalar ring_hash(ByteView m, const TraceTag& tag, Timestamp t, const SignerRing& ring, const G1& u_i) {
  return RingHasher(m, tag, t, ring)(u_i);
}

Verdict verify_single(const PublicParams& pp, const BroadcastEnvelope& env) {
  if (auto bad = structural_check(env)) return Verdict::reject(*bad);
  const G1 lhs = ring_aggregate(env);
  if (pair(lhs, pp.pk2) == pair(env.sigma.v, pp.q)) return Verdict::accept();
  return Verdict::reject(RejectReason::kEquation);
}

Verdict verify_batch(const PublicParams& pp, std::span<const BroadcastEnvelope> envs, Rng& rng,
                     const BatchOptions& opts) {
  if (envs.empty()) return Verdict::reject(RejectReason::kEmptyBatch);
  if (!opts.unit_weights && (opts.lambda == 0 || opts.lambda > 128))
    throw Error(ErrorCode::kInvalidArgument, "batch lambda must be in [1, 128]");
  for (std::size_t i = 0; i < envs.size(); ++i)
    if (auto bad = structural_check(envs[i])) return Verdict::reject(*bad, i);

  // lhs = sum_i delta_i * sum_j (U_ij + h_ij PID_ij), rhs = sum_i delta_i V_i,
  // each evaluated as one multi-scalar multiplication
  std::vector<G1> lp;
  std::vector<Scalar> lk;
  std::vector<G1> rp;
  std::vector<Scalar> rk;
  rp.reserve(envs.size());
  rk.reserve(envs.size());
  for (const auto& env : envs) {
    const Scalar delta = opts.unit_weights ? Scalar::from_u64(1) : Scalar::random_bits(rng, opts.lambda);
    RingHasher hasher(env.message, env.tag, env.t, env.ring);
    const auto members = env.ring.members();
    for (std::size_t j = 0; j < members.size(); ++j) {
      lp.push_back(env.sigma.u[j]);
      lk.push_back(delta);
      lp.push_back(members[j]);
      lk.push_back(delta * hasher(env.sigma.u[j]));
    }
    rp.push_back(env.sigma.v);
    rk.push_back(delta);
  }
  const G1 lhs = multi_mul(lp, lk);
  const G1 rhs = multi_mul(rp, rk, opts.unit_weights ? 1 : opts.lambda);
  if (pair(lhs, pp.pk2) == pair(rhs, pp.q)) return Verdict::accept();
  return Verdict::reject(RejectReason::kEquation);
}

// ---- tracing ------------------------------------------------------------------------------

void IdentityRegistry::add(const std::string& vid, const G1& pid) {
  Bytes key = pid.to_bytes();
  if (by_vid_.count(vid) != 0 || by_pid_.count(key) != 0)
    throw Error(ErrorCode::kDuplicateIdentity, "identity already registered: " + vid);
  by_vid_.emplace(vid, pid);
  by_pid_.emplace(std::move(key), vid);
}

std::optional<std::string> IdentityRegistry::vid_of(const G1& pid) const {
  auto it = by_pid_.find(pid.to_bytes());
  if (it == by_pid_.end()) return std::nullopt;
  return it->second;
}

std::optional<G1> IdentityRegistry::pid_of(const std::string& vid) const {
  auto it = by_vid_.find(vid);
  if (it == by_vid_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> IdentityRegistry::vids() const {
  std::vector<std::string> out;
  out.reserve(by_vid_.size());
  for (const auto& [vid, _] : by_vid_) out.push_back(vid);
  return out;
}

Gt trace_open(const TraceSecret& trace, const TraceTag& tag) { return tag.value.pow(trace.s_trac.inverse()); }

std::vector<Gt> trace_candidates(const PublicParams& pp, const IdentityRegistry& registry, const SignerRing& ring,
                                 Timestamp t) {
  std::vector<Gt> out;
  out.reserve(ring.size());
  for (const auto& pid : ring.members()) {
    auto vid = registry.vid_of(pid);
    if (!vid) throw Error(ErrorCode::kUnknownIdentity, "ring member not in registry");
    out.push_back(pair(hash_to_g1(detail::trace_preimage(*vid, t)), pp.q));
  }
  return out;
}

std::optional<std::size_t> match_candidate(std::span<const Gt> candidates, const Gt& opened) {
  std::optional<std::size_t> hit;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!(candidates[i] == opened)) continue;
    if (hit) throw Error(ErrorCode::kIntegrityViolation, "multiple trace candidates match");
    hit = i;
  }
  return hit;
}

std::optional<std::string> trace_match(const PublicParams& pp, const IdentityRegistry& registry,
                                       const SignerRing& ring, Timestamp t, const Gt& opened) {
  const auto candidates = trace_candidates(pp, registry, ring, t);
  const auto hit = match_candidate(candidates, opened);
  if (!hit) return std::nullopt;
  return registry.vid_of(ring[*hit]);
}

}  // namespace ibrs
