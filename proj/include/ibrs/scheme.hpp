#pragma once

// Identity-based ring signatures with traceable tags, batch verification and
// identity-based encryption of pseudonyms.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ibrs/bytes.hpp"
#include "ibrs/pairing.hpp"
#include "ibrs/rng.hpp"

namespace ibrs {

using Timestamp = std::uint64_t;  // unix seconds

struct PublicParams {
  CurveProfile profile = default_profile();
  G1 p;
  G2 q;
  G1 pk1;       // s*P
  G2 pk2;       // s*Q
  G2 pk_trac;   // s_trac*Q
  std::string hash_suite = "SHA-256/SSWU-RO";

  /// pair(PK1, Q) == pair(P, PK2) and no identity elements.
  bool consistent() const;
  Bytes to_bytes() const;
  static PublicParams from_bytes(ByteView bytes);
};

struct MasterSecret {
  Scalar s;
};

struct TraceSecret {
  Scalar s_trac;
};

struct SetupResult {
  PublicParams pp;
  MasterSecret master;
  TraceSecret trace;
};

struct VehicleCredential {
  std::string vid;
  G1 pid;
  G1 psk;
};

struct RsuCredential {
  std::string id;
  G2 rid;
  G2 rsk;
};

/// Ordered, duplicate-free list of at least two pseudonyms. The order is
/// fixed at creation and bound into every signature hash.
class SignerRing {
 public:
  static constexpr std::size_t kMinSize = 2;

  /// Throws kInvalidArgument (too small or identity member) or kDuplicateRingMember.
  static SignerRing create(std::vector<G1> members);

  std::span<const G1> members() const noexcept { return members_; }
  std::size_t size() const noexcept { return members_.size(); }
  const G1& operator[](std::size_t i) const { return members_.at(i); }
  std::optional<std::size_t> index_of(const G1& pid) const noexcept;

  /// Ordered concatenation of compressed pseudonyms.
  Bytes to_bytes() const;

  friend bool operator==(const SignerRing& a, const SignerRing& b) noexcept { return a.members_ == b.members_; }

 private:
  explicit SignerRing(std::vector<G1> members) : members_(std::move(members)) {}
  std::vector<G1> members_;
};

struct RingSignature {
  std::vector<G1> u;
  G1 v;

  friend bool operator==(const RingSignature&, const RingSignature&) = default;
};

struct TraceTag {
  Gt value;

  friend bool operator==(const TraceTag&, const TraceTag&) = default;
};

struct BroadcastEnvelope {
  Bytes message;
  RingSignature sigma;
  SignerRing ring;
  Timestamp t = 0;
  TraceTag tag;
};

struct IbeCiphertext {
  G1 u;     // r*P
  Bytes v;  // compress(PID) xor kdf(g^r)
};

/// Fixed-length symmetric key. Key bytes never leave the library's channel
/// code; callers can compare keys but not read them.
class SymmetricKey {
 public:
  static constexpr std::size_t kSize = 32;

  friend bool operator==(const SymmetricKey& a, const SymmetricKey& b) noexcept;

 private:
  explicit SymmetricKey(Bytes bytes) : bytes_(std::move(bytes)) {}
  Bytes bytes_;

  friend SymmetricKey derive_symmetric_key(const Gt& shared);
  friend struct KeyAccess;
};

/// KDF step shared by both sides of the vehicle-RSU key agreement.
SymmetricKey derive_symmetric_key(const Gt& shared);

// ---- setup and keys ---------------------------------------------------------

/// Throws kProfileNotOperational for size-only profiles.
SetupResult setup(Rng& rng, const CurveProfile& profile = default_profile());

/// PID = H1(VID), PSK = s*PID. Throws kInvalidArgument on empty VID.
VehicleCredential keygen_vehicle(const MasterSecret& master, std::string_view vid);
/// RID = H2(id), RSK = s*RID.
RsuCredential keygen_rsu(const MasterSecret& master, std::string_view id);

bool credential_consistent(const PublicParams& pp, const VehicleCredential& cred);
bool credential_consistent(const PublicParams& pp, const RsuCredential& cred);

// ---- pseudonym encryption -----------------------------------------------------

IbeCiphertext ibe_encrypt(const PublicParams& pp, const G2& rid, const G1& pid, Rng& rng);
/// Throws kDecryptionFailed when the unmasked bytes are not a valid pseudonym.
G1 ibe_decrypt(const PublicParams& pp, const G2& rsk, const IbeCiphertext& ct);

SymmetricKey derive_shared_key_rsu(const G2& rsk, const G1& pid);
SymmetricKey derive_shared_key_vehicle(const G1& psk, const G2& rid);

// ---- signing ----------------------------------------------------------------

/// tag = e(H1(VID || t), PK_trac)
TraceTag make_tag(const PublicParams& pp, std::string_view vid, Timestamp t);

/// Throws kSignerNotInRing when ring[k] is not the credential's pseudonym.
RingSignature ring_sign(const PublicParams& pp, const VehicleCredential& cred, const SignerRing& ring,
                        std::size_t k, ByteView m, Timestamp t, const TraceTag& tag, Rng& rng);

/// Signs and assembles the broadcast envelope with a fresh tag.
BroadcastEnvelope sign_envelope(const PublicParams& pp, const VehicleCredential& cred, const SignerRing& ring,
                                std::size_t k, ByteView m, Timestamp t, Rng& rng);

// ---- verification -------------------------------------------------------------

enum class RejectReason {
  kNone,
  kStructure,     // len(U) != ring size, ring too small, identity V
  kEquation,      // pairing check failed
  kStale,         // outside the freshness window (entities)
  kReplay,        // seen before (entities)
  kEmptyBatch,
};

std::string_view to_string(RejectReason r) noexcept;

struct Verdict {
  bool accepted = false;
  RejectReason reason = RejectReason::kNone;
  std::optional<std::size_t> index;  // offending envelope for batch structural errors

  static Verdict accept() { return {true, RejectReason::kNone, std::nullopt}; }
  static Verdict reject(RejectReason r, std::optional<std::size_t> i = std::nullopt) { return {false, r, i}; }
  explicit operator bool() const noexcept { return accepted; }
};

/// h_i = H(m || tag || t || L_s || U_i) with every component length-prefixed.
Scalar ring_hash(ByteView m, const TraceTag& tag, Timestamp t, const SignerRing& ring, const G1& u_i);

/// Exactly two pairings: e(sum(U_i + h_i PID_i), PK2) == e(V, Q).
Verdict verify_single(const PublicParams& pp, const BroadcastEnvelope& env);

struct BatchOptions {
  unsigned lambda = 64;       // small-exponent width in bits
  bool unit_weights = false; // all multipliers equal to one
};

/// Small-exponent batch test with exactly two pairings for any batch size.
Verdict verify_batch(const PublicParams& pp, std::span<const BroadcastEnvelope> envs, Rng& rng,
                     const BatchOptions& opts = {});

// ---- tracing ------------------------------------------------------------------

/// VID <-> PID bijection kept by the trusted authority.
class IdentityRegistry {
 public:
  /// Throws kDuplicateIdentity when either side is already present.
  void add(const std::string& vid, const G1& pid);
  std::optional<std::string> vid_of(const G1& pid) const;
  std::optional<G1> pid_of(const std::string& vid) const;
  bool contains(const std::string& vid) const { return by_vid_.count(vid) != 0; }
  std::size_t size() const noexcept { return by_vid_.size(); }
  std::vector<std::string> vids() const;

 private:
  std::map<std::string, G1> by_vid_;
  std::map<Bytes, std::string> by_pid_;
};

/// tag^(1/s_trac) = e(H1(VID || t), Q)
Gt trace_open(const TraceSecret& trace, const TraceTag& tag);

/// Candidate values e(H1(VID_i || t), Q), one per ring slot. Throws
/// kUnknownIdentity for a member missing from the registry.
std::vector<Gt> trace_candidates(const PublicParams& pp, const IdentityRegistry& registry, const SignerRing& ring,
                                 Timestamp t);

/// Index of the unique matching candidate; kIntegrityViolation on multiple matches.
std::optional<std::size_t> match_candidate(std::span<const Gt> candidates, const Gt& opened);

std::optional<std::string> trace_match(const PublicParams& pp, const IdentityRegistry& registry,
                                       const SignerRing& ring, Timestamp t, const Gt& opened);

namespace detail {
/// Signing with the U_k nonce reported back, for white-box tests.
RingSignature ring_sign(const PublicParams& pp, const VehicleCredential& cred, const SignerRing& ring,
                        std::size_t k, ByteView m, Timestamp t, const TraceTag& tag, Rng& rng,
                        Scalar* nonce_out);
Bytes trace_preimage(std::string_view vid, Timestamp t);
}  // namespace detail

}  // namespace ibrs
