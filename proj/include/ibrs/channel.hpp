#pragma once

// Encrypt-then-MAC delivery of ring lists from an RSU to a vehicle, keyed by
// the pairing-derived shared key. AES-256-CTR for confidentiality and
// HMAC-SHA256 over C* || t_d for integrity.

#include <cstdint>
#include <vector>

#include "ibrs/bytes.hpp"
#include "ibrs/pairing.hpp"
#include "ibrs/scheme.hpp"

namespace ibrs {

struct RingList {
  std::vector<G1> pids;
  Timestamp expires_at = 0;  // t_d

  bool expired(Timestamp now) const noexcept { return now >= expires_at; }
};

inline constexpr std::uint8_t kChannelVersion = 1;
inline constexpr std::uint8_t kCipherAes256Ctr = 1;
inline constexpr std::uint8_t kMacHmacSha256 = 1;
inline constexpr std::size_t kChannelNonceSize = 16;
inline constexpr std::size_t kChannelMacSize = 32;

struct SealedRingList {
  std::uint8_t version = kChannelVersion;
  std::uint8_t cipher = kCipherAes256Ctr;
  std::uint8_t mac_alg = kMacHmacSha256;
  Bytes ciphertext;  // C* = nonce || AES-CTR(L)
  Bytes mac;         // Sigma = HMAC(C* || t_d)
  Timestamp expires_at = 0;

  Bytes to_bytes() const;
  static SealedRingList from_bytes(ByteView bytes);
};

/// Throws kInvalidArgument for an empty list.
SealedRingList seal_ring_list(const SymmetricKey& key, const std::vector<G1>& list, Timestamp expires_at, Rng& rng);

/// Verifies the MAC before any decryption. Throws kUnsupportedAlgorithm,
/// kMacFailure or kDecryptionFailed. Expiry is left to the caller.
RingList open_ring_list(const SymmetricKey& key, const SealedRingList& sealed);

struct ChannelCounters {
  std::uint64_t mac_checks = 0;
  std::uint64_t decryptions = 0;
};

/// Per-thread instrumentation of open_ring_list.
ChannelCounters channel_counters() noexcept;

}  // namespace ibrs
