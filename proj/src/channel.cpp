#include "ibrs/channel.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <memory>

#include "internal/key_access.hpp"

namespace ibrs {

namespace {

thread_local ChannelCounters t_counters;

using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

Bytes hmac_sha256(ByteView key, ByteView data) {
  Bytes out(EVP_MAX_MD_SIZE);
  unsigned len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(), out.data(), &len) ==
      nullptr)
    throw Error(ErrorCode::kCryptoBackend, "HMAC failed");
  out.resize(len);
  return out;
}

Bytes subkey(const SymmetricKey& key, std::string_view label) { return hmac_sha256(KeyAccess::bytes(key), as_bytes(label)); }

Bytes aes_ctr(ByteView key, ByteView iv, ByteView in) {
  CipherCtx ctx(EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free);
  Bytes out(in.size());
  int len = 0;
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_ctr(), nullptr, key.data(), iv.data()) != 1 ||
      EVP_EncryptUpdate(ctx.get(), out.data(), &len, in.data(), static_cast<int>(in.size())) != 1)
    throw Error(ErrorCode::kCryptoBackend, "AES-CTR failed");
  return out;
}

Bytes mac_input(ByteView ciphertext, Timestamp expires_at) {
  ByteWriter w;
  w.raw(ciphertext).u64(expires_at);
  return w.take();
}

}  // namespace

ChannelCounters channel_counters() noexcept { return t_counters; }

Bytes SealedRingList::to_bytes() const {
  ByteWriter w;
  w.u8(version).u8(cipher).u8(mac_alg).lp(ciphertext).lp(mac).u64(expires_at);
  return w.take();
}

SealedRingList SealedRingList::from_bytes(ByteView bytes) {
  ByteReader r(bytes);
  SealedRingList s;
  s.version = r.u8();
  s.cipher = r.u8();
  s.mac_alg = r.u8();
  const ByteView c = r.lp();
  s.ciphertext.assign(c.begin(), c.end());
  const ByteView m = r.lp();
  s.mac.assign(m.begin(), m.end());
  s.expires_at = r.u64();
  r.expect_done();
  return s;
}

SealedRingList seal_ring_list(const SymmetricKey& key, const std::vector<G1>& list, Timestamp expires_at, Rng& rng) {
  if (list.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot seal an empty ring list");
  ByteWriter plain;
  plain.u32(static_cast<std::uint32_t>(list.size()));
  for (const auto& pid : list) plain.raw(pid.to_bytes());
  plain.u64(expires_at);

  Bytes nonce(kChannelNonceSize);
  rng.fill(nonce);
  SealedRingList s;
  s.expires_at = expires_at;
  s.ciphertext = nonce;
  const Bytes body = aes_ctr(subkey(key, "ibrs/channel/enc"), nonce, plain.bytes());
  s.ciphertext.insert(s.ciphertext.end(), body.begin(), body.end());
  s.mac = hmac_sha256(subkey(key, "ibrs/channel/mac"), mac_input(s.ciphertext, expires_at));
  return s;
}

RingList open_ring_list(const SymmetricKey& key, const SealedRingList& sealed) {
  if (sealed.version != kChannelVersion || sealed.cipher != kCipherAes256Ctr || sealed.mac_alg != kMacHmacSha256)
    throw Error(ErrorCode::kUnsupportedAlgorithm, "unsupported sealed-list header");

  ++t_counters.mac_checks;
  const Bytes expected = hmac_sha256(subkey(key, "ibrs/channel/mac"), mac_input(sealed.ciphertext, sealed.expires_at));
  if (sealed.mac.size() != expected.size() ||
      CRYPTO_memcmp(sealed.mac.data(), expected.data(), expected.size()) != 0)
    throw Error(ErrorCode::kMacFailure);

  ++t_counters.decryptions;
  if (sealed.ciphertext.size() < kChannelNonceSize) throw Error(ErrorCode::kDecryptionFailed, "ciphertext too short");
  const ByteView ct(sealed.ciphertext);
  const Bytes plain = aes_ctr(subkey(key, "ibrs/channel/enc"), ct.first(kChannelNonceSize), ct.subspan(kChannelNonceSize));

  RingList out;
  try {
    ByteReader r(plain);
    const std::uint32_t count = r.u32();
    if (count == 0) throw Error(ErrorCode::kBadEncoding, "empty list");
    out.pids.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) out.pids.push_back(G1::from_bytes(r.raw(G1::kSize)));
    out.expires_at = r.u64();
    r.expect_done();
  } catch (const Error& e) {
    throw Error(ErrorCode::kDecryptionFailed, std::string("ring list decode: ") + e.what());
  }
  if (out.expires_at != sealed.expires_at) throw Error(ErrorCode::kDecryptionFailed, "expiry echo mismatch");
  return out;
}

}  // namespace ibrs
