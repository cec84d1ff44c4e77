#include "ibrs/rng.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>
#include <openssl/sha.h>

#include <limits>
#include <vector>

#include "ibrs/bytes.hpp"
#include "ibrs/error.hpp"

namespace ibrs {

std::uint64_t Rng::next_u64() {
  std::array<std::uint8_t, 8> buf{};
  fill(buf);
  std::uint64_t v = 0;
  for (auto b : buf) v = (v << 8) | b;
  return v;
}

std::uint64_t Rng::uniform(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kInvalidArgument, "uniform: zero bound");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

bool Rng::chance(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  // 53 random bits mapped to [0, 1)
  const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return u < p;
}

void SystemRng::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1)
    throw Error(ErrorCode::kRngFailure, "RAND_bytes failed");
}

struct SeededRng::Impl {
  EVP_CIPHER_CTX* ctx = nullptr;
  ~Impl() { EVP_CIPHER_CTX_free(ctx); }
};

namespace {

std::array<std::uint8_t, 32> derive_key(ByteView material) {
  std::array<std::uint8_t, 32> key{};
  SHA256(material.data(), material.size(), key.data());
  return key;
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed, std::string_view label)
    : SeededRng(derive_key(ByteWriter().lp(as_bytes(label)).u64(seed).bytes())) {}

SeededRng::SeededRng(const std::array<std::uint8_t, 32>& key)
    : impl_(std::make_unique<Impl>()), key_(key) {
  impl_->ctx = EVP_CIPHER_CTX_new();
  // 16-byte IV: 32-bit block counter followed by a 96-bit nonce, all zero.
  const std::array<std::uint8_t, 16> iv{};
  if (impl_->ctx == nullptr ||
      EVP_EncryptInit_ex(impl_->ctx, EVP_chacha20(), nullptr, key_.data(), iv.data()) != 1)
    throw Error(ErrorCode::kCryptoBackend, "chacha20 init failed");
}

SeededRng::~SeededRng() = default;
SeededRng::SeededRng(SeededRng&&) noexcept = default;
SeededRng& SeededRng::operator=(SeededRng&&) noexcept = default;

void SeededRng::fill(std::span<std::uint8_t> out) {
  if (out.empty()) return;
  std::fill(out.begin(), out.end(), std::uint8_t{0});
  int len = 0;
  if (EVP_EncryptUpdate(impl_->ctx, out.data(), &len, out.data(), static_cast<int>(out.size())) != 1)
    throw Error(ErrorCode::kCryptoBackend, "chacha20 keystream failed");
}

SeededRng SeededRng::fork(std::string_view label) const {
  return SeededRng(derive_key(ByteWriter().raw(key_).lp(as_bytes(label)).bytes()));
}

}  // namespace ibrs
