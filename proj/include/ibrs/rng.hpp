#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>

namespace ibrs {

/// Source of cryptographic randomness. Handles are owned by a single caller.
class Rng {
 public:
  virtual ~Rng() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  std::uint64_t next_u64();
  /// Uniform integer in [0, bound) by rejection; bound must be nonzero.
  std::uint64_t uniform(std::uint64_t bound);
  /// Bernoulli trial with probability p in [0, 1].
  bool chance(double p);
};

/// Operating-system entropy (OpenSSL RAND_bytes).
class SystemRng final : public Rng {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

/// Deterministic ChaCha20 keystream keyed by SHA-256(label || seed).
/// Two instances built from the same (seed, label) produce identical streams.
class SeededRng final : public Rng {
 public:
  explicit SeededRng(std::uint64_t seed, std::string_view label = "ibrs");
  ~SeededRng() override;
  SeededRng(const SeededRng&) = delete;
  SeededRng& operator=(const SeededRng&) = delete;

  void fill(std::span<std::uint8_t> out) override;

  /// Independent child stream; does not advance this generator.
  SeededRng fork(std::string_view label) const;

 private:
  SeededRng(const std::array<std::uint8_t, 32>& key);

  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::array<std::uint8_t, 32> key_{};

 public:
  SeededRng(SeededRng&&) noexcept;
  SeededRng& operator=(SeededRng&&) noexcept;
};

}  // namespace ibrs
