#pragma once

// Type-3 pairing engine. Every curve-specific detail lives in pairing.cpp;
// the rest of the library sees only the opaque group types below.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "ibrs/bytes.hpp"
#include "ibrs/rng.hpp"

namespace ibrs {

/// Byte lengths and security claim of a curve. A profile that is not
/// operational only feeds the size model (bench sizes, size checks).
struct CurveProfile {
  std::string_view name;
  std::size_t g1_len;  // compressed G1
  std::size_t g2_len;  // compressed G2
  std::size_t gt_len;
  std::size_t scalar_len;
  int security_bits;
  bool operational;

  friend bool operator==(const CurveProfile& a, const CurveProfile& b) noexcept {
    return a.name == b.name;
  }
};

std::span<const CurveProfile> curve_profiles() noexcept;
const CurveProfile& default_profile() noexcept;
/// Throws kUnknownProfile.
const CurveProfile& find_profile(std::string_view name);

class Rng;

/// Integer modulo the group order q.
class Scalar {
 public:
  static constexpr std::size_t kSize = 32;

  Scalar() noexcept;

  static Scalar from_u64(std::uint64_t v) noexcept;
  /// Uniform in [1, q) by rejection sampling.
  static Scalar random(Rng& rng);
  /// Uniform in [1, 2^bits); bits in [1, 255].
  static Scalar random_bits(Rng& rng, unsigned bits);
  /// Canonical 32-byte big-endian form; rejects values >= q.
  static Scalar from_bytes(ByteView bytes);
  /// Any-length big-endian integer reduced mod q.
  static Scalar reduce(ByteView bytes) noexcept;

  Bytes to_bytes() const;
  bool is_zero() const noexcept;
  /// Throws kInvalidArgument for zero.
  Scalar inverse() const;

  Scalar operator+(const Scalar& o) const noexcept;
  Scalar operator-(const Scalar& o) const noexcept;
  Scalar operator*(const Scalar& o) const noexcept;
  Scalar operator-() const noexcept;
  friend bool operator==(const Scalar& a, const Scalar& b) noexcept;

  /// Little-endian canonical integer, as consumed by point multiplication.
  std::array<std::uint8_t, kSize> le_bytes() const noexcept;

 private:
  alignas(8) std::array<std::uint8_t, 32> fr_{};  // Montgomery form
  friend struct ScalarAccess;
};

class G1 {
 public:
  static constexpr std::size_t kSize = 48;

  /// Identity.
  G1() noexcept;
  static G1 identity() noexcept { return G1(); }
  static G1 generator() noexcept;
  static G1 random(Rng& rng);

  /// Validated decode: kWrongLength, kBadEncoding, kOffCurve, kOffSubgroup.
  static G1 from_bytes(ByteView bytes);
  /// Compressed canonical encoding.
  Bytes to_bytes() const;
  void write_to(std::span<std::uint8_t, kSize> out) const noexcept;

  bool is_identity() const noexcept;
  bool in_subgroup() const noexcept;

  G1 operator+(const G1& o) const noexcept;
  G1 operator-(const G1& o) const noexcept;
  G1 operator-() const noexcept;
  G1& operator+=(const G1& o) noexcept;
  G1& operator-=(const G1& o) noexcept;
  G1 operator*(const Scalar& k) const noexcept;
  /// Multiplication by a scalar known to be below 2^bits.
  G1 mul_bits(const Scalar& k, unsigned bits) const noexcept;
  friend bool operator==(const G1& a, const G1& b) noexcept;

 private:
  alignas(8) std::array<std::uint8_t, 144> p_{};
  friend struct PointAccess;
};

class G2 {
 public:
  static constexpr std::size_t kSize = 96;

  G2() noexcept;
  static G2 identity() noexcept { return G2(); }
  static G2 generator() noexcept;
  static G2 random(Rng& rng);

  static G2 from_bytes(ByteView bytes);
  Bytes to_bytes() const;

  bool is_identity() const noexcept;
  bool in_subgroup() const noexcept;

  G2 operator+(const G2& o) const noexcept;
  G2 operator-(const G2& o) const noexcept;
  G2 operator-() const noexcept;
  G2 operator*(const Scalar& k) const noexcept;
  friend bool operator==(const G2& a, const G2& b) noexcept;

 private:
  alignas(8) std::array<std::uint8_t, 288> p_{};
  friend struct PointAccess;
};

/// Element of the order-q target group, written multiplicatively.
class Gt {
 public:
  static constexpr std::size_t kSize = 576;

  /// Identity.
  Gt() noexcept;
  static Gt one() noexcept { return Gt(); }

  /// Twelve 48-byte big-endian base-field coefficients in tower order
  /// (c0.c0.c0, c0.c0.c1, c0.c1.c0, ..., c1.c2.c1). Decoding rejects
  /// non-canonical coefficients and elements outside the order-q subgroup.
  static Gt from_bytes(ByteView bytes);
  Bytes to_bytes() const;

  bool is_one() const noexcept;

  Gt operator*(const Gt& o) const noexcept;
  Gt pow(const Scalar& e) const noexcept;
  Gt inverse() const noexcept;
  friend bool operator==(const Gt& a, const Gt& b) noexcept;

 private:
  alignas(8) std::array<std::uint8_t, 576> f_{};
  friend struct GtAccess;
};

/// Optimal ate pairing e: G1 x G2 -> Gt. Identity in either slot yields one.
Gt pair(const G1& a, const G2& b);

/// sum_i scalars[i] * points[i] (Pippenger); variable time, for public inputs.
/// Scalars must be below 2^bits. Throws kInvalidArgument on a length mismatch.
G1 multi_mul(std::span<const G1> points, std::span<const Scalar> scalars, unsigned bits = 255);

/// Pairings evaluated on the calling thread since it started.
std::uint64_t pairing_count() noexcept;

/// Counts pairings evaluated on this thread during its lifetime.
class PairingCounter {
 public:
  PairingCounter() noexcept : start_(pairing_count()) {}
  std::uint64_t count() const noexcept { return pairing_count() - start_; }

 private:
  std::uint64_t start_;
};

// Hash functions with distinct domain-separation tags.
inline constexpr std::string_view kDstH1 = "IBRS-V01-CS01-with-BLS12381G1_XMD:SHA-256_SSWU_RO_H1_";
inline constexpr std::string_view kDstH2 = "IBRS-V01-CS01-with-BLS12381G2_XMD:SHA-256_SSWU_RO_H2_";
inline constexpr std::string_view kDstScalar = "IBRS-V01-CS01-with-BLS12381Fr_XMD:SHA-256_H_";

G1 hash_to_g1(ByteView data);
G2 hash_to_g2(ByteView data);
/// Nonzero scalar; a zero reduction is re-derived with a counter byte appended.
Scalar hash_to_scalar(ByteView data);

/// HKDF-SHA256 over the canonical Gt encoding, bound to `label`.
Bytes kdf(const Gt& secret, std::size_t out_len, std::string_view label);

namespace detail {
G1 hash_to_g1(ByteView data, std::string_view dst);
G2 hash_to_g2(ByteView data, std::string_view dst);
Bytes expand_message_xmd(ByteView data, std::string_view dst, std::size_t out_len);
}  // namespace detail

}  // namespace ibrs
