#include "ibrs/pairing.hpp"

#include <blst.h>
#include <blst_aux.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/kdf.h>

#include <algorithm>
#include <cstring>

#include "ibrs/error.hpp"

namespace ibrs {

static_assert(sizeof(blst_fr) == 32);
static_assert(sizeof(blst_p1) == 144);
static_assert(sizeof(blst_p2) == 288);
static_assert(sizeof(blst_fp12) == 576);

namespace {

// BLS12-381 is the operational curve. The reference profile keeps the
// 159-bit MNT curve's sizes: its G1 length is the measured compressed size
// of a pseudonym, G2/Gt are the field widths rounded up to bytes.
constexpr CurveProfile kProfiles[] = {
    {"bls12-381", 48, 96, 576, 32, 117, true},
    {"mnt159", 30, 60, 119, 20, 70, false},
};

thread_local std::uint64_t t_pairings = 0;

}  // namespace

std::span<const CurveProfile> curve_profiles() noexcept { return kProfiles; }
const CurveProfile& default_profile() noexcept { return kProfiles[0]; }

const CurveProfile& find_profile(std::string_view name) {
  for (const auto& p : kProfiles)
    if (p.name == name) return p;
  throw Error(ErrorCode::kUnknownProfile, "unknown curve profile: " + std::string(name));
}

struct ScalarAccess {
  static blst_fr& fr(Scalar& s) { return *reinterpret_cast<blst_fr*>(s.fr_.data()); }
  static const blst_fr& fr(const Scalar& s) { return *reinterpret_cast<const blst_fr*>(s.fr_.data()); }
};

struct PointAccess {
  static blst_p1& p(G1& g) { return *reinterpret_cast<blst_p1*>(g.p_.data()); }
  static const blst_p1& p(const G1& g) { return *reinterpret_cast<const blst_p1*>(g.p_.data()); }
  static blst_p2& p(G2& g) { return *reinterpret_cast<blst_p2*>(g.p_.data()); }
  static const blst_p2& p(const G2& g) { return *reinterpret_cast<const blst_p2*>(g.p_.data()); }
};

struct GtAccess {
  static blst_fp12& f(Gt& g) { return *reinterpret_cast<blst_fp12*>(g.f_.data()); }
  static const blst_fp12& f(const Gt& g) { return *reinterpret_cast<const blst_fp12*>(g.f_.data()); }
};

namespace {

using SA = ScalarAccess;
using PA = PointAccess;
using GA = GtAccess;

const byte* ptr(std::string_view s) { return reinterpret_cast<const byte*>(s.data()); }

Scalar scalar_from_blst(const blst_scalar& s) {
  Scalar out;
  blst_fr_from_scalar(&SA::fr(out), &s);
  return out;
}

blst_scalar to_blst_scalar(const Scalar& s) {
  blst_scalar out;
  blst_scalar_from_fr(&out, &SA::fr(s));
  return out;
}

ErrorCode map_blst_error(BLST_ERROR e) {
  switch (e) {
    case BLST_POINT_NOT_ON_CURVE: return ErrorCode::kOffCurve;
    case BLST_POINT_NOT_IN_GROUP: return ErrorCode::kOffSubgroup;
    default: return ErrorCode::kBadEncoding;
  }
}

void check_length(ByteView bytes, std::size_t expected, const char* what) {
  if (bytes.size() != expected)
    throw Error(ErrorCode::kWrongLength, std::string(what) + ": expected " + std::to_string(expected) +
                                             " bytes, got " + std::to_string(bytes.size()));
}

}  // namespace

// ---- Scalar ---------------------------------------------------------------

Scalar::Scalar() noexcept = default;

Scalar Scalar::from_u64(std::uint64_t v) noexcept {
  const std::uint64_t limbs[4] = {v, 0, 0, 0};
  Scalar out;
  blst_fr_from_uint64(&SA::fr(out), limbs);
  return out;
}

Scalar Scalar::random(Rng& rng) {
  for (;;) {
    std::array<std::uint8_t, 32> buf{};
    rng.fill(buf);
    buf[0] &= 0x7f;  // q < 2^255
    blst_scalar s;
    blst_scalar_from_bendian(&s, buf.data());
    if (!blst_scalar_fr_check(&s)) continue;
    Scalar out = scalar_from_blst(s);
    if (!out.is_zero()) return out;
  }
}

Scalar Scalar::random_bits(Rng& rng, unsigned bits) {
  if (bits == 0 || bits > 255) throw Error(ErrorCode::kInvalidArgument, "random_bits: bits out of range");
  for (;;) {
    std::array<std::uint8_t, 32> buf{};
    rng.fill(buf);
    const unsigned full = bits / 8;
    const unsigned partial = bits % 8;
    // keep the low `bits` bits of the big-endian buffer
    for (unsigned i = 0; i < 32; ++i) {
      const unsigned from_end = 31 - i;
      if (from_end < full) continue;
      if (from_end == full && partial != 0)
        buf[i] &= static_cast<std::uint8_t>((1u << partial) - 1);
      else
        buf[i] = 0;
    }
    blst_scalar s;
    blst_scalar_from_bendian(&s, buf.data());
    Scalar out = scalar_from_blst(s);
    if (!out.is_zero()) return out;
  }
}

Scalar Scalar::from_bytes(ByteView bytes) {
  check_length(bytes, kSize, "scalar");
  blst_scalar s;
  blst_scalar_from_bendian(&s, bytes.data());
  if (!blst_scalar_fr_check(&s)) throw Error(ErrorCode::kBadEncoding, "scalar not reduced mod q");
  return scalar_from_blst(s);
}

Scalar Scalar::reduce(ByteView bytes) noexcept {
  blst_scalar s;
  blst_scalar_from_be_bytes(&s, bytes.data(), bytes.size());
  return scalar_from_blst(s);
}

Bytes Scalar::to_bytes() const {
  const blst_scalar s = to_blst_scalar(*this);
  Bytes out(kSize);
  blst_bendian_from_scalar(out.data(), &s);
  return out;
}

std::array<std::uint8_t, Scalar::kSize> Scalar::le_bytes() const noexcept {
  const blst_scalar s = to_blst_scalar(*this);
  std::array<std::uint8_t, kSize> out{};
  std::memcpy(out.data(), s.b, kSize);
  return out;
}

bool Scalar::is_zero() const noexcept {
  return std::all_of(fr_.begin(), fr_.end(), [](std::uint8_t b) { return b == 0; });
}

Scalar Scalar::inverse() const {
  if (is_zero()) throw Error(ErrorCode::kInvalidArgument, "inverse of zero scalar");
  Scalar out;
  blst_fr_inverse(&SA::fr(out), &SA::fr(*this));
  return out;
}

Scalar Scalar::operator+(const Scalar& o) const noexcept {
  Scalar out;
  blst_fr_add(&SA::fr(out), &SA::fr(*this), &SA::fr(o));
  return out;
}

Scalar Scalar::operator-(const Scalar& o) const noexcept {
  Scalar out;
  blst_fr_sub(&SA::fr(out), &SA::fr(*this), &SA::fr(o));
  return out;
}

Scalar Scalar::operator*(const Scalar& o) const noexcept {
  Scalar out;
  blst_fr_mul(&SA::fr(out), &SA::fr(*this), &SA::fr(o));
  return out;
}

Scalar Scalar::operator-() const noexcept {
  Scalar out;
  blst_fr_cneg(&SA::fr(out), &SA::fr(*this), true);
  return out;
}

bool operator==(const Scalar& a, const Scalar& b) noexcept { return a.fr_ == b.fr_; }

// ---- G1 -------------------------------------------------------------------

G1::G1() noexcept = default;  // all-zero Jacobian coordinates encode infinity

G1 G1::generator() noexcept {
  G1 out;
  PA::p(out) = *blst_p1_generator();
  return out;
}

G1 G1::random(Rng& rng) { return generator() * Scalar::random(rng); }

G1 G1::from_bytes(ByteView bytes) {
  check_length(bytes, kSize, "G1 element");
  blst_p1_affine aff;
  if (auto err = blst_p1_uncompress(&aff, bytes.data()); err != BLST_SUCCESS)
    throw Error(map_blst_error(err), "G1 decode: " + std::string(to_string(map_blst_error(err))));
  if (!blst_p1_affine_in_g1(&aff)) throw Error(ErrorCode::kOffSubgroup, "G1 decode: not in subgroup");
  G1 out;
  blst_p1_from_affine(&PA::p(out), &aff);
  // reject non-canonical encodings (e.g. stray flag bits)
  std::array<std::uint8_t, kSize> again{};
  out.write_to(again);
  if (!std::equal(again.begin(), again.end(), bytes.begin()))
    throw Error(ErrorCode::kBadEncoding, "G1 decode: non-canonical encoding");
  return out;
}

void G1::write_to(std::span<std::uint8_t, kSize> out) const noexcept {
  blst_p1_compress(out.data(), &PA::p(*this));
}

Bytes G1::to_bytes() const {
  Bytes out(kSize);
  write_to(std::span<std::uint8_t, kSize>(out.data(), kSize));
  return out;
}

bool G1::is_identity() const noexcept { return blst_p1_is_inf(&PA::p(*this)); }
bool G1::in_subgroup() const noexcept { return blst_p1_in_g1(&PA::p(*this)); }

G1 G1::operator+(const G1& o) const noexcept {
  G1 out;
  blst_p1_add_or_double(&PA::p(out), &PA::p(*this), &PA::p(o));
  return out;
}

G1 G1::operator-() const noexcept {
  G1 out = *this;
  blst_p1_cneg(&PA::p(out), true);
  return out;
}

G1 G1::operator-(const G1& o) const noexcept { return *this + (-o); }
G1& G1::operator+=(const G1& o) noexcept { return *this = *this + o; }
G1& G1::operator-=(const G1& o) noexcept { return *this = *this - o; }

G1 G1::operator*(const Scalar& k) const noexcept { return mul_bits(k, 255); }

G1 G1::mul_bits(const Scalar& k, unsigned bits) const noexcept {
  const auto le = k.le_bytes();
  G1 out;
  blst_p1_mult(&PA::p(out), &PA::p(*this), le.data(), bits);
  return out;
}

bool operator==(const G1& a, const G1& b) noexcept { return blst_p1_is_equal(&PA::p(a), &PA::p(b)); }

// ---- G2 -------------------------------------------------------------------

G2::G2() noexcept = default;

G2 G2::generator() noexcept {
  G2 out;
  PA::p(out) = *blst_p2_generator();
  return out;
}

G2 G2::random(Rng& rng) { return generator() * Scalar::random(rng); }

G2 G2::from_bytes(ByteView bytes) {
  check_length(bytes, kSize, "G2 element");
  blst_p2_affine aff;
  if (auto err = blst_p2_uncompress(&aff, bytes.data()); err != BLST_SUCCESS)
    throw Error(map_blst_error(err), "G2 decode: " + std::string(to_string(map_blst_error(err))));
  if (!blst_p2_affine_in_g2(&aff)) throw Error(ErrorCode::kOffSubgroup, "G2 decode: not in subgroup");
  G2 out;
  blst_p2_from_affine(&PA::p(out), &aff);
  if (out.to_bytes() != Bytes(bytes.begin(), bytes.end()))
    throw Error(ErrorCode::kBadEncoding, "G2 decode: non-canonical encoding");
  return out;
}

Bytes G2::to_bytes() const {
  Bytes out(kSize);
  blst_p2_compress(out.data(), &PA::p(*this));
  return out;
}

bool G2::is_identity() const noexcept { return blst_p2_is_inf(&PA::p(*this)); }
bool G2::in_subgroup() const noexcept { return blst_p2_in_g2(&PA::p(*this)); }

G2 G2::operator+(const G2& o) const noexcept {
  G2 out;
  blst_p2_add_or_double(&PA::p(out), &PA::p(*this), &PA::p(o));
  return out;
}

G2 G2::operator-() const noexcept {
  G2 out = *this;
  blst_p2_cneg(&PA::p(out), true);
  return out;
}

G2 G2::operator-(const G2& o) const noexcept { return *this + (-o); }

G2 G2::operator*(const Scalar& k) const noexcept {
  const auto le = k.le_bytes();
  G2 out;
  blst_p2_mult(&PA::p(out), &PA::p(*this), le.data(), 255);
  return out;
}

bool operator==(const G2& a, const G2& b) noexcept { return blst_p2_is_equal(&PA::p(a), &PA::p(b)); }

// ---- Gt -------------------------------------------------------------------

Gt::Gt() noexcept { GA::f(*this) = *blst_fp12_one(); }

namespace {

template <typename Fn>
void for_each_fp(blst_fp12& f, Fn&& fn) {
  for (auto& fp6 : f.fp6)
    for (auto& fp2 : fp6.fp2)
      for (auto& fp : fp2.fp) fn(fp);
}

}  // namespace

Bytes Gt::to_bytes() const {
  Bytes out;
  out.reserve(kSize);
  blst_fp12 f = GA::f(*this);
  for_each_fp(f, [&](blst_fp& fp) {
    std::uint8_t buf[48];
    blst_bendian_from_fp(buf, &fp);
    out.insert(out.end(), buf, buf + 48);
  });
  return out;
}

Gt Gt::from_bytes(ByteView bytes) {
  check_length(bytes, kSize, "Gt element");
  Gt out;
  std::size_t offset = 0;
  for_each_fp(GA::f(out), [&](blst_fp& fp) {
    blst_fp_from_bendian(&fp, bytes.data() + offset);
    offset += 48;
  });
  if (out.to_bytes() != Bytes(bytes.begin(), bytes.end()))
    throw Error(ErrorCode::kBadEncoding, "Gt decode: coefficient not reduced");
  if (!blst_fp12_in_group(&GA::f(out))) throw Error(ErrorCode::kOffSubgroup, "Gt decode: not in subgroup");
  return out;
}

bool Gt::is_one() const noexcept { return blst_fp12_is_one(&GA::f(*this)); }

Gt Gt::operator*(const Gt& o) const noexcept {
  Gt out;
  blst_fp12_mul(&GA::f(out), &GA::f(*this), &GA::f(o));
  return out;
}

Gt Gt::inverse() const noexcept {
  // unitary elements: inverse is the conjugate
  Gt out = *this;
  blst_fp12_conjugate(&GA::f(out));
  return out;
}

Gt Gt::pow(const Scalar& e) const noexcept {
  // fixed 4-bit window, most significant nibble first
  std::array<blst_fp12, 16> table;
  table[0] = *blst_fp12_one();
  table[1] = GA::f(*this);
  for (std::size_t i = 2; i < table.size(); ++i) blst_fp12_mul(&table[i], &table[i - 1], &table[1]);

  const auto le = e.le_bytes();
  blst_fp12 acc = *blst_fp12_one();
  bool started = false;
  for (int byte = static_cast<int>(le.size()) - 1; byte >= 0; --byte) {
    for (int half = 1; half >= 0; --half) {
      const unsigned nib = (le[static_cast<std::size_t>(byte)] >> (4 * half)) & 0xf;
      if (started)
        for (int k = 0; k < 4; ++k) blst_fp12_cyclotomic_sqr(&acc, &acc);
      if (nib != 0) {
        blst_fp12_mul(&acc, &acc, &table[nib]);
        started = true;
      }
    }
  }
  Gt out;
  GA::f(out) = acc;
  return out;
}

bool operator==(const Gt& a, const Gt& b) noexcept { return blst_fp12_is_equal(&GA::f(a), &GA::f(b)); }

// ---- pairing and hashes -----------------------------------------------------

G1 multi_mul(std::span<const G1> points, std::span<const Scalar> scalars, unsigned bits) {
  if (points.size() != scalars.size()) throw Error(ErrorCode::kInvalidArgument, "multi_mul: length mismatch");
  std::vector<blst_p1> pts;
  std::vector<blst_scalar> ks;
  pts.reserve(points.size());
  ks.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].is_identity() || scalars[i].is_zero()) continue;
    pts.push_back(PA::p(points[i]));
    ks.push_back(to_blst_scalar(scalars[i]));
  }
  G1 out;
  if (pts.empty()) return out;
  if (pts.size() == 1) {
    blst_p1_mult(&PA::p(out), &pts[0], ks[0].b, bits);
    return out;
  }
  // single-pointer form: a null second entry marks a contiguous array
  std::vector<blst_p1_affine> affine(pts.size());
  const blst_p1* src[2] = {pts.data(), nullptr};
  blst_p1s_to_affine(affine.data(), src, pts.size());
  std::vector<limb_t> scratch(blst_p1s_mult_pippenger_scratch_sizeof(pts.size()) / sizeof(limb_t) + 1);
  const blst_p1_affine* aff[2] = {affine.data(), nullptr};
  // contiguous scalars are read with a stride of ceil(bits/8) bytes
  const std::size_t stride = (bits + 7) / 8;
  std::vector<byte> packed(ks.size() * stride);
  for (std::size_t i = 0; i < ks.size(); ++i) std::memcpy(&packed[i * stride], ks[i].b, stride);
  const byte* kb[2] = {packed.data(), nullptr};
  blst_p1s_mult_pippenger(&PA::p(out), aff, pts.size(), kb, bits, scratch.data());
  return out;
}

Gt pair(const G1& a, const G2& b) {
  ++t_pairings;
  Gt out;
  if (a.is_identity() || b.is_identity()) return out;
  blst_p1_affine pa;
  blst_p2_affine qa;
  blst_p1_to_affine(&pa, &PA::p(a));
  blst_p2_to_affine(&qa, &PA::p(b));
  blst_fp12 ml;
  blst_miller_loop(&ml, &qa, &pa);
  blst_final_exp(&GA::f(out), &ml);
  return out;
}

std::uint64_t pairing_count() noexcept { return t_pairings; }

namespace detail {

G1 hash_to_g1(ByteView data, std::string_view dst) {
  G1 out;
  blst_hash_to_g1(&PA::p(out), data.data(), data.size(), ptr(dst), dst.size(), nullptr, 0);
  return out;
}

G2 hash_to_g2(ByteView data, std::string_view dst) {
  G2 out;
  blst_hash_to_g2(&PA::p(out), data.data(), data.size(), ptr(dst), dst.size(), nullptr, 0);
  return out;
}

Bytes expand_message_xmd(ByteView data, std::string_view dst, std::size_t out_len) {
  Bytes out(out_len);
  blst_expand_message_xmd(out.data(), out_len, data.data(), data.size(), ptr(dst), dst.size());
  return out;
}

}  // namespace detail

G1 hash_to_g1(ByteView data) { return detail::hash_to_g1(data, kDstH1); }
G2 hash_to_g2(ByteView data) { return detail::hash_to_g2(data, kDstH2); }

Scalar hash_to_scalar(ByteView data) {
  // 48 uniform bytes reduced mod q: statistical distance below 2^-128
  Bytes input(data.begin(), data.end());
  for (std::uint8_t counter = 0;; ++counter) {
    Scalar s = Scalar::reduce(detail::expand_message_xmd(input, kDstScalar, 48));
    if (!s.is_zero()) return s;
    if (counter == 0) input.push_back(0);
    input.back() = static_cast<std::uint8_t>(counter + 1);
  }
}

Bytes kdf(const Gt& secret, std::size_t out_len, std::string_view label) {
  const Bytes ikm = secret.to_bytes();
  Bytes out(out_len);
  EVP_PKEY_CTX* ctx = EVP_PKEY_CTX_new_id(EVP_PKEY_HKDF, nullptr);
  const bool ok = ctx != nullptr && EVP_PKEY_derive_init(ctx) > 0 &&
                  EVP_PKEY_CTX_set_hkdf_md(ctx, EVP_sha256()) > 0 &&
                  EVP_PKEY_CTX_set1_hkdf_key(ctx, ikm.data(), static_cast<int>(ikm.size())) > 0 &&
                  EVP_PKEY_CTX_add1_hkdf_info(ctx, ptr(label), static_cast<int>(label.size())) > 0 &&
                  EVP_PKEY_derive(ctx, out.data(), &out_len) > 0;
  EVP_PKEY_CTX_free(ctx);
  if (!ok) throw Error(ErrorCode::kCryptoBackend, "HKDF derivation failed");
  return out;
}

}  // namespace ibrs
