#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ibrs/pairing.hpp"
#include "ibrs/rng.hpp"

namespace ibrs {
namespace {

// Reference encodings produced by tests/oracles/pairing_vectors.py (py_ecc).
constexpr const char* kGeneratorG1 =
    "97f1d3a73197d7942695638c4fa9ac0fc3688c4f9774b905a14e3a3f171bac586c55e83ff97a1aeffb3af00adb22c6bb";
constexpr const char* kSevenG1 =
    "b928f3beb93519eecf0145da903b40a4c97dca00b21f12ac0df3be9116ef2ef27b2ae6bcd4c5bc2d54ef5a70627efcb7";
constexpr const char* kSevenG2 =
    "8d0273f6bf31ed37c3b8d68083ec3d8e20b5f2cc170fa24b9b5be35b34ed013f9a921f1cad1644d4bdb14674247234c8"
    "049cd1dbb2d2c3581e54c088135fef36505a6823d61b859437bfc79b617030dc8b40e32bad1fa85b9c0f368af6d38d3c";
constexpr const char* kOffCurveG1 =
    "800000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000001";
constexpr const char* kOffSubgroupG1 =
    "800000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000004";

struct HashVector {
  const char* msg;
  const char* h1;
  const char* h2;
  const char* scalar;
};

constexpr HashVector kHashVectors[] = {
    {"",
     "b6149fd3e327718984863b120cf12df7b23b8849a27157271c84a8522addf1bfa7df225cb7577f9565b16f078802b1de",
     "a940b21cd0b0f009a2daf959c521836873b621e0cd5c9b940939d81b5175006edf30287fefc0731598106eb4ad3ce1d3"
     "120bedaad43cd26c58b4ac76a9fa8e0fd127083f5b76698681bc75401db4352a6628b0081fe941e96c8d9fde6a5a3008",
     "3747b4ca15577be02c1953f0fdb245a31b8aa55387843428f20f00b13b4f6de1"},
    {"abc",
     "b994d6ca62397a69b2ccf039bfe394e8900172e6beadbb7a4d375a19973111a79b4fe2aeee96429e261399d4ae9a877c",
     "b5c4f039c37bc5f7a25b0d058d945baf00d04e364ac23448efb1d89e65d844bbc6cd4d30886621f6a5eebc240eb84c28"
     "0894442c7a66bdcf71042cad474d0a39772d3606a27bc71d9aee1a8ffb47061bfa4eaa85ebb02994e6dfe391f2f19abb",
     "44b9a92f23c05183949381293428c3613b0ed28b3ae183a31d794ca14b265d40"},
    {"vehicle-0001",
     "b4352181e4497d6abd0209d9ed439a11063d7b8c9a5aae93d2451f12bf3d6ceeebdab71db3e6486fa961a4a6e8d92815",
     "99365fc576b3d728834b5c63c3e44a84586f2e81f1d24bf2006816728774974e11f07bd7b2cff11c143c0ef0f773cbb2"
     "13573cd25fba406c21b41771743d3c7f34f233eac1199e010341414ba1a29a577e5990ada1a066e3d7497afbb932a6d4",
     "3b893a78f0a2893beda770ecc1b5f83be0d0d8413f2d7808e36f35f9284767e0"},
};

ErrorCode decode_error_g1(ByteView bytes) {
  try {
    G1::from_bytes(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode unexpectedly succeeded";
  return ErrorCode::kInvalidArgument;
}

Gt naive_pow(const Gt& base, unsigned e) {
  Gt acc;
  for (unsigned i = 0; i < e; ++i) acc = acc * base;
  return acc;
}

TEST(Pairing, SmallScalarBilinearity) {
  const G1 p = G1::generator();
  const G2 q = G2::generator();
  const Gt g = pair(p, q);
  EXPECT_EQ(pair(p * Scalar::from_u64(2), q * Scalar::from_u64(3)), naive_pow(g, 6));
  EXPECT_EQ(pair(p * Scalar::from_u64(5), q), naive_pow(g, 5));
}

TEST(Pairing, DegenerateScalarGivesIdentity) {
  const Gt r = pair(G1::generator() * Scalar::from_u64(0), G2::generator());
  EXPECT_TRUE(r.is_one());
  EXPECT_TRUE(pair(G1::generator(), G2::identity()).is_one());
}

TEST(Pairing, NonDegenerate) { EXPECT_FALSE(pair(G1::generator(), G2::generator()).is_one()); }

TEST(Pairing, BilinearityRandomScalars) {
  SeededRng rng(1, "bilinear");
  const Gt g = pair(G1::generator(), G2::generator());
  for (int i = 0; i < 100; ++i) {
    const Scalar a = Scalar::random(rng);
    const Scalar b = Scalar::random(rng);
    ASSERT_EQ(pair(G1::generator() * a, G2::generator() * b), g.pow(a * b)) << "case " << i;
  }
}

TEST(Pairing, GtPowMatchesRepeatedMultiplication) {
  const Gt g = pair(G1::generator(), G2::generator());
  for (unsigned e : {0u, 1u, 2u, 15u, 16u, 17u, 255u, 256u, 1000u})
    EXPECT_EQ(g.pow(Scalar::from_u64(e)), naive_pow(g, e)) << e;
  // g^(q-1) * g == 1
  EXPECT_TRUE((g.pow(-Scalar::from_u64(1)) * g).is_one());
  EXPECT_TRUE((g * g.inverse()).is_one());
}

TEST(Pairing, CounterTracksEvaluations) {
  PairingCounter c;
  (void)pair(G1::generator(), G2::generator());
  (void)pair(G1::identity(), G2::generator());
  EXPECT_EQ(c.count(), 2u);
}

TEST(Pairing, KnownEncodings) {
  EXPECT_EQ(to_hex(G1::generator().to_bytes()), kGeneratorG1);
  EXPECT_EQ(to_hex((G1::generator() * Scalar::from_u64(7)).to_bytes()), kSevenG1);
  EXPECT_EQ(to_hex((G2::generator() * Scalar::from_u64(7)).to_bytes()), kSevenG2);
}

TEST(Hash, MatchesReferenceVectors) {
  for (const auto& v : kHashVectors) {
    SCOPED_TRACE(v.msg);
    EXPECT_EQ(to_hex(hash_to_g1(as_bytes(v.msg)).to_bytes()), v.h1);
    EXPECT_EQ(to_hex(hash_to_g2(as_bytes(v.msg)).to_bytes()), v.h2);
    EXPECT_EQ(to_hex(hash_to_scalar(as_bytes(v.msg)).to_bytes()), v.scalar);
  }
}

TEST(Hash, DeterministicAndDistinct) {
  EXPECT_EQ(hash_to_g1(as_bytes("x")), hash_to_g1(as_bytes("x")));
  EXPECT_NE(hash_to_g1(as_bytes("a")), hash_to_g1(as_bytes("b")));
  EXPECT_EQ(hash_to_g2(as_bytes("x")), hash_to_g2(as_bytes("x")));
  EXPECT_NE(hash_to_g2(as_bytes("a")), hash_to_g2(as_bytes("b")));
  EXPECT_EQ(hash_to_scalar(as_bytes("x")), hash_to_scalar(as_bytes("x")));
  EXPECT_NE(hash_to_scalar(as_bytes("a")), hash_to_scalar(as_bytes("b")));
}

TEST(Hash, OutputsHavePrimeOrder) {
  const Scalar q_minus_one = -Scalar::from_u64(1);
  for (const char* m : {"a", "b", "vehicle-17", "rsu-3"}) {
    const G1 h1 = hash_to_g1(as_bytes(m));
    const G2 h2 = hash_to_g2(as_bytes(m));
    EXPECT_TRUE((h1 * q_minus_one + h1).is_identity());
    EXPECT_TRUE((h2 * q_minus_one + h2).is_identity());
    EXPECT_FALSE(h1.is_identity());
    EXPECT_TRUE(h1.in_subgroup());
  }
}

TEST(Hash, ScalarRangeAndUniformity) {
  // q's leading 64 bits; bucket = floor(16 * v / q) approximated on the top word
  const double q_top = 0x73eda753299d7d48p0;
  std::array<int, 16> buckets{};
  const Scalar zero;
  for (std::uint32_t i = 0; i < 10000; ++i) {
    const Bytes in = ByteWriter().u32(i).take();
    const Scalar s = hash_to_scalar(in);
    ASSERT_FALSE(s == zero);
    const Bytes b = s.to_bytes();
    ASSERT_NO_THROW(Scalar::from_bytes(b));  // canonical => < q
    std::uint64_t top = 0;
    for (int k = 0; k < 8; ++k) top = (top << 8) | b[static_cast<std::size_t>(k)];
    const auto idx = static_cast<std::size_t>(std::min(15.0, std::floor(16.0 * static_cast<double>(top) / q_top)));
    ++buckets[idx];
  }
  double chi2 = 0;
  for (int c : buckets) chi2 += (c - 625.0) * (c - 625.0) / 625.0;
  // chi-square, 15 degrees of freedom, p = 0.001
  EXPECT_LT(chi2, 37.70);
}

TEST(Serialize, RoundtripAndLengths) {
  SeededRng rng(2, "serialize");
  const CurveProfile& prof = default_profile();
  for (int i = 0; i < 20; ++i) {
    const G1 a = G1::random(rng);
    const G2 b = G2::random(rng);
    const Gt c = pair(a, b);
    const Scalar s = Scalar::random(rng);
    ASSERT_EQ(a.to_bytes().size(), prof.g1_len);
    ASSERT_EQ(b.to_bytes().size(), prof.g2_len);
    ASSERT_EQ(c.to_bytes().size(), prof.gt_len);
    ASSERT_EQ(s.to_bytes().size(), prof.scalar_len);
    EXPECT_EQ(G1::from_bytes(a.to_bytes()), a);
    EXPECT_EQ(G2::from_bytes(b.to_bytes()), b);
    EXPECT_EQ(Gt::from_bytes(c.to_bytes()), c);
    EXPECT_EQ(Scalar::from_bytes(s.to_bytes()), s);
  }
  EXPECT_EQ(G1::from_bytes(G1::identity().to_bytes()), G1::identity());
}

TEST(Serialize, DistinctErrorCodes) {
  EXPECT_EQ(decode_error_g1(Bytes(47, 0)), ErrorCode::kWrongLength);
  EXPECT_EQ(decode_error_g1(Bytes(48, 0)), ErrorCode::kBadEncoding);
  EXPECT_EQ(decode_error_g1(from_hex(kOffCurveG1)), ErrorCode::kOffCurve);
  EXPECT_EQ(decode_error_g1(from_hex(kOffSubgroupG1)), ErrorCode::kOffSubgroup);
  EXPECT_THROW(G2::from_bytes(Bytes(96, 0)), Error);
  EXPECT_THROW(Gt::from_bytes(Bytes(576, 0)), Error);
  EXPECT_THROW(Gt::from_bytes(Bytes(575, 0)), Error);
  EXPECT_THROW(Scalar::from_bytes(Bytes(32, 0xff)), Error);
}

TEST(Serialize, GtRejectsElementsOutsideSubgroup) {
  SeededRng rng(3, "gt");
  Bytes b = pair(G1::generator(), G2::generator()).to_bytes();
  b[b.size() - 1] ^= 0x01;
  EXPECT_THROW(Gt::from_bytes(b), Error);
}

// Every accepted mutated encoding re-serializes to itself and is a subgroup member.
TEST(Serialize, AcceptedEncodingsAreCanonical) {
  SeededRng rng(4, "canonical");
  int accepted = 0;
  for (int i = 0; i < 2000; ++i) {
    Bytes b = G1::random(rng).to_bytes();
    const auto bit = rng.uniform(b.size() * 8);
    b[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    try {
      const G1 x = G1::from_bytes(b);
      ++accepted;
      EXPECT_EQ(x.to_bytes(), b);
      EXPECT_TRUE(x.in_subgroup());
    } catch (const Error&) {
    }
  }
  // a single bit flip lands on another subgroup point only when it hits the sign flag
  EXPECT_GT(accepted, 0);
}

TEST(Scalar, ArithmeticAndSampling) {
  SeededRng rng(5, "scalar");
  for (int i = 0; i < 100; ++i) {
    const Scalar a = Scalar::random(rng);
    ASSERT_FALSE(a.is_zero());
    EXPECT_EQ(a * a.inverse(), Scalar::from_u64(1));
    EXPECT_EQ(a + (-a), Scalar());
    EXPECT_EQ((a - a), Scalar());
    const Scalar d = Scalar::random_bits(rng, 64);
    const Bytes db = d.to_bytes();
    EXPECT_TRUE(std::all_of(db.begin(), db.begin() + 24, [](std::uint8_t x) { return x == 0; }));
  }
  EXPECT_THROW(Scalar().inverse(), Error);
  EXPECT_THROW(Scalar::random_bits(rng, 0), Error);
}

TEST(Kdf, DeterministicLabelledAndSized) {
  const Gt g = pair(G1::generator(), G2::generator());
  EXPECT_EQ(kdf(g, 32, "a"), kdf(g, 32, "a"));
  EXPECT_NE(kdf(g, 32, "a"), kdf(g, 32, "b"));
  EXPECT_EQ(kdf(g, 48, "a").size(), 48u);
  EXPECT_NE(kdf(g, 32, "a"), kdf(g * g, 32, "a"));
}

TEST(Profiles, RegistryLookup) {
  EXPECT_EQ(find_profile("bls12-381").g1_len, 48u);
  EXPECT_TRUE(find_profile("bls12-381").operational);
  EXPECT_EQ(find_profile("mnt159").g1_len, 30u);
  EXPECT_FALSE(find_profile("mnt159").operational);
  EXPECT_GE(default_profile().security_bits, 100);
  EXPECT_THROW(find_profile("ss512"), Error);
}

TEST(Rng, SeededStreamsReproduce) {
  SeededRng a(9), b(9), c(10);
  EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(a.next_u64(), c.next_u64());
  SeededRng f1 = a.fork("x"), f2 = b.fork("x");
  EXPECT_EQ(f1.next_u64(), f2.next_u64());
}

}  // namespace
}  // namespace ibrs

namespace ibrs {
namespace {

TEST(MultiMul, MatchesNaiveSum) {
  SeededRng rng(314, "msm");
  for (std::size_t n : {0u, 1u, 2u, 3u, 17u, 100u}) {
    std::vector<G1> pts;
    std::vector<Scalar> ks;
    G1 naive;
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back(G1::random(rng));
      ks.push_back(Scalar::random(rng));
      naive += pts.back() * ks.back();
    }
    if (n > 2) {
      pts[1] = G1::identity();  // identities and zero scalars are skipped
      naive = G1();
      ks[2] = Scalar();
      for (std::size_t i = 0; i < n; ++i) naive += pts[i] * ks[i];
    }
    EXPECT_EQ(multi_mul(pts, ks), naive) << "n=" << n;
  }
  std::vector<G1> pts{G1::random(rng), G1::random(rng)};
  std::vector<Scalar> small{Scalar::random_bits(rng, 64), Scalar::random_bits(rng, 64)};
  EXPECT_EQ(multi_mul(pts, small, 64), pts[0] * small[0] + pts[1] * small[1]);
  EXPECT_THROW(multi_mul(pts, std::vector<Scalar>{Scalar::from_u64(1)}), Error);
  PairingCounter pc;
  (void)multi_mul(pts, small);
  EXPECT_EQ(pc.count(), 0u);
}

}  // namespace
}  // namespace ibrs
