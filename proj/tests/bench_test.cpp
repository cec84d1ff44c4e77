#include <gtest/gtest.h>

#include "ibrs/bench.hpp"

namespace ibrs::bench {
namespace {

const CurveProfile& mnt159() { return find_profile("mnt159"); }

std::size_t col(const Table& t, std::string_view name) {
  for (std::size_t i = 0; i < t.header.size(); ++i)
    if (t.header[i] == name) return i;
  ADD_FAILURE() << "no column " << name;
  return 0;
}

TEST(Stats, MatchesHandComputedValues) {
  // mean 5, squared deviations 9+1+1+9 = 20, sample variance 20/3
  const double xs[] = {2, 4, 6, 8};
  const Stats s = summarize(xs);
  EXPECT_EQ(s.trials, 4u);
  EXPECT_DOUBLE_EQ(s.mean_ms, 5.0);
  EXPECT_NEAR(s.stddev_ms, std::sqrt(20.0 / 3.0), 1e-12);
  EXPECT_EQ(s.min_ms, 2.0);
  EXPECT_EQ(s.max_ms, 8.0);
  const double one[] = {3};
  EXPECT_EQ(summarize(one).stddev_ms, 0.0);
}

TEST(Stats, MeasureRunsWarmupThenTrials) {
  int calls = 0;
  const Stats s = measure([&] { ++calls; }, 7, 3);
  EXPECT_EQ(calls, 10);
  EXPECT_EQ(s.trials, 7u);
  EXPECT_GE(s.min_ms, 0.0);
}

TEST(Table, CsvAndGnuplotLayout) {
  Table t{{"mode", "eta", "ms"}, {}};
  t.add({"single", "1", "2.0"});
  t.add({"batch", "1", "1.0"});
  t.add({"single", "10", "20.0"});
  EXPECT_EQ(t.to_csv(), "mode,eta,ms\nsingle,1,2.0\nbatch,1,1.0\nsingle,10,20.0\n");
  EXPECT_EQ(t.to_gnuplot("mode"),
            "# mode=single\n# mode eta ms\nsingle 1 2.0\nsingle 10 20.0\n\n\n"
            "# mode=batch\n# mode eta ms\nbatch 1 1.0\n");
}

TEST(Sizes, ReferenceProfileGivesThirtyAndNinety) {
  Options o;
  o.profile = &mnt159();
  o.max_ring_size = 4;
  const Table t = run_sizes(o);
  ASSERT_EQ(t.rows.size(), 3u);
  const auto& r = t.rows[0];
  EXPECT_EQ(r[col(t, "ring_size")], "2");
  EXPECT_EQ(r[col(t, "pseudonym")], "30");
  EXPECT_EQ(r[col(t, "signature_g1_elements")], "3");
  EXPECT_EQ(r[col(t, "signature_elements")], "90");
  EXPECT_EQ(r[col(t, "measured_frame")], "");
}

TEST(Sizes, MeasuredFrameMatchesModel) {
  Options o;
  o.max_ring_size = 6;
  o.message_bytes = 17;
  const Table t = run_sizes(o);
  for (const auto& r : t.rows) {
    EXPECT_EQ(r[col(t, "measured_frame")], r[col(t, "envelope_frame")]);
    EXPECT_EQ(std::stoul(r[col(t, "signature_elements")]),
              std::stoul(r[col(t, "signature_g1_elements")]) * std::stoul(r[col(t, "pseudonym")]));
  }
  EXPECT_EQ(t.rows[0][col(t, "signature_elements")], "144");
}

TEST(BatchCurve, PairingCountsAndBothModes) {
  Options o;
  o.trials = 2;
  o.warmup = 0;
  o.etas = {1, 5, 12};
  const Table t = run_batch_curve(o);
  ASSERT_EQ(t.rows.size(), 6u);
  for (const auto& r : t.rows) {
    const auto eta = std::stoul(r[col(t, "eta")]);
    const auto pairings = std::stoul(r[col(t, "pairings")]);
    EXPECT_EQ(pairings, r[col(t, "mode")] == "batch" ? 2u : 2u * eta);
    EXPECT_EQ(r[col(t, "trials")], "2");
  }
}

TEST(VerifyVsRingsize, TwoPairingsAtEverySize) {
  Options o;
  o.trials = 2;
  o.warmup = 0;
  o.max_ring_size = 5;
  const Table t = run_verify_vs_ringsize(o);
  ASSERT_EQ(t.rows.size(), 4u);
  for (const auto& r : t.rows) EXPECT_EQ(r[col(t, "verify_pairings")], "2");
}

TEST(Ops, CoversCostSymbolsAndRejectsSizeOnlyProfile) {
  Options o;
  o.trials = 2;
  o.warmup = 0;
  const Table t = run_ops(o);
  std::vector<std::string> ops;
  for (const auto& r : t.rows) ops.push_back(r[col(t, "op")]);
  for (const char* want : {"pairing", "gt_pow", "g1_mul", "hash_to_g1", "sign_n2", "verify_n2"})
    EXPECT_NE(std::find(ops.begin(), ops.end(), want), ops.end()) << want;

  o.profile = &mnt159();
  try {
    run_ops(o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProfileNotOperational);
  }
}

TEST(Machine, DescriptorIsFilled) {
  const auto m = machine_info();
  EXPECT_FALSE(m.cpu.empty());
  EXPECT_FALSE(m.compiler.empty());
  EXPECT_EQ(m.lines().size(), 5u);
}

}  // namespace
}  // namespace ibrs::bench
