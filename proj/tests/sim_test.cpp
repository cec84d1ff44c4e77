#include <gtest/gtest.h>

#include <algorithm>

#include "ibrs/sim.hpp"

namespace ibrs::sim {
namespace {

std::string scenario_path(const std::string& name) { return std::string(IBRS_SCENARIO_DIR) + "/" + name; }

std::size_t count(const EventLog& log, std::string_view kind, std::string_view outcome, std::string_view reason = {}) {
  return static_cast<std::size_t>(std::count_if(log.records().begin(), log.records().end(), [&](const LogRecord& r) {
    return r.kind == kind && r.outcome == outcome && (reason.empty() || r.reason == reason);
  }));
}

TEST(Scenario, EmptyScheduleGivesEmptyLog) {
  Scenario s;
  s.vehicles = 3;
  EXPECT_TRUE(run_scenario(s).empty());
}

TEST(Scenario, JsonRoundTrip) {
  const Scenario s = Scenario::load(scenario_path("adversaries.json"));
  const Scenario again = Scenario::from_json(s.to_json());
  EXPECT_EQ(again.to_json(), s.to_json());
  EXPECT_EQ(again.events.size(), s.events.size());
}

TEST(Scenario, ValidationRejectsBadReferences) {
  const auto expect_invalid = [](std::string_view text) {
    try {
      Scenario::from_json(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument) << text;
    }
  };
  expect_invalid(R"({"vehicles": 2, "events": [{"kind": "enter", "vehicle": 2, "rsu": 0}]})");
  expect_invalid(R"({"rsus": 1, "events": [{"kind": "enter", "vehicle": 0, "rsu": 3}]})");
  expect_invalid(R"({"events": [{"kind": "replay", "ref": "nope"}]})");
  expect_invalid(R"({"events": [{"kind": "teleport"}]})");
  expect_invalid(R"({"events": [{"kind": "broadcast", "vehicle": 0}]})");
  expect_invalid(R"({"events": [{"at_ms": 5, "kind": "revoke", "vehicle": 0}, {"at_ms": 1, "kind": "revoke", "vehicle": 0}]})");
  expect_invalid(R"({"loss_probability": 1.5})");
  expect_invalid(R"({"ring_size": 1})");
  expect_invalid("not json");
  // a reference must point at an earlier broadcast
  expect_invalid(R"({"events": [{"kind": "trace", "ref": "b"}, {"kind": "broadcast", "vehicle": 0, "id": "b"}]})");
}

TEST(Simulator, SameSeedSameLog) {
  const Scenario s = Scenario::load(scenario_path("adversaries.json"));
  const EventLog a = run_scenario(s);
  const EventLog b = run_scenario(s);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a.to_jsonl(), b.to_jsonl());
  EXPECT_EQ(a.hash(), b.hash());

  Scenario other = s;
  other.seed += 1;
  EXPECT_NE(run_scenario(other).hash(), a.hash());
}

TEST(Simulator, HappyPathAllAccepted) {
  const Scenario s = Scenario::load(scenario_path("happy_path.json"));
  ASSERT_EQ(s.vehicles, 10u);
  const EventLog log = run_scenario(s);
  const Summary sum = log.summary();
  EXPECT_EQ(count(log, "ring_accept", "ok"), 10u);
  EXPECT_EQ(count(log, "broadcast", "ok"), 10u);
  // every broadcast reaches the 9 other vehicles
  EXPECT_EQ(sum.honest_accepts, 10u + 10u * 9u);
  EXPECT_EQ(sum.honest_rejects, 0u);
  EXPECT_EQ(sum.adversarial_accepts, 0u);
  EXPECT_EQ(sum.traces_ok, 4u);
  EXPECT_EQ(sum.traces_failed, 0u);
  for (const auto& r : log.records())
    if (r.kind == "receive") {
      EXPECT_EQ(r.pairings, 2u);
    }
}

TEST(Simulator, AdversariesAllRejected) {
  const EventLog log = run_scenario(Scenario::load(scenario_path("adversaries.json")));
  const Summary sum = log.summary();
  EXPECT_EQ(sum.adversarial_accepts, 0u);
  EXPECT_EQ(sum.honest_rejects, 0u);
  EXPECT_GT(sum.adversarial_rejects, 0u);
  EXPECT_EQ(sum.traces_ok, 2u);

  // 12 vehicles: the sender's own echo plus 11 receivers reject the replay
  EXPECT_EQ(count(log, "receive", "reject", "replay"), 12u);
  // the late replay of b1 is stale everywhere
  EXPECT_EQ(count(log, "receive", "reject", "stale"), 11u + 12u);
  EXPECT_EQ(count(log, "receive", "reject", "equation"), 2u * 12u);
  EXPECT_EQ(count(log, "ring_request", "reject", "pseudonym revoked"), 1u);

  for (const auto& r : log.records()) {
    if (r.kind != "receive") continue;
    if (r.reason == "stale" || r.reason == "replay") {
      EXPECT_EQ(r.pairings, 0u);
    }
    if (r.ref == "bad-key") {
      EXPECT_EQ(r.reason.rfind("structure:", 0), 0u) << r.reason;
    }
  }
  // traffic after the malformed key advertisement is unaffected
  for (const auto& r : log.records())
    if (r.kind == "receive" && (r.ref == "b1" || r.ref == "b3") && !r.adversarial) {
      EXPECT_EQ(r.outcome, "accept");
    }
}

TEST(Simulator, BatchModeWithFallback) {
  const EventLog log = run_scenario(Scenario::load(scenario_path("batch.json")));
  const Summary sum = log.summary();
  EXPECT_EQ(sum.adversarial_accepts, 0u);
  EXPECT_EQ(sum.honest_rejects, 0u);
  EXPECT_EQ(sum.honest_accepts, 8u + 16u * 7u);
  EXPECT_EQ(sum.adversarial_rejects, 8u);
  EXPECT_GT(count(log, "batch_verify", "failed"), 0u);
  EXPECT_GT(count(log, "batch_verify", "ok"), 0u);
  for (const auto& r : log.records())
    if (r.kind == "batch_verify") {
      EXPECT_EQ(r.pairings, 2u);
    }
}

TEST(Simulator, LossyLinksDropButNeverFalselyAccept) {
  const Scenario s = Scenario::load(scenario_path("lossy.json"));
  const EventLog log = run_scenario(s);
  const Summary sum = log.summary();
  EXPECT_GT(sum.lost, 0u);
  EXPECT_EQ(sum.adversarial_accepts, 0u);
  EXPECT_EQ(sum.honest_rejects, 0u);
  EXPECT_EQ(run_scenario(s).hash(), log.hash());

  Scenario lossless = s;
  lossless.loss_probability = 0.0;
  EXPECT_EQ(run_scenario(lossless).summary().lost, 0u);
}

TEST(EventLog, JsonlIsCanonicalAndCsvHasTotals) {
  Scenario s = Scenario::load(scenario_path("happy_path.json"));
  s.events.resize(12);
  const EventLog log = run_scenario(s);
  const std::string text = log.to_jsonl();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(log.records().size()));
  EXPECT_EQ(text.substr(0, 14), R"({"adversarial")");
  const std::string csv = log.summary_csv();
  EXPECT_EQ(csv.rfind("kind,outcome,reason,adversarial,count\n", 0), 0u);
  EXPECT_NE(csv.find("total,adversarial_accepts,,1,0"), std::string::npos);
  EXPECT_EQ(log.hash().size(), 64u);
}

}  // namespace
}  // namespace ibrs::sim
