#pragma once

// Deterministic discrete-event simulator over a lossy broadcast medium.
// One TRC, a set of RSUs, a set of vehicles and an LEA are driven by a
// scripted schedule; every delivery and adversary action is logged.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ibrs/scheme.hpp"

namespace ibrs::sim {

enum class EventKind : std::uint8_t {
  kEnter,           // vehicle moves into an RSU region and runs acquisition
  kBroadcast,       // honest V2V beacon
  kRevoke,          // TRC revokes a vehicle
  kReplay,          // adversary re-sends a captured envelope
  kForge,           // adversary sends a random or tampered envelope
  kInvalidPubkey,   // adversary advertises a malformed pseudonym inside an envelope
  kRevokedRequest,  // a revoked vehicle asks an RSU for a ring list
  kStale,           // vehicle signs with a timestamp outside the window
  kTrace,           // LEA traces a captured envelope
};

std::string_view to_string(EventKind k) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view s) noexcept;

struct ScheduledEvent {
  std::uint64_t at_ms = 0;  // relative to scenario start
  EventKind kind = EventKind::kBroadcast;
  std::optional<std::size_t> vehicle;
  std::optional<std::size_t> rsu;
  std::string id;       // label for broadcasts, referenced by replay/trace/forge
  std::string ref;      // broadcast label referenced by replay/trace/forge(tamper)
  std::string message;  // broadcast payload
  std::optional<std::size_t> ring_size;
  std::uint64_t age_s = 0;  // stale: how far back the timestamp lies
};

struct Scenario {
  std::uint64_t seed = 1;
  std::size_t rsus = 1;
  std::size_t vehicles = 2;
  Timestamp start_time = 1'700'000'000;
  Timestamp freshness_window = 5;
  Timestamp prl_period = 60;
  Timestamp ring_ttl = 300;
  std::size_t ring_floor = 32;
  std::size_t ring_size = 2;
  double loss_probability = 0.0;
  std::uint64_t latency_ms = 10;
  std::uint64_t batch_interval_ms = 0;  // 0: verify each envelope on arrival
  std::vector<ScheduledEvent> events;

  /// Throws kInvalidArgument on unknown entities, dangling references or
  /// out-of-range parameters.
  void validate() const;

  static Scenario from_json(std::string_view text);
  static Scenario load(const std::string& path);
  std::string to_json() const;
};

struct LogRecord {
  std::uint64_t seq = 0;
  std::uint64_t t_ms = 0;
  std::string entity;  // "trc", "rsu:1", "veh:4", "lea", "adv"
  std::string kind;    // e.g. "deliver", "acquire", "broadcast", "trace"
  std::string outcome; // accept, reject, ok, error, lost, skipped
  std::string reason;
  std::string ref;      // broadcast label when applicable
  std::uint64_t bytes = 0;
  std::string digest;  // first 8 bytes of SHA-256 over the frame, hex
  std::uint64_t pairings = 0;
  bool adversarial = false;  // traffic that honest entities must reject
};

struct Summary {
  std::uint64_t honest_accepts = 0;
  std::uint64_t honest_rejects = 0;  // false rejects of honest traffic
  std::uint64_t adversarial_accepts = 0;  // false accepts
  std::uint64_t adversarial_rejects = 0;
  std::uint64_t lost = 0;
  std::uint64_t traces_ok = 0;
  std::uint64_t traces_failed = 0;
  std::uint64_t pairings = 0;
  std::uint64_t bytes = 0;
};

class EventLog {
 public:
  void append(LogRecord r);
  const std::vector<LogRecord>& records() const noexcept { return records_; }
  bool empty() const noexcept { return records_.empty(); }

  /// One JSON object per line with sorted keys.
  std::string to_jsonl() const;
  /// SHA-256 of the JSONL text, hex.
  std::string hash() const;
  Summary summary() const;
  /// kind,outcome,reason,count rows followed by the totals.
  std::string summary_csv() const;

 private:
  std::vector<LogRecord> records_;
};

EventLog run_scenario(const Scenario& s);

}  // namespace ibrs::sim
