#include "ibrs/sim.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include "ibrs/entities.hpp"
#include "json.hpp"

namespace ibrs::sim {

using nlohmann::json;

namespace {

constexpr std::pair<EventKind, std::string_view> kKindNames[] = {
    {EventKind::kEnter, "enter"},
    {EventKind::kBroadcast, "broadcast"},
    {EventKind::kRevoke, "revoke"},
    {EventKind::kReplay, "replay"},
    {EventKind::kForge, "forge"},
    {EventKind::kInvalidPubkey, "invalid_pubkey"},
    {EventKind::kRevokedRequest, "revoked_request"},
    {EventKind::kStale, "stale"},
    {EventKind::kTrace, "trace"},
};

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kInvalidArgument, "scenario: " + what); }

}  // namespace

std::string_view to_string(EventKind k) noexcept {
  for (const auto& [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view s) noexcept {
  for (const auto& [kind, name] : kKindNames)
    if (name == s) return kind;
  return std::nullopt;
}

// ---- scenario ---------------------------------------------------------------

void Scenario::validate() const {
  if (rsus == 0) bad("at least one RSU is required");
  if (vehicles == 0) bad("at least one vehicle is required");
  if (ring_size < SignerRing::kMinSize) bad("ring_size must be at least 2");
  if (ring_ttl == 0 || prl_period == 0) bad("ring_ttl and prl_period must be positive");
  if (!(loss_probability >= 0.0 && loss_probability <= 1.0)) bad("loss_probability must lie in [0, 1]");

  std::map<std::string, std::uint64_t> labels;
  std::uint64_t last = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    const std::string where = "event " + std::to_string(i) + " (" + std::string(to_string(e.kind)) + "): ";
    if (e.at_ms < last) bad(where + "events must be listed in time order");
    last = e.at_ms;
    if (e.vehicle && *e.vehicle >= vehicles) bad(where + "unknown vehicle " + std::to_string(*e.vehicle));
    if (e.rsu && *e.rsu >= rsus) bad(where + "unknown RSU " + std::to_string(*e.rsu));
    if (e.ring_size && *e.ring_size < SignerRing::kMinSize) bad(where + "ring_size must be at least 2");

    const bool needs_vehicle = e.kind == EventKind::kEnter || e.kind == EventKind::kBroadcast ||
                               e.kind == EventKind::kRevoke || e.kind == EventKind::kRevokedRequest ||
                               e.kind == EventKind::kStale;
    if (needs_vehicle && !e.vehicle) bad(where + "missing vehicle");
    if ((e.kind == EventKind::kEnter || e.kind == EventKind::kRevokedRequest) && !e.rsu) bad(where + "missing rsu");
    if (e.kind == EventKind::kBroadcast || e.kind == EventKind::kStale) {
      if (e.id.empty()) bad(where + "missing id");
      if (!labels.emplace(e.id, e.at_ms).second) bad(where + "duplicate id " + e.id);
    }
    const bool needs_ref = e.kind == EventKind::kReplay || e.kind == EventKind::kTrace;
    if (needs_ref && e.ref.empty()) bad(where + "missing ref");
    if (!e.ref.empty() && labels.count(e.ref) == 0) bad(where + "ref to unknown or later broadcast " + e.ref);
  }
}

Scenario Scenario::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) bad("top level must be an object");

  Scenario s;
  try {
    s.seed = j.value("seed", s.seed);
    s.rsus = j.value("rsus", s.rsus);
    s.vehicles = j.value("vehicles", s.vehicles);
    s.start_time = j.value("start_time", s.start_time);
    s.freshness_window = j.value("freshness_window", s.freshness_window);
    s.prl_period = j.value("prl_period", s.prl_period);
    s.ring_ttl = j.value("ring_ttl", s.ring_ttl);
    s.ring_floor = j.value("ring_floor", s.ring_floor);
    s.ring_size = j.value("ring_size", s.ring_size);
    s.loss_probability = j.value("loss_probability", s.loss_probability);
    s.latency_ms = j.value("latency_ms", s.latency_ms);
    s.batch_interval_ms = j.value("batch_interval_ms", s.batch_interval_ms);

    for (const auto& je : j.value("events", json::array())) {
      ScheduledEvent e;
      const auto kind_name = je.at("kind").get<std::string>();
      const auto kind = parse_event_kind(kind_name);
      if (!kind) bad("unknown event kind " + kind_name);
      e.kind = *kind;
      e.at_ms = je.value("at_ms", std::uint64_t{0});
      if (je.contains("vehicle")) e.vehicle = je["vehicle"].get<std::size_t>();
      if (je.contains("rsu")) e.rsu = je["rsu"].get<std::size_t>();
      if (je.contains("ring_size")) e.ring_size = je["ring_size"].get<std::size_t>();
      e.id = je.value("id", std::string{});
      e.ref = je.value("ref", std::string{});
      e.message = je.value("message", std::string{});
      e.age_s = je.value("age_s", std::uint64_t{0});
      s.events.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    bad(std::string("field error: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string Scenario::to_json() const {
  json j = {{"seed", seed},
            {"rsus", rsus},
            {"vehicles", vehicles},
            {"start_time", start_time},
            {"freshness_window", freshness_window},
            {"prl_period", prl_period},
            {"ring_ttl", ring_ttl},
            {"ring_floor", ring_floor},
            {"ring_size", ring_size},
            {"loss_probability", loss_probability},
            {"latency_ms", latency_ms},
            {"batch_interval_ms", batch_interval_ms}};
  json evs = json::array();
  for (const auto& e : events) {
    json je = {{"at_ms", e.at_ms}, {"kind", std::string(to_string(e.kind))}};
    if (e.vehicle) je["vehicle"] = *e.vehicle;
    if (e.rsu) je["rsu"] = *e.rsu;
    if (e.ring_size) je["ring_size"] = *e.ring_size;
    if (!e.id.empty()) je["id"] = e.id;
    if (!e.ref.empty()) je["ref"] = e.ref;
    if (!e.message.empty()) je["message"] = e.message;
    if (e.age_s != 0) je["age_s"] = e.age_s;
    evs.push_back(std::move(je));
  }
  j["events"] = std::move(evs);
  return j.dump(2);
}

// ---- log --------------------------------------------------------------------

void EventLog::append(LogRecord r) {
  r.seq = records_.size();
  records_.push_back(std::move(r));
}

std::string EventLog::to_jsonl() const {
  std::string out;
  for (const auto& r : records_) {
    // nlohmann::json objects keep keys sorted, which makes the dump canonical
    const json j = {{"seq", r.seq},         {"t_ms", r.t_ms},     {"entity", r.entity},
                    {"kind", r.kind},       {"outcome", r.outcome}, {"reason", r.reason},
                    {"ref", r.ref},         {"bytes", r.bytes},   {"digest", r.digest},   {"pairings", r.pairings},
                    {"adversarial", r.adversarial}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string EventLog::hash() const {
  const std::string text = to_jsonl();
  std::uint8_t md[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), md);
  return to_hex(ByteView(md, sizeof md));
}

Summary EventLog::summary() const {
  Summary s;
  for (const auto& r : records_) {
    s.pairings += r.pairings;
    s.bytes += r.bytes;
    if (r.outcome == "lost") ++s.lost;
    if (r.kind == "trace") (r.outcome == "accept" ? s.traces_ok : s.traces_failed)++;
    if (r.kind != "receive" && r.kind != "ring_request") continue;
    if (r.outcome == "accept") (r.adversarial ? s.adversarial_accepts : s.honest_accepts)++;
    if (r.outcome == "reject") (r.adversarial ? s.adversarial_rejects : s.honest_rejects)++;
  }
  return s;
}

std::string EventLog::summary_csv() const {
  std::map<std::tuple<std::string, std::string, std::string, bool>, std::uint64_t> counts;
  for (const auto& r : records_) ++counts[{r.kind, r.outcome, r.reason, r.adversarial}];
  std::ostringstream out;
  out << "kind,outcome,reason,adversarial,count\n";
  for (const auto& [key, n] : counts) {
    const auto& [kind, outcome, reason, adv] = key;
    out << kind << ',' << outcome << ',' << reason << ',' << (adv ? 1 : 0) << ',' << n << '\n';
  }
  const Summary s = summary();
  out << "total,honest_accepts,,0," << s.honest_accepts << '\n'
      << "total,honest_rejects,,0," << s.honest_rejects << '\n'
      << "total,adversarial_accepts,,1," << s.adversarial_accepts << '\n'
      << "total,adversarial_rejects,,1," << s.adversarial_rejects << '\n'
      << "total,lost,,0," << s.lost << '\n'
      << "total,pairings,,0," << s.pairings << '\n';
  return out.str();
}

// ---- simulator --------------------------------------------------------------

namespace {

struct Captured {
  BroadcastEnvelope env;
  Bytes frame;
  std::size_t signer = 0;
};

struct Delivery {
  Bytes frame;
  bool adversarial = false;
  std::string ref;
};

class Simulator {
 public:
  explicit Simulator(const Scenario& s)
      : s_(s),
        crypto_(s.seed, "sim/crypto"),
        link_(s.seed, "sim/link"),
        adv_(s.seed, "sim/adversary"),
        sys_(setup(crypto_)),
        trc_(sys_.pp, sys_.master),
        lea_(sys_.pp, sys_.trace),
        inbox_(s.vehicles),
        flush_pending_(s.vehicles, false) {
    for (std::size_t i = 0; i < s.rsus; ++i)
      rsus_.push_back(
          std::make_unique<Rsu>(sys_.pp, trc_.register_rsu("rsu-" + std::to_string(i)), RsuConfig{s.ring_ttl, s.ring_floor}));
    for (std::size_t i = 0; i < s.vehicles; ++i) {
      vids_.push_back("VIN-" + std::to_string(i));
      vehicles_.push_back(std::make_unique<Vehicle>(sys_.pp, trc_.register_vehicle(vids_.back()),
                                                    VehicleConfig{s.freshness_window, s.ring_size}));
    }
    for (auto& r : rsus_) r->refresh_prl(trc_.prl(), trc_.decoys(s.ring_floor, crypto_), s.start_time);
  }

  EventLog run() {
    if (s_.events.empty()) return std::move(log_);
    const std::uint64_t horizon = s_.events.back().at_ms;
    const std::uint64_t period = s_.prl_period * 1000;
    for (std::uint64_t t = period; t <= horizon; t += period) schedule(t, [this] { refresh_all(); });
    for (const auto& e : s_.events) schedule(e.at_ms, [this, &e] { dispatch(e); });

    while (!queue_.empty()) {
      auto it = queue_.begin();
      now_ms_ = it->first.first;
      auto fn = std::move(it->second);
      queue_.erase(it);
      fn();
    }
    return std::move(log_);
  }

 private:
  Timestamp now_s() const { return s_.start_time + now_ms_ / 1000; }

  void schedule(std::uint64_t t_ms, std::function<void()> fn) { queue_.emplace(std::pair{t_ms, next_seq_++}, std::move(fn)); }

  bool dropped() { return s_.loss_probability > 0.0 && link_.chance(s_.loss_probability); }

  void record(std::string entity, std::string kind, std::string outcome, std::string reason = {}, std::string ref = {},
              ByteView frame = {}, std::uint64_t pairings = 0, bool adversarial = false) {
    LogRecord r;
    r.t_ms = now_ms_;
    r.entity = std::move(entity);
    r.kind = std::move(kind);
    r.outcome = std::move(outcome);
    r.reason = std::move(reason);
    r.ref = std::move(ref);
    r.bytes = frame.size();
    if (!frame.empty()) {
      std::uint8_t md[SHA256_DIGEST_LENGTH];
      SHA256(frame.data(), frame.size(), md);
      r.digest = to_hex(ByteView(md, 8));
    }
    r.pairings = pairings;
    r.adversarial = adversarial;
    log_.append(std::move(r));
  }

  static std::string veh(std::size_t i) { return "veh:" + std::to_string(i); }
  static std::string rsu(std::size_t i) { return "rsu:" + std::to_string(i); }

  void dispatch(const ScheduledEvent& e) {
    switch (e.kind) {
      case EventKind::kEnter:
        acquire(*e.vehicle, *e.rsu, trc_.prl().contains(vehicles_[*e.vehicle]->pid()));
        break;
      case EventKind::kRevokedRequest:
        acquire(*e.vehicle, *e.rsu, true);
        break;
      case EventKind::kBroadcast:
        broadcast(e, now_s());
        break;
      case EventKind::kStale:
        broadcast(e, now_s() - std::min<Timestamp>(now_s(), e.age_s ? e.age_s : 10 * s_.freshness_window));
        break;
      case EventKind::kRevoke:
        revoke(*e.vehicle);
        break;
      case EventKind::kReplay:
        replay(e.ref);
        break;
      case EventKind::kForge:
        forge(e);
        break;
      case EventKind::kInvalidPubkey:
        invalid_pubkey(e);
        break;
      case EventKind::kTrace:
        trace(e.ref);
        break;
    }
  }

  void refresh_all() {
    for (std::size_t i = 0; i < rsus_.size(); ++i) {
      rsus_[i]->refresh_prl(trc_.prl(), trc_.decoys(s_.ring_floor, crypto_), now_s());
      record(rsu(i), "prl_refresh", "ok", "version=" + std::to_string(trc_.prl().version));
    }
  }

  void revoke(std::size_t v) {
    const auto& prl = trc_.revoke(vids_[v]);
    record("trc", "revoke", "ok", "version=" + std::to_string(prl.version), veh(v));
  }

  // RID broadcast -> encrypted request -> sealed list, one link hop each.
  void acquire(std::size_t v, std::size_t r, bool adversarial) {
    const Bytes rid = rsus_[r]->rid_broadcast();
    record(rsu(r), "rid_broadcast", "ok", {}, veh(v), rid, 0, adversarial);
    if (dropped()) return record(veh(v), "rid_broadcast", "lost", {}, {}, rid, 0, adversarial);

    schedule(now_ms_ + s_.latency_ms, [this, v, r, rid, adversarial] {
      PairingCounter pc;
      const Bytes req = vehicles_[v]->request_ring(rid, crypto_);
      record(veh(v), "ring_request_sent", "ok", {}, rsu(r), req, pc.count(), adversarial);
      if (dropped()) return record(rsu(r), "ring_request", "lost", {}, veh(v), req, 0, adversarial);

      schedule(now_ms_ + s_.latency_ms, [this, v, r, req, adversarial] {
        PairingCounter pc;
        Bytes reply;
        try {
          reply = rsus_[r]->handle_ring_request(req, now_s(), crypto_);
        } catch (const Error& err) {
          return record(rsu(r), "ring_request", "reject", std::string(to_string(err.code())), veh(v), req,
                        pc.count(), adversarial);
        }
        record(rsu(r), "ring_request", "accept", {}, veh(v), req, pc.count(), adversarial);
        if (dropped()) return record(veh(v), "sealed_list", "lost", {}, rsu(r), reply, 0, adversarial);

        schedule(now_ms_ + s_.latency_ms, [this, v, r, reply, adversarial] {
          try {
            vehicles_[v]->accept_ring(reply, now_s());
          } catch (const Error& err) {
            return record(veh(v), "ring_accept", "error", std::string(to_string(err.code())), rsu(r), reply,
                          0, adversarial);
          }
          record(veh(v), "ring_accept", "ok", "size=" + std::to_string(vehicles_[v]->ring_list()->pids.size()),
                 rsu(r), reply, 0, adversarial);
        });
      });
    });
  }

  void broadcast(const ScheduledEvent& e, Timestamp t) {
    const std::size_t v = *e.vehicle;
    const bool stale = e.kind == EventKind::kStale;
    PairingCounter pc;
    std::optional<BroadcastEnvelope> env;
    try {
      // the signing time is the vehicle's clock; stale events model a skewed or replayed clock
      env = vehicles_[v]->broadcast(as_bytes(e.message.empty() ? e.id : e.message), t, crypto_, e.ring_size);
    } catch (const Error& err) {
      return record(veh(v), "broadcast", "error", std::string(to_string(err.code())), e.id, {}, pc.count(), stale);
    }
    Bytes frame = wire::encode(*env);
    record(veh(v), "broadcast", "ok", "ring=" + std::to_string(env->ring.size()), e.id, frame, pc.count(),
           stale);
    captured_.insert_or_assign(e.id, Captured{std::move(*env), frame, v});
    flood(frame, v, stale, e.id);
  }

  // Delivers a frame to every vehicle except `from` (none for the adversary).
  void flood(const Bytes& frame, std::optional<std::size_t> from, bool adversarial, const std::string& ref) {
    for (std::size_t u = 0; u < vehicles_.size(); ++u) {
      if (from && u == *from) continue;
      if (dropped()) {
        record(veh(u), "receive", "lost", {}, ref, frame, 0, adversarial);
        continue;
      }
      schedule(now_ms_ + s_.latency_ms, [this, u, frame, adversarial, ref] {
        if (s_.batch_interval_ms == 0) return receive_one(u, Delivery{frame, adversarial, ref});
        inbox_[u].push_back(Delivery{frame, adversarial, ref});
        if (!flush_pending_[u]) {
          flush_pending_[u] = true;
          const std::uint64_t next = (now_ms_ / s_.batch_interval_ms + 1) * s_.batch_interval_ms;
          schedule(next, [this, u] { flush(u); });
        }
      });
    }
  }

  std::optional<BroadcastEnvelope> decode(std::size_t u, const Delivery& d) {
    try {
      return wire::decode_envelope(d.frame);
    } catch (const Error& err) {
      record(veh(u), "receive", "reject", "structure:" + std::string(to_string(err.code())), d.ref, d.frame, 0,
             d.adversarial);
      return std::nullopt;
    }
  }

  void receive_one(std::size_t u, const Delivery& d) {
    const auto env = decode(u, d);
    if (!env) return;
    PairingCounter pc;
    const Verdict v = vehicles_[u]->receive(*env, now_s());
    record(veh(u), "receive", v ? "accept" : "reject", v ? "" : std::string(to_string(v.reason)), d.ref,
           d.frame, pc.count(), d.adversarial);
  }

  // Batch verification with per-envelope fallback when the batch fails.
  void flush(std::size_t u) {
    flush_pending_[u] = false;
    std::vector<Delivery> pending = std::move(inbox_[u]);
    inbox_[u].clear();
    std::vector<Delivery> kept;
    std::vector<BroadcastEnvelope> envs;
    for (auto& d : pending) {
      if (auto env = decode(u, d)) {
        envs.push_back(std::move(*env));
        kept.push_back(std::move(d));
      }
    }
    if (envs.empty()) return;

    PairingCounter pc;
    const BatchReceipt receipt = vehicles_[u]->receive_batch(envs, now_s(), crypto_);
    std::vector<std::size_t> survivors;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (receipt.filtered[i]) {
        survivors.push_back(i);
      } else {
        record(veh(u), "receive", "reject", std::string(to_string(receipt.filtered[i].reason)), kept[i].ref,
               kept[i].frame, 0, kept[i].adversarial);
      }
    }
    if (!receipt.batch) return;
    const bool ok = receipt.batch->accepted;
    record(veh(u), "batch_verify", ok ? "ok" : "failed", "n=" + std::to_string(survivors.size()), {}, {}, pc.count());
    for (const auto i : survivors) {
      if (ok) {
        record(veh(u), "receive", "accept", {}, kept[i].ref, kept[i].frame, 0, kept[i].adversarial);
      } else {
        PairingCounter single;
        const Verdict v = vehicles_[u]->receive(envs[i], now_s());
        record(veh(u), "receive", v ? "accept" : "reject", v ? "" : std::string(to_string(v.reason)), kept[i].ref,
               kept[i].frame, single.count(), kept[i].adversarial);
      }
    }
  }

  void replay(const std::string& ref) {
    const auto it = captured_.find(ref);
    if (it == captured_.end()) return record("adv", "replay", "skipped", "nothing captured", ref, {}, 0, true);
    record("adv", "replay", "ok", {}, ref, it->second.frame, {}, true);
    flood(it->second.frame, std::nullopt, true, ref);
  }

  std::vector<G1> random_registered_pids(std::size_t n) {
    std::vector<G1> pids;
    for (const auto& vid : trc_.registry().vids()) pids.push_back(*trc_.registry().pid_of(vid));
    for (std::size_t i = 0; i < n; ++i) std::swap(pids[i], pids[i + adv_.uniform(pids.size() - i)]);
    pids.resize(n);
    return pids;
  }

  // Random U_i, V and tag over registered pseudonyms; the adversary holds no key.
  BroadcastEnvelope random_envelope(std::vector<G1> pids, ByteView m) {
    const Timestamp t = now_s();
    RingSignature sigma;
    for (std::size_t i = 0; i < pids.size(); ++i) sigma.u.push_back(G1::random(adv_));
    sigma.v = G1::random(adv_);
    return BroadcastEnvelope{Bytes(m.begin(), m.end()), std::move(sigma), SignerRing::create(std::move(pids)), t,
                             make_tag(sys_.pp, "forger", t)};
  }

  void forge(const ScheduledEvent& e) {
    std::optional<BroadcastEnvelope> env;
    if (!e.ref.empty()) {
      // tamper with a captured envelope: same signature, different message
      const auto it = captured_.find(e.ref);
      if (it == captured_.end()) return record("adv", "forge", "skipped", "nothing captured", e.ref, {}, 0, true);
      env = it->second.env;
      if (env->message.empty()) env->message.push_back(0);
      env->message[adv_.uniform(env->message.size())] ^= static_cast<std::uint8_t>(1 + adv_.uniform(255));
    } else {
      const std::size_t n = std::min(e.ring_size.value_or(s_.ring_size), vehicles_.size());
      if (n < SignerRing::kMinSize) return record("adv", "forge", "skipped", "too few vehicles", e.id, {}, 0, true);
      env = random_envelope(random_registered_pids(n), as_bytes(e.message.empty() ? "forged" : e.message));
    }
    const Bytes frame = wire::encode(*env);
    const std::string label = e.id.empty() ? "forge" : e.id;
    record("adv", "forge", "ok", e.ref.empty() ? "random" : "tamper", label, frame, {}, true);
    flood(frame, std::nullopt, true, label);
  }

  // Malformed pseudonym advertised inside an envelope ring. Receivers never
  // take ring members from peers, so this can only fail at decode time.
  void invalid_pubkey(const ScheduledEvent& e) {
    std::vector<G1> pids = random_registered_pids(std::min<std::size_t>(2, vehicles_.size()));
    if (pids.size() < 2) pids.push_back(G1::random(adv_));
    const auto env = random_envelope(std::move(pids), as_bytes("key"));
    Bytes frame = wire::encode(env);
    // overwrite the first ring slot with an off-curve x-coordinate encoding
    const std::size_t ring_at = frame.size() - (8 + Gt::kSize) - env.ring.size() * G1::kSize;
    std::fill(frame.begin() + static_cast<std::ptrdiff_t>(ring_at),
              frame.begin() + static_cast<std::ptrdiff_t>(ring_at + G1::kSize), 0);
    frame[ring_at] = 0x80;
    frame[ring_at + G1::kSize - 1] = 1;
    const std::string label = e.id.empty() ? "invalid_pubkey" : e.id;
    record("adv", "invalid_pubkey", "ok", {}, label, frame, {}, true);
    flood(frame, e.vehicle, true, label);
  }

  void trace(const std::string& ref) {
    const auto it = captured_.find(ref);
    if (it == captured_.end()) return record("lea", "trace", "skipped", "nothing captured", ref);
    PairingCounter pc;
    std::optional<std::string> vid;
    try {
      vid = lea_.trace(it->second.env, trc_);
    } catch (const Error& err) {
      return record("lea", "trace", "error", std::string(to_string(err.code())), ref, {}, pc.count());
    }
    const bool correct = vid && *vid == vids_[it->second.signer];
    record("lea", "trace", correct ? "accept" : "reject", vid ? *vid : "none", ref, {}, pc.count());
  }

  const Scenario& s_;
  SeededRng crypto_;
  SeededRng link_;
  SeededRng adv_;
  SetupResult sys_;
  Trc trc_;
  Lea lea_;
  std::vector<std::unique_ptr<Rsu>> rsus_;
  std::vector<std::unique_ptr<Vehicle>> vehicles_;
  std::vector<std::string> vids_;
  std::map<std::string, Captured> captured_;
  std::vector<std::vector<Delivery>> inbox_;
  std::vector<bool> flush_pending_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::function<void()>> queue_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t now_ms_ = 0;
  EventLog log_;
};

}  // namespace

EventLog run_scenario(const Scenario& s) {
  s.validate();
  return Simulator(s).run();
}

}  // namespace ibrs::sim
