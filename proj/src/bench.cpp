#include "ibrs/bench.hpp"

#include <sched.h>
#include <sys/utsname.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <thread>

#include "ibrs/channel.hpp"
#include "ibrs/scheme.hpp"
#include "ibrs/wire.hpp"

#ifndef IBRS_BUILD_TYPE
#define IBRS_BUILD_TYPE "unknown"
#endif

namespace ibrs::bench {

Stats summarize(std::span<const double> samples) {
  Stats s;
  s.trials = samples.size();
  if (samples.empty()) return s;
  s.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  s.min_ms = *lo;
  s.max_ms = *hi;
  if (samples.size() > 1) {
    double ss = 0;
    for (double x : samples) ss += (x - s.mean_ms) * (x - s.mean_ms);
    s.stddev_ms = std::sqrt(ss / static_cast<double>(samples.size() - 1));
  }
  return s;
}

std::string format_ms(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string Table::to_csv() const {
  std::string out;
  const auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::string Table::to_gnuplot(std::string_view series) const {
  const auto col = std::find(header.begin(), header.end(), series);
  const std::size_t si = col == header.end() ? header.size() : static_cast<std::size_t>(col - header.begin());

  std::vector<std::string> order;
  std::map<std::string, std::vector<const std::vector<std::string>*>> groups;
  for (const auto& r : rows) {
    const std::string key = si < r.size() ? r[si] : "all";
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::string out;
  for (std::size_t g = 0; g < order.size(); ++g) {
    if (g) out += "\n\n";
    out += "# " + std::string(series) + "=" + order[g] + "\n#";
    for (const auto& h : header) out += " " + h;
    out += '\n';
    for (const auto* r : groups[order[g]]) {
      for (std::size_t i = 0; i < r->size(); ++i) {
        if (i) out += ' ';
        out += (*r)[i].empty() ? "-" : (*r)[i];
      }
      out += '\n';
    }
  }
  return out;
}

MachineInfo machine_info() {
  MachineInfo m;
  std::ifstream cpuinfo("/proc/cpuinfo");
  for (std::string line; std::getline(cpuinfo, line);) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) m.cpu = line.substr(colon + 2);
      break;
    }
  }
  if (m.cpu.empty()) m.cpu = "unknown";
  m.threads = std::thread::hardware_concurrency();
  utsname u{};
  if (uname(&u) == 0) m.os = std::string(u.sysname) + " " + u.release + " " + u.machine;
#if defined(__clang__)
  m.compiler = "clang " __clang_version__;
#elif defined(__GNUC__)
  m.compiler = "gcc " __VERSION__;
#else
  m.compiler = "unknown";
#endif
  m.build = IBRS_BUILD_TYPE;
  return m;
}

std::vector<std::string> MachineInfo::lines() const {
  return {"cpu: " + cpu, "threads: " + std::to_string(threads), "os: " + os, "compiler: " + compiler,
          "build: " + build};
}

bool pin_current_thread(unsigned cpu) {
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(cpu, &set);
  return sched_setaffinity(0, sizeof set, &set) == 0;
}

namespace {

void require_operational(const Options& o) {
  if (!o.profile->operational)
    throw Error(ErrorCode::kProfileNotOperational,
                std::string(o.profile->name) + " is a size-only profile; timing needs an operational curve");
}

struct Fixture {
  SeededRng rng;
  SetupResult sys;
  std::vector<VehicleCredential> vehicles;

  Fixture(const Options& o, std::size_t n) : rng(o.seed, "bench"), sys(setup(rng, *o.profile)) {
    for (std::size_t i = 0; i < n; ++i) vehicles.push_back(keygen_vehicle(sys.master, "VIN-" + std::to_string(i)));
  }

  // Signer 0 at a random position among members 1..n-1.
  std::pair<SignerRing, std::size_t> ring(std::size_t n) {
    const auto k = static_cast<std::size_t>(rng.uniform(n));
    std::vector<G1> members;
    for (std::size_t i = 0, j = 1; i < n; ++i) members.push_back(i == k ? vehicles[0].pid : vehicles[j++].pid);
    return {SignerRing::create(std::move(members)), k};
  }

  BroadcastEnvelope envelope(std::size_t n, std::size_t msg_len, Timestamp t) {
    auto [r, k] = ring(n);
    Bytes m(msg_len);
    rng.fill(m);
    return sign_envelope(sys.pp, vehicles[0], r, k, m, t, rng);
  }
};

std::vector<std::string> stats_row(std::string_view profile, std::string_view op, const Stats& s) {
  return {std::string(profile), std::string(op), std::to_string(s.trials), format_ms(s.mean_ms),
          format_ms(s.stddev_ms), format_ms(s.min_ms), format_ms(s.max_ms)};
}

}  // namespace

Table run_ops(const Options& o) {
  require_operational(o);
  Fixture f(o, 2);
  auto& rng = f.rng;
  const auto name = o.profile->name;
  Table t{{"profile", "op", "trials", "mean_ms", "stddev_ms", "min_ms", "max_ms"}, {}};

  const G1 a = G1::random(rng);
  const G2 b = G2::random(rng);
  const Gt g = pair(a, b);
  const Scalar k = Scalar::random(rng);
  Bytes msg(o.message_bytes);
  rng.fill(msg);
  std::uint64_t counter = 0;
  volatile bool sink = false;

  // cost symbols: T_bp pairing, T_ep Gt pow, T_em G1 mul, T_mph hash to G1
  t.add(stats_row(name, "pairing", measure([&] { sink = pair(a, b).is_one(); }, o.trials, o.warmup)));
  t.add(stats_row(name, "gt_pow", measure([&] { sink = g.pow(k).is_one(); }, o.trials, o.warmup)));
  t.add(stats_row(name, "g1_mul", measure([&] { sink = (a * k).is_identity(); }, o.trials, o.warmup)));
  t.add(stats_row(name, "g2_mul", measure([&] { sink = (b * k).is_identity(); }, o.trials, o.warmup)));
  t.add(stats_row(name, "hash_to_g1", measure([&] {
                    ++counter;
                    sink = hash_to_g1(ByteView(reinterpret_cast<const std::uint8_t*>(&counter), sizeof counter))
                               .is_identity();
                  }, o.trials, o.warmup)));
  t.add(stats_row(name, "hash_to_scalar", measure([&] { sink = hash_to_scalar(msg).is_zero(); }, o.trials, o.warmup)));

  const auto& pp = f.sys.pp;
  const auto rsu = keygen_rsu(f.sys.master, "rsu-bench");
  const auto& veh = f.vehicles[0];
  const auto ct = ibe_encrypt(pp, rsu.rid, veh.pid, rng);
  t.add(stats_row(name, "ibe_encrypt", measure([&] { sink = ibe_encrypt(pp, rsu.rid, veh.pid, rng).u.is_identity(); },
                                              o.trials, o.warmup)));
  t.add(stats_row(name, "ibe_decrypt", measure([&] { sink = ibe_decrypt(pp, rsu.rsk, ct).is_identity(); }, o.trials,
                                              o.warmup)));
  t.add(stats_row(name, "shared_key_vehicle",
                  measure([&] { sink = derive_shared_key_vehicle(veh.psk, rsu.rid) == derive_shared_key_vehicle(veh.psk, rsu.rid); },
                          o.trials, o.warmup)));

  const auto key = derive_shared_key_rsu(rsu.rsk, veh.pid);
  std::vector<G1> list;
  for (std::size_t i = 0; i < 32; ++i) list.push_back(G1::random(rng));
  const auto sealed = seal_ring_list(key, list, 1'700'000'300, rng);
  t.add(stats_row(name, "seal_list_32", measure([&] { sink = seal_ring_list(key, list, 1'700'000'300, rng).mac.empty(); },
                                               o.trials, o.warmup)));
  t.add(stats_row(name, "open_list_32", measure([&] { sink = open_ring_list(key, sealed).pids.empty(); }, o.trials,
                                               o.warmup)));

  auto [ring, pos] = f.ring(o.ring_size);
  const auto env = sign_envelope(pp, veh, ring, pos, msg, 1'700'000'000, rng);
  t.add(stats_row(name, "sign_n" + std::to_string(o.ring_size),
                  measure([&] { sink = sign_envelope(pp, veh, ring, pos, msg, 1'700'000'000, rng).sigma.v.is_identity(); },
                          o.trials, o.warmup)));
  t.add(stats_row(name, "verify_n" + std::to_string(o.ring_size),
                  measure([&] { sink = verify_single(pp, env).accepted; }, o.trials, o.warmup)));
  (void)sink;
  return t;
}

Table run_verify_vs_ringsize(const Options& o) {
  require_operational(o);
  Fixture f(o, std::max<std::size_t>(o.max_ring_size, 2));
  Table t{{"profile", "ring_size", "trials", "sign_mean_ms", "sign_stddev_ms", "verify_mean_ms", "verify_stddev_ms",
           "verify_pairings"},
          {}};
  Bytes msg(o.message_bytes);
  f.rng.fill(msg);
  volatile bool sink = false;
  for (std::size_t n = 2; n <= o.max_ring_size; ++n) {
    auto [ring, k] = f.ring(n);
    const auto env = sign_envelope(f.sys.pp, f.vehicles[0], ring, k, msg, 1'700'000'000, f.rng);
    const Stats s = measure([&] { sink = sign_envelope(f.sys.pp, f.vehicles[0], ring, k, msg, 1'700'000'000, f.rng).t; },
                            o.trials, o.warmup);
    const Stats v = measure([&] {
      if (!verify_single(f.sys.pp, env)) throw Error(ErrorCode::kIntegrityViolation, "honest envelope rejected");
    }, o.trials, o.warmup);
    PairingCounter pc;
    sink = verify_single(f.sys.pp, env).accepted;
    t.add({std::string(o.profile->name), std::to_string(n), std::to_string(v.trials), format_ms(s.mean_ms),
           format_ms(s.stddev_ms), format_ms(v.mean_ms), format_ms(v.stddev_ms), std::to_string(pc.count())});
  }
  (void)sink;
  return t;
}

Table run_batch_curve(const Options& o) {
  require_operational(o);
  Fixture f(o, std::max<std::size_t>(o.ring_size, 2));
  Table t{{"profile", "ring_size", "eta", "mode", "trials", "mean_ms", "stddev_ms", "per_message_ms", "pairings"}, {}};
  for (const std::size_t eta : o.etas) {
    if (eta == 0) throw Error(ErrorCode::kInvalidArgument, "eta must be positive");
    std::vector<BroadcastEnvelope> envs;
    for (std::size_t i = 0; i < eta; ++i) envs.push_back(f.envelope(o.ring_size, o.message_bytes, 1'700'000'000 + i));

    const Stats single = measure([&] {
      for (const auto& e : envs)
        if (!verify_single(f.sys.pp, e)) throw Error(ErrorCode::kIntegrityViolation, "honest envelope rejected");
    }, o.trials, o.warmup);
    std::uint64_t single_pairings = 0;
    {
      PairingCounter pc;
      for (const auto& e : envs) (void)verify_single(f.sys.pp, e);
      single_pairings = pc.count();
    }
    const Stats batch = measure([&] {
      if (!verify_batch(f.sys.pp, envs, f.rng)) throw Error(ErrorCode::kIntegrityViolation, "honest batch rejected");
    }, o.trials, o.warmup);
    std::uint64_t batch_pairings = 0;
    {
      PairingCounter pc;
      (void)verify_batch(f.sys.pp, envs, f.rng);
      batch_pairings = pc.count();
    }
    const auto row = [&](std::string_view mode, const Stats& s, std::uint64_t pairings) {
      t.add({std::string(o.profile->name), std::to_string(o.ring_size), std::to_string(eta), std::string(mode),
             std::to_string(s.trials), format_ms(s.mean_ms), format_ms(s.stddev_ms),
             format_ms(s.mean_ms / static_cast<double>(eta)), std::to_string(pairings)});
    };
    row("single", single, single_pairings);
    row("batch", batch, batch_pairings);
  }
  return t;
}

Table run_sizes(const Options& o) {
  const wire::SizeModel model{*o.profile};
  Table t{{"profile", "ring_size", "message_bytes", "pseudonym", "signature_g1_elements", "signature_elements",
           "signature", "ring", "tag", "envelope_payload", "envelope_frame", "measured_frame"},
          {}};
  std::optional<Fixture> f;
  if (o.profile->operational) f.emplace(o, std::max<std::size_t>(o.max_ring_size, 2));
  for (std::size_t n = 2; n <= o.max_ring_size; ++n) {
    std::string measured;
    if (f) measured = std::to_string(wire::encode(f->envelope(n, o.message_bytes, 1'700'000'000)).size());
    t.add({std::string(o.profile->name), std::to_string(n), std::to_string(o.message_bytes),
           std::to_string(model.pseudonym()), std::to_string(n + 1), std::to_string(model.signature_elements(n)),
           std::to_string(model.signature(n)), std::to_string(model.ring(n)), std::to_string(o.profile->gt_len),
           std::to_string(model.envelope_payload(o.message_bytes, n)),
           std::to_string(model.envelope_frame(o.message_bytes, n)), measured});
  }
  return t;
}

}  // namespace ibrs::bench
