// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   acceptance [--only N] [--quick]
//
// --quick divides trial counts by 10 for local iteration; ctest runs the full gate.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "ibrs/entities.hpp"
#include "ibrs/sim.hpp"
#include "ibrs/wire.hpp"
#include "test_support.hpp"

using namespace ibrs;
using Clock = std::chrono::steady_clock;

namespace {

std::size_t g_scale = 1;  // divisor applied to trial counts

std::size_t trials(std::size_t n) { return std::max<std::size_t>(1, n / g_scale); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

// Byte ranges of each component inside an encoded envelope frame.
struct Layout {
  std::size_t msg_at, msg_len;
  std::vector<std::size_t> u_at;
  std::size_t v_at;
  std::vector<std::size_t> pid_at;
  std::size_t t_at;
  std::size_t tag_at;
};

Layout layout_of(const BroadcastEnvelope& env) {
  Layout l;
  std::size_t at = wire::kFrameHeaderSize;
  l.msg_at = at + 4;
  l.msg_len = env.message.size();
  at = l.msg_at + l.msg_len + 2;
  for (std::size_t i = 0; i < env.sigma.u.size(); ++i, at += G1::kSize) l.u_at.push_back(at);
  l.v_at = at;
  at += G1::kSize + 2;
  for (std::size_t i = 0; i < env.ring.size(); ++i, at += G1::kSize) l.pid_at.push_back(at);
  l.t_at = at;
  l.tag_at = at + 8;
  return l;
}

// Decode-then-verify, the path a receiver takes for bytes off the air.
bool accepts_frame(const PublicParams& pp, const Bytes& frame) {
  try {
    return verify_single(pp, wire::decode_envelope(frame)).accepted;
  } catch (const Error&) {
    return false;
  }
}

// 1. sign/verify correctness and single-bit mutation rejection
Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  test::World w(1001, 40);
  SeededRng rng(1, "acceptance/1");
  std::size_t honest_ok = 0, honest_total = 0, mutants_rejected = 0, mutants_total = 0;
  std::vector<std::size_t> per_component(6, 0);  // m, t, tag, U, V, PID
  for (std::size_t n = 2; n <= 16; ++n) {
    for (std::size_t trial = 0; trial < trials(1000); ++trial) {
      const auto signer = static_cast<std::size_t>(rng.uniform(w.vehicles.size()));
      const auto env = w.honest_envelope(signer, n, rng, 1'700'000'000 + rng.uniform(1'000'000));
      ++honest_total;
      if (verify_single(w.pp(), env)) ++honest_ok;

      // components cycle with the trial index so every U_i and PID_i is hit
      const std::size_t components = 3 + n + 1 + n;
      const std::size_t c = trial % components;
      const Layout l = layout_of(env);
      Bytes frame = wire::encode(env);
      std::size_t at, len, kind;
      if (c == 0) {
        at = l.msg_at, len = l.msg_len, kind = 0;
      } else if (c == 1) {
        at = l.t_at, len = 8, kind = 1;
      } else if (c == 2) {
        at = l.tag_at, len = Gt::kSize, kind = 2;
      } else if (c < 3 + n) {
        at = l.u_at[c - 3], len = G1::kSize, kind = 3;
      } else if (c == 3 + n) {
        at = l.v_at, len = G1::kSize, kind = 4;
      } else {
        at = l.pid_at[c - 4 - n], len = G1::kSize, kind = 5;
      }
      const std::uint64_t bit = rng.uniform(len * 8);
      frame[at + bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      ++mutants_total;
      ++per_component[kind];
      if (!accepts_frame(w.pp(), frame)) ++mutants_rejected;
    }
  }
  const double secs = seconds_since(t0);
  o.require(honest_ok == honest_total, "honest accepts " + std::to_string(honest_ok) + "/" + std::to_string(honest_total));
  o.require(mutants_rejected == mutants_total,
            "mutants rejected " + std::to_string(mutants_rejected) + "/" + std::to_string(mutants_total));
  o.require(*std::min_element(per_component.begin(), per_component.end()) > 0, "a component was never mutated");
  o.require(secs <= 300.0, "runtime " + std::to_string(secs) + " s exceeds 300 s");
  char buf[200];
  std::snprintf(buf, sizeof buf, "n'=2..16, %zu honest accepted, %zu/%zu single-bit mutants rejected, %.1f s",
                honest_ok, mutants_rejected, mutants_total, secs);
  if (o.pass) o.detail = buf;
  return o;
}

// A structurally valid envelope that fails the ring equation.
BroadcastEnvelope corrupt(BroadcastEnvelope env, Rng& rng) {
  switch (rng.uniform(4)) {
    case 0:
      env.message.push_back(static_cast<std::uint8_t>(rng.uniform(256)));
      break;
    case 1:
      env.t += 1 + rng.uniform(100);
      break;
    case 2:
      env.sigma.v = G1::random(rng);
      break;
    default:
      env.sigma.u[rng.uniform(env.sigma.u.size())] = G1::random(rng);
      break;
  }
  return env;
}

// 2. batch soundness and batch/single equivalence
Outcome criterion2() {
  Outcome o;
  test::World w(1002, 40);
  SeededRng rng(2, "acceptance/2");
  std::vector<BroadcastEnvelope> pool;
  for (std::size_t i = 0; i < 200; ++i)
    pool.push_back(w.honest_envelope(rng.uniform(w.vehicles.size()), 2 + rng.uniform(3), rng, 1'700'000'000 + i));
  const auto sample = [&](std::size_t eta) {
    std::vector<BroadcastEnvelope> out;
    for (std::size_t i = 0; i < eta; ++i) out.push_back(pool[rng.uniform(pool.size())]);
    return out;
  };
  const BatchOptions opts{64, false};

  std::size_t false_accepts = 0;
  const std::size_t n_corrupt = trials(1000);
  for (std::size_t trial = 0; trial < n_corrupt; ++trial) {
    auto batch = sample(50);
    const auto bad = static_cast<std::size_t>(rng.uniform(50));
    batch[bad] = corrupt(batch[bad], rng);
    if (verify_batch(w.pp(), batch, rng, opts)) ++false_accepts;
  }
  o.require(false_accepts == 0, std::to_string(false_accepts) + " corrupted batches accepted");

  std::size_t honest_rejects = 0, honest_total = 0;
  for (const std::size_t eta : {1u, 10u, 50u, 100u}) {
    for (std::size_t trial = 0; trial < trials(100); ++trial, ++honest_total)
      if (!verify_batch(w.pp(), sample(eta), rng, opts)) ++honest_rejects;
  }
  o.require(honest_rejects == 0, std::to_string(honest_rejects) + " honest batches rejected");

  std::size_t mismatches = 0;
  const std::size_t n_mixed = trials(1000);
  for (std::size_t trial = 0; trial < n_mixed; ++trial) {
    auto batch = sample(1 + rng.uniform(20));
    bool all_single = true;
    for (auto& env : batch) {
      if (rng.chance(0.05)) env = corrupt(env, rng);
      all_single = verify_single(w.pp(), env).accepted && all_single;
    }
    if (verify_batch(w.pp(), batch, rng, opts).accepted != all_single) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " batch/single disagreements");
  if (o.pass)
    o.detail = "0/" + std::to_string(n_corrupt) + " corrupted eta=50 batches accepted (lambda=64), " +
               std::to_string(honest_total) + " honest batches accepted, " + std::to_string(n_mixed) +
               " mixed batches agree";
  return o;
}

// 3. pairing counts and batch wall time
Outcome criterion3() {
  Outcome o;
  test::World w(1003, 40);
  SeededRng rng(3, "acceptance/3");
  for (std::size_t n = 2; n <= 16; ++n) {
    const auto env = w.honest_envelope(0, n, rng);
    PairingCounter pc;
    (void)verify_single(w.pp(), env);
    o.require(pc.count() == 2, "verify_single n'=" + std::to_string(n) + " used " + std::to_string(pc.count()));
  }
  for (const std::size_t eta : {1u, 10u, 50u, 100u, 500u}) {
    std::vector<BroadcastEnvelope> envs;
    for (std::size_t i = 0; i < eta; ++i) envs.push_back(w.honest_envelope(i % 40, 2 + i % 15, rng, 1'700'000'000 + i));
    PairingCounter pc;
    const bool ok = verify_batch(w.pp(), envs, rng).accepted;
    o.require(ok && pc.count() == 2, "verify_batch eta=" + std::to_string(eta) + " used " + std::to_string(pc.count()));
  }

  std::vector<BroadcastEnvelope> envs;
  for (std::size_t i = 0; i < 100; ++i) envs.push_back(w.honest_envelope(i % 40, 2, rng, 1'700'000'000 + i));
  // median of five repetitions for each mode
  std::vector<double> single, batch;
  for (int rep = 0; rep < 5; ++rep) {
    auto t0 = Clock::now();
    for (const auto& e : envs) (void)verify_single(w.pp(), e);
    single.push_back(seconds_since(t0));
    t0 = Clock::now();
    (void)verify_batch(w.pp(), envs, rng);
    batch.push_back(seconds_since(t0));
  }
  std::sort(single.begin(), single.end());
  std::sort(batch.begin(), batch.end());
  const double ratio = batch[2] / single[2];
  o.require(ratio < 0.25, "batch/single time ratio " + std::to_string(ratio));
  char buf[200];
  std::snprintf(buf, sizeof buf, "2 pairings for every n' and eta; eta=100 n'=2: batch %.1f ms vs single %.1f ms (%.3fx)",
                batch[2] * 1e3, single[2] * 1e3, ratio);
  if (o.pass) o.detail = buf;
  return o;
}

// 4. tracing through the LEA/TRC protocol
Outcome criterion4() {
  Outcome o;
  SeededRng rng(4, "acceptance/4");
  const auto sys = setup(rng);
  Trc trc(sys.pp, sys.master);
  std::vector<VehicleCredential> creds;
  for (std::size_t i = 0; i < 48; ++i) creds.push_back(trc.register_vehicle("VIN-A4-" + std::to_string(i)));
  Lea lea(sys.pp, sys.trace);

  std::size_t correct = 0, none = 0;
  const std::size_t n_trials = trials(1000);
  for (std::size_t trial = 0; trial < n_trials; ++trial) {
    const std::size_t n = 2 + rng.uniform(15);
    std::vector<std::size_t> idx(creds.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < n + 1; ++i) std::swap(idx[i], idx[i + rng.uniform(idx.size() - i)]);
    std::vector<G1> members;
    for (std::size_t i = 0; i < n; ++i) members.push_back(creds[idx[i]].pid);
    const auto k = static_cast<std::size_t>(rng.uniform(n));
    const auto& signer = creds[idx[k]];
    auto env = sign_envelope(sys.pp, signer, SignerRing::create(members), k, as_bytes("trace"),
                             1'700'000'000 + trial, rng);
    if (lea.trace(env, trc) == signer.vid) ++correct;

    // tag of a registered vehicle outside the ring
    env.tag = make_tag(sys.pp, creds[idx[n]].vid, env.t);
    if (!lea.trace(env, trc).has_value()) ++none;
  }
  o.require(correct == n_trials, "traced " + std::to_string(correct) + "/" + std::to_string(n_trials));
  o.require(none == n_trials, "out-of-ring tags unmatched " + std::to_string(none) + "/" + std::to_string(n_trials));
  if (o.pass)
    o.detail = std::to_string(correct) + "/" + std::to_string(n_trials) + " traced to the true VID (n'<=16), " +
               std::to_string(none) + "/" + std::to_string(n_trials) + " out-of-ring tags give none";
  return o;
}

// 5. shared keys and IBE
Outcome criterion5() {
  Outcome o;
  SeededRng rng(5, "acceptance/5");
  const auto sys = setup(rng);
  std::size_t equal = 0, roundtrip = 0, tampered_ok = 0;
  const std::size_t n_trials = trials(1000);
  for (std::size_t i = 0; i < n_trials; ++i) {
    const auto veh = keygen_vehicle(sys.master, "VIN-A5-" + std::to_string(rng.next_u64()));
    const auto rsu = keygen_rsu(sys.master, "RSU-A5-" + std::to_string(rng.next_u64()));
    if (derive_shared_key_vehicle(veh.psk, rsu.rid) == derive_shared_key_rsu(rsu.rsk, veh.pid)) ++equal;

    const auto ct = ibe_encrypt(sys.pp, rsu.rid, veh.pid, rng);
    if (ibe_decrypt(sys.pp, rsu.rsk, ct) == veh.pid) ++roundtrip;

    // flip one bit of the serialized ciphertext (u || v)
    Bytes u = ct.u.to_bytes();
    Bytes v = ct.v;
    const std::uint64_t bit = rng.uniform((u.size() + v.size()) * 8);
    Bytes& target = bit / 8 < u.size() ? u : v;
    const std::size_t byte = bit / 8 < u.size() ? bit / 8 : bit / 8 - u.size();
    target[byte] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    try {
      const IbeCiphertext bad{G1::from_bytes(u), v};
      if (!(ibe_decrypt(sys.pp, rsu.rsk, bad) == veh.pid)) ++tampered_ok;
    } catch (const Error&) {
      ++tampered_ok;
    }
  }
  o.require(equal == n_trials, "keys equal " + std::to_string(equal) + "/" + std::to_string(n_trials));
  o.require(roundtrip == n_trials, "IBE roundtrip " + std::to_string(roundtrip) + "/" + std::to_string(n_trials));
  o.require(tampered_ok == n_trials,
            "tampered ciphertexts not recovering the PID " + std::to_string(tampered_ok) + "/" + std::to_string(n_trials));
  if (o.pass)
    o.detail = std::to_string(n_trials) + " pairs: keys equal, IBE roundtrip, tampered ciphertexts never yield the PID";
  return o;
}

// 6. size structure
Outcome criterion6() {
  Outcome o;
  test::World w(1006, 4);
  SeededRng rng(6, "acceptance/6");
  const auto env = w.honest_envelope(0, 2, rng);
  const Bytes sig = wire::signature_bytes(env.sigma);
  const std::size_t g1 = G1::kSize;
  const std::size_t framing = 2;
  o.require(env.sigma.u.size() + 1 == 3, "signature does not hold 3 G1 elements");
  o.require(sig.size() == 3 * g1 + framing, "signature bytes " + std::to_string(sig.size()));
  const Bytes frame = wire::encode(env);
  const wire::SizeModel bls{default_profile()};
  o.require(frame.size() == bls.envelope_frame(env.message.size(), 2), "frame size differs from the size model");
  const Layout l = layout_of(env);
  o.require(l.pid_at.size() == 2 && l.t_at - l.pid_at[0] == 2 * g1, "ring does not hold one G1 per slot");
  o.require(wire::decode_envelope(frame).ring == env.ring, "ring does not round-trip");

  const wire::SizeModel ref{find_profile("mnt159")};
  o.require(ref.pseudonym() == 30 && ref.signature_elements(2) == 90, "mnt159 sizes are not 30/90");
  o.require(bls.signature_elements(2) == 3 * bls.pseudonym(), "bls12-381 ratio is not 1:3");
  if (o.pass)
    o.detail = "n'=2: signature = 3 x " + std::to_string(g1) + " + " + std::to_string(framing) + " = " +
               std::to_string(sig.size()) + " bytes, ring 2 x " + std::to_string(g1) + "; mnt159 model 30/" +
               std::to_string(ref.signature_elements(2));
  return o;
}

// 7. protocol and adversary scenarios in the simulator
Outcome criterion7() {
  Outcome o;
  std::size_t runs = 0, false_accepts = 0, honest_rejects = 0, adversarial_rejects = 0;
  std::map<std::string, std::size_t> rejected_kinds;
  const std::uint64_t seeds = std::max<std::uint64_t>(2, 6 / g_scale);
  for (const char* name : {"adversaries.json", "batch.json", "happy_path.json"}) {
    auto s = sim::Scenario::load(std::string(IBRS_SCENARIO_DIR) + "/" + name);
    for (std::uint64_t seed = 0; seed < seeds; ++seed) {
      s.seed = 100 + seed;
      const auto a = sim::run_scenario(s);
      const auto b = sim::run_scenario(s);
      ++runs;
      o.require(a.to_jsonl() == b.to_jsonl(), std::string(name) + " seed " + std::to_string(s.seed) + " not reproducible");
      const auto sum = a.summary();
      false_accepts += sum.adversarial_accepts;
      honest_rejects += sum.honest_rejects;
      adversarial_rejects += sum.adversarial_rejects;
      for (const auto& r : a.records())
        if (r.adversarial && r.outcome == "reject") ++rejected_kinds[r.reason];
      for (const auto& r : a.records())
        if (r.kind == "trace") o.require(r.outcome == "accept", "trace of " + r.ref + " failed");
    }
  }
  o.require(false_accepts == 0, std::to_string(false_accepts) + " false accepts");
  o.require(honest_rejects == 0, std::to_string(honest_rejects) + " honest rejections");
  for (const char* reason : {"replay", "stale", "equation", "pseudonym revoked"})
    o.require(rejected_kinds[reason] > 0, std::string("no '") + reason + "' rejection observed");
  bool structural = false;
  for (const auto& [reason, n] : rejected_kinds) structural = structural || reason.rfind("structure:", 0) == 0;
  o.require(structural, "malformed-key envelope never rejected");
  if (o.pass)
    o.detail = std::to_string(runs) + " seeded runs: 0 false accepts, 0 honest rejections, " +
               std::to_string(adversarial_rejects) + " adversarial rejections, logs bit-identical on rerun";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) g_scale = 10;
    else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"sign/verify correctness and mutation rejection", criterion1},
      {"batch soundness and equivalence", criterion2},
      {"pairing counts and batch speedup", criterion3},
      {"trace completeness", criterion4},
      {"shared-key agreement and IBE", criterion5},
      {"size structure", criterion6},
      {"protocol and adversary scenarios", criterion7},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i + 1) != only) continue;
    Outcome r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    failed += r.pass ? 0 : 1;
    std::printf("criterion %zu %s: %s (%s)\n", i + 1, r.pass ? "PASS" : "FAIL", criteria[i].first, r.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
