// ibrs: benchmarks and scenario runner.
//
//   ibrs bench ops|verify-vs-ringsize|batch-curve|sizes [--curve NAME] [--trials N] ...
//   ibrs simulate SCENARIO.json [--log out.jsonl] [--summary out.csv]

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "ibrs/bench.hpp"
#include "ibrs/sim.hpp"

namespace {

constexpr int kUsageError = 2;

struct BenchArgs {
  std::string curve = std::string(ibrs::default_profile().name);
  std::size_t trials = 100;
  std::size_t warmup = 10;
  std::optional<std::size_t> ring_size;
  std::vector<std::size_t> etas{1, 10, 50, 100, 500};
  std::size_t message_bytes = 32;
  std::uint64_t seed = 1;
  std::string csv;
  bool gnuplot = false;
  std::optional<unsigned> pin_cpu;
};

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

int run_bench(const std::string& which, const BenchArgs& a) {
  const ibrs::CurveProfile* profile = nullptr;
  for (const auto& p : ibrs::curve_profiles())
    if (p.name == a.curve) profile = &p;
  if (!profile) {
    std::cerr << "error: unknown curve profile '" << a.curve << "' (known:";
    for (const auto& p : ibrs::curve_profiles()) std::cerr << ' ' << p.name;
    std::cerr << ")\n";
    return kUsageError;
  }
  if (!profile->operational && which != "sizes") {
    std::cerr << "error: profile '" << a.curve << "' is size-only; use it with `bench sizes`\n";
    return kUsageError;
  }
  if (a.pin_cpu && !ibrs::bench::pin_current_thread(*a.pin_cpu))
    std::cerr << "warning: could not pin to cpu " << *a.pin_cpu << "\n";

  ibrs::bench::Options o;
  o.profile = profile;
  o.trials = a.trials;
  o.warmup = a.warmup;
  o.etas = a.etas;
  o.message_bytes = a.message_bytes;
  o.seed = a.seed;
  if (which == "batch-curve") o.ring_size = a.ring_size.value_or(2);
  if (which == "ops") o.ring_size = a.ring_size.value_or(2);
  o.max_ring_size = a.ring_size.value_or(16);

  ibrs::bench::Table table;
  std::string series;
  if (which == "ops") {
    table = ibrs::bench::run_ops(o);
    series = "op";
  } else if (which == "verify-vs-ringsize") {
    table = ibrs::bench::run_verify_vs_ringsize(o);
    series = "profile";
  } else if (which == "batch-curve") {
    table = ibrs::bench::run_batch_curve(o);
    series = "mode";
  } else {
    table = ibrs::bench::run_sizes(o);
    series = "profile";
  }

  for (const auto& line : ibrs::bench::machine_info().lines()) std::cout << "# " << line << '\n';
  std::cout << "# profile: " << profile->name << " (" << profile->security_bits << "-bit)\n";
  std::cout << (a.gnuplot ? table.to_gnuplot(series) : table.to_csv());
  if (!a.csv.empty() && !write_file(a.csv, table.to_csv())) {
    std::cerr << "error: cannot write " << a.csv << "\n";
    return 1;
  }
  return 0;
}

int run_simulate(const std::string& path, const std::string& log_path, const std::string& summary_path,
                 std::optional<std::uint64_t> seed) {
  ibrs::sim::Scenario s = ibrs::sim::Scenario::load(path);
  if (seed) s.seed = *seed;
  const auto log = ibrs::sim::run_scenario(s);
  if (!log_path.empty() && !write_file(log_path, log.to_jsonl())) {
    std::cerr << "error: cannot write " << log_path << "\n";
    return 1;
  }
  if (!summary_path.empty() && !write_file(summary_path, log.summary_csv())) {
    std::cerr << "error: cannot write " << summary_path << "\n";
    return 1;
  }
  const auto sum = log.summary();
  std::cout << "records " << log.records().size() << "\n"
            << "honest_accepts " << sum.honest_accepts << "\n"
            << "honest_rejects " << sum.honest_rejects << "\n"
            << "adversarial_accepts " << sum.adversarial_accepts << "\n"
            << "adversarial_rejects " << sum.adversarial_rejects << "\n"
            << "lost " << sum.lost << "\n"
            << "traces_ok " << sum.traces_ok << "\n"
            << "pairings " << sum.pairings << "\n"
            << "log_sha256 " << log.hash() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Identity-based ring signatures for vehicular networks: benchmarks and simulator"};
  app.require_subcommand(1);

  auto* bench = app.add_subcommand("bench", "Timing and size measurements, CSV output");
  bench->require_subcommand(1);
  BenchArgs ba;
  std::string which;
  for (const char* name : {"ops", "verify-vs-ringsize", "batch-curve", "sizes"}) {
    auto* sub = bench->add_subcommand(name);
    sub->fallthrough();  // bench options may follow the subcommand name
    sub->callback([&which, name] { which = name; });
  }
  bench->get_subcommand("ops")->description("Per-operation timings (pairing, Gt pow, G1 mul, hash-to-G1, ...)");
  bench->get_subcommand("verify-vs-ringsize")->description("Sign and verify time for ring sizes 2..--ring-size");
  bench->get_subcommand("batch-curve")->description("Single vs batch verification over --eta-list");
  bench->get_subcommand("sizes")->description("Serialized sizes for ring sizes 2..--ring-size");

  bench->add_option("--curve", ba.curve, "Curve profile")->capture_default_str();
  bench->add_option("--trials", ba.trials, "Measured trials per cell")->check(CLI::Range(100, 1'000'000))->capture_default_str();
  bench->add_option("--warmup", ba.warmup, "Unmeasured warm-up iterations")->capture_default_str();
  bench->add_option("--ring-size", ba.ring_size, "n' for ops/batch-curve (default 2); sweep limit otherwise (default 16)")
      ->check(CLI::Range(2, 4096));
  bench->add_option("--eta-list", ba.etas, "Batch sizes for batch-curve")->delimiter(',')->capture_default_str();
  bench->add_option("--message-bytes", ba.message_bytes, "Message length")->capture_default_str();
  bench->add_option("--seed", ba.seed, "Seed for inputs")->capture_default_str();
  bench->add_option("--csv", ba.csv, "Also write the CSV table to this path");
  bench->add_flag("--gnuplot", ba.gnuplot, "Print gnuplot blocks instead of CSV");
  bench->add_option("--pin-cpu", ba.pin_cpu, "Pin the measuring thread to this CPU");

  auto* simulate = app.add_subcommand("simulate", "Run a scenario file and report the log summary");
  std::string scenario, log_path, summary_path;
  std::optional<std::uint64_t> sim_seed;
  simulate->add_option("scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--log", log_path, "Write the event log (JSON lines)");
  simulate->add_option("--summary", summary_path, "Write the CSV summary");
  simulate->add_option("--seed", sim_seed, "Override the scenario seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    if (simulate->parsed()) return run_simulate(scenario, log_path, summary_path, sim_seed);
    return run_bench(which, ba);
  } catch (const ibrs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ibrs::ErrorCode::kInvalidArgument ? kUsageError : 1;
  }
}
