#pragma once

// Measurement helpers behind the `ibrs bench` subcommands. Every runner
// returns a Table whose header is fixed per subcommand.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ibrs/pairing.hpp"

namespace ibrs::bench {

struct Stats {
  std::size_t trials = 0;
  double mean_ms = 0;
  double stddev_ms = 0;  // sample standard deviation
  double min_ms = 0;
  double max_ms = 0;
};

Stats summarize(std::span<const double> samples_ms);

/// Runs `fn` `warmup` times unmeasured, then `trials` times on the steady clock.
template <class F>
Stats measure(F&& fn, std::size_t trials, std::size_t warmup) {
  for (std::size_t i = 0; i < warmup; ++i) fn();
  std::vector<double> samples;
  samples.reserve(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return summarize(samples);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::string to_csv() const;
  /// Whitespace-separated blocks, one per distinct value of `series`, separated
  /// by two blank lines so gnuplot can address them with `index`.
  std::string to_gnuplot(std::string_view series) const;
};

struct MachineInfo {
  std::string cpu;
  unsigned threads = 0;
  std::string os;
  std::string compiler;
  std::string build;

  std::vector<std::string> lines() const;
};

MachineInfo machine_info();

/// Pins the calling thread to one CPU. Returns false if the OS refuses.
bool pin_current_thread(unsigned cpu);

struct Options {
  const CurveProfile* profile = &default_profile();
  std::size_t trials = 100;
  std::size_t warmup = 10;
  std::size_t ring_size = 2;       // batch-curve: n'
  std::size_t max_ring_size = 16;  // verify-vs-ringsize and sizes sweep 2..max
  std::vector<std::size_t> etas{1, 10, 50, 100, 500};
  std::size_t message_bytes = 32;
  std::uint64_t seed = 1;
};

/// profile,op,trials,mean_ms,stddev_ms,min_ms,max_ms
Table run_ops(const Options& o);
/// profile,ring_size,trials,sign_mean_ms,sign_stddev_ms,verify_mean_ms,verify_stddev_ms,verify_pairings
Table run_verify_vs_ringsize(const Options& o);
/// profile,ring_size,eta,mode,trials,mean_ms,stddev_ms,per_message_ms,pairings
Table run_batch_curve(const Options& o);
/// Size model for every ring size; measured frame length on operational profiles.
Table run_sizes(const Options& o);

std::string format_ms(double v);

}  // namespace ibrs::bench
