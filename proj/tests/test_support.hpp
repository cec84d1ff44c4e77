#pragma once

#include <string>
#include <vector>

#include "ibrs/scheme.hpp"

namespace ibrs::test {

/// A TRC setup plus a pool of registered vehicles.
struct World {
  SetupResult sys;
  IdentityRegistry registry;
  std::vector<VehicleCredential> vehicles;

  World(std::uint64_t seed, std::size_t n_vehicles) {
    SeededRng rng(seed, "world");
    sys = setup(rng);
    for (std::size_t i = 0; i < n_vehicles; ++i) {
      vehicles.push_back(keygen_vehicle(sys.master, "VIN-" + std::to_string(seed) + "-" + std::to_string(i)));
      registry.add(vehicles.back().vid, vehicles.back().pid);
    }
  }

  const PublicParams& pp() const { return sys.pp; }

  /// Ring of `size` distinct vehicles starting at `first`, signer at position k.
  SignerRing ring_with_signer(std::size_t signer, std::size_t size, std::size_t k, Rng& rng) const {
    std::vector<std::size_t> picks;
    while (picks.size() + 1 < size) {
      const auto c = static_cast<std::size_t>(rng.uniform(vehicles.size()));
      if (c == signer) continue;
      bool dup = false;
      for (auto p : picks) dup = dup || p == c;
      if (!dup) picks.push_back(c);
    }
    std::vector<G1> members;
    for (std::size_t i = 0, j = 0; i < size; ++i)
      members.push_back(i == k ? vehicles[signer].pid : vehicles[picks[j++]].pid);
    return SignerRing::create(std::move(members));
  }

  BroadcastEnvelope honest_envelope(std::size_t signer, std::size_t size, Rng& rng, Timestamp t = 1'700'000'000) const {
    const auto k = static_cast<std::size_t>(rng.uniform(size));
    const SignerRing ring = ring_with_signer(signer, size, k, rng);
    Bytes m(1 + rng.uniform(64));
    rng.fill(m);
    return sign_envelope(pp(), vehicles[signer], ring, k, m, t, rng);
  }
};

inline void flip_bit(Bytes& b, std::uint64_t bit) { b[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8)); }

}  // namespace ibrs::test
