#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace geofilt {

/// Counter-based generator: every value is a pure function of (seed,
/// counter), so draws keyed by node index are reproducible for any thread
/// count and can be generated in any order.
struct CounterRng {
  std::uint64_t seed = 0;

  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform in the open interval (0, 1).
  double uniform(std::uint64_t counter) const;
  /// Standard normal draw keyed by `index` (consumes counters 2i, 2i+1).
  double normal(std::uint64_t index) const;
};

/// n independent standard normal draws keyed by node index.
std::vector<double> standard_normal_field(std::uint64_t seed, std::size_t n);

/// Stable derivation of per-component seeds from a master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace geofilt
