#include "geofilt/rng.hpp"

#include <cmath>

namespace geofilt {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return mix64(seed + (counter + 1) * kGolden);
}

double CounterRng::uniform(std::uint64_t counter) const {
  // 53 mantissa bits shifted into (0, 1); the +0.5 keeps it off both ends
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t index) const {
  const double u1 = uniform(2 * index);
  const double u2 = uniform(2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::vector<double> standard_normal_field(std::uint64_t seed, std::size_t n) {
  const CounterRng rng{seed};
  std::vector<double> w(n);
  const std::int64_t ni = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < ni; ++i) {
    w[static_cast<std::size_t>(i)] =
        rng.normal(static_cast<std::uint64_t>(i));
  }
  return w;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed + kGolden) ^ (stream + 1) * kGolden);
}

}  // namespace geofilt
