#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "geofilt/anisotropy.hpp"
#include "geofilt/mesh.hpp"
#include "geofilt/rng.hpp"

namespace testsupport {

inline double rel_err_l2(std::span<const double> got,
                         std::span<const double> expected) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    num += (got[i] - expected[i]) * (got[i] - expected[i]);
    den += expected[i] * expected[i];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

inline double max_abs_diff(std::span<const double> a,
                           std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

inline std::vector<double> random_vector(std::uint64_t seed, std::size_t n) {
  return geofilt::standard_normal_field(seed, n);
}

/// Arbitrary positive anisotropy field with per-node parameters.
inline geofilt::AnisotropyField random_field(const geofilt::TriMesh& mesh,
                                             std::uint64_t seed,
                                             double rho_lo = 0.6,
                                             double rho_hi = 6.0) {
  const geofilt::CounterRng rng{seed};
  const std::size_t n = mesh.node_count();
  geofilt::AnisotropyField field;
  field.theta.resize(n);
  field.rho1.resize(n);
  field.rho2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    field.theta[i] = rng.uniform(3 * i) * 3.14159265358979323846;
    field.rho1[i] = rho_lo + (rho_hi - rho_lo) * rng.uniform(3 * i + 1);
    field.rho2[i] = rho_lo + (rho_hi - rho_lo) * rng.uniform(3 * i + 2);
  }
  return field;
}

/// y = M x for a dense row-major matrix.
inline std::vector<double> dense_matvec(std::span<const double> m,
                                        std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += m[i * n + j] * x[j];
    y[i] = acc;
  }
  return y;
}

}  // namespace testsupport
