#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "geofilt/mesh.hpp"
#include "geofilt/spectral.hpp"

namespace geofilt {

/// Experimental semi-variogram estimate. Lags with no admissible pairs
/// carry NaN, not zero. Pair counts are ordered-pair counts (both (i,j)
/// and (j,i)), matching the estimator's normalization by 1/(2N).
struct VariogramEstimate {
  std::vector<double> lags;
  double tolerance = 0.0;
  std::vector<double> values;
  std::vector<std::size_t> pair_counts;
};

/// Axial direction filter: keep pairs whose separation direction is within
/// half_width (radians) of `angle`, modulo pi.
struct DirectionFilter {
  double angle = 0.0;
  double half_width = 0.39269908169872414;  // 22.5 degrees
};

inline constexpr std::size_t kDefaultMaxPairsPerLag = 1'000'000;

/// Gridded estimator: enumerates the integer offsets whose length falls in
/// [lag - eps, lag + eps] and scans every node pair per offset, which is
/// the exact admissible pair set on a regular grid. When a lag would scan
/// more than max_pairs ordered pairs, a deterministic pseudo-shuffled
/// subsample of that size is used instead.
VariogramEstimate grid_variogram(
    std::span<const double> data, std::size_t nx, std::size_t ny, double dx,
    double dy, std::span<const double> lags, double eps,
    std::optional<DirectionFilter> direction = {},
    std::size_t max_pairs = kDefaultMaxPairsPerLag, std::uint64_t seed = 0);

/// Mesh-based entry point (mesh nodes form a regular grid).
VariogramEstimate experimental_variogram(
    std::span<const double> data, const TriMesh& mesh,
    std::span<const double> lags, double eps,
    std::optional<DirectionFilter> direction = {},
    std::size_t max_pairs = kDefaultMaxPairsPerLag, std::uint64_t seed = 0);

/// Brute-force pair scan over arbitrary point locations. Reference path
/// for scattered data and small cases.
VariogramEstimate points_variogram(
    std::span<const double> data, std::span<const Point2> points,
    std::span<const double> lags, double eps,
    std::optional<DirectionFilter> direction = {},
    std::size_t max_pairs = kDefaultMaxPairsPerLag, std::uint64_t seed = 0);

/// Model semi-variogram C0(0) - C0(r).
double model_semivariogram(const SpectralModel& model, double r);

/// CSV export with columns lag,gamma,npairs.
void write_variogram_csv(std::ostream& out, const VariogramEstimate& est);

}  // namespace geofilt
