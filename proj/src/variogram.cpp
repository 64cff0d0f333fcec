#include "geofilt/variogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "geofilt/rng.hpp"

namespace geofilt {

namespace {

constexpr double kPi = 3.14159265358979323846;

void validate_common(std::span<const double> lags, double eps) {
  if (lags.empty()) {
    throw std::invalid_argument("variogram: no lags given");
  }
  if (!(eps > 0.0)) {
    throw std::invalid_argument("variogram: tolerance must be positive");
  }
  for (std::size_t i = 0; i + 1 < lags.size(); ++i) {
    if (!(lags[i] < lags[i + 1])) {
      throw std::invalid_argument("variogram: lags must be strictly increasing");
    }
  }
}

bool direction_admits(const std::optional<DirectionFilter>& dir, double sx,
                      double sy) {
  if (!dir) return true;
  const double phi = std::atan2(sy, sx);
  double delta = std::fmod(std::abs(phi - dir->angle), kPi);
  delta = std::min(delta, kPi - delta);
  return delta <= dir->half_width;
}

/// Pseudo-shuffled index walk: visits `budget` distinct indices of
/// [0, total) deterministically for a given seed.
struct IndexWalk {
  std::uint64_t total;
  std::uint64_t start;
  std::uint64_t step;

  IndexWalk(std::uint64_t total_, std::uint64_t seed) : total(total_) {
    const CounterRng rng{seed};
    start = rng.bits(0) % total;
    step = (rng.bits(1) % total) | 1;  // odd
    while (std::gcd(step, total) != 1) step += 2;
    step %= total;
    if (step == 0) step = 1;
  }
  std::uint64_t at(std::uint64_t m) const {
    const auto offset = static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(m % total) * step % total);
    return (start + offset) % total;
  }
};

struct LagAccumulator {
  double sum = 0.0;
  std::uint64_t unordered_count = 0;
};

struct GridOffset {
  std::int64_t di;
  std::int64_t dj;
  std::uint64_t pair_count;  // positions admitting this offset
};

}  // namespace

VariogramEstimate grid_variogram(std::span<const double> data, std::size_t nx,
                                 std::size_t ny, double dx, double dy,
                                 std::span<const double> lags, double eps,
                                 std::optional<DirectionFilter> direction,
                                 std::size_t max_pairs, std::uint64_t seed) {
  validate_common(lags, eps);
  if (nx < 1 || ny < 1 || data.size() != nx * ny) {
    throw std::invalid_argument("grid_variogram: data does not match grid");
  }
  if (!(dx > 0.0) || !(dy > 0.0)) {
    throw std::invalid_argument("grid_variogram: spacings must be positive");
  }

  VariogramEstimate est;
  est.lags.assign(lags.begin(), lags.end());
  est.tolerance = eps;
  est.values.assign(lags.size(), std::numeric_limits<double>::quiet_NaN());
  est.pair_counts.assign(lags.size(), 0);

  const std::int64_t nlags = static_cast<std::int64_t>(lags.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t li = 0; li < nlags; ++li) {
    const double r = lags[static_cast<std::size_t>(li)];
    const double lo = std::max(0.0, r - eps);
    const double hi = r + eps;

    // admissible offsets in the upper half-plane (dj > 0, or dj = 0, di > 0);
    // each stands for an unordered node pair orientation
    std::vector<GridOffset> offsets;
    std::uint64_t total_pairs = 0;
    const auto dj_max = static_cast<std::int64_t>(std::floor(hi / dy));
    const auto di_max = static_cast<std::int64_t>(std::floor(hi / dx));
    for (std::int64_t dj = 0; dj <= dj_max; ++dj) {
      const std::int64_t di_lo = dj == 0 ? 1 : -di_max;
      for (std::int64_t di = di_lo; di <= di_max; ++di) {
        if (dj >= static_cast<std::int64_t>(ny) ||
            std::llabs(di) >= static_cast<std::int64_t>(nx)) {
          continue;
        }
        const double sx = static_cast<double>(di) * dx;
        const double sy = static_cast<double>(dj) * dy;
        const double dist = std::hypot(sx, sy);
        if (dist < lo || dist > hi) continue;
        if (!direction_admits(direction, sx, sy)) continue;
        const std::uint64_t count =
            static_cast<std::uint64_t>(nx - static_cast<std::size_t>(std::llabs(di))) *
            static_cast<std::uint64_t>(ny - static_cast<std::size_t>(dj));
        offsets.push_back({di, dj, count});
        total_pairs += count;
      }
    }
    if (total_pairs == 0) continue;

    const auto pair_at = [&](const GridOffset& off, std::uint64_t q) {
      const std::size_t span_x = nx - static_cast<std::size_t>(std::llabs(off.di));
      const std::size_t ix = static_cast<std::size_t>(q % span_x);
      const std::size_t j = static_cast<std::size_t>(q / span_x);
      const std::size_t i = off.di < 0 ? ix + static_cast<std::size_t>(-off.di) : ix;
      const std::size_t a = j * nx + i;
      const std::size_t b = (j + static_cast<std::size_t>(off.dj)) * nx +
                            (i + static_cast<std::size_t>(off.di));
      return std::pair<std::size_t, std::size_t>{a, b};
    };

    LagAccumulator acc;
    const std::uint64_t budget = max_pairs / 2;  // unordered scan budget
    if (total_pairs <= budget) {
      for (const GridOffset& off : offsets) {
        for (std::uint64_t q = 0; q < off.pair_count; ++q) {
          const auto [a, b] = pair_at(off, q);
          const double diff = data[a] - data[b];
          acc.sum += diff * diff;
        }
        acc.unordered_count += off.pair_count;
      }
    } else {
      std::vector<std::uint64_t> cumulative(offsets.size() + 1, 0);
      for (std::size_t o = 0; o < offsets.size(); ++o) {
        cumulative[o + 1] = cumulative[o] + offsets[o].pair_count;
      }
      const IndexWalk walk(total_pairs,
                           derive_seed(seed, static_cast<std::uint64_t>(li)));
      for (std::uint64_t m = 0; m < budget; ++m) {
        const std::uint64_t q = walk.at(m);
        const auto block =
            static_cast<std::size_t>(std::upper_bound(cumulative.begin(),
                                                      cumulative.end(), q) -
                                     cumulative.begin()) -
            1;
        const auto [a, b] = pair_at(offsets[block], q - cumulative[block]);
        const double diff = data[a] - data[b];
        acc.sum += diff * diff;
      }
      acc.unordered_count = budget;
    }

    // ordered-pair bookkeeping: both orientations contribute symmetrically
    est.pair_counts[static_cast<std::size_t>(li)] = 2 * acc.unordered_count;
    est.values[static_cast<std::size_t>(li)] =
        (2.0 * acc.sum) / (2.0 * static_cast<double>(2 * acc.unordered_count));
  }
  return est;
}

VariogramEstimate experimental_variogram(std::span<const double> data,
                                         const TriMesh& mesh,
                                         std::span<const double> lags,
                                         double eps,
                                         std::optional<DirectionFilter> direction,
                                         std::size_t max_pairs,
                                         std::uint64_t seed) {
  if (data.size() != mesh.node_count()) {
    throw std::invalid_argument(
        "experimental_variogram: data does not match mesh");
  }
  return grid_variogram(data, mesh.nx, mesh.ny, mesh.dx, mesh.dy, lags, eps,
                        direction, max_pairs, seed);
}

VariogramEstimate points_variogram(std::span<const double> data,
                                   std::span<const Point2> points,
                                   std::span<const double> lags, double eps,
                                   std::optional<DirectionFilter> direction,
                                   std::size_t max_pairs, std::uint64_t seed) {
  validate_common(lags, eps);
  if (data.size() != points.size()) {
    throw std::invalid_argument("points_variogram: data does not match points");
  }
  const std::size_t n = points.size();
  std::vector<LagAccumulator> acc(lags.size());

  const auto scan_pair = [&](std::size_t i, std::size_t j) {
    const double sx = points[j].x - points[i].x;
    const double sy = points[j].y - points[i].y;
    const double dist = std::hypot(sx, sy);
    if (!direction_admits(direction, sx, sy)) return;
    // all lags whose window [lag - eps, lag + eps] contains dist
    auto first = std::lower_bound(lags.begin(), lags.end(), dist - eps);
    for (auto it = first; it != lags.end() && *it <= dist + eps; ++it) {
      const double diff = data[i] - data[j];
      auto& slot = acc[static_cast<std::size_t>(it - lags.begin())];
      slot.sum += diff * diff;
      slot.unordered_count += 1;
    }
  };

  const std::uint64_t total =
      n < 2 ? 0 : static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t budget = max_pairs / 2;
  if (total <= budget) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) scan_pair(i, j);
    }
  } else if (total > 0) {
    const IndexWalk walk(total, derive_seed(seed, 0));
    for (std::uint64_t m = 0; m < budget; ++m) {
      std::uint64_t q = walk.at(m);
      // unrank q into the strict upper triangle
      std::size_t i = 0;
      std::uint64_t row_len = n - 1;
      while (q >= row_len) {
        q -= row_len;
        --row_len;
        ++i;
      }
      const std::size_t j = i + 1 + static_cast<std::size_t>(q);
      scan_pair(i, j);
    }
  }

  VariogramEstimate est;
  est.lags.assign(lags.begin(), lags.end());
  est.tolerance = eps;
  est.values.assign(lags.size(), std::numeric_limits<double>::quiet_NaN());
  est.pair_counts.assign(lags.size(), 0);
  for (std::size_t k = 0; k < lags.size(); ++k) {
    if (acc[k].unordered_count == 0) continue;
    est.pair_counts[k] = 2 * acc[k].unordered_count;
    est.values[k] =
        (2.0 * acc[k].sum) / (2.0 * static_cast<double>(est.pair_counts[k]));
  }
  return est;
}

double model_semivariogram(const SpectralModel& model, double r) {
  return covariance(model, 0.0) - covariance(model, r);
}

void write_variogram_csv(std::ostream& out, const VariogramEstimate& est) {
  out << "lag,gamma,npairs\n";
  char buf[96];
  for (std::size_t k = 0; k < est.lags.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%zu\n", est.lags[k],
                  est.values[k], est.pair_counts[k]);
    out << buf;
  }
}

}  // namespace geofilt
