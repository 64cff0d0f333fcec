#include "geofilt/csr.hpp"

#include <stdexcept>

namespace geofilt {

namespace {

inline double row_dot(const CsrMatrix& a, std::size_t row,
                      std::span<const double> x) {
  double acc = 0.0;
  const std::size_t end = a.row_offsets[row + 1];
  for (std::size_t k = a.row_offsets[row]; k < end; ++k) {
    acc += a.vals[k] * x[a.cols[k]];
  }
  return acc;
}

}  // namespace

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.n_cols || y.size() != a.n_rows) {
    throw std::invalid_argument("spmv: vector size does not match matrix");
  }
  const std::int64_t n = static_cast<std::int64_t>(a.n_rows);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    y[static_cast<std::size_t>(i)] = row_dot(a, static_cast<std::size_t>(i), x);
  }
}

void spmv_serial(const CsrMatrix& a, std::span<const double> x,
                 std::span<double> y) {
  if (x.size() != a.n_cols || y.size() != a.n_rows) {
    throw std::invalid_argument("spmv: vector size does not match matrix");
  }
  for (std::size_t i = 0; i < a.n_rows; ++i) {
    y[i] = row_dot(a, i, x);
  }
}

}  // namespace geofilt
