#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace geofilt {

/// Compressed-row sparse matrix (double entries).
///
/// Row i occupies [row_offsets[i], row_offsets[i+1]) in `cols`/`vals`,
/// with column indices sorted ascending within each row.
struct CsrMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_offsets;  // size n_rows + 1
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;

  std::size_t nnz() const { return vals.size(); }

  /// Bytes held by the index/value arrays.
  std::size_t storage_bytes() const {
    return row_offsets.size() * sizeof(std::size_t) +
           cols.size() * sizeof(std::uint32_t) + vals.size() * sizeof(double);
  }
};

/// y = A x. Row-parallel; each row accumulates sequentially in index order,
/// so the result is bit-identical for every thread count.
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);

/// Serial reference for spmv, kept for testing and benchmarking.
void spmv_serial(const CsrMatrix& a, std::span<const double> x,
                 std::span<double> y);

}  // namespace geofilt
