#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace geofilt {

/// Malformed raster file; `byte_offset` points at the offending byte.
struct parse_error : std::runtime_error {
  parse_error(const std::string& what, std::size_t byte_offset_)
      : std::runtime_error(what), byte_offset(byte_offset_) {}
  std::size_t byte_offset = 0;
};

struct GridHeader {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double dx = 0.0;
  double dy = 0.0;
};

struct GridData {
  GridHeader header;
  std::vector<double> values;  // row-major, node(i, j) at j * nx + i
};

/// Raster format: one ASCII header line "GRIDF64 <nx> <ny> <dx> <dy>\n"
/// followed by exactly nx * ny little-endian binary64 values, row-major.
/// Writing then reading reproduces the bytes exactly.
GridData read_grid(const std::filesystem::path& path);
void write_grid(const std::filesystem::path& path, const GridHeader& header,
                std::span<const double> values);

/// Parse only the header line (existence / dimension checks).
GridHeader read_grid_header(const std::filesystem::path& path);

}  // namespace geofilt
