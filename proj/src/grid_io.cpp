#include "geofilt/grid_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

static_assert(std::endian::native == std::endian::little,
              "raster payload is little-endian binary64");

namespace geofilt {

namespace {

constexpr char kMagic[] = "GRIDF64";

struct HeaderScanner {
  const std::string& line;
  std::size_t pos = 0;

  void skip_spaces() {
    while (pos < line.size() && line[pos] == ' ') ++pos;
  }

  std::string_view next_token(const char* what) {
    skip_spaces();
    const std::size_t begin = pos;
    while (pos < line.size() && line[pos] != ' ') ++pos;
    if (begin == pos) {
      throw parse_error(std::string("raster header: missing ") + what, begin);
    }
    return std::string_view(line).substr(begin, pos - begin);
  }

  std::size_t next_size(const char* what) {
    const std::size_t at = pos;
    const auto tok = next_token(what);
    std::size_t value = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
      throw parse_error(std::string("raster header: bad ") + what + " '" +
                            std::string(tok) + "'",
                        at);
    }
    return value;
  }

  double next_double(const char* what) {
    const std::size_t at = pos;
    const auto tok = next_token(what);
    double value = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size() ||
        !std::isfinite(value)) {
      throw parse_error(std::string("raster header: bad ") + what + " '" +
                            std::string(tok) + "'",
                        at);
    }
    return value;
  }
};

}  // namespace

namespace {

GridHeader parse_header_line(const std::string& line) {
  HeaderScanner scan{line};
  const auto magic = scan.next_token("magic");
  if (magic != kMagic) {
    throw parse_error("raster header: bad magic '" + std::string(magic) +
                          "', expected GRIDF64",
                      0);
  }
  GridHeader header;
  header.nx = scan.next_size("nx");
  header.ny = scan.next_size("ny");
  header.dx = scan.next_double("dx");
  header.dy = scan.next_double("dy");
  scan.skip_spaces();
  if (scan.pos != line.size()) {
    throw parse_error("raster header: trailing content", scan.pos);
  }
  if (header.nx == 0 || header.ny == 0) {
    throw parse_error("raster header: zero grid dimension", 0);
  }
  return header;
}

}  // namespace

GridHeader read_grid_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_grid_header: cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw parse_error("raster header: missing header line", 0);
  }
  return parse_header_line(line);
}

GridData read_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_grid: cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw parse_error("raster header: missing header line", 0);
  }

  GridData grid;
  grid.header = parse_header_line(line);
  const std::size_t n = grid.header.nx * grid.header.ny;
  const std::size_t header_bytes = line.size() + 1;
  grid.values.resize(n);
  in.read(reinterpret_cast<char*>(grid.values.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != n * sizeof(double)) {
    throw parse_error(
        "raster payload truncated: expected " +
            std::to_string(n * sizeof(double)) + " bytes, got " +
            std::to_string(static_cast<std::size_t>(in.gcount())),
        header_bytes + static_cast<std::size_t>(in.gcount()));
  }
  // exactly nx * ny values, no trailing bytes
  char extra = 0;
  if (in.read(&extra, 1) && in.gcount() == 1) {
    throw parse_error("raster payload has trailing bytes",
                      header_bytes + n * sizeof(double));
  }
  return grid;
}

void write_grid(const std::filesystem::path& path, const GridHeader& header,
                std::span<const double> values) {
  if (header.nx == 0 || header.ny == 0) {
    throw std::invalid_argument("write_grid: zero grid dimension");
  }
  if (values.size() != header.nx * header.ny) {
    throw std::invalid_argument("write_grid: value count does not match grid");
  }
  for (const double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("write_grid: non-finite value");
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("write_grid: cannot open " + path.string());
  }
  char head[128];
  std::snprintf(head, sizeof(head), "%s %zu %zu %.17g %.17g\n", kMagic,
                header.nx, header.ny, header.dx, header.dy);
  out << head;
  out.write(reinterpret_cast<const char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!out) {
    throw std::runtime_error("write_grid: write failed for " + path.string());
  }
}

}  // namespace geofilt
