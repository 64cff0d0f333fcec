#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "geofilt/grid_io.hpp"
#include "geofilt/krige.hpp"
#include "geofilt/spectral.hpp"

namespace geofilt {

/// Invalid job configuration (unknown keys, bad values, missing rasters).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class AnisotropyMode { constant, rasters };

struct AnisotropyConfig {
  AnisotropyMode mode = AnisotropyMode::constant;
  // constant mode
  double theta = 0.0;
  double rho1 = 1.0;
  double rho2 = 1.0;
  // raster mode: paths resolved relative to the config file
  std::filesystem::path theta_path;
  std::filesystem::path rho1_path;
  std::filesystem::path rho2_path;
};

struct ComponentConfig {
  SpectralModel model;
  std::optional<AnisotropyConfig> anisotropy;  // absent for nugget
};

struct SolverConfig {
  double tol = 1e-6;
  std::size_t max_iter = 0;          // 0 -> 10 sqrt(n)
  std::size_t degree = 256;          // starting degree of the fit policy
  std::optional<double> jitter;      // absent -> automatic rule
};

struct JobConfig {
  GridHeader grid;
  ComponentConfig signal;
  std::vector<ComponentConfig> noises;
  SolverConfig solver;
  std::optional<std::uint64_t> seed;
  std::filesystem::path base_dir;  // directory of the config file
};

/// Parse and validate a JSON job file. Unknown keys are rejected;
/// referenced rasters must exist and match the grid dimensions.
JobConfig load_job_config(const std::filesystem::path& path);

/// Same, from an in-memory JSON string (base_dir resolves raster paths).
JobConfig parse_job_config(const std::string& text,
                           const std::filesystem::path& base_dir);

/// Materialized job: mesh plus assembled components.
struct BuiltJob {
  TriMesh mesh;
  ComponentModel signal;
  std::vector<ComponentModel> noises;
  double jitter = 0.0;  // resolved value (explicit or automatic rule)
};

struct BuildOverrides {
  std::optional<std::size_t> degree;
  /// Build on an n x n grid instead of the configured one (dense-oracle
  /// validation); raster anisotropies are subsampled onto it.
  std::optional<std::size_t> size;
};

BuiltJob build_job(const JobConfig& config, const BuildOverrides& over = {});

}  // namespace geofilt
