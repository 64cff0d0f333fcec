#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <vector>

#include "geofilt/config.hpp"
#include "geofilt/grid_io.hpp"
#include "test_support.hpp"

using namespace geofilt;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "geofilt_io_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("raster round trip reproduces header, values, and bytes") {
  const fs::path path = scratch_dir() / "roundtrip.grd";
  const GridHeader header{2, 2, 1.0, 1.0};
  const std::vector<double> values = {0.0, 1.0, 2.0, 3.0};
  write_grid(path, header, values);

  const GridData back = read_grid(path);
  CHECK(back.header.nx == 2);
  CHECK(back.header.ny == 2);
  CHECK(back.header.dx == 1.0);
  CHECK(back.header.dy == 1.0);
  CHECK(back.values == values);

  const std::string first = slurp(path);
  CHECK(first.size() == std::string("GRIDF64 2 2 1 1\n").size() + 32);

  write_grid(path, back.header, back.values);
  CHECK(slurp(path) == first);  // byte-exact rewrite
}

TEST_CASE("headers with fractional spacings parse") {
  const fs::path path = scratch_dir() / "fractional.grd";
  std::string bytes = "GRIDF64 3 2 0.5 0.5\n";
  bytes.resize(bytes.size() + 48, '\0');
  spit(path, bytes);
  const GridData grid = read_grid(path);
  CHECK(grid.header.nx == 3);
  CHECK(grid.header.ny == 2);
  CHECK(grid.header.dx == 0.5);
  CHECK(grid.values.size() == 6);
  for (const double v : grid.values) CHECK(v == 0.0);
}

TEST_CASE("malformed rasters raise parse errors with positions") {
  const fs::path dir = scratch_dir();

  spit(dir / "magic.grd", "GRIDF32 2 2 1 1\n" + std::string(32, '\0'));
  CHECK_THROWS_WITH_AS(read_grid(dir / "magic.grd"),
                       doctest::Contains("GRIDF32"), parse_error);

  spit(dir / "tokens.grd", "GRIDF64 2 x 1 1\n" + std::string(32, '\0'));
  CHECK_THROWS_AS(read_grid(dir / "tokens.grd"), parse_error);

  spit(dir / "short.grd", "GRIDF64 2 2 1 1\n" + std::string(24, '\0'));
  try {
    read_grid(dir / "short.grd");
    FAIL("expected truncation error");
  } catch (const parse_error& e) {
    CHECK(e.byte_offset == 16 + 24);
  }

  spit(dir / "long.grd", "GRIDF64 2 2 1 1\n" + std::string(40, '\0'));
  CHECK_THROWS_WITH_AS(read_grid(dir / "long.grd"),
                       doctest::Contains("trailing"), parse_error);

  CHECK_THROWS_AS(read_grid(dir / "does_not_exist.grd"), std::runtime_error);
}

TEST_CASE("non-finite values cannot be written") {
  const fs::path path = scratch_dir() / "nan.grd";
  const std::vector<double> values = {0.0, std::nan(""), 0.0, 0.0};
  CHECK_THROWS_AS(write_grid(path, GridHeader{2, 2, 1.0, 1.0}, values),
                  std::invalid_argument);
  const std::vector<double> three(3, 0.0);
  CHECK_THROWS_AS(write_grid(path, GridHeader{2, 2, 1.0, 1.0}, three),
                  std::invalid_argument);
}

TEST_CASE("job configs parse with defaults and strict keys") {
  const std::string text = R"({
    "grid": {"nx": 12, "ny": 10, "dx": 1.0, "dy": 2.0},
    "signal": {"model": {"family": "matern", "sill": 1.0, "nu": 3.0},
               "anisotropy": {"mode": "constant", "theta": 0.5,
                               "rho1": 4.0, "rho2": 2.0}},
    "noises": [
      {"model": {"family": "exponential", "sill": 0.4},
       "anisotropy": {"mode": "constant", "theta": -0.5,
                       "rho1": 3.0, "rho2": 1.0}},
      {"family": "nugget", "sill": 0.1}
    ],
    "solver": {"tol": 1e-7, "degree": 128},
    "seed": 42
  })";
  const JobConfig config = parse_job_config(text, ".");
  CHECK(config.grid.nx == 12);
  CHECK(config.grid.dy == 2.0);
  CHECK(config.signal.model.family == CovarianceFamily::matern);
  CHECK(config.signal.model.smoothness == 3.0);
  CHECK(config.noises.size() == 2);
  CHECK(config.noises[1].model.family == CovarianceFamily::nugget);
  CHECK(config.noises[1].model.sill == 0.1);
  CHECK(config.solver.tol == 1e-7);
  CHECK(config.solver.degree == 128);
  CHECK(config.solver.max_iter == 0);
  CHECK(config.seed.value() == 42);

  // a nugget among the noises disables the automatic ridge
  const BuiltJob job = build_job(config, BuildOverrides{{}, std::size_t{6}});
  CHECK(job.jitter == 0.0);
  CHECK(job.mesh.node_count() == 36);
  CHECK(job.noises.size() == 2);
  CHECK(job.noises[1].nugget_size == 36);
}

TEST_CASE("automatic ridge applies only without a nugget") {
  const std::string no_nugget = R"({
    "grid": {"nx": 4, "ny": 4, "dx": 1.0, "dy": 1.0},
    "signal": {"model": {"family": "matern", "sill": 1.0, "nu": 1.0},
               "anisotropy": {"mode": "constant", "theta": 0,
                               "rho1": 2.0, "rho2": 1.0}},
    "noises": [{"model": {"family": "exponential", "sill": 0.5},
                "anisotropy": {"mode": "constant", "theta": 0,
                                "rho1": 1.5, "rho2": 1.0}}]
  })";
  const BuiltJob ridged = build_job(parse_job_config(no_nugget, "."));
  CHECK(ridged.jitter == doctest::Approx(1.5e-6));

  const std::string signal_only = R"({
    "grid": {"nx": 4, "ny": 4, "dx": 1.0, "dy": 1.0},
    "signal": {"model": {"family": "matern", "sill": 1.0, "nu": 1.0},
               "anisotropy": {"mode": "constant", "theta": 0,
                               "rho1": 2.0, "rho2": 1.0}}
  })";
  const BuiltJob plain = build_job(parse_job_config(signal_only, "."));
  CHECK(plain.jitter == 0.0);

  const std::string explicit_jitter = R"({
    "grid": {"nx": 4, "ny": 4, "dx": 1.0, "dy": 1.0},
    "signal": {"model": {"family": "matern", "sill": 1.0, "nu": 1.0},
               "anisotropy": {"mode": "constant", "theta": 0,
                               "rho1": 2.0, "rho2": 1.0}},
    "solver": {"jitter": 0.125}
  })";
  const BuiltJob overridden = build_job(parse_job_config(explicit_jitter, "."));
  CHECK(overridden.jitter == 0.125);
}

TEST_CASE("unknown or malformed keys are rejected") {
  const auto rejects = [](const std::string& text) {
    CHECK_THROWS_AS(parse_job_config(text, "."), config_error);
  };
  rejects(R"({"grid": {"nx": 4, "ny": 4, "dx": 1, "dy": 1}})");  // no signal
  rejects(R"({"grid": {"nx": 4, "ny": 4, "dx": 1, "dy": 1},
              "signal": {"model": {"family": "nugget", "sill": 1}},
              "extra": 1})");
  rejects(R"({"grid": {"nx": 4, "ny": 4, "dx": 1, "dy": 1, "dz": 1},
              "signal": {"model": {"family": "nugget", "sill": 1}}})");
  rejects(R"({"grid": {"nx": 4, "ny": 4, "dx": 1, "dy": 1},
              "signal": {"model": {"family": "nugget", "sill": 1,
                                    "range": 2}}})");
  rejects(R"({"grid": {"nx": 4, "ny": 4, "dx": 1, "dy": 1},
              "signal": {"model": {"family": "matern", "sill": 1}}})");  // no nu
  rejects(R"({"grid": {"nx": 4, "ny": 4, "dx": 1, "dy": 1},
              "signal": {"model": {"family": "gauss", "sill": 1}}})");
  rejects(R"({"grid": {"nx": 4, "ny": 4, "dx": 1, "dy": 1},
              "signal": {"model": {"family": "matern", "sill": 1, "nu": 2},
                         "anisotropy": {"mode": "constant", "theta": 0,
                                         "rho1": 0.0, "rho2": 1}}})");
  rejects(R"({"grid": {"nx": 4, "ny": 4, "dx": 1, "dy": 1},
              "signal": {"model": {"family": "matern", "sill": 1, "nu": 2}}})");
  rejects("{");
}

TEST_CASE("raster anisotropy loads and validates against the grid") {
  const fs::path dir = scratch_dir() / "aniso";
  fs::create_directories(dir);
  const GridHeader header{5, 4, 1.0, 1.0};
  std::vector<double> theta(20, 0.3), rho1(20, 3.0), rho2(20, 1.5);
  write_grid(dir / "theta.grd", header, theta);
  write_grid(dir / "rho1.grd", header, rho1);
  write_grid(dir / "rho2.grd", header, rho2);

  const std::string text = R"({
    "grid": {"nx": 5, "ny": 4, "dx": 1.0, "dy": 1.0},
    "signal": {"model": {"family": "matern", "sill": 1.0, "nu": 1.0},
               "anisotropy": {"mode": "rasters", "theta": "theta.grd",
                               "rho1": "rho1.grd", "rho2": "rho2.grd"}}
  })";
  const JobConfig config = parse_job_config(text, dir);
  const BuiltJob job = build_job(config);
  CHECK(job.signal.aniso.rho1[7] == 3.0);
  CHECK(job.mesh.node_count() == 20);

  // missing raster
  const std::string missing = R"({
    "grid": {"nx": 5, "ny": 4, "dx": 1.0, "dy": 1.0},
    "signal": {"model": {"family": "matern", "sill": 1.0, "nu": 1.0},
               "anisotropy": {"mode": "rasters", "theta": "nope.grd",
                               "rho1": "rho1.grd", "rho2": "rho2.grd"}}
  })";
  CHECK_THROWS_AS(parse_job_config(missing, dir), config_error);

  // wrong dimensions
  write_grid(dir / "small.grd", GridHeader{2, 2, 1.0, 1.0},
             std::vector<double>(4, 1.0));
  const std::string mismatched = R"({
    "grid": {"nx": 5, "ny": 4, "dx": 1.0, "dy": 1.0},
    "signal": {"model": {"family": "matern", "sill": 1.0, "nu": 1.0},
               "anisotropy": {"mode": "rasters", "theta": "small.grd",
                               "rho1": "rho1.grd", "rho2": "rho2.grd"}}
  })";
  CHECK_THROWS_AS(parse_job_config(mismatched, dir), config_error);
}
