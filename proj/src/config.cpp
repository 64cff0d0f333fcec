#include "geofilt/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace geofilt {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed,
                  std::initializer_list<const char*> required) {
  if (!obj.is_object()) {
    throw config_error(where + ": expected a JSON object");
  }
  for (const auto& item : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return item.key() == k;
        }) == allowed.end()) {
      throw config_error(where + ": unknown key '" + item.key() + "'");
    }
  }
  for (const char* k : required) {
    if (!obj.contains(k)) {
      throw config_error(where + ": missing key '" + std::string(k) + "'");
    }
  }
}

double get_positive(const json& obj, const std::string& where,
                    const char* key) {
  const auto& v = obj.at(key);
  if (!v.is_number()) {
    throw config_error(where + ": '" + key + "' must be a number");
  }
  const double d = v.get<double>();
  if (!(d > 0.0) || !std::isfinite(d)) {
    throw config_error(where + ": '" + key + "' must be positive");
  }
  return d;
}

SpectralModel parse_model(const json& obj, const std::string& where) {
  require_keys(obj, where, {"family", "sill", "nu"}, {"family", "sill"});
  SpectralModel model;
  const std::string family = obj.at("family").get<std::string>();
  if (family == "matern") {
    model.family = CovarianceFamily::matern;
    if (!obj.contains("nu")) {
      throw config_error(where + ": matern model needs 'nu'");
    }
    model.smoothness = get_positive(obj, where, "nu");
  } else if (family == "exponential") {
    model.family = CovarianceFamily::exponential;
    if (obj.contains("nu")) {
      throw config_error(where + ": 'nu' only applies to matern");
    }
  } else if (family == "nugget") {
    model.family = CovarianceFamily::nugget;
    if (obj.contains("nu")) {
      throw config_error(where + ": 'nu' only applies to matern");
    }
  } else {
    throw config_error(where + ": unknown family '" + family + "'");
  }
  model.sill = get_positive(obj, where, "sill");
  return model;
}

AnisotropyConfig parse_anisotropy(const json& obj, const std::string& where,
                                  const std::filesystem::path& base_dir) {
  require_keys(obj, where, {"mode", "theta", "rho1", "rho2"},
               {"mode", "theta", "rho1", "rho2"});
  AnisotropyConfig aniso;
  const std::string mode = obj.at("mode").get<std::string>();
  if (mode == "constant") {
    aniso.mode = AnisotropyMode::constant;
    aniso.theta = obj.at("theta").get<double>();
    aniso.rho1 = get_positive(obj, where, "rho1");
    aniso.rho2 = get_positive(obj, where, "rho2");
  } else if (mode == "rasters") {
    aniso.mode = AnisotropyMode::rasters;
    const auto resolve = [&](const char* key) {
      std::filesystem::path p = obj.at(key).get<std::string>();
      return p.is_absolute() ? p : base_dir / p;
    };
    aniso.theta_path = resolve("theta");
    aniso.rho1_path = resolve("rho1");
    aniso.rho2_path = resolve("rho2");
  } else {
    throw config_error(where + ": unknown anisotropy mode '" + mode + "'");
  }
  return aniso;
}

ComponentConfig parse_component(const json& obj, const std::string& where,
                                const std::filesystem::path& base_dir) {
  // compact nugget form {"family": "nugget", "sill": s}
  if (obj.is_object() && obj.contains("family")) {
    ComponentConfig c;
    c.model = parse_model(obj, where);
    if (c.model.family != CovarianceFamily::nugget) {
      throw config_error(where +
                         ": only nugget components may use the compact form; "
                         "wrap the model in {\"model\": ...}");
    }
    return c;
  }
  require_keys(obj, where, {"model", "anisotropy"}, {"model"});
  ComponentConfig c;
  c.model = parse_model(obj.at("model"), where + ".model");
  if (c.model.family == CovarianceFamily::nugget) {
    if (obj.contains("anisotropy")) {
      throw config_error(where + ": nugget components have no anisotropy");
    }
  } else {
    if (!obj.contains("anisotropy")) {
      throw config_error(where + ": missing anisotropy");
    }
    c.anisotropy =
        parse_anisotropy(obj.at("anisotropy"), where + ".anisotropy", base_dir);
  }
  return c;
}

void check_rasters(const AnisotropyConfig& aniso, const GridHeader& grid,
                   const std::string& where) {
  if (aniso.mode != AnisotropyMode::rasters) return;
  for (const auto* path :
       {&aniso.theta_path, &aniso.rho1_path, &aniso.rho2_path}) {
    if (!std::filesystem::exists(*path)) {
      throw config_error(where + ": raster does not exist: " + path->string());
    }
    const GridHeader h = read_grid_header(*path);
    if (h.nx != grid.nx || h.ny != grid.ny) {
      std::ostringstream msg;
      msg << where << ": raster " << path->string() << " is " << h.nx << "x"
          << h.ny << ", expected " << grid.nx << "x" << grid.ny;
      throw config_error(msg.str());
    }
  }
}

}  // namespace

JobConfig parse_job_config(const std::string& text,
                           const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config: invalid JSON: ") + e.what());
  }
  require_keys(root, "config", {"grid", "signal", "noises", "solver", "seed"},
               {"grid", "signal"});

  JobConfig config;
  config.base_dir = base_dir;

  const json& grid = root.at("grid");
  require_keys(grid, "config.grid", {"nx", "ny", "dx", "dy"},
               {"nx", "ny", "dx", "dy"});
  config.grid.nx = grid.at("nx").get<std::size_t>();
  config.grid.ny = grid.at("ny").get<std::size_t>();
  config.grid.dx = get_positive(grid, "config.grid", "dx");
  config.grid.dy = get_positive(grid, "config.grid", "dy");
  if (config.grid.nx < 2 || config.grid.ny < 2) {
    throw config_error("config.grid: need at least 2x2 nodes");
  }

  config.signal = parse_component(root.at("signal"), "config.signal", base_dir);
  if (root.contains("noises")) {
    const json& noises = root.at("noises");
    if (!noises.is_array()) {
      throw config_error("config.noises: expected an array");
    }
    for (std::size_t i = 0; i < noises.size(); ++i) {
      config.noises.push_back(parse_component(
          noises[i], "config.noises[" + std::to_string(i) + "]", base_dir));
    }
  }

  if (root.contains("solver")) {
    const json& solver = root.at("solver");
    require_keys(solver, "config.solver", {"tol", "max_iter", "degree", "jitter"},
                 {});
    if (solver.contains("tol")) {
      config.solver.tol = get_positive(solver, "config.solver", "tol");
    }
    if (solver.contains("max_iter")) {
      config.solver.max_iter = solver.at("max_iter").get<std::size_t>();
    }
    if (solver.contains("degree")) {
      config.solver.degree = solver.at("degree").get<std::size_t>();
      if (config.solver.degree == 0) {
        throw config_error("config.solver: degree must be at least 1");
      }
    }
    if (solver.contains("jitter")) {
      const double j = solver.at("jitter").get<double>();
      if (j < 0.0 || !std::isfinite(j)) {
        throw config_error("config.solver: jitter must be non-negative");
      }
      config.solver.jitter = j;
    }
  }
  if (root.contains("seed")) {
    config.seed = root.at("seed").get<std::uint64_t>();
  }

  check_rasters(config.signal.anisotropy ? *config.signal.anisotropy
                                         : AnisotropyConfig{},
                config.grid, "config.signal");
  for (std::size_t i = 0; i < config.noises.size(); ++i) {
    if (config.noises[i].anisotropy) {
      check_rasters(*config.noises[i].anisotropy, config.grid,
                    "config.noises[" + std::to_string(i) + "]");
    }
  }
  return config;
}

JobConfig load_job_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw config_error("config: cannot open " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_job_config(buffer.str(),
                          std::filesystem::absolute(path).parent_path());
}

namespace {

AnisotropyField load_anisotropy(const AnisotropyConfig& aniso,
                                const TriMesh& mesh, const GridHeader& grid) {
  if (aniso.mode == AnisotropyMode::constant) {
    return constant_field(mesh, aniso.theta, aniso.rho1, aniso.rho2);
  }
  const GridData theta = read_grid(aniso.theta_path);
  const GridData rho1 = read_grid(aniso.rho1_path);
  const GridData rho2 = read_grid(aniso.rho2_path);

  AnisotropyField field;
  const std::size_t n = mesh.node_count();
  field.theta.resize(n);
  field.rho1.resize(n);
  field.rho2.resize(n);
  // nearest-node subsampling when building on a reduced validation grid
  for (std::size_t j = 0; j < mesh.ny; ++j) {
    const std::size_t sj =
        mesh.ny == grid.ny
            ? j
            : (j * (grid.ny - 1) + (mesh.ny - 1) / 2) / (mesh.ny - 1);
    for (std::size_t i = 0; i < mesh.nx; ++i) {
      const std::size_t si =
          mesh.nx == grid.nx
              ? i
              : (i * (grid.nx - 1) + (mesh.nx - 1) / 2) / (mesh.nx - 1);
      const std::size_t dst = j * mesh.nx + i;
      const std::size_t src = sj * grid.nx + si;
      field.theta[dst] = theta.values[src];
      field.rho1[dst] = rho1.values[src];
      field.rho2[dst] = rho2.values[src];
    }
  }
  validate_field(field, n);
  return field;
}

}  // namespace

BuiltJob build_job(const JobConfig& config, const BuildOverrides& over) {
  BuiltJob job;
  const std::size_t nx = over.size.value_or(config.grid.nx);
  const std::size_t ny = over.size ? *over.size : config.grid.ny;
  job.mesh = triangulate_grid(nx, ny, config.grid.dx, config.grid.dy);

  ComponentOptions opts;
  opts.degree = over.degree.value_or(config.solver.degree);

  const auto build_component = [&](const ComponentConfig& c) {
    if (c.model.family == CovarianceFamily::nugget) {
      return make_nugget_component(c.model.sill, job.mesh.node_count());
    }
    return make_fem_component(job.mesh, c.model,
                              load_anisotropy(*c.anisotropy, job.mesh,
                                              config.grid),
                              opts);
  };

  job.signal = build_component(config.signal);
  for (const ComponentConfig& c : config.noises) {
    job.noises.push_back(build_component(c));
  }

  if (config.solver.jitter) {
    job.jitter = *config.solver.jitter;
  } else {
    const bool has_nugget =
        config.signal.model.family == CovarianceFamily::nugget ||
        std::any_of(config.noises.begin(), config.noises.end(),
                    [](const ComponentConfig& c) {
                      return c.model.family == CovarianceFamily::nugget;
                    });
    if (!config.noises.empty() && !has_nugget) {
      double sills = config.signal.model.sill;
      for (const ComponentConfig& c : config.noises) sills += c.model.sill;
      job.jitter = 1e-6 * sills;
    }
  }
  return job;
}

}  // namespace geofilt
