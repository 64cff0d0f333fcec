#include "geofilt/krige.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

#include "geofilt/rng.hpp"

namespace geofilt {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  // sequential accumulation keeps CG bit-identical across thread counts
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

ComponentModel make_fem_component(const TriMesh& mesh,
                                  const SpectralModel& model,
                                  const AnisotropyField& aniso,
                                  const ComponentOptions& opts) {
  validate_model(model);
  if (model.family == CovarianceFamily::nugget) {
    throw std::invalid_argument(
        "make_fem_component: nugget components have no operator; use "
        "make_nugget_component");
  }
  ComponentModel c;
  c.kind = ComponentKind::fem_spectral;
  c.spectral = model;
  c.aniso = aniso;
  c.op = assemble(mesh, aniso);

  const double l = c.op.eig_upper;
  c.g_approx = chebyshev_fit_auto(
      [&](double x) { return g_of_lambda(model, x); }, l, opts.degree,
      opts.degree_cap);
  if (opts.fit_sqrt) {
    c.sqrt_g_approx = chebyshev_fit_auto(
        [&](double x) { return std::sqrt(g_of_lambda(model, x)); }, l,
        opts.degree, opts.degree_cap);
  }
  c.assembled = true;
  return c;
}

ComponentModel make_nugget_component(double sill, std::size_t size) {
  if (!(sill > 0.0)) {
    throw std::invalid_argument("nugget component: sill must be positive");
  }
  ComponentModel c;
  c.kind = ComponentKind::nugget;
  c.spectral = SpectralModel{CovarianceFamily::nugget, sill, 0.5};
  c.nugget_size = size;
  c.assembled = true;
  return c;
}

void apply_component(const ComponentModel& c, std::span<const double> v,
                     std::span<double> out, ChebWorkspace& ws) {
  if (!c.assembled) {
    throw state_error("apply_component: component is not assembled");
  }
  if (c.kind == ComponentKind::nugget) {
    const double sill = c.spectral.sill;
    const std::int64_t n = static_cast<std::int64_t>(v.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] = sill * v[static_cast<std::size_t>(i)];
    }
    return;
  }
  apply_matrix_function(c.op, c.g_approx, v, out, ws);
}

std::vector<double> apply_component(const ComponentModel& c,
                                    std::span<const double> v) {
  std::vector<double> out(v.size());
  ChebWorkspace ws;
  apply_component(c, v, out, ws);
  return out;
}

void validate_problem(const FilterProblem& problem) {
  if (problem.signal == nullptr) {
    throw std::invalid_argument("filter problem: missing signal component");
  }
  if (problem.data.empty()) {
    throw std::invalid_argument("filter problem: empty data");
  }
  if (!(problem.tol > 0.0)) {
    throw std::invalid_argument("filter problem: tolerance must be positive");
  }
  if (problem.jitter < 0.0) {
    throw std::invalid_argument("filter problem: jitter must be non-negative");
  }
  const std::size_t n = problem.data.size();
  const auto check = [n](const ComponentModel* c) {
    if (!c->assembled) {
      throw state_error("filter problem: component is not assembled");
    }
    if (c->size() != 0 && c->size() != n) {
      throw std::invalid_argument(
          "filter problem: component size does not match data length");
    }
  };
  check(problem.signal);
  for (const ComponentModel* c : problem.noises) check(c);
}

namespace {

/// out = (Sigma_S + sum Sigma_N + jitter I) d
void apply_system(const FilterProblem& problem, std::span<const double> d,
                  std::span<double> out, std::vector<double>& tmp,
                  ChebWorkspace& ws) {
  apply_component(*problem.signal, d, out, ws);
  const std::int64_t n = static_cast<std::int64_t>(d.size());
  for (const ComponentModel* c : problem.noises) {
    apply_component(*c, d, tmp, ws);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] += tmp[static_cast<std::size_t>(i)];
    }
  }
  if (problem.jitter > 0.0) {
    const double jitter = problem.jitter;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] += jitter * d[static_cast<std::size_t>(i)];
    }
  }
}

}  // namespace

FilterResult filter(const FilterProblem& problem) {
  validate_problem(problem);
  const std::size_t n = problem.data.size();
  const std::size_t max_iter =
      problem.max_iter > 0
          ? problem.max_iter
          : static_cast<std::size_t>(10.0 * std::sqrt(static_cast<double>(n)));

  FilterResult result;
  const double norm_b = norm2(problem.data);
  if (norm_b == 0.0) {
    result.estimates.assign(n, 0.0);
    return result;
  }
  const double threshold = problem.tol * norm_b;

  std::vector<double> y(n, 0.0);
  std::vector<double> r(problem.data.begin(), problem.data.end());
  std::vector<double> d(r);
  std::vector<double> p(n);
  std::vector<double> tmp(n);
  ChebWorkspace ws;
  ws.resize(n);

  apply_system(problem, d, p, tmp, ws);
  double rr = dot(r, r);
  result.residual_history.push_back(std::sqrt(rr) / norm_b);

  const std::int64_t ni = static_cast<std::int64_t>(n);
  std::size_t k = 0;
  while (std::sqrt(rr) > threshold) {
    if (k >= max_iter) {
      std::vector<double> estimates(n);
      apply_component(*problem.signal, y, estimates, ws);
      std::ostringstream msg;
      msg << "filter: conjugate gradient did not reach tolerance "
          << problem.tol << " within " << max_iter
          << " iterations (relative residual " << std::sqrt(rr) / norm_b
          << ")";
      throw convergence_error(msg.str(), std::move(estimates),
                              result.residual_history);
    }
    const double dp = dot(d, p);
    if (!(dp > 0.0)) {
      throw model_error(
          "filter: non-positive curvature; the summed covariance operator is "
          "not positive definite (add a nugget component or jitter)");
    }
    const double alpha = rr / dp;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < ni; ++i) {
      const auto u = static_cast<std::size_t>(i);
      y[u] += alpha * d[u];
      r[u] -= alpha * p[u];
    }
    const double rr_next = dot(r, r);
    const double beta = rr_next / rr;
    rr = rr_next;
    result.residual_history.push_back(std::sqrt(rr) / norm_b);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < ni; ++i) {
      const auto u = static_cast<std::size_t>(i);
      d[u] = r[u] + beta * d[u];
    }
    apply_system(problem, d, p, tmp, ws);
    ++k;
  }

  result.estimates.resize(n);
  apply_component(*problem.signal, y, result.estimates, ws);
  result.iterations = k;
  result.final_residual = std::sqrt(rr) / norm_b;
  result.solver_peak_bytes =
      sizeof(double) * (y.capacity() + r.capacity() + d.capacity() +
                        p.capacity() + tmp.capacity() +
                        result.estimates.capacity()) +
      ws.bytes();
  return result;
}

std::vector<double> simulate(const ComponentModel& c, std::uint64_t seed) {
  if (!c.assembled) {
    throw state_error("simulate: component is not assembled");
  }
  if (c.kind == ComponentKind::nugget) {
    if (c.nugget_size == 0) {
      throw state_error("simulate: nugget component has no grid size set");
    }
    std::vector<double> w = standard_normal_field(seed, c.nugget_size);
    const double scale = std::sqrt(c.spectral.sill);
    for (double& v : w) v *= scale;
    return w;
  }
  if (c.sqrt_g_approx.coeffs.empty()) {
    throw state_error("simulate: component has no sqrt(g) expansion fitted");
  }
  const std::size_t n = c.op.size();
  const std::vector<double> w = standard_normal_field(seed, n);
  std::vector<double> out(n);
  ChebWorkspace ws;
  chebyshev_matvec(c.op.stiffness, c.sqrt_g_approx, w, out, ws);
  const std::int64_t ni = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < ni; ++i) {
    const auto u = static_cast<std::size_t>(i);
    out[u] *= c.op.c_inv_sqrt[u];
  }
  return out;
}

AnisotropyField vortex_field(const TriMesh& mesh, double rho1, double rho2) {
  const double cx = 0.5 * static_cast<double>(mesh.nx - 1) * mesh.dx;
  const double cy = 0.5 * static_cast<double>(mesh.ny - 1) * mesh.dy;
  const std::size_t n = mesh.node_count();
  AnisotropyField field;
  field.theta.resize(n);
  field.rho1.assign(n, rho1);
  field.rho2.assign(n, rho2);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = mesh.nodes[i];
    // long axis tangential to circles around the center
    field.theta[i] =
        std::atan2(p.y - cy, p.x - cx) + 0.5 * 3.14159265358979323846;
  }
  return field;
}

AnisotropyField cross_field(const TriMesh& mesh, double rho1, double rho2) {
  const double cx = 0.5 * static_cast<double>(mesh.nx - 1) * mesh.dx;
  const double cy = 0.5 * static_cast<double>(mesh.ny - 1) * mesh.dy;
  const std::size_t n = mesh.node_count();
  AnisotropyField field;
  field.theta.resize(n);
  field.rho1.assign(n, rho1);
  field.rho2.assign(n, rho2);
  constexpr double kQuarterPi = 0.25 * 3.14159265358979323846;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = mesh.nodes[i];
    // orientations along the two diagonals, switching at the center axes
    field.theta[i] =
        (p.x - cx) * (p.y - cy) >= 0.0 ? kQuarterPi : -kQuarterPi;
  }
  return field;
}

SyntheticProblem make_synthetic(const SyntheticScene& scene,
                                std::uint64_t seed) {
  SyntheticProblem out;
  out.mesh = triangulate_grid(scene.nx, scene.ny, scene.dx, scene.dy);
  out.signal = make_fem_component(
      out.mesh, scene.signal_model,
      vortex_field(out.mesh, scene.signal_rho1, scene.signal_rho2),
      scene.options);
  out.noise = make_fem_component(
      out.mesh, scene.noise_model,
      cross_field(out.mesh, scene.noise_rho1, scene.noise_rho2),
      scene.options);
  out.truth = simulate(out.signal, derive_seed(seed, 0));
  out.noise_values = simulate(out.noise, derive_seed(seed, 1));
  out.noisy.resize(out.truth.size());
  for (std::size_t i = 0; i < out.noisy.size(); ++i) {
    out.noisy[i] = out.truth[i] + out.noise_values[i];
  }
  return out;
}

}  // namespace geofilt
