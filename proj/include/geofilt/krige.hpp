#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "geofilt/anisotropy.hpp"
#include "geofilt/chebyshev.hpp"
#include "geofilt/fem.hpp"
#include "geofilt/spectral.hpp"

namespace geofilt {

/// Conjugate gradient hit the iteration cap before the residual threshold.
/// Carries the partial signal estimate and the residual history.
struct convergence_error : std::runtime_error {
  convergence_error(const std::string& what, std::vector<double> estimates_,
                    std::vector<double> history_)
      : std::runtime_error(what),
        estimates(std::move(estimates_)),
        residual_history(std::move(history_)) {}
  std::vector<double> estimates;
  std::vector<double> residual_history;
};

/// The combined covariance operator is not usable as a positive-definite
/// system (e.g. negative curvature detected in CG).
struct model_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An operation was called on a component that is missing its assembled
/// operator or fitted expansions.
struct state_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ComponentKind { fem_spectral, nugget };

/// One additive component of the observed field: either a field defined by
/// a spectral model plus an anisotropy field (applied through the assembled
/// operator and Chebyshev expansions), or a pure nugget.
struct ComponentModel {
  ComponentKind kind = ComponentKind::nugget;
  SpectralModel spectral;
  AnisotropyField aniso;        // fem_spectral only
  FemOperator op;               // fem_spectral only
  ChebyshevApprox g_approx;       // expansion of g
  ChebyshevApprox sqrt_g_approx;  // expansion of sqrt(g), for simulation
  std::size_t nugget_size = 0;    // grid size for nugget simulation
  bool assembled = false;

  std::size_t size() const {
    return kind == ComponentKind::nugget ? nugget_size : op.size();
  }
};

struct ComponentOptions {
  std::size_t degree = 256;   // starting degree of the fit policy
  std::size_t degree_cap = 2048;
  bool fit_sqrt = true;       // also fit sqrt(g) for simulation
};

ComponentModel make_fem_component(const TriMesh& mesh,
                                  const SpectralModel& model,
                                  const AnisotropyField& aniso,
                                  const ComponentOptions& opts = {});
/// `size` is only needed when the component will be simulated on its own.
ComponentModel make_nugget_component(double sill, std::size_t size = 0);

/// out = Sigma_c v for one component.
void apply_component(const ComponentModel& c, std::span<const double> v,
                     std::span<double> out, ChebWorkspace& ws);
std::vector<double> apply_component(const ComponentModel& c,
                                    std::span<const double> v);

/// Observations plus the decomposition into one signal and p noise
/// components. Component pointers are non-owning; the referenced models
/// must outlive the problem.
struct FilterProblem {
  std::span<const double> data;
  const ComponentModel* signal = nullptr;
  std::vector<const ComponentModel*> noises;
  double tol = 1e-6;          // relative residual threshold
  std::size_t max_iter = 0;   // 0 -> 10 sqrt(n)
  double jitter = 0.0;        // ridge added when no nugget guarantees SPD

  std::size_t size() const { return data.size(); }
};

void validate_problem(const FilterProblem& problem);

struct FilterResult {
  std::vector<double> estimates;
  std::size_t iterations = 0;
  double final_residual = 0.0;  // relative to the data norm
  std::vector<double> residual_history;
  /// Peak bytes of solver workspace (CG vectors + recurrence scratch),
  /// excluding the operators themselves.
  std::size_t solver_peak_bytes = 0;
};

/// Matrix-free factorial kriging: conjugate gradient on the summed
/// covariance operator, then one signal-covariance application of the
/// solution. Deterministic for fixed inputs and any thread count.
FilterResult filter(const FilterProblem& problem);

/// Draw one realization of the component from a counter-based generator:
/// white noise keyed by node index pushed through C^-1/2 P_sqrt(g)(S).
/// Identical seed gives bit-identical output for any thread count.
std::vector<double> simulate(const ComponentModel& c, std::uint64_t seed);

/// Anisotropy angle layouts used by the synthetic scene: a vortex swirling
/// around the domain center, and two diagonal bands crossing in an X.
AnisotropyField vortex_field(const TriMesh& mesh, double rho1, double rho2);
AnisotropyField cross_field(const TriMesh& mesh, double rho1, double rho2);

struct SyntheticScene {
  std::size_t nx = 100, ny = 100;
  double dx = 1.0, dy = 1.0;
  SpectralModel signal_model{CovarianceFamily::matern, 1.0, 3.0};
  double signal_rho1 = 25.0, signal_rho2 = 5.0;
  SpectralModel noise_model{CovarianceFamily::exponential, 0.4, 0.5};
  double noise_rho1 = 6.25, noise_rho2 = 2.0;
  ComponentOptions options;
};

struct SyntheticProblem {
  TriMesh mesh;
  ComponentModel signal;
  ComponentModel noise;
  std::vector<double> truth;
  std::vector<double> noise_values;
  std::vector<double> noisy;  // truth + noise, element by element
};

/// Simulate the two-component scene (vortex-shaped signal anisotropy,
/// X-shaped noise anisotropy) and return both components with their sum.
SyntheticProblem make_synthetic(const SyntheticScene& scene,
                                std::uint64_t seed);

}  // namespace geofilt
