#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace geofilt {

enum class CovarianceFamily { matern, exponential, nugget };

/// Isotropic covariance model at unit range. All range and direction
/// information lives in the anisotropy field of the component using the
/// model, so the catalog itself is scale-free.
struct SpectralModel {
  CovarianceFamily family = CovarianceFamily::matern;
  double sill = 1.0;
  double smoothness = 0.5;  // matern only
  static constexpr int dimension = 2;
};

/// Thrown when the Hankel quadrature fails to converge.
struct quadrature_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void validate_model(const SpectralModel& model);

/// Unit-range covariance C0(r), with C0(0) = sill by continuous extension.
double covariance(const SpectralModel& model, double r);

/// Radial spectral density f0(xi), normalized so that integrating it over
/// the plane returns the sill. Not defined for the nugget family.
double spectral_density(const SpectralModel& model, double xi);

/// Spectral transfer in the Laplacian-eigenvalue argument: eigenvalues play
/// the role of squared frequency, and the power-spectrum normalization
/// g(lambda) = (2 pi)^d f0(sqrt(lambda)) makes the eigenfunction expansion
/// reproduce the covariance (and equals 1/P0 for inverse-polynomial models).
double g_of_lambda(const SpectralModel& model, double lambda);

/// Numerical inverse transform of the spectral density back to covariance
/// values at the given radii. Serves as the independent oracle validating
/// both the density normalization and the covariance closed forms.
std::vector<double> hankel_roundtrip(const SpectralModel& model,
                                     std::span<const double> radii);

}  // namespace geofilt
