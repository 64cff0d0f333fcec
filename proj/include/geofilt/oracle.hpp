#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "geofilt/fem.hpp"
#include "geofilt/krige.hpp"
#include "geofilt/spectral.hpp"

namespace geofilt {

/// Guard against accidentally densifying a production-sized operator.
inline constexpr std::size_t kOracleSizeGuard = 2000;

struct size_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense n x n covariance built by full eigendecomposition of the
/// stiffness matrix. Brute-force ground truth for desk-scale checks.
struct DenseCovariance {
  std::size_t n = 0;
  std::vector<double> matrix;       // row-major
  std::vector<double> eigenvalues;  // spectrum of the stiffness matrix
};

DenseCovariance dense_covariance(const FemOperator& op,
                                 const SpectralModel& model);

/// General form taking any non-negative spectral transfer g(lambda).
DenseCovariance dense_covariance(const FemOperator& op,
                                 const std::function<double(double)>& g);

/// Dense precision matrix C^1/2 P0(S) C^1/2 for a strictly positive
/// polynomial P0 given by monomial coefficients.
std::vector<double> dense_precision(const FemOperator& op,
                                    std::span<const double> p0_coeffs);

/// Dense factorial kriging: builds every component covariance, solves the
/// summed system by a symmetric positive-definite factorization, applies
/// the signal covariance.
std::vector<double> dense_filter(const FilterProblem& problem);

/// Largest eigenvalue from the dense spectrum (test support).
double dense_lambda_max(const CsrMatrix& stiffness);

}  // namespace geofilt
