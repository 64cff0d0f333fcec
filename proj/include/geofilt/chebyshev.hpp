#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "geofilt/csr.hpp"
#include "geofilt/fem.hpp"

namespace geofilt {

/// Chebyshev expansion of a scalar function over [0, interval_end].
/// Reconstruction convention: (c0/2) T0(t) + sum_{k>=1} ck Tk(t) with
/// t = 2x/interval_end - 1.
struct ChebyshevApprox {
  double interval_end = 0.0;
  std::vector<double> coeffs;
  /// Uniform error measured on a dense validation grid at fit time.
  double fit_error = 0.0;

  std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }
};

/// Fit a degree-K expansion from samples at the K+1 Chebyshev nodes of
/// [0, l]. Coefficients come from the discrete cosine construction,
/// FFT-accelerated for K >= 64 and by direct summation below that (both
/// agree to roundoff). Throws if g is non-finite at any node.
ChebyshevApprox chebyshev_fit(const std::function<double(double)>& g, double l,
                              std::size_t degree);

/// Degree policy: start at `degree` and double until the measured uniform
/// error drops below rel_tol * max|g| on the validation grid, capped.
ChebyshevApprox chebyshev_fit_auto(const std::function<double(double)>& g,
                                   double l, std::size_t degree = 256,
                                   std::size_t cap = 2048,
                                   double rel_tol = 1e-6);

double chebyshev_eval(const ChebyshevApprox& approx, double x);

/// Scratch vectors for the three-term recurrence; reusable across calls so
/// repeated applications allocate nothing.
struct ChebWorkspace {
  std::vector<double> scaled_in;
  std::vector<double> accum;
  std::vector<double> t_cur;
  std::vector<double> t_prev1;
  std::vector<double> t_prev2;

  void resize(std::size_t n);
  std::size_t bytes() const;
};

/// y = P(S) x where P is the fitted expansion; uses exactly degree() sparse
/// matvecs. S must be the matrix whose spectrum lies in [0, interval_end].
void chebyshev_matvec(const CsrMatrix& s, const ChebyshevApprox& approx,
                      std::span<const double> x, std::span<double> y,
                      ChebWorkspace& ws);

/// Covariance application: out = C^-1/2 P(S) C^-1/2 v.
/// Requires approx.interval_end >= op.eig_upper (the fit is uncontrolled
/// outside its interval).
void apply_matrix_function(const FemOperator& op, const ChebyshevApprox& approx,
                           std::span<const double> v, std::span<double> out,
                           ChebWorkspace& ws);
std::vector<double> apply_matrix_function(const FemOperator& op,
                                          const ChebyshevApprox& approx,
                                          std::span<const double> v);

/// Precision-side application with the diagonal factors swapped:
/// out = C^1/2 P(S) C^1/2 v.
void apply_matrix_function_precision(const FemOperator& op,
                                     const ChebyshevApprox& approx,
                                     std::span<const double> v,
                                     std::span<double> out, ChebWorkspace& ws);

/// Markov-bridge check: apply the covariance with g = 1/P0 to v, then the
/// precision with g = P0 to the result. Returns (Sigma v, Q Sigma v); the
/// second vector should reproduce v. P0 is given by monomial coefficients
/// (a0 + a1 x + ...) and must be strictly positive on [0, op.eig_upper].
std::pair<std::vector<double>, std::vector<double>> matrix_polynomial_consistency(
    const FemOperator& op, std::span<const double> p0_coeffs,
    std::span<const double> v);

}  // namespace geofilt
