#include "geofilt/chebyshev.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace geofilt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::size_t kValidationPoints = 500;
constexpr std::size_t kFftThresholdDegree = 64;

std::vector<double> sample_at_nodes(const std::function<double(double)>& g,
                                    double l, std::size_t count) {
  std::vector<double> samples(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double t = std::cos(kPi * (static_cast<double>(j) + 0.5) /
                              static_cast<double>(count));
    const double x = 0.5 * l * (t + 1.0);
    const double v = g(x);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "chebyshev_fit: target is not finite at node x = " << x;
      throw std::invalid_argument(msg.str());
    }
    samples[j] = v;
  }
  return samples;
}

std::vector<double> dct_direct(const std::vector<double>& samples) {
  const std::size_t n = samples.size();
  std::vector<double> coeffs(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      acc += samples[j] * std::cos(kPi * static_cast<double>(k) *
                                   (static_cast<double>(j) + 0.5) /
                                   static_cast<double>(n));
    }
    coeffs[k] = 2.0 * acc / static_cast<double>(n);
  }
  return coeffs;
}

std::vector<double> dct_fftw(const std::vector<double>& samples) {
  const std::size_t n = samples.size();
  std::vector<double> in(samples);
  std::vector<double> out(n);
  {
    // plan creation is not reentrant in FFTW
    static std::mutex plan_mutex;
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_plan plan =
        fftw_plan_r2r_1d(static_cast<int>(n), in.data(), out.data(),
                         FFTW_REDFT10, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  // REDFT10 returns 2 sum_j x_j cos(pi k (j + 1/2) / n)
  for (double& v : out) v /= static_cast<double>(n);
  return out;
}

}  // namespace

ChebyshevApprox chebyshev_fit(const std::function<double(double)>& g, double l,
                              std::size_t degree) {
  if (!(l > 0.0)) {
    throw std::invalid_argument("chebyshev_fit: interval end must be positive");
  }
  const std::vector<double> samples = sample_at_nodes(g, l, degree + 1);

  ChebyshevApprox approx;
  approx.interval_end = l;
  approx.coeffs =
      degree >= kFftThresholdDegree ? dct_fftw(samples) : dct_direct(samples);

  double err = 0.0;
  for (std::size_t i = 0; i < kValidationPoints; ++i) {
    const double t = std::cos(kPi * (static_cast<double>(i) + 0.5) /
                              static_cast<double>(kValidationPoints));
    const double x = 0.5 * l * (t + 1.0);
    err = std::max(err, std::abs(chebyshev_eval(approx, x) - g(x)));
  }
  approx.fit_error = err;
  return approx;
}

ChebyshevApprox chebyshev_fit_auto(const std::function<double(double)>& g,
                                   double l, std::size_t degree,
                                   std::size_t cap, double rel_tol) {
  double max_abs = 0.0;
  for (std::size_t i = 0; i < kValidationPoints; ++i) {
    const double t = std::cos(kPi * (static_cast<double>(i) + 0.5) /
                              static_cast<double>(kValidationPoints));
    max_abs = std::max(max_abs, std::abs(g(0.5 * l * (t + 1.0))));
  }

  std::size_t k = std::max<std::size_t>(degree, 1);
  while (true) {
    ChebyshevApprox approx = chebyshev_fit(g, l, k);
    if (approx.fit_error <= rel_tol * max_abs || k >= cap) {
      return approx;
    }
    k = std::min(cap, 2 * k);
  }
}

double chebyshev_eval(const ChebyshevApprox& approx, double x) {
  // Clenshaw with the halved-c0 convention
  const double t = 2.0 * x / approx.interval_end - 1.0;
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = approx.coeffs.size(); k-- > 1;) {
    const double b0 = approx.coeffs[k] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return 0.5 * approx.coeffs[0] + t * b1 - b2;
}

void ChebWorkspace::resize(std::size_t n) {
  scaled_in.resize(n);
  accum.resize(n);
  t_cur.resize(n);
  t_prev1.resize(n);
  t_prev2.resize(n);
}

std::size_t ChebWorkspace::bytes() const {
  return sizeof(double) * (scaled_in.capacity() + accum.capacity() +
                           t_cur.capacity() + t_prev1.capacity() +
                           t_prev2.capacity());
}

void chebyshev_matvec(const CsrMatrix& s, const ChebyshevApprox& approx,
                      std::span<const double> x, std::span<double> y,
                      ChebWorkspace& ws) {
  const std::size_t n = s.n_rows;
  if (x.size() != n || y.size() != n) {
    throw std::invalid_argument("chebyshev_matvec: size mismatch");
  }
  const std::size_t order = approx.coeffs.size();
  const double l = approx.interval_end;
  // only the recurrence buffers; x or y may alias ws.scaled_in / ws.accum
  ws.t_cur.resize(n);
  ws.t_prev1.resize(n);
  ws.t_prev2.resize(n);

  const std::int64_t ni = static_cast<std::int64_t>(n);
  const double half_c0 = 0.5 * approx.coeffs[0];
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < ni; ++i) {
    const auto u = static_cast<std::size_t>(i);
    ws.t_prev2[u] = x[u];        // T0 x
    y[u] = half_c0 * x[u];
  }
  if (order == 1) return;

  // T1 x = (2/l) S x - x
  spmv(s, x, ws.t_prev1);
  const double c1 = approx.coeffs[1];
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < ni; ++i) {
    const auto u = static_cast<std::size_t>(i);
    ws.t_prev1[u] = (2.0 / l) * ws.t_prev1[u] - x[u];
    y[u] += c1 * ws.t_prev1[u];
  }

  for (std::size_t k = 2; k < order; ++k) {
    // T_k x = (4/l) S T_{k-1} x - 2 T_{k-1} x - T_{k-2} x
    spmv(s, ws.t_prev1, ws.t_cur);
    const double ck = approx.coeffs[k];
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < ni; ++i) {
      const auto u = static_cast<std::size_t>(i);
      ws.t_cur[u] = (4.0 / l) * ws.t_cur[u] - 2.0 * ws.t_prev1[u] - ws.t_prev2[u];
      y[u] += ck * ws.t_cur[u];
    }
    std::swap(ws.t_prev2, ws.t_prev1);
    std::swap(ws.t_prev1, ws.t_cur);
  }
}

namespace {

enum class DiagSide { covariance, precision };

void apply_scaled(const FemOperator& op, const ChebyshevApprox& approx,
                  std::span<const double> v, std::span<double> out,
                  ChebWorkspace& ws, DiagSide side) {
  const std::size_t n = op.size();
  if (v.size() != n || out.size() != n) {
    throw std::invalid_argument("apply_matrix_function: size mismatch");
  }
  if (approx.coeffs.empty()) {
    throw std::invalid_argument("apply_matrix_function: empty expansion");
  }
  if (approx.interval_end < op.eig_upper) {
    std::ostringstream msg;
    msg << "apply_matrix_function: expansion interval " << approx.interval_end
        << " does not cover the spectral bound " << op.eig_upper;
    throw std::invalid_argument(msg.str());
  }
  ws.resize(n);
  const std::int64_t ni = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < ni; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double d = side == DiagSide::covariance ? op.c_inv_sqrt[u]
                                                  : 1.0 / op.c_inv_sqrt[u];
    ws.scaled_in[u] = d * v[u];
  }
  chebyshev_matvec(op.stiffness, approx, ws.scaled_in, ws.accum, ws);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < ni; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double d = side == DiagSide::covariance ? op.c_inv_sqrt[u]
                                                  : 1.0 / op.c_inv_sqrt[u];
    out[u] = d * ws.accum[u];
  }
}

}  // namespace

void apply_matrix_function(const FemOperator& op, const ChebyshevApprox& approx,
                           std::span<const double> v, std::span<double> out,
                           ChebWorkspace& ws) {
  apply_scaled(op, approx, v, out, ws, DiagSide::covariance);
}

std::vector<double> apply_matrix_function(const FemOperator& op,
                                          const ChebyshevApprox& approx,
                                          std::span<const double> v) {
  std::vector<double> out(op.size());
  ChebWorkspace ws;
  apply_matrix_function(op, approx, v, out, ws);
  return out;
}

void apply_matrix_function_precision(const FemOperator& op,
                                     const ChebyshevApprox& approx,
                                     std::span<const double> v,
                                     std::span<double> out, ChebWorkspace& ws) {
  apply_scaled(op, approx, v, out, ws, DiagSide::precision);
}

std::pair<std::vector<double>, std::vector<double>> matrix_polynomial_consistency(
    const FemOperator& op, std::span<const double> p0_coeffs,
    std::span<const double> v) {
  if (p0_coeffs.empty()) {
    throw std::invalid_argument("matrix_polynomial_consistency: empty polynomial");
  }
  const auto p0 = [&](double x) {
    double acc = 0.0;
    for (std::size_t k = p0_coeffs.size(); k-- > 0;) {
      acc = acc * x + p0_coeffs[k];
    }
    return acc;
  };
  // strict positivity on the spectral interval, sampled densely
  const double l = op.eig_upper;
  for (std::size_t i = 0; i <= 4096; ++i) {
    const double x = l * static_cast<double>(i) / 4096.0;
    if (!(p0(x) > 0.0)) {
      std::ostringstream msg;
      msg << "matrix_polynomial_consistency: polynomial is not strictly "
             "positive at x = "
          << x;
      throw std::invalid_argument(msg.str());
    }
  }

  const ChebyshevApprox cov_fit =
      chebyshev_fit_auto([&](double x) { return 1.0 / p0(x); }, l);
  // a polynomial target is reproduced exactly once the degree covers it
  const std::size_t prec_degree =
      std::max<std::size_t>(p0_coeffs.size() - 1, 8);
  const ChebyshevApprox prec_fit = chebyshev_fit(p0, l, prec_degree);

  std::vector<double> sigma_v(op.size());
  std::vector<double> q_sigma_v(op.size());
  ChebWorkspace ws;
  apply_matrix_function(op, cov_fit, v, sigma_v, ws);
  apply_matrix_function_precision(op, prec_fit, sigma_v, q_sigma_v, ws);
  return {std::move(sigma_v), std::move(q_sigma_v)};
}

}  // namespace geofilt
