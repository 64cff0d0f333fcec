#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "geofilt/chebyshev.hpp"
#include "geofilt/krige.hpp"
#include "geofilt/oracle.hpp"
#include "test_support.hpp"

using namespace geofilt;
using testsupport::dense_matvec;
using testsupport::random_field;
using testsupport::random_vector;
using testsupport::rel_err_l2;

TEST_CASE("constant target has a single halved coefficient") {
  const ChebyshevApprox fit = chebyshev_fit([](double) { return 1.0; }, 5.0, 12);
  CHECK(fit.coeffs[0] == doctest::Approx(2.0).epsilon(1e-14));
  for (std::size_t k = 1; k < fit.coeffs.size(); ++k) {
    CHECK(std::abs(fit.coeffs[k]) <= 1e-13);
  }
  CHECK(fit.fit_error <= 1e-13);
}

TEST_CASE("linear target on [0, 2] is c0 = 2, c1 = 1") {
  const ChebyshevApprox fit = chebyshev_fit([](double x) { return x; }, 2.0, 8);
  CHECK(fit.coeffs[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fit.coeffs[1] == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t k = 2; k < fit.coeffs.size(); ++k) {
    CHECK(std::abs(fit.coeffs[k]) <= 1e-13);
  }
}

TEST_CASE("coefficients of a polynomial vanish beyond its degree") {
  const auto poly = [](double x) { return 1.0 + x * (0.5 + x * (2.0 - 0.25 * x)); };
  const ChebyshevApprox fit = chebyshev_fit(poly, 4.0, 20);
  for (std::size_t k = 4; k < fit.coeffs.size(); ++k) {
    CHECK(std::abs(fit.coeffs[k]) <= 1e-12);
  }
}

TEST_CASE("direct and FFT coefficient paths agree") {
  // polynomial coefficients are degree-independent, so a direct-summation
  // fit (below the FFT threshold) and an FFT fit must produce the same ones
  const auto poly = [](double x) {
    return 0.3 + x * (1.7 + x * (-0.4 + x * 0.05));
  };
  const ChebyshevApprox direct = chebyshev_fit(poly, 6.0, 32);
  const ChebyshevApprox fft = chebyshev_fit(poly, 6.0, 200);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(std::abs(direct.coeffs[k] - fft.coeffs[k]) <= 1e-13);
  }
}

TEST_CASE("smooth spectral target fits to near machine precision") {
  const SpectralModel model{CovarianceFamily::matern, 1.0, 3.0};
  const ChebyshevApprox fit = chebyshev_fit(
      [&](double x) { return g_of_lambda(model, x); }, 8.0, 128);
  CHECK(fit.fit_error <= 1e-10);
  // reported bound holds on a dense sample of the interval
  for (int i = 0; i <= 1000; ++i) {
    const double x = 8.0 * i / 1000.0;
    CHECK(std::abs(chebyshev_eval(fit, x) - g_of_lambda(model, x)) <=
          fit.fit_error + 1e-12);
  }
}

TEST_CASE("degree policy doubles until the target tolerance") {
  // a mildly stiff target on a wide interval needs more than the base degree
  const auto g = [](double x) { return 1.0 / (1.0 + x); };
  const ChebyshevApprox fit = chebyshev_fit_auto(g, 4000.0, 64, 2048);
  CHECK(fit.degree() > 64);
  CHECK(fit.fit_error <= 1e-6 * 1.0);
}

TEST_CASE("non-finite samples are rejected with the node named") {
  CHECK_THROWS_WITH_AS(
      chebyshev_fit([](double x) { return std::sqrt(x - 1.0); }, 2.0, 7),
      doctest::Contains("not finite"), std::invalid_argument);
}

TEST_CASE("constant g applies the inverse lumped mass") {
  const TriMesh mesh = triangulate_grid(5, 5, 1.0, 1.0);
  const FemOperator op = assemble(mesh, random_field(mesh, 3));
  const ChebyshevApprox fit =
      chebyshev_fit([](double) { return 1.0; }, op.eig_upper, 32);
  const std::vector<double> v = random_vector(11, op.size());
  const std::vector<double> got = apply_matrix_function(op, fit, v);
  for (std::size_t i = 0; i < op.size(); ++i) {
    const double expected = op.c_inv_sqrt[i] * op.c_inv_sqrt[i] * v[i];
    CHECK(std::abs(got[i] - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("linear g reproduces the scaled stiffness matvec") {
  const TriMesh mesh = triangulate_grid(6, 4, 1.0, 1.0);
  const FemOperator op = assemble(mesh, random_field(mesh, 4));
  const ChebyshevApprox fit =
      chebyshev_fit([](double x) { return x; }, op.eig_upper, 16);
  const std::size_t n = op.size();
  const std::vector<double> v = random_vector(12, n);
  const std::vector<double> got = apply_matrix_function(op, fit, v);

  std::vector<double> scaled(n), out(n);
  for (std::size_t i = 0; i < n; ++i) scaled[i] = op.c_inv_sqrt[i] * v[i];
  spmv(op.stiffness, scaled, out);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] *= op.c_inv_sqrt[i];
    scale = std::max(scale, std::abs(out[i]));
  }
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(std::abs(got[i] - out[i]) <= 1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("matrix function matches the dense eigendecomposition") {
  const TriMesh mesh = triangulate_grid(5, 5, 1.0, 1.0);
  const SpectralModel model{CovarianceFamily::matern, 1.0, 3.0};
  const FemOperator op = assemble(mesh, constant_field(mesh, 0.4, 3.0, 1.5));
  const ChebyshevApprox fit = chebyshev_fit(
      [&](double x) { return g_of_lambda(model, x); }, op.eig_upper, 200);
  const DenseCovariance dense = dense_covariance(op, model);
  for (const std::uint64_t seed : {31ull, 32ull, 33ull}) {
    const std::vector<double> v = random_vector(seed, op.size());
    const std::vector<double> got = apply_matrix_function(op, fit, v);
    const std::vector<double> expected = dense_matvec(dense.matrix, v);
    CHECK(rel_err_l2(got, expected) <= 1e-8);
  }
}

TEST_CASE("polynomial targets are applied exactly") {
  const TriMesh mesh = triangulate_grid(4, 5, 1.0, 1.0);
  const FemOperator op = assemble(mesh, random_field(mesh, 8));
  const std::vector<double> mono = {0.7, -0.3, 0.11, 0.02, -0.001, 0.0004};
  const auto poly = [&](double x) {
    double acc = 0.0;
    for (std::size_t k = mono.size(); k-- > 0;) acc = acc * x + mono[k];
    return acc;
  };
  const ChebyshevApprox fit = chebyshev_fit(poly, op.eig_upper, 16);

  const std::size_t n = op.size();
  const std::vector<double> v = random_vector(21, n);
  const std::vector<double> got = apply_matrix_function(op, fit, v);

  // Horner reference: one extra stiffness product per coefficient
  std::vector<double> scaled(n), acc(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = op.c_inv_sqrt[i] * v[i];
    acc[i] = mono.back() * scaled[i];
  }
  for (std::size_t k = mono.size() - 1; k-- > 0;) {
    spmv(op.stiffness, acc, tmp);
    for (std::size_t i = 0; i < n; ++i) acc[i] = tmp[i] + mono[k] * scaled[i];
  }
  for (std::size_t i = 0; i < n; ++i) acc[i] *= op.c_inv_sqrt[i];
  CHECK(rel_err_l2(got, acc) <= 1e-10);
}

TEST_CASE("application is linear, symmetric, and positive semi-definite") {
  const TriMesh mesh = triangulate_grid(6, 6, 1.0, 1.0);
  const SpectralModel model{CovarianceFamily::exponential, 0.8, 0.5};
  const FemOperator op = assemble(mesh, random_field(mesh, 9));
  const ChebyshevApprox fit = chebyshev_fit_auto(
      [&](double x) { return g_of_lambda(model, x); }, op.eig_upper, 128);

  const std::size_t n = op.size();
  const std::vector<double> u = random_vector(41, n);
  const std::vector<double> v = random_vector(42, n);

  // linearity
  std::vector<double> combo(n);
  for (std::size_t i = 0; i < n; ++i) combo[i] = 2.5 * u[i] - 0.75 * v[i];
  const std::vector<double> a = apply_matrix_function(op, fit, combo);
  const std::vector<double> au = apply_matrix_function(op, fit, u);
  const std::vector<double> av = apply_matrix_function(op, fit, v);
  std::vector<double> expected(n);
  for (std::size_t i = 0; i < n; ++i) expected[i] = 2.5 * au[i] - 0.75 * av[i];
  CHECK(rel_err_l2(a, expected) <= 1e-12);

  // symmetry <Au, v> = <u, Av>
  double left = 0.0, right = 0.0, uu = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    left += au[i] * v[i];
    right += u[i] * av[i];
    uu += au[i] * u[i];
  }
  CHECK(std::abs(left - right) <= 1e-10 * std::max(std::abs(left), 1.0));

  // positive semi-definite quadratic form
  double norm_u = 0.0;
  for (const double x : u) norm_u += x * x;
  CHECK(uu >= -1e-10 * norm_u);
}

TEST_CASE("an interval below the spectral bound is rejected") {
  const TriMesh mesh = triangulate_grid(4, 4, 1.0, 1.0);
  const FemOperator op = assemble(mesh, constant_field(mesh, 0.0, 1.0, 1.0));
  ChebyshevApprox fit =
      chebyshev_fit([](double) { return 1.0; }, op.eig_upper, 8);
  fit.interval_end = 0.5 * op.eig_upper;
  const std::vector<double> v(op.size(), 1.0);
  CHECK_THROWS_AS((void)apply_matrix_function(op, fit, v),
                  std::invalid_argument);
}

TEST_CASE("identity polynomial roundtrips exactly") {
  const TriMesh mesh = triangulate_grid(4, 4, 1.0, 1.0);
  const FemOperator op = assemble(mesh, random_field(mesh, 10));
  const std::vector<double> p0 = {1.0};
  const std::vector<double> v = random_vector(5, op.size());
  const auto [sigma_v, roundtrip] = matrix_polynomial_consistency(op, p0, v);
  CHECK(rel_err_l2(roundtrip, v) <= 1e-12);
}

TEST_CASE("inverse-polynomial covariance against its precision") {
  const TriMesh mesh = triangulate_grid(6, 6, 1.0, 1.0);
  const FemOperator op = assemble(mesh, constant_field(mesh, 0.3, 2.0, 1.0));
  const double kappa2 = 0.25;
  const std::vector<double> p0 = {kappa2 * kappa2, 2.0 * kappa2, 1.0};
  const std::vector<double> v = random_vector(6, op.size());
  const auto [sigma_v, roundtrip] = matrix_polynomial_consistency(op, p0, v);
  CHECK(rel_err_l2(roundtrip, v) <= 1e-6);
}

TEST_CASE("first-order polynomial matches the dense solve") {
  const TriMesh mesh = triangulate_grid(5, 4, 1.0, 1.0);
  const FemOperator op = assemble(mesh, random_field(mesh, 44));
  const std::vector<double> p0 = {1.0, 1.0};  // 1 + x
  std::vector<double> w(op.size());
  for (std::size_t i = 0; i < op.size(); ++i) w[i] = 1.0 / op.c_inv_sqrt[i];
  const auto [sigma_w, roundtrip] = matrix_polynomial_consistency(op, p0, w);
  const DenseCovariance dense =
      dense_covariance(op, [](double x) { return 1.0 / (1.0 + x); });
  const std::vector<double> expected = dense_matvec(dense.matrix, w);
  CHECK(rel_err_l2(sigma_w, expected) <= 1e-8);
  CHECK(rel_err_l2(roundtrip, w) <= 1e-8);
}

TEST_CASE("polynomials with a root inside the interval are rejected") {
  const TriMesh mesh = triangulate_grid(4, 4, 1.0, 1.0);
  const FemOperator op = assemble(mesh, constant_field(mesh, 0.0, 1.0, 1.0));
  // root at l/2
  const std::vector<double> p0 = {-0.5 * op.eig_upper, 1.0};
  const std::vector<double> v(op.size(), 1.0);
  CHECK_THROWS_AS((void)matrix_polynomial_consistency(op, p0, v),
                  std::invalid_argument);
}
