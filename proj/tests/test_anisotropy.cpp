#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "geofilt/anisotropy.hpp"
#include "test_support.hpp"

using namespace geofilt;

namespace {
constexpr double kPi = 3.14159265358979323846;

void solve_eigenvalues(const MetricSample& m, double& lo, double& hi) {
  const double tr = m.h11 + m.h22;
  const double det = m.h11 * m.h22 - m.h12 * m.h12;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  lo = tr / 2.0 - disc;
  hi = tr / 2.0 + disc;
}
}  // namespace

TEST_CASE("unit ranges give the identity metric for any angle") {
  for (const double theta : {0.0, 0.3, 1.1, -2.0, kPi}) {
    const MetricSample m = metric_from_params(theta, 1.0, 1.0);
    CHECK(m.h11 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.h22 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.h12 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(m.density == doctest::Approx(1.0));
  }
}

TEST_CASE("axis-aligned metric and the axis swap under rotation by pi/2") {
  const MetricSample a = metric_from_params(0.0, 2.0, 1.0);
  CHECK(a.h11 == doctest::Approx(4.0));
  CHECK(a.h22 == doctest::Approx(1.0));
  CHECK(a.h12 == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(a.density == doctest::Approx(0.5));

  const MetricSample b = metric_from_params(kPi / 2.0, 2.0, 1.0);
  CHECK(b.h11 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.h22 == doctest::Approx(4.0));
  CHECK(b.density == doctest::Approx(0.5));
}

TEST_CASE("metric is pi-periodic in the angle") {
  const CounterRng rng{21};
  for (std::uint64_t k = 0; k < 50; ++k) {
    const double theta = 2.0 * kPi * rng.uniform(3 * k);
    const double rho1 = 0.2 + 5.0 * rng.uniform(3 * k + 1);
    const double rho2 = 0.2 + 5.0 * rng.uniform(3 * k + 2);
    const MetricSample a = metric_from_params(theta, rho1, rho2);
    const MetricSample b = metric_from_params(theta + kPi, rho1, rho2);
    CHECK(std::abs(a.h11 - b.h11) <= 1e-12 * std::max(1.0, std::abs(a.h11)));
    CHECK(std::abs(a.h12 - b.h12) <= 1e-12 * std::max(1.0, std::abs(a.h12)));
    CHECK(std::abs(a.h22 - b.h22) <= 1e-12 * std::max(1.0, std::abs(a.h22)));
  }
}

TEST_CASE("metric eigenvalues are the squared ranges") {
  const CounterRng rng{22};
  for (std::uint64_t k = 0; k < 50; ++k) {
    const double theta = kPi * rng.uniform(3 * k);
    const double rho1 = 0.2 + 5.0 * rng.uniform(3 * k + 1);
    const double rho2 = 0.2 + 5.0 * rng.uniform(3 * k + 2);
    const MetricSample m = metric_from_params(theta, rho1, rho2);
    double lo = 0.0, hi = 0.0;
    solve_eigenvalues(m, lo, hi);
    const double expected_lo = std::min(rho1 * rho1, rho2 * rho2);
    const double expected_hi = std::max(rho1 * rho1, rho2 * rho2);
    CHECK(std::abs(lo - expected_lo) <= 1e-10 * expected_hi);
    CHECK(std::abs(hi - expected_hi) <= 1e-10 * expected_hi);
    // det(H) h^2 = 1
    const double det = m.h11 * m.h22 - m.h12 * m.h12;
    CHECK(det * m.density * m.density == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("constant field repeats the parameters and is position-independent") {
  const TriMesh mesh = triangulate_grid(5, 4, 1.0, 1.0);
  const AnisotropyField field = constant_field(mesh, kPi / 4.0, 25.0, 8.0);
  CHECK(field.size() == mesh.node_count());
  const MetricSample first = metric_at_node(field, 0);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const MetricSample m = metric_at_centroid(mesh, field, t);
    CHECK(m.h11 == doctest::Approx(first.h11).epsilon(1e-12));
    CHECK(m.h12 == doctest::Approx(first.h12).epsilon(1e-12));
    CHECK(m.h22 == doctest::Approx(first.h22).epsilon(1e-12));
    CHECK(m.density == doctest::Approx(first.density).epsilon(1e-12));
  }
}

TEST_CASE("doubled-angle interpolation survives the pi wrap") {
  // angles just below pi and just above 0 describe nearly the same axis;
  // a naive average would produce a spurious ~pi/2 orientation
  const TriMesh mesh = triangulate_grid(2, 2, 1.0, 1.0);
  AnisotropyField field;
  field.theta = {kPi - 0.05, 0.05, kPi - 0.05, 0.05};
  field.rho1.assign(4, 3.0);
  field.rho2.assign(4, 1.0);
  const MetricSample m = metric_at_centroid(mesh, field, 0);
  const MetricSample near_axis = metric_from_params(0.0, 3.0, 1.0);
  CHECK(std::abs(m.h11 - near_axis.h11) < 0.1);
  CHECK(std::abs(m.h22 - near_axis.h22) < 0.1);
}

TEST_CASE("non-positive ranges are rejected") {
  CHECK_THROWS_AS(metric_from_params(0.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(metric_from_params(0.0, 1.0, -1.0), std::invalid_argument);
  const TriMesh mesh = triangulate_grid(2, 2, 1.0, 1.0);
  CHECK_THROWS_AS(constant_field(mesh, 0.0, -1.0, 1.0), std::invalid_argument);
  AnisotropyField bad = constant_field(mesh, 0.0, 1.0, 1.0);
  bad.rho2[2] = 0.0;
  CHECK_THROWS_AS(validate_field(bad, mesh.node_count()), std::invalid_argument);
  CHECK_THROWS_AS(validate_field(bad, 7), std::invalid_argument);
}
