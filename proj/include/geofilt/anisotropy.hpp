#pragma once

#include <cstddef>
#include <vector>

#include "geofilt/mesh.hpp"

namespace geofilt {

/// Per-node anisotropy parameters: angle theta (radians, counter-clockwise
/// from the +x axis to the first-range axis) and the two ranges rho1, rho2.
/// Immutable after construction; shared read-only across threads.
struct AnisotropyField {
  std::vector<double> theta;
  std::vector<double> rho1;
  std::vector<double> rho2;

  std::size_t size() const { return theta.size(); }
};

/// Local metric tensor H = R(theta) diag(rho1^2, rho2^2) R(theta)^T
/// (symmetric positive-definite) and its volume density
/// h = sqrt(det H^-1) = 1 / (rho1 rho2).
struct MetricSample {
  double h11 = 0.0;
  double h12 = 0.0;
  double h22 = 0.0;
  double density = 0.0;
};

MetricSample metric_from_params(double theta, double rho1, double rho2);

/// Field with identical parameters at every node.
AnisotropyField constant_field(const TriMesh& mesh, double theta, double rho1,
                               double rho2);

MetricSample metric_at_node(const AnisotropyField& field, std::size_t node);

/// Metric at the centroid of element t. The ranges interpolate linearly;
/// the angle interpolates on the doubled-angle circle so that neighboring
/// angles straddling the pi-periodicity do not produce spurious metrics.
MetricSample metric_at_centroid(const TriMesh& mesh,
                                const AnisotropyField& field, std::size_t t);

/// Throws if the field does not have n entries per parameter or contains a
/// non-positive range.
void validate_field(const AnisotropyField& field, std::size_t n);

}  // namespace geofilt
