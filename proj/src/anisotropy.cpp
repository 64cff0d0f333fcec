#include "geofilt/anisotropy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace geofilt {

MetricSample metric_from_params(double theta, double rho1, double rho2) {
  if (!(rho1 > 0.0) || !(rho2 > 0.0)) {
    throw std::invalid_argument("anisotropy ranges must be positive");
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double r1 = rho1 * rho1;
  const double r2 = rho2 * rho2;
  MetricSample m;
  m.h11 = c * c * r1 + s * s * r2;
  m.h22 = s * s * r1 + c * c * r2;
  m.h12 = c * s * (r1 - r2);
  m.density = 1.0 / (rho1 * rho2);
  return m;
}

AnisotropyField constant_field(const TriMesh& mesh, double theta, double rho1,
                               double rho2) {
  if (!(rho1 > 0.0) || !(rho2 > 0.0)) {
    throw std::invalid_argument("anisotropy ranges must be positive");
  }
  const std::size_t n = mesh.node_count();
  AnisotropyField field;
  field.theta.assign(n, theta);
  field.rho1.assign(n, rho1);
  field.rho2.assign(n, rho2);
  return field;
}

MetricSample metric_at_node(const AnisotropyField& field, std::size_t node) {
  if (node >= field.size()) {
    throw std::invalid_argument("metric_at_node: node index out of range");
  }
  return metric_from_params(field.theta[node], field.rho1[node],
                            field.rho2[node]);
}

MetricSample metric_at_centroid(const TriMesh& mesh,
                                const AnisotropyField& field, std::size_t t) {
  if (t >= mesh.triangle_count()) {
    throw std::invalid_argument("metric_at_centroid: triangle out of range");
  }
  const auto& tri = mesh.triangles[t];
  double cos2 = 0.0, sin2 = 0.0, rho1 = 0.0, rho2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const std::size_t v = tri[static_cast<std::size_t>(k)];
    cos2 += std::cos(2.0 * field.theta[v]);
    sin2 += std::sin(2.0 * field.theta[v]);
    rho1 += field.rho1[v];
    rho2 += field.rho2[v];
  }
  rho1 /= 3.0;
  rho2 /= 3.0;
  // degenerate doubled-angle mean (cos2 = sin2 = 0) falls back to theta = 0
  const double theta =
      (cos2 == 0.0 && sin2 == 0.0) ? 0.0 : 0.5 * std::atan2(sin2, cos2);
  return metric_from_params(theta, rho1, rho2);
}

void validate_field(const AnisotropyField& field, std::size_t n) {
  if (field.theta.size() != n || field.rho1.size() != n ||
      field.rho2.size() != n) {
    throw std::invalid_argument(
        "anisotropy field size does not match node count " +
        std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(field.rho1[i] > 0.0) || !(field.rho2[i] > 0.0)) {
      throw std::invalid_argument("anisotropy range must be positive at node " +
                                  std::to_string(i));
    }
  }
}

}  // namespace geofilt
