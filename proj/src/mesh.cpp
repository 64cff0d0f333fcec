#include "geofilt/mesh.hpp"

#include <stdexcept>
#include <string>

namespace geofilt {

TriMesh triangulate_grid(std::size_t nx, std::size_t ny, double dx,
                         double dy) {
  if (nx < 2 || ny < 2) {
    throw std::invalid_argument("triangulate_grid: need at least 2x2 nodes");
  }
  if (!(dx > 0.0) || !(dy > 0.0)) {
    throw std::invalid_argument("triangulate_grid: spacings must be positive");
  }

  TriMesh mesh;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.dx = dx;
  mesh.dy = dy;
  mesh.nodes.resize(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      mesh.nodes[j * nx + i] = {static_cast<double>(i) * dx,
                                static_cast<double>(j) * dy};
    }
  }

  mesh.triangles.reserve(2 * (nx - 1) * (ny - 1));
  for (std::size_t j = 0; j + 1 < ny; ++j) {
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const auto a = static_cast<std::uint32_t>(j * nx + i);
      const auto b = static_cast<std::uint32_t>(j * nx + i + 1);
      const auto c = static_cast<std::uint32_t>((j + 1) * nx + i + 1);
      const auto d = static_cast<std::uint32_t>((j + 1) * nx + i);
      // cell diagonal runs a -> c; both triangles are CCW
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }
  return mesh;
}

ElementGeometry element_geometry(const TriMesh& mesh, std::size_t t) {
  if (t >= mesh.triangle_count()) {
    throw std::invalid_argument("element_geometry: triangle index " +
                                std::to_string(t) + " out of range");
  }
  const auto& tri = mesh.triangles[t];
  const Point2 p0 = mesh.nodes[tri[0]];
  const Point2 p1 = mesh.nodes[tri[1]];
  const Point2 p2 = mesh.nodes[tri[2]];

  const double twice_area =
      (p1.x - p0.x) * (p2.y - p0.y) - (p1.y - p0.y) * (p2.x - p0.x);

  ElementGeometry geo;
  geo.area = 0.5 * twice_area;
  // gradient of hat k is the 90-degree rotation of the opposite edge,
  // scaled by 1 / (2 area)
  const Point2 e0{p2.x - p1.x, p2.y - p1.y};
  const Point2 e1{p0.x - p2.x, p0.y - p2.y};
  const Point2 e2{p1.x - p0.x, p1.y - p0.y};
  geo.gradients[0] = {-e0.y / twice_area, e0.x / twice_area};
  geo.gradients[1] = {-e1.y / twice_area, e1.x / twice_area};
  geo.gradients[2] = {-e2.y / twice_area, e2.x / twice_area};
  geo.centroid = {(p0.x + p1.x + p2.x) / 3.0, (p0.y + p1.y + p2.y) / 3.0};
  return geo;
}

}  // namespace geofilt
