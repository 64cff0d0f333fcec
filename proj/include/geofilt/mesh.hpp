#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace geofilt {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Triangulation of a regular 2D grid with piecewise-linear (P1) basis
/// bookkeeping. Nodes are stored row-major: node(i, j) = j * nx + i.
/// Each grid cell is split along its lower-left to upper-right diagonal
/// into two counter-clockwise triangles. Immutable after construction.
struct TriMesh {
  std::vector<Point2> nodes;
  std::vector<std::array<std::uint32_t, 3>> triangles;
  std::size_t nx = 0;
  std::size_t ny = 0;
  double dx = 0.0;
  double dy = 0.0;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
  std::size_t node_index(std::size_t i, std::size_t j) const {
    return j * nx + i;
  }
};

/// Geometry of one element: area, the three constant hat-function
/// gradients (ordered like the triangle's vertices) and the centroid.
struct ElementGeometry {
  double area = 0.0;
  std::array<Point2, 3> gradients;
  Point2 centroid;
};

TriMesh triangulate_grid(std::size_t nx, std::size_t ny, double dx, double dy);

ElementGeometry element_geometry(const TriMesh& mesh, std::size_t t);

}  // namespace geofilt
