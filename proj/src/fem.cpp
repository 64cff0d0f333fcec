#include "geofilt/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace geofilt {

namespace {

struct ElementContribution {
  // upper triangle of the local 3x3 stiffness block, row-major:
  // (0,0) (0,1) (0,2) (1,1) (1,2) (2,2)
  double k[6];
  // lumped mass share area * h(centroid) / 3, identical for all 3 vertices
  double mass_share;
};

inline double metric_quadratic_form(const MetricSample& m, const Point2& a,
                                    const Point2& b) {
  return a.x * (m.h11 * b.x + m.h12 * b.y) + a.y * (m.h12 * b.x + m.h22 * b.y);
}

/// CSR pattern from triangle incidence: row i holds i plus every node
/// sharing a triangle with i, sorted ascending.
CsrMatrix build_pattern(const TriMesh& mesh) {
  const std::size_t n = mesh.node_count();
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    adj[i].push_back(static_cast<std::uint32_t>(i));
  }
  for (const auto& tri : mesh.triangles) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        if (a != b) adj[tri[static_cast<std::size_t>(a)]].push_back(tri[static_cast<std::size_t>(b)]);
      }
    }
  }
  CsrMatrix s;
  s.n_rows = n;
  s.n_cols = n;
  s.row_offsets.resize(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = adj[i];
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    s.row_offsets[i + 1] = s.row_offsets[i] + row.size();
  }
  s.cols.reserve(s.row_offsets[n]);
  for (std::size_t i = 0; i < n; ++i) {
    s.cols.insert(s.cols.end(), adj[i].begin(), adj[i].end());
  }
  s.vals.assign(s.cols.size(), 0.0);
  return s;
}

inline std::size_t csr_slot(const CsrMatrix& s, std::size_t row,
                            std::uint32_t col) {
  for (std::size_t k = s.row_offsets[row]; k < s.row_offsets[row + 1]; ++k) {
    if (s.cols[k] == col) return k;
  }
  throw std::logic_error("assembly: entry outside the sparsity pattern");
}

}  // namespace

FemOperator assemble(const TriMesh& mesh, const AnisotropyField& aniso) {
  const std::size_t n = mesh.node_count();
  const std::size_t ne = mesh.triangle_count();
  if (n == 0 || ne == 0) {
    throw std::invalid_argument("assemble: empty mesh");
  }
  validate_field(aniso, n);

  // Element contributions are independent; computed in parallel, then
  // scattered serially in fixed element order so the assembled values do
  // not depend on the thread count.
  std::vector<ElementContribution> contrib(ne);
  const std::int64_t ne_i = static_cast<std::int64_t>(ne);
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < ne_i; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    const ElementGeometry geo = element_geometry(mesh, ts);
    const MetricSample m = metric_at_centroid(mesh, aniso, ts);
    auto& out = contrib[ts];
    const double w = geo.area * m.density;
    out.mass_share = w / 3.0;
    int slot = 0;
    for (int a = 0; a < 3; ++a) {
      for (int b = a; b < 3; ++b) {
        out.k[slot++] = w * metric_quadratic_form(m, geo.gradients[static_cast<std::size_t>(a)],
                                                  geo.gradients[static_cast<std::size_t>(b)]);
      }
    }
  }

  FemOperator op;
  op.stiffness = build_pattern(mesh);
  std::vector<double> mass(n, 0.0);

  static constexpr int kSlotA[6] = {0, 0, 0, 1, 1, 2};
  static constexpr int kSlotB[6] = {0, 1, 2, 1, 2, 2};
  for (std::size_t t = 0; t < ne; ++t) {
    const auto& tri = mesh.triangles[t];
    const auto& c = contrib[t];
    for (int v = 0; v < 3; ++v) {
      mass[tri[static_cast<std::size_t>(v)]] += c.mass_share;
    }
    for (int slot = 0; slot < 6; ++slot) {
      const std::uint32_t i = tri[static_cast<std::size_t>(kSlotA[slot])];
      const std::uint32_t j = tri[static_cast<std::size_t>(kSlotB[slot])];
      op.stiffness.vals[csr_slot(op.stiffness, i, j)] += c.k[slot];
      if (i != j) {
        op.stiffness.vals[csr_slot(op.stiffness, j, i)] += c.k[slot];
      }
    }
  }

  op.c_inv_sqrt.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(mass[i] > 0.0)) {
      throw std::runtime_error("assemble: non-positive lumped mass at node " +
                               std::to_string(i));
    }
    op.c_inv_sqrt[i] = 1.0 / std::sqrt(mass[i]);
  }

  // normalize: S~_ij = S_ij / sqrt(m_i m_j)
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = op.stiffness.row_offsets[i];
         k < op.stiffness.row_offsets[i + 1]; ++k) {
      op.stiffness.vals[k] *=
          op.c_inv_sqrt[i] * op.c_inv_sqrt[op.stiffness.cols[k]];
    }
  }

  op.eig_upper = eig_upper_bound(op.stiffness);
  return op;
}

double eig_upper_bound(const CsrMatrix& stiffness) {
  if (stiffness.n_rows != stiffness.n_cols) {
    throw std::invalid_argument("eig_upper_bound: matrix must be square");
  }
  double gershgorin = 0.0;
  double frob_sq = 0.0;
  for (std::size_t i = 0; i < stiffness.n_rows; ++i) {
    double row_abs = 0.0;
    for (std::size_t k = stiffness.row_offsets[i];
         k < stiffness.row_offsets[i + 1]; ++k) {
      const double v = std::abs(stiffness.vals[k]);
      row_abs += v;
      frob_sq += v * v;
    }
    gershgorin = std::max(gershgorin, row_abs);
  }
  return std::min(gershgorin, std::sqrt(frob_sq));
}

}  // namespace geofilt
