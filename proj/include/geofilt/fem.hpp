#pragma once

#include <vector>

#include "geofilt/anisotropy.hpp"
#include "geofilt/csr.hpp"
#include "geofilt/mesh.hpp"

namespace geofilt {

/// The two matrices behind every field component: the diagonal factor
/// holding 1/sqrt(<psi_i, h>) and the mass-normalized anisotropic stiffness
/// matrix, together with an upper bound on its spectrum. The stiffness is
/// symmetric positive semi-definite with the lumped-mass-scaled constant
/// vector (entries 1/c_inv_sqrt[i]) in its null space.
struct FemOperator {
  std::vector<double> c_inv_sqrt;
  CsrMatrix stiffness;
  double eig_upper = 0.0;

  std::size_t size() const { return c_inv_sqrt.size(); }
};

/// Assemble the lumped mass factor and normalized stiffness matrix from a
/// mesh and a per-node anisotropy field. The metric is frozen at element
/// centroids (one-point quadrature); hat-function gradients are constant
/// per element, so the stiffness integrals are exact for the frozen metric.
FemOperator assemble(const TriMesh& mesh, const AnisotropyField& aniso);

/// Upper bound on the largest eigenvalue of a symmetric matrix: the smaller
/// of the max row absolute sum and the Frobenius norm. Both are exact upper
/// bounds; the min tightens the Chebyshev interval at no extra cost.
double eig_upper_bound(const CsrMatrix& stiffness);

}  // namespace geofilt
