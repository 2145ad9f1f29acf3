#pragma once

#include "volfm/mesh.hpp"
#include "volfm/types.hpp"

#include <string>

namespace volfm {

// Stiffness/lumped-mass pair of the cotangent Laplace-Beltrami operator.
// S is symmetric positive semi-definite with zero row sums (the constant
// function spans its null space under natural Neumann conditions); W is the
// diagonal of the lumped mass matrix and sums to the total volume (dim 3)
// or area (dim 2).
struct LaplacianOperators {
  SpMat stiffness;
  VecX mass;
  int domain_dim = 3;

  int size() const { return static_cast<int>(mass.size()); }
  double total_mass() const { return mass.sum(); }
};

// Edge weight w_ij = 1/6 sum over incident tets of |v_k - v_l| cot(theta_kl),
// theta_kl the dihedral angle at the opposite edge; vertex mass = incident
// tet volumes / 4.
LaplacianOperators assemble_volume_operators(const TetMesh& mesh);

// Classic surface cotangent weights (cot alpha + cot beta)/2 with barycentric
// lumped mass (incident triangle areas / 3).
LaplacianOperators assemble_surface_operators(const SurfaceMesh& mesh);

// Plain-text exports for cross-checking against external tools: stiffness as
// "row col value" triplets, mass as "index value" lines.
void export_stiffness_coo(const LaplacianOperators& ops, const std::string& path);
void export_mass_diagonal(const LaplacianOperators& ops, const std::string& path);

}  // namespace volfm
