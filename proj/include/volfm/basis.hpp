#pragma once

#include "volfm/mesh.hpp"
#include "volfm/spectral.hpp"
#include "volfm/types.hpp"

namespace volfm {

// Spectral coefficients of multi-channel signals. All basis kinds produced
// here are W-orthonormal, so projection is the mass-weighted adjoint.
MatX project(const SpectralBasis& basis, const MatX& signal);
MatX reconstruct(const SpectralBasis& basis, const MatX& coeffs);

// Rows of the basis at the boundary vertices of `surface` (which must carry
// a parent map into the volume mesh the basis lives on).
MatX restrict_to_boundary(const SpectralBasis& basis, const SurfaceMesh& surface);

// Stores the trace and the parent indices inside the basis.
void attach_boundary_trace(SpectralBasis& basis, const SurfaceMesh& surface);

// Least-squares coefficients of a surface signal against the boundary trace.
// The plain variant is the unweighted Moore-Penrose solve; the weighted
// variant solves in the surface-mass inner product.
MatX project_boundary(const MatX& trace, const MatX& signal);
MatX project_boundary_weighted(const MatX& trace, const VecX& boundary_mass, const MatX& signal);

// Replaces the last 3 basis functions with the xyz coordinate functions,
// W-orthogonalized against the retained ones and among themselves. Their
// eigenvalue slots become NaN sentinels.
SpectralBasis augment_cmh(const SpectralBasis& basis, const MatX& coordinates);

// Extends the basis with pointwise eigenfunction products phi_i phi_j
// (i <= j), W-orthogonalized with a drop tolerance; pseudo-eigenvalues are
// lambda_i + lambda_j. Column order: originals (ascending lambda), then
// products by ascending eigenvalue sum.
SpectralBasis build_orthoprods(const SpectralBasis& basis, int order = 2);

}  // namespace volfm
