#pragma once

#include "volfm/laplacian.hpp"
#include "volfm/types.hpp"

#include <string>
#include <vector>

namespace volfm {

enum class BasisKind : unsigned { LBO = 0, CMH = 1, Orthoprods = 2 };

// Truncated spectral basis of a mesh: columns of `functions` are
// W-orthonormal, `eigenvalues` ascend. Augmented kinds relax the eigenpair
// relation: CMH carries NaN eigenvalue sentinels for its coordinate columns,
// Orthoprods carries pseudo-eigenvalues of the product construction.
// `boundary_trace` (optional) stores the rows of `functions` at boundary
// vertices, with trace_parents mapping trace rows to volume vertex indices.
struct SpectralBasis {
  MatX functions;    // n x k
  VecX eigenvalues;  // k
  VecX mass;         // diagonal of the W the basis is orthonormal under
  BasisKind kind = BasisKind::LBO;

  MatX boundary_trace;  // n_b x k, empty when absent
  std::vector<int> trace_parents;

  int num_vertices() const { return static_cast<int>(functions.rows()); }
  int size() const { return static_cast<int>(functions.cols()); }
  bool has_mass() const { return mass.size() == functions.rows() && mass.size() > 0; }
  bool has_trace() const { return boundary_trace.size() > 0; }

  // Column-prefix truncation; for CMH this drops the coordinate columns.
  SpectralBasis truncated(int k) const;
};

struct EigenSolveOptions {
  double tol = 1e-10;            // Ritz residual bound, relative
  int max_matvec_factor = 50;    // matvec budget = factor * k
  unsigned long long seed = 0;   // start-vector perturbation
};

// Smallest-k eigenpairs of S phi = lambda W phi by shift-invert Lanczos with
// thick restarts and full W-reorthogonalization. Deterministic for a fixed
// seed; eigenfunction signs are normalized (first largest-magnitude entry
// positive) and noise-level negative eigenvalues are snapped to zero.
SpectralBasis compute_eigenbasis(const LaplacianOperators& ops, int k,
                                 const EigenSolveOptions& options = {});

// Full dense decomposition of W^{-1/2} S W^{-1/2}, as an independent oracle.
// Guarded to n <= 3000. k < 0 keeps all n pairs.
SpectralBasis dense_eigen_oracle(const LaplacianOperators& ops, int k = -1);

// Binary basis cache (magic "VFMB"). Stores sizes, kind, eigenvalues,
// functions and the optional boundary trace; the mass vector is not stored
// and must be reattached from the mesh after loading.
void save_basis(const SpectralBasis& basis, const std::string& path);
SpectralBasis load_basis(const std::string& path);

}  // namespace volfm
