#pragma once

#include "volfm/fmap.hpp"
#include "volfm/metrics.hpp"

#include <string>
#include <vector>

namespace volfm {

enum class TransferMode { Transfer = 0, Extrapolate = 1 };

// Source connectivity carrying coordinates pulled from the target. The
// embedded flip report always refers to the source tets against the new
// coordinates.
struct TransferResult {
  TetMesh mesh;
  FlipReport flips;
  TransferMode mode = TransferMode::Transfer;
  int k_used = 0;
};

// Coordinate transfer through a boundary-aligned functional map: the map is
// fit on the boundary traces by least squares, then applied to the spectral
// coefficients of the target coordinates. Negative entries in pi_surf mark
// unmapped boundary vertices; their rows drop out of the fit.
TransferResult transfer_connectivity(const TetMesh& source, const TetMesh& target,
                                     const SpectralBasis& basis_src,
                                     const SpectralBasis& basis_dst,
                                     const Correspondence& pi_surf, int k);
// Convenience form computing plain eigenbases of size k on both meshes.
TransferResult transfer_connectivity(const TetMesh& source, const TetMesh& target,
                                     const Correspondence& pi_surf, int k,
                                     const EigenSolveOptions& options = {});

// Coordinate extrapolation from a target surface only: boundary rows of the
// source basis are fit to the mapped surface coordinates and the resulting
// coefficients are evaluated on the whole volume. Needs no target spectrum.
TransferResult extrapolate_coordinates(const TetMesh& source,
                                       const SurfaceMesh& target_surface,
                                       const SpectralBasis& basis_src,
                                       const Correspondence& pi_surf, int k);
TransferResult extrapolate_coordinates(const TetMesh& source,
                                       const SurfaceMesh& target_surface,
                                       const Correspondence& pi_surf, int k,
                                       const EigenSolveOptions& options = {});

// Full matching pipeline: volumetric spectra, wave kernel descriptors,
// descriptor-preservation estimate, spectral upsampling, and a final
// nearest-neighbor extraction restricted to the boundary traces. Sizes are
// clamped to the smaller mesh when it cannot hold the requested spectrum.
struct MatchConfig {
  int k_init = 20;
  int k_final = 120;
  int step = 5;
  int num_energies = 100;
  int descriptor_k = 200;
  bool fast_zoomout = true;  // refine on boundary samples only
  // Optional paired volume vertex indices appended as indicator descriptors.
  // Wave kernel values cannot tell a vertex from its image under an intrinsic
  // symmetry; a landmark off the symmetry set disambiguates.
  std::vector<int> landmarks_src;
  std::vector<int> landmarks_dst;
  FmapWeights weights;
  EigenSolveOptions eigen_options;
};

Correspondence vol2surf_match(const TetMesh& source, const TetMesh& target,
                              const MatchConfig& config = {});
// Variant running on precomputed bases (basis caching); sizes clamp to the
// smaller basis. The final functional map is returned through out_map when
// non-null.
Correspondence vol2surf_match(const TetMesh& source, const TetMesh& target,
                              const SpectralBasis& basis_src,
                              const SpectralBasis& basis_dst,
                              const MatchConfig& config = {},
                              FunctionalMap* out_map = nullptr);

// Pulls integer labels back through a vertex map: out[i] = labels[pi(i)].
std::vector<int> transfer_labels(const Correspondence& pi,
                                 const std::vector<int>& labels);

// Writes the transferred mesh in MEDIT format plus a "<path>.flips" text
// sidecar holding one determinant sign per tet after a summary line.
void export_warm_start(const TransferResult& result, const std::string& path);

}  // namespace volfm
