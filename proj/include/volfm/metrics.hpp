#pragma once

#include "volfm/laplacian.hpp"
#include "volfm/mesh.hpp"

#include <cstdint>
#include <string>

namespace volfm {

// Length scale used to make geodesic errors unitless.
enum class ErrorNormalization { Diameter = 0, SqrtArea = 1, CbrtVolume = 2 };

// Cumulative distribution of per-vertex errors. Thresholds are the sorted
// distinct error values, so the fractions are non-decreasing and reach 1
// exactly at the maximum error.
struct ErrorCurve {
  VecX thresholds;
  VecX fractions;
  double age = 0.0;  // mean error, same normalized units
};

struct GeodesicErrorStats {
  VecX per_vertex;
  ErrorCurve curve;
};

// Signed volume ratio of every mapped tet against its source. A flip is a
// non-positive determinant; distortion is |1 - det|.
struct FlipReport {
  VecX per_tet_det;
  VecX distortion;
  int flipped_count = 0;
  double flipped_fraction = 0.0;
};

struct MapQuality {
  double continuity = 0.0;  // mean image-to-source length ratio over edges
  double coverage = 0.0;    // mass fraction of the image vertex set
  double dirichlet = 0.0;   // smoothness of the pulled-back coordinates
};

struct FmapQuality {
  double orthogonality = 0.0;  // |C^T C - I|_F / |I|_F
  double commutativity = 0.0;  // |C L_src - L_dst C|_F / |C L_src|_F
};

// Pairwise eigenvalue comparison after the dimension-dependent growth
// compensation (values mapped to lambda^{3/2} for volumes).
struct SpectrumComparison {
  VecX relative_diffs;
  VecX offset_diffs;
  int dim = 3;
};

// Relative change of geodesic distances under a ground-truth map, measured
// on the boundary surfaces and inside the volumes over the same point pairs.
struct DistortionStats {
  double surf_mean = 0.0;
  double surf_std = 0.0;
  double vol_mean = 0.0;
  double vol_std = 0.0;
  int num_pairs = 0;
};

// Per-vertex normalized geodesic distance between pi and the ground truth
// on the target, plus the cumulative curve and its mean.
GeodesicErrorStats geodesic_error_stats(const Correspondence& pi,
                                        const Correspondence& pi_gt,
                                        const TetMesh& target,
                                        ErrorNormalization normalization);
GeodesicErrorStats geodesic_error_stats(const Correspondence& pi,
                                        const Correspondence& pi_gt,
                                        const SurfaceMesh& target,
                                        ErrorNormalization normalization);

// Jacobian determinant of the per-tet affine map from source vertices to
// the mapped coordinates.
FlipReport flip_report(const TetMesh& source, const MatX& mapped);

MapQuality map_quality(const Correspondence& pi, const TetMesh& source,
                       const TetMesh& target);
MapQuality map_quality(const Correspondence& pi, const SurfaceMesh& source,
                       const SurfaceMesh& target);

FmapQuality fmap_quality(const MatX& c, const VecX& evals_src, const VecX& evals_dst);

// Symmetric in its two arguments. dim is 2 for surfaces and 3 for volumes;
// the caller is expected to pass spectra of unit-area/unit-volume meshes.
SpectrumComparison spectrum_offset_error(const VecX& evals_a, const VecX& evals_b,
                                         int dim);

// Samples random boundary vertex pairs (deterministic under seed); pairs at
// zero source distance are redrawn.
DistortionStats geodesic_distortion_stats(const TetMesh& source, const TetMesh& target,
                                          const Correspondence& pi_gt, int num_samples,
                                          std::uint64_t seed);

// Mass-weighted least-squares residual of every surface basis function
// against the span of the trace columns. Each result is a ratio of
// non-negative parts of a Pythagorean split, so it lies in [0,1] without
// clamping; the surface basis must be unit-norm in the given mass weights.
VecX boundary_trace_reconstruction_error(const MatX& trace, const MatX& surface_basis,
                                         const VecX& surface_mass);

// CSV exports, one header line each.
void save_error_curve(const std::string& path, const ErrorCurve& curve);
void save_flip_report(const std::string& path, const FlipReport& report);
void save_spectrum_comparison(const std::string& path, const SpectrumComparison& comparison);
void save_distortion_stats(const std::string& path, const DistortionStats& stats);

}  // namespace volfm
