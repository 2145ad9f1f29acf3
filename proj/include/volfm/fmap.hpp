#pragma once

#include "volfm/basis.hpp"

#include <string>
#include <vector>

namespace volfm {

enum class DescriptorKind { WKS = 0, LandmarkIndicator = 1 };

// Per-vertex descriptor matrix plus the spectral energy grid it was
// evaluated on. One column per energy (times one block per landmark for
// the landmark kind).
struct DescriptorSet {
  MatX values;
  DescriptorKind kind = DescriptorKind::WKS;
  VecX energies;
  double sigma = 0.0;

  int num_vertices() const { return static_cast<int>(values.rows()); }
  int size() const { return static_cast<int>(values.cols()); }
};

// Spectral representation of a map. C is k_src x k_dst and transports
// coefficient vectors of the destination basis into the source basis, so
// src_functions * C approximates the destination functions pulled back
// through the underlying vertex map.
struct FunctionalMap {
  MatX C;
  BasisKind src_kind = BasisKind::LBO;
  BasisKind dst_kind = BasisKind::LBO;

  int rows() const { return static_cast<int>(C.rows()); }
  int cols() const { return static_cast<int>(C.cols()); }
};

struct FmapWeights {
  double descriptor = 1.0;
  // Negative selects the scale-aware default
  // 1e-3 * |A_src|_F^2 / mean squared eigenvalue gap.
  double commutativity = -1.0;
};

// Wave kernel signature columns over a log-spaced energy grid. Skips the
// constant mode; each column is normalized by its total Gaussian weight so
// sign flips and eigenvalue multiplicity splits cancel out.
DescriptorSet compute_wks(const SpectralBasis& basis, int num_energies);

// Spectrally blurred indicator functions centered at the given vertices,
// one column per (landmark, energy) pair with the landmark index varying
// slowest. Shares the WKS energy grid construction.
DescriptorSet compute_landmark_descriptors(const SpectralBasis& basis,
                                           const std::vector<int>& landmarks,
                                           int num_energies);

// Least-squares functional map from descriptor preservation with a
// diagonal commutativity penalty, solved row by row in closed form.
FunctionalMap estimate_fmap(const DescriptorSet& desc_src, const DescriptorSet& desc_dst,
                            const SpectralBasis& basis_src, const SpectralBasis& basis_dst,
                            int k_init, const FmapWeights& weights = {});

// Exact nearest neighbor of every query row among the target rows in
// squared Euclidean distance. Ties resolve to the smallest target index.
std::vector<int> nearest_rows(const MatX& queries, const MatX& targets);

// Vertex map recovered from a functional map by nearest-neighbor search
// between the aligned spectral embeddings.
Correspondence extract_p2p(const SpectralBasis& basis_src, const SpectralBasis& basis_dst,
                           const FunctionalMap& map);

// Functional map induced by a known vertex map, via the mass-weighted
// adjoint of the source basis.
FunctionalMap fmap_from_p2p(const Correspondence& pi, const SpectralBasis& basis_src,
                            const SpectralBasis& basis_dst, int k);

// Same conversion restricted to paired vertex subsets, solved in the
// unweighted least-squares sense. rows_src[s] on the source mesh is matched
// with rows_dst[s] on the destination mesh.
FunctionalMap fmap_from_p2p_subset(const std::vector<int>& rows_src,
                                   const std::vector<int>& rows_dst,
                                   const SpectralBasis& basis_src,
                                   const SpectralBasis& basis_dst, int k);

// Spectral upsampling: alternate nearest-neighbor extraction at the
// current size and map re-estimation at the next size until k_final.
// A non-empty sample set restricts extraction to those source vertices and
// switches re-estimation to the subset least-squares form.
FunctionalMap zoomout(const FunctionalMap& initial, const SpectralBasis& basis_src,
                      const SpectralBasis& basis_dst, int k_final, int step,
                      const std::vector<int>& samples = {});

// Text format: header line "rows cols", then one comma-separated row per
// line. Basis kind stamps are not serialized.
void save_fmap(const std::string& path, const FunctionalMap& map);
FunctionalMap load_fmap(const std::string& path);

}  // namespace volfm
