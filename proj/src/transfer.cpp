#include "volfm/transfer.hpp"

#include "volfm/basis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace volfm {

namespace {

// Rows of the boundary fit: mapped boundary vertices only, targets bounds
// checked against the destination vertex count.
struct MappedRows {
  std::vector<int> sources;
  std::vector<int> targets;
};

MappedRows collect_mapped(const Correspondence& pi_surf, int boundary_size,
                          int target_size, int k) {
  if (static_cast<int>(pi_surf.size()) != boundary_size)
    throw std::invalid_argument(
        "surface correspondence does not cover the source boundary");
  MappedRows rows;
  rows.sources.reserve(boundary_size);
  rows.targets.reserve(boundary_size);
  for (int i = 0; i < boundary_size; ++i) {
    int t = pi_surf(i);
    if (t < 0) continue;
    if (t >= target_size)
      throw std::out_of_range("surface correspondence target " + std::to_string(t) +
                              " out of range");
    rows.sources.push_back(i);
    rows.targets.push_back(t);
  }
  if (static_cast<int>(rows.sources.size()) < k)
    throw std::invalid_argument("fewer mapped boundary vertices than basis functions");
  return rows;
}

// Least-squares coefficients X minimizing |A X - B|_F with a rank guard.
MatX solve_boundary_fit(const MatX& a, const MatX& b) {
  Eigen::ColPivHouseholderQR<MatX> qr(a);
  const int k = static_cast<int>(a.cols());
  if (qr.rank() < k) {
    double head = std::abs(qr.matrixR()(0, 0));
    double tail = std::abs(qr.matrixR()(k - 1, k - 1));
    double cond = tail > 0.0 ? head / tail : std::numeric_limits<double>::infinity();
    throw std::runtime_error("boundary trace is rank-deficient (condition estimate " +
                             std::to_string(cond) + ")");
  }
  return qr.solve(b);
}

TransferResult finish_result(const TetMesh& source, MatX coordinates, TransferMode mode,
                             int k) {
  TransferResult result;
  result.mesh.vertices = std::move(coordinates);
  result.mesh.tets = source.tets;
  recompute_tet_volumes(result.mesh);
  result.flips = flip_report(source, result.mesh.vertices);
  result.mode = mode;
  result.k_used = k;
  return result;
}

void append_descriptors(DescriptorSet& base, const DescriptorSet& extra) {
  MatX joined(base.values.rows(), base.values.cols() + extra.values.cols());
  joined << base.values, extra.values;
  base.values = std::move(joined);
}

void check_basis_fits(const SpectralBasis& basis, const TetMesh& mesh, int k,
                      const char* which) {
  if (basis.num_vertices() != mesh.num_vertices())
    throw std::invalid_argument(std::string(which) + " basis does not match its mesh");
  if (k < 1 || k > basis.size())
    throw std::invalid_argument("transfer size must be in [1, basis size]");
  if (!basis.has_mass())
    throw std::invalid_argument(std::string(which) + " basis has no mass attached");
}

}  // namespace

TransferResult transfer_connectivity(const TetMesh& source, const TetMesh& target,
                                     const SpectralBasis& basis_src,
                                     const SpectralBasis& basis_dst,
                                     const Correspondence& pi_surf, int k) {
  if (basis_src.kind != basis_dst.kind)
    throw std::invalid_argument("source and target basis kinds differ");
  check_basis_fits(basis_src, source, k, "source");
  check_basis_fits(basis_dst, target, k, "target");

  SpectralBasis bs = basis_src.truncated(k);
  SpectralBasis bd = basis_dst.truncated(k);
  SurfaceMesh boundary_src = extract_boundary(source);
  SurfaceMesh boundary_dst = extract_boundary(target);
  MatX trace_src = restrict_to_boundary(bs, boundary_src);
  MatX trace_dst = restrict_to_boundary(bd, boundary_dst);

  MappedRows rows = collect_mapped(pi_surf, boundary_src.num_vertices(),
                                   boundary_dst.num_vertices(), k);
  MatX a = trace_src(rows.sources, Eigen::all);
  MatX pulled = trace_dst(rows.targets, Eigen::all);
  MatX c = solve_boundary_fit(a, pulled);

  // Spectral coefficients of the target coordinates, mapped into the source
  // basis and evaluated on the volume.
  MatX target_coeff = bd.functions.transpose() * (bd.mass.asDiagonal() * target.vertices);
  MatX coordinates = bs.functions * (c * target_coeff);
  return finish_result(source, std::move(coordinates), TransferMode::Transfer, k);
}

TransferResult transfer_connectivity(const TetMesh& source, const TetMesh& target,
                                     const Correspondence& pi_surf, int k,
                                     const EigenSolveOptions& options) {
  SpectralBasis basis_src = compute_eigenbasis(assemble_volume_operators(source), k, options);
  SpectralBasis basis_dst = compute_eigenbasis(assemble_volume_operators(target), k, options);
  return transfer_connectivity(source, target, basis_src, basis_dst, pi_surf, k);
}

TransferResult extrapolate_coordinates(const TetMesh& source,
                                       const SurfaceMesh& target_surface,
                                       const SpectralBasis& basis_src,
                                       const Correspondence& pi_surf, int k) {
  check_basis_fits(basis_src, source, k, "source");

  SpectralBasis bs = basis_src.truncated(k);
  SurfaceMesh boundary_src = extract_boundary(source);
  MatX trace_src = restrict_to_boundary(bs, boundary_src);

  MappedRows rows = collect_mapped(pi_surf, boundary_src.num_vertices(),
                                   target_surface.num_vertices(), k);
  MatX a = trace_src(rows.sources, Eigen::all);
  MatX pulled = target_surface.vertices(rows.targets, Eigen::all);

  MatX coefficients = solve_boundary_fit(a, pulled);
  MatX coordinates = bs.functions * coefficients;
  return finish_result(source, std::move(coordinates), TransferMode::Extrapolate, k);
}

TransferResult extrapolate_coordinates(const TetMesh& source,
                                       const SurfaceMesh& target_surface,
                                       const Correspondence& pi_surf, int k,
                                       const EigenSolveOptions& options) {
  SpectralBasis basis_src = compute_eigenbasis(assemble_volume_operators(source), k, options);
  return extrapolate_coordinates(source, target_surface, basis_src, pi_surf, k);
}

Correspondence vol2surf_match(const TetMesh& source, const TetMesh& target,
                              const MatchConfig& config) {
  if (config.k_init < 1 || config.step < 1 || config.num_energies < 1 ||
      config.descriptor_k < 2)
    throw std::invalid_argument("matching configuration out of range");

  const int cap = std::min(source.num_vertices(), target.num_vertices());
  const int k_basis =
      std::min(std::max(config.k_final, config.descriptor_k), cap);

  SpectralBasis basis_src =
      compute_eigenbasis(assemble_volume_operators(source), k_basis, config.eigen_options);
  SpectralBasis basis_dst =
      compute_eigenbasis(assemble_volume_operators(target), k_basis, config.eigen_options);
  return vol2surf_match(source, target, basis_src, basis_dst, config);
}

Correspondence vol2surf_match(const TetMesh& source, const TetMesh& target,
                              const SpectralBasis& basis_src,
                              const SpectralBasis& basis_dst,
                              const MatchConfig& config, FunctionalMap* out_map) {
  if (config.k_init < 1 || config.step < 1 || config.num_energies < 1 ||
      config.descriptor_k < 2)
    throw std::invalid_argument("matching configuration out of range");
  check_basis_fits(basis_src, source, 1, "source");
  check_basis_fits(basis_dst, target, 1, "target");

  const int cap = std::min(basis_src.size(), basis_dst.size());
  const int k_final = std::min(config.k_final, cap);
  const int k_init = std::min(config.k_init, k_final);
  const int k_desc = std::min(config.descriptor_k, cap);

  DescriptorSet desc_src = compute_wks(basis_src.truncated(k_desc), config.num_energies);
  DescriptorSet desc_dst = compute_wks(basis_dst.truncated(k_desc), config.num_energies);
  if (!config.landmarks_src.empty() || !config.landmarks_dst.empty()) {
    if (config.landmarks_src.size() != config.landmarks_dst.size())
      throw std::invalid_argument("landmark lists must pair up");
    append_descriptors(desc_src, compute_landmark_descriptors(basis_src.truncated(k_desc),
                                                              config.landmarks_src,
                                                              config.num_energies));
    append_descriptors(desc_dst, compute_landmark_descriptors(basis_dst.truncated(k_desc),
                                                              config.landmarks_dst,
                                                              config.num_energies));
  }
  FunctionalMap map =
      estimate_fmap(desc_src, desc_dst, basis_src, basis_dst, k_init, config.weights);

  SurfaceMesh boundary_src = extract_boundary(source);
  SurfaceMesh boundary_dst = extract_boundary(target);
  if (k_final > k_init) {
    const std::vector<int> no_samples;
    const std::vector<int>& samples =
        config.fast_zoomout ? boundary_src.parent_map : no_samples;
    map = zoomout(map, basis_src, basis_dst, k_final, config.step, samples);
  }

  // Nearest-neighbor extraction between the boundary traces only.
  MatX trace_src = restrict_to_boundary(basis_src.truncated(map.rows()), boundary_src);
  MatX trace_dst = restrict_to_boundary(basis_dst.truncated(map.cols()), boundary_dst);
  Correspondence pi;
  pi.map = nearest_rows(trace_src * map.C, trace_dst);
  pi.target_size = boundary_dst.num_vertices();
  if (out_map) *out_map = std::move(map);
  return pi;
}

std::vector<int> transfer_labels(const Correspondence& pi, const std::vector<int>& labels) {
  if (pi.size() == 0) throw std::invalid_argument("empty correspondence");
  if (pi.target_size >= 0 && pi.target_size != static_cast<int>(labels.size()))
    throw std::invalid_argument("label count does not match the correspondence target");
  std::vector<int> out(pi.size());
  for (int i = 0; i < static_cast<int>(pi.size()); ++i) {
    int t = pi(i);
    if (t < 0 || t >= static_cast<int>(labels.size()))
      throw std::out_of_range("correspondence target " + std::to_string(t) +
                              " has no label");
    out[i] = labels[t];
  }
  return out;
}

void export_warm_start(const TransferResult& result, const std::string& path) {
  save_mesh(result.mesh, path);

  std::ofstream sidecar(path + ".flips");
  if (!sidecar) throw std::runtime_error("cannot open " + path + ".flips for writing");
  sidecar << "# flipped " << result.flips.flipped_count << " / "
          << result.flips.per_tet_det.size() << " fraction "
          << result.flips.flipped_fraction << '\n';
  for (int t = 0; t < result.flips.per_tet_det.size(); ++t) {
    double det = result.flips.per_tet_det[t];
    sidecar << (det > 0.0 ? 1 : (det < 0.0 ? -1 : 0)) << '\n';
  }
  if (!sidecar) throw std::runtime_error("failed while writing " + path + ".flips");
}

}  // namespace volfm
