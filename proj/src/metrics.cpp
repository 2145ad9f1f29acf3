#include "volfm/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace volfm {

namespace {

void write_double(std::ofstream& file, double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  file << buffer;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  return file;
}

void finish_csv(std::ofstream& file, const std::string& path) {
  if (!file) throw std::runtime_error("failed while writing " + path);
}

// Lazily computed single-source distance fields over one fixed graph.
class FieldCache {
 public:
  explicit FieldCache(const EdgeGraph& graph) : graph_(graph) {}

  const VecX& field(int source) {
    auto it = fields_.find(source);
    if (it == fields_.end())
      it = fields_.emplace(source, graph_.distances(source).distances).first;
    return it->second;
  }

 private:
  const EdgeGraph& graph_;
  std::unordered_map<int, VecX> fields_;
};

void check_total(const Correspondence& pi, int source_size, int target_size,
                 const char* name) {
  if (static_cast<int>(pi.size()) != source_size)
    throw std::invalid_argument(std::string(name) +
                                " does not cover every source vertex");
  for (int i = 0; i < source_size; ++i)
    if (pi(i) < 0 || pi(i) >= target_size)
      throw std::out_of_range(std::string(name) + " entry " + std::to_string(pi(i)) +
                              " is outside the target mesh");
}

ErrorCurve make_curve(const VecX& errors) {
  ErrorCurve curve;
  curve.age = errors.mean();

  std::vector<double> sorted(errors.data(), errors.data() + errors.size());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> thresholds;
  std::vector<double> fractions;
  const double total = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    // Keep the last element of each run so the fraction counts the full tie.
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    thresholds.push_back(sorted[i]);
    fractions.push_back(static_cast<double>(i + 1) / total);
  }
  curve.thresholds = Eigen::Map<VecX>(thresholds.data(), thresholds.size());
  curve.fractions = Eigen::Map<VecX>(fractions.data(), fractions.size());
  return curve;
}

GeodesicErrorStats error_stats_core(const Correspondence& pi, const Correspondence& pi_gt,
                                    const EdgeGraph& graph, double scale) {
  if (pi.size() != pi_gt.size())
    throw std::invalid_argument("correspondences differ in length");
  if (pi.size() == 0) throw std::invalid_argument("empty correspondence");
  check_total(pi, static_cast<int>(pi.size()), graph.num_vertices(), "map");
  check_total(pi_gt, static_cast<int>(pi_gt.size()), graph.num_vertices(),
              "ground truth");
  if (!(scale > 0.0)) throw std::invalid_argument("normalization scale must be positive");

  FieldCache cache(graph);
  GeodesicErrorStats stats;
  stats.per_vertex.resize(pi.size());
  for (int v = 0; v < static_cast<int>(pi.size()); ++v)
    stats.per_vertex[v] =
        pi(v) == pi_gt(v) ? 0.0 : cache.field(pi_gt(v))[pi(v)] / scale;
  stats.curve = make_curve(stats.per_vertex);
  return stats;
}

double normalization_value(const TetMesh& mesh, ErrorNormalization normalization) {
  switch (normalization) {
    case ErrorNormalization::Diameter:
      return mesh.bbox_diagonal();
    case ErrorNormalization::CbrtVolume:
      return std::cbrt(mesh.total_volume());
    case ErrorNormalization::SqrtArea:
      throw std::invalid_argument("area normalization needs a surface mesh");
  }
  throw std::invalid_argument("unknown normalization");
}

double normalization_value(const SurfaceMesh& mesh, ErrorNormalization normalization) {
  switch (normalization) {
    case ErrorNormalization::Diameter:
      return mesh.bbox_diagonal();
    case ErrorNormalization::SqrtArea:
      return std::sqrt(mesh.total_area());
    case ErrorNormalization::CbrtVolume:
      throw std::invalid_argument("volume normalization needs a tetrahedral mesh");
  }
  throw std::invalid_argument("unknown normalization");
}

MapQuality quality_core(const Correspondence& pi, const MatX& src_vertices,
                        const std::vector<std::pair<int, int>>& src_edges,
                        const SpMat& src_stiffness, const EdgeGraph& tgt_graph,
                        const VecX& tgt_mass, const MatX& tgt_vertices,
                        double tgt_diagonal) {
  check_total(pi, static_cast<int>(src_vertices.rows()), tgt_graph.num_vertices(),
              "correspondence");
  if (src_edges.empty()) throw std::invalid_argument("source mesh has no edges");

  MapQuality quality;

  FieldCache cache(tgt_graph);
  double ratio_sum = 0.0;
  for (const auto& [i, j] : src_edges) {
    double length = (src_vertices.row(i) - src_vertices.row(j)).norm();
    double image = pi(i) == pi(j) ? 0.0 : cache.field(pi(i))[pi(j)];
    ratio_sum += image / length;
  }
  quality.continuity = ratio_sum / static_cast<double>(src_edges.size());

  std::vector<char> hit(tgt_graph.num_vertices(), 0);
  for (int i = 0; i < static_cast<int>(pi.size()); ++i) hit[pi(i)] = 1;
  double covered = 0.0;
  for (int v = 0; v < tgt_graph.num_vertices(); ++v)
    if (hit[v]) covered += tgt_mass[v];
  quality.coverage = covered / tgt_mass.sum();

  double energy = 0.0;
  VecX pulled(src_vertices.rows());
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < static_cast<int>(pi.size()); ++i)
      pulled[i] = tgt_vertices(pi(i), c);
    energy += pulled.dot(src_stiffness * pulled);
  }
  quality.dirichlet = energy / (tgt_diagonal * tgt_diagonal);
  return quality;
}

}  // namespace

GeodesicErrorStats geodesic_error_stats(const Correspondence& pi,
                                        const Correspondence& pi_gt,
                                        const TetMesh& target,
                                        ErrorNormalization normalization) {
  EdgeGraph graph(target);
  return error_stats_core(pi, pi_gt, graph, normalization_value(target, normalization));
}

GeodesicErrorStats geodesic_error_stats(const Correspondence& pi,
                                        const Correspondence& pi_gt,
                                        const SurfaceMesh& target,
                                        ErrorNormalization normalization) {
  EdgeGraph graph(target);
  return error_stats_core(pi, pi_gt, graph, normalization_value(target, normalization));
}

FlipReport flip_report(const TetMesh& source, const MatX& mapped) {
  if (mapped.rows() != source.num_vertices() || mapped.cols() != 3)
    throw std::invalid_argument("mapped coordinates must be one 3D point per vertex");

  double diagonal = source.bbox_diagonal();
  double volume_floor = 1e-14 * diagonal * diagonal * diagonal;

  FlipReport report;
  report.per_tet_det.resize(source.num_tets());
  report.distortion.resize(source.num_tets());
  for (int t = 0; t < source.num_tets(); ++t) {
    Eigen::Matrix3d edges;
    Eigen::Matrix3d mapped_edges;
    for (int c = 0; c < 3; ++c) {
      edges.col(c) =
          (source.vertices.row(source.tets(t, c + 1)) - source.vertices.row(source.tets(t, 0)))
              .transpose();
      mapped_edges.col(c) =
          (mapped.row(source.tets(t, c + 1)) - mapped.row(source.tets(t, 0))).transpose();
    }
    double det_source = edges.determinant();
    if (std::abs(det_source) / 6.0 <= volume_floor)
      throw std::runtime_error("source tet " + std::to_string(t) +
                               " is degenerate, Jacobian undefined");
    double det = mapped_edges.determinant() / det_source;
    report.per_tet_det[t] = det;
    report.distortion[t] = std::abs(1.0 - det);
    if (det <= 0.0) ++report.flipped_count;
  }
  report.flipped_fraction =
      static_cast<double>(report.flipped_count) / static_cast<double>(source.num_tets());
  return report;
}

MapQuality map_quality(const Correspondence& pi, const TetMesh& source,
                       const TetMesh& target) {
  EdgeGraph src_graph(source);
  EdgeGraph tgt_graph(target);
  SpMat stiffness = assemble_volume_operators(source).stiffness;
  VecX mass = assemble_volume_operators(target).mass;
  return quality_core(pi, source.vertices, src_graph.edges(), stiffness, tgt_graph, mass,
                      target.vertices, target.bbox_diagonal());
}

MapQuality map_quality(const Correspondence& pi, const SurfaceMesh& source,
                       const SurfaceMesh& target) {
  EdgeGraph src_graph(source);
  EdgeGraph tgt_graph(target);
  SpMat stiffness = assemble_surface_operators(source).stiffness;
  VecX mass = assemble_surface_operators(target).mass;
  return quality_core(pi, source.vertices, src_graph.edges(), stiffness, tgt_graph, mass,
                      target.vertices, target.bbox_diagonal());
}

FmapQuality fmap_quality(const MatX& c, const VecX& evals_src, const VecX& evals_dst) {
  if (c.rows() == 0 || c.rows() != c.cols())
    throw std::invalid_argument("functional map must be square and non-empty");
  const int k = static_cast<int>(c.rows());
  if (evals_src.size() != k || evals_dst.size() != k)
    throw std::invalid_argument("need one eigenvalue per basis function on each side");

  FmapQuality quality;
  quality.orthogonality =
      (c.transpose() * c - MatX::Identity(k, k)).norm() / std::sqrt(double(k));

  MatX scaled = c * evals_src.asDiagonal();
  double denom = scaled.norm();
  if (!(denom > 0.0))
    throw std::runtime_error("commutativity is undefined when C * Lambda vanishes");
  quality.commutativity = (scaled - evals_dst.asDiagonal() * c).norm() / denom;
  return quality;
}

SpectrumComparison spectrum_offset_error(const VecX& evals_a, const VecX& evals_b,
                                         int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dimension must be 2 or 3");
  if (evals_a.size() == 0 || evals_a.size() != evals_b.size())
    throw std::invalid_argument("eigenvalue lists must be non-empty and equal length");
  auto check_ascending = [](const VecX& v) {
    if (!(v[0] >= 0.0))
      throw std::invalid_argument("eigenvalues must be non-negative and ascending");
    for (int i = 1; i < v.size(); ++i)
      if (!(v[i] >= v[i - 1]))
        throw std::invalid_argument("eigenvalues must be non-negative and ascending");
  };
  check_ascending(evals_a);
  check_ascending(evals_b);

  // Growth compensation: volume spectra grow like k^(2/3), so lambda^(3/2)
  // restores the linear growth the offset representation expects.
  VecX ta = dim == 3 ? VecX(evals_a.array().pow(1.5)) : evals_a;
  VecX tb = dim == 3 ? VecX(evals_b.array().pow(1.5)) : evals_b;

  SpectrumComparison out;
  out.dim = dim;
  const int k = static_cast<int>(ta.size());
  out.relative_diffs.resize(k);
  out.offset_diffs.resize(k);
  double prev_a = 0.0;
  double prev_b = 0.0;
  for (int i = 0; i < k; ++i) {
    double floor = std::max(std::max(ta[i], tb[i]), 1e-12);
    out.relative_diffs[i] = std::abs(ta[i] - tb[i]) / floor;
    out.offset_diffs[i] = std::abs((ta[i] - prev_a) - (tb[i] - prev_b));
    prev_a = ta[i];
    prev_b = tb[i];
  }
  return out;
}

DistortionStats geodesic_distortion_stats(const TetMesh& source, const TetMesh& target,
                                          const Correspondence& pi_gt, int num_samples,
                                          std::uint64_t seed) {
  if (num_samples < 1) throw std::invalid_argument("need at least one sample pair");
  check_total(pi_gt, source.num_vertices(), target.num_vertices(), "ground truth");

  SurfaceMesh boundary_src = extract_boundary(source);
  SurfaceMesh boundary_dst = extract_boundary(target);
  Correspondence surf_pi =
      restrict_correspondence_to_boundary(pi_gt, boundary_src, boundary_dst);

  EdgeGraph graph_surf_src(boundary_src);
  EdgeGraph graph_surf_dst(boundary_dst);
  EdgeGraph graph_vol_src(source);
  EdgeGraph graph_vol_dst(target);
  FieldCache surf_src(graph_surf_src);
  FieldCache surf_dst(graph_surf_dst);
  FieldCache vol_src(graph_vol_src);
  FieldCache vol_dst(graph_vol_dst);

  const int boundary_size = boundary_src.num_vertices();
  if (boundary_size < 2)
    throw std::runtime_error("boundary too small to sample distinct pairs");

  std::mt19937_64 rng(seed);
  auto draw = [&]() {
    return static_cast<int>(rng() % static_cast<std::uint64_t>(boundary_size));
  };

  std::vector<double> surf_errors;
  std::vector<double> vol_errors;
  surf_errors.reserve(num_samples);
  vol_errors.reserve(num_samples);

  long attempts = 0;
  const long budget = 100L * num_samples + 100;
  while (static_cast<int>(surf_errors.size()) < num_samples) {
    if (++attempts > budget)
      throw std::runtime_error("exhausted the resampling budget for distinct pairs");
    int x = draw();
    int y = draw();
    double d_surf_src = x == y ? 0.0 : surf_src.field(x)[y];
    if (!(d_surf_src > 0.0)) continue;
    int xv = boundary_src.parent_map[x];
    int yv = boundary_src.parent_map[y];
    double d_vol_src = vol_src.field(xv)[yv];
    if (!(d_vol_src > 0.0)) continue;

    double d_surf_dst = surf_dst.field(surf_pi(x))[surf_pi(y)];
    double d_vol_dst = vol_dst.field(pi_gt(xv))[pi_gt(yv)];
    surf_errors.push_back(std::abs(d_surf_src - d_surf_dst) / d_surf_src);
    vol_errors.push_back(std::abs(d_vol_src - d_vol_dst) / d_vol_src);
  }

  auto summarize = [](const std::vector<double>& values, double& mean, double& std_dev) {
    double sum = 0.0;
    for (double v : values) sum += v;
    mean = sum / static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    std_dev = std::sqrt(var / static_cast<double>(values.size()));
  };

  DistortionStats stats;
  stats.num_pairs = num_samples;
  summarize(surf_errors, stats.surf_mean, stats.surf_std);
  summarize(vol_errors, stats.vol_mean, stats.vol_std);
  return stats;
}

VecX boundary_trace_reconstruction_error(const MatX& trace, const MatX& surface_basis,
                                         const VecX& surface_mass) {
  if (trace.rows() == 0 || trace.cols() == 0)
    throw std::invalid_argument("empty boundary trace");
  if (surface_basis.rows() != trace.rows() || surface_mass.size() != trace.rows())
    throw std::invalid_argument("trace, surface basis and mass must share the vertex set");
  if (surface_basis.cols() != trace.cols())
    throw std::invalid_argument("pairwise comparison needs equal column counts");
  if ((surface_mass.array() <= 0.0).any())
    throw std::invalid_argument("surface mass must be positive");

  VecX root = surface_mass.cwiseSqrt();
  MatX lhs = root.asDiagonal() * trace;
  MatX rhs = root.asDiagonal() * surface_basis;
  for (int i = 0; i < rhs.cols(); ++i)
    if (std::abs(rhs.col(i).squaredNorm() - 1.0) > 1e-4)
      throw std::invalid_argument("surface basis function " + std::to_string(i) +
                                  " is not unit-norm under the mass weights");

  Eigen::ColPivHouseholderQR<MatX> qr(lhs);
  if (qr.rank() < trace.cols())
    throw std::runtime_error("boundary trace columns are rank-deficient");

  MatX projected = lhs * qr.solve(rhs);
  VecX errors(trace.cols());
  for (int i = 0; i < trace.cols(); ++i) {
    double kept = projected.col(i).squaredNorm();
    double lost = (rhs.col(i) - projected.col(i)).squaredNorm();
    // lost/(lost + kept) is the residual share of a Pythagorean split, so
    // it stays inside [0,1] in floating point as well.
    errors[i] = lost / (lost + kept);
  }
  return errors;
}

void save_error_curve(const std::string& path, const ErrorCurve& curve) {
  std::ofstream file = open_csv(path);
  file << "threshold,fraction\n";
  for (int i = 0; i < curve.thresholds.size(); ++i) {
    write_double(file, curve.thresholds[i]);
    file << ',';
    write_double(file, curve.fractions[i]);
    file << '\n';
  }
  finish_csv(file, path);
}

void save_flip_report(const std::string& path, const FlipReport& report) {
  std::ofstream file = open_csv(path);
  file << "tet,det,distortion\n";
  for (int t = 0; t < report.per_tet_det.size(); ++t) {
    file << t << ',';
    write_double(file, report.per_tet_det[t]);
    file << ',';
    write_double(file, report.distortion[t]);
    file << '\n';
  }
  finish_csv(file, path);
}

void save_spectrum_comparison(const std::string& path,
                              const SpectrumComparison& comparison) {
  std::ofstream file = open_csv(path);
  file << "index,relative_diff,offset_diff\n";
  for (int i = 0; i < comparison.relative_diffs.size(); ++i) {
    file << i << ',';
    write_double(file, comparison.relative_diffs[i]);
    file << ',';
    write_double(file, comparison.offset_diffs[i]);
    file << '\n';
  }
  finish_csv(file, path);
}

void save_distortion_stats(const std::string& path, const DistortionStats& stats) {
  std::ofstream file = open_csv(path);
  file << "region,mean,std,pairs\n";
  file << "surface,";
  write_double(file, stats.surf_mean);
  file << ',';
  write_double(file, stats.surf_std);
  file << ',' << stats.num_pairs << '\n';
  file << "volume,";
  write_double(file, stats.vol_mean);
  file << ',';
  write_double(file, stats.vol_std);
  file << ',' << stats.num_pairs << '\n';
  finish_csv(file, path);
}

}  // namespace volfm
