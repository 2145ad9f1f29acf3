#include "volfm/laplacian.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace volfm {

namespace {

// Edge pairs (i,j) and the opposite edge (k,l) inside one tet.
constexpr int kEdgePairs[6][4] = {{0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2},
                                  {1, 2, 0, 3}, {1, 3, 2, 0}, {2, 3, 0, 1}};

SpMat stiffness_from_edge_weights(int n, const std::vector<Eigen::Triplet<double>>& off_diag) {
  // Duplicate triplets accumulate; diagonal entries come from row sums so
  // that S annihilates constants exactly.
  std::vector<Eigen::Triplet<double>> triplets = off_diag;
  VecX row_sum = VecX::Zero(n);
  for (const auto& t : off_diag) row_sum[t.row()] -= t.value();
  for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, row_sum[i]);

  SpMat S(n, n);
  S.setFromTriplets(triplets.begin(), triplets.end());
  S.makeCompressed();
  return S;
}

}  // namespace

LaplacianOperators assemble_volume_operators(const TetMesh& mesh) {
  const int n = mesh.num_vertices();
  const double diag = mesh.bbox_diagonal();
  const double vol_tol = 1e-14 * diag * diag * diag;

  LaplacianOperators ops;
  ops.domain_dim = 3;
  ops.mass = VecX::Zero(n);

  std::vector<Eigen::Triplet<double>> off_diag;
  off_diag.reserve(static_cast<size_t>(mesh.num_tets()) * 12);

  for (int t = 0; t < mesh.num_tets(); ++t) {
    const double vol = mesh.tet_volumes[t];
    if (vol <= vol_tol)
      throw std::runtime_error("assemble_volume_operators: tet " + std::to_string(t) +
                               " is degenerate (volume " + std::to_string(vol) + ")");

    Vec3 v[4];
    for (int c = 0; c < 4; ++c) v[c] = mesh.vertices.row(mesh.tets(t, c));

    for (const auto& p : kEdgePairs) {
      // Weight of edge (i,j) from the dihedral angle at the opposite edge
      // (k,l): |e_kl| cot(theta) / 6 = (|e|^2 (u.w) - (u.e)(w.e)) / (36 V),
      // with e = v_l - v_k, u = v_i - v_k, w = v_j - v_k.
      const Vec3 e = v[p[3]] - v[p[2]];
      const Vec3 u = v[p[0]] - v[p[2]];
      const Vec3 w = v[p[1]] - v[p[2]];
      const double weight = (e.squaredNorm() * u.dot(w) - u.dot(e) * w.dot(e)) / (36.0 * vol);

      const int i = mesh.tets(t, p[0]);
      const int j = mesh.tets(t, p[1]);
      off_diag.emplace_back(i, j, -weight);
      off_diag.emplace_back(j, i, -weight);
    }

    for (int c = 0; c < 4; ++c) ops.mass[mesh.tets(t, c)] += vol / 4.0;
  }

  ops.stiffness = stiffness_from_edge_weights(n, off_diag);
  return ops;
}

LaplacianOperators assemble_surface_operators(const SurfaceMesh& mesh) {
  const int n = mesh.num_vertices();
  const double diag = mesh.bbox_diagonal();
  const double area_tol = 1e-14 * diag * diag;

  LaplacianOperators ops;
  ops.domain_dim = 2;
  ops.mass = VecX::Zero(n);

  std::vector<Eigen::Triplet<double>> off_diag;
  off_diag.reserve(static_cast<size_t>(mesh.num_triangles()) * 6);

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Vec3 v[3];
    for (int c = 0; c < 3; ++c) v[c] = mesh.vertices.row(mesh.triangles(t, c));
    const double area = triangle_area(v[0], v[1], v[2]);
    if (area <= area_tol)
      throw std::runtime_error("assemble_surface_operators: triangle " + std::to_string(t) +
                               " is degenerate (area " + std::to_string(area) + ")");

    for (int c = 0; c < 3; ++c) {
      // Half-cotangent of the angle at vertex c, applied to the opposite
      // edge; cot = (u.w) / |u x w| and |u x w| = 2 area.
      const Vec3 u = v[(c + 1) % 3] - v[c];
      const Vec3 w = v[(c + 2) % 3] - v[c];
      const double half_cot = u.dot(w) / (4.0 * area);

      const int i = mesh.triangles(t, (c + 1) % 3);
      const int j = mesh.triangles(t, (c + 2) % 3);
      off_diag.emplace_back(i, j, -half_cot);
      off_diag.emplace_back(j, i, -half_cot);
      ops.mass[mesh.triangles(t, c)] += area / 3.0;
    }
  }

  ops.stiffness = stiffness_from_edge_weights(n, off_diag);
  return ops;
}

void export_stiffness_coo(const LaplacianOperators& ops, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write stiffness export: " + path);
  char buf[32];
  for (int col = 0; col < ops.stiffness.outerSize(); ++col) {
    for (SpMat::InnerIterator it(ops.stiffness, col); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%.17g", it.value());
      out << it.row() << " " << it.col() << " " << buf << "\n";
    }
  }
  if (!out) throw std::runtime_error("write failure on stiffness export: " + path);
}

void export_mass_diagonal(const LaplacianOperators& ops, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mass export: " + path);
  char buf[32];
  for (int i = 0; i < ops.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", ops.mass[i]);
    out << i << " " << buf << "\n";
  }
  if (!out) throw std::runtime_error("write failure on mass export: " + path);
}

}  // namespace volfm
