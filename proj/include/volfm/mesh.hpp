#pragma once

#include "volfm/types.hpp"

#include <Eigen/Geometry>

#include <string>
#include <utility>
#include <vector>

namespace volfm {

// Tetrahedral volume mesh. After validation every tet has strictly positive
// signed volume and the edge graph is connected.
struct TetMesh {
  MatX vertices;     // n x 3
  MatXi tets;        // m x 4
  VecX tet_volumes;  // m, signed; positive after validation

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_tets() const { return static_cast<int>(tets.rows()); }
  double total_volume() const { return tet_volumes.sum(); }
  double bbox_diagonal() const;
};

// Triangle mesh, standalone or the boundary of a TetMesh. When extracted
// from a volume, parent_map[i] is the volume vertex index behind surface
// vertex i (injective).
struct SurfaceMesh {
  MatX vertices;    // n x 3
  MatXi triangles;  // f x 3
  std::vector<int> parent_map;

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_triangles() const { return static_cast<int>(triangles.rows()); }
  bool has_parent_map() const { return !parent_map.empty(); }
  double total_area() const;
  double bbox_diagonal() const;
};

struct GeodesicField {
  int source = -1;
  VecX distances;  // edge-graph shortest path lengths, model units
};

struct ValidationReport {
  std::vector<int> reoriented_tets;       // negative volume before the fix
  std::vector<int> degenerate_tets;       // |volume| below tolerance
  std::vector<int> duplicate_index_tets;  // repeated vertex inside a tet
  std::vector<int> out_of_range_tets;
  int num_components = 1;

  bool clean() const;
  std::string summary() const;
};

double signed_tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);
double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
void recompute_tet_volumes(TetMesh& mesh);

// Flips negatively oriented tets in place, recomputes volumes and reports
// every defect found. Never throws; loaders decide what is fatal.
ValidationReport validate_mesh(TetMesh& mesh);

// MEDIT (.mesh) for volumes, MEDIT or OFF (.off) for surfaces. Loaded meshes
// are validated; orientation is normalized, topological defects throw.
TetMesh load_tet_mesh(const std::string& path);
SurfaceMesh load_surface_mesh(const std::string& path);
void save_mesh(const TetMesh& mesh, const std::string& path);
void save_mesh(const SurfaceMesh& mesh, const std::string& path);

// Faces incident to exactly one tet, outward oriented, vertices compacted in
// ascending volume-index order (which fixes parent_map deterministically).
SurfaceMesh extract_boundary(const TetMesh& mesh);

// CSR adjacency over the unique mesh edges with Euclidean lengths, shared by
// all geodesic queries. Immutable once built; distances() is re-entrant.
class EdgeGraph {
 public:
  EdgeGraph() = default;
  explicit EdgeGraph(const TetMesh& mesh);
  explicit EdgeGraph(const SurfaceMesh& mesh);
  EdgeGraph(const MatX& vertices, const std::vector<std::pair<int, int>>& edge_list);

  int num_vertices() const { return static_cast<int>(offsets_.size()) - 1; }
  GeodesicField distances(int source) const;
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

 private:
  void build(const MatX& vertices, const std::vector<std::pair<int, int>>& edge_list);

  std::vector<int> offsets_;
  std::vector<int> targets_;
  std::vector<double> lengths_;
  std::vector<std::pair<int, int>> edges_;
};

GeodesicField dijkstra_distances(const TetMesh& mesh, int source);
GeodesicField dijkstra_distances(const SurfaceMesh& mesh, int source);

// Synthetic test meshes. The cube/bar grids use the Kuhn split (6 tets per
// cell); bent_bar returns two meshes with identical connectivity and the
// identity ground-truth map.
TetMesh generate_cube_grid(int res, double size = 1.0);
TetMesh generate_bar(double lx, double ly, double lz, int rx, int ry, int rz);

struct BentBarPair {
  TetMesh straight;
  TetMesh bent;
  Correspondence ground_truth;
};
BentBarPair generate_bent_bar(double bend_angle, double lx, double ly, double lz,
                              int rx, int ry, int rz);

double rescale_to_unit_volume(TetMesh& mesh);    // returns the applied factor
double rescale_to_unit_area(SurfaceMesh& mesh);

// Surface-level correspondence induced by a volume-level one; requires both
// boundaries to carry parent maps and the image of every source boundary
// vertex to lie on the target boundary.
Correspondence restrict_correspondence_to_boundary(const Correspondence& vol_corr,
                                                   const SurfaceMesh& src_boundary,
                                                   const SurfaceMesh& dst_boundary);

}  // namespace volfm
