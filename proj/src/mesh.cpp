#include "volfm/mesh.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace volfm {

namespace {

constexpr double kDegenerateRel = 1e-14;

// Outward-facing faces of a positively oriented tet (a,b,c,d).
constexpr int kTetFaces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};

constexpr int kTetEdges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

std::vector<int> connected_component_labels(int n, const std::vector<std::pair<int, int>>& edges,
                                            int* num_components) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> label(n, -1);
  int comp = 0;
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    stack.push_back(s);
    label[s] = comp;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v]) {
        if (label[w] < 0) {
          label[w] = comp;
          stack.push_back(w);
        }
      }
    }
    ++comp;
  }
  *num_components = comp;
  return label;
}

std::vector<std::pair<int, int>> tet_edge_list(const TetMesh& mesh) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<size_t>(mesh.num_tets()) * 6);
  for (int t = 0; t < mesh.num_tets(); ++t) {
    for (const auto& e : kTetEdges) {
      int a = mesh.tets(t, e[0]);
      int b = mesh.tets(t, e[1]);
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<std::pair<int, int>> tri_edge_list(const SurfaceMesh& mesh) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<size_t>(mesh.num_triangles()) * 3);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int c = 0; c < 3; ++c) {
      int a = mesh.triangles(t, c);
      int b = mesh.triangles(t, (c + 1) % 3);
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

double bbox_diag(const MatX& vertices) {
  if (vertices.rows() == 0) return 0.0;
  Vec3 lo = vertices.colwise().minCoeff();
  Vec3 hi = vertices.colwise().maxCoeff();
  return (hi - lo).norm();
}

}  // namespace

double TetMesh::bbox_diagonal() const { return bbox_diag(vertices); }
double SurfaceMesh::bbox_diagonal() const { return bbox_diag(vertices); }

double SurfaceMesh::total_area() const {
  double area = 0.0;
  for (int t = 0; t < num_triangles(); ++t) {
    area += triangle_area(vertices.row(triangles(t, 0)), vertices.row(triangles(t, 1)),
                          vertices.row(triangles(t, 2)));
  }
  return area;
}

double signed_tet_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).cross(c - a).dot(d - a) / 6.0;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

void recompute_tet_volumes(TetMesh& mesh) {
  mesh.tet_volumes.resize(mesh.num_tets());
  for (int t = 0; t < mesh.num_tets(); ++t) {
    mesh.tet_volumes[t] =
        signed_tet_volume(mesh.vertices.row(mesh.tets(t, 0)), mesh.vertices.row(mesh.tets(t, 1)),
                          mesh.vertices.row(mesh.tets(t, 2)), mesh.vertices.row(mesh.tets(t, 3)));
  }
}

bool ValidationReport::clean() const {
  return reoriented_tets.empty() && degenerate_tets.empty() && duplicate_index_tets.empty() &&
         out_of_range_tets.empty() && num_components == 1;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << reoriented_tets.size() << " reoriented, " << degenerate_tets.size() << " degenerate, "
     << duplicate_index_tets.size() << " with duplicate indices, " << out_of_range_tets.size()
     << " out of range, " << num_components << " component(s)";
  return os.str();
}

ValidationReport validate_mesh(TetMesh& mesh) {
  ValidationReport report;
  const int n = mesh.num_vertices();
  const double diag = mesh.bbox_diagonal();
  const double vol_tol = kDegenerateRel * diag * diag * diag;

  for (int t = 0; t < mesh.num_tets(); ++t) {
    bool bad_range = false;
    for (int c = 0; c < 4; ++c) {
      int v = mesh.tets(t, c);
      if (v < 0 || v >= n) bad_range = true;
    }
    if (bad_range) {
      report.out_of_range_tets.push_back(t);
      continue;
    }
    bool dup = false;
    for (int a = 0; a < 4 && !dup; ++a)
      for (int b = a + 1; b < 4; ++b)
        if (mesh.tets(t, a) == mesh.tets(t, b)) dup = true;
    if (dup) {
      report.duplicate_index_tets.push_back(t);
      continue;
    }
    double vol =
        signed_tet_volume(mesh.vertices.row(mesh.tets(t, 0)), mesh.vertices.row(mesh.tets(t, 1)),
                          mesh.vertices.row(mesh.tets(t, 2)), mesh.vertices.row(mesh.tets(t, 3)));
    if (std::abs(vol) <= vol_tol) {
      report.degenerate_tets.push_back(t);
    } else if (vol < 0.0) {
      report.reoriented_tets.push_back(t);
      std::swap(mesh.tets(t, 2), mesh.tets(t, 3));
    }
  }
  recompute_tet_volumes(mesh);

  if (report.out_of_range_tets.empty()) {
    int comps = 1;
    connected_component_labels(n, tet_edge_list(mesh), &comps);
    report.num_components = comps;
  }
  return report;
}

SurfaceMesh extract_boundary(const TetMesh& mesh) {
  // Key faces by their sorted vertex triple; keep one oriented representative.
  std::map<std::array<int, 3>, std::pair<int, std::array<int, 3>>> faces;
  for (int t = 0; t < mesh.num_tets(); ++t) {
    for (const auto& f : kTetFaces) {
      std::array<int, 3> oriented = {mesh.tets(t, f[0]), mesh.tets(t, f[1]), mesh.tets(t, f[2])};
      std::array<int, 3> key = oriented;
      std::sort(key.begin(), key.end());
      auto [it, inserted] = faces.try_emplace(key, 0, oriented);
      it->second.first += 1;
    }
  }

  std::vector<std::array<int, 3>> boundary;
  for (const auto& [key, rec] : faces) {
    if (rec.first == 1) boundary.push_back(rec.second);
    if (rec.first > 2)
      throw std::runtime_error("extract_boundary: face shared by " + std::to_string(rec.first) +
                               " tets (non-manifold)");
  }

  // Compact vertex ids, ascending volume index.
  std::vector<int> parents;
  for (const auto& f : boundary)
    for (int v : f) parents.push_back(v);
  std::sort(parents.begin(), parents.end());
  parents.erase(std::unique(parents.begin(), parents.end()), parents.end());

  std::unordered_map<int, int> to_surface;
  to_surface.reserve(parents.size());
  for (int i = 0; i < static_cast<int>(parents.size()); ++i) to_surface[parents[i]] = i;

  SurfaceMesh surf;
  surf.vertices.resize(static_cast<int>(parents.size()), 3);
  for (int i = 0; i < static_cast<int>(parents.size()); ++i)
    surf.vertices.row(i) = mesh.vertices.row(parents[i]);
  surf.triangles.resize(static_cast<int>(boundary.size()), 3);
  for (int t = 0; t < static_cast<int>(boundary.size()); ++t)
    for (int c = 0; c < 3; ++c) surf.triangles(t, c) = to_surface.at(boundary[t][c]);
  surf.parent_map = std::move(parents);

  // Every boundary edge must close up with exactly two triangles.
  std::map<std::pair<int, int>, int> edge_count;
  for (int t = 0; t < surf.num_triangles(); ++t) {
    for (int c = 0; c < 3; ++c) {
      int a = surf.triangles(t, c), b = surf.triangles(t, (c + 1) % 3);
      edge_count[{std::min(a, b), std::max(a, b)}] += 1;
    }
  }
  for (const auto& [e, cnt] : edge_count) {
    if (cnt != 2)
      throw std::runtime_error("extract_boundary: non-manifold boundary, edge (" +
                               std::to_string(e.first) + "," + std::to_string(e.second) +
                               ") on " + std::to_string(cnt) + " triangles");
  }
  return surf;
}

void EdgeGraph::build(const MatX& vertices, const std::vector<std::pair<int, int>>& edge_list) {
  const int n = static_cast<int>(vertices.rows());
  edges_ = edge_list;
  std::vector<int> degree(n, 0);
  for (const auto& [a, b] : edges_) {
    ++degree[a];
    ++degree[b];
  }
  offsets_.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  targets_.resize(offsets_[n]);
  lengths_.resize(offsets_[n]);
  std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [a, b] : edges_) {
    double len = (vertices.row(a) - vertices.row(b)).norm();
    targets_[cursor[a]] = b;
    lengths_[cursor[a]++] = len;
    targets_[cursor[b]] = a;
    lengths_[cursor[b]++] = len;
  }
}

EdgeGraph::EdgeGraph(const TetMesh& mesh) { build(mesh.vertices, tet_edge_list(mesh)); }
EdgeGraph::EdgeGraph(const SurfaceMesh& mesh) { build(mesh.vertices, tri_edge_list(mesh)); }
EdgeGraph::EdgeGraph(const MatX& vertices, const std::vector<std::pair<int, int>>& edge_list) {
  build(vertices, edge_list);
}

GeodesicField EdgeGraph::distances(int source) const {
  const int n = num_vertices();
  if (source < 0 || source >= n)
    throw std::invalid_argument("dijkstra: source " + std::to_string(source) + " out of range");

  GeodesicField field;
  field.source = source;
  field.distances = VecX::Constant(n, std::numeric_limits<double>::infinity());
  field.distances[source] = 0.0;

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
  queue.emplace(0.0, source);
  std::vector<char> done(n, 0);
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (done[v]) continue;
    done[v] = 1;
    for (int e = offsets_[v]; e < offsets_[v + 1]; ++e) {
      int w = targets_[e];
      double nd = d + lengths_[e];
      if (nd < field.distances[w]) {
        field.distances[w] = nd;
        queue.emplace(nd, w);
      }
    }
  }

  for (int v = 0; v < n; ++v) {
    if (!done[v])
      throw std::runtime_error("dijkstra: vertex " + std::to_string(v) +
                               " unreachable from source " + std::to_string(source) +
                               " (disconnected edge graph)");
  }
  return field;
}

GeodesicField dijkstra_distances(const TetMesh& mesh, int source) {
  return EdgeGraph(mesh).distances(source);
}

GeodesicField dijkstra_distances(const SurfaceMesh& mesh, int source) {
  return EdgeGraph(mesh).distances(source);
}

namespace {

// Kuhn split: six tets around the cell diagonal from the minimal to the
// maximal corner. Uniform over a grid this tiles face-to-face.
TetMesh grid_mesh(double lx, double ly, double lz, int rx, int ry, int rz) {
  if (rx < 1 || ry < 1 || rz < 1)
    throw std::invalid_argument("grid_mesh: resolution must be >= 1");
  const int nx = rx + 1, ny = ry + 1, nz = rz + 1;
  auto vid = [&](int i, int j, int k) { return i + nx * (j + ny * k); };

  TetMesh mesh;
  mesh.vertices.resize(nx * ny * nz, 3);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        mesh.vertices.row(vid(i, j, k)) =
            Vec3(lx * i / rx, ly * j / ry, lz * k / rz);

  static const int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                   {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  mesh.tets.resize(6 * rx * ry * rz, 4);
  int t = 0;
  for (int k = 0; k < rz; ++k) {
    for (int j = 0; j < ry; ++j) {
      for (int i = 0; i < rx; ++i) {
        int base[3] = {i, j, k};
        for (const auto& perm : kPerms) {
          int c[3] = {base[0], base[1], base[2]};
          int quad[4];
          quad[0] = vid(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[perm[s]];
            quad[s + 1] = vid(c[0], c[1], c[2]);
          }
          mesh.tets.row(t++) << quad[0], quad[1], quad[2], quad[3];
        }
      }
    }
  }

  ValidationReport report = validate_mesh(mesh);
  if (!report.degenerate_tets.empty() || report.num_components != 1)
    throw std::runtime_error("grid_mesh: generated invalid mesh: " + report.summary());
  return mesh;
}

}  // namespace

TetMesh generate_cube_grid(int res, double size) {
  return grid_mesh(size, size, size, res, res, res);
}

TetMesh generate_bar(double lx, double ly, double lz, int rx, int ry, int rz) {
  return grid_mesh(lx, ly, lz, rx, ry, rz);
}

BentBarPair generate_bent_bar(double bend_angle, double lx, double ly, double lz,
                              int rx, int ry, int rz) {
  if (std::abs(bend_angle) >= M_PI)
    throw std::invalid_argument("generate_bent_bar: bend angle must lie in (-pi, pi)");

  BentBarPair pair;
  pair.straight = generate_bar(lx, ly, lz, rx, ry, rz);
  pair.ground_truth = Correspondence::identity(pair.straight.num_vertices());
  pair.ground_truth.target_size = pair.straight.num_vertices();

  if (bend_angle == 0.0) {
    pair.bent = pair.straight;
    return pair;
  }

  // Bend the bar axis (x) onto a circular arc of radius L/angle in the xz
  // plane; fibers offset by z keep their arc length ratio rho/R.
  const double radius = lx / bend_angle;
  pair.bent = pair.straight;
  for (int v = 0; v < pair.bent.num_vertices(); ++v) {
    Vec3 p = pair.straight.vertices.row(v);
    double phi = (p.x() - 0.5 * lx) * bend_angle / lx;
    double rho = radius - (p.z() - 0.5 * lz);
    pair.bent.vertices(v, 0) = rho * std::sin(phi);
    pair.bent.vertices(v, 2) = radius - rho * std::cos(phi);
  }
  recompute_tet_volumes(pair.bent);
  for (int t = 0; t < pair.bent.num_tets(); ++t) {
    if (pair.bent.tet_volumes[t] <= 0.0)
      throw std::runtime_error("generate_bent_bar: bend inverts tet " + std::to_string(t) +
                               "; reduce the bend angle or the cross-section");
  }
  return pair;
}

double rescale_to_unit_volume(TetMesh& mesh) {
  double vol = mesh.total_volume();
  if (vol <= 0.0) throw std::runtime_error("rescale_to_unit_volume: non-positive total volume");
  double s = std::pow(vol, -1.0 / 3.0);
  mesh.vertices *= s;
  recompute_tet_volumes(mesh);
  return s;
}

double rescale_to_unit_area(SurfaceMesh& mesh) {
  double area = mesh.total_area();
  if (area <= 0.0) throw std::runtime_error("rescale_to_unit_area: non-positive total area");
  double s = 1.0 / std::sqrt(area);
  mesh.vertices *= s;
  return s;
}

Correspondence restrict_correspondence_to_boundary(const Correspondence& vol_corr,
                                                   const SurfaceMesh& src_boundary,
                                                   const SurfaceMesh& dst_boundary) {
  if (!src_boundary.has_parent_map() || !dst_boundary.has_parent_map())
    throw std::invalid_argument("restrict_correspondence_to_boundary: parent maps required");
  std::unordered_map<int, int> dst_index;
  dst_index.reserve(dst_boundary.parent_map.size());
  for (int i = 0; i < dst_boundary.num_vertices(); ++i)
    dst_index[dst_boundary.parent_map[i]] = i;

  Correspondence out;
  out.target_size = dst_boundary.num_vertices();
  out.map.resize(src_boundary.num_vertices());
  for (int i = 0; i < src_boundary.num_vertices(); ++i) {
    int vol_target = vol_corr(src_boundary.parent_map[i]);
    auto it = dst_index.find(vol_target);
    if (it == dst_index.end())
      throw std::runtime_error(
          "restrict_correspondence_to_boundary: image of boundary vertex " + std::to_string(i) +
          " is interior to the target");
    out.map[i] = it->second;
  }
  return out;
}

}  // namespace volfm
