#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "volfm/mesh.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

using namespace volfm;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "volfm_test_mesh";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

TetMesh single_tet() {
  TetMesh mesh;
  mesh.vertices.resize(4, 3);
  mesh.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1;
  mesh.tets.resize(1, 4);
  mesh.tets << 0, 1, 2, 3;
  recompute_tet_volumes(mesh);
  return mesh;
}

}  // namespace

TEST_CASE("signed volume and triangle area") {
  Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0), d(0, 0, 1);
  CHECK(signed_tet_volume(a, b, c, d) == doctest::Approx(1.0 / 6.0));
  CHECK(signed_tet_volume(a, b, d, c) == doctest::Approx(-1.0 / 6.0));
  CHECK(triangle_area(a, b, c) == doctest::Approx(0.5));
}

TEST_CASE("single-tet MEDIT file loads") {
  fs::path path = temp_file("single.mesh");
  write_file(path,
             "MeshVersionFormatted 1\nDimension 3\n"
             "Vertices 4\n0 0 0 0\n1 0 0 0\n0 1 0 0\n0 0 1 0\n"
             "Tetrahedra 1\n1 2 3 4 0\nEnd\n");
  TetMesh mesh = load_tet_mesh(path.string());
  CHECK(mesh.num_vertices() == 4);
  CHECK(mesh.num_tets() == 1);
  CHECK(mesh.tet_volumes[0] == doctest::Approx(1.0 / 6.0));
  CHECK(mesh.tets(0, 0) == 0);  // 1-based converted
}

TEST_CASE("MEDIT count mismatch is a parse error") {
  fs::path path = temp_file("short.mesh");
  write_file(path,
             "MeshVersionFormatted 1\nDimension 3\n"
             "Vertices 5\n0 0 0 0\n1 0 0 0\n0 1 0 0\n0 0 1 0\n"
             "Tetrahedra 1\n1 2 3 4 0\nEnd\n");
  CHECK_THROWS_AS(load_tet_mesh(path.string()), std::runtime_error);
}

TEST_CASE("cube grid res 2 saves and reloads with expected counts") {
  TetMesh cube = generate_cube_grid(2);
  CHECK(cube.num_vertices() == 27);
  CHECK(cube.num_tets() == 48);
  CHECK(cube.total_volume() == doctest::Approx(1.0));

  fs::path path = temp_file("cube2.mesh");
  save_mesh(cube, path.string());
  TetMesh loaded = load_tet_mesh(path.string());
  CHECK(loaded.num_vertices() == 27);
  CHECK(loaded.num_tets() == 48);
  CHECK(loaded.tets == cube.tets);
  CHECK((loaded.vertices - cube.vertices).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("save produces named sections") {
  fs::path path = temp_file("sections.mesh");
  save_mesh(single_tet(), path.string());
  std::string text = slurp(path);
  CHECK(text.find("Vertices 4") != std::string::npos);
  CHECK(text.find("Tetrahedra 1") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}

TEST_CASE("second save of a loaded mesh is byte-identical") {
  fs::path first = temp_file("cube4_a.mesh");
  fs::path second = temp_file("cube4_b.mesh");
  TetMesh cube = generate_cube_grid(4);
  // Irrational coordinates exercise full-precision round-tripping.
  cube.vertices *= std::sqrt(2.0);
  recompute_tet_volumes(cube);
  save_mesh(cube, first.string());
  TetMesh loaded = load_tet_mesh(first.string());
  save_mesh(loaded, second.string());
  CHECK(slurp(first) == slurp(second));
}

TEST_CASE("surface OFF round trip") {
  TetMesh cube = generate_cube_grid(2);
  SurfaceMesh surf = extract_boundary(cube);
  fs::path path = temp_file("boundary.off");
  save_mesh(surf, path.string());
  SurfaceMesh loaded = load_surface_mesh(path.string());
  CHECK(loaded.num_vertices() == surf.num_vertices());
  CHECK(loaded.triangles == surf.triangles);
  CHECK((loaded.vertices - surf.vertices).cwiseAbs().maxCoeff() == 0.0);
  CHECK_FALSE(loaded.has_parent_map());
}

TEST_CASE("surface MEDIT round trip") {
  TetMesh cube = generate_cube_grid(1);
  SurfaceMesh surf = extract_boundary(cube);
  fs::path path = temp_file("boundary_tri.mesh");
  save_mesh(surf, path.string());
  SurfaceMesh loaded = load_surface_mesh(path.string());
  CHECK(loaded.triangles == surf.triangles);
}

TEST_CASE("boundary of a single tet") {
  TetMesh mesh = single_tet();
  SurfaceMesh surf = extract_boundary(mesh);
  CHECK(surf.num_triangles() == 4);
  CHECK(surf.num_vertices() == 4);
  REQUIRE(surf.has_parent_map());
  for (int i = 0; i < 4; ++i) CHECK(surf.parent_map[i] == i);
}

TEST_CASE("boundary of two tets sharing a face has 6 triangles") {
  TetMesh mesh;
  mesh.vertices.resize(5, 3);
  mesh.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 1;
  mesh.tets.resize(2, 4);
  mesh.tets << 0, 1, 2, 3,  // shares face (1,2,3)
      1, 2, 3, 4;
  validate_mesh(mesh);
  REQUIRE(mesh.tet_volumes.minCoeff() > 0.0);
  SurfaceMesh surf = extract_boundary(mesh);
  CHECK(surf.num_triangles() == 6);
  CHECK(surf.num_vertices() == 5);
}

TEST_CASE("cube boundary is a topological sphere with outward orientation") {
  TetMesh cube = generate_cube_grid(2);
  SurfaceMesh surf = extract_boundary(cube);

  std::set<std::pair<int, int>> edges;
  std::map<std::pair<int, int>, int> edge_count;
  for (int t = 0; t < surf.num_triangles(); ++t) {
    for (int c = 0; c < 3; ++c) {
      int a = surf.triangles(t, c), b = surf.triangles(t, (c + 1) % 3);
      edges.insert({std::min(a, b), std::max(a, b)});
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  int V = surf.num_vertices(), E = static_cast<int>(edges.size()), F = surf.num_triangles();
  CHECK(V - E + F == 2);
  for (const auto& [e, cnt] : edge_count) CHECK(cnt == 2);

  // Divergence theorem: sum of signed cone volumes from the origin equals
  // the enclosed volume only when faces point outward.
  double vol = 0.0;
  for (int t = 0; t < surf.num_triangles(); ++t) {
    Vec3 a = surf.vertices.row(surf.triangles(t, 0));
    Vec3 b = surf.vertices.row(surf.triangles(t, 1));
    Vec3 c = surf.vertices.row(surf.triangles(t, 2));
    vol += a.dot(b.cross(c)) / 6.0;
  }
  CHECK(vol == doctest::Approx(cube.total_volume()));

  // Parent map is strictly increasing by construction.
  for (size_t i = 1; i < surf.parent_map.size(); ++i)
    CHECK(surf.parent_map[i] > surf.parent_map[i - 1]);
}

TEST_CASE("surface area of the unit cube boundary") {
  TetMesh cube = generate_cube_grid(3);
  SurfaceMesh surf = extract_boundary(cube);
  CHECK(surf.total_area() == doctest::Approx(6.0));
}

TEST_CASE("dijkstra basics") {
  TetMesh cube = generate_cube_grid(2);
  GeodesicField field = dijkstra_distances(cube, 0);
  CHECK(field.distances[0] == 0.0);
  CHECK(field.distances.minCoeff() == 0.0);
  CHECK(std::isfinite(field.distances.maxCoeff()));
}

TEST_CASE("dijkstra on a unit-edge chain") {
  MatX vertices(3, 3);
  vertices << 0, 0, 0, 1, 0, 0, 2, 0, 0;
  EdgeGraph graph(vertices, {{0, 1}, {1, 2}});
  GeodesicField field = graph.distances(0);
  CHECK(field.distances[2] == doctest::Approx(2.0));
  CHECK(field.distances[1] == doctest::Approx(1.0));
}

TEST_CASE("dijkstra equals brute-force relaxation on cube res 4") {
  TetMesh cube = generate_cube_grid(4);
  EdgeGraph graph(cube);
  const int n = graph.num_vertices();

  // Independent oracle: Bellman-Ford style relaxation over explicit edges.
  std::vector<double> oracle(n, std::numeric_limits<double>::infinity());
  oracle[0] = 0.0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [a, b] : graph.edges()) {
      double len = (cube.vertices.row(a) - cube.vertices.row(b)).norm();
      if (oracle[a] + len < oracle[b] - 1e-15) {
        oracle[b] = oracle[a] + len;
        changed = true;
      }
      if (oracle[b] + len < oracle[a] - 1e-15) {
        oracle[a] = oracle[b] + len;
        changed = true;
      }
    }
  }

  GeodesicField field = graph.distances(0);
  for (int v = 0; v < n; ++v) CHECK(field.distances[v] == doctest::Approx(oracle[v]));

  // Opposite corner of the cube is the last grid vertex.
  CHECK(field.distances[n - 1] == doctest::Approx(oracle[n - 1]));
}

TEST_CASE("dijkstra symmetry") {
  TetMesh cube = generate_cube_grid(3);
  int a = 0, b = cube.num_vertices() - 1;
  GeodesicField from_a = dijkstra_distances(cube, a);
  GeodesicField from_b = dijkstra_distances(cube, b);
  CHECK(from_a.distances[b] == doctest::Approx(from_b.distances[a]));
}

TEST_CASE("dijkstra reports disconnected graphs") {
  MatX vertices(4, 3);
  vertices << 0, 0, 0, 1, 0, 0, 5, 0, 0, 6, 0, 0;
  EdgeGraph graph(vertices, {{0, 1}, {2, 3}});
  CHECK_THROWS_AS(graph.distances(0), std::runtime_error);
  CHECK_THROWS_AS(graph.distances(5), std::invalid_argument);
}

TEST_CASE("cube res 1 is the Kuhn split") {
  TetMesh cube = generate_cube_grid(1);
  CHECK(cube.num_vertices() == 8);
  CHECK(cube.num_tets() == 6);
  CHECK(cube.total_volume() == doctest::Approx(1.0));
  CHECK(cube.tet_volumes.minCoeff() == doctest::Approx(1.0 / 6.0));
  CHECK_THROWS_AS(generate_cube_grid(0), std::invalid_argument);
}

TEST_CASE("bar generator respects dimensions") {
  TetMesh bar = generate_bar(4.0, 1.0, 1.0, 8, 2, 2);
  CHECK(bar.num_vertices() == 9 * 3 * 3);
  CHECK(bar.num_tets() == 6 * 8 * 2 * 2);
  CHECK(bar.total_volume() == doctest::Approx(4.0));
  Vec3 hi = bar.vertices.colwise().maxCoeff();
  CHECK(hi.x() == doctest::Approx(4.0));
  CHECK(hi.y() == doctest::Approx(1.0));
}

TEST_CASE("bent bar with zero bend is an exact copy") {
  BentBarPair pair = generate_bent_bar(0.0, 4.0, 1.0, 1.0, 8, 2, 2);
  CHECK(pair.straight.vertices == pair.bent.vertices);
  CHECK(pair.straight.tets == pair.bent.tets);
  CHECK(pair.ground_truth.is_identity());
  // gt composed with itself stays the identity permutation.
  Correspondence composed;
  composed.target_size = pair.ground_truth.target_size;
  composed.map.resize(pair.ground_truth.size());
  for (int i = 0; i < pair.ground_truth.size(); ++i)
    composed.map[i] = pair.ground_truth(pair.ground_truth(i));
  CHECK(composed.is_identity());
}

TEST_CASE("bent bar at pi/4 keeps positive volumes and connectivity") {
  BentBarPair pair = generate_bent_bar(M_PI / 4.0, 4.0, 1.0, 1.0, 20, 4, 4);
  CHECK(pair.bent.tet_volumes.minCoeff() > 0.0);
  CHECK(pair.straight.tets == pair.bent.tets);
  CHECK(pair.ground_truth.size() == pair.straight.num_vertices());
  // The bend is isometric along the central fiber, so total volume shrinks
  // only through the cross-section curvature, staying within a few percent.
  CHECK(pair.bent.total_volume() ==
        doctest::Approx(pair.straight.total_volume()).epsilon(0.05));
  CHECK_THROWS_AS(generate_bent_bar(3.2, 4.0, 1.0, 1.0, 8, 2, 2), std::invalid_argument);
}

TEST_CASE("validate_mesh fixes orientation and reports defects") {
  TetMesh mesh = generate_cube_grid(2);
  ValidationReport clean = validate_mesh(mesh);
  CHECK(clean.clean());
  CHECK(clean.num_components == 1);

  SUBCASE("negative orientation is flipped") {
    TetMesh bad = single_tet();
    std::swap(bad.tets(0, 0), bad.tets(0, 1));
    ValidationReport report = validate_mesh(bad);
    CHECK(report.reoriented_tets == std::vector<int>{0});
    CHECK(bad.tet_volumes[0] > 0.0);
  }

  SUBCASE("duplicate vertex index is reported") {
    TetMesh bad = single_tet();
    bad.tets(0, 3) = bad.tets(0, 0);
    ValidationReport report = validate_mesh(bad);
    CHECK(report.duplicate_index_tets == std::vector<int>{0});
    CHECK_FALSE(report.clean());
  }

  SUBCASE("coplanar tet is degenerate") {
    TetMesh bad = single_tet();
    bad.vertices.row(3) << 0.5, 0.5, 0.0;  // into the xy plane
    ValidationReport report = validate_mesh(bad);
    CHECK(report.degenerate_tets == std::vector<int>{0});
  }

  SUBCASE("out of range index is reported") {
    TetMesh bad = single_tet();
    bad.tets(0, 2) = 17;
    ValidationReport report = validate_mesh(bad);
    CHECK(report.out_of_range_tets == std::vector<int>{0});
  }

  SUBCASE("two disjoint tets are two components") {
    TetMesh two;
    two.vertices.resize(8, 3);
    two.vertices << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1,  //
        9, 0, 0, 10, 0, 0, 9, 1, 0, 9, 0, 1;
    two.tets.resize(2, 4);
    two.tets << 0, 1, 2, 3, 4, 5, 6, 7;
    ValidationReport report = validate_mesh(two);
    CHECK(report.num_components == 2);
    CHECK_FALSE(report.clean());
  }
}

TEST_CASE("rescaling to unit volume and area") {
  TetMesh cube = generate_cube_grid(2, 2.0);
  CHECK(cube.total_volume() == doctest::Approx(8.0));
  double s = rescale_to_unit_volume(cube);
  CHECK(cube.total_volume() == doctest::Approx(1.0));
  CHECK(s == doctest::Approx(0.5));

  SurfaceMesh surf = extract_boundary(cube);
  double area = surf.total_area();
  double sa = rescale_to_unit_area(surf);
  CHECK(surf.total_area() == doctest::Approx(1.0));
  CHECK(sa == doctest::Approx(1.0 / std::sqrt(area)));
}

TEST_CASE("boundary restriction of a volume correspondence") {
  TetMesh cube = generate_cube_grid(2);
  SurfaceMesh surf = extract_boundary(cube);
  Correspondence identity = Correspondence::identity(cube.num_vertices());
  Correspondence restricted = restrict_correspondence_to_boundary(identity, surf, surf);
  CHECK(restricted.size() == surf.num_vertices());
  CHECK(restricted.is_identity());
  CHECK(restricted.target_size == surf.num_vertices());

  // A map sending a boundary vertex strictly inside the target must throw.
  Correspondence bad = identity;
  int interior = -1;
  std::set<int> on_boundary(surf.parent_map.begin(), surf.parent_map.end());
  for (int v = 0; v < cube.num_vertices(); ++v)
    if (!on_boundary.count(v)) interior = v;
  REQUIRE(interior >= 0);
  bad.map[surf.parent_map[0]] = interior;
  CHECK_THROWS_AS(restrict_correspondence_to_boundary(bad, surf, surf), std::runtime_error);
}

TEST_CASE("correspondence file round trip") {
  Correspondence corr;
  corr.map = {2, 0, 1, 2};
  corr.target_size = 3;
  fs::path path = temp_file("map.p2p");
  save_correspondence(corr, path.string());

  std::string text = slurp(path);
  CHECK(text.rfind("# p2p 4 3\n", 0) == 0);

  Correspondence loaded = load_correspondence(path.string());
  CHECK(loaded.map == corr.map);
  CHECK(loaded.target_size == 3);

  SUBCASE("bad header") {
    write_file(path, "4 3\n0\n1\n2\n0\n");
    CHECK_THROWS_AS(load_correspondence(path.string()), std::runtime_error);
  }
  SUBCASE("out of range entry") {
    write_file(path, "# p2p 2 3\n0\n3\n");
    CHECK_THROWS_AS(load_correspondence(path.string()), std::runtime_error);
  }
  SUBCASE("truncated body") {
    write_file(path, "# p2p 3 3\n0\n1\n");
    CHECK_THROWS_AS(load_correspondence(path.string()), std::runtime_error);
  }
}

TEST_CASE("label file round trip") {
  std::vector<int> labels = {5, 5, 2, 0, 7};
  fs::path path = temp_file("labels.txt");
  save_labels(labels, path.string());
  CHECK(load_labels(path.string()) == labels);
}
