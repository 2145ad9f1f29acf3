#include "volfm/mesh.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace volfm {

namespace {

std::string lowercase_ext(const std::string& path) {
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

// Pull-based tokenizer over the whole file; MEDIT is whitespace separated
// and comment lines start with '#'.
class TokenReader {
 public:
  TokenReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw std::runtime_error("cannot open mesh file: " + path);
  }

  bool next(std::string& tok) {
    while (in_ >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in_, rest);
        continue;
      }
      return true;
    }
    return false;
  }

  std::string expect_token(const char* what) {
    std::string tok;
    if (!next(tok))
      throw std::runtime_error(path_ + ": unexpected end of file, expected " + std::string(what));
    return tok;
  }

  long expect_int(const char* what) {
    std::string tok = expect_token(what);
    size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size())
      throw std::runtime_error(path_ + ": expected " + std::string(what) + ", got \"" + tok +
                               "\"");
    return v;
  }

  double expect_double(const char* what) {
    std::string tok = expect_token(what);
    size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size())
      throw std::runtime_error(path_ + ": expected " + std::string(what) + ", got \"" + tok +
                               "\"");
    return v;
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
};

struct MeditData {
  MatX vertices;
  MatXi triangles{0, 3};
  MatXi tets{0, 4};
};

MeditData read_medit(const std::string& path) {
  TokenReader reader(path);
  MeditData data;
  bool saw_vertices = false;

  std::string tok;
  while (reader.next(tok)) {
    if (tok == "MeshVersionFormatted") {
      reader.expect_int("format version");
    } else if (tok == "Dimension") {
      long dim = reader.expect_int("dimension");
      if (dim != 3)
        throw std::runtime_error(path + ": dimension " + std::to_string(dim) + ", expected 3");
    } else if (tok == "Vertices") {
      long n = reader.expect_int("vertex count");
      if (n < 0) throw std::runtime_error(path + ": negative vertex count");
      data.vertices.resize(n, 3);
      for (long i = 0; i < n; ++i) {
        for (int c = 0; c < 3; ++c) data.vertices(i, c) = reader.expect_double("coordinate");
        reader.expect_int("vertex reference");
      }
      saw_vertices = true;
    } else if (tok == "Triangles") {
      long m = reader.expect_int("triangle count");
      if (m < 0) throw std::runtime_error(path + ": negative triangle count");
      data.triangles.resize(m, 3);
      for (long i = 0; i < m; ++i) {
        for (int c = 0; c < 3; ++c)
          data.triangles(i, c) = static_cast<int>(reader.expect_int("triangle index")) - 1;
        reader.expect_int("triangle reference");
      }
    } else if (tok == "Tetrahedra") {
      long m = reader.expect_int("tetrahedron count");
      if (m < 0) throw std::runtime_error(path + ": negative tetrahedron count");
      data.tets.resize(m, 4);
      for (long i = 0; i < m; ++i) {
        for (int c = 0; c < 4; ++c)
          data.tets(i, c) = static_cast<int>(reader.expect_int("tetrahedron index")) - 1;
        reader.expect_int("tetrahedron reference");
      }
    } else if (tok == "Edges") {
      long m = reader.expect_int("edge count");
      for (long i = 0; i < 3 * m; ++i) reader.expect_int("edge field");
    } else if (tok == "Corners" || tok == "RequiredVertices" || tok == "Ridges" ||
               tok == "RequiredEdges") {
      long m = reader.expect_int("count");
      for (long i = 0; i < m; ++i) reader.expect_int("index");
    } else if (tok == "End") {
      break;
    } else {
      throw std::runtime_error(path + ": unknown section \"" + tok + "\"");
    }
  }
  if (!saw_vertices) throw std::runtime_error(path + ": no Vertices section");
  return data;
}

void read_off(const std::string& path, MatX& vertices, MatXi& triangles) {
  TokenReader reader(path);
  std::string magic = reader.expect_token("OFF header");
  if (magic != "OFF") throw std::runtime_error(path + ": missing OFF header");
  long nv = reader.expect_int("vertex count");
  long nf = reader.expect_int("face count");
  reader.expect_int("edge count");
  if (nv < 0 || nf < 0) throw std::runtime_error(path + ": negative counts");

  vertices.resize(nv, 3);
  for (long i = 0; i < nv; ++i)
    for (int c = 0; c < 3; ++c) vertices(i, c) = reader.expect_double("coordinate");

  triangles.resize(nf, 3);
  for (long i = 0; i < nf; ++i) {
    long arity = reader.expect_int("face arity");
    if (arity != 3)
      throw std::runtime_error(path + ": face " + std::to_string(i) + " has " +
                               std::to_string(arity) + " vertices, only triangles supported");
    for (int c = 0; c < 3; ++c) triangles(i, c) = static_cast<int>(reader.expect_int("face index"));
  }
}

void check_indices(const MatXi& elems, int n, const std::string& path) {
  for (int i = 0; i < elems.rows(); ++i)
    for (int c = 0; c < elems.cols(); ++c)
      if (elems(i, c) < 0 || elems(i, c) >= n)
        throw std::runtime_error(path + ": element " + std::to_string(i) + " references vertex " +
                                 std::to_string(elems(i, c)) + " outside [0, " +
                                 std::to_string(n) + ")");
}

void write_double(std::ofstream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

}  // namespace

TetMesh load_tet_mesh(const std::string& path) {
  std::string ext = lowercase_ext(path);
  if (ext != "mesh")
    throw std::invalid_argument("load_tet_mesh: unsupported extension ." + ext +
                                " (tet meshes use MEDIT .mesh)");
  MeditData data = read_medit(path);
  if (data.tets.rows() == 0) throw std::runtime_error(path + ": no Tetrahedra section");

  TetMesh mesh;
  mesh.vertices = std::move(data.vertices);
  mesh.tets = std::move(data.tets);
  check_indices(mesh.tets, mesh.num_vertices(), path);

  ValidationReport report = validate_mesh(mesh);
  if (!report.degenerate_tets.empty())
    throw std::runtime_error(path + ": " + std::to_string(report.degenerate_tets.size()) +
                             " degenerate tet(s), first at index " +
                             std::to_string(report.degenerate_tets.front()));
  if (!report.duplicate_index_tets.empty())
    throw std::runtime_error(path + ": tet " +
                             std::to_string(report.duplicate_index_tets.front()) +
                             " repeats a vertex index");
  return mesh;
}

SurfaceMesh load_surface_mesh(const std::string& path) {
  SurfaceMesh mesh;
  std::string ext = lowercase_ext(path);
  if (ext == "off") {
    read_off(path, mesh.vertices, mesh.triangles);
  } else if (ext == "mesh") {
    MeditData data = read_medit(path);
    if (data.triangles.rows() == 0) throw std::runtime_error(path + ": no Triangles section");
    mesh.vertices = std::move(data.vertices);
    mesh.triangles = std::move(data.triangles);
  } else {
    throw std::invalid_argument("load_surface_mesh: unsupported extension ." + ext);
  }
  check_indices(mesh.triangles, mesh.num_vertices(), path);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.triangles(t, 0) == mesh.triangles(t, 1) ||
        mesh.triangles(t, 0) == mesh.triangles(t, 2) ||
        mesh.triangles(t, 1) == mesh.triangles(t, 2))
      throw std::runtime_error(path + ": triangle " + std::to_string(t) +
                               " repeats a vertex index");
  }
  return mesh;
}

void save_mesh(const TetMesh& mesh, const std::string& path) {
  if (lowercase_ext(path) != "mesh")
    throw std::invalid_argument("save_mesh: tet meshes are written as MEDIT .mesh files");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mesh file: " + path);

  out << "MeshVersionFormatted 1\nDimension 3\n";
  out << "Vertices " << mesh.num_vertices() << "\n";
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    for (int c = 0; c < 3; ++c) {
      write_double(out, mesh.vertices(i, c));
      out << " ";
    }
    out << "0\n";
  }
  out << "Tetrahedra " << mesh.num_tets() << "\n";
  for (int t = 0; t < mesh.num_tets(); ++t) {
    for (int c = 0; c < 4; ++c) out << mesh.tets(t, c) + 1 << " ";
    out << "0\n";
  }
  out << "End\n";
  if (!out) throw std::runtime_error("write failure on mesh file: " + path);
}

void save_mesh(const SurfaceMesh& mesh, const std::string& path) {
  std::string ext = lowercase_ext(path);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write mesh file: " + path);

  if (ext == "off") {
    out << "OFF\n" << mesh.num_vertices() << " " << mesh.num_triangles() << " 0\n";
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      for (int c = 0; c < 3; ++c) {
        write_double(out, mesh.vertices(i, c));
        out << (c < 2 ? " " : "\n");
      }
    }
    for (int t = 0; t < mesh.num_triangles(); ++t)
      out << "3 " << mesh.triangles(t, 0) << " " << mesh.triangles(t, 1) << " "
          << mesh.triangles(t, 2) << "\n";
  } else if (ext == "mesh") {
    out << "MeshVersionFormatted 1\nDimension 3\n";
    out << "Vertices " << mesh.num_vertices() << "\n";
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      for (int c = 0; c < 3; ++c) {
        write_double(out, mesh.vertices(i, c));
        out << " ";
      }
      out << "0\n";
    }
    out << "Triangles " << mesh.num_triangles() << "\n";
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      for (int c = 0; c < 3; ++c) out << mesh.triangles(t, c) + 1 << " ";
      out << "0\n";
    }
    out << "End\n";
  } else {
    throw std::invalid_argument("save_mesh: unsupported extension ." + ext);
  }
  if (!out) throw std::runtime_error("write failure on mesh file: " + path);
}

}  // namespace volfm
