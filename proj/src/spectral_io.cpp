#include "volfm/spectral.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace volfm {

namespace {

// Layout (little-endian host assumed): magic "VFMB", u64 n, u64 k, u32 kind,
// u64 n_boundary, f64 eigenvalues[k], f64 functions[n*k] row-major, then if
// n_boundary > 0: u64 parents[n_boundary], f64 trace[n_boundary*k] row-major.
constexpr char kMagic[4] = {'V', 'F', 'M', 'B'};

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& value, const std::string& path) {
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("basis cache " + path + ": truncated file");
}

using RowMajorMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

void save_basis(const SpectralBasis& basis, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write basis cache: " + path);

  out.write(kMagic, 4);
  write_pod(out, static_cast<uint64_t>(basis.num_vertices()));
  write_pod(out, static_cast<uint64_t>(basis.size()));
  write_pod(out, static_cast<uint32_t>(basis.kind));
  uint64_t n_boundary = basis.has_trace() ? basis.boundary_trace.rows() : 0;
  write_pod(out, n_boundary);

  out.write(reinterpret_cast<const char*>(basis.eigenvalues.data()),
            sizeof(double) * basis.size());
  RowMajorMat functions = basis.functions;
  out.write(reinterpret_cast<const char*>(functions.data()),
            sizeof(double) * functions.size());

  if (n_boundary > 0) {
    for (int i = 0; i < static_cast<int>(n_boundary); ++i)
      write_pod(out, static_cast<uint64_t>(basis.trace_parents[i]));
    RowMajorMat trace = basis.boundary_trace;
    out.write(reinterpret_cast<const char*>(trace.data()), sizeof(double) * trace.size());
  }
  if (!out) throw std::runtime_error("write failure on basis cache: " + path);
}

SpectralBasis load_basis(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open basis cache: " + path);

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("basis cache " + path + ": bad magic, not a VFMB file");

  uint64_t n = 0, k = 0, n_boundary = 0;
  uint32_t kind = 0;
  read_pod(in, n, path);
  read_pod(in, k, path);
  read_pod(in, kind, path);
  read_pod(in, n_boundary, path);
  if (k == 0 || n == 0 || k > n || n_boundary > n || kind > 2)
    throw std::runtime_error("basis cache " + path + ": implausible header");

  SpectralBasis basis;
  basis.kind = static_cast<BasisKind>(kind);
  basis.eigenvalues.resize(k);
  in.read(reinterpret_cast<char*>(basis.eigenvalues.data()), sizeof(double) * k);

  RowMajorMat functions(n, k);
  in.read(reinterpret_cast<char*>(functions.data()), sizeof(double) * n * k);
  if (!in) throw std::runtime_error("basis cache " + path + ": truncated file");
  basis.functions = functions;

  if (n_boundary > 0) {
    basis.trace_parents.resize(n_boundary);
    for (auto& p : basis.trace_parents) {
      uint64_t v = 0;
      read_pod(in, v, path);
      if (v >= n) throw std::runtime_error("basis cache " + path + ": trace parent out of range");
      p = static_cast<int>(v);
    }
    RowMajorMat trace(n_boundary, k);
    in.read(reinterpret_cast<char*>(trace.data()), sizeof(double) * n_boundary * k);
    if (!in) throw std::runtime_error("basis cache " + path + ": truncated file");
    basis.boundary_trace = trace;
  }
  return basis;
}

}  // namespace volfm
