#include "volfm/fmap.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace volfm {

namespace {

struct EnergyGrid {
  VecX energies;
  double sigma = 0.0;
};

// Log-spaced grid over [log l2 + 2s, log lk - 2s] with s = 7 spacings, so
// the Gaussian windows stay inside the sampled part of the spectrum.
EnergyGrid make_energy_grid(const SpectralBasis& basis, int num_energies) {
  if (basis.kind != BasisKind::LBO)
    throw std::invalid_argument("descriptors require a plain eigenbasis");
  if (basis.size() < 2)
    throw std::invalid_argument("descriptors require at least two basis functions");
  if (num_energies < 1) throw std::invalid_argument("energy count must be positive");

  double low = basis.eigenvalues[1];
  if (!(low > 0.0))
    throw std::runtime_error(
        "second eigenvalue is not positive; the mesh is likely disconnected");
  double a = std::log(low);
  double b = std::log(basis.eigenvalues[basis.size() - 1]);

  double delta = (b - a) / (num_energies + 27);
  EnergyGrid grid;
  grid.sigma = 7.0 * delta;
  // A fully degenerate spectrum collapses the grid to one point; any
  // positive width then yields equal weights, which normalize away.
  if (!(grid.sigma > 0.0)) grid.sigma = 1.0;
  grid.energies.resize(num_energies);
  for (int j = 0; j < num_energies; ++j)
    grid.energies[j] = a + 2.0 * grid.sigma + delta * j;
  return grid;
}

// Column-normalized Gaussian weights of every non-constant mode against
// every energy, [k-1 x num_energies].
MatX mode_weights(const VecX& eigenvalues, const EnergyGrid& grid) {
  int modes = static_cast<int>(eigenvalues.size()) - 1;
  MatX g(modes, grid.energies.size());
  double inv = 1.0 / (2.0 * grid.sigma * grid.sigma);
  for (int i = 0; i < modes; ++i) {
    double loglam = std::log(eigenvalues[i + 1]);
    for (int j = 0; j < grid.energies.size(); ++j) {
      double d = grid.energies[j] - loglam;
      g(i, j) = std::exp(-d * d * inv);
    }
  }
  for (int j = 0; j < g.cols(); ++j) g.col(j) /= g.col(j).sum();
  return g;
}

void write_double(std::ofstream& file, double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  file << buffer;
}

}  // namespace

DescriptorSet compute_wks(const SpectralBasis& basis, int num_energies) {
  EnergyGrid grid = make_energy_grid(basis, num_energies);
  MatX g = mode_weights(basis.eigenvalues, grid);

  DescriptorSet out;
  out.kind = DescriptorKind::WKS;
  out.energies = grid.energies;
  out.sigma = grid.sigma;
  out.values.noalias() =
      basis.functions.rightCols(basis.size() - 1).array().square().matrix() * g;
  return out;
}

DescriptorSet compute_landmark_descriptors(const SpectralBasis& basis,
                                           const std::vector<int>& landmarks,
                                           int num_energies) {
  if (landmarks.empty()) throw std::invalid_argument("no landmark vertices given");
  for (int v : landmarks)
    if (v < 0 || v >= basis.num_vertices())
      throw std::out_of_range("landmark vertex " + std::to_string(v) + " out of range");

  EnergyGrid grid = make_energy_grid(basis, num_energies);
  MatX g = mode_weights(basis.eigenvalues, grid);
  MatX tail = basis.functions.rightCols(basis.size() - 1);

  DescriptorSet out;
  out.kind = DescriptorKind::LandmarkIndicator;
  out.energies = grid.energies;
  out.sigma = grid.sigma;
  out.values.resize(basis.num_vertices(), num_energies * static_cast<int>(landmarks.size()));
  for (std::size_t l = 0; l < landmarks.size(); ++l) {
    MatX scaled = g.array().colwise() * tail.row(landmarks[l]).transpose().array();
    out.values.middleCols(static_cast<int>(l) * num_energies, num_energies).noalias() =
        tail * scaled;
  }
  return out;
}

FunctionalMap estimate_fmap(const DescriptorSet& desc_src, const DescriptorSet& desc_dst,
                            const SpectralBasis& basis_src, const SpectralBasis& basis_dst,
                            int k_init, const FmapWeights& weights) {
  if (desc_src.size() != desc_dst.size())
    throw std::invalid_argument("descriptor column counts differ");
  if (desc_src.size() == 0) throw std::invalid_argument("empty descriptor sets");
  if (k_init < 1 || k_init > basis_src.size() || k_init > basis_dst.size())
    throw std::invalid_argument("map size must be in [1, basis size]");

  MatX a_src = project(basis_src.truncated(k_init), desc_src.values);
  MatX a_dst = project(basis_dst.truncated(k_init), desc_dst.values);

  // Squared eigenvalue gaps drive the commutativity penalty. Pairs with a
  // sentinel eigenvalue carry no penalty and do not enter the mean.
  MatX gap2 = MatX::Zero(k_init, k_init);
  double gap_sum = 0.0;
  long gap_count = 0;
  for (int i = 0; i < k_init; ++i) {
    double li = basis_src.eigenvalues[i];
    if (std::isnan(li)) continue;
    for (int j = 0; j < k_init; ++j) {
      double lj = basis_dst.eigenvalues[j];
      if (std::isnan(lj)) continue;
      double d = li - lj;
      gap2(i, j) = d * d;
      gap_sum += gap2(i, j);
      ++gap_count;
    }
  }

  double mu = weights.commutativity;
  if (mu < 0.0) {
    double mean_gap2 = gap_count > 0 ? gap_sum / static_cast<double>(gap_count) : 0.0;
    mu = mean_gap2 > 0.0 ? 1e-3 * a_src.squaredNorm() / mean_gap2 : 0.0;
  }

  MatX data = weights.descriptor * (a_dst * a_dst.transpose());
  MatX rhs = weights.descriptor * (a_dst * a_src.transpose());

  FunctionalMap out;
  out.C.resize(k_init, k_init);
  out.src_kind = basis_src.kind;
  out.dst_kind = basis_dst.kind;
  for (int i = 0; i < k_init; ++i) {
    MatX normal = data;
    normal.diagonal() += mu * gap2.row(i).transpose();
    // Symmetric meshes pair repeated eigenvalues (zero penalty blocks) with
    // symmetry-blind descriptors, which leaves the normal matrix genuinely
    // rank-deficient. The minimum-norm solution zeroes the unidentifiable
    // directions instead of amplifying noise into them.
    Eigen::SelfAdjointEigenSolver<MatX> eig(normal);
    if (eig.info() != Eigen::Success)
      throw std::runtime_error("eigensolve failed on functional map row " +
                               std::to_string(i));
    double dmax = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (!(dmax > 0.0)) {
      throw std::runtime_error("singular normal equations in functional map row " +
                               std::to_string(i) + " (condition estimate " +
                               std::to_string(std::numeric_limits<double>::infinity()) +
                               ")");
    }
    double cutoff = dmax * k_init * 2.3e-16;
    VecX inverted = (eig.eigenvalues().array() > cutoff)
                        .select(eig.eigenvalues().array().inverse(), 0.0);
    out.C.row(i) = (eig.eigenvectors() *
                    (inverted.asDiagonal() * (eig.eigenvectors().transpose() * rhs.col(i))))
                       .transpose();
  }
  return out;
}

std::vector<int> nearest_rows(const MatX& queries, const MatX& targets) {
  if (queries.cols() != targets.cols())
    throw std::invalid_argument("query and target dimensions differ");
  if (targets.rows() == 0) throw std::invalid_argument("no target rows");

  const int num_queries = static_cast<int>(queries.rows());
  const int num_targets = static_cast<int>(targets.rows());
  std::vector<int> out(num_queries);
  if (num_queries == 0) return out;

  // argmin_j |q - t_j|^2 = argmin_j (|t_j|^2 - 2 q . t_j); the scan keeps
  // the smallest index on exact ties.
  VecX target_norms = targets.rowwise().squaredNorm();
  const int block = 512;
  const int num_blocks = (num_queries + block - 1) / block;

  std::atomic<int> next_block{0};
  auto worker = [&]() {
    MatX scores;
    for (;;) {
      int b = next_block.fetch_add(1);
      if (b >= num_blocks) return;
      int start = b * block;
      int count = std::min(block, num_queries - start);
      scores.noalias() = queries.middleRows(start, count) * targets.transpose();
      for (int r = 0; r < count; ++r) {
        int best = 0;
        double best_value = target_norms[0] - 2.0 * scores(r, 0);
        for (int j = 1; j < num_targets; ++j) {
          double value = target_norms[j] - 2.0 * scores(r, j);
          if (value < best_value) {
            best_value = value;
            best = j;
          }
        }
        out[start + r] = best;
      }
    }
  };

  unsigned hardware = std::thread::hardware_concurrency();
  int wanted = static_cast<int>(hardware ? hardware : 1);
  // Blocks are disjoint, so the worker count never changes the results.
  if (const char* env = std::getenv("VOLFM_THREADS")) {
    char* end = nullptr;
    long parsed = std::strtol(env, &end, 10);
    if (end != env && parsed > 0) wanted = static_cast<int>(parsed);
  }
  int threads = std::clamp(wanted, 1, num_blocks);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return out;
}

Correspondence extract_p2p(const SpectralBasis& basis_src, const SpectralBasis& basis_dst,
                           const FunctionalMap& map) {
  if (map.rows() < 1 || map.rows() > basis_src.size())
    throw std::invalid_argument("map rows exceed the source basis size");
  if (map.cols() < 1 || map.cols() > basis_dst.size())
    throw std::invalid_argument("map cols exceed the destination basis size");

  MatX aligned = basis_src.functions.leftCols(map.rows()) * map.C;
  MatX target = basis_dst.functions.leftCols(map.cols());
  Correspondence pi;
  pi.map = nearest_rows(aligned, target);
  pi.target_size = basis_dst.num_vertices();
  return pi;
}

FunctionalMap fmap_from_p2p(const Correspondence& pi, const SpectralBasis& basis_src,
                            const SpectralBasis& basis_dst, int k) {
  if (k < 1 || k > basis_src.size() || k > basis_dst.size())
    throw std::invalid_argument("map size must be in [1, basis size]");
  if (static_cast<int>(pi.size()) != basis_src.num_vertices())
    throw std::invalid_argument("correspondence length does not match the source mesh");
  if (!basis_src.has_mass())
    throw std::invalid_argument("source basis has no mass vector attached");
  for (int i = 0; i < static_cast<int>(pi.size()); ++i)
    if (pi(i) < 0 || pi(i) >= basis_dst.num_vertices())
      throw std::out_of_range("correspondence target " + std::to_string(pi(i)) +
                              " out of range");

  MatX pulled = basis_dst.functions(pi.map, Eigen::seqN(0, k));
  FunctionalMap out;
  out.C.noalias() = basis_src.functions.leftCols(k).transpose() *
                    (basis_src.mass.asDiagonal() * pulled);
  out.src_kind = basis_src.kind;
  out.dst_kind = basis_dst.kind;
  return out;
}

FunctionalMap fmap_from_p2p_subset(const std::vector<int>& rows_src,
                                   const std::vector<int>& rows_dst,
                                   const SpectralBasis& basis_src,
                                   const SpectralBasis& basis_dst, int k) {
  if (k < 1 || k > basis_src.size() || k > basis_dst.size())
    throw std::invalid_argument("map size must be in [1, basis size]");
  if (rows_src.size() != rows_dst.size())
    throw std::invalid_argument("paired subset lengths differ");
  if (static_cast<int>(rows_src.size()) < k)
    throw std::invalid_argument("need at least as many sample pairs as basis functions");
  for (int v : rows_src)
    if (v < 0 || v >= basis_src.num_vertices())
      throw std::out_of_range("source sample " + std::to_string(v) + " out of range");
  for (int v : rows_dst)
    if (v < 0 || v >= basis_dst.num_vertices())
      throw std::out_of_range("destination sample " + std::to_string(v) + " out of range");

  MatX a = basis_src.functions(rows_src, Eigen::seqN(0, k));
  MatX b = basis_dst.functions(rows_dst, Eigen::seqN(0, k));
  Eigen::ColPivHouseholderQR<MatX> qr(a);
  if (qr.rank() < k) {
    double head = std::abs(qr.matrixR()(0, 0));
    double tail = std::abs(qr.matrixR()(k - 1, k - 1));
    double cond = tail > 0.0 ? head / tail : std::numeric_limits<double>::infinity();
    throw std::runtime_error("sampled basis rows are rank-deficient (condition estimate " +
                             std::to_string(cond) + ")");
  }

  FunctionalMap out;
  out.C = qr.solve(b);
  out.src_kind = basis_src.kind;
  out.dst_kind = basis_dst.kind;
  return out;
}

FunctionalMap zoomout(const FunctionalMap& initial, const SpectralBasis& basis_src,
                      const SpectralBasis& basis_dst, int k_final, int step,
                      const std::vector<int>& samples) {
  if (initial.rows() != initial.cols())
    throw std::invalid_argument("initial map must be square");
  int k = initial.rows();
  if (k < 1) throw std::invalid_argument("initial map is empty");
  if (k_final < k) throw std::invalid_argument("final size below the initial size");
  if (k_final > basis_src.size() || k_final > basis_dst.size())
    throw std::invalid_argument("final size exceeds a basis size");
  if (step < 1) throw std::invalid_argument("step must be positive");
  for (int v : samples)
    if (v < 0 || v >= basis_src.num_vertices())
      throw std::out_of_range("sample vertex " + std::to_string(v) + " out of range");

  FunctionalMap current = initial;
  current.src_kind = basis_src.kind;
  current.dst_kind = basis_dst.kind;
  while (k < k_final) {
    int next = std::min(k + step, k_final);
    if (samples.empty()) {
      Correspondence pi = extract_p2p(basis_src, basis_dst, current);
      current = fmap_from_p2p(pi, basis_src, basis_dst, next);
    } else {
      MatX queries = basis_src.functions(samples, Eigen::seqN(0, k)) * current.C;
      MatX target = basis_dst.functions.leftCols(k);
      std::vector<int> hits = nearest_rows(queries, target);
      current = fmap_from_p2p_subset(samples, hits, basis_src, basis_dst, next);
    }
    k = next;
  }
  return current;
}

void save_fmap(const std::string& path, const FunctionalMap& map) {
  if (map.rows() == 0 || map.cols() == 0) throw std::invalid_argument("empty functional map");
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << map.rows() << ' ' << map.cols() << '\n';
  for (int i = 0; i < map.rows(); ++i) {
    for (int j = 0; j < map.cols(); ++j) {
      if (j) file << ',';
      write_double(file, map.C(i, j));
    }
    file << '\n';
  }
  if (!file) throw std::runtime_error("failed while writing " + path);
}

FunctionalMap load_fmap(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open " + path);
  std::string header;
  if (!std::getline(file, header)) throw std::runtime_error(path + ": missing header");
  std::istringstream head(header);
  long rows = 0;
  long cols = 0;
  if (!(head >> rows >> cols) || rows < 1 || cols < 1)
    throw std::runtime_error(path + ": malformed size header");

  std::stringstream body;
  body << file.rdbuf();
  std::string text = body.str();
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream values(text);

  FunctionalMap map;
  map.C.resize(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j)
      if (!(values >> map.C(i, j)))
        throw std::runtime_error(path + ": expected " + std::to_string(rows * cols) +
                                 " matrix entries");
  double extra;
  if (values >> extra) throw std::runtime_error(path + ": trailing data after the matrix");
  return map;
}

}  // namespace volfm
