#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace volfm {

using Vec3 = Eigen::Vector3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using MatXi = Eigen::MatrixXi;
using SpMat = Eigen::SparseMatrix<double>;

// Per-vertex map pi : V_src -> V_dst, one target vertex index per source
// vertex. target_size records |V_dst| when known (-1 otherwise).
struct Correspondence {
  std::vector<int> map;
  int target_size = -1;

  int size() const { return static_cast<int>(map.size()); }
  int operator()(int i) const { return map[i]; }

  static Correspondence identity(int n);
  bool is_identity() const;
};

// Text format: first line "# p2p <n_src> <n_dst>", then one 0-based target
// index per source vertex.
Correspondence load_correspondence(const std::string& path);
void save_correspondence(const Correspondence& corr, const std::string& path);

std::vector<int> load_labels(const std::string& path);
void save_labels(const std::vector<int>& labels, const std::string& path);

}  // namespace volfm
