#include "volfm/types.hpp"

#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace volfm {

Correspondence Correspondence::identity(int n) {
  Correspondence corr;
  corr.map.resize(n);
  std::iota(corr.map.begin(), corr.map.end(), 0);
  corr.target_size = n;
  return corr;
}

bool Correspondence::is_identity() const {
  for (int i = 0; i < size(); ++i)
    if (map[i] != i) return false;
  return true;
}

Correspondence load_correspondence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open correspondence file: " + path);

  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string hash, tag;
  int n_src = 0, n_dst = 0;
  if (!(hs >> hash >> tag >> n_src >> n_dst) || hash != "#" || tag != "p2p")
    throw std::runtime_error("correspondence file " + path +
                             ": expected header \"# p2p <n_src> <n_dst>\"");
  if (n_src < 0 || n_dst <= 0)
    throw std::runtime_error("correspondence file " + path + ": invalid sizes in header");

  Correspondence corr;
  corr.target_size = n_dst;
  corr.map.resize(n_src);
  for (int i = 0; i < n_src; ++i) {
    if (!(in >> corr.map[i]))
      throw std::runtime_error("correspondence file " + path + ": expected " +
                               std::to_string(n_src) + " entries, got " + std::to_string(i));
    if (corr.map[i] < 0 || corr.map[i] >= n_dst)
      throw std::runtime_error("correspondence file " + path + ": entry " + std::to_string(i) +
                               " = " + std::to_string(corr.map[i]) + " out of range [0, " +
                               std::to_string(n_dst) + ")");
  }
  return corr;
}

void save_correspondence(const Correspondence& corr, const std::string& path) {
  if (corr.target_size <= 0)
    throw std::invalid_argument("save_correspondence: target_size must be set");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write correspondence file: " + path);
  out << "# p2p " << corr.size() << " " << corr.target_size << "\n";
  for (int v : corr.map) out << v << "\n";
  if (!out) throw std::runtime_error("write failure on correspondence file: " + path);
}

std::vector<int> load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open label file: " + path);
  std::vector<int> labels;
  int v;
  while (in >> v) labels.push_back(v);
  if (!in.eof()) throw std::runtime_error("label file " + path + ": non-integer entry");
  return labels;
}

void save_labels(const std::vector<int>& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write label file: " + path);
  for (int v : labels) out << v << "\n";
  if (!out) throw std::runtime_error("write failure on label file: " + path);
}

}  // namespace volfm
