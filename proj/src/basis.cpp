#include "volfm/basis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace volfm {

namespace {

void require_mass(const SpectralBasis& basis, const char* who) {
  if (!basis.has_mass())
    throw std::invalid_argument(std::string(who) +
                                ": basis carries no mass vector (reattach it from the mesh "
                                "after loading a cache)");
}

}  // namespace

MatX project(const SpectralBasis& basis, const MatX& signal) {
  require_mass(basis, "project");
  if (signal.rows() != basis.num_vertices())
    throw std::invalid_argument("project: signal has " + std::to_string(signal.rows()) +
                                " rows, basis has " + std::to_string(basis.num_vertices()) +
                                " vertices");
  return basis.functions.transpose() * (basis.mass.asDiagonal() * signal);
}

MatX reconstruct(const SpectralBasis& basis, const MatX& coeffs) {
  if (coeffs.rows() != basis.size())
    throw std::invalid_argument("reconstruct: coefficient rows " + std::to_string(coeffs.rows()) +
                                " do not match basis size " + std::to_string(basis.size()));
  return basis.functions * coeffs;
}

MatX restrict_to_boundary(const SpectralBasis& basis, const SurfaceMesh& surface) {
  if (!surface.has_parent_map())
    throw std::invalid_argument("restrict_to_boundary: surface has no parent map");
  MatX trace(surface.num_vertices(), basis.size());
  for (int i = 0; i < surface.num_vertices(); ++i) {
    int parent = surface.parent_map[i];
    if (parent < 0 || parent >= basis.num_vertices())
      throw std::invalid_argument("restrict_to_boundary: parent index " +
                                  std::to_string(parent) + " outside the basis domain");
    trace.row(i) = basis.functions.row(parent);
  }
  return trace;
}

void attach_boundary_trace(SpectralBasis& basis, const SurfaceMesh& surface) {
  basis.boundary_trace = restrict_to_boundary(basis, surface);
  basis.trace_parents = surface.parent_map;
}

MatX project_boundary(const MatX& trace, const MatX& signal) {
  if (signal.rows() != trace.rows())
    throw std::invalid_argument("project_boundary: signal rows do not match the trace");
  if (trace.cols() > trace.rows())
    throw std::invalid_argument("project_boundary: more basis functions than boundary vertices");

  Eigen::ColPivHouseholderQR<MatX> qr(trace);
  if (qr.rank() < trace.cols()) {
    double cond = std::abs(qr.matrixR()(0, 0)) /
                  std::max(std::abs(qr.matrixR()(trace.cols() - 1, trace.cols() - 1)),
                           std::numeric_limits<double>::min());
    throw std::runtime_error("project_boundary: boundary trace is rank-deficient (rank " +
                             std::to_string(qr.rank()) + " of " + std::to_string(trace.cols()) +
                             ", condition estimate " + std::to_string(cond) + ")");
  }
  return qr.solve(signal);
}

MatX project_boundary_weighted(const MatX& trace, const VecX& boundary_mass,
                               const MatX& signal) {
  if (boundary_mass.size() != trace.rows())
    throw std::invalid_argument("project_boundary_weighted: mass size does not match the trace");
  if ((boundary_mass.array() <= 0.0).any())
    throw std::invalid_argument("project_boundary_weighted: mass must be strictly positive");
  VecX sqrt_mass = boundary_mass.cwiseSqrt();
  return project_boundary(sqrt_mass.asDiagonal() * trace, sqrt_mass.asDiagonal() * signal);
}

SpectralBasis augment_cmh(const SpectralBasis& basis, const MatX& coordinates) {
  require_mass(basis, "augment_cmh");
  if (basis.size() < 4)
    throw std::invalid_argument("augment_cmh: basis must have at least 4 functions");
  if (coordinates.rows() != basis.num_vertices() || coordinates.cols() != 3)
    throw std::invalid_argument("augment_cmh: coordinates must be n x 3");

  const int k = basis.size();
  const int kept = k - 3;
  const VecX& w = basis.mass;
  auto wdot = [&w](const VecX& a, const VecX& b) {
    return (a.array() * w.array() * b.array()).sum();
  };

  SpectralBasis out;
  out.kind = BasisKind::CMH;
  out.mass = basis.mass;
  out.functions.resize(basis.num_vertices(), k);
  out.functions.leftCols(kept) = basis.functions.leftCols(kept);
  out.eigenvalues.resize(k);
  out.eigenvalues.head(kept) = basis.eigenvalues.head(kept);
  out.eigenvalues.tail(3).setConstant(std::numeric_limits<double>::quiet_NaN());

  for (int c = 0; c < 3; ++c) {
    VecX v = coordinates.col(c);
    double norm_before = std::sqrt(wdot(v, v));
    int have = kept + c;
    for (int pass = 0; pass < 2; ++pass) {
      VecX h = out.functions.leftCols(have).transpose() * w.cwiseProduct(v);
      v -= out.functions.leftCols(have) * h;
    }
    double norm_after = std::sqrt(std::max(wdot(v, v), 0.0));
    if (norm_after <= 1e-10 * norm_before)
      throw std::runtime_error(
          "augment_cmh: coordinate channel " + std::to_string(c) +
          " is linearly dependent on the retained basis functions");
    out.functions.col(have) = v / norm_after;
  }

  if (basis.has_trace()) {
    out.trace_parents = basis.trace_parents;
    out.boundary_trace.resize(static_cast<int>(basis.trace_parents.size()), k);
    for (int i = 0; i < out.boundary_trace.rows(); ++i)
      out.boundary_trace.row(i) = out.functions.row(basis.trace_parents[i]);
  }
  return out;
}

SpectralBasis build_orthoprods(const SpectralBasis& basis, int order) {
  require_mass(basis, "build_orthoprods");
  if (basis.kind != BasisKind::LBO)
    throw std::invalid_argument("build_orthoprods: source basis must be of LBO kind");
  if (order != 2)
    throw std::invalid_argument("build_orthoprods: only order 2 is supported");

  const int k0 = basis.size();
  const int n = basis.num_vertices();
  const VecX& w = basis.mass;
  auto wdot = [&w](const VecX& a, const VecX& b) {
    return (a.array() * w.array() * b.array()).sum();
  };

  // Candidate list: originals first, then products phi_i phi_j (i <= j)
  // ordered by ascending pseudo-eigenvalue lambda_i + lambda_j.
  struct Candidate {
    int i, j;  // j < 0 marks an original function
    double pseudo;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(k0 + k0 * (k0 + 1) / 2);
  for (int i = 0; i < k0; ++i) candidates.push_back({i, -1, basis.eigenvalues[i]});
  std::vector<Candidate> products;
  for (int i = 0; i < k0; ++i)
    for (int j = i; j < k0; ++j)
      products.push_back({i, j, basis.eigenvalues[i] + basis.eigenvalues[j]});
  std::stable_sort(products.begin(), products.end(),
                   [](const Candidate& a, const Candidate& b) { return a.pseudo < b.pseudo; });
  candidates.insert(candidates.end(), products.begin(), products.end());

  // Reference scale for the drop tolerance: the largest candidate W-norm.
  double max_norm = 0.0;
  for (const auto& c : candidates) {
    VecX v = c.j < 0 ? VecX(basis.functions.col(c.i))
                     : VecX(basis.functions.col(c.i).cwiseProduct(basis.functions.col(c.j)));
    max_norm = std::max(max_norm, std::sqrt(wdot(v, v)));
  }
  const double drop_tol = 1e-8 * max_norm;

  MatX accepted(n, candidates.size());
  std::vector<double> pseudo;
  int count = 0;
  for (const auto& c : candidates) {
    VecX v = c.j < 0 ? VecX(basis.functions.col(c.i))
                     : VecX(basis.functions.col(c.i).cwiseProduct(basis.functions.col(c.j)));
    for (int pass = 0; pass < 2; ++pass) {
      if (count == 0) break;
      VecX h = accepted.leftCols(count).transpose() * w.cwiseProduct(v);
      v -= accepted.leftCols(count) * h;
    }
    double norm = std::sqrt(std::max(wdot(v, v), 0.0));
    if (norm < drop_tol) continue;
    accepted.col(count) = v / norm;
    pseudo.push_back(c.pseudo);
    ++count;
  }
  if (count == 0) throw std::runtime_error("build_orthoprods: no independent candidates");

  SpectralBasis out;
  out.kind = BasisKind::Orthoprods;
  out.mass = basis.mass;
  out.functions = accepted.leftCols(count);
  out.eigenvalues = Eigen::Map<const VecX>(pseudo.data(), count);

  if (basis.has_trace()) {
    out.trace_parents = basis.trace_parents;
    out.boundary_trace.resize(static_cast<int>(basis.trace_parents.size()), count);
    for (int i = 0; i < out.boundary_trace.rows(); ++i)
      out.boundary_trace.row(i) = out.functions.row(basis.trace_parents[i]);
  }
  return out;
}

}  // namespace volfm
