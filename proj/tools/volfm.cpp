// Batch front-end for the volumetric functional maps library. One job per
// invocation; exit codes: 0 success, 1 usage error, 2 computational failure.
#include <CLI11.hpp>

#include "volfm/basis.hpp"
#include "volfm/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace volfm;

const std::map<std::string, BasisKind> kKindNames = {
    {"lbo", BasisKind::LBO}, {"cmh", BasisKind::CMH}, {"orthoprods", BasisKind::Orthoprods}};
const std::map<std::string, ErrorNormalization> kNormNames = {
    {"diameter", ErrorNormalization::Diameter},
    {"sqrt-area", ErrorNormalization::SqrtArea},
    {"cbrt-volume", ErrorNormalization::CbrtVolume}};

SpectralBasis build_basis(const TetMesh& mesh, const LaplacianOperators& ops,
                          BasisKind kind, int k, int order,
                          const EigenSolveOptions& options) {
  SpectralBasis basis = compute_eigenbasis(ops, k, options);
  if (kind == BasisKind::CMH) basis = augment_cmh(basis, mesh.vertices);
  if (kind == BasisKind::Orthoprods) basis = build_orthoprods(basis, order);
  return basis;
}

// Cache-aware basis access: an existing file wins, a named missing file is
// filled after computing. The mass vector always comes from the mesh.
SpectralBasis obtain_basis(const TetMesh& mesh, const std::string& cache,
                           BasisKind kind, int k, int order,
                           const EigenSolveOptions& options) {
  LaplacianOperators ops = assemble_volume_operators(mesh);
  if (!cache.empty() && std::filesystem::exists(cache)) {
    SpectralBasis basis = load_basis(cache);
    if (basis.num_vertices() != mesh.num_vertices())
      throw std::runtime_error(cache + ": cached basis does not match the mesh");
    if (basis.kind != kind)
      throw std::runtime_error(cache + ": cached basis kind differs from the request");
    if (kind != BasisKind::Orthoprods && basis.size() < k)
      throw std::runtime_error(cache + ": cached basis holds fewer than " +
                               std::to_string(k) + " functions");
    basis.mass = ops.mass;
    return basis;
  }
  SpectralBasis basis = build_basis(mesh, ops, kind, k, order, options);
  if (!cache.empty()) save_basis(basis, cache);
  return basis;
}

void load_landmark_pairs(const std::string& path, std::vector<int>& src,
                         std::vector<int>& dst) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open landmark file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    std::string::size_type hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    int a = 0, b = 0;
    if (fields >> a >> b) {
      src.push_back(a);
      dst.push_back(b);
    }
  }
  if (src.empty()) throw std::runtime_error(path + ": no landmark pairs found");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << std::setprecision(17);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"volfm: volumetric functional maps toolkit"};
  app.require_subcommand(1);

  // Shared knobs; every subcommand that solves an eigenproblem honours them.
  EigenSolveOptions eigen_options;
  std::string kind_name = "lbo";
  int orthoprods_order = 2;

  // basis ------------------------------------------------------------------
  auto* basis_cmd = app.add_subcommand("basis", "compute and cache a spectral basis");
  std::string basis_mesh, basis_out;
  int basis_k = 120;
  bool basis_trace = false;
  basis_cmd->add_option("mesh", basis_mesh, "tetrahedral mesh (MEDIT)")->required();
  basis_cmd->add_option("-o,--output", basis_out, "output basis file (VFMB)")->required();
  basis_cmd->add_option("--k", basis_k, "basis size (k0 for orthoprods)")
      ->capture_default_str();
  basis_cmd->add_option("--kind", kind_name, "lbo|cmh|orthoprods")
      ->check(CLI::IsMember({"lbo", "cmh", "orthoprods"}));
  basis_cmd->add_option("--order", orthoprods_order, "orthoprods product order")
      ->capture_default_str();
  basis_cmd->add_flag("--with-trace", basis_trace, "store the boundary trace block");
  basis_cmd->callback([&] {
    TetMesh mesh = load_tet_mesh(basis_mesh);
    SpectralBasis basis = build_basis(mesh, assemble_volume_operators(mesh),
                                      kKindNames.at(kind_name), basis_k,
                                      orthoprods_order, eigen_options);
    if (basis_trace) attach_boundary_trace(basis, extract_boundary(mesh));
    save_basis(basis, basis_out);
    std::printf("basis kind=%s k=%d n=%d -> %s\n", kind_name.c_str(), basis.size(),
                basis.num_vertices(), basis_out.c_str());
  });

  // match ------------------------------------------------------------------
  auto* match_cmd = app.add_subcommand("match", "volume-aware surface matching");
  std::string match_src, match_dst, match_out, match_fmap, match_landmarks;
  std::string match_cache_src, match_cache_dst;
  MatchConfig match_config;
  match_cmd->add_option("source", match_src, "source mesh (MEDIT)")->required();
  match_cmd->add_option("target", match_dst, "target mesh (MEDIT)")->required();
  match_cmd->add_option("-o,--output", match_out, "output correspondence file")->required();
  match_cmd->add_option("--fmap", match_fmap, "also write the functional map CSV");
  match_cmd->add_option("--k-init", match_config.k_init)->capture_default_str();
  match_cmd->add_option("--k-final", match_config.k_final)->capture_default_str();
  match_cmd->add_option("--step", match_config.step)->capture_default_str();
  match_cmd->add_option("--num-energies", match_config.num_energies)->capture_default_str();
  match_cmd->add_option("--descriptor-k", match_config.descriptor_k)->capture_default_str();
  match_cmd->add_option("--landmarks", match_landmarks,
                        "text file of paired vertex indices, one 'src dst' per line");
  bool slow_zoomout = false;
  match_cmd->add_flag("--slow-zoomout", slow_zoomout,
                      "refine on all vertices instead of boundary samples");
  match_cmd->add_option("--src-basis", match_cache_src, "basis cache file for the source");
  match_cmd->add_option("--dst-basis", match_cache_dst, "basis cache file for the target");
  match_cmd->callback([&] {
    TetMesh source = load_tet_mesh(match_src);
    TetMesh target = load_tet_mesh(match_dst);
    match_config.fast_zoomout = !slow_zoomout;
    match_config.eigen_options = eigen_options;
    if (!match_landmarks.empty())
      load_landmark_pairs(match_landmarks, match_config.landmarks_src,
                          match_config.landmarks_dst);

    int cap = std::min(source.num_vertices(), target.num_vertices());
    int k_basis =
        std::min(std::max(match_config.k_final, match_config.descriptor_k), cap);
    SpectralBasis basis_src = obtain_basis(source, match_cache_src, BasisKind::LBO,
                                           k_basis, 2, eigen_options);
    SpectralBasis basis_dst = obtain_basis(target, match_cache_dst, BasisKind::LBO,
                                           k_basis, 2, eigen_options);

    FunctionalMap map;
    Correspondence pi = vol2surf_match(source, target, basis_src, basis_dst,
                                       match_config, &map);
    save_correspondence(pi, match_out);
    if (!match_fmap.empty()) save_fmap(match_fmap, map);
    std::printf("matched %d boundary vertices onto %d (C is %dx%d) -> %s\n", pi.size(),
                pi.target_size, map.rows(), map.cols(), match_out.c_str());
  });

  // transfer / extrapolate ---------------------------------------------------
  auto* transfer_cmd =
      app.add_subcommand("transfer", "transfer target coordinates onto source connectivity");
  std::string tr_src, tr_dst, tr_corr, tr_out, tr_cache_src, tr_cache_dst;
  int tr_k = 120;
  transfer_cmd->add_option("source", tr_src, "source mesh (MEDIT)")->required();
  transfer_cmd->add_option("target", tr_dst, "target mesh (MEDIT)")->required();
  transfer_cmd->add_option("correspondence", tr_corr, "boundary correspondence file")
      ->required();
  transfer_cmd->add_option("-o,--output", tr_out, "output mesh (MEDIT)")->required();
  transfer_cmd->add_option("--k", tr_k, "basis size (k0 for orthoprods)")
      ->capture_default_str();
  transfer_cmd->add_option("--kind", kind_name, "lbo|cmh|orthoprods")
      ->check(CLI::IsMember({"lbo", "cmh", "orthoprods"}));
  transfer_cmd->add_option("--order", orthoprods_order)->capture_default_str();
  transfer_cmd->add_option("--src-basis", tr_cache_src, "basis cache file for the source");
  transfer_cmd->add_option("--dst-basis", tr_cache_dst, "basis cache file for the target");
  transfer_cmd->callback([&] {
    TetMesh source = load_tet_mesh(tr_src);
    TetMesh target = load_tet_mesh(tr_dst);
    Correspondence pi = load_correspondence(tr_corr);
    BasisKind kind = kKindNames.at(kind_name);
    SpectralBasis basis_src =
        obtain_basis(source, tr_cache_src, kind, tr_k, orthoprods_order, eigen_options);
    SpectralBasis basis_dst =
        obtain_basis(target, tr_cache_dst, kind, tr_k, orthoprods_order, eigen_options);
    int k = std::min(basis_src.size(), basis_dst.size());
    TransferResult result = transfer_connectivity(source, target, basis_src, basis_dst, pi, k);
    export_warm_start(result, tr_out);
    std::printf("transfer k=%d flipped %d / %d tets (fraction %.6g) -> %s\n", result.k_used,
                result.flips.flipped_count, source.num_tets(),
                result.flips.flipped_fraction, tr_out.c_str());
  });

  auto* extra_cmd = app.add_subcommand(
      "extrapolate", "extrapolate coordinates from a target surface (source spectrum only)");
  std::string ex_src, ex_surf, ex_corr, ex_out, ex_cache_src;
  int ex_k = 120;
  extra_cmd->add_option("source", ex_src, "source mesh (MEDIT)")->required();
  extra_cmd->add_option("surface", ex_surf, "target surface (OFF or MEDIT)")->required();
  extra_cmd->add_option("correspondence", ex_corr, "boundary correspondence file")->required();
  extra_cmd->add_option("-o,--output", ex_out, "output mesh (MEDIT)")->required();
  extra_cmd->add_option("--k", ex_k, "basis size (k0 for orthoprods)")->capture_default_str();
  extra_cmd->add_option("--kind", kind_name, "lbo|cmh|orthoprods")
      ->check(CLI::IsMember({"lbo", "cmh", "orthoprods"}));
  extra_cmd->add_option("--order", orthoprods_order)->capture_default_str();
  extra_cmd->add_option("--src-basis", ex_cache_src, "basis cache file for the source");
  extra_cmd->callback([&] {
    TetMesh source = load_tet_mesh(ex_src);
    SurfaceMesh surface = load_surface_mesh(ex_surf);
    Correspondence pi = load_correspondence(ex_corr);
    SpectralBasis basis = obtain_basis(source, ex_cache_src, kKindNames.at(kind_name),
                                       ex_k, orthoprods_order, eigen_options);
    TransferResult result =
        extrapolate_coordinates(source, surface, basis, pi, basis.size());
    export_warm_start(result, ex_out);
    std::printf("extrapolate k=%d flipped %d / %d tets (fraction %.6g) -> %s\n",
                result.k_used, result.flips.flipped_count, source.num_tets(),
                result.flips.flipped_fraction, ex_out.c_str());
  });

  // labels -------------------------------------------------------------------
  auto* labels_cmd = app.add_subcommand("labels", "pull integer labels through a map");
  std::string lb_corr, lb_in, lb_out;
  labels_cmd->add_option("correspondence", lb_corr)->required();
  labels_cmd->add_option("labels", lb_in, "labels on the target, one per line")->required();
  labels_cmd->add_option("-o,--output", lb_out)->required();
  labels_cmd->callback([&] {
    Correspondence pi = load_correspondence(lb_corr);
    std::vector<int> labels = load_labels(lb_in);
    save_labels(transfer_labels(pi, labels), lb_out);
    std::printf("labelled %d vertices -> %s\n", pi.size(), lb_out.c_str());
  });

  // eval ---------------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a correspondence against ground truth");
  std::string ev_corr, ev_gt, ev_src, ev_dst, ev_curve, ev_distortion;
  std::string ev_norm = "auto";
  int ev_samples = 1000;
  std::uint64_t ev_seed = 0;
  eval_cmd->add_option("correspondence", ev_corr)->required();
  eval_cmd->add_option("ground-truth", ev_gt)->required();
  eval_cmd->add_option("source", ev_src, "source mesh (MEDIT)")->required();
  eval_cmd->add_option("target", ev_dst, "target mesh (MEDIT)")->required();
  eval_cmd->add_option("--normalization", ev_norm, "auto|diameter|sqrt-area|cbrt-volume")
      ->check(CLI::IsMember({"auto", "diameter", "sqrt-area", "cbrt-volume"}));
  eval_cmd->add_option("--curve", ev_curve, "write the cumulative error curve CSV");
  eval_cmd->add_option("--distortion", ev_distortion,
                       "write geodesic distortion stats CSV (volume-level gt only)");
  eval_cmd->add_option("--samples", ev_samples, "distortion sample pairs")
      ->capture_default_str();
  eval_cmd->add_option("--seed", ev_seed, "distortion sampling seed")->capture_default_str();
  eval_cmd->callback([&] {
    Correspondence pi = load_correspondence(ev_corr);
    Correspondence gt = load_correspondence(ev_gt);
    TetMesh source = load_tet_mesh(ev_src);
    TetMesh target = load_tet_mesh(ev_dst);
    if (pi.size() != gt.size())
      throw std::invalid_argument("correspondence and ground truth sizes differ");

    GeodesicErrorStats stats;
    MapQuality quality;
    if (pi.size() == source.num_vertices()) {
      ErrorNormalization norm = ev_norm == "auto" ? ErrorNormalization::CbrtVolume
                                                  : kNormNames.at(ev_norm);
      stats = geodesic_error_stats(pi, gt, target, norm);
      quality = map_quality(pi, source, target);
    } else {
      SurfaceMesh boundary_src = extract_boundary(source);
      SurfaceMesh boundary_dst = extract_boundary(target);
      if (pi.size() != boundary_src.num_vertices())
        throw std::invalid_argument(
            "correspondence covers neither all vertices nor the boundary");
      ErrorNormalization norm =
          ev_norm == "auto" ? ErrorNormalization::Diameter : kNormNames.at(ev_norm);
      stats = geodesic_error_stats(pi, gt, boundary_dst, norm);
      quality = map_quality(pi, boundary_src, boundary_dst);
    }
    std::printf("age %.17g\n", stats.curve.age);
    std::printf("continuity %.17g\n", quality.continuity);
    std::printf("coverage %.17g\n", quality.coverage);
    std::printf("dirichlet %.17g\n", quality.dirichlet);
    if (!ev_curve.empty()) save_error_curve(ev_curve, stats.curve);
    if (!ev_distortion.empty()) {
      if (gt.size() != source.num_vertices())
        throw std::invalid_argument("distortion stats need a volume-level ground truth");
      DistortionStats distortion =
          geodesic_distortion_stats(source, target, gt, ev_samples, ev_seed);
      save_distortion_stats(ev_distortion, distortion);
    }
  });

  // spectrum -------------------------------------------------------------------
  auto* spectrum_cmd =
      app.add_subcommand("spectrum", "compare two spectra after unit-measure rescale");
  std::string sp_a, sp_b, sp_out;
  int sp_k = 50;
  bool sp_surface = false;
  spectrum_cmd->add_option("mesh-a", sp_a)->required();
  spectrum_cmd->add_option("mesh-b", sp_b)->required();
  spectrum_cmd->add_option("-o,--output", sp_out, "comparison CSV")->required();
  spectrum_cmd->add_option("--k", sp_k, "eigenvalues per mesh")->capture_default_str();
  spectrum_cmd->add_flag("--surface", sp_surface, "treat inputs as surface meshes (dim 2)");
  spectrum_cmd->callback([&] {
    VecX evals_a, evals_b;
    if (sp_surface) {
      SurfaceMesh a = load_surface_mesh(sp_a);
      SurfaceMesh b = load_surface_mesh(sp_b);
      rescale_to_unit_area(a);
      rescale_to_unit_area(b);
      evals_a = compute_eigenbasis(assemble_surface_operators(a), sp_k, eigen_options)
                    .eigenvalues;
      evals_b = compute_eigenbasis(assemble_surface_operators(b), sp_k, eigen_options)
                    .eigenvalues;
    } else {
      TetMesh a = load_tet_mesh(sp_a);
      TetMesh b = load_tet_mesh(sp_b);
      rescale_to_unit_volume(a);
      rescale_to_unit_volume(b);
      evals_a = compute_eigenbasis(assemble_volume_operators(a), sp_k, eigen_options)
                    .eigenvalues;
      evals_b = compute_eigenbasis(assemble_volume_operators(b), sp_k, eigen_options)
                    .eigenvalues;
    }
    SpectrumComparison comparison =
        spectrum_offset_error(evals_a, evals_b, sp_surface ? 2 : 3);
    save_spectrum_comparison(sp_out, comparison);
    std::printf("spectrum k=%d mean relative diff %.6g mean offset diff %.6g -> %s\n", sp_k,
                comparison.relative_diffs.mean(), comparison.offset_diffs.mean(),
                sp_out.c_str());
  });

  // sweep ------------------------------------------------------------------------
  auto* sweep_cmd =
      app.add_subcommand("sweep", "transfer flip counts over a list of basis sizes");
  std::string sw_src, sw_dst, sw_corr, sw_out;
  std::vector<int> sw_klist;
  std::vector<double> sw_kfracs;
  sweep_cmd->add_option("source", sw_src)->required();
  sweep_cmd->add_option("target", sw_dst)->required();
  sweep_cmd->add_option("correspondence", sw_corr, "boundary correspondence file")->required();
  sweep_cmd->add_option("-o,--output", sw_out, "per-k CSV")->required();
  auto* klist_opt = sweep_cmd->add_option("--k-list", sw_klist, "explicit basis sizes")
                        ->delimiter(',');
  sweep_cmd->add_option("--k-fracs", sw_kfracs, "basis sizes as fractions of the spectrum")
      ->delimiter(',')
      ->excludes(klist_opt);
  sweep_cmd->add_option("--kind", kind_name, "lbo|cmh")
      ->check(CLI::IsMember({"lbo", "cmh"}));
  sweep_cmd->callback([&] {
    TetMesh source = load_tet_mesh(sw_src);
    TetMesh target = load_tet_mesh(sw_dst);
    Correspondence pi = load_correspondence(sw_corr);
    std::vector<int> ks = sw_klist;
    for (double frac : sw_kfracs)
      ks.push_back(std::max(1, static_cast<int>(std::lround(frac * source.num_vertices()))));
    if (ks.empty()) throw CLI::RequiredError("--k-list or --k-fracs");

    int k_max = *std::max_element(ks.begin(), ks.end());
    SpectralBasis basis_src =
        compute_eigenbasis(assemble_volume_operators(source), k_max, eigen_options);
    SpectralBasis basis_dst =
        compute_eigenbasis(assemble_volume_operators(target), k_max, eigen_options);
    BasisKind kind = kKindNames.at(kind_name);

    std::ofstream out = open_output(sw_out);
    out << "k,flipped,flip_fraction,mean_distortion\n";
    for (int k : ks) {
      SpectralBasis bs = basis_src.truncated(k);
      SpectralBasis bd = basis_dst.truncated(k);
      if (kind == BasisKind::CMH) {
        bs = augment_cmh(bs, source.vertices);
        bd = augment_cmh(bd, target.vertices);
      }
      TransferResult result = transfer_connectivity(source, target, bs, bd, pi, k);
      out << k << ',' << result.flips.flipped_count << ',' << result.flips.flipped_fraction
          << ',' << result.flips.distortion.mean() << '\n';
      std::printf("k=%d flipped %d / %d\n", k, result.flips.flipped_count,
                  source.num_tets());
    }
    if (!out) throw std::runtime_error("write failure on " + sw_out);
  });

  // gen -------------------------------------------------------------------------
  auto* gen_cmd = app.add_subcommand("gen", "write synthetic test meshes");
  std::string gen_shape, gen_out, gen_pair_out, gen_gt_out, gen_surface_gt_out;
  int gen_res = 8, gen_rx = 16, gen_ry = 4, gen_rz = 4;
  double gen_size = 1.0, gen_bend = M_PI / 4.0;
  double gen_lx = 2.0, gen_ly = 0.5, gen_lz = 0.5;
  gen_cmd->add_option("shape", gen_shape, "cube|bar|bent_bar")
      ->required()
      ->check(CLI::IsMember({"cube", "bar", "bent_bar"}));
  gen_cmd->add_option("-o,--output", gen_out)->required();
  gen_cmd->add_option("--res", gen_res, "cube cells per side")->capture_default_str();
  gen_cmd->add_option("--size", gen_size, "cube edge length")->capture_default_str();
  gen_cmd->add_option("--bend", gen_bend, "bend angle in radians")->capture_default_str();
  gen_cmd->add_option("--lx", gen_lx)->capture_default_str();
  gen_cmd->add_option("--ly", gen_ly)->capture_default_str();
  gen_cmd->add_option("--lz", gen_lz)->capture_default_str();
  gen_cmd->add_option("--rx", gen_rx)->capture_default_str();
  gen_cmd->add_option("--ry", gen_ry)->capture_default_str();
  gen_cmd->add_option("--rz", gen_rz)->capture_default_str();
  gen_cmd->add_option("--pair-out", gen_pair_out, "bent mesh output (bent_bar)");
  gen_cmd->add_option("--gt-out", gen_gt_out, "volume ground truth output (bent_bar)");
  gen_cmd->add_option("--surface-gt-out", gen_surface_gt_out,
                      "boundary ground truth output (bent_bar)");
  gen_cmd->callback([&] {
    if (gen_shape == "cube") {
      save_mesh(generate_cube_grid(gen_res, gen_size), gen_out);
    } else if (gen_shape == "bar") {
      save_mesh(generate_bar(gen_lx, gen_ly, gen_lz, gen_rx, gen_ry, gen_rz), gen_out);
    } else {
      BentBarPair pair = generate_bent_bar(gen_bend, gen_lx, gen_ly, gen_lz, gen_rx,
                                           gen_ry, gen_rz);
      save_mesh(pair.straight, gen_out);
      if (!gen_pair_out.empty()) save_mesh(pair.bent, gen_pair_out);
      if (!gen_gt_out.empty()) save_correspondence(pair.ground_truth, gen_gt_out);
      if (!gen_surface_gt_out.empty()) {
        Correspondence surface_gt = restrict_correspondence_to_boundary(
            pair.ground_truth, extract_boundary(pair.straight), extract_boundary(pair.bent));
        save_correspondence(surface_gt, gen_surface_gt_out);
      }
    }
    std::printf("gen %s -> %s\n", gen_shape.c_str(), gen_out.c_str());
  });

  // Shared eigensolver knobs on every subcommand that can trigger a solve.
  for (CLI::App* sub : {basis_cmd, match_cmd, transfer_cmd, extra_cmd, spectrum_cmd, sweep_cmd}) {
    sub->add_option("--tol", eigen_options.tol, "eigensolver residual tolerance")
        ->capture_default_str();
    sub->add_option("--seed", eigen_options.seed, "eigensolver start vector seed")
        ->capture_default_str();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
