#pragma once

#include <optional>
#include <string>
#include <vector>

#include "iselinv/localization.hpp"
#include "iselinv/pexsi.hpp"
#include "iselinv/sparse.hpp"
#include "iselinv/types.hpp"

namespace iselinv {

/// Spectral envelope of the mesh test Hamiltonian: two symmetric bands
/// [-sqrt(2), -1] and [1, sqrt(2)] for every dimension.
SpectralSet toy_spectrum_envelope();

enum class StudyKind { localization, convergence, nscaling, cscaling, periodic1d, pexsi };

struct ContourSpec {
  int q = 8;
  Complex center{-1.2, 0.0};
  double radius = 0.5;
  double beta = 5.0;
  double e_fermi = 0.0;
};

struct StudyConfig {
  StudyKind kind = StudyKind::localization;
  MeshSpec mesh{2, 16, true};
  Complex z{0.98, 0.0};
  std::vector<std::uint32_t> cutoffs;      // positive, ascending
  std::vector<Index> mesh_sizes;           // size ladder for nscaling
  int repetitions = 3;                     // timing studies take the minimum
  std::string output_path;                 // empty = no CSV
  std::uint64_t seed = 0;

  ContourSpec contour;  // pexsi study only

  void validate() const;
};

struct LocalizationRow {
  std::string distance_kind;  // "level" or "graph"
  int distance = 0;
  double max_abs = 0;
  double predicted = 0;
};

struct LocalizationStudyResult {
  std::vector<LocalizationRow> rows;
  double rate = 0;  // spectral-set decay rate at z
  DecayFit factor_fit;
  DecayFit inverse_fit;
};

/// Per-bin maxima of |L| against level and of |inverse| against graph
/// distance, with the exp(-g k) prediction. Beyond the dense cap the inverse
/// side samples a fixed random subset of 64 columns via factored solves.
LocalizationStudyResult run_localization_study(const StudyConfig& cfg);

struct ConvergenceRow {
  std::uint32_t cutoff = 0;
  double err_factorization = 0;  // |A^-1 - (A+E)^-1| on nz(A)
  double err_selinv = 0;         // |A^-1 - B| on nz(A)
  double reference = 0;          // exp(-2 g c)
  Index dropped_nnz = 0;
  bool dropped_support_expected = true;  // 1D natural order: E = {(n, c+2)}
};

struct ConvergenceStudyResult {
  std::vector<ConvergenceRow> rows;
  double rate = 0;
  DecayFit selinv_fit;         // over rows with err in the fit window
  double fit_window_lo = 1e-12;
  double fit_window_hi = 1e-2;
};

/// Truncation error against the dense inverse across the cut-off list.
/// Requires n within the dense cap; 1D meshes use the natural order and the
/// dropped-entry support check, higher dimensions the mesh dissection order.
ConvergenceStudyResult run_convergence_study(const StudyConfig& cfg);

struct ScalingRow {
  Index n = 0;
  std::uint32_t cutoff = 0;
  double wall_seconds = 0;       // minimum over repetitions
  std::uint64_t flop_count = 0;  // multiply-adds in factorization + inversion
};

struct ScalingStudyResult {
  std::vector<ScalingRow> rows;
  double loglog_slope = 0;  // flops vs n (nscaling) or vs c (cscaling)
};

/// Operation counts (and secondary wall times) of truncated factorization
/// plus selected inversion across a mesh-size or cut-off ladder.
ScalingStudyResult run_scaling_study(const StudyConfig& cfg);

struct PexsiStudyRow {
  std::uint32_t cutoff = 0;
  double diag_err_vs_exact = 0;
  double diag_err_vs_dense = 0;  // NaN when beyond the dense cap
};

struct PexsiStudyResult {
  std::vector<PexsiStudyRow> rows;
  double min_rate = 0;  // min over poles of the decay rate at z_k
};

/// Assembled-diagonal error of the contour evaluation across cut-offs,
/// against the exact-pattern run and the dense per-pole sum.
PexsiStudyResult run_pexsi_study(const StudyConfig& cfg);

}  // namespace iselinv
