// Acceptance suite: one checked criterion per function, each printing a
// single [PASS]/[FAIL] line. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "iselinv/dense.hpp"
#include "iselinv/factorization.hpp"
#include "iselinv/localization.hpp"
#include "iselinv/ordering.hpp"
#include "iselinv/pexsi.hpp"
#include "iselinv/selinv.hpp"
#include "iselinv/sparse.hpp"
#include "iselinv/study.hpp"
#include "iselinv/symbolic.hpp"
#include "test_util.hpp"

using namespace iselinv;

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Check {
  std::ostringstream msg;
  bool ok = true;

  template <typename T>
  void expect(bool cond, const std::string& label, const T& value) {
    if (!cond) {
      ok = false;
      msg << " [" << label << " = " << value << "]";
    }
  }
  Outcome done(const std::string& summary) {
    return {ok, summary + msg.str()};
  }
};

std::shared_ptr<const FillPattern> exact_pattern(const SparseSymmetric& a) {
  return std::make_shared<const FillPattern>(fill_pattern_exact(a));
}

SparseSymmetric mesh_operator(const MeshSpec& mesh, Complex z) {
  auto h = toy_hamiltonian(mesh);
  auto order =
      mesh.dim == 1 ? Permutation::identity(h.size()) : nested_dissection_cartesian(mesh);
  return permute(shift(h, z), order);
}

// 1. L D L^T rebuilds A to 1e-12 relative max-norm on random well-conditioned
//    complex-symmetric matrices.
Outcome criterion_reconstruction() {
  Check chk;
  for (Index n : {50, 200, 400}) {
    auto a = testing::random_well_conditioned(n, 4, 1000 + n);
    auto f = ldlt_exact(a, exact_pattern(a));
    const double err = testing::max_abs_diff(testing::reconstruct_ldlt(f),
                                             DenseMatrix::from_sparse(a));
    chk.expect(err <= 1e-12 * a.max_abs(), "rel_err(n=" + std::to_string(n) + ")",
               err / a.max_abs());
  }
  return chk.done("reconstruction residual <= 1e-12 |A| at n = 50, 200, 400");
}

// 2. Selected inversion matches the dense inverse on the factor pattern to
//    1e-10 relative, and the sweep never reads an absent pair.
Outcome criterion_selinv_correctness() {
  Check chk;
  for (Index n : {50, 200, 400}) {
    auto a = testing::random_well_conditioned(n, 4, 2000 + n);
    auto f = ldlt_exact(a, exact_pattern(a));
    auto b = selinv_exact(f);
    auto report = closedness_audit(f);
    chk.expect(report.absent_pair_reads == 0, "absent_reads(n=" + std::to_string(n) + ")",
               report.absent_pair_reads);
    auto inv = dense_inverse(DenseMatrix::from_sparse(a));
    const double tiny = 1e-14 * inv.max_abs();
    double worst = 0;
    const auto& p = f.pattern();
    for (Index j = 0; j < n; ++j) {
      for (Index s = p.column_begin(j); s < p.column_end(j); ++s) {
        const Index i = p.row_at(s);
        worst = std::max(worst,
                         std::abs(b.at_slot(s) - inv.at(i, j)) / (std::abs(inv.at(i, j)) + tiny));
      }
    }
    chk.expect(worst <= 1e-10, "rel_err(n=" + std::to_string(n) + ")", worst);
  }
  return chk.done("selected inverse matches the dense route on the pattern, sweep closed");
}

// 3. Kept-plus-dropped identity L~ D~ L~^T = A + E to 1e-13 |A| on the 16^2
//    mesh operator for cut-offs 0..6.
Outcome criterion_incompleteness_identity() {
  Check chk;
  auto a = mesh_operator({2, 16, true}, Complex{0.98, 0});
  const DenseMatrix a_dense = DenseMatrix::from_sparse(a);
  for (std::uint32_t c = 0; c <= 6; ++c) {
    auto pat = std::make_shared<const FillPattern>(symbolic_levels(a, c));
    auto inc = ldlt_incomplete(a, pat, TrackDropped::yes);
    DenseMatrix target = a_dense;
    for (const auto& t : inc.dropped->matrix.lower_entries()) {
      target.at(t.row, t.col) += t.value;
      if (t.row != t.col) target.at(t.col, t.row) += t.value;
    }
    const double err = testing::max_abs_diff(testing::reconstruct_ldlt(inc.factors), target);
    chk.expect(err <= 1e-13 * a.max_abs(), "rel_err(c=" + std::to_string(c) + ")",
               err / a.max_abs());
  }
  return chk.done("kept factors rebuild A+E to 1e-13 |A| for c = 0..6");
}

// 4. Every dropped entry sits strictly between the cut-off and 2c+1 in level.
Outcome criterion_dropped_structure() {
  Check chk;
  auto run = [&chk](const SparseSymmetric& a, const std::string& label) {
    for (std::uint32_t c = 1; c <= 6; ++c) {
      auto wide = symbolic_levels(a, 2 * c + 1);
      auto pat = std::make_shared<const FillPattern>(symbolic_levels(a, c));
      auto inc = ldlt_incomplete(a, pat, TrackDropped::yes);
      Index bad = 0;
      for (const auto& t : inc.dropped->matrix.lower_entries()) {
        auto level = wide.level_of(t.row, t.col);
        if (!level || *level <= static_cast<int>(c) || *level > static_cast<int>(2 * c + 1)) ++bad;
      }
      chk.expect(bad == 0, label + " violations(c=" + std::to_string(c) + ")", bad);
    }
  };
  run(mesh_operator({2, 16, true}, Complex{0.98, 0}), "mesh");
  std::mt19937_64 rng(4040);
  for (int rep = 0; rep < 6; ++rep) {
    const Index n = 24 + static_cast<Index>(rng() % 41);
    run(testing::random_well_conditioned(n, 3, rng()), "random(n=" + std::to_string(n) + ")");
  }
  return chk.done("dropped entries satisfy c < level <= 2c+1 on mesh and random graphs");
}

// 5. The level recurrence reproduces the restricted-path reference on 200
//    random graphs across cut-offs 0..8.
Outcome criterion_symbolic_equivalence() {
  Check chk;
  std::mt19937_64 rng(5555);
  Index graphs_checked = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const Index n = 8 + static_cast<Index>(rng() % 57);  // up to 64
    auto a = testing::random_graph(n, 0.04 + 0.12 * (rep % 5), rng());
    // Reference levels for all pairs, computed once per graph.
    std::vector<std::optional<int>> ref(static_cast<std::size_t>(n) * n);
    for (Index j = 0; j < n; ++j) {
      for (Index i = j; i < n; ++i) {
        ref[static_cast<std::size_t>(i) * n + j] =
            (i == j) ? std::optional<int>(0) : fill_path_oracle(a, i, j);
      }
    }
    for (std::uint32_t c = 0; c <= 8; ++c) {
      auto p = symbolic_levels(a, c);
      for (Index j = 0; j < n; ++j) {
        for (Index i = j; i < n; ++i) {
          const auto& want = ref[static_cast<std::size_t>(i) * n + j];
          auto got = p.level_of(i, j);
          const bool should = want && *want <= static_cast<int>(c);
          if (should != got.has_value() || (should && *got != *want)) {
            chk.expect(false,
                       "mismatch(rep=" + std::to_string(rep) + ",c=" + std::to_string(c) + ")",
                       "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
            return chk.done("level recurrence vs restricted-path reference");
          }
        }
      }
    }
    ++graphs_checked;
  }
  chk.expect(graphs_checked == 200, "graphs", graphs_checked);
  return chk.done("level recurrence equals the restricted-path reference on 200 graphs, c = 0..8");
}

// 6. Fitted decay rates of |L| vs level and |A^-1| vs distance on the 48^2
//    mesh at z = 0.98 agree with the two-band rate within 15%.
Outcome criterion_localization_rates() {
  Check chk;
  StudyConfig cfg;
  cfg.kind = StudyKind::localization;
  cfg.mesh = {2, 48, true};
  cfg.z = {0.98, 0};
  cfg.seed = 7;
  auto r = run_localization_study(cfg);
  chk.expect(std::abs(r.factor_fit.rate - r.rate) <= 0.15 * r.rate, "factor_rate",
             r.factor_fit.rate);
  chk.expect(std::abs(r.inverse_fit.rate - r.rate) <= 0.15 * r.rate, "inverse_rate",
             r.inverse_fit.rate);
  std::ostringstream os;
  os << "decay rates within 15% of g = " << r.rate << " (|L|: " << r.factor_fit.rate
     << ", inverse: " << r.inverse_fit.rate << ")";
  return chk.done(os.str());
}

// 7. Truncation error of the assembled inverse decays at twice the rate:
//    fitted slope within 25% of 2g on the 32^2 mesh (z = 0.98) and the 12^3
//    mesh (z = 0).
Outcome criterion_convergence_rate() {
  Check chk;
  {
    StudyConfig cfg;
    cfg.kind = StudyKind::convergence;
    cfg.mesh = {2, 32, true};
    cfg.z = {0.98, 0};
    for (std::uint32_t c = 2; c <= 40; c += 2) cfg.cutoffs.push_back(c);
    auto r = run_convergence_study(cfg);
    chk.expect(std::abs(r.selinv_fit.rate - 2 * r.rate) <= 0.25 * 2 * r.rate, "slope_2d",
               r.selinv_fit.rate);
    chk.expect(r.selinv_fit.bins_used >= 5, "bins_2d", r.selinv_fit.bins_used);
  }
  {
    StudyConfig cfg;
    cfg.kind = StudyKind::convergence;
    cfg.mesh = {3, 12, true};
    cfg.z = {0, 0};
    for (std::uint32_t c = 1; c <= 8; ++c) cfg.cutoffs.push_back(c);
    auto r = run_convergence_study(cfg);
    chk.expect(std::abs(r.selinv_fit.rate - 2 * r.rate) <= 0.25 * 2 * r.rate, "slope_3d",
               r.selinv_fit.rate);
    chk.expect(r.selinv_fit.bins_used >= 5, "bins_3d", r.selinv_fit.bins_used);
  }
  return chk.done("truncation-error slopes within 25% of 2g in 2D and 3D");
}

// 8. Ring stagnation: slope 2g while c <= 45, then a plateau within a factor
//    of 50 of exp(-g (n-2)); the drop set is exactly {(n, c+2)} throughout.
Outcome criterion_ring_stagnation() {
  Check chk;
  const Index n = 100;
  const Complex z{0.98, 0};
  StudyConfig cfg;
  cfg.kind = StudyKind::periodic1d;
  cfg.mesh = {1, n, true};
  cfg.z = z;
  for (std::uint32_t c = 5; c <= 90; c += 5) cfg.cutoffs.push_back(c);
  auto r = run_convergence_study(cfg);

  std::vector<DecaySample> ramp;
  double plateau_max = 0, plateau_min = std::numeric_limits<double>::infinity();
  for (const auto& row : r.rows) {
    chk.expect(row.dropped_support_expected, "drop_support(c=" + std::to_string(row.cutoff) + ")",
               row.dropped_nnz);
    if (row.cutoff <= 45 && row.err_selinv >= 1e-12 && row.err_selinv <= 1e-2) {
      ramp.push_back({static_cast<int>(row.cutoff), row.err_selinv});
    }
    if (row.cutoff >= 55) {
      plateau_max = std::max(plateau_max, row.err_selinv);
      plateau_min = std::min(plateau_min, row.err_selinv);
    }
  }
  auto fit = fit_decay_rate(ramp, 0.0);
  chk.expect(std::abs(fit.rate - 2 * r.rate) <= 0.25 * 2 * r.rate, "ramp_slope", fit.rate);
  const double ref = std::exp(-r.rate * (n - 2));
  chk.expect(plateau_max <= 50 * ref, "plateau_max", plateau_max);
  chk.expect(plateau_min >= ref / 50, "plateau_min", plateau_min);
  std::ostringstream os;
  os << "ring ramp slope " << fit.rate << " (2g = " << 2 * r.rate << "), plateau in ["
     << plateau_min << ", " << plateau_max << "] vs ref " << ref;
  return chk.done(os.str());
}

// 9. Operation-count scaling: linear in n (2D, c = 4), linear in c (2D),
//    cubic in c (3D).
Outcome criterion_scaling() {
  Check chk;
  {
    StudyConfig cfg;
    cfg.kind = StudyKind::nscaling;
    cfg.mesh = {2, 16, true};
    cfg.cutoffs = {4};
    cfg.mesh_sizes = {16, 32, 64, 128};
    auto r = run_scaling_study(cfg);
    chk.expect(r.loglog_slope >= 0.8 && r.loglog_slope <= 1.2, "slope_n_2d", r.loglog_slope);
  }
  {
    StudyConfig cfg;
    cfg.kind = StudyKind::cscaling;
    cfg.mesh = {2, 32, true};
    for (std::uint32_t c = 6; c <= 20; c += 2) cfg.cutoffs.push_back(c);
    auto r = run_scaling_study(cfg);
    chk.expect(r.loglog_slope >= 0.5 && r.loglog_slope <= 1.5, "slope_c_2d", r.loglog_slope);
  }
  {
    StudyConfig cfg;
    cfg.kind = StudyKind::cscaling;
    cfg.mesh = {3, 16, true};
    for (std::uint32_t c = 4; c <= 10; ++c) cfg.cutoffs.push_back(c);
    auto r = run_scaling_study(cfg);
    chk.expect(r.loglog_slope >= 2.5 && r.loglog_slope <= 3.5, "slope_c_3d", r.loglog_slope);
  }
  return chk.done("flop-count slopes: n^1 (2D), c^1 (2D), c^3 (3D) within bands");
}

// 10. Contour assembly at the untruncated pattern equals the dense per-pole
//     sum to 1e-8 relative on the diagonal, and is real to 1e-12.
Outcome criterion_pexsi_oracle() {
  Check chk;
  auto h = toy_hamiltonian({1, 60, true});
  auto poles = circle_contour_poles(8, Complex{-1.2, 0}, 0.5, [](Complex u) {
    return fermi_dirac_complex(u, 5.0, 0.0);
  });
  chk.expect(poles.conjugate_closed(), "conjugate_closed", 0);
  auto r = pexsi_evaluate(h, poles, std::nullopt, Permutation::identity(60));

  std::vector<Complex> dense_diag(60, Complex{0, 0});
  for (const Pole& p : poles.poles()) {
    auto inv = dense_inverse(DenseMatrix::from_sparse(shift(h, p.location)));
    for (Index i = 0; i < 60; ++i) dense_diag[i] += p.weight * inv.at(i, i);
  }
  double rel = 0, imag = 0;
  for (Index i = 0; i < 60; ++i) {
    rel = std::max(rel, std::abs(r.diagonal[i] - dense_diag[i]) / std::abs(dense_diag[i]));
    imag = std::max(imag, std::abs(r.diagonal[i].imag()));
  }
  chk.expect(rel <= 1e-8, "diag_rel_err", rel);
  chk.expect(imag <= 1e-12, "max_imag", imag);
  std::ostringstream os;
  os << "assembled diagonal matches the dense per-pole sum (rel " << rel << ", imag " << imag
     << ")";
  return chk.done(os.str());
}

// 11. Decay-rate suite: closed forms to 1e-12, path independence to 1e-8,
//     merged-gap limit to 1e-3.
Outcome criterion_green_suite() {
  Check chk;
  const double e1 = std::abs(green_single_interval(-1, 1, Complex{1.25, 0}) - std::log(2.0));
  chk.expect(e1 <= 1e-12, "log2_err", e1);
  const double e2 =
      std::abs(green_single_interval(-1, 1, Complex{0, 2}) - std::log(2.0 + std::sqrt(5.0)));
  chk.expect(e2 <= 1e-12, "log(2+sqrt5)_err", e2);

  double path_dev = 0;
  for (Complex z : {Complex{0.98, 0}, Complex{0, 2}, Complex{2.5, 0.4}}) {
    TwoIntervalOptions low, high;
    low.path_height = 0.35;
    high.path_height = 1.7;
    const double g1 = green_two_intervals(-kSqrt2, -1, 1, kSqrt2, z, low);
    const double g2 = green_two_intervals(-kSqrt2, -1, 1, kSqrt2, z, high);
    path_dev = std::max(path_dev, std::abs(g1 - g2));
  }
  chk.expect(path_dev <= 1e-8, "path_dev", path_dev);

  const double eps = 1e-3;
  const double merged = green_two_intervals(-1, -eps, eps, 1, Complex{0, 2});
  const double single = green_single_interval(-1, 1, Complex{0, 2});
  chk.expect(std::abs(merged - single) <= 1e-3, "gap_limit_err", std::abs(merged - single));

  std::ostringstream os;
  os << "closed forms, path independence (" << path_dev << "), gap limit ("
     << std::abs(merged - single) << ")";
  return chk.done(os.str());
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0) only = std::atoi(argv[i + 1]);
  }

  const std::vector<Criterion> criteria = {
      {1, "reconstruction identity", criterion_reconstruction},
      {2, "selected-inversion correctness", criterion_selinv_correctness},
      {3, "incompleteness identity", criterion_incompleteness_identity},
      {4, "dropped-entry structure", criterion_dropped_structure},
      {5, "symbolic reference equivalence", criterion_symbolic_equivalence},
      {6, "localization rates", criterion_localization_rates},
      {7, "convergence rate", criterion_convergence_rate},
      {8, "ring stagnation", criterion_ring_stagnation},
      {9, "operation-count scaling", criterion_scaling},
      {10, "contour assembly reference", criterion_pexsi_oracle},
      {11, "decay-rate suite", criterion_green_suite},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << " (" << c.name
              << "): " << out.detail << "  [" << secs << " s]\n";
    if (!out.pass) ++failures;
  }
  return failures;
}
