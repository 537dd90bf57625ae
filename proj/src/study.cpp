#include "iselinv/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "iselinv/dense.hpp"
#include "iselinv/factorization.hpp"
#include "iselinv/ordering.hpp"
#include "iselinv/selinv.hpp"
#include "iselinv/symbolic.hpp"

namespace iselinv {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

std::string kind_name(StudyKind k) {
  switch (k) {
    case StudyKind::localization: return "localization";
    case StudyKind::convergence: return "convergence";
    case StudyKind::nscaling: return "nscaling";
    case StudyKind::cscaling: return "cscaling";
    case StudyKind::periodic1d: return "periodic1d";
    case StudyKind::pexsi: return "pexsi";
  }
  return "?";
}

std::string config_echo(const StudyConfig& cfg) {
  std::ostringstream os;
  os << "# study=" << kind_name(cfg.kind) << " dim=" << cfg.mesh.dim << " m=" << cfg.mesh.m
     << " z=" << cfg.z.real() << "+" << cfg.z.imag() << "i cutoffs=";
  for (std::size_t i = 0; i < cfg.cutoffs.size(); ++i) {
    os << (i ? ";" : "") << cfg.cutoffs[i];
  }
  os << " mesh_sizes=";
  for (std::size_t i = 0; i < cfg.mesh_sizes.size(); ++i) {
    os << (i ? ";" : "") << cfg.mesh_sizes[i];
  }
  os << " reps=" << cfg.repetitions << " seed=" << cfg.seed;
  return os.str();
}

std::ofstream open_csv(const StudyConfig& cfg) {
  std::ofstream out(cfg.output_path);
  if (!out) throw IoError("cannot open " + cfg.output_path + " for writing");
  out.precision(17);
  out << config_echo(cfg) << "\n";
  return out;
}

Permutation mesh_order(const MeshSpec& mesh) {
  return mesh.dim == 1 ? Permutation::identity(mesh.vertex_count())
                       : nested_dissection_cartesian(mesh);
}

double max_err_vs_selected(const SparseSymmetric& a, const DenseMatrix& x,
                           const SelectedInverse& b) {
  double e = 0;
  for (const auto& entry : a.lower_entries()) {
    e = std::max(e, std::abs(x.at(entry.row, entry.col) - b.entry(entry.row, entry.col)));
  }
  return e;
}

double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  double xb = 0, yb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    xb += std::log(xs[i]);
    yb += std::log(ys[i]);
  }
  xb /= n;
  yb /= n;
  double num = 0, den = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (std::log(xs[i]) - xb) * (std::log(ys[i]) - yb);
    den += (std::log(xs[i]) - xb) * (std::log(xs[i]) - xb);
  }
  return num / den;
}

}  // namespace

SpectralSet toy_spectrum_envelope() {
  return SpectralSet({{-kSqrt2, -1.0}, {1.0, kSqrt2}});
}

void StudyConfig::validate() const {
  mesh.validate();
  for (std::size_t i = 0; i < cutoffs.size(); ++i) {
    if (cutoffs[i] == 0 && kind != StudyKind::convergence && kind != StudyKind::periodic1d) {
      throw std::invalid_argument("cut-offs must be positive");
    }
    if (i > 0 && cutoffs[i] <= cutoffs[i - 1]) {
      throw std::invalid_argument("cut-offs must be ascending");
    }
  }
  const bool timing = kind == StudyKind::nscaling || kind == StudyKind::cscaling;
  if (timing && repetitions < 3) {
    throw std::invalid_argument("timing studies need at least 3 repetitions");
  }
}

LocalizationStudyResult run_localization_study(const StudyConfig& cfg) {
  cfg.validate();
  const SpectralSet env = toy_spectrum_envelope();
  if (env.distance_to(cfg.z) == 0) throw std::invalid_argument("shift lies on the spectral set");
  const double rate = env.green(cfg.z);

  const SparseSymmetric h = toy_hamiltonian(cfg.mesh);
  const Permutation order = mesh_order(cfg.mesh);
  const SparseSymmetric a = shift(h, cfg.z);
  const SparseSymmetric ap = permute(a, order);

  auto pattern = std::make_shared<const FillPattern>(fill_pattern_exact(ap));
  LdltFactors factors = ldlt_exact(ap, pattern);

  LocalizationStudyResult result;
  result.rate = rate;

  // |L| against level-of-fill in the elimination order.
  auto fsamples = factor_decay_samples(factors);
  result.factor_fit = fit_decay_rate(fsamples);
  {
    std::vector<double> bin_max;
    for (const auto& s : fsamples) {
      if (s.distance >= static_cast<int>(bin_max.size())) bin_max.resize(s.distance + 1, 0.0);
      bin_max[s.distance] = std::max(bin_max[s.distance], s.magnitude);
    }
    for (std::size_t k = 0; k < bin_max.size(); ++k) {
      if (bin_max[k] > 0) {
        result.rows.push_back({"level", static_cast<int>(k), bin_max[k],
                               std::exp(-rate * static_cast<double>(k))});
      }
    }
  }

  // |A^-1| against graph distance: dense inverse when the cap allows,
  // otherwise factored solves on a fixed random subset of 64 columns.
  const Index n = h.size();
  auto graph = AdjacencyGraph::build(h);
  std::vector<DecaySample> isamples;
  if (n <= kDenseOracleCap) {
    DenseMatrix inv = dense_inverse(DenseMatrix::from_sparse(a));
    for (Index j = 0; j < n; ++j) {
      auto dist = graph_distances_from(graph, j);
      for (Index i = j; i < n; ++i) {
        if (dist[i] >= 0) isamples.push_back({dist[i], std::abs(inv.at(i, j))});
      }
    }
  } else {
    std::vector<Index> cols(n);
    std::iota(cols.begin(), cols.end(), Index{0});
    std::mt19937_64 rng(cfg.seed);
    std::shuffle(cols.begin(), cols.end(), rng);
    cols.resize(std::min<Index>(n, 64));
    for (Index j : cols) {
      std::vector<Complex> e(n, Complex{0, 0});
      e[order(j)] = Complex{1, 0};
      auto x = solve_with_factors(factors, e);
      auto dist = graph_distances_from(graph, j);
      for (Index i = 0; i < n; ++i) {
        if (dist[i] >= 0) isamples.push_back({dist[i], std::abs(x[order(i)])});
      }
    }
  }
  result.inverse_fit = fit_decay_rate(isamples);
  {
    std::vector<double> bin_max;
    for (const auto& s : isamples) {
      if (s.distance >= static_cast<int>(bin_max.size())) bin_max.resize(s.distance + 1, 0.0);
      bin_max[s.distance] = std::max(bin_max[s.distance], s.magnitude);
    }
    for (std::size_t k = 0; k < bin_max.size(); ++k) {
      if (bin_max[k] > 0) {
        result.rows.push_back({"graph", static_cast<int>(k), bin_max[k],
                               std::exp(-rate * static_cast<double>(k))});
      }
    }
  }

  if (!cfg.output_path.empty()) {
    auto out = open_csv(cfg);
    out << "distance_kind,distance,max_abs,predicted\n";
    for (const auto& r : result.rows) {
      out << r.distance_kind << "," << r.distance << "," << r.max_abs << "," << r.predicted
          << "\n";
    }
  }
  return result;
}

ConvergenceStudyResult run_convergence_study(const StudyConfig& cfg) {
  cfg.validate();
  if (cfg.cutoffs.empty()) throw std::invalid_argument("convergence study needs a cut-off list");
  const SpectralSet env = toy_spectrum_envelope();
  const double rate = env.green(cfg.z);

  const SparseSymmetric h = toy_hamiltonian(cfg.mesh);
  const Index n = h.size();
  if (n > kDenseOracleCap) {
    throw std::invalid_argument("convergence studies need the dense reference; n = " +
                                std::to_string(n) + " exceeds the cap");
  }
  const Permutation order = mesh_order(cfg.mesh);
  const SparseSymmetric ap = permute(shift(h, cfg.z), order);
  const DenseMatrix a_dense = DenseMatrix::from_sparse(ap);
  const DenseMatrix a_inv = dense_inverse(a_dense);

  ConvergenceStudyResult result;
  result.rate = rate;

  for (std::uint32_t c : cfg.cutoffs) {
    auto pattern = std::make_shared<const FillPattern>(symbolic_levels(ap, c));
    IncompleteLdlt fact = ldlt_incomplete(ap, pattern, TrackDropped::yes);
    IncompleteSelinv inv = selinv_incomplete(fact.factors, TrackDropped::no);

    // Columns of (A+E)^{-1} via factored solves: the kept factors reproduce
    // A+E exactly, and per-column solves are far cheaper than a second dense
    // inversion at every cut-off.
    double err_fact = 0;
    {
      std::vector<Complex> e(n, Complex{0, 0});
      for (Index j = 0; j < n; ++j) {
        e[j] = Complex{1, 0};
        auto x = solve_with_factors(fact.factors, e);
        e[j] = Complex{0, 0};
        for (Index i : ap.column_rows(j)) {
          err_fact = std::max(err_fact, std::abs(a_inv.at(i, j) - x[i]));
        }
      }
    }

    ConvergenceRow row;
    row.cutoff = c;
    row.err_factorization = err_fact;
    row.err_selinv = max_err_vs_selected(ap, a_inv, inv.inverse);
    row.reference = std::exp(-2.0 * rate * static_cast<double>(c));
    row.dropped_nnz = fact.dropped->matrix.nnz_lower();
    if (cfg.mesh.dim == 1) {
      // Natural order on the ring drops exactly one entry, at (n, c+2),
      // until the cut-off covers the whole chain.
      const auto entries = fact.dropped->matrix.lower_entries();
      if (c + 2 <= static_cast<std::uint32_t>(n) - 2) {
        row.dropped_support_expected =
            entries.size() == 1 && entries[0].row == n - 1 &&
            entries[0].col == static_cast<Index>(c) + 1;
      } else {
        row.dropped_support_expected = entries.empty();
      }
    }
    result.rows.push_back(row);
  }

  std::vector<DecaySample> fit_samples;
  for (const auto& r : result.rows) {
    if (r.err_selinv >= result.fit_window_lo && r.err_selinv <= result.fit_window_hi) {
      fit_samples.push_back({static_cast<int>(r.cutoff), r.err_selinv});
    }
  }
  if (fit_samples.size() >= 5) result.selinv_fit = fit_decay_rate(fit_samples, 0.0);

  if (!cfg.output_path.empty()) {
    auto out = open_csv(cfg);
    out << "c,err_factorization,err_selinv,bound\n";
    for (const auto& r : result.rows) {
      out << r.cutoff << "," << r.err_factorization << "," << r.err_selinv << "," << r.reference
          << "\n";
    }
  }
  return result;
}

ScalingStudyResult run_scaling_study(const StudyConfig& cfg) {
  cfg.validate();
  ScalingStudyResult result;

  auto run_case = [&](const MeshSpec& mesh, std::uint32_t c) {
    const SparseSymmetric h = toy_hamiltonian(mesh);
    const Permutation order = mesh_order(mesh);
    const SparseSymmetric ap = permute(shift(h, cfg.z), order);
    auto pattern = std::make_shared<const FillPattern>(symbolic_levels(ap, c));

    double best = std::numeric_limits<double>::infinity();
    std::uint64_t flops = 0;
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      IncompleteLdlt fact = ldlt_incomplete(ap, pattern, TrackDropped::no);
      IncompleteSelinv inv = selinv_incomplete(fact.factors, TrackDropped::no);
      const auto t1 = std::chrono::steady_clock::now();
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
      flops = fact.factors.stats().fma_count + inv.inverse.stats().fma_count;
    }
    result.rows.push_back({h.size(), c, best, flops});
  };

  if (cfg.kind == StudyKind::nscaling) {
    if (cfg.mesh_sizes.empty() || cfg.cutoffs.size() != 1) {
      throw std::invalid_argument("size-scaling study needs a mesh ladder and one cut-off");
    }
    for (Index m : cfg.mesh_sizes) {
      MeshSpec mesh = cfg.mesh;
      mesh.m = m;
      run_case(mesh, cfg.cutoffs[0]);
    }
    std::vector<double> xs, ys;
    for (const auto& r : result.rows) {
      xs.push_back(static_cast<double>(r.n));
      ys.push_back(static_cast<double>(r.flop_count));
    }
    result.loglog_slope = loglog_slope(xs, ys);
  } else if (cfg.kind == StudyKind::cscaling) {
    if (cfg.cutoffs.size() < 2) {
      throw std::invalid_argument("cut-off scaling study needs a cut-off ladder");
    }
    for (std::uint32_t c : cfg.cutoffs) run_case(cfg.mesh, c);
    std::vector<double> xs, ys;
    for (const auto& r : result.rows) {
      xs.push_back(static_cast<double>(r.cutoff));
      ys.push_back(static_cast<double>(r.flop_count));
    }
    result.loglog_slope = loglog_slope(xs, ys);
  } else {
    throw std::invalid_argument("scaling study kind must be nscaling or cscaling");
  }

  if (!cfg.output_path.empty()) {
    auto out = open_csv(cfg);
    out << (cfg.kind == StudyKind::nscaling ? "n" : "c") << ",wall_seconds,flop_count\n";
    for (const auto& r : result.rows) {
      out << (cfg.kind == StudyKind::nscaling ? r.n : static_cast<Index>(r.cutoff)) << ","
          << r.wall_seconds << "," << r.flop_count << "\n";
    }
  }
  return result;
}

PexsiStudyResult run_pexsi_study(const StudyConfig& cfg) {
  cfg.validate();
  if (cfg.cutoffs.empty()) throw std::invalid_argument("pexsi study needs a cut-off list");
  const SparseSymmetric h = toy_hamiltonian(cfg.mesh);
  const Index n = h.size();
  const Permutation order = mesh_order(cfg.mesh);

  const ContourSpec& cs = cfg.contour;
  PoleExpansion poles = circle_contour_poles(cs.q, cs.center, cs.radius, [&](Complex u) {
    return fermi_dirac_complex(u, cs.beta, cs.e_fermi);
  });

  PexsiStudyResult result;
  const SpectralSet env = toy_spectrum_envelope();
  result.min_rate = std::numeric_limits<double>::infinity();
  for (const Pole& p : poles.poles()) {
    result.min_rate = std::min(result.min_rate, env.green(p.location));
  }

  PexsiResult exact = pexsi_evaluate(h, poles, std::nullopt, order);
  std::vector<Complex> dense_diag;
  if (n <= kDenseOracleCap) {
    dense_diag.assign(n, Complex{0, 0});
    for (const Pole& p : poles.poles()) {
      DenseMatrix inv = dense_inverse(DenseMatrix::from_sparse(shift(h, p.location)));
      for (Index i = 0; i < n; ++i) dense_diag[i] += p.weight * inv.at(i, i);
    }
  }

  for (std::uint32_t c : cfg.cutoffs) {
    PexsiResult run = pexsi_evaluate(h, poles, c, order);
    PexsiStudyRow row;
    row.cutoff = c;
    for (Index i = 0; i < n; ++i) {
      row.diag_err_vs_exact =
          std::max(row.diag_err_vs_exact, std::abs(run.diagonal[i] - exact.diagonal[i]));
    }
    if (!dense_diag.empty()) {
      for (Index i = 0; i < n; ++i) {
        row.diag_err_vs_dense =
            std::max(row.diag_err_vs_dense, std::abs(run.diagonal[i] - dense_diag[i]));
      }
    } else {
      row.diag_err_vs_dense = std::numeric_limits<double>::quiet_NaN();
    }
    result.rows.push_back(row);
  }

  if (!cfg.output_path.empty()) {
    auto out = open_csv(cfg);
    out << "c,diag_err_vs_exact,diag_err_vs_dense\n";
    for (const auto& r : result.rows) {
      out << r.cutoff << "," << r.diag_err_vs_exact << "," << r.diag_err_vs_dense << "\n";
    }
  }
  return result;
}

}  // namespace iselinv
