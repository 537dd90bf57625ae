#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "iselinv/dense.hpp"
#include "iselinv/factorization.hpp"
#include "iselinv/io.hpp"
#include "iselinv/localization.hpp"
#include "iselinv/ordering.hpp"
#include "iselinv/pexsi.hpp"
#include "iselinv/selinv.hpp"
#include "iselinv/sparse.hpp"
#include "iselinv/study.hpp"
#include "iselinv/symbolic.hpp"
#include "iselinv/types.hpp"

namespace {

using namespace iselinv;

Complex parse_complex(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) return Complex{std::stod(s), 0.0};
  return Complex{std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
}

std::vector<std::uint32_t> parse_cutoffs(const std::string& s) {
  std::vector<std::uint32_t> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(static_cast<std::uint32_t>(std::stoul(s.substr(pos, next - pos))));
    pos = next + 1;
  }
  return out;
}

std::vector<Index> parse_sizes(const std::string& s) {
  std::vector<Index> out;
  for (auto c : parse_cutoffs(s)) out.push_back(static_cast<Index>(c));
  return out;
}

// cutoff spec: "exact" or a nonnegative integer
std::optional<std::uint32_t> parse_cutoff(const std::string& s) {
  if (s == "exact") return std::nullopt;
  return static_cast<std::uint32_t>(std::stoul(s));
}

Permutation load_order(const std::string& method, const std::string& perm_file,
                       const SparseSymmetric& a, int dim, Index m, bool periodic) {
  if (!perm_file.empty()) return read_permutation(perm_file);
  if (method == "natural") return Permutation::identity(a.size());
  if (method == "nd") {
    if (dim > 1) return nested_dissection_cartesian(MeshSpec{dim, m, periodic});
    return nested_dissection_general(a);
  }
  throw std::invalid_argument("unknown ordering method '" + method + "'");
}

PoleExpansion read_poles_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::string line;
  if (!std::getline(in, line) || line.rfind("re_w,im_w,re_z,im_z", 0) != 0) {
    throw IoError(path + ": expected header re_w,im_w,re_z,im_z");
  }
  std::vector<Pole> poles;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double rw, iw, rz, iz;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &rw, &iw, &rz, &iz) != 4) {
      throw IoError(path + ": bad pole line '" + line + "'");
    }
    poles.push_back({Complex{rw, iw}, Complex{rz, iz}});
  }
  return PoleExpansion(std::move(poles));
}

void write_poles_csv(const PoleExpansion& poles, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.precision(17);
  out << "re_w,im_w,re_z,im_z\n";
  for (const Pole& p : poles.poles()) {
    out << p.weight.real() << "," << p.weight.imag() << "," << p.location.real() << ","
        << p.location.imag() << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse LDL^T factorization, selected inversion and pole-expansion experiments"};
  app.require_subcommand(1);

  // gen-matrix
  auto* gen = app.add_subcommand("gen-matrix", "generate the periodic mesh test matrix");
  int g_dim = 1;
  Index g_m = 100;
  std::string g_out = "matrix.mtx", g_z;
  gen->add_option("--dim", g_dim, "mesh dimension (1-3)");
  gen->add_option("--m", g_m, "vertices per axis (even)");
  gen->add_option("--z", g_z, "optional shift RE[,IM]: writes H - zI");
  gen->add_option("--out", g_out, "output Matrix Market file");

  // order
  auto* ord = app.add_subcommand("order", "compute a fill-reducing or natural order");
  std::string o_in, o_out = "perm.txt", o_method = "nd";
  int o_dim = 0;
  Index o_m = 0;
  ord->add_option("--in", o_in, "input matrix (general graphs)");
  ord->add_option("--method", o_method, "nd|natural");
  ord->add_option("--dim", o_dim, "mesh dimension for the geometric dissector");
  ord->add_option("--m", o_m, "mesh side for the geometric dissector");
  ord->add_option("--out", o_out, "output permutation file");

  // symbolic
  auto* sym = app.add_subcommand("symbolic", "level-of-fill pattern dump");
  std::string s_in, s_perm, s_cutoff = "exact", s_out = "pattern.csv";
  sym->add_option("--in", s_in, "input matrix")->required();
  sym->add_option("--perm", s_perm, "permutation file applied first");
  sym->add_option("--cutoff", s_cutoff, "level cut-off or 'exact'");
  sym->add_option("--out", s_out, "output CSV (i,j,level)");

  // factorize
  auto* fac = app.add_subcommand("factorize", "LDL^T factorization");
  std::string f_in, f_perm, f_cutoff = "exact", f_z, f_tol;
  std::string f_out_l = "L.mtx", f_out_d = "D.mtx", f_out_e;
  fac->add_option("--in", f_in, "input matrix")->required();
  fac->add_option("--perm", f_perm, "permutation file applied first");
  fac->add_option("--cutoff", f_cutoff, "level cut-off or 'exact'");
  fac->add_option("--tol", f_tol, "drop tolerance (value-based truncation)");
  fac->add_option("--z", f_z, "shift RE[,IM]: factorize A - zI");
  fac->add_option("--out-l", f_out_l, "output factor L");
  fac->add_option("--out-d", f_out_d, "output diagonal D");
  fac->add_option("--track-dropped", f_out_e, "write dropped entries E to this file");

  // selinv
  auto* sel = app.add_subcommand("selinv", "factorize and invert selectively");
  std::string v_in, v_perm, v_cutoff = "exact", v_z, v_out = "B.mtx", v_out_f;
  bool v_audit = false;
  sel->add_option("--in", v_in, "input matrix")->required();
  sel->add_option("--perm", v_perm, "permutation file applied first");
  sel->add_option("--cutoff", v_cutoff, "level cut-off or 'exact'");
  sel->add_option("--z", v_z, "shift RE[,IM]");
  sel->add_option("--out", v_out, "output selected inverse");
  sel->add_option("--track-dropped", v_out_f, "write dropped entries F to this file");
  sel->add_flag("--audit", v_audit, "report pattern-closure violations");

  // green
  auto* grn = app.add_subcommand("green", "decay rate of an interval set");
  std::string gr_intervals, gr_z;
  grn->add_option("--intervals", gr_intervals, "a,b or a,b,c,d")->required();
  grn->add_option("--z", gr_z, "evaluation point RE[,IM]")->required();

  // pexsi
  auto* px = app.add_subcommand("pexsi", "pole-expansion evaluation");
  std::string p_in, p_poles, p_poles_energy, p_cutoff = "exact", p_order = "nd";
  std::string p_out = "report.json", p_out_matrix, p_quantities = "rho,n";
  int p_dim = 0;
  Index p_m = 0;
  px->add_option("--in", p_in, "input matrix")->required();
  px->add_option("--poles", p_poles, "pole CSV for the density set")->required();
  px->add_option("--poles-energy", p_poles_energy, "pole CSV for the energy trace");
  px->add_option("--cutoff", p_cutoff, "level cut-off or 'exact'");
  px->add_option("--order", p_order, "nd|natural");
  px->add_option("--dim", p_dim, "mesh dimension for the geometric dissector");
  px->add_option("--m", p_m, "mesh side for the geometric dissector");
  px->add_option("--quantities", p_quantities, "comma list of rho,n,etot");
  px->add_option("--out", p_out, "JSON report");
  px->add_option("--out-matrix", p_out_matrix, "assembled entries as Matrix Market");

  // gen-poles (plumbing for the contour discretization)
  auto* gp = app.add_subcommand("gen-poles", "naive circle-contour pole file");
  int gp_q = 8;
  std::string gp_center = "-1.2", gp_out = "poles.csv";
  double gp_radius = 0.5, gp_beta = 5.0, gp_ef = 0.0;
  bool gp_energy = false;
  gp->add_option("--q", gp_q, "number of poles (>= 4)");
  gp->add_option("--center", gp_center, "circle center RE[,IM]");
  gp->add_option("--radius", gp_radius, "circle radius");
  gp->add_option("--beta", gp_beta, "inverse temperature");
  gp->add_option("--ef", gp_ef, "Fermi energy");
  gp->add_flag("--energy-weighted", gp_energy, "weights for the energy trace (x f(x))");
  gp->add_option("--out", gp_out, "output pole CSV");

  // study
  auto* st = app.add_subcommand("study", "experiment harness");
  std::string st_kind, st_z = "0.98", st_cutoffs, st_sizes, st_out;
  int st_dim = 2, st_reps = 3, st_q = 8;
  Index st_m = 16;
  std::uint64_t st_seed = 0;
  std::string st_center = "-1.2";
  double st_radius = 0.5, st_beta = 5.0, st_ef = 0.0;
  st->add_option("kind", st_kind, "localization|convergence|nscaling|cscaling|periodic1d|pexsi")
      ->required();
  st->add_option("--dim", st_dim, "mesh dimension");
  st->add_option("--m", st_m, "mesh side");
  st->add_option("--z", st_z, "shift RE[,IM]");
  st->add_option("--cutoffs", st_cutoffs, "comma list of cut-offs");
  st->add_option("--mesh-sizes", st_sizes, "comma list of mesh sides (nscaling)");
  st->add_option("--reps", st_reps, "timing repetitions");
  st->add_option("--seed", st_seed, "sampling seed");
  st->add_option("--out", st_out, "output CSV");
  st->add_option("--q", st_q, "pole count (pexsi study)");
  st->add_option("--center", st_center, "contour center (pexsi study)");
  st->add_option("--radius", st_radius, "contour radius (pexsi study)");
  st->add_option("--beta", st_beta, "inverse temperature (pexsi study)");
  st->add_option("--ef", st_ef, "Fermi energy (pexsi study)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      SparseSymmetric h = toy_hamiltonian(MeshSpec{g_dim, g_m, true});
      if (!g_z.empty()) h = shift(h, parse_complex(g_z));
      write_matrix_market(h, g_out);
      std::cout << "wrote " << g_out << " (n = " << h.size() << ", nnz = " << h.nnz_lower()
                << ")\n";
    } else if (*ord) {
      Permutation p = [&] {
        if (o_method == "nd" && o_dim > 1) {
          return nested_dissection_cartesian(MeshSpec{o_dim, o_m, true});
        }
        if (o_in.empty()) throw std::invalid_argument("--in or --dim/--m required");
        SparseSymmetric a = read_matrix_market(o_in);
        if (o_method == "natural") return Permutation::identity(a.size());
        return nested_dissection_general(a);
      }();
      write_permutation(p, o_out);
      std::cout << "wrote " << o_out << " (n = " << p.size() << ")\n";
    } else if (*sym) {
      SparseSymmetric a = read_matrix_market(s_in);
      if (!s_perm.empty()) a = permute(a, read_permutation(s_perm));
      auto cutoff = parse_cutoff(s_cutoff);
      FillPattern p = cutoff ? symbolic_levels(a, *cutoff) : fill_pattern_exact(a);
      write_pattern_csv(p, s_out);
      std::cout << "wrote " << s_out << " (" << p.nnz() << " entries)\n";
    } else if (*fac) {
      SparseSymmetric a = read_matrix_market(f_in);
      if (!f_perm.empty()) a = permute(a, read_permutation(f_perm));
      if (!f_z.empty()) a = shift(a, parse_complex(f_z));
      const bool track = !f_out_e.empty();
      IncompleteLdlt result = [&] {
        if (!f_tol.empty()) {
          return ldlt_incomplete_tol(a, std::stod(f_tol),
                                     track ? TrackDropped::yes : TrackDropped::no);
        }
        auto cutoff = parse_cutoff(f_cutoff);
        auto pattern = std::make_shared<const FillPattern>(
            cutoff ? symbolic_levels(a, *cutoff) : fill_pattern_exact(a));
        return ldlt_incomplete(a, pattern, track ? TrackDropped::yes : TrackDropped::no);
      }();
      write_factors(result.factors, f_out_l, f_out_d);
      if (track) write_matrix_market(result.dropped->matrix, f_out_e);
      std::cout << "wrote " << f_out_l << ", " << f_out_d;
      if (track) std::cout << ", " << f_out_e;
      std::cout << " (fma = " << result.factors.stats().fma_count << ")\n";
    } else if (*sel) {
      SparseSymmetric a = read_matrix_market(v_in);
      if (!v_perm.empty()) a = permute(a, read_permutation(v_perm));
      if (!v_z.empty()) a = shift(a, parse_complex(v_z));
      auto cutoff = parse_cutoff(v_cutoff);
      auto pattern = std::make_shared<const FillPattern>(
          cutoff ? symbolic_levels(a, *cutoff) : fill_pattern_exact(a));
      const bool track = !v_out_f.empty();
      IncompleteLdlt fact = ldlt_incomplete(a, pattern, TrackDropped::no);
      if (v_audit) {
        ClosednessReport report = closedness_audit(fact.factors);
        std::cout << "closedness: " << report.absent_pair_reads << " absent of "
                  << report.required_pair_reads << " required pair reads\n";
      }
      IncompleteSelinv inv =
          selinv_incomplete(fact.factors, track ? TrackDropped::yes : TrackDropped::no);
      write_selected_inverse(inv.inverse, v_out);
      if (track) write_matrix_market(inv.dropped->matrix, v_out_f);
      std::cout << "wrote " << v_out;
      if (track) std::cout << ", " << v_out_f;
      std::cout << " (fma = " << inv.inverse.stats().fma_count << ")\n";
    } else if (*grn) {
      std::vector<double> ab;
      std::size_t pos = 0;
      while (pos < gr_intervals.size()) {
        auto next = gr_intervals.find(',', pos);
        if (next == std::string::npos) next = gr_intervals.size();
        ab.push_back(std::stod(gr_intervals.substr(pos, next - pos)));
        pos = next + 1;
      }
      const Complex z = parse_complex(gr_z);
      double g = 0;
      if (ab.size() == 2) {
        g = green_single_interval(ab[0], ab[1], z);
      } else if (ab.size() == 4) {
        g = green_two_intervals(ab[0], ab[1], ab[2], ab[3], z);
      } else {
        throw std::invalid_argument("--intervals expects a,b or a,b,c,d");
      }
      std::cout.precision(12);
      std::cout << "g = " << g << "\n";
    } else if (*gp) {
      const Complex center = parse_complex(gp_center);
      auto f = [&](Complex u) -> Complex {
        Complex occ = fermi_dirac_complex(u, gp_beta, gp_ef);
        return gp_energy ? u * occ : occ;
      };
      write_poles_csv(circle_contour_poles(gp_q, center, gp_radius, f), gp_out);
      std::cout << "wrote " << gp_out << "\n";
    } else if (*px) {
      SparseSymmetric h = read_matrix_market(p_in);
      Permutation order = load_order(p_order, "", h, p_dim, p_m, true);
      PoleExpansion poles = read_poles_csv(p_poles);
      std::optional<PoleExpansion> energy;
      if (!p_poles_energy.empty()) energy = read_poles_csv(p_poles_energy);
      auto cutoff = parse_cutoff(p_cutoff);
      const bool want_etot = p_quantities.find("etot") != std::string::npos;
      if (want_etot && !energy) {
        throw std::invalid_argument("etot requested but --poles-energy not given");
      }
      QuantityReport report =
          assemble_quantities(h, poles, energy ? &*energy : nullptr, cutoff, order);

      nlohmann::json j;
      j["n"] = h.size();
      j["q"] = poles.count();
      j["cutoff"] = cutoff ? nlohmann::json(*cutoff) : nlohmann::json("exact");
      if (p_quantities.find("rho") != std::string::npos) j["rho"] = report.density;
      if (p_quantities.find("n") != std::string::npos) j["n_electrons"] = report.electron_count;
      if (want_etot) j["e_total"] = *report.energy_trace;
      j["max_abs_imag"] = report.max_abs_imag;
      auto diag_to_json = [](const std::vector<PoleDiagnostics>& ds) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& d : ds) {
          arr.push_back({{"pole", d.pole_index + 1},
                         {"z", {d.location.real(), d.location.imag()}},
                         {"w", {d.weight.real(), d.weight.imag()}},
                         {"cutoff", d.cutoff == kExactFill ? nlohmann::json("exact")
                                                           : nlohmann::json(d.cutoff)},
                         {"dropped_nnz", d.dropped_nnz},
                         {"dropped_max_abs", d.dropped_max_abs},
                         {"fma_factorization", d.fma_factorization},
                         {"fma_selinv", d.fma_selinv}});
        }
        return arr;
      };
      j["per_pole"] = diag_to_json(report.density_pole_diagnostics);
      if (!report.energy_pole_diagnostics.empty()) {
        j["per_pole_energy"] = diag_to_json(report.energy_pole_diagnostics);
      }
      std::ofstream out(p_out);
      if (!out) throw IoError("cannot open " + p_out + " for writing");
      out << j.dump(2) << "\n";
      if (!p_out_matrix.empty()) {
        PexsiResult r = pexsi_evaluate(h, poles, cutoff, order);
        write_matrix_market(r.assembled, p_out_matrix);
      }
      std::cout << "wrote " << p_out << "\n";
    } else if (*st) {
      StudyConfig cfg;
      cfg.mesh = MeshSpec{st_dim, st_m, true};
      cfg.z = parse_complex(st_z);
      if (!st_cutoffs.empty()) cfg.cutoffs = parse_cutoffs(st_cutoffs);
      if (!st_sizes.empty()) cfg.mesh_sizes = parse_sizes(st_sizes);
      cfg.repetitions = st_reps;
      cfg.seed = st_seed;
      cfg.output_path = st_out;
      cfg.contour = ContourSpec{st_q, parse_complex(st_center), st_radius, st_beta, st_ef};

      if (st_kind == "localization") {
        cfg.kind = StudyKind::localization;
        auto r = run_localization_study(cfg);
        std::cout << "rate g = " << r.rate << ", |L| fit = " << r.factor_fit.rate
                  << ", inverse fit = " << r.inverse_fit.rate << "\n";
      } else if (st_kind == "convergence" || st_kind == "periodic1d") {
        cfg.kind = st_kind == "convergence" ? StudyKind::convergence : StudyKind::periodic1d;
        if (cfg.kind == StudyKind::periodic1d) cfg.mesh.dim = 1;
        auto r = run_convergence_study(cfg);
        std::cout << "rate g = " << r.rate << ", fitted error slope = " << r.selinv_fit.rate
                  << " (target 2g = " << 2 * r.rate << ")\n";
      } else if (st_kind == "nscaling" || st_kind == "cscaling") {
        cfg.kind = st_kind == "nscaling" ? StudyKind::nscaling : StudyKind::cscaling;
        auto r = run_scaling_study(cfg);
        std::cout << "log-log flop slope = " << r.loglog_slope << "\n";
      } else if (st_kind == "pexsi") {
        cfg.kind = StudyKind::pexsi;
        auto r = run_pexsi_study(cfg);
        std::cout << "min pole rate = " << r.min_rate << "\n";
      } else {
        throw std::invalid_argument("unknown study kind '" + st_kind + "'");
      }
      if (!st_out.empty()) std::cout << "wrote " << st_out << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
