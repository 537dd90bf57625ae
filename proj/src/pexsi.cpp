#include "iselinv/pexsi.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <thread>

#include "iselinv/symbolic.hpp"

namespace iselinv {

PoleExpansion::PoleExpansion(std::vector<Pole> poles) : poles_(std::move(poles)) {
  if (poles_.empty()) throw std::invalid_argument("pole expansion needs at least one pole");
}

bool PoleExpansion::conjugate_closed(double tol) const {
  for (const Pole& p : poles_) {
    bool matched = false;
    for (const Pole& q : poles_) {
      if (std::abs(q.location - std::conj(p.location)) <= tol &&
          std::abs(q.weight - std::conj(p.weight)) <= tol) {
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

Complex PoleExpansion::evaluate(Complex x) const {
  Complex sum{0, 0};
  for (const Pole& p : poles_) sum += p.weight / (x - p.location);
  return sum;
}

double fermi_dirac(double e, double beta, double e_fermi) {
  if (!(beta > 0)) throw std::invalid_argument("inverse temperature must be positive");
  const double x = beta * (e - e_fermi);
  if (x >= 0) {
    const double t = std::exp(-x);
    return t / (1.0 + t);
  }
  return 1.0 / (1.0 + std::exp(x));
}

Complex fermi_dirac_complex(Complex e, double beta, double e_fermi) {
  if (!(beta > 0)) throw std::invalid_argument("inverse temperature must be positive");
  const Complex x = beta * (e - e_fermi);
  if (x.real() >= 0) {
    const Complex t = std::exp(-x);
    return t / (Complex{1, 0} + t);
  }
  return Complex{1, 0} / (Complex{1, 0} + std::exp(x));
}

PoleExpansion circle_contour_poles(int q, Complex center, double radius,
                                   const std::function<Complex(Complex)>& f) {
  if (q < 4) throw std::invalid_argument("contour discretization needs at least 4 poles");
  if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<Pole> poles(q);
  for (int k = 0; k < q; ++k) {
    // Half-offset grid keeps every node off the real axis for real-centered
    // circles, so the set stays conjugate-closed without real poles.
    const double theta = two_pi * (k + 0.5) / q;
    const Complex node = radius * Complex{std::cos(theta), std::sin(theta)};
    const Complex z = center + node;
    // 1/(2 pi i) * contour f(u)/(u - x) du = f(x) with the exact tangent
    // dz = i z'(theta) dtheta gives w_k = -f(z_k) R e^{i theta_k} / q, and the
    // periodic trapezoid sum converges exponentially in q. (A secant
    // difference (z_{k+1} - z_{k-1})/2 in place of the tangent caps the
    // accuracy at O(q^-2).)
    poles[k] = {-f(z) * node / static_cast<double>(q), z};
  }
  return PoleExpansion(std::move(poles));
}

namespace {

struct PerPole {
  std::vector<Complex> entry_values;  // aligned with h's lower storage
  std::vector<Complex> diagonal;      // original indexing
  PoleDiagnostics diag;
};

PerPole evaluate_pole(const SparseSymmetric& h_permuted,
                      const std::vector<SparseSymmetric::Entry>& h_entries,
                      const Permutation& order, std::shared_ptr<const FillPattern> pattern,
                      const Pole& pole, Index k) {
  SparseSymmetric a = shift(h_permuted, pole.location);
  IncompleteLdlt fact = [&] {
    try {
      return ldlt_incomplete(a, pattern, TrackDropped::yes);
    } catch (const PivotBreakdownError& e) {
      throw PivotBreakdownError(e.column(), e.magnitude(),
                                "pole " + display_index(k) + " at z = (" +
                                    std::to_string(pole.location.real()) + ", " +
                                    std::to_string(pole.location.imag()) + ")");
    }
  }();
  IncompleteSelinv inv = selinv_incomplete(fact.factors, TrackDropped::no);

  PerPole out;
  out.diag.pole_index = k;
  out.diag.location = pole.location;
  out.diag.weight = pole.weight;
  out.diag.cutoff = pattern->cutoff();
  out.diag.dropped_nnz = fact.dropped->matrix.nnz_lower();
  out.diag.dropped_max_abs = fact.dropped->matrix.max_abs();
  out.diag.fma_factorization = fact.factors.stats().fma_count;
  out.diag.fma_selinv = inv.inverse.stats().fma_count;

  const Index n = h_permuted.size();
  out.diagonal.resize(n);
  for (Index i = 0; i < n; ++i) out.diagonal[i] = inv.inverse.diagonal(order(i));
  out.entry_values.reserve(h_entries.size());
  for (const auto& e : h_entries) {
    out.entry_values.push_back(inv.inverse.entry(order(e.row), order(e.col)));
  }
  return out;
}

}  // namespace

PexsiResult pexsi_evaluate(const SparseSymmetric& h, const PoleExpansion& poles,
                           std::optional<std::uint32_t> cutoff, const Permutation& order,
                           int max_threads) {
  if (order.size() != h.size()) throw std::invalid_argument("permutation length mismatch");
  const Index n = h.size();
  const Index q = poles.count();

  const SparseSymmetric hp = permute(h, order);
  // The symbolic side depends only on the structure, not on the shift, so it
  // is computed once and shared across poles.
  auto pattern = std::make_shared<const FillPattern>(
      cutoff ? symbolic_levels(hp, *cutoff) : fill_pattern_exact(hp));
  const auto h_entries = h.lower_entries();

  std::vector<PerPole> results(q);
  const int hw = max_threads > 0 ? max_threads
                                 : std::max(1u, std::thread::hardware_concurrency());
  for (Index base = 0; base < q; base += hw) {
    const Index hi = std::min<Index>(q, base + hw);
    std::vector<std::future<PerPole>> futures;
    futures.reserve(hi - base);
    for (Index k = base; k < hi; ++k) {
      futures.push_back(std::async(std::launch::async, [&, k] {
        return evaluate_pole(hp, h_entries, order, pattern, poles.pole(k), k);
      }));
    }
    for (Index k = base; k < hi; ++k) results[k] = futures[k - base].get();
  }

  // Deterministic reduction in pole order.
  PexsiResult out;
  out.diagonal.assign(n, Complex{0, 0});
  std::vector<Complex> entry_acc(h_entries.size(), Complex{0, 0});
  for (Index k = 0; k < q; ++k) {
    const Complex w = poles.pole(k).weight;
    for (Index i = 0; i < n; ++i) out.diagonal[i] += w * results[k].diagonal[i];
    for (std::size_t s = 0; s < h_entries.size(); ++s) {
      entry_acc[s] += w * results[k].entry_values[s];
    }
    out.per_pole.push_back(results[k].diag);
  }
  out.trace = Complex{0, 0};
  for (Index i = 0; i < n; ++i) out.trace += out.diagonal[i];

  std::vector<Triplet> trip;
  trip.reserve(entry_acc.size() + n);
  for (std::size_t s = 0; s < h_entries.size(); ++s) {
    if (h_entries[s].row != h_entries[s].col) {
      trip.push_back({h_entries[s].row, h_entries[s].col, entry_acc[s]});
    }
  }
  for (Index i = 0; i < n; ++i) trip.push_back({i, i, out.diagonal[i]});
  out.assembled = build_from_triplets(n, trip);
  return out;
}

QuantityReport assemble_quantities(const SparseSymmetric& h, const PoleExpansion& density_poles,
                                   const PoleExpansion* energy_poles,
                                   std::optional<std::uint32_t> cutoff, const Permutation& order) {
  QuantityReport report;
  PexsiResult density = pexsi_evaluate(h, density_poles, cutoff, order);
  report.density.resize(h.size());
  for (Index i = 0; i < h.size(); ++i) {
    report.density[i] = density.diagonal[i].real();
    report.max_abs_imag = std::max(report.max_abs_imag, std::abs(density.diagonal[i].imag()));
  }
  report.electron_count = density.trace.real();
  report.max_abs_imag = std::max(report.max_abs_imag, std::abs(density.trace.imag()));
  report.density_pole_diagnostics = std::move(density.per_pole);

  if (energy_poles != nullptr) {
    PexsiResult energy = pexsi_evaluate(h, *energy_poles, cutoff, order);
    report.energy_trace = energy.trace.real();
    report.max_abs_imag = std::max(report.max_abs_imag, std::abs(energy.trace.imag()));
    report.energy_pole_diagnostics = std::move(energy.per_pole);
  }
  return report;
}

DensityOracle dense_density_oracle(const DenseMatrix& h, double beta, double e_fermi) {
  DenseEigen eig = dense_eigendecomposition(h, true);
  const Index n = h.size();
  DensityOracle out;
  out.density = DenseMatrix(n);
  std::vector<double> occ(n);
  for (Index k = 0; k < n; ++k) {
    const double e = eig.eigenvalues[k].real();
    occ[k] = fermi_dirac(e, beta, e_fermi);
    out.electron_count += occ[k];
    out.total_energy += e * occ[k];
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      double v = 0;
      for (Index k = 0; k < n; ++k) {
        v += eig.eigenvectors.at(i, k).real() * occ[k] * eig.eigenvectors.at(j, k).real();
      }
      out.density.at(i, j) = Complex{v, 0};
      out.density.at(j, i) = Complex{v, 0};
    }
  }
  return out;
}

}  // namespace iselinv
