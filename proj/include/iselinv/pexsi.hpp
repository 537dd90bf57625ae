#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "iselinv/dense.hpp"
#include "iselinv/ordering.hpp"
#include "iselinv/selinv.hpp"
#include "iselinv/sparse.hpp"
#include "iselinv/types.hpp"

namespace iselinv {

struct Pole {
  Complex weight;
  Complex location;
};

/// Weight/pole pairs of a rational approximation r(x) = sum w_k / (x - z_k).
class PoleExpansion {
 public:
  PoleExpansion() = default;
  explicit PoleExpansion(std::vector<Pole> poles);

  Index count() const { return static_cast<Index>(poles_.size()); }
  const std::vector<Pole>& poles() const { return poles_; }
  const Pole& pole(Index k) const { return poles_[k]; }

  /// Closed under conjugation with conjugated weights (so real symmetric
  /// inputs yield real results).
  bool conjugate_closed(double tol = 1e-13) const;

  /// r(x) evaluated as a scalar.
  Complex evaluate(Complex x) const;

 private:
  std::vector<Pole> poles_;
};

/// Occupation function 1 / (1 + exp(beta (e - e_fermi))), overflow-safe.
double fermi_dirac(double e, double beta, double e_fermi);

/// Analytic continuation of the occupation function, for contour nodes off
/// the real axis. Overflow-safe in the real part of the exponent.
Complex fermi_dirac_complex(Complex e, double beta, double e_fermi);

/// Trapezoid discretization of the Cauchy integral of f over a circle:
/// q poles equispaced (half-offset, so none is real for a real-centered
/// circle) with weights w_k = f(z_k) (z_{k+1} - z_{k-1}) / (2 * 2 pi i).
/// The resulting sum converges to f exponentially in q strictly inside.
PoleExpansion circle_contour_poles(int q, Complex center, double radius,
                                   const std::function<Complex(Complex)>& f);

struct PoleDiagnostics {
  Index pole_index = 0;  // 0-based
  Complex location;
  Complex weight;
  std::uint32_t cutoff = kExactFill;
  Index dropped_nnz = 0;
  double dropped_max_abs = 0;
  std::uint64_t fma_factorization = 0;
  std::uint64_t fma_selinv = 0;
};

/// Selected entries of r(H) = sum w_k (H - z_k I)^{-1} accumulated per pole:
/// shift, (incomplete) factorization, (incomplete) selected inversion under a
/// shared symbolic pattern, then a weight-scaled reduction in pole order (so
/// results are reproducible regardless of the per-pole parallelism).
struct PexsiResult {
  /// r(H) on the stored positions of H plus the diagonal.
  SparseSymmetric assembled;
  std::vector<Complex> diagonal;
  Complex trace;
  std::vector<PoleDiagnostics> per_pole;
};

PexsiResult pexsi_evaluate(const SparseSymmetric& h, const PoleExpansion& poles,
                           std::optional<std::uint32_t> cutoff, const Permutation& order,
                           int max_threads = 0);

/// Per-site densities and traces from named pole sets: the density set feeds
/// rho and the electron count, the optional energy set feeds the
/// energy-weighted trace.
struct QuantityReport {
  std::vector<double> density;
  double electron_count = 0;
  std::optional<double> energy_trace;
  double max_abs_imag = 0;  // largest imaginary residue across densities/traces
  std::vector<PoleDiagnostics> density_pole_diagnostics;
  std::vector<PoleDiagnostics> energy_pole_diagnostics;
};

QuantityReport assemble_quantities(const SparseSymmetric& h, const PoleExpansion& density_poles,
                                   const PoleExpansion* energy_poles,
                                   std::optional<std::uint32_t> cutoff, const Permutation& order);

/// Reference evaluation of the occupation matrix by full eigendecomposition:
/// f(H), the electron count sum f(E_k) and the energy sum E_k f(E_k).
struct DensityOracle {
  DenseMatrix density;
  double electron_count = 0;
  double total_energy = 0;
};

DensityOracle dense_density_oracle(const DenseMatrix& h, double beta, double e_fermi);

}  // namespace iselinv
