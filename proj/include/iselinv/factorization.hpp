#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "iselinv/sparse.hpp"
#include "iselinv/symbolic.hpp"
#include "iselinv/types.hpp"

namespace iselinv {

struct KernelStats {
  std::uint64_t fma_count = 0;
};

/// Unit-lower-triangular L (diagonal implicit) and diagonal D on a fill
/// pattern. Off-diagonal values are stored parallel to the pattern slots;
/// diagonal slots are unused in the L array.
class LdltFactors {
 public:
  LdltFactors() = default;
  LdltFactors(std::shared_ptr<const FillPattern> pattern, std::vector<Complex> lower,
              std::vector<Complex> diag, KernelStats stats)
      : pattern_(std::move(pattern)),
        lower_(std::move(lower)),
        diag_(std::move(diag)),
        stats_(stats) {}

  Index size() const { return pattern_ ? pattern_->size() : 0; }
  const FillPattern& pattern() const { return *pattern_; }
  std::shared_ptr<const FillPattern> pattern_ptr() const { return pattern_; }

  /// L(i, j) for i > j; 1 on the diagonal, 0 outside the pattern.
  Complex lower_entry(Index i, Index j) const;
  Complex lower_at_slot(Index slot) const { return lower_[slot]; }
  std::span<const Complex> lower_values() const { return lower_; }
  Complex d(Index j) const { return diag_[j]; }
  std::span<const Complex> diagonal() const { return diag_; }
  const KernelStats& stats() const { return stats_; }

 private:
  std::shared_ptr<const FillPattern> pattern_;
  std::vector<Complex> lower_;
  std::vector<Complex> diag_;
  KernelStats stats_;
};

/// Updates discarded by an incomplete factorization, recorded symmetrically
/// with zero diagonal so that the kept factors satisfy L D L^T = A + E
/// exactly.
struct DroppedEntries {
  SparseSymmetric matrix;
  std::uint32_t source_cutoff = 0;
};

enum class TrackDropped { no, yes };

struct IncompleteLdlt {
  LdltFactors factors;
  std::optional<DroppedEntries> dropped;
};

/// Factorization on an untruncated pattern; the result reconstructs A up to
/// roundoff. Throws PivotBreakdownError when a leading submatrix is
/// (near-)singular and rejects patterns that do not cover the fill of A.
LdltFactors ldlt_exact(const SparseSymmetric& a, std::shared_ptr<const FillPattern> pattern);

/// Factorization restricted to a truncated pattern. Updates landing outside
/// the pattern are discarded; with TrackDropped::yes they are accumulated
/// into E so that L D L^T = A + E holds exactly.
IncompleteLdlt ldlt_incomplete(const SparseSymmetric& a,
                               std::shared_ptr<const FillPattern> pattern, TrackDropped track);

/// Value-driven variant: the column structure grows dynamically and computed
/// fill entries with |L(i,j)| < tol are dropped (original positions of A are
/// always kept). Dropped entries are logged so L D L^T = A + E stays exact;
/// tol = 0 reproduces the exact factorization.
IncompleteLdlt ldlt_incomplete_tol(const SparseSymmetric& a, double tol, TrackDropped track);

/// Entrywise bound on |A^{-1} - (A+E)^{-1}| over the stored positions of A,
/// returned parallel to A's lower storage: the rate-weighted sum
///   sum exp(-rate (d(i,~i) + d(~j,j))) |E(~i,~j)|
/// plus the quadratic tail delta^-2 |E|_2^2 / (delta - |E|_2), with |E|_2
/// estimated from symmetric Gershgorin row sums. delta is the distance from
/// the shift to the spectral set; the asymptotic prefactor is reported as 1,
/// so this is a rate-level bound. Throws HypothesisViolatedError when the
/// estimated |E|_2 reaches delta.
std::vector<double> aposteriori_inverse_bound(const DroppedEntries& dropped, double rate,
                                              double delta, const SparseSymmetric& a);

/// x with A x = rhs via the factors (forward, diagonal, backward sweep).
std::vector<Complex> solve_with_factors(const LdltFactors& f, std::span<const Complex> rhs);

}  // namespace iselinv
