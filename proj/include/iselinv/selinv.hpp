#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "iselinv/factorization.hpp"
#include "iselinv/symbolic.hpp"
#include "iselinv/types.hpp"

namespace iselinv {

/// Entries of the inverse (or its approximation) on the pattern of the
/// originating factorization. Storage is the lower triangle plus diagonal of
/// that pattern, so symmetry holds structurally.
class SelectedInverse {
 public:
  SelectedInverse() = default;
  SelectedInverse(std::shared_ptr<const FillPattern> pattern, std::vector<Complex> values,
                  bool incomplete, KernelStats stats)
      : pattern_(std::move(pattern)),
        values_(std::move(values)),
        incomplete_(incomplete),
        stats_(stats) {}

  Index size() const { return pattern_ ? pattern_->size() : 0; }
  const FillPattern& pattern() const { return *pattern_; }
  std::shared_ptr<const FillPattern> pattern_ptr() const { return pattern_; }
  bool incomplete() const { return incomplete_; }
  const KernelStats& stats() const { return stats_; }

  /// Symmetric lookup; 0 outside the stored pattern.
  Complex entry(Index i, Index j) const;
  Complex at_slot(Index slot) const { return values_[slot]; }
  std::span<const Complex> values() const { return values_; }
  Complex diagonal(Index j) const { return values_[pattern_->column_begin(j)]; }

 private:
  std::shared_ptr<const FillPattern> pattern_;
  std::vector<Complex> values_;
  bool incomplete_ = false;
  KernelStats stats_;
};

/// Products discarded by the incomplete inversion, recorded symmetrically.
/// Unlike the factorization's dropped matrix these may carry diagonal terms.
struct DroppedInverseEntries {
  SparseSymmetric matrix;
  std::uint32_t source_cutoff = 0;
};

struct IncompleteSelinv {
  SelectedInverse inverse;
  std::optional<DroppedInverseEntries> dropped;
};

/// Instrumentation of the right-to-left sweep: every off-diagonal pair read
/// from the already-computed block is checked against the stored pattern.
/// On an untruncated pattern the absent count must be zero; on a truncated
/// pattern absent reads are treated as structural zeros and counted here.
struct ClosednessReport {
  std::uint64_t required_pair_reads = 0;
  std::uint64_t absent_pair_reads = 0;
  /// Sample of missing (i, k, at column j) triples, capped.
  std::vector<std::array<Index, 3>> violations;

  bool closed() const { return absent_pair_reads == 0; }
};

/// Selected inversion over exact factors: computed entries match the true
/// inverse on the pattern.
SelectedInverse selinv_exact(const LdltFactors& f);

/// Selected inversion over incomplete factors. Reads of pairs outside the
/// pattern are treated as zero; with TrackDropped::yes the discarded products
/// (including the diagonal correction line) are accumulated into F.
IncompleteSelinv selinv_incomplete(const LdltFactors& f, TrackDropped track);

/// Runs the sweep with read instrumentation and reports pattern-closure
/// violations; deterministic for fixed factors.
ClosednessReport closedness_audit(const LdltFactors& f);

/// Entrywise bound on |(A+E)^{-1} - B| over the entries of the truncated
/// pattern, parallel to its slots:
///   sum_j' exp(-rate level(j',j)) |F(i,j')|
///   + sum_{i',j'} exp(-rate (level(i,i') + level(j',j))) |F(i',j')|
/// with levels taken from a pattern computed at a cut-off of at least
/// 2c + 1 so the support of F is covered. Prefactor reported as 1.
std::vector<double> aposteriori_selinv_bound(const DroppedInverseEntries& dropped,
                                             const FillPattern& truncated,
                                             const FillPattern& levels, double rate);

}  // namespace iselinv
