#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "iselinv/sparse.hpp"
#include "iselinv/types.hpp"

namespace iselinv {

/// Cut-off sentinel for untruncated (exact-fill) patterns.
inline constexpr std::uint32_t kExactFill = std::numeric_limits<std::uint32_t>::max();
/// Cut-off tag for value-driven (tolerance) patterns whose level data is
/// not meaningful.
inline constexpr std::uint32_t kValueDrivenPattern = kExactFill - 1;

inline constexpr std::uint16_t kLevelUnset = std::numeric_limits<std::uint16_t>::max();

/// Per-column symbolic structure of a triangular factor: sorted row indices
/// i >= j (the diagonal is always the first entry of its column) with a
/// level value per entry. Levels saturate at 16 bits. The strict lower part
/// is also linked row-wise with back-references into the column storage,
/// which is what the numeric kernels traverse.
class FillPattern {
 public:
  Index size() const { return n_; }
  std::uint32_t cutoff() const { return cutoff_; }
  Index nnz() const { return static_cast<Index>(rows_.size()); }

  Index column_begin(Index j) const { return col_ptr_[j]; }
  Index column_end(Index j) const { return col_ptr_[j + 1]; }
  std::span<const Index> column_rows(Index j) const {
    return {rows_.data() + col_ptr_[j], rows_.data() + col_ptr_[j + 1]};
  }
  std::span<const std::uint16_t> column_levels(Index j) const {
    return {levels_.data() + col_ptr_[j], levels_.data() + col_ptr_[j + 1]};
  }
  Index row_at(Index slot) const { return rows_[slot]; }
  std::uint16_t level_at(Index slot) const { return levels_[slot]; }

  /// Strict-lower entries of row i sitting in columns k < i, as
  /// (column, slot) pairs with slot indexing the column storage. Columns
  /// appear in ascending order.
  struct RowRef {
    Index column;
    Index slot;
  };
  std::span<const RowRef> row_refs(Index i) const {
    return {row_refs_.data() + row_ptr_[i], row_refs_.data() + row_ptr_[i + 1]};
  }

  bool contains(Index i, Index j) const;
  std::optional<int> level_of(Index i, Index j) const;
  /// Slot of (i, j), i >= j, or -1 when absent.
  Index slot_of(Index i, Index j) const;

  static FillPattern from_columns(Index n, std::uint32_t cutoff,
                                  std::vector<Index> col_ptr, std::vector<Index> rows,
                                  std::vector<std::uint16_t> levels);

 private:
  Index n_ = 0;
  std::uint32_t cutoff_ = 0;
  std::vector<Index> col_ptr_{0};
  std::vector<Index> rows_;
  std::vector<std::uint16_t> levels_;
  std::vector<Index> row_ptr_{0};
  std::vector<RowRef> row_refs_;

  void build_row_refs();
};

/// Level-of-fill pattern of A under the given cut-off: entry (i, j) is kept
/// iff the shortest fill path between i and j (interior vertices all below
/// min(i, j)) has length at most cutoff + 1. Original nonzeros have level 0
/// and the diagonal is always present. Pass kExactFill for no truncation.
/// Computed by the left-looking elimination recurrence
///   level(i,j) = min over eliminated k of level(i,k) + level(k,j) + 1;
/// the equivalence with the shortest-path definition is enforced by tests
/// against fill_path_oracle rather than assumed.
FillPattern symbolic_levels(const SparseSymmetric& a, std::uint32_t cutoff);

/// symbolic_levels with no truncation: the structural nonzeros of the exact
/// factorization, barring cancellation.
FillPattern fill_pattern_exact(const SparseSymmetric& a);

/// Brute-force reference: BFS from i to j restricted to interior vertices
/// below min(i, j); returns the path length minus one clamped at zero, or
/// nullopt when no such path exists. Limited to n <= 64.
std::optional<int> fill_path_oracle(const SparseSymmetric& a, Index i, Index j);

}  // namespace iselinv
