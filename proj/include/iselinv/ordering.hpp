#pragma once

#include <vector>

#include "iselinv/sparse.hpp"
#include "iselinv/types.hpp"

namespace iselinv {

/// Bijection between old and new vertex numbers; forward maps old -> new.
class Permutation {
 public:
  Permutation() = default;
  static Permutation identity(Index n);
  static Permutation from_forward(std::vector<Index> forward);

  Index size() const { return static_cast<Index>(fwd_.size()); }
  Index operator()(Index old_index) const { return fwd_[old_index]; }
  Index old_of(Index new_index) const { return inv_[new_index]; }
  const std::vector<Index>& forward() const { return fwd_; }
  const std::vector<Index>& inverse() const { return inv_; }
  Permutation inverted() const;

 private:
  std::vector<Index> fwd_;
  std::vector<Index> inv_;
};

/// Geometric nested dissection for a 2D/3D Cartesian mesh: recursively cuts
/// the longest axis with a one-vertex-thick plane, numbering separators last.
/// A periodic axis is cut by two parallel planes on its first split (middle
/// and wrap seam) so that no edge survives between the halves; 1D meshes are
/// rejected, a plain left-to-right order is used there instead.
Permutation nested_dissection_cartesian(const MeshSpec& spec);

/// One recursion split of the general dissector, for validation: no edge may
/// join the two sides.
struct DissectionSplit {
  std::vector<Index> side1;
  std::vector<Index> side2;
  std::vector<Index> separator;
};

/// Nested dissection for general graphs via BFS level-set separators from a
/// pseudo-peripheral vertex. Connected components are ordered consecutively.
/// When trace is given, every recursion split is appended to it.
Permutation nested_dissection_general(const SparseSymmetric& a,
                                      std::vector<DissectionSplit>* trace = nullptr);

/// (P A P^T)(p(i), p(j)) = A(i, j), re-canonicalized to the lower triangle.
SparseSymmetric permute(const SparseSymmetric& a, const Permutation& p);

}  // namespace iselinv
