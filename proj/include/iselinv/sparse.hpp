#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "iselinv/types.hpp"

namespace iselinv {

struct Triplet {
  Index row = 0;
  Index col = 0;
  Complex value;
};

/// Sparse complex-symmetric matrix. Only the lower triangle (i >= j) is
/// stored, column-wise with strictly increasing row indices; A(i,j) with
/// i < j resolves through the transposed position. Explicit zeros are
/// stripped at construction and instances are immutable afterwards.
class SparseSymmetric {
 public:
  SparseSymmetric() = default;

  Index size() const { return n_; }
  Index nnz_lower() const { return static_cast<Index>(rows_.size()); }

  std::span<const Index> column_rows(Index j) const {
    return {rows_.data() + col_ptr_[j], rows_.data() + col_ptr_[j + 1]};
  }
  std::span<const Complex> column_values(Index j) const {
    return {vals_.data() + col_ptr_[j], vals_.data() + col_ptr_[j + 1]};
  }

  /// Symmetric entry lookup; returns 0 for positions outside the stored set.
  Complex entry(Index i, Index j) const;
  bool contains(Index i, Index j) const;

  /// y = A x using both triangles.
  std::vector<Complex> multiply(std::span<const Complex> x) const;

  double max_abs() const;
  bool is_real(double tol = 0.0) const;

  /// Stored lower-triangle entries in column-major order, for iteration.
  struct Entry {
    Index row;
    Index col;
    Complex value;
  };
  std::vector<Entry> lower_entries() const;

  static SparseSymmetric from_columns(Index n, std::vector<Index> col_ptr,
                                      std::vector<Index> rows, std::vector<Complex> vals);

 private:
  Index n_ = 0;
  std::vector<Index> col_ptr_{0};
  std::vector<Index> rows_;
  std::vector<Complex> vals_;

  friend SparseSymmetric build_from_triplets(Index, std::span<const Triplet>);
};

/// Assembles a symmetric matrix from (row, col, value) triplets. Triplets may
/// address either triangle; repeated triplets on the same side are summed.
/// If a position is given on both sides, the two accumulated values must
/// match exactly, otherwise the input is rejected as asymmetric.
SparseSymmetric build_from_triplets(Index n, std::span<const Triplet> entries);

/// Undirected adjacency (both triangles, diagonal ignored) in compressed form.
struct AdjacencyGraph {
  std::vector<Index> ptr;
  std::vector<Index> nbr;

  static AdjacencyGraph build(const SparseSymmetric& a);
  Index size() const { return static_cast<Index>(ptr.size()) - 1; }
  std::span<const Index> neighbors(Index v) const {
    return {nbr.data() + ptr[v], nbr.data() + ptr[v + 1]};
  }
};

/// d-dimensional Cartesian mesh of side m, vertices enumerated
/// lexicographically by coordinate tuple.
struct MeshSpec {
  int dim = 1;
  Index m = 2;
  bool periodic = true;

  Index vertex_count() const;
  void validate() const;

  Index index_of(std::span<const Index> coords) const;
  std::array<Index, 3> coords_of(Index v) const;
};

/// Tight-binding test matrix on the periodic mesh: alternating +1/-1 diagonal
/// and -1/(2 dim) on nearest-neighbor links. Requires even m so the
/// alternation is consistent across the wrap; on an m = 2 axis the two wrap
/// links coincide with the nearest-neighbor link and the value is not doubled.
SparseSymmetric toy_hamiltonian(const MeshSpec& spec);

/// A - z I, creating diagonal entries where absent.
SparseSymmetric shift(const SparseSymmetric& a, Complex z);

/// Shortest-path edge count in the graph of A; nullopt when disconnected.
std::optional<int> graph_distance(const SparseSymmetric& a, Index i, Index j);

/// BFS distances from one source; -1 marks unreachable vertices.
std::vector<int> graph_distances_from(const AdjacencyGraph& g, Index source);

}  // namespace iselinv
