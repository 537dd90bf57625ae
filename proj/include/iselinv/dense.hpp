#pragma once

#include <span>
#include <vector>

#include "iselinv/sparse.hpp"
#include "iselinv/types.hpp"

namespace iselinv {

/// Largest dimension accepted by the dense reference routines.
inline constexpr Index kDenseOracleCap = 2048;

/// Dense complex matrix, row-major. Reference substrate for the small-scale
/// checks; not meant for production-sized problems.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(Index n) : n_(n), a_(static_cast<std::size_t>(n) * n, Complex{0, 0}) {}

  static DenseMatrix identity(Index n);
  static DenseMatrix from_sparse(const SparseSymmetric& a);

  Index size() const { return n_; }
  Complex& at(Index i, Index j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  const Complex& at(Index i, Index j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

  DenseMatrix multiply(const DenseMatrix& b) const;
  double max_abs() const;
  double max_abs_imag() const;

  std::span<const Complex> data() const { return a_; }

 private:
  Index n_ = 0;
  std::vector<Complex> a_;
};

struct DenseEigen {
  /// Ascending for the real-symmetric path; sorted by (re, im) otherwise.
  std::vector<Complex> eigenvalues;
  /// Eigenvectors as columns; empty for defective general matrices is not
  /// handled (inputs here are diagonalizable by construction).
  DenseMatrix eigenvectors;
};

/// Full eigendecomposition. With symmetric_real set, the input must be a real
/// symmetric matrix (stored with zero imaginary parts) and the returned
/// eigenvalues are real and ascending.
DenseEigen dense_eigendecomposition(const DenseMatrix& a, bool symmetric_real);

DenseMatrix dense_inverse(const DenseMatrix& a);

}  // namespace iselinv
