#include "iselinv/dense.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace iselinv {

namespace {

void check_cap(Index n) {
  if (n > kDenseOracleCap) {
    throw std::invalid_argument("dense routine cap exceeded: n = " + std::to_string(n) +
                                " > " + std::to_string(kDenseOracleCap));
  }
}

Eigen::MatrixXcd to_eigen(const DenseMatrix& a) {
  const Index n = a.size();
  Eigen::MatrixXcd m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = a.at(i, j);
  return m;
}

DenseMatrix from_eigen(const Eigen::MatrixXcd& m) {
  DenseMatrix a(static_cast<Index>(m.rows()));
  for (Index i = 0; i < a.size(); ++i)
    for (Index j = 0; j < a.size(); ++j) a.at(i, j) = m(i, j);
  return a;
}

}  // namespace

DenseMatrix DenseMatrix::identity(Index n) {
  DenseMatrix a(n);
  for (Index i = 0; i < n; ++i) a.at(i, i) = Complex{1, 0};
  return a;
}

DenseMatrix DenseMatrix::from_sparse(const SparseSymmetric& s) {
  DenseMatrix a(s.size());
  for (const auto& e : s.lower_entries()) {
    a.at(e.row, e.col) = e.value;
    a.at(e.col, e.row) = e.value;
  }
  return a;
}

DenseMatrix DenseMatrix::multiply(const DenseMatrix& b) const {
  if (b.n_ != n_) throw std::invalid_argument("dimension mismatch");
  DenseMatrix c(n_);
  for (Index i = 0; i < n_; ++i) {
    for (Index k = 0; k < n_; ++k) {
      const Complex aik = at(i, k);
      if (aik == Complex{0, 0}) continue;
      for (Index j = 0; j < n_; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  }
  return c;
}

double DenseMatrix::max_abs() const {
  double m = 0;
  for (const Complex& v : a_) m = std::max(m, std::abs(v));
  return m;
}

double DenseMatrix::max_abs_imag() const {
  double m = 0;
  for (const Complex& v : a_) m = std::max(m, std::abs(v.imag()));
  return m;
}

DenseEigen dense_eigendecomposition(const DenseMatrix& a, bool symmetric_real) {
  check_cap(a.size());
  const Index n = a.size();
  DenseEigen out;
  if (symmetric_real) {
    const double scale = std::max(1.0, a.max_abs());
    if (a.max_abs_imag() > 1e-12 * scale) {
      throw std::invalid_argument("real-symmetric path requested for a complex matrix");
    }
    Eigen::MatrixXd m(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) m(i, j) = a.at(i, j).real();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw std::invalid_argument("real-symmetric path requested for an unsymmetric matrix");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw Error("eigendecomposition failed to converge");
    out.eigenvalues.resize(n);
    out.eigenvectors = DenseMatrix(n);
    for (Index k = 0; k < n; ++k) {
      out.eigenvalues[k] = Complex{es.eigenvalues()(k), 0.0};
      for (Index i = 0; i < n; ++i) out.eigenvectors.at(i, k) = Complex{es.eigenvectors()(i, k), 0.0};
    }
    return out;
  }

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(a));
  if (es.info() != Eigen::Success) throw Error("eigendecomposition failed to converge");
  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::sort(perm.begin(), perm.end(), [&](Index x, Index y) {
    const Complex& u = es.eigenvalues()(x);
    const Complex& v = es.eigenvalues()(y);
    if (u.real() != v.real()) return u.real() < v.real();
    return u.imag() < v.imag();
  });
  out.eigenvalues.resize(n);
  out.eigenvectors = DenseMatrix(n);
  for (Index k = 0; k < n; ++k) {
    out.eigenvalues[k] = es.eigenvalues()(perm[k]);
    for (Index i = 0; i < n; ++i) out.eigenvectors.at(i, k) = es.eigenvectors()(i, perm[k]);
  }
  return out;
}

DenseMatrix dense_inverse(const DenseMatrix& a) {
  check_cap(a.size());
  Eigen::MatrixXcd m = to_eigen(a);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  const auto diag = lu.matrixLU().diagonal();
  double umin = std::numeric_limits<double>::infinity();
  double umax = 0;
  for (Eigen::Index k = 0; k < diag.size(); ++k) {
    umin = std::min(umin, std::abs(diag(k)));
    umax = std::max(umax, std::abs(diag(k)));
  }
  if (!(umin > 1e-15 * umax) || umax == 0.0) {
    throw SingularMatrixError("matrix numerically singular (pivot underflow)");
  }
  return from_eigen(lu.inverse());
}

}  // namespace iselinv
