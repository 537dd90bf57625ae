#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace iselinv {

using Complex = std::complex<double>;
using Index = std::int32_t;

/// Column index reported in errors and file formats is 1-based; everything
/// internal is 0-based.
inline std::string display_index(Index i) { return std::to_string(i + 1); }

class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// |D(j,j)| fell below the pivot floor: a leading principal submatrix is
/// singular or nearly so.
class PivotBreakdownError : public Error {
 public:
  PivotBreakdownError(Index column, double magnitude, const std::string& context = {})
      : Error("pivot breakdown at column " + display_index(column) + " (|D| = " +
              std::to_string(magnitude) + (context.empty() ? ")" : "); " + context)),
        column_(column),
        magnitude_(magnitude) {}

  Index column() const { return column_; }
  double magnitude() const { return magnitude_; }

 private:
  Index column_;
  double magnitude_;
};

class SingularMatrixError : public Error {
  using Error::Error;
};

/// The operand violates a hypothesis of the requested bound (e.g. the
/// perturbation norm is not small relative to the spectral gap).
class HypothesisViolatedError : public Error {
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : Error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_ = 0;
};

class InsufficientDataError : public Error {
  using Error::Error;
};

class IoError : public Error {
  using Error::Error;
};

}  // namespace iselinv
