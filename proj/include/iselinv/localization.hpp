#pragma once

#include <span>
#include <vector>

#include "iselinv/factorization.hpp"
#include "iselinv/sparse.hpp"
#include "iselinv/symbolic.hpp"
#include "iselinv/types.hpp"

namespace iselinv {

struct Interval {
  double lo;
  double hi;
};

/// Union of disjoint closed real intervals. For one- and two-interval sets
/// the decay rate green(z) is available: it is the asymptotic rate at which
/// polynomial approximation to 1/(x - z) converges on the set, and governs
/// the entrywise decay of shifted inverses and their factors.
class SpectralSet {
 public:
  explicit SpectralSet(std::vector<Interval> intervals);

  std::span<const Interval> intervals() const { return intervals_; }
  double distance_to(Complex z) const;
  bool contains(double x) const;

  /// Decay rate at z; throws for z on the set or for more than two intervals.
  double green(Complex z) const;

 private:
  std::vector<Interval> intervals_;
  double two_interval_center_ = 0;  // z-independent moment, cached eagerly
};

/// log |w + sqrt(w^2 - 1)| with the root chosen on the side of w, mapped from
/// [a, b] to [-1, 1]. Zero exactly on the interval, positive and harmonic
/// off it.
double green_single_interval(double a, double b, Complex z);

struct TwoIntervalOptions {
  double path_height = 0;   // 0 = automatic
  double abs_tol = 1e-10;
  int max_panels = 4096;
};

/// Decay rate for [a,b] u [c,d] with a < b < c < d, via the line integral of
///   f(u) (s - u),  f(u) = ((u-a)(u-b)(u-c)(u-d))^{-1/2},
/// where the moment s is the f-weighted mean of u over the gap. The path runs
/// from a into the upper half-plane and over to z; each square root starts on
/// the principal branch and is continued along the path. Throws
/// QuadratureError when panel doubling fails to converge.
double green_two_intervals(double a, double b, double c, double d, Complex z,
                           const TwoIntervalOptions& opts = {});

struct DecaySample {
  int distance;
  double magnitude;
};

struct DecayFit {
  double rate = 0;        // nonnegative; negated least-squares slope
  double intercept = 0;   // log-magnitude at distance 0 of the fitted line
  double residual = 0;    // RMS of log-magnitude residuals over the bins
  int bins_used = 0;
  int min_distance = 0;
  int max_distance = 0;
};

/// Least-squares decay rate of log(max magnitude per distance bin) versus
/// distance. Bins whose maximum falls below the floor are excluded; at least
/// five usable bins are required.
DecayFit fit_decay_rate(std::span<const DecaySample> samples, double floor = 1e-14);

enum class DecayMode { inverse, factor };

/// Rate bound exp(-g dist) per pattern entry, parallel to the pattern slots:
/// graph distance in G(A) for DecayMode::inverse, the stored level for
/// DecayMode::factor. Throws when z lies on the spectral set.
std::vector<double> predicted_bounds(const SparseSymmetric& a, const SpectralSet& set, Complex z,
                                     DecayMode mode, const FillPattern& pattern);

/// (level, |L|) samples over the strict lower factor entries.
std::vector<DecaySample> factor_decay_samples(const LdltFactors& f);

}  // namespace iselinv
