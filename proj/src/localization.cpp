#include "iselinv/localization.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace iselinv {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

// 16-point Gauss-Legendre rule on [-1, 1].
constexpr int kGaussN = 16;
constexpr double kGaussX[kGaussN] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGaussW[kGaussN] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

// Composite Gauss quadrature with panel doubling until two passes agree.
template <typename F>
double integrate_real(F&& f, double lo, double hi, double tol, int max_panels, double& err) {
  double prev = 0;
  bool have_prev = false;
  for (int panels = 4; panels <= max_panels; panels *= 2) {
    double sum = 0;
    const double h = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * h;
      double local = 0;
      for (int q = 0; q < kGaussN; ++q) local += kGaussW[q] * f(mid + 0.5 * h * kGaussX[q]);
      sum += local;
    }
    sum *= 0.5 * h;
    if (have_prev) {
      err = std::abs(sum - prev);
      if (err <= tol * std::max(1.0, std::abs(sum))) return sum;
    }
    prev = sum;
    have_prev = true;
  }
  err = std::abs(prev);
  throw QuadratureError("gap-moment quadrature did not converge", err);
}

// The f-weighted mean of u over the gap (b, c); the sin^2 substitution
// removes the endpoint singularities and the remaining weight is
// 2 / sqrt((u-a)(d-u)).
double gap_moment(double a, double b, double c, double d) {
  auto u_of = [&](double t) {
    const double s2 = std::sin(t) * std::sin(t);
    return b + (c - b) * s2;
  };
  auto weight = [&](double t) {
    const double u = u_of(t);
    return 2.0 / std::sqrt((u - a) * (d - u));
  };
  auto weighted_u = [&](double t) { return u_of(t) * weight(t); };
  double err = 0;
  const double denom = integrate_real(weight, 0.0, kHalfPi, 1e-13, 1 << 16, err);
  const double numer = integrate_real(weighted_u, 0.0, kHalfPi, 1e-13, 1 << 16, err);
  return numer / denom;
}

// Square roots of (u - p_k) continued along an integration path: principal
// branch at the first sample, then whichever sign stays closer to the
// previous value.
struct BranchTracker {
  std::array<double, 4> points;
  std::array<Complex, 4> prev;
  bool started = false;

  Complex f(Complex u) {
    Complex prod{1, 0};
    for (int k = 0; k < 4; ++k) {
      Complex c = std::sqrt(u - points[k]);
      if (started && std::abs(c - prev[k]) > std::abs(c + prev[k])) c = -c;
      prev[k] = c;
      prod *= c;
    }
    started = true;
    return Complex{1, 0} / prod;
  }
};

double two_interval_green(double a, double b, double c, double d, double s, Complex z,
                          const TwoIntervalOptions& opts) {
  if (z.imag() == 0 && ((z.real() >= a && z.real() <= b) || (z.real() >= c && z.real() <= d))) {
    throw std::invalid_argument("z lies on the spectral set");
  }
  // g(conj z) = g(z): work in the closed upper half-plane.
  if (z.imag() < 0) z = std::conj(z);

  const double height =
      opts.path_height > 0 ? opts.path_height : std::max(0.5 * (d - a), 0.25 * (b - a));
  const double xz = z.real();
  const double yz = z.imag();
  const double tmax = std::sqrt(height);

  // Piecewise path: a -> a + i height (with u = a + i t^2 so the endpoint
  // singularity integrates cleanly), across at fixed height, then straight
  // down (or up) to z. The last leg only touches the real axis at z itself.
  double prev_g = 0;
  bool have_prev = false;
  double err = std::abs(prev_g);
  for (int panels = 8; panels <= opts.max_panels; panels *= 2) {
    BranchTracker tracker{{a, b, c, d}, {}, false};
    Complex total{0, 0};

    auto add_leg = [&](auto&& u_of, auto&& du_of, double lo, double hi) {
      const double h = (hi - lo) / panels;
      Complex sum{0, 0};
      for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * h;
        for (int q = 0; q < kGaussN; ++q) {
          const double t = mid + 0.5 * h * kGaussX[q];
          const Complex u = u_of(t);
          sum += kGaussW[q] * tracker.f(u) * (Complex{s, 0} - u) * du_of(t);
        }
      }
      total += 0.5 * h * sum;
    };

    add_leg([&](double t) { return Complex{a, 0} + Complex{0, 1} * t * t; },
            [&](double t) { return Complex{0, 2.0 * t}; }, 0.0, tmax);
    if (xz != a) {
      add_leg([&](double t) { return Complex{t, height}; },
              [&](double) { return Complex{1, 0}; }, a, xz);
    }
    if (yz != height) {
      add_leg([&](double t) { return Complex{xz, t}; }, [&](double) { return Complex{0, 1}; },
              height, yz);
    }

    const double g = -total.real();
    if (have_prev) {
      err = std::abs(g - prev_g);
      if (err <= opts.abs_tol * std::max(1.0, std::abs(g))) return std::max(g, 0.0);
    }
    prev_g = g;
    have_prev = true;
  }
  throw QuadratureError("two-interval path quadrature did not converge", err);
}

}  // namespace

double green_single_interval(double a, double b, Complex z) {
  if (!(a < b)) throw std::invalid_argument("interval endpoints must satisfy a < b");
  const Complex w = (2.0 * z - (a + b)) / (b - a);
  Complex root = std::sqrt(w * w - Complex{1, 0});
  const double arg = std::arg(w);
  if (!(arg > -kHalfPi && arg <= kHalfPi)) root = -root;
  const double g = std::log(std::abs(w + root));
  return std::max(g, 0.0);
}

double green_two_intervals(double a, double b, double c, double d, Complex z,
                           const TwoIntervalOptions& opts) {
  if (!(a < b && b < c && c < d)) {
    throw std::invalid_argument("two-interval set requires a < b < c < d");
  }
  return two_interval_green(a, b, c, d, gap_moment(a, b, c, d), z, opts);
}

SpectralSet::SpectralSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  if (intervals_.empty()) throw std::invalid_argument("spectral set must be nonempty");
  std::sort(intervals_.begin(), intervals_.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  for (std::size_t k = 0; k < intervals_.size(); ++k) {
    if (!(intervals_[k].lo < intervals_[k].hi)) {
      throw std::invalid_argument("spectral set intervals must be non-degenerate");
    }
    if (k > 0 && !(intervals_[k - 1].hi < intervals_[k].lo)) {
      throw std::invalid_argument("spectral set intervals must be disjoint");
    }
  }
  if (intervals_.size() == 2) {
    two_interval_center_ = gap_moment(intervals_[0].lo, intervals_[0].hi, intervals_[1].lo,
                                      intervals_[1].hi);
  }
}

double SpectralSet::distance_to(Complex z) const {
  double dist = std::numeric_limits<double>::infinity();
  for (const Interval& iv : intervals_) {
    const double x = std::clamp(z.real(), iv.lo, iv.hi);
    dist = std::min(dist, std::abs(z - Complex{x, 0}));
  }
  return dist;
}

bool SpectralSet::contains(double x) const {
  for (const Interval& iv : intervals_) {
    if (x >= iv.lo && x <= iv.hi) return true;
  }
  return false;
}

double SpectralSet::green(Complex z) const {
  if (intervals_.size() == 1) return green_single_interval(intervals_[0].lo, intervals_[0].hi, z);
  if (intervals_.size() == 2) {
    return two_interval_green(intervals_[0].lo, intervals_[0].hi, intervals_[1].lo,
                              intervals_[1].hi, two_interval_center_, z, {});
  }
  throw std::invalid_argument("decay rates are implemented for at most two intervals");
}

DecayFit fit_decay_rate(std::span<const DecaySample> samples, double floor) {
  // Bin by distance, keeping the largest magnitude per bin.
  std::vector<std::pair<int, double>> bins;
  for (const DecaySample& s : samples) {
    auto it = std::find_if(bins.begin(), bins.end(),
                           [&](const auto& p) { return p.first == s.distance; });
    if (it == bins.end()) {
      bins.push_back({s.distance, s.magnitude});
    } else {
      it->second = std::max(it->second, s.magnitude);
    }
  }
  std::erase_if(bins, [&](const auto& p) { return !(p.second >= floor); });
  if (bins.size() < 5) {
    throw InsufficientDataError("decay fit needs at least 5 distance bins above the floor, got " +
                                std::to_string(bins.size()));
  }
  std::sort(bins.begin(), bins.end());

  const double n = static_cast<double>(bins.size());
  double kbar = 0, ybar = 0;
  for (const auto& [k, m] : bins) {
    kbar += k;
    ybar += std::log(m);
  }
  kbar /= n;
  ybar /= n;
  double num = 0, den = 0;
  for (const auto& [k, m] : bins) {
    num += (k - kbar) * (std::log(m) - ybar);
    den += (k - kbar) * (k - kbar);
  }
  const double slope = num / den;

  DecayFit fit;
  fit.rate = std::max(0.0, -slope);
  fit.intercept = ybar - slope * kbar;
  double rss = 0;
  for (const auto& [k, m] : bins) {
    const double r = std::log(m) - (fit.intercept + slope * k);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  fit.bins_used = static_cast<int>(bins.size());
  fit.min_distance = bins.front().first;
  fit.max_distance = bins.back().first;
  return fit;
}

std::vector<double> predicted_bounds(const SparseSymmetric& a, const SpectralSet& set, Complex z,
                                     DecayMode mode, const FillPattern& pattern) {
  if (set.distance_to(z) == 0.0) throw std::invalid_argument("z lies on the spectral set");
  const double rate = set.green(z);
  std::vector<double> bound(pattern.nnz(), 0.0);
  if (mode == DecayMode::factor) {
    for (Index s = 0; s < pattern.nnz(); ++s) bound[s] = std::exp(-rate * pattern.level_at(s));
    return bound;
  }
  auto g = AdjacencyGraph::build(a);
  for (Index j = 0; j < pattern.size(); ++j) {
    if (pattern.column_begin(j) == pattern.column_end(j)) continue;
    auto dist = graph_distances_from(g, j);
    for (Index s = pattern.column_begin(j); s < pattern.column_end(j); ++s) {
      const int dij = dist[pattern.row_at(s)];
      bound[s] = dij < 0 ? 0.0 : std::exp(-rate * dij);
    }
  }
  return bound;
}

std::vector<DecaySample> factor_decay_samples(const LdltFactors& f) {
  const FillPattern& p = f.pattern();
  std::vector<DecaySample> samples;
  samples.reserve(p.nnz());
  for (Index j = 0; j < p.size(); ++j) {
    for (Index s = p.column_begin(j) + 1; s < p.column_end(j); ++s) {
      samples.push_back({static_cast<int>(p.level_at(s)), std::abs(f.lower_at_slot(s))});
    }
  }
  return samples;
}

}  // namespace iselinv
