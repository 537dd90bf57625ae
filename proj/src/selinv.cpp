#include "iselinv/selinv.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace iselinv {

namespace {

constexpr std::size_t kMaxViolationSamples = 32;

struct SelinvEngineResult {
  std::vector<Complex> values;
  KernelStats stats;
  std::map<std::pair<Index, Index>, Complex> dropped;  // canonical (hi, lo) keys
  ClosednessReport report;
};

// Right-to-left sweep over the factor pattern. Column j gathers the already
// computed block B(r,r) for r = pattern rows below j, applies it to the
// factor column and writes B(r,j) and B(j,j). On truncated patterns the
// gather may reference pairs outside the pattern; those read as zero.
SelinvEngineResult selinv_engine(const LdltFactors& f, bool track_dropped, bool audit) {
  const FillPattern& p = f.pattern();
  const Index n = p.size();
  SelinvEngineResult r;
  r.values.assign(p.nnz(), Complex{0, 0});

  std::vector<Index> pos(n, -1);
  std::vector<Complex> bsub;  // s x s gather buffer, column-major
  std::vector<Complex> y;

  for (Index j = n - 1; j >= 0; --j) {
    const Index p0 = p.column_begin(j);
    const Index p1 = p.column_end(j);
    const Index s = p1 - p0 - 1;
    if (s == 0) {
      r.values[p0] = Complex{1, 0} / f.d(j);
      continue;
    }
    const Index* rows = p.column_rows(j).data() + 1;
    for (Index b = 0; b < s; ++b) pos[rows[b]] = b;

    bsub.assign(static_cast<std::size_t>(s) * s, Complex{0, 0});
    std::uint64_t found_pairs = 0;
    for (Index b = 0; b < s; ++b) {
      const Index k = rows[b];
      for (Index t = p.column_begin(k); t < p.column_end(k); ++t) {
        const Index i = p.row_at(t);
        const Index a = pos[i];
        if (a < 0) continue;
        const Complex v = r.values[t];
        bsub[static_cast<std::size_t>(b) * s + a] = v;
        bsub[static_cast<std::size_t>(a) * s + b] = v;
        if (i != k) ++found_pairs;
      }
    }
    if (audit) {
      const std::uint64_t required = static_cast<std::uint64_t>(s) * (s - 1) / 2;
      r.report.required_pair_reads += required;
      const std::uint64_t absent = required - found_pairs;
      r.report.absent_pair_reads += absent;
      if (absent > 0 && r.report.violations.size() < kMaxViolationSamples) {
        for (Index b = 0; b < s && r.report.violations.size() < kMaxViolationSamples; ++b) {
          for (Index a = b + 1; a < s; ++a) {
            if (!p.contains(rows[a], rows[b])) {
              r.report.violations.push_back({rows[a], rows[b], j});
              if (r.report.violations.size() >= kMaxViolationSamples) break;
            }
          }
        }
      }
    }

    // B(r,j) = -B(r,r) L(r,j) and the diagonal via the same products.
    y.assign(s, Complex{0, 0});
    for (Index b = 0; b < s; ++b) {
      const Complex lkj = f.lower_at_slot(p0 + 1 + b);
      if (lkj == Complex{0, 0}) {
        r.stats.fma_count += static_cast<std::uint64_t>(s);
        continue;
      }
      const Complex* col = &bsub[static_cast<std::size_t>(b) * s];
      for (Index a = 0; a < s; ++a) y[a] += col[a] * lkj;
      r.stats.fma_count += static_cast<std::uint64_t>(s);
    }
    Complex diag = Complex{1, 0} / f.d(j);
    for (Index a = 0; a < s; ++a) {
      r.values[p0 + 1 + a] = -y[a];
      diag += y[a] * f.lower_at_slot(p0 + 1 + a);
      ++r.stats.fma_count;
    }
    r.values[p0] = diag;

    if (track_dropped) {
      // Products that land outside the pattern column: contributions
      // B(i,k) L(k,j) for exactly one of i,k in the pattern column.
      for (Index b = 0; b < s; ++b) {
        const Index k = rows[b];
        const Complex lkj = f.lower_at_slot(p0 + 1 + b);
        if (lkj == Complex{0, 0}) continue;
        for (Index t = p.column_begin(k) + 1; t < p.column_end(k); ++t) {
          const Index i = p.row_at(t);
          if (pos[i] >= 0) continue;
          r.dropped[{i, j}] += r.values[t] * lkj;
          ++r.stats.fma_count;
        }
        // Pairs stored as (k, k') with k' between j and k outside the
        // pattern column, reached through the row links of k.
        auto refs = p.row_refs(k);
        auto it = std::upper_bound(refs.begin(), refs.end(), j,
                                   [](Index lhs, const FillPattern::RowRef& ref) {
                                     return lhs < ref.column;
                                   });
        for (; it != refs.end(); ++it) {
          if (pos[it->column] >= 0) continue;
          r.dropped[{it->column, j}] += r.values[it->slot] * lkj;
          ++r.stats.fma_count;
        }
      }
      // Diagonal correction line, applied after the off-diagonal drops of
      // this column using the dropped values accumulated so far.
      Complex fjj{0, 0};
      for (Index b = 0; b < s; ++b) {
        auto it = r.dropped.find({rows[b], j});
        if (it != r.dropped.end()) {
          fjj += it->second * f.lower_at_slot(p0 + 1 + b);
          ++r.stats.fma_count;
        }
      }
      if (fjj != Complex{0, 0}) r.dropped[{j, j}] += fjj;
    }

    for (Index b = 0; b < s; ++b) pos[rows[b]] = -1;
  }
  return r;
}

SparseSymmetric dropped_to_matrix(Index n,
                                  const std::map<std::pair<Index, Index>, Complex>& dropped) {
  std::vector<Triplet> trip;
  trip.reserve(dropped.size());
  for (const auto& [key, v] : dropped) trip.push_back({key.first, key.second, v});
  return build_from_triplets(n, trip);
}

}  // namespace

Complex SelectedInverse::entry(Index i, Index j) const {
  Index s = pattern_->slot_of(i, j);
  return s < 0 ? Complex{0, 0} : values_[s];
}

SelectedInverse selinv_exact(const LdltFactors& f) {
  if (f.pattern().cutoff() != kExactFill) {
    throw std::invalid_argument("exact selected inversion requires factors on an untruncated pattern");
  }
  SelinvEngineResult r = selinv_engine(f, false, false);
  return SelectedInverse(f.pattern_ptr(), std::move(r.values), false, r.stats);
}

IncompleteSelinv selinv_incomplete(const LdltFactors& f, TrackDropped track) {
  SelinvEngineResult r = selinv_engine(f, track == TrackDropped::yes, false);
  IncompleteSelinv out;
  const bool incomplete = f.pattern().cutoff() != kExactFill;
  out.inverse = SelectedInverse(f.pattern_ptr(), std::move(r.values), incomplete, r.stats);
  if (track == TrackDropped::yes) {
    out.dropped =
        DroppedInverseEntries{dropped_to_matrix(f.size(), r.dropped), f.pattern().cutoff()};
  }
  return out;
}

ClosednessReport closedness_audit(const LdltFactors& f) {
  return selinv_engine(f, false, true).report;
}

std::vector<double> aposteriori_selinv_bound(const DroppedInverseEntries& dropped,
                                             const FillPattern& truncated,
                                             const FillPattern& levels, double rate) {
  if (levels.size() != truncated.size() || dropped.matrix.size() != truncated.size()) {
    throw std::invalid_argument("dimension mismatch");
  }
  if (dropped.source_cutoff != kValueDrivenPattern && levels.cutoff() != kExactFill &&
      levels.cutoff() < 2 * dropped.source_cutoff + 1) {
    throw std::invalid_argument(
        "level pattern cut-off does not cover the dropped support (need at least 2c+1)");
  }

  const auto entries = dropped.matrix.lower_entries();
  auto level_factor = [&](Index x, Index y) -> double {
    if (x == y) return 1.0;
    auto l = levels.level_of(x, y);
    return l ? std::exp(-rate * *l) : 0.0;
  };

  std::vector<double> bound;
  bound.reserve(truncated.nnz());
  for (Index j = 0; j < truncated.size(); ++j) {
    for (Index s = truncated.column_begin(j); s < truncated.column_end(j); ++s) {
      const Index i = truncated.row_at(s);
      double b = 0;
      for (const auto& t : entries) {
        const double mag = std::abs(t.value);
        // First-order term: drops in column j itself.
        if (t.row == i && t.col > j) b += level_factor(t.col, j) * mag;
        if (t.col == i && t.row > j && t.row != t.col) b += level_factor(t.row, j) * mag;
        // Propagated term over both orientations.
        if (t.row > j && t.col > j) {
          b += level_factor(i, t.row) * level_factor(t.col, j) * mag;
          if (t.row != t.col) b += level_factor(i, t.col) * level_factor(t.row, j) * mag;
        }
      }
      bound.push_back(b);
    }
  }
  return bound;
}

}  // namespace iselinv
