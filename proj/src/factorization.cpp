#include "iselinv/factorization.hpp"

#include <algorithm>
#include <cmath>

namespace iselinv {

namespace {

double pivot_floor(const SparseSymmetric& a) { return 1e-12 * a.max_abs(); }

struct EngineResult {
  std::vector<Complex> lower;
  std::vector<Complex> diag;
  KernelStats stats;
  std::vector<Triplet> dropped;   // strict-lower positions only
  std::uint64_t drop_count = 0;   // counted even when not materialized
};

// Left-looking column factorization over a fixed pattern with a dense scatter
// workspace. Updates from column k are applied to all pattern rows i >= j of
// column k; targets outside column j's pattern are the dropped entries.
EngineResult factor_engine(const SparseSymmetric& a, const FillPattern& p, bool track_dropped) {
  const Index n = a.size();
  EngineResult r;
  r.lower.assign(p.nnz(), Complex{0, 0});
  r.diag.assign(n, Complex{0, 0});
  const double floor = pivot_floor(a);

  std::vector<Index> pos(n, -1);
  std::vector<Complex> w(n, Complex{0, 0});

  for (Index j = 0; j < n; ++j) {
    const Index p0 = p.column_begin(j);
    const Index p1 = p.column_end(j);
    for (Index s = p0; s < p1; ++s) {
      pos[p.row_at(s)] = s;
      w[p.row_at(s)] = Complex{0, 0};
    }

    {
      auto rows = a.column_rows(j);
      auto vals = a.column_values(j);
      for (std::size_t t = 0; t < rows.size(); ++t) {
        if (pos[rows[t]] < 0) {
          throw std::invalid_argument("pattern does not contain stored entry (" +
                                      display_index(rows[t]) + ", " + display_index(j) + ")");
        }
        w[rows[t]] = vals[t];
      }
    }

    for (const auto& ref : p.row_refs(j)) {
      const Index k = ref.column;
      const Complex ljk = r.lower[ref.slot];
      const Complex coef = ljk * r.diag[k];
      const Index kend = p.column_end(k);
      // ref.slot is the row-j entry of column k, so the first target is the
      // diagonal update L(j,k)^2 D(k) and the rest are rows i > j.
      for (Index t = ref.slot; t < kend; ++t) {
        const Index i = p.row_at(t);
        const Complex upd = coef * r.lower[t];
        ++r.stats.fma_count;
        if (pos[i] >= 0) {
          w[i] -= upd;
        } else {
          ++r.drop_count;
          if (track_dropped) r.dropped.push_back({i, j, upd});
        }
      }
    }

    const Complex dj = w[j];
    if (std::abs(dj) < floor) throw PivotBreakdownError(j, std::abs(dj));
    r.diag[j] = dj;
    for (Index s = p0; s < p1; ++s) {
      const Index i = p.row_at(s);
      r.lower[s] = (i == j) ? Complex{0, 0} : w[i] / dj;
      pos[i] = -1;
    }
  }
  return r;
}

}  // namespace

Complex LdltFactors::lower_entry(Index i, Index j) const {
  if (i == j) return Complex{1, 0};
  if (i < j) std::swap(i, j);
  Index s = pattern_->slot_of(i, j);
  return s < 0 ? Complex{0, 0} : lower_[s];
}

LdltFactors ldlt_exact(const SparseSymmetric& a, std::shared_ptr<const FillPattern> pattern) {
  if (!pattern || pattern->size() != a.size()) {
    throw std::invalid_argument("pattern size does not match matrix");
  }
  if (pattern->cutoff() != kExactFill) {
    throw std::invalid_argument("exact factorization requires an untruncated pattern");
  }
  EngineResult r = factor_engine(a, *pattern, false);
  if (r.drop_count > 0) {
    throw std::invalid_argument("pattern does not cover the fill of this matrix");
  }
  return LdltFactors(std::move(pattern), std::move(r.lower), std::move(r.diag), r.stats);
}

IncompleteLdlt ldlt_incomplete(const SparseSymmetric& a,
                               std::shared_ptr<const FillPattern> pattern, TrackDropped track) {
  if (!pattern || pattern->size() != a.size()) {
    throw std::invalid_argument("pattern size does not match matrix");
  }
  const std::uint32_t cutoff = pattern->cutoff();
  EngineResult r = factor_engine(a, *pattern, track == TrackDropped::yes);
  IncompleteLdlt out;
  out.factors = LdltFactors(std::move(pattern), std::move(r.lower), std::move(r.diag), r.stats);
  if (track == TrackDropped::yes) {
    out.dropped = DroppedEntries{build_from_triplets(a.size(), r.dropped), cutoff};
  }
  return out;
}

IncompleteLdlt ldlt_incomplete_tol(const SparseSymmetric& a, double tol, TrackDropped track) {
  if (!(tol >= 0)) throw std::invalid_argument("drop tolerance must be nonnegative");
  const Index n = a.size();
  const double floor = pivot_floor(a);

  std::vector<std::vector<Index>> col_rows(n);
  std::vector<std::vector<Complex>> col_vals(n);
  std::vector<std::vector<std::pair<Index, Index>>> row_links(n);
  std::vector<Complex> diag(n, Complex{0, 0});
  std::vector<Triplet> dropped;
  KernelStats stats;

  std::vector<char> touched_mark(n, 0);
  std::vector<Complex> w(n, Complex{0, 0});
  std::vector<Index> touched;

  for (Index j = 0; j < n; ++j) {
    touched.clear();
    auto touch = [&](Index i) {
      if (!touched_mark[i]) {
        touched_mark[i] = 1;
        w[i] = Complex{0, 0};
        touched.push_back(i);
      }
    };
    touch(j);
    {
      auto rows = a.column_rows(j);
      auto vals = a.column_values(j);
      for (std::size_t t = 0; t < rows.size(); ++t) {
        touch(rows[t]);
        w[rows[t]] = vals[t];
      }
    }

    for (const auto& [k, slot] : row_links[j]) {
      const Complex ljk = col_vals[k][slot];
      const Complex coef = ljk * diag[k];
      w[j] -= coef * ljk;
      ++stats.fma_count;
      const auto& rk = col_rows[k];
      const auto& vk = col_vals[k];
      for (Index t = slot + 1; t < static_cast<Index>(rk.size()); ++t) {
        touch(rk[t]);
        w[rk[t]] -= coef * vk[t];
        ++stats.fma_count;
      }
    }

    const Complex dj = w[j];
    if (std::abs(dj) < floor) throw PivotBreakdownError(j, std::abs(dj));
    diag[j] = dj;

    std::sort(touched.begin(), touched.end());
    auto& rows = col_rows[j];
    auto& vals = col_vals[j];
    for (Index i : touched) {
      touched_mark[i] = 0;
      if (i == j) continue;
      const Complex lij = w[i] / dj;
      // Fill positions below the tolerance are dropped; the discarded
      // contribution -w[i] keeps L D L^T = A + E exact. Positions stored in
      // A are always kept.
      if (std::abs(lij) < tol && !a.contains(i, j)) {
        if (std::abs(w[i]) > 0.0 && track == TrackDropped::yes) {
          dropped.push_back({i, j, -w[i]});
        }
        continue;
      }
      if (lij == Complex{0, 0}) continue;
      rows.push_back(i);
      vals.push_back(lij);
    }
    for (Index s = 0; s < static_cast<Index>(rows.size()); ++s) {
      row_links[rows[s]].push_back({j, s});
    }
  }

  // Freeze the dynamic structure into a pattern (levels are value-driven
  // here, so they carry no meaning and are stored as zero).
  std::vector<Index> col_ptr(n + 1, 0);
  for (Index j = 0; j < n; ++j) {
    col_ptr[j + 1] = col_ptr[j] + static_cast<Index>(col_rows[j].size()) + 1;
  }
  std::vector<Index> prows(col_ptr[n]);
  std::vector<std::uint16_t> plevels(col_ptr[n], 0);
  std::vector<Complex> lower(col_ptr[n], Complex{0, 0});
  for (Index j = 0; j < n; ++j) {
    Index s = col_ptr[j];
    prows[s] = j;
    for (Index t = 0; t < static_cast<Index>(col_rows[j].size()); ++t) {
      prows[s + 1 + t] = col_rows[j][t];
      lower[s + 1 + t] = col_vals[j][t];
    }
  }
  auto pattern = std::make_shared<FillPattern>(FillPattern::from_columns(
      n, kValueDrivenPattern, std::move(col_ptr), std::move(prows), std::move(plevels)));

  IncompleteLdlt out;
  out.factors = LdltFactors(std::move(pattern), std::move(lower), std::move(diag), stats);
  if (track == TrackDropped::yes) {
    out.dropped = DroppedEntries{build_from_triplets(n, dropped), kValueDrivenPattern};
  }
  return out;
}

std::vector<double> aposteriori_inverse_bound(const DroppedEntries& dropped, double rate,
                                              double delta, const SparseSymmetric& a) {
  if (!(delta > 0)) throw std::invalid_argument("spectral distance delta must be positive");
  const SparseSymmetric& e = dropped.matrix;
  if (e.size() != a.size()) throw std::invalid_argument("dimension mismatch");

  // Gershgorin estimate of |E|_2 via symmetric row sums.
  std::vector<double> row_sum(a.size(), 0.0);
  auto entries = e.lower_entries();
  for (const auto& t : entries) {
    row_sum[t.row] += std::abs(t.value);
    if (t.row != t.col) row_sum[t.col] += std::abs(t.value);
  }
  double e_norm = 0;
  for (double s : row_sum) e_norm = std::max(e_norm, s);
  if (e_norm >= delta) {
    throw HypothesisViolatedError("estimated |E|_2 = " + std::to_string(e_norm) +
                                  " reaches the spectral distance " + std::to_string(delta));
  }
  const double tail = (e_norm == 0) ? 0.0 : e_norm * e_norm / (delta * delta * (delta - e_norm));

  auto g = AdjacencyGraph::build(a);
  std::vector<Index> verts;
  for (const auto& t : entries) {
    verts.push_back(t.row);
    verts.push_back(t.col);
  }
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  std::vector<std::vector<int>> dist;
  std::vector<Index> vert_slot(a.size(), -1);
  dist.reserve(verts.size());
  for (std::size_t s = 0; s < verts.size(); ++s) {
    vert_slot[verts[s]] = static_cast<Index>(s);
    dist.push_back(graph_distances_from(g, verts[s]));
  }
  auto attenuation = [&](Index from, Index to) -> double {
    const int d = dist[vert_slot[from]][to];
    return d < 0 ? 0.0 : std::exp(-rate * d);
  };

  std::vector<double> bound;
  bound.reserve(a.nnz_lower());
  for (const auto& pos : a.lower_entries()) {
    double b = tail;
    for (const auto& t : entries) {
      const double mag = std::abs(t.value);
      b += attenuation(t.row, pos.row) * attenuation(t.col, pos.col) * mag;
      if (t.row != t.col) b += attenuation(t.col, pos.row) * attenuation(t.row, pos.col) * mag;
    }
    bound.push_back(b);
  }
  return bound;
}

std::vector<Complex> solve_with_factors(const LdltFactors& f, std::span<const Complex> rhs) {
  const Index n = f.size();
  if (static_cast<Index>(rhs.size()) != n) throw std::invalid_argument("dimension mismatch");
  const FillPattern& p = f.pattern();
  std::vector<Complex> x(rhs.begin(), rhs.end());
  for (Index j = 0; j < n; ++j) {
    const Complex xj = x[j];
    for (Index s = p.column_begin(j) + 1; s < p.column_end(j); ++s) {
      x[p.row_at(s)] -= f.lower_at_slot(s) * xj;
    }
  }
  for (Index j = 0; j < n; ++j) x[j] /= f.d(j);
  for (Index j = n - 1; j >= 0; --j) {
    Complex acc = x[j];
    for (Index s = p.column_begin(j) + 1; s < p.column_end(j); ++s) {
      acc -= f.lower_at_slot(s) * x[p.row_at(s)];
    }
    x[j] = acc;
  }
  return x;
}

}  // namespace iselinv
