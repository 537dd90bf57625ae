#include "iselinv/symbolic.hpp"

#include <algorithm>
#include <deque>

namespace iselinv {

namespace {

constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();

std::uint16_t saturate16(std::uint32_t v) {
  return static_cast<std::uint16_t>(std::min<std::uint32_t>(v, kLevelUnset - 1));
}

}  // namespace

FillPattern FillPattern::from_columns(Index n, std::uint32_t cutoff, std::vector<Index> col_ptr,
                                      std::vector<Index> rows,
                                      std::vector<std::uint16_t> levels) {
  FillPattern p;
  p.n_ = n;
  p.cutoff_ = cutoff;
  p.col_ptr_ = std::move(col_ptr);
  p.rows_ = std::move(rows);
  p.levels_ = std::move(levels);
  p.build_row_refs();
  return p;
}

void FillPattern::build_row_refs() {
  row_ptr_.assign(n_ + 1, 0);
  for (Index j = 0; j < n_; ++j) {
    for (Index s = col_ptr_[j]; s < col_ptr_[j + 1]; ++s) {
      if (rows_[s] != j) ++row_ptr_[rows_[s] + 1];
    }
  }
  for (Index i = 0; i < n_; ++i) row_ptr_[i + 1] += row_ptr_[i];
  row_refs_.resize(row_ptr_[n_]);
  std::vector<Index> cursor(row_ptr_.begin(), row_ptr_.end() - 1);
  for (Index j = 0; j < n_; ++j) {
    for (Index s = col_ptr_[j]; s < col_ptr_[j + 1]; ++s) {
      const Index i = rows_[s];
      if (i != j) row_refs_[cursor[i]++] = {j, s};
    }
  }
  // Columns are visited in ascending order, so each row list is sorted.
}

bool FillPattern::contains(Index i, Index j) const { return slot_of(i, j) >= 0; }

Index FillPattern::slot_of(Index i, Index j) const {
  if (i < j) std::swap(i, j);
  auto rr = column_rows(j);
  auto it = std::lower_bound(rr.begin(), rr.end(), i);
  if (it == rr.end() || *it != i) return -1;
  return col_ptr_[j] + static_cast<Index>(it - rr.begin());
}

std::optional<int> FillPattern::level_of(Index i, Index j) const {
  Index s = slot_of(i, j);
  if (s < 0) return std::nullopt;
  return static_cast<int>(levels_[s]);
}

FillPattern symbolic_levels(const SparseSymmetric& a, std::uint32_t cutoff) {
  const Index n = a.size();
  std::vector<std::vector<Index>> col_rows(n);
  std::vector<std::vector<std::uint16_t>> col_levels(n);
  // Row links into already-finished columns: (column k, slot of this row in
  // column k's local storage).
  std::vector<std::vector<std::pair<Index, Index>>> row_links(n);

  std::vector<std::uint32_t> lev(n, kInf);
  std::vector<Index> touched;

  for (Index j = 0; j < n; ++j) {
    touched.clear();
    lev[j] = 0;
    touched.push_back(j);
    for (Index i : a.column_rows(j)) {
      if (lev[i] == kInf) touched.push_back(i);
      lev[i] = 0;
    }

    for (const auto& [k, slot] : row_links[j]) {
      const std::uint32_t lev_jk = col_levels[k][slot];
      const auto& rk = col_rows[k];
      const auto& lk = col_levels[k];
      for (Index s = slot + 1; s < static_cast<Index>(rk.size()); ++s) {
        const Index i = rk[s];
        const std::uint32_t cand = static_cast<std::uint32_t>(lk[s]) + lev_jk + 1;
        if (cand > cutoff) continue;
        if (cand < lev[i]) {
          if (lev[i] == kInf) touched.push_back(i);
          lev[i] = cand;
        }
      }
    }

    std::sort(touched.begin(), touched.end());
    auto& rows = col_rows[j];
    auto& levels = col_levels[j];
    rows.reserve(touched.size());
    for (Index i : touched) {
      rows.push_back(i);
      levels.push_back(saturate16(lev[i]));
      lev[i] = kInf;
    }
    for (Index s = 1; s < static_cast<Index>(rows.size()); ++s) {
      row_links[rows[s]].push_back({j, s});
    }
  }

  std::vector<Index> col_ptr(n + 1, 0);
  for (Index j = 0; j < n; ++j) col_ptr[j + 1] = col_ptr[j] + static_cast<Index>(col_rows[j].size());
  std::vector<Index> rows(col_ptr[n]);
  std::vector<std::uint16_t> levels(col_ptr[n]);
  for (Index j = 0; j < n; ++j) {
    std::copy(col_rows[j].begin(), col_rows[j].end(), rows.begin() + col_ptr[j]);
    std::copy(col_levels[j].begin(), col_levels[j].end(), levels.begin() + col_ptr[j]);
  }
  return FillPattern::from_columns(n, cutoff, std::move(col_ptr), std::move(rows),
                                   std::move(levels));
}

FillPattern fill_pattern_exact(const SparseSymmetric& a) {
  return symbolic_levels(a, kExactFill);
}

std::optional<int> fill_path_oracle(const SparseSymmetric& a, Index i, Index j) {
  if (a.size() > 64) {
    throw std::invalid_argument("fill_path_oracle is limited to n <= 64");
  }
  if (i < 0 || i >= a.size() || j < 0 || j >= a.size()) {
    throw std::out_of_range("vertex outside 1.." + std::to_string(a.size()));
  }
  if (i == j) return 0;
  auto g = AdjacencyGraph::build(a);
  const Index bound = std::min(i, j);
  std::vector<int> dist(a.size(), -1);
  std::deque<Index> queue;
  dist[i] = 0;
  queue.push_back(i);
  while (!queue.empty()) {
    Index v = queue.front();
    queue.pop_front();
    for (Index w : g.neighbors(v)) {
      if (dist[w] >= 0) continue;
      if (w == j) return dist[v];  // path length dist[v]+1, level = length - 1
      if (w < bound) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return std::nullopt;
}

}  // namespace iselinv
