#include "iselinv/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <map>
#include <utility>

namespace iselinv {

namespace {

void check_index(Index i, Index n) {
  if (i < 0 || i >= n) {
    throw std::out_of_range("index " + display_index(i) + " outside 1.." + std::to_string(n));
  }
}

}  // namespace

SparseSymmetric SparseSymmetric::from_columns(Index n, std::vector<Index> col_ptr,
                                              std::vector<Index> rows,
                                              std::vector<Complex> vals) {
  SparseSymmetric a;
  a.n_ = n;
  a.col_ptr_ = std::move(col_ptr);
  a.rows_ = std::move(rows);
  a.vals_ = std::move(vals);
  return a;
}

SparseSymmetric build_from_triplets(Index n, std::span<const Triplet> entries) {
  if (n < 0) throw std::invalid_argument("negative matrix size");

  // Accumulate per canonical (lower-triangle) position, separately for the
  // two orientations so mirrored inputs can be cross-checked.
  struct Acc {
    Complex lower{0, 0};
    Complex upper{0, 0};
    bool seen_lower = false;
    bool seen_upper = false;
  };
  std::map<std::pair<Index, Index>, Acc> acc;
  for (const Triplet& t : entries) {
    check_index(t.row, n);
    check_index(t.col, n);
    const bool lower = t.row >= t.col;
    auto key = lower ? std::make_pair(t.col, t.row) : std::make_pair(t.row, t.col);
    Acc& a = acc[key];
    if (lower) {
      a.lower += t.value;
      a.seen_lower = true;
    } else {
      a.upper += t.value;
      a.seen_upper = true;
    }
  }

  std::vector<Index> counts(n, 0);
  std::vector<std::pair<std::pair<Index, Index>, Complex>> kept;
  kept.reserve(acc.size());
  for (const auto& [key, a] : acc) {
    Complex v;
    if (a.seen_lower && a.seen_upper) {
      if (std::abs(a.lower - a.upper) > 0.0) {
        throw std::invalid_argument("asymmetric duplicate at (" + display_index(key.second) +
                                    ", " + display_index(key.first) + ")");
      }
      v = a.lower;
    } else {
      v = a.seen_lower ? a.lower : a.upper;
    }
    if (std::abs(v) == 0.0) continue;
    kept.push_back({key, v});
    ++counts[key.first];
  }

  std::vector<Index> col_ptr(n + 1, 0);
  for (Index j = 0; j < n; ++j) col_ptr[j + 1] = col_ptr[j] + counts[j];
  std::vector<Index> rows(kept.size());
  std::vector<Complex> vals(kept.size());
  std::vector<Index> cursor(col_ptr.begin(), col_ptr.end() - 1);
  // std::map iterates keys in (col, row) order, so columns come out sorted.
  for (const auto& [key, v] : kept) {
    Index slot = cursor[key.first]++;
    rows[slot] = key.second;
    vals[slot] = v;
  }
  return SparseSymmetric::from_columns(n, std::move(col_ptr), std::move(rows), std::move(vals));
}

Complex SparseSymmetric::entry(Index i, Index j) const {
  check_index(i, n_);
  check_index(j, n_);
  if (i < j) std::swap(i, j);
  auto rr = column_rows(j);
  auto it = std::lower_bound(rr.begin(), rr.end(), i);
  if (it == rr.end() || *it != i) return {0, 0};
  return vals_[col_ptr_[j] + (it - rr.begin())];
}

bool SparseSymmetric::contains(Index i, Index j) const {
  if (i < j) std::swap(i, j);
  auto rr = column_rows(j);
  return std::binary_search(rr.begin(), rr.end(), i);
}

std::vector<Complex> SparseSymmetric::multiply(std::span<const Complex> x) const {
  if (static_cast<Index>(x.size()) != n_) throw std::invalid_argument("dimension mismatch");
  std::vector<Complex> y(n_, Complex{0, 0});
  for (Index j = 0; j < n_; ++j) {
    for (Index s = col_ptr_[j]; s < col_ptr_[j + 1]; ++s) {
      const Index i = rows_[s];
      const Complex v = vals_[s];
      y[i] += v * x[j];
      if (i != j) y[j] += v * x[i];
    }
  }
  return y;
}

double SparseSymmetric::max_abs() const {
  double m = 0;
  for (const Complex& v : vals_) m = std::max(m, std::abs(v));
  return m;
}

bool SparseSymmetric::is_real(double tol) const {
  for (const Complex& v : vals_) {
    if (std::abs(v.imag()) > tol) return false;
  }
  return true;
}

std::vector<SparseSymmetric::Entry> SparseSymmetric::lower_entries() const {
  std::vector<Entry> out;
  out.reserve(rows_.size());
  for (Index j = 0; j < n_; ++j) {
    for (Index s = col_ptr_[j]; s < col_ptr_[j + 1]; ++s) {
      out.push_back({rows_[s], j, vals_[s]});
    }
  }
  return out;
}

AdjacencyGraph AdjacencyGraph::build(const SparseSymmetric& a) {
  const Index n = a.size();
  AdjacencyGraph g;
  g.ptr.assign(n + 1, 0);
  for (Index j = 0; j < n; ++j) {
    for (Index i : a.column_rows(j)) {
      if (i == j) continue;
      ++g.ptr[i + 1];
      ++g.ptr[j + 1];
    }
  }
  for (Index v = 0; v < n; ++v) g.ptr[v + 1] += g.ptr[v];
  g.nbr.resize(g.ptr[n]);
  std::vector<Index> cursor(g.ptr.begin(), g.ptr.end() - 1);
  for (Index j = 0; j < n; ++j) {
    for (Index i : a.column_rows(j)) {
      if (i == j) continue;
      g.nbr[cursor[i]++] = j;
      g.nbr[cursor[j]++] = i;
    }
  }
  for (Index v = 0; v < n; ++v) {
    std::sort(g.nbr.begin() + g.ptr[v], g.nbr.begin() + g.ptr[v + 1]);
  }
  return g;
}

Index MeshSpec::vertex_count() const {
  Index n = 1;
  for (int k = 0; k < dim; ++k) n *= m;
  return n;
}

void MeshSpec::validate() const {
  if (dim < 1 || dim > 3) throw std::invalid_argument("mesh dimension must be 1, 2 or 3");
  if (m < 2) throw std::invalid_argument("mesh side must be at least 2");
}

Index MeshSpec::index_of(std::span<const Index> coords) const {
  Index v = 0;
  for (int k = 0; k < dim; ++k) v = v * m + coords[k];
  return v;
}

std::array<Index, 3> MeshSpec::coords_of(Index v) const {
  std::array<Index, 3> c{0, 0, 0};
  for (int k = dim - 1; k >= 0; --k) {
    c[k] = v % m;
    v /= m;
  }
  return c;
}

SparseSymmetric toy_hamiltonian(const MeshSpec& spec) {
  spec.validate();
  if (!spec.periodic) throw std::invalid_argument("toy Hamiltonian requires a periodic mesh");
  if (spec.m % 2 != 0) {
    throw std::invalid_argument(
        "toy Hamiltonian requires even mesh side: the alternating diagonal is "
        "inconsistent across the periodic wrap for odd m");
  }
  const Index n = spec.vertex_count();
  const double hop = -1.0 / (2.0 * spec.dim);
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(n) * (spec.dim + 1));
  for (Index v = 0; v < n; ++v) {
    auto c = spec.coords_of(v);
    // Coordinate-sum parity equals the graph-distance parity to vertex 1
    // because m is even, so min(x, m-x) = x (mod 2) on every axis.
    Index parity = 0;
    for (int k = 0; k < spec.dim; ++k) parity += c[k];
    trip.push_back({v, v, Complex{(parity % 2 == 0) ? 1.0 : -1.0, 0.0}});
    for (int k = 0; k < spec.dim; ++k) {
      std::array<Index, 2> steps = {static_cast<Index>((c[k] + 1) % spec.m),
                                    static_cast<Index>((c[k] + spec.m - 1) % spec.m)};
      Index prev = -1;
      for (Index x : steps) {
        if (x == prev) continue;  // m = 2: both directions reach the same vertex
        prev = x;
        auto cc = c;
        cc[k] = x;
        Index w = spec.index_of(std::span<const Index>(cc.data(), spec.dim));
        if (w > v) trip.push_back({w, v, Complex{hop, 0.0}});
      }
    }
  }
  return build_from_triplets(n, trip);
}

SparseSymmetric shift(const SparseSymmetric& a, Complex z) {
  std::vector<Triplet> trip;
  trip.reserve(a.nnz_lower() + a.size());
  for (const auto& e : a.lower_entries()) trip.push_back({e.row, e.col, e.value});
  for (Index j = 0; j < a.size(); ++j) trip.push_back({j, j, -z});
  return build_from_triplets(a.size(), trip);
}

std::vector<int> graph_distances_from(const AdjacencyGraph& g, Index source) {
  std::vector<int> dist(g.size(), -1);
  std::deque<Index> queue;
  dist[source] = 0;
  queue.push_back(source);
  while (!queue.empty()) {
    Index v = queue.front();
    queue.pop_front();
    for (Index w : g.neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

std::optional<int> graph_distance(const SparseSymmetric& a, Index i, Index j) {
  check_index(i, a.size());
  check_index(j, a.size());
  if (i == j) return 0;
  auto g = AdjacencyGraph::build(a);
  auto dist = graph_distances_from(g, i);
  if (dist[j] < 0) return std::nullopt;
  return dist[j];
}

}  // namespace iselinv
