#include "iselinv/ordering.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace iselinv {

Permutation Permutation::identity(Index n) {
  std::vector<Index> f(n);
  std::iota(f.begin(), f.end(), Index{0});
  return from_forward(std::move(f));
}

Permutation Permutation::from_forward(std::vector<Index> forward) {
  Permutation p;
  const Index n = static_cast<Index>(forward.size());
  p.fwd_ = std::move(forward);
  p.inv_.assign(n, -1);
  for (Index i = 0; i < n; ++i) {
    Index t = p.fwd_[i];
    if (t < 0 || t >= n || p.inv_[t] != -1) {
      throw std::invalid_argument("forward map is not a bijection at position " +
                                  display_index(i));
    }
    p.inv_[t] = i;
  }
  return p;
}

Permutation Permutation::inverted() const {
  Permutation p;
  p.fwd_ = inv_;
  p.inv_ = fwd_;
  return p;
}

namespace {

// Sub-box of the mesh: per axis either a linear interval [lo, hi] or a full
// periodic cycle (lo = 0, hi = m-1, cyclic flag).
struct Box {
  std::array<Index, 3> lo{0, 0, 0};
  std::array<Index, 3> hi{0, 0, 0};
  std::array<bool, 3> cyclic{false, false, false};
};

Index box_side(const Box& b, int k) { return b.hi[k] - b.lo[k] + 1; }

void emit_box_lexicographic(const MeshSpec& spec, const Box& b, std::vector<Index>& order) {
  std::array<Index, 3> c;
  for (Index x = b.lo[0]; x <= b.hi[0]; ++x) {
    c[0] = x;
    if (spec.dim == 1) {
      order.push_back(spec.index_of(std::span<const Index>(c.data(), 1)));
      continue;
    }
    for (Index y = b.lo[1]; y <= b.hi[1]; ++y) {
      c[1] = y;
      if (spec.dim == 2) {
        order.push_back(spec.index_of(std::span<const Index>(c.data(), 2)));
        continue;
      }
      for (Index z = b.lo[2]; z <= b.hi[2]; ++z) {
        c[2] = z;
        order.push_back(spec.index_of(std::span<const Index>(c.data(), 3)));
      }
    }
  }
}

void dissect_box(const MeshSpec& spec, const Box& b, std::vector<Index>& order) {
  constexpr Index kBaseSide = 3;

  int axis = 0;
  Index longest = 0;
  for (int k = 0; k < spec.dim; ++k) {
    if (box_side(b, k) > longest) {
      longest = box_side(b, k);
      axis = k;
    }
  }
  if (longest <= kBaseSide) {
    emit_box_lexicographic(spec, b, order);
    return;
  }

  Box left = b;
  Box right = b;
  Box sep = b;
  Box seam = b;
  bool has_seam = false;

  if (b.cyclic[axis]) {
    // First cut of a cyclic axis: middle plane plus the wrap-seam plane, so
    // that both halves become plain intervals with no surviving wrap edge.
    const Index m = box_side(b, axis);
    const Index s = (m - 1) / 2;  // splits the m-2 remaining planes, left half larger
    left.lo[axis] = 0;
    left.hi[axis] = s - 1;
    left.cyclic[axis] = false;
    right.lo[axis] = s + 1;
    right.hi[axis] = m - 2;
    right.cyclic[axis] = false;
    sep.lo[axis] = sep.hi[axis] = s;
    sep.cyclic[axis] = false;
    seam.lo[axis] = seam.hi[axis] = m - 1;
    seam.cyclic[axis] = false;
    has_seam = true;
  } else {
    const Index len = box_side(b, axis);
    const Index s = b.lo[axis] + len / 2;  // ceil((len-1)/2): left half larger
    left.hi[axis] = s - 1;
    right.lo[axis] = s + 1;
    sep.lo[axis] = sep.hi[axis] = s;
  }

  bool left_empty = false, right_empty = false;
  for (int k = 0; k < spec.dim; ++k) {
    if (left.hi[k] < left.lo[k]) left_empty = true;
    if (right.hi[k] < right.lo[k]) right_empty = true;
  }
  if (!left_empty) dissect_box(spec, left, order);
  if (!right_empty) dissect_box(spec, right, order);
  emit_box_lexicographic(spec, sep, order);
  if (has_seam) emit_box_lexicographic(spec, seam, order);
}

}  // namespace

Permutation nested_dissection_cartesian(const MeshSpec& spec) {
  spec.validate();
  if (spec.dim == 1) {
    throw std::invalid_argument("use the natural left-to-right order for 1D meshes");
  }
  Box root;
  for (int k = 0; k < spec.dim; ++k) {
    root.lo[k] = 0;
    root.hi[k] = spec.m - 1;
    root.cyclic[k] = spec.periodic;
  }
  std::vector<Index> order;
  order.reserve(spec.vertex_count());
  dissect_box(spec, root, order);

  std::vector<Index> forward(spec.vertex_count(), -1);
  for (Index pos = 0; pos < static_cast<Index>(order.size()); ++pos) forward[order[pos]] = pos;
  return Permutation::from_forward(std::move(forward));
}

namespace {

// BFS over a vertex subset; returns per-vertex level (-1 outside/unreached).
std::vector<int> subset_levels(const AdjacencyGraph& g, const std::vector<Index>& verts,
                               const std::vector<char>& active, Index source, int& max_level,
                               Index& last_vertex) {
  std::vector<int> level(g.size(), -1);
  std::deque<Index> queue;
  level[source] = 0;
  queue.push_back(source);
  max_level = 0;
  last_vertex = source;
  while (!queue.empty()) {
    Index v = queue.front();
    queue.pop_front();
    for (Index w : g.neighbors(v)) {
      if (!active[w] || level[w] >= 0) continue;
      level[w] = level[v] + 1;
      if (level[w] > max_level || (level[w] == max_level && w < last_vertex)) {
        max_level = level[w];
        last_vertex = w;
      }
      queue.push_back(w);
    }
  }
  (void)verts;
  return level;
}

void dissect_subset(const AdjacencyGraph& g, std::vector<Index> verts,
                    std::vector<char>& active, std::vector<Index>& order,
                    std::vector<DissectionSplit>* trace) {
  if (verts.size() <= 2) {
    for (Index v : verts) order.push_back(v);
    return;
  }
  for (Index v : verts) active[v] = 1;

  // Pseudo-peripheral start: repeat BFS from the farthest vertex while the
  // eccentricity keeps growing.
  Index start = verts.front();
  int ecc = -1;
  std::vector<int> level;
  for (int iter = 0; iter < 8; ++iter) {
    int max_level = 0;
    Index last = start;
    level = subset_levels(g, verts, active, start, max_level, last);
    if (max_level <= ecc) break;
    ecc = max_level;
    start = last;
  }
  {
    int max_level = 0;
    Index last = start;
    level = subset_levels(g, verts, active, start, max_level, last);
    ecc = max_level;
  }

  // A subset may still be disconnected: unreached vertices form their own
  // components, handled after this one.
  std::vector<Index> unreached;
  std::vector<Index> reached;
  for (Index v : verts) (level[v] >= 0 ? reached : unreached).push_back(v);

  if (ecc < 1) {
    for (Index v : reached) active[v] = 0;
    for (Index v : reached) order.push_back(v);
  } else {
    // Pick the level whose below/above split is most balanced; that level is
    // the separator, so no edge joins the two sides.
    std::vector<Index> level_count(ecc + 1, 0);
    for (Index v : reached) ++level_count[level[v]];
    Index total = static_cast<Index>(reached.size());
    int best = 1;
    Index best_imbalance = total + 1;
    Index below = level_count[0];
    for (int l = 1; l <= ecc; ++l) {
      Index above = total - below - level_count[l];
      Index imbalance = std::abs(below - above);
      if (imbalance < best_imbalance) {
        best_imbalance = imbalance;
        best = l;
      }
      below += level_count[l];
    }
    std::vector<Index> v1, v2, vsep;
    for (Index v : reached) {
      if (level[v] < best) {
        v1.push_back(v);
      } else if (level[v] > best) {
        v2.push_back(v);
      } else {
        vsep.push_back(v);
      }
    }
    for (Index v : reached) active[v] = 0;
    if (trace != nullptr) trace->push_back({v1, v2, vsep});
    if (!v1.empty()) dissect_subset(g, std::move(v1), active, order, trace);
    if (!v2.empty()) dissect_subset(g, std::move(v2), active, order, trace);
    for (Index v : vsep) order.push_back(v);
  }

  if (!unreached.empty()) {
    for (Index v : unreached) active[v] = 0;
    dissect_subset(g, std::move(unreached), active, order, trace);
  }
}

}  // namespace

Permutation nested_dissection_general(const SparseSymmetric& a,
                                      std::vector<DissectionSplit>* trace) {
  const Index n = a.size();
  auto g = AdjacencyGraph::build(a);
  std::vector<char> active(n, 0);
  std::vector<Index> order;
  order.reserve(n);

  // Components are discovered in order of their smallest vertex and numbered
  // consecutively.
  std::vector<char> assigned(n, 0);
  for (Index v = 0; v < n; ++v) {
    if (assigned[v]) continue;
    std::vector<Index> comp;
    std::deque<Index> queue{v};
    assigned[v] = 1;
    while (!queue.empty()) {
      Index u = queue.front();
      queue.pop_front();
      comp.push_back(u);
      for (Index w : g.neighbors(u)) {
        if (!assigned[w]) {
          assigned[w] = 1;
          queue.push_back(w);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    dissect_subset(g, std::move(comp), active, order, trace);
  }

  std::vector<Index> forward(n, -1);
  for (Index pos = 0; pos < n; ++pos) forward[order[pos]] = pos;
  return Permutation::from_forward(std::move(forward));
}

SparseSymmetric permute(const SparseSymmetric& a, const Permutation& p) {
  if (p.size() != a.size()) throw std::invalid_argument("permutation length mismatch");
  std::vector<Triplet> trip;
  trip.reserve(a.nnz_lower());
  for (const auto& e : a.lower_entries()) trip.push_back({p(e.row), p(e.col), e.value});
  return build_from_triplets(a.size(), trip);
}

}  // namespace iselinv
