#include <doctest.h>

#include <algorithm>
#include <random>

#include "iselinv/dense.hpp"
#include "iselinv/factorization.hpp"
#include "iselinv/ordering.hpp"
#include "iselinv/symbolic.hpp"
#include "test_util.hpp"

using namespace iselinv;

namespace {

// Every recursion triple must separate: check the top split of a permuted
// matrix by verifying no stored entry couples the first and second blocks.
bool no_cross_edges(const SparseSymmetric& a, const std::vector<char>& in_v1,
                    const std::vector<char>& in_v2) {
  for (const auto& e : a.lower_entries()) {
    if ((in_v1[e.row] && in_v2[e.col]) || (in_v2[e.row] && in_v1[e.col])) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE_BEGIN("ordering");

TEST_CASE("permutation basics") {
  auto p = Permutation::from_forward({2, 0, 1});
  CHECK(p(0) == 2);
  CHECK(p.old_of(2) == 0);
  CHECK_THROWS_AS(Permutation::from_forward({0, 0, 1}), std::invalid_argument);

  SUBCASE("identity permute is a no-op") {
    auto a = testing::random_well_conditioned(20, 3, 11);
    auto b = permute(a, Permutation::identity(20));
    for (const auto& e : a.lower_entries()) CHECK(b.entry(e.row, e.col) == e.value);
  }
  SUBCASE("reversal of a diagonal") {
    auto a = build_from_triplets(3, {{{0, 0, {1, 0}}, {1, 1, {2, 0}}, {2, 2, {3, 0}}}});
    auto b = permute(a, Permutation::from_forward({2, 1, 0}));
    CHECK(b.entry(0, 0) == Complex{3, 0});
    CHECK(b.entry(2, 2) == Complex{1, 0});
  }
  SUBCASE("random round trip is bit-exact") {
    auto a = testing::random_well_conditioned(40, 4, 23);
    std::vector<Index> fwd(40);
    std::iota(fwd.begin(), fwd.end(), 0);
    std::mt19937_64 rng(5);
    std::shuffle(fwd.begin(), fwd.end(), rng);
    auto p = Permutation::from_forward(fwd);
    auto back = permute(permute(a, p), p.inverted());
    for (const auto& e : a.lower_entries()) CHECK(back.entry(e.row, e.col) == e.value);
  }
  SUBCASE("length mismatch") {
    auto a = testing::random_well_conditioned(5, 2, 1);
    CHECK_THROWS_AS(permute(a, Permutation::identity(4)), std::invalid_argument);
  }
}

TEST_CASE("mesh dissection on a 15x15 open mesh") {
  // Non-periodic square: the first separator is the middle column of the
  // mesh (1-based index 8), numbered in the last 15 positions.
  MeshSpec mesh{2, 15, false};
  auto p = nested_dissection_cartesian(mesh);
  REQUIRE(p.size() == 225);
  for (Index y = 0; y < 15; ++y) {
    std::array<Index, 2> c{7, y};
    CHECK(p(mesh.index_of(std::span<const Index>(c.data(), 2))) >= 210);
  }
}

TEST_CASE("mesh dissection rejects 1D") {
  CHECK_THROWS_AS(nested_dissection_cartesian({1, 16, true}), std::invalid_argument);
}

TEST_CASE("2x2 torus order is a valid permutation") {
  auto p = nested_dissection_cartesian({2, 2, true});
  REQUIRE(p.size() == 4);
  std::vector<Index> seen(4, 0);
  for (Index i = 0; i < 4; ++i) seen[p(i)] = 1;
  CHECK(std::count(seen.begin(), seen.end(), 1) == 4);
}

TEST_CASE("periodic dissection separates the torus halves") {
  // 8x8 torus: the first cut takes two parallel planes; the remaining halves
  // must not touch, including across the wrap.
  MeshSpec mesh{2, 8, true};
  auto h = toy_hamiltonian(mesh);
  auto p = nested_dissection_cartesian(mesh);
  // Separator planes on axis 0 at x = 3 and x = 7.
  std::vector<char> v1(64, 0), v2(64, 0);
  for (Index v = 0; v < 64; ++v) {
    auto c = mesh.coords_of(v);
    if (c[0] <= 2) v1[v] = 1;
    if (c[0] >= 4 && c[0] <= 6) v2[v] = 1;
  }
  CHECK(no_cross_edges(h, v1, v2));
  // And the separator planes come last among the axis-0 split.
  Index max_inner = -1;
  for (Index v = 0; v < 64; ++v) {
    auto c = mesh.coords_of(v);
    if (c[0] != 3 && c[0] != 7) max_inner = std::max(max_inner, p(v));
  }
  Index min_sep = 1 << 30;
  for (Index v = 0; v < 64; ++v) {
    auto c = mesh.coords_of(v);
    if (c[0] == 3 || c[0] == 7) min_sep = std::min(min_sep, p(v));
  }
  CHECK(min_sep > max_inner);
}

TEST_CASE("factor fill respects the top-level split of a 4x4 torus") {
  MeshSpec mesh{2, 4, true};
  auto h = toy_hamiltonian(mesh);
  auto p = nested_dissection_cartesian(mesh);
  auto hp = permute(h, p);
  auto pattern = fill_pattern_exact(hp);
  // Axis-0 planes x=1 and x=3 form the top separator; the two remaining
  // planes are the blocks. No factor entry may couple them.
  std::vector<char> v1(16, 0), v2(16, 0);
  for (Index v = 0; v < 16; ++v) {
    auto c = mesh.coords_of(v);
    if (c[0] == 0) v1[p(v)] = 1;
    if (c[0] == 2) v2[p(v)] = 1;
  }
  for (Index j = 0; j < 16; ++j) {
    for (Index s = pattern.column_begin(j); s < pattern.column_end(j); ++s) {
      const Index i = pattern.row_at(s);
      CHECK(!((v1[i] && v2[j]) || (v2[i] && v1[j])));
    }
  }
}

TEST_CASE("general dissection") {
  SUBCASE("path of 7 puts the center last") {
    std::vector<Triplet> t;
    for (Index i = 0; i < 7; ++i) t.push_back({i, i, {2, 0}});
    for (Index i = 0; i + 1 < 7; ++i) t.push_back({i + 1, i, {-1, 0}});
    auto a = build_from_triplets(7, t);
    auto p = nested_dissection_general(a);
    CHECK(p(3) == 6);
  }
  SUBCASE("clique separator contract") {
    std::vector<Triplet> t;
    for (Index i = 0; i < 5; ++i) {
      t.push_back({i, i, {4, 0}});
      for (Index j = 0; j < i; ++j) t.push_back({i, j, {-1, 0}});
    }
    auto a = build_from_triplets(5, t);
    auto p = nested_dissection_general(a);
    REQUIRE(p.size() == 5);  // any order is fine; the split contract is vacuous
  }
  SUBCASE("disconnected components numbered consecutively") {
    std::vector<Triplet> t{{0, 0, {1, 0}}, {1, 0, {-1, 0}}, {1, 1, {1, 0}},
                           {2, 2, {1, 0}}, {3, 2, {-1, 0}}, {3, 3, {1, 0}}};
    auto a = build_from_triplets(4, t);
    auto p = nested_dissection_general(a);
    std::vector<Index> c1{p(0), p(1)}, c2{p(2), p(3)};
    const Index max1 = std::max(c1[0], c1[1]);
    const Index min2 = std::min(c2[0], c2[1]);
    CHECK(max1 < min2);
  }
  SUBCASE("split contract on random graphs") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      auto a = testing::random_graph(40, 0.08, seed);
      std::vector<DissectionSplit> splits;
      auto p = nested_dissection_general(a, &splits);
      REQUIRE(p.size() == 40);
      REQUIRE(!splits.empty());
      std::vector<char> s1(40), s2(40);
      for (const auto& split : splits) {
        std::fill(s1.begin(), s1.end(), 0);
        std::fill(s2.begin(), s2.end(), 0);
        for (Index v : split.side1) s1[v] = 1;
        for (Index v : split.side2) s2[v] = 1;
        CHECK(no_cross_edges(a, s1, s2));
        // Separators are numbered after both sides.
        Index max_side = -1, min_sep = 1 << 30;
        for (Index v : split.side1) max_side = std::max(max_side, p(v));
        for (Index v : split.side2) max_side = std::max(max_side, p(v));
        for (Index v : split.separator) min_sep = std::min(min_sep, p(v));
        if (!split.separator.empty() && max_side >= 0) CHECK(min_sep > max_side);
      }
    }
  }
}

TEST_CASE("permutation preserves the spectrum") {
  auto h = toy_hamiltonian({2, 4, true});  // n = 16, real symmetric
  auto p = nested_dissection_cartesian({2, 4, true});
  auto eig1 = dense_eigendecomposition(DenseMatrix::from_sparse(h), true);
  auto eig2 = dense_eigendecomposition(DenseMatrix::from_sparse(permute(h, p)), true);
  for (Index k = 0; k < 16; ++k) {
    CHECK(std::abs(eig1.eigenvalues[k] - eig2.eigenvalues[k]) <= 1e-10);
  }
}

TEST_SUITE_END();
