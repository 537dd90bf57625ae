#include <doctest.h>

#include <random>

#include "iselinv/factorization.hpp"
#include "iselinv/symbolic.hpp"
#include "test_util.hpp"

using namespace iselinv;

TEST_SUITE_BEGIN("symbolic");

TEST_CASE("levels on the 6-ring in natural order") {
  auto a = toy_hamiltonian({1, 6, true});
  SUBCASE("untruncated levels") {
    auto p = fill_pattern_exact(a);
    CHECK(p.level_of(5, 1) == 1);
    CHECK(p.level_of(5, 2) == 2);
    CHECK(p.level_of(5, 3) == 3);
    CHECK(!p.level_of(4, 2).has_value());  // no fill between 3 and 5 (1-based)
    // Fill beyond the stored entries is exactly the last-row positions.
    Index fill = 0;
    for (Index j = 0; j < 6; ++j) {
      for (Index s = p.column_begin(j); s < p.column_end(j); ++s) {
        if (!a.contains(p.row_at(s), j)) ++fill;
      }
    }
    CHECK(fill == 3);
  }
  SUBCASE("cut-off 1 keeps the single level-1 entry") {
    auto p = symbolic_levels(a, 1);
    CHECK(p.contains(5, 1));
    CHECK(!p.contains(5, 2));
    CHECK(p.level_of(5, 1) == 1);
  }
  SUBCASE("cut-off 0 is the original pattern") {
    auto p = symbolic_levels(a, 0);
    for (Index j = 0; j < 6; ++j) {
      for (Index s = p.column_begin(j); s < p.column_end(j); ++s) {
        const Index i = p.row_at(s);
        CHECK((i == j || a.contains(i, j)));
      }
    }
  }
}

TEST_CASE("tridiagonal chain has no fill") {
  std::vector<Triplet> t;
  for (Index i = 0; i < 10; ++i) t.push_back({i, i, {2, 0}});
  for (Index i = 0; i + 1 < 10; ++i) t.push_back({i + 1, i, {-1, 0}});
  auto a = build_from_triplets(10, t);
  auto p = fill_pattern_exact(a);
  CHECK(p.nnz() == 19);  // diag + subdiag only
}

TEST_CASE("restricted-path reference") {
  auto a = toy_hamiltonian({1, 6, true});
  CHECK(fill_path_oracle(a, 5, 3) == 3);
  CHECK(fill_path_oracle(a, 3, 2) == 0);  // adjacent
  CHECK(!fill_path_oracle(a, 4, 2).has_value());

  auto disconnected = build_from_triplets(2, {{{0, 0, {1, 0}}, {1, 1, {1, 0}}}});
  CHECK(!fill_path_oracle(disconnected, 1, 0).has_value());

  CHECK_THROWS_AS(fill_path_oracle(testing::random_graph(65, 0.05, 1), 0, 1),
                  std::invalid_argument);
}

TEST_CASE("recurrence equals the restricted-path reference") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 12; ++rep) {
    const Index n = 8 + static_cast<Index>(rng() % 40);
    auto a = testing::random_graph(n, 0.12, rng());
    auto exact = fill_pattern_exact(a);
    for (std::uint32_t c : {0u, 1u, 2u, 4u, 8u}) {
      auto p = symbolic_levels(a, c);
      for (Index j = 0; j < n; ++j) {
        for (Index i = j; i < n; ++i) {
          auto oracle = (i == j) ? std::optional<int>(0) : fill_path_oracle(a, i, j);
          auto level = p.level_of(i, j);
          if (oracle && *oracle <= static_cast<int>(c)) {
            REQUIRE(level.has_value());
            REQUIRE(*level == *oracle);
          } else {
            REQUIRE(!level.has_value());
          }
        }
      }
      // Monotonicity: truncated patterns nest inside the untruncated one.
      for (Index j = 0; j < n; ++j) {
        for (Index s = p.column_begin(j); s < p.column_end(j); ++s) {
          REQUIRE(exact.contains(p.row_at(s), j));
        }
      }
    }
  }
}

TEST_CASE("pattern cut-off nesting") {
  auto a = testing::random_graph(30, 0.15, 4242);
  auto p2 = symbolic_levels(a, 2);
  auto p3 = symbolic_levels(a, 3);
  for (Index j = 0; j < 30; ++j) {
    for (Index s = p2.column_begin(j); s < p2.column_end(j); ++s) {
      CHECK(p3.contains(p2.row_at(s), j));
    }
  }
}

TEST_CASE("closure of the untruncated pattern") {
  // i, k in the same column with i > k implies (i, k) is present: this is
  // what makes the right-to-left inversion sweep self-contained.
  for (std::uint64_t seed : {7ull, 8ull, 9ull}) {
    auto a = testing::random_graph(24, 0.2, seed);
    auto p = fill_pattern_exact(a);
    for (Index j = 0; j < 24; ++j) {
      auto rows = p.column_rows(j);
      for (std::size_t x = 1; x < rows.size(); ++x) {
        for (std::size_t y = x + 1; y < rows.size(); ++y) {
          REQUIRE(p.contains(rows[y], rows[x]));
        }
      }
    }
  }
}

TEST_CASE("numeric factor stays inside the predicted structure") {
  // Dense elimination with random values: every numerically nonzero factor
  // entry must sit inside the predicted pattern.
  auto a = testing::random_well_conditioned(28, 3, 31);
  auto p = fill_pattern_exact(a);
  DenseMatrix l;
  std::vector<Complex> d;
  testing::dense_ldlt(DenseMatrix::from_sparse(a), l, d);
  for (Index j = 0; j < 28; ++j) {
    for (Index i = j + 1; i < 28; ++i) {
      if (std::abs(l.at(i, j)) > 1e-14) CHECK(p.contains(i, j));
    }
  }
}

TEST_SUITE_END();
