#include <doctest.h>

#include "support.hpp"

using namespace gbd;
using gbd::test::Gen;

namespace {

std::vector<std::pair<Vertex, std::int64_t>> pairs(const std::vector<Entry>& es) {
  std::vector<std::pair<Vertex, std::int64_t>> out;
  for (const auto& e : es) out.emplace_back(e.index, e.value.convert_to<std::int64_t>());
  return out;
}

using P = std::vector<std::pair<Vertex, std::int64_t>>;

Matrix scalar_diagonal(std::int64_t c) {
  return Matrix::banded(IndexSet::Naturals, {0}, [c](int, Vertex) -> BigInt { return c; }, nlohmann::json{});
}

}  // namespace

TEST_CASE("row entries follow the displayed rows") {
  const Matrix a1 = catalog_get("A1").matrix();
  RowSlice r = row_entries(a1, 0, Window{-3, 3});
  CHECK(pairs(r.entries) == P{{-1, 1}, {0, 1}, {1, 2}});
  CHECK_FALSE(r.support_exceeds_window);

  const Matrix a5 = catalog_get("A5").matrix();
  RowSlice r5 = row_entries(a5, 1, Window{1, 5});
  CHECK(pairs(r5.entries) == P{{1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}});
  CHECK(r5.support_exceeds_window);

  RowSlice rd = row_entries(scalar_diagonal(4), 7, Window{1, 10});
  CHECK(pairs(rd.entries) == P{{7, 4}});
  CHECK_FALSE(rd.support_exceeds_window);

  CHECK_THROWS_AS(row_entries(a5, 1, Window{0, 3}), InvalidWindow);
}

TEST_CASE("column entries and equal column sums") {
  CHECK(pairs(column_entries(catalog_get("A5").matrix(), 3)) == P{{1, 1}, {4, 1}});
  const Matrix a1 = catalog_get("A1").matrix();
  CHECK(pairs(column_entries(a1, 0)) == P{{-1, 1}, {0, 1}, {1, 1}});
  for (Vertex j = -10; j <= 10; ++j) {
    BigInt s = 0;
    for (const auto& e : column_entries(a1, j)) s += e.value;
    CHECK(s == 3);
  }
  CHECK(pairs(column_entries(scalar_diagonal(5), 9)) == P{{9, 5}});
  CHECK_THROWS_AS(column_entries(catalog_get("A7").matrix(), 1), ColumnSupportUnbounded);
}

TEST_CASE("power entries on small cases") {
  CHECK(power_entry(catalog_get("A2").matrix(), 2, 0, 0) == 2);
  CHECK(power_entry(catalog_get("A5").matrix(), 2, 1, 1) == 2);
  const Matrix a1 = catalog_get("A1", {{"a", 2}, {"b", 3}}).matrix();
  for (Vertex i = -3; i <= 3; ++i)
    for (Vertex j = -3; j <= 3; ++j) CHECK(power_entry(a1, 1, i, j) == a1.at(i, j));
}

TEST_CASE("truncation") {
  DenseMatrix d = truncate(catalog_get("A2", {{"a", 2}, {"b", 3}}).matrix(), Window{-1, 1});
  std::vector<std::vector<BigInt>> want{{0, 3, 0}, {2, 0, 3}, {0, 2, 0}};
  CHECK(d.a == want);
  DenseMatrix one = truncate(catalog_get("A1").matrix(), Window{4, 4});
  REQUIRE(one.size() == 1);
  CHECK(one(4, 4) == 0);
  DenseMatrix d7 = truncate(catalog_get("A7").matrix(), Window{1, 3});
  std::vector<std::vector<BigInt>> want7{{1, 1, 0}, {1, 0, 1}, {1, 0, 0}};
  CHECK(d7.a == want7);
}

TEST_CASE("telescoping") {
  const Matrix a1 = catalog_get("A1").matrix();
  IncidenceSequence s = stationary_sequence(a1);
  IncidenceSequence t = telescope(s, std::vector<int>{0, 2});
  CHECK(t.stationary);
  for (Vertex i = -4; i <= 4; ++i)
    for (Vertex j = -4; j <= 4; ++j) CHECK(t.at(0).at(i, j) == power_entry(a1, 2, i, j));
  IncidenceSequence id = telescope(s, std::vector<int>{0, 1});
  for (Vertex i = -4; i <= 4; ++i)
    for (Vertex j = -4; j <= 4; ++j) CHECK(id.at(3).at(i, j) == a1.at(i, j));
  CHECK_THROWS(telescope(s, std::vector<int>{1, 2}));
  CHECK_THROWS(telescope(s, std::vector<int>{0, 2, 2}));
}

TEST_CASE("telescoping the alternating order diagram gives a stationary product") {
  CatalogEntry e = catalog_get("AlternatingOrder");
  IncidenceSequence t = telescope(e.diagram.sequence(), std::vector<int>{0, 2});
  DenseMatrix a = truncate(e.diagram.matrix(0), Window{1, 12});
  DenseMatrix b = truncate(e.diagram.matrix(1), Window{1, 12});
  for (Vertex i = 1; i <= 5; ++i)
    for (Vertex j = 1; j <= 5; ++j) {
      BigInt s = 0;
      for (Vertex k = 1; k <= 12; ++k) s += a(i, k) * b(k, j);
      CHECK(t.at(0).at(i, j) == s);
      CHECK(t.at(2).at(i, j) == s);
    }
}

TEST_CASE("period") {
  CHECK(period(catalog_get("A2").matrix(), 0, 6) == 2);
  CHECK(period(catalog_get("A5").matrix(), 1, 6) == 1);
  CHECK(period(scalar_diagonal(3), 1, 4) == 1);
  const Matrix shift = Matrix::banded(IndexSet::Integers, {1}, [](int, Vertex) -> BigInt { return 1; }, {});
  CHECK_THROWS_AS(period(shift, 0, 10), NoReturnFound);
}

TEST_CASE("irreducibility on windows") {
  CHECK(irreducible_on_window(catalog_get("A1").matrix(), Window{-5, 5}, 10).irreducible);
  IrreducibilityVerdict v = irreducible_on_window(catalog_get("ContinuousVershik").diagram.matrix(2), Window{-4, 4}, 12);
  CHECK_FALSE(v.irreducible);
  REQUIRE(v.witness);
  CHECK((v.witness->first - v.witness->second) % 2 != 0);
  CHECK_FALSE(irreducible_on_window(scalar_diagonal(2), Window{1, 4}, 8).irreducible);
}

TEST_CASE("property: rows and columns describe the same entries") {
  gbd::test::for_all(11, 25, [](Gen& g, std::uint64_t seed) {
    CAPTURE(seed);
    const IndexSet set = g.coin() ? IndexSet::Integers : IndexSet::Naturals;
    auto rb = gbd::test::random_banded(g, set);
    const Window w = set == IndexSet::Integers ? Window{-12, 12} : Window{1, 24};
    for (Vertex i = w.lo + 3; i <= w.hi - 3; ++i) {
      for (const auto& e : rb.matrix.row(i, w).entries) CHECK(rb.matrix.at(i, e.index) == e.value);
      for (const auto& e : rb.matrix.column(i)) CHECK(rb.matrix.at(e.index, i) == e.value);
      BigInt row_sum = 0, row_from_cols = 0;
      for (const auto& e : rb.matrix.row(i, w).entries) row_sum += e.value;
      for (Vertex j = w.lo; j <= w.hi; ++j) row_from_cols += rb.matrix.at(i, j);
      CHECK(row_sum == row_from_cols);
    }
  });
}

TEST_CASE("property: power entries agree with dense powers of the truncation") {
  gbd::test::for_all(12, 15, [](Gen& g, std::uint64_t seed) {
    CAPTURE(seed);
    const IndexSet set = g.coin() ? IndexSet::Integers : IndexSet::Naturals;
    auto rb = gbd::test::random_banded(g, set, 2, 2);
    const int n = static_cast<int>(g.integer(1, 4));
    const Vertex centre = set == IndexSet::Integers ? 0 : 12;
    const Window w{centre - 11, centre + 11};
    DenseMatrix d = truncate(rb.matrix, set == IndexSet::Naturals ? Window{1, w.hi} : w);
    auto p = gbd::test::dense_power(d, n);
    for (Vertex i = centre - 2; i <= centre + 2; ++i)
      for (Vertex j = centre - 2; j <= centre + 2; ++j)
        CHECK(power_entry(rb.matrix, n, i, j) == p[i - d.window.lo][j - d.window.lo]);
  });
}

TEST_CASE("property: return counts match the diagonal of dense powers") {
  gbd::test::for_all(13, 10, [](Gen& g, std::uint64_t seed) {
    CAPTURE(seed);
    auto rb = gbd::test::random_banded(g, IndexSet::Integers, 1, 2);
    DenseMatrix d = truncate(rb.matrix, Window{-10, 10});
    auto counts = return_counts(rb.matrix, 0, 5);
    for (int k = 1; k <= 5; ++k) CHECK(counts[k - 1] == gbd::test::dense_power(d, k)[10][10]);
  });
}
