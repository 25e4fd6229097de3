#include <doctest.h>

#include <cmath>

#include "support.hpp"

using namespace gbd;
using gbd::test::Gen;

namespace {

Matrix vertical(std::int64_t c) {
  return Matrix::banded(IndexSet::Naturals, {0}, [c](int, Vertex) -> BigInt { return c; }, nlohmann::json{});
}

}  // namespace

TEST_CASE("perron estimates") {
  CatalogEntry a5 = catalog_get("A5");
  PerronReport r = perron_estimate(a5.matrix(), 1, 40, Window{1, 200});
  CHECK(r.lambda == doctest::Approx(2.0).epsilon(1e-3));
  for (std::size_t k = 1; k < r.running_sup.size(); ++k) CHECK(r.running_sup[k] >= r.running_sup[k - 1]);

  PerronReport r2 = perron_estimate(catalog_get("A2").matrix(), 0, 60, Window{-200, 200});
  CHECK(r2.period == 2);
  CHECK(r2.lambda == doctest::Approx(2.0).epsilon(1e-2));

  CHECK(perron_estimate(vertical(3), 1, 10, Window{1, 5}).lambda == doctest::Approx(3.0));

  CatalogEntry inf = catalog_get("InfinitePerron");
  CHECK_THROWS_AS(perron_estimate(inf.matrix(), inf.anchor, 30, Window{-30, 30}, 1e6), DivergenceDetected);
  CHECK(perron_scan(inf.matrix(), inf.anchor, {{30, Window{-30, 30}}}, 1e6).diverged);
}

TEST_CASE("closed-form eigenvectors") {
  CatalogEntry a1 = catalog_get("A1");
  const EigenPair& p1 = *a1.oracle.pair;
  CHECK(p1.lambda == 3.0);
  const double want[] = {0.25, 0.5, 1.0, 1.0, 0.5, 0.25};
  for (Vertex v = -3; v <= 2; ++v) CHECK(p1.xi(v) == doctest::Approx(want[v + 3]));
  for (Vertex v = -5; v <= 5; ++v) CHECK(p1.eta(v) == doctest::Approx(1.0));

  CatalogEntry a3 = catalog_get("A3", {{"b", 1}, {"c", 1}, {"alpha", 2}});
  for (Vertex n = 1; n <= 8; ++n) CHECK(a3.oracle.pair->xi(n) == doctest::Approx(a3.oracle.pair->xi(1) / std::pow(2.0, n - 1)));

  CatalogEntry a7 = catalog_get("A7", {{"cycle", "1"}});
  CHECK(a7.oracle.pair->lambda == doctest::Approx(2.0));
  for (Vertex k = 1; k <= 10; ++k) {
    CHECK(a7.oracle.pair->xi(k) == doctest::Approx(1.0));
    CHECK(a7.oracle.pair->eta(k) / a7.oracle.pair->eta(1) == doctest::Approx(std::pow(0.5, k - 1)));
  }

  CatalogEntry a6 = catalog_get("A6");
  const double lam = 1.0 + std::sqrt(2.0);
  const EigenPair& p6 = *a6.oracle.pair;
  for (Vertex k = 1; k <= 8; ++k) {
    const double r = p6.eta(k) / p6.eta(1);
    CHECK(r == doctest::Approx(k % 2 == 1 ? 1.0 : lam - 1.0));
  }
}

TEST_CASE("computed eigenvectors reproduce the closed forms") {
  CatalogEntry a1 = catalog_get("A1");
  EigenVector xi = right_eigenvector(a1.matrix(), 3.0, Surd(Rational(3)), Window{-40, 40}, 0);
  EigenVector eta = left_eigenvector(a1.matrix(), 3.0, Surd(Rational(3)), Window{-40, 40}, 0);
  for (Vertex v = -8; v <= 8; ++v) {
    CHECK(xi(v) == doctest::Approx(a1.oracle.pair->xi(v)).epsilon(1e-12));
    CHECK(eta(v) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(right_residual(a1.matrix(), xi, 3.0, Window{-20, 20}) < 1e-12);

  CatalogEntry a5 = catalog_get("A5");
  EigenVector x5 = right_eigenvector(a5.matrix(), 2.0, Surd(Rational(2)), Window{1, 120}, 1);
  for (Vertex v = 1; v <= 15; ++v) CHECK(x5(v) == doctest::Approx(std::pow(0.5, v - 1)).epsilon(1e-8));

  // Below the diagonal entry the recurrence turns negative at once.
  CatalogEntry a3 = catalog_get("A3", {{"b", 1}, {"c", 1}, {"alpha", 2}});
  CHECK_THROWS_AS(right_eigenvector(a3.matrix(), 0.5, Surd(Rational(1, 2)), Window{1, 30}, 1), NoPositiveSolution);
}

TEST_CASE("exact residuals vanish for rational and surd pairs") {
  for (const char* ref : {"A1?a=2&b=3", "A3?b=1&c=1&alpha=2", "A5", "A6", "A2?a=1&b=2"}) {
    CAPTURE(ref);
    CatalogEntry e = catalog_resolve(ref);
    const EigenPair& p = *e.oracle.pair;
    const Window w = e.matrix().index_set() == IndexSet::Integers ? Window{-15, 15} : Window{1, 30};
    auto r = exact_right_residual(e.matrix(), p.xi, *p.lambda_exact, w);
    if (r) CHECK(r->is_zero());
    else CHECK(right_residual(e.matrix(), p.xi, p.lambda, w) < 1e-12);
    auto l = exact_left_residual(e.matrix(), p.eta, *p.lambda_exact, w);
    if (l) CHECK(l->is_zero());
    else CHECK(left_residual(e.matrix(), p.eta, p.lambda, w) < 1e-12);
  }
}

TEST_CASE("column sum bounds") {
  ColumnSumBounds b1 = column_sum_bounds(catalog_get("A1", {{"a", 2}, {"b", 3}}).matrix(), Window{-10, 10});
  CHECK(b1.exact);
  CHECK(*b1.exact_value == 8);

  CatalogEntry a4 = catalog_get("A4", {{"b", 1}, {"r", 2}, {"alpha", 1}, {"beta", 0}});
  ColumnSumBounds b4 = column_sum_bounds(a4.matrix(), Window{2, 30});
  CHECK(b4.exact);
  CHECK(*b4.exact_value == 5);

  ColumnSumBounds one = column_sum_bounds(catalog_get("A5").matrix(), Window{3, 3});
  CHECK(one.inf == one.sup);
  CHECK(one.inf == 2.0);

  ColumnSumBounds b7 = column_sum_bounds(catalog_get("A7").matrix(), Window{1, 5});
  CHECK(b7.skipped == std::vector<Vertex>{1});
}

TEST_CASE("recurrence classification") {
  auto run = [](const std::string& ref, int horizon) {
    CatalogEntry e = catalog_resolve(ref);
    const EigenPair& p = *e.oracle.pair;
    ClassifyOptions co;
    co.analytic = e.oracle.recurrence;
    co.eta_dot_xi = summability([&](Vertex v) { return p.xi(v) * p.eta(v); }, e.matrix().index_set(), e.anchor,
                                e.oracle.eta_dot_xi_tail());
    return classify_recurrence(e.matrix(), p.lambda, e.anchor, horizon, 1e-10, co);
  };
  CHECK(run("A5", 80).cls == RecurrenceClass::PositiveRecurrent);
  CHECK(run("A1?a=1&b=1", 80).cls == RecurrenceClass::PositiveRecurrent);
  RecurrenceReport a2 = run("A2?a=1&b=1", 200);
  CHECK(a2.cls == RecurrenceClass::NullRecurrent);
  CHECK(a2.consistent);
  for (std::size_t k = 1; k < a2.partial_sums.size(); ++k) CHECK(a2.partial_sums[k] >= a2.partial_sums[k - 1]);

  // A walk with drift away from the anchor returns finitely often.
  std::vector<double> transient;
  for (int n = 1; n <= 200; ++n) transient.push_back(std::pow(0.5, n));
  CHECK(classify_series(transient, 1e-10).numeric == RecurrenceClass::Transient);
}

TEST_CASE("stochastic matrices from eigenpairs") {
  for (auto [a, b] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{3, 1}}) {
    CatalogEntry e = catalog_get("A1", {{"a", a}, {"b", b}});
    StochasticMatrix p = stochastic_from_eigenpair(e.matrix(), *e.oracle.pair);
    for (Vertex k = 1; k <= 6; ++k) {
      CHECK(p.p(k, k - 1) == doctest::Approx(2.0 * b / (a + 2.0 * b)));
      CHECK(p.p(k, k + 1) == doctest::Approx(double(a) / (a + 2.0 * b)));
    }
    CHECK(validate_rows(p, Window{-20, 20}).max_deviation < 1e-12);
  }
  CatalogEntry a2 = catalog_get("A2");
  StochasticMatrix p2 = stochastic_from_eigenpair(a2.matrix(), *a2.oracle.pair);
  CHECK(p2.p(0, 1) == doctest::Approx(0.5));
  CHECK(p2.p(0, -1) == doctest::Approx(0.5));

  EigenPair ones;
  ones.lambda = 4.0;
  ones.xi.value = [](Vertex) { return 1.0; };
  StochasticMatrix id = stochastic_from_eigenpair(vertical(4), ones);
  CHECK(id.p(5, 5) == 1.0);
  CHECK(id.row_sum(5) == 1.0);

  EigenPair bad = *a2.oracle.pair;
  bad.lambda = 3.0;
  CHECK_THROWS_AS(validate_rows(stochastic_from_eigenpair(a2.matrix(), bad), Window{-3, 3}), RowSumViolation);
}

TEST_CASE("power identity") {
  CatalogEntry a2 = catalog_get("A2");
  PowerIdentity pi = verify_power_identity(a2.matrix(), *a2.oracle.pair, 0, 4);
  CHECK(pi.lhs == doctest::Approx(6.0 / 16.0).epsilon(1e-14));
  CHECK(pi.rhs == doctest::Approx(6.0 / 16.0).epsilon(1e-14));
  CatalogEntry a5 = catalog_get("A5");
  CHECK(verify_power_identity(a5.matrix(), *a5.oracle.pair, 1, 3).diff < 1e-12);
  CHECK(verify_power_identity(a5.matrix(), *a5.oracle.pair, 1, 1).diff < 1e-15);
}

TEST_CASE("first returns") {
  auto l = first_return_counts(catalog_get("A2").matrix(), 0, 6);
  // Simple walk: first returns at 2 and 4 are 2 and 2; at 6 there are 4.
  CHECK(l[0] == 0);
  CHECK(l[1] == 2);
  CHECK(l[3] == 2);
  CHECK(l[5] == 4);
}

TEST_CASE("summability") {
  CatalogEntry a4 = catalog_get("A4", {{"b", 0}, {"r", 2}, {"alpha", 1}, {"beta", 0}});
  REQUIRE(a4.oracle.xi_sum);
  CHECK(*a4.oracle.xi_sum == doctest::Approx(9.0 / 4.0));
  double partial = 0.0;
  for (Vertex v = 1; v <= 400; ++v) partial += a4.oracle.pair->xi(v) / a4.oracle.pair->xi(1);
  CHECK(partial == doctest::Approx(9.0 / 4.0).epsilon(1e-12));
  Summability s4 = summability([&](Vertex v) { return a4.oracle.pair->xi(v) / a4.oracle.pair->xi(1); },
                               IndexSet::Naturals, 1, TailModel::numeric(200));
  CHECK(s4.status == Summability::Status::FiniteSum);
  CHECK(s4.value == doctest::Approx(9.0 / 4.0).epsilon(1e-9));

  for (auto [a, b] : {std::pair{2, 1}, std::pair{5, 2}}) {
    CatalogEntry e = catalog_get("A1", {{"a", a}, {"b", b}});
    Summability s = summability([&](Vertex v) { return e.oracle.pair->xi(v); }, IndexSet::Integers, 0,
                                TailModel::numeric(200));
    CHECK(s.status == Summability::Status::Divergent);
  }
  CHECK(summability([](Vertex) { return 1.0; }, IndexSet::Naturals, 1, TailModel::numeric(100)).status ==
        Summability::Status::Divergent);
  CHECK(summability([](Vertex v) { return std::pow(0.5, v); }, IndexSet::Naturals, 1, TailModel::geometric(0.5)).value ==
        doctest::Approx(1.0));
}

TEST_CASE("truncated spectral radius grows on the infinite Perron example") {
  CatalogEntry e = catalog_get("InfinitePerron");
  double prev = 0.0;
  for (Vertex r : {2, 5, 10}) {
    TruncatedRadius t = truncated_spectral_radius(e.matrix(), Window{-r, r});
    CHECK(t.lower <= t.estimate);
    CHECK(t.estimate <= t.upper * (1 + 1e-12));
    CHECK(t.estimate > prev);
    prev = t.estimate;
  }
  CHECK(prev > 10.0);
}

TEST_CASE("property: Collatz-Wielandt bounds bracket the truncated radius") {
  gbd::test::for_all(21, 20, [](Gen& g, std::uint64_t seed) {
    CAPTURE(seed);
    auto rb = gbd::test::random_banded(g, IndexSet::Integers);
    TruncatedRadius t = truncated_spectral_radius(rb.matrix, Window{-8, 8});
    CHECK(t.lower <= t.estimate * (1 + 1e-9));
    CHECK(t.estimate <= t.upper * (1 + 1e-9));
    ColumnSumBounds cb = column_sum_bounds(rb.matrix, Window{-8, 8});
    CHECK(t.estimate <= cb.sup + 1e-9);
  });
}

TEST_CASE("property: the stochastic walk and the matrix share return series") {
  gbd::test::for_all(22, 6, [](Gen& g, std::uint64_t seed) {
    CAPTURE(seed);
    const std::int64_t a = g.integer(1, 4), b = g.integer(1, 4);
    CatalogEntry e = catalog_get("A1", {{"a", a}, {"b", b}});
    const int n = static_cast<int>(g.integer(1, 12));
    CHECK(verify_power_identity(e.matrix(), *e.oracle.pair, static_cast<Vertex>(g.integer(-3, 3)), n).diff < 1e-12);
  });
}
