#include <doctest.h>

#include "support.hpp"

using namespace gbd;

TEST_CASE("every catalog entry builds with its defaults") {
  REQUIRE(catalog_index().size() == 18);
  for (const auto& info : catalog_index()) {
    CAPTURE(info.id);
    CatalogEntry e = catalog_get(info.id);
    CHECK(e.id == info.id);
    CHECK(e.params == info.defaults);
    CHECK(e.ordered.has_value() == info.ordered);
    CHECK(e.diagram.matrix(0).valid());
    nlohmann::json d = e.describe();
    CHECK(d["id"] == info.id);
    CHECK_FALSE(e.summary.empty());
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(catalog_get("A1", {{"a", 0}}), ParamOutOfRange);
  CHECK_THROWS_AS(catalog_get("A3", {{"alpha", 1}}), ParamOutOfRange);
  CHECK_THROWS_AS(catalog_get("UniformBand", {{"t", 0}}), ParamOutOfRange);
  CHECK_THROWS_AS(catalog_get("A7", {{"cycle", "0"}}), ParamOutOfRange);
  CHECK_THROWS_AS(catalog_get("A1", {{"zz", 1}}), ConfigError);
  CHECK_THROWS_AS(catalog_get("Nope"), ConfigError);
}

TEST_CASE("references round-trip") {
  for (const char* ref : {"catalog:A1?a=2&b=3", "A4?b=0&r=2&alpha=1&beta=0", "catalog:A7?cycle=1,2", "SlantedOrder"}) {
    CAPTURE(ref);
    CHECK(is_catalog_ref(std::string(ref).rfind("catalog:", 0) == 0 ? ref : std::string("catalog:") + ref));
    CatalogEntry e = catalog_resolve(ref);
    CatalogEntry again = catalog_resolve(e.reference());
    CHECK(again.id == e.id);
    CHECK(again.params == e.params);
    CHECK(again.reference() == e.reference());
  }
  auto [id, params] = parse_catalog_ref("catalog:A1?a=2&b=3");
  CHECK(id == "A1");
  CHECK(params["a"] == "2");
  CHECK(params["b"] == "3");
  CHECK_FALSE(is_catalog_ref("{\"kind\":\"banded\"}"));
}

TEST_CASE("closed-form oracle data") {
  CatalogEntry a5 = catalog_get("A5");
  CHECK(*a5.oracle.recurrence == RecurrenceClass::PositiveRecurrent);
  CHECK(*a5.oracle.xi_sum == doctest::Approx(1.0));
  CHECK(a5.oracle.pair->xi(1) == doctest::Approx(0.5));
  CatalogEntry a2 = catalog_get("A2", {{"a", 1}, {"b", 2}});
  CHECK(*a2.oracle.recurrence == RecurrenceClass::NullRecurrent);
  CHECK(a2.oracle.period == 2);
  CHECK(a2.oracle.pair->lambda == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(a2.oracle.secondary->lambda == doctest::Approx(3.0));
  CHECK_FALSE(a2.oracle.probability());
  CatalogEntry a1 = catalog_get("A1", {{"a", 2}, {"b", 1}});
  CHECK_FALSE(a1.oracle.probability());
  // A1 with a < 2b carries a finite measure.
  CHECK(catalog_get("A1", {{"a", 1}, {"b", 1}}).oracle.probability());
}

TEST_CASE("A4 sum of the right eigenvector") {
  // (1 + q1) / (1 - q1 q2) with q1 = (r - alpha)/(r + beta), q2 = (r - beta)/(r + alpha).
  for (auto [b, r, alpha, beta] : {std::tuple{0, 2, 1, 0}, std::tuple{1, 3, 1, 2}, std::tuple{2, 4, 3, 1}}) {
    CatalogEntry e = catalog_get("A4", {{"b", b}, {"r", r}, {"alpha", alpha}, {"beta", beta}});
    const double q1 = double(r - alpha) / (r + beta), q2 = double(r - beta) / (r + alpha);
    REQUIRE(e.oracle.xi_sum);
    CHECK(*e.oracle.xi_sum == doctest::Approx((1 + q1) / (1 - q1 * q2)));
    double partial = 0.0;
    for (Vertex v = 1; v <= 2000; ++v) partial += e.oracle.pair->xi(v) / e.oracle.pair->xi(1);
    CHECK(partial == doctest::Approx(*e.oracle.xi_sum).epsilon(1e-9));
  }
  CHECK(*catalog_get("A4", {{"b", 0}, {"r", 2}, {"alpha", 1}, {"beta", 0}}).oracle.xi_sum_exact == Rational(9, 4));
}

TEST_CASE("the isomorphism pair maps Z onto N") {
  IsoPair ip = iso_pair();
  CHECK(ip.z.index_set() == IndexSet::Integers);
  CHECK(ip.n.index_set() == IndexSet::Naturals);
  std::set<Vertex> image;
  for (Vertex v = -5; v <= 4; ++v) image.insert(ip.g(v));
  CHECK(image.size() == 10);
  CHECK(*image.begin() == 1);
  CHECK(*image.rbegin() == 10);
}
