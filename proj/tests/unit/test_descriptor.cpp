#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "gbd/descriptor.hpp"
#include "support.hpp"

using namespace gbd;

namespace {

void same_window(const Matrix& a, const Matrix& b, const Window& w) {
  for (Vertex i = w.lo; i <= w.hi; ++i)
    for (Vertex j = w.lo; j <= w.hi; ++j) CHECK(a.at(i, j) == b.at(i, j));
}

}  // namespace

TEST_CASE("banded descriptors") {
  nlohmann::json j = nlohmann::json::parse(R"({"kind":"banded","index_set":"Z","offsets":[-1,0,1],
      "entries":{"-1":1,"0":2,"1":1},"overrides":[{"row":0,"offset":0,"value":3}]})");
  Matrix m = matrix_from_json(j);
  CHECK(m.index_set() == IndexSet::Integers);
  CHECK(m.at(0, 0) == 3);
  CHECK(m.at(1, 1) == 2);
  CHECK(m.at(4, 3) == 1);
  CHECK(m.at(4, 6) == 0);
  Matrix again = matrix_from_json(m.descriptor());
  CHECK(again.descriptor() == m.descriptor());
  same_window(m, again, Window{-5, 5});
}

TEST_CASE("row-rule descriptors reproduce A5") {
  nlohmann::json j = nlohmann::json::parse(R"({"kind":"rows","index_set":"N","rules":[
      {"rows":{"eq":1},"entries":[{"ray_from":1,"step":1,"value":1}]},
      {"rows":{"ge":2},"entries":[{"rel":-1,"value":1}]}]})");
  Matrix m = matrix_from_json(j);
  same_window(m, catalog_get("A5").matrix(), Window{1, 12});
  CHECK(m.row(1, Window{1, 5}).support_exceeds_window);
  CHECK(matrix_from_json(m.descriptor()).descriptor() == m.descriptor());
}

TEST_CASE("catalog descriptors") {
  Matrix m = matrix_from_json({{"kind", "catalog"}, {"name", "A1"}, {"params", {{"a", 2}, {"b", 3}}}});
  same_window(m, catalog_get("A1", {{"a", 2}, {"b", 3}}).matrix(), Window{-5, 5});
}

TEST_CASE("malformed descriptors are configuration errors") {
  CHECK_THROWS_AS(matrix_from_json({{"kind", "nope"}}), ConfigError);
  CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(R"({"kind":"banded","index_set":"Q","offsets":[0],"entries":{"0":1}})")),
                  ConfigError);
  CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse(R"({"kind":"banded","index_set":"N","offsets":[0],"entries":{"0":-1}})")),
                  Error);
}

TEST_CASE("diagram documents round-trip") {
  nlohmann::json doc = nlohmann::json::parse(R"({"matrix":{"kind":"banded","index_set":"Z","offsets":[-1,1],
      "entries":{"-1":1,"1":2}},"band":{"t":1,"L":3},"name":"walk"})");
  Diagram d = diagram_from_json(doc);
  CHECK(d.name() == "walk");
  REQUIRE(d.band());
  CHECK(d.band()->t(4) == 1);
  Diagram again = diagram_from_json(diagram_to_json(d));
  CHECK(diagram_to_json(again) == diagram_to_json(d));
  same_window(again.matrix(0), d.matrix(0), Window{-4, 4});
}

TEST_CASE("loading diagrams from references, files and inline JSON") {
  DiagramSource c = load_diagram("catalog:A5");
  REQUIRE(c.entry);
  CHECK(c.entry->id == "A5");

  const std::string path = "gbd_descriptor_test.json";
  {
    std::ofstream f(path);
    f << R"({"kind":"banded","index_set":"N","offsets":[0,1],"entries":{"0":1,"1":1}})";
  }
  DiagramSource fromfile = load_diagram(path);
  CHECK_FALSE(fromfile.entry);
  CHECK(fromfile.diagram.matrix(0).at(3, 4) == 1);
  std::remove(path.c_str());

  DiagramSource inl = load_diagram(R"({"kind":"banded","index_set":"N","offsets":[0],"entries":{"0":5}})");
  CHECK(inl.diagram.matrix(0).at(2, 2) == 5);
  CHECK_THROWS_AS(load_diagram("does-not-exist.json"), ConfigError);
}
