#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"

namespace {

struct Result {
  int code = 0;
  std::string out, err;
  nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Result r;
  r.code = gbd::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace

TEST_CASE("analyze reports the Perron value and class") {
  Result r = run({"analyze", "--diagram", "catalog:A5", "--horizon", "30"});
  REQUIRE(r.code == 0);
  nlohmann::json j = r.json();
  CHECK(j["lambda"].get<double>() == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(j["class"] == "PositiveRecurrent");
  CHECK(j["config"]["subcommand"] == "analyze");
  CHECK(j.contains("version"));
}

TEST_CASE("exit codes") {
  CHECK(run({"analyze", "--diagram", "catalog:A1?a=0"}).code == 2);
  CHECK(run({"analyze", "--diagram", "catalog:Nope"}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"analyze", "--diagram", "catalog:A5", "--window", "9:1"}).code == 2);
  CHECK(run({"analyze", "--diagram", "catalog:A5", "--window", "nine"}).code == 2);

  Result inf = run({"analyze", "--diagram", "catalog:InfinitePerron", "--horizon", "30"});
  CHECK(inf.code == 1);
  CHECK(nlohmann::json::parse(inf.out.empty() ? inf.err : inf.out).dump().find("DivergenceDetected") != std::string::npos);

  Result nm = run({"measure", "--diagram", "catalog:NoMeasure", "--mode", "inverse-limit", "--depth", "3"});
  CHECK(nm.code == 1);
  CHECK((nm.out + nm.err).find("ConeCollapse") != std::string::npos);
}

TEST_CASE("identical seeds give identical reports") {
  const std::vector<std::string> args{"walk", "--diagram", "catalog:A1", "--steps", "50", "--walkers", "4", "--seed", "17"};
  Result a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  std::vector<std::string> other = args;
  other.back() = "18";
  CHECK(run(other).out != a.out);
}

TEST_CASE("GBD_TOL sets the default tolerance") {
  setenv("GBD_TOL", "1e-7", 1);
  Result r = run({"catalog", "list"});
  unsetenv("GBD_TOL");
  REQUIRE(r.code == 0);
  CHECK(r.json()["config"]["tol"].get<double>() == doctest::Approx(1e-7));
  CHECK(run({"catalog", "list", "--tol", "1e-5"}).json()["config"]["tol"].get<double>() == doctest::Approx(1e-5));
  setenv("GBD_TOL", "abc", 1);
  CHECK(run({"catalog", "list"}).code == 2);
  unsetenv("GBD_TOL");
}

TEST_CASE("verify passes on catalog entries") {
  for (const char* ref : {"catalog:A1", "catalog:A5", "catalog:SlantedOrder"}) {
    CAPTURE(ref);
    Result r = run({"verify", "--diagram", ref});
    CHECK(r.code == 0);
  }
}

TEST_CASE("other subcommands produce reports") {
  CHECK(run({"heights", "--diagram", "catalog:A5"}).code == 0);
  CHECK(run({"vershik", "--diagram", "catalog:SlantedOrder", "--steps", "5"}).code == 0);
  CHECK(run({"witness", "--diagram", "catalog:A1", "--kind", "transitive"}).code == 0);
  Result dot = run({"render", "--diagram", "catalog:A5", "--output", "dot"});
  CHECK(dot.code == 0);
  CHECK(dot.out.find("digraph") != std::string::npos);
  Result show = run({"catalog", "show", "A4"});
  REQUIRE(show.code == 0);
  CHECK(show.json()["entry"]["id"] == "A4");
  Result table = run({"catalog", "list", "--output", "table"});
  CHECK(table.code == 0);
  CHECK(table.out.find("A7") != std::string::npos);
}
