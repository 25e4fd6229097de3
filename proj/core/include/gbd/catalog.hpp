#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gbd/diagram.hpp"
#include "gbd/order.hpp"
#include "gbd/spectral.hpp"

namespace gbd {

// Closed-form data attached to a catalog entry, independent of the numeric routines.
struct Oracle {
  std::optional<EigenPair> pair;       // Perron eigenpair
  std::optional<EigenPair> secondary;  // second eigenpair with positive vectors, when known
  bool lambda_derived = false;         // lambda solved from an implicit equation
  std::optional<RecurrenceClass> recurrence;
  bool recurrence_derived = false;     // classification derived here rather than quoted
  std::optional<double> xi_sum;        // infinity when the sum diverges
  std::optional<Rational> xi_sum_exact;
  std::optional<double> eta_dot_xi;    // infinity when divergent
  int period = 1;
  std::vector<std::string> properties;

  bool probability() const { return xi_sum && std::isfinite(*xi_sum); }
  TailModel xi_tail() const;
  TailModel eta_dot_xi_tail() const;
};

struct CatalogEntry {
  std::string id;
  nlohmann::json params = nlohmann::json::object();
  std::string summary;
  Diagram diagram;
  std::optional<OrderedDiagram> ordered;
  Oracle oracle;
  Vertex anchor = 1;  // reference vertex for spectral probes

  bool stationary() const { return diagram.is_stationary(); }
  Matrix matrix() const { return diagram.matrix(0); }
  // "catalog:<id>?k=v&..." reference that rebuilds this entry.
  std::string reference() const;
  nlohmann::json describe() const;
};

struct CatalogInfo {
  std::string id;
  std::string summary;
  nlohmann::json defaults;
  bool ordered = false;
};

const std::vector<CatalogInfo>& catalog_index();
// Throws ConfigError for unknown ids or parameters and ParamOutOfRange for invalid values.
CatalogEntry catalog_get(const std::string& id, const nlohmann::json& params = nlohmann::json::object());
// Accepts "catalog:A1?a=1&b=2" or "A1?a=1&b=2".
std::pair<std::string, nlohmann::json> parse_catalog_ref(const std::string& ref);
CatalogEntry catalog_resolve(const std::string& ref);
bool is_catalog_ref(const std::string& s);

// Tail that keeps the vertex when a vertical edge exists and otherwise moves to the nearest target.
TailRule nearest_tail(const Diagram& d);

// Two diagrams over Z and N with the vertex and edge bijections between them.
struct IsoPair {
  Diagram z;
  Diagram n;
  IsoMaps maps;
  std::function<Vertex(Vertex)> g;  // Z -> N (1-indexed)
};

IsoPair iso_pair();

}  // namespace gbd
