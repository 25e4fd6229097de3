#pragma once

#include <optional>
#include <string>

#include "gbd/catalog.hpp"

namespace gbd {

// JSON matrix descriptors:
//   {"kind":"banded","index_set":"Z","offsets":[-1,0,1],"entries":{"-1":1,"0":2,"1":1},
//    "overrides":[{"row":0,"offset":0,"value":3}]}
//   {"kind":"rows","index_set":"N","rules":[{"rows":{"eq":1}|{"ge":2}|{"range":[a,b]},
//    "entries":[{"abs":1,"value":1},{"rel":-1,"value":1},{"ray_from":1,"step":1,"value":1}]}]}
//   {"kind":"catalog","name":"A1","params":{"a":1,"b":1}}
//   {"kind":"labels","table":{...},"parity":0}
// The descriptor of a parsed matrix is the normalized input, so parsing it again reproduces it.
Matrix matrix_from_json(const nlohmann::json& j);

// {"matrix": <descriptor>, "band": {"t": 1, "L": 3}, "name": "..."}; a bare matrix descriptor is accepted.
Diagram diagram_from_json(const nlohmann::json& j);
nlohmann::json diagram_to_json(const Diagram& d);

struct DiagramSource {
  Diagram diagram;
  std::optional<CatalogEntry> entry;
  nlohmann::json descriptor;
};

// "catalog:<id>?k=v", a path to a JSON file, or an inline JSON object.
DiagramSource load_diagram(const std::string& spec);

nlohmann::json read_json_file(const std::string& path);

}  // namespace gbd
