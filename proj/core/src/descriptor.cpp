#include "gbd/descriptor.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace gbd {

namespace {

using nlohmann::json;

BigInt entry_value(const json& v) {
  if (v.is_number_unsigned() || v.is_number_integer()) {
    if (v.get<std::int64_t>() < 0) throw InvalidMatrix("negative matrix entry");
    return BigInt(v.get<std::int64_t>());
  }
  if (v.is_string()) {
    BigInt x(v.get<std::string>());
    if (x < 0) throw InvalidMatrix("negative matrix entry");
    return x;
  }
  throw ConfigError("matrix entries must be integers or decimal strings");
}

json value_json(const BigInt& x) {
  if (x <= BigInt(std::numeric_limits<std::int64_t>::max())) return json(x.convert_to<std::int64_t>());
  return json(x.str());
}

Matrix banded_from_json(const json& j) {
  const IndexSet s = index_set_from_string(j.value("index_set", "Z"));
  std::map<int, BigInt> base;
  for (const auto& o : j.at("offsets")) base[o.get<int>()] = 0;
  if (base.empty()) throw InvalidMatrix("banded matrix needs offsets");
  for (const auto& [k, v] : j.at("entries").items()) {
    int o = std::stoi(k);
    if (!base.count(o)) throw ConfigError("entry for offset " + k + " not listed in offsets");
    base[o] = entry_value(v);
  }
  std::map<std::pair<Vertex, int>, BigInt> overrides;
  if (j.contains("overrides"))
    for (const auto& ov : j.at("overrides")) {
      int o = ov.at("offset").get<int>();
      if (!base.count(o)) throw ConfigError("override offset " + std::to_string(o) + " not listed in offsets");
      overrides[{ov.at("row").get<Vertex>(), o}] = entry_value(ov.at("value"));
    }
  std::vector<int> offs;
  json norm_entries = json::object();
  for (const auto& [o, v] : base) {
    offs.push_back(o);
    norm_entries[std::to_string(o)] = value_json(v);
  }
  json norm_over = json::array();
  for (const auto& [k, v] : overrides) norm_over.push_back({{"row", k.first}, {"offset", k.second}, {"value", value_json(v)}});
  json desc{{"kind", "banded"}, {"index_set", to_string(s)}, {"offsets", offs}, {"entries", norm_entries}};
  if (!norm_over.empty()) desc["overrides"] = norm_over;
  auto rule = [base, overrides](int o, Vertex i) -> BigInt {
    auto it = overrides.find({i, o});
    return it != overrides.end() ? it->second : base.at(o);
  };
  return Matrix::banded(s, offs, rule, desc);
}

struct RowRule {
  LabelRule::Cond cond = LabelRule::Cond::Eq;
  Vertex a = 1, b = 1;
  struct Item {
    enum class Kind { Abs, Rel, Ray } kind = Kind::Abs;
    Vertex value = 0;
    Vertex step = 1;
    BigInt weight;
  };
  std::vector<Item> items;

  bool matches(Vertex i) const {
    switch (cond) {
      case LabelRule::Cond::Eq: return i == a;
      case LabelRule::Cond::Ge: return i >= a;
      case LabelRule::Cond::Range: return i >= a && i <= b;
    }
    return false;
  }
};

Matrix rows_from_json(const json& j) {
  const IndexSet s = index_set_from_string(j.value("index_set", "N"));
  std::vector<RowRule> rules;
  json norm_rules = json::array();
  for (const auto& r : j.at("rules")) {
    RowRule rule;
    const auto& sel = r.at("rows");
    json nsel;
    if (sel.contains("eq")) {
      rule.cond = LabelRule::Cond::Eq;
      rule.a = rule.b = sel.at("eq").get<Vertex>();
      nsel = {{"eq", rule.a}};
    } else if (sel.contains("ge")) {
      rule.cond = LabelRule::Cond::Ge;
      rule.a = sel.at("ge").get<Vertex>();
      nsel = {{"ge", rule.a}};
    } else if (sel.contains("range")) {
      rule.cond = LabelRule::Cond::Range;
      rule.a = sel.at("range").at(0).get<Vertex>();
      rule.b = sel.at("range").at(1).get<Vertex>();
      if (rule.b < rule.a) throw InvalidWindow("empty row range");
      nsel = {{"range", {rule.a, rule.b}}};
    } else {
      throw ConfigError("row selector needs eq, ge or range");
    }
    json nitems = json::array();
    for (const auto& it : r.at("entries")) {
      RowRule::Item item;
      item.weight = entry_value(it.at("value"));
      if (it.contains("abs")) {
        item.value = it.at("abs").get<Vertex>();
        nitems.push_back({{"abs", item.value}, {"value", value_json(item.weight)}});
      } else if (it.contains("rel")) {
        item.kind = RowRule::Item::Kind::Rel;
        item.value = it.at("rel").get<Vertex>();
        nitems.push_back({{"rel", item.value}, {"value", value_json(item.weight)}});
      } else if (it.contains("ray_from")) {
        item.kind = RowRule::Item::Kind::Ray;
        item.value = it.at("ray_from").get<Vertex>();
        item.step = it.value("step", Vertex{1});
        if (item.step < 1) throw ConfigError("ray step must be positive");
        nitems.push_back({{"ray_from", item.value}, {"step", item.step}, {"value", value_json(item.weight)}});
      } else {
        throw ConfigError("row entry needs abs, rel or ray_from");
      }
      rule.items.push_back(std::move(item));
    }
    norm_rules.push_back({{"rows", nsel}, {"entries", nitems}});
    rules.push_back(std::move(rule));
  }
  json desc{{"kind", "rows"}, {"index_set", to_string(s)}, {"rules", norm_rules}};

  auto rule_index = [rules](Vertex i) -> int {
    for (std::size_t k = 0; k < rules.size(); ++k)
      if (rules[k].matches(i)) return static_cast<int>(k);
    return -1;
  };
  auto rows = [rules, rule_index, s](Vertex i) {
    RowPattern p;
    const int k = rule_index(i);
    if (k < 0) return p;
    std::map<Vertex, BigInt> merged;
    for (const auto& it : rules[k].items) {
      if (it.kind == RowRule::Item::Kind::Ray) {
        p.rays.push_back({it.value, it.step, it.weight});
      } else {
        Vertex t = it.kind == RowRule::Item::Kind::Rel ? i + it.value : it.value;
        if (in_index_set(s, t)) merged[t] += it.weight;
      }
    }
    for (auto& [t, v] : merged) p.finite.push_back({t, v});
    return p;
  };
  bool cols_finite = true;
  std::optional<Vertex> reach = Vertex{0};
  for (const auto& r : rules)
    for (const auto& it : r.items) {
      if (it.kind != RowRule::Item::Kind::Rel) reach.reset();
      else if (reach) reach = std::max(*reach, std::abs(it.value));
      if (it.kind != RowRule::Item::Kind::Rel && r.cond == LabelRule::Cond::Ge) cols_finite = false;
    }
  auto cols = [rules, rule_index, s](Vertex j) {
    std::map<Vertex, BigInt> acc;
    for (std::size_t k = 0; k < rules.size(); ++k) {
      const RowRule& r = rules[k];
      for (const auto& it : r.items) {
        bool all_rows = false;
        if (it.kind == RowRule::Item::Kind::Rel) {
          Vertex i = j - it.value;
          if (in_index_set(s, i) && rule_index(i) == static_cast<int>(k)) acc[i] += it.weight;
        } else if (it.kind == RowRule::Item::Kind::Abs) {
          all_rows = it.value == j;
        } else {
          all_rows = j >= it.value && (j - it.value) % it.step == 0;
        }
        if (!all_rows) continue;
        if (r.cond == LabelRule::Cond::Ge)
          throw ColumnSupportUnbounded("column " + std::to_string(j) + " has infinitely many non-zero entries");
        for (Vertex i = r.a; i <= r.b; ++i)
          if (in_index_set(s, i) && rule_index(i) == static_cast<int>(k)) acc[i] += it.weight;
      }
    }
    std::vector<Entry> out;
    for (auto& [i, v] : acc)
      if (v != 0) out.push_back({i, v});
    return out;
  };
  return Matrix::from_rows(s, rows, cols, desc, cols_finite, reach);
}

}  // namespace

Matrix matrix_from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "banded") return banded_from_json(j);
    if (kind == "rows") return rows_from_json(j);
    if (kind == "labels") return LabelTable::from_json(j.at("table")).matrix(j.value("parity", 0));
    if (kind == "catalog") {
      const std::string name = j.at("name").get<std::string>();
      CatalogEntry e = catalog_get(name, j.value("params", json::object()));
      const int level = j.value("level", 0);
      if (!e.stationary() && !j.contains("level"))
        throw ConfigError("catalog diagram '" + name + "' is not stationary; give a level");
      return e.diagram.matrix(level);
    }
    throw ConfigError("unknown matrix kind '" + kind + "'");
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("matrix descriptor: ") + ex.what());
  }
}

Diagram diagram_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("kind") && j.at("kind") == "catalog" && !j.contains("level"))
      return catalog_get(j.at("name").get<std::string>(), j.value("params", json::object())).diagram;
    if (j.contains("kind") && j.at("kind") == "label_table") return LabelTable::from_json(j).diagram();
    const json& mj = j.contains("matrix") ? j.at("matrix") : j;
    if (mj.contains("kind") && mj.at("kind") == "catalog" && !mj.contains("level"))
      return catalog_get(mj.at("name").get<std::string>(), mj.value("params", json::object())).diagram;
    Matrix m = matrix_from_json(mj);
    std::optional<BandSpec> band;
    if (j.contains("band")) {
      const auto& b = j.at("band");
      band = BandSpec::uniform(b.at("t").get<Vertex>(), entry_value(b.at("L")));
    }
    return Diagram::stationary(m, band, j.value("name", std::string{}));
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("diagram descriptor: ") + ex.what());
  }
}

nlohmann::json diagram_to_json(const Diagram& d) {
  if (!d.is_stationary()) throw ConfigError("only stationary diagrams have a JSON descriptor");
  json j{{"matrix", d.matrix(0).descriptor()}};
  if (d.band()) j["band"] = {{"t", d.band()->t(0)}, {"L", value_json(d.band()->L(0))}};
  if (!d.name().empty()) j["name"] = d.name();
  return j;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError("'" + path + "': " + ex.what());
  }
}

DiagramSource load_diagram(const std::string& spec) {
  DiagramSource src;
  if (is_catalog_ref(spec)) {
    src.entry = catalog_resolve(spec);
    src.diagram = src.entry->diagram;
    src.descriptor = {{"kind", "catalog"}, {"name", src.entry->id}, {"params", src.entry->params}};
    return src;
  }
  json j;
  if (!spec.empty() && spec.front() == '{') {
    try {
      j = json::parse(spec);
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError(std::string("inline diagram: ") + ex.what());
    }
  } else {
    j = read_json_file(spec);
  }
  const json& mj = j.contains("matrix") ? j.at("matrix") : j;
  if (mj.contains("kind") && mj.at("kind") == "catalog" && !mj.contains("level")) {
    src.entry = catalog_get(mj.at("name").get<std::string>(), mj.value("params", json::object()));
    src.diagram = src.entry->diagram;
  } else {
    src.diagram = diagram_from_json(j);
  }
  src.descriptor = j;
  return src;
}

}  // namespace gbd
