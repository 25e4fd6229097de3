#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "gbd/gbd.hpp"

namespace gbd::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string diagram;
  std::string output = "json";
  std::uint64_t seed = 1;
  std::string window;
  double tol = 1e-10;
  int depth = 6;
  int horizon = 60;
  int width = 400;
  std::optional<Vertex> anchor;
  double ceiling = 1e6;
  bool exact = false;
  // measure
  std::string mode = "eigen";
  std::string cylinder;
  int gap = 40;
  std::string report = "json";
  std::string normalization = "probability";
  // vershik
  std::string order = "catalog";
  int steps = 10;
  std::string path;
  bool inverse = false;
  std::optional<Vertex> vertex;
  // walk
  int walkers = 2000;
  // witness
  std::string kind = "transitive";
  int count = 20;
  int length = 3;
  int period = 1;
  double epsilon = 0.125;
  Vertex w = 0;
  std::string sign = "plus";
  // catalog
  std::string id;
};

double env_tolerance(double fallback) {
  if (const char* s = std::getenv("GBD_TOL")) {
    try {
      double v = std::stod(s);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("GBD_TOL must be a positive number");
  }
  return fallback;
}

json base_config(const std::string& sub, const Options& o) {
  json c{{"subcommand", sub}, {"output", o.output}, {"seed", o.seed}, {"tol", o.tol}};
  if (!o.diagram.empty()) c["diagram"] = o.diagram;
  if (!o.window.empty()) c["window"] = o.window;
  return c;
}

json envelope(const json& config) { return {{"config", config}, {"version", kVersion}, {"seed", config.at("seed")}}; }

Window parse_window(const std::string& s, IndexSet set) {
  const auto colon = s.find(':', s.empty() ? 0 : 1);
  if (colon == std::string::npos) throw ConfigError("window must be lo:hi, got '" + s + "'");
  Vertex lo, hi;
  try {
    lo = std::stoll(s.substr(0, colon));
    hi = std::stoll(s.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("window must be lo:hi, got '" + s + "'");
  }
  if (hi < lo) throw ConfigError("window must satisfy lo <= hi, got '" + s + "'");
  return make_window(set, lo, hi);
}

Vertex default_anchor(const DiagramSource& src) {
  if (src.entry) return src.entry->anchor;
  return src.diagram.index_set() == IndexSet::Integers ? 0 : 1;
}

Window window_or(const Options& o, const DiagramSource& src, Window fallback_n, Window fallback_z) {
  if (!o.window.empty()) return parse_window(o.window, src.diagram.index_set());
  return src.diagram.index_set() == IndexSet::Integers ? fallback_z : fallback_n;
}

json num(double x) { return std::isfinite(x) ? json(x) : json(x > 0 ? "infinity" : "nan"); }

json big(const BigInt& x) { return x.str(); }

void print_table(std::ostream& out, const json& j, const std::string& prefix = "") {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_object() || (v.is_array() && !v.empty() && v.front().is_structured()))
        print_table(out, v, prefix + k + ".");
      else
        out << std::left << std::setw(32) << (prefix + k) << ' ' << (v.is_string() ? v.get<std::string>() : v.dump())
            << '\n';
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) print_table(out, j[i], prefix + std::to_string(i) + ".");
  } else {
    out << prefix << ' ' << j.dump() << '\n';
  }
}

void emit(std::ostream& out, const Options& o, const json& report) {
  if (o.output == "table") print_table(out, report);
  else out << report.dump(2) << '\n';
}

std::optional<EigenPair> eigenpair_for(const DiagramSource& src, const Options& o, Vertex anchor) {
  if (src.entry && src.entry->oracle.pair) return src.entry->oracle.pair;
  if (!src.diagram.is_stationary()) return std::nullopt;
  const Matrix m = src.diagram.matrix(0);
  const Window w = window_around(m.index_set(), anchor, o.width / 2);
  PerronReport rep = perron_estimate(m, anchor, o.horizon, w, o.ceiling);
  EigenPair p;
  p.lambda = rep.lambda;
  p.xi = right_eigenvector(m, rep.lambda, std::nullopt, w, anchor, o.tol);
  p.eta = left_eigenvector(m, rep.lambda, std::nullopt, w, anchor, o.tol);
  p.provenance = "windowed";
  return p;
}

FinitePath path_from_json(const json& j) {
  FinitePath p;
  if (j.contains("edges"))
    for (const auto& e : j.at("edges")) p.edges.push_back(edge_from_json(e));
  p.start = j.value("start", p.edges.empty() ? Vertex{1} : p.edges.front().source);
  return p;
}

json path_json(const FinitePath& p) {
  json edges = json::array();
  for (const auto& e : p.edges) edges.push_back(to_json(e));
  return {{"start", p.source()}, {"edges", edges}};
}

TailRule tail_from_json(const json& j, const OrderedDiagram& od) {
  const std::string k = j.value("kind", "default");
  if (k == "default") return od.default_tail();
  if (k == "vertical") return TailRule::vertical(j.value("copy", 0));
  if (k == "shift") return TailRule::shift(j.value("offset", Vertex{1}));
  if (k == "minimal") return TailRule::minimal_out();
  if (k == "maximal") return TailRule::maximal_out();
  throw ConfigError("unknown tail kind '" + k + "'");
}

json load_json_arg(const std::string& s) {
  if (!s.empty() && (s.front() == '{' || s.front() == '[')) {
    try {
      return json::parse(s);
    } catch (const nlohmann::json::exception& ex) {
      throw ConfigError(std::string("inline JSON: ") + ex.what());
    }
  }
  return read_json_file(s);
}

// analyze ------------------------------------------------------------------

int cmd_analyze(const Options& o, std::ostream& out) {
  json cfg = base_config("analyze", o);
  cfg["horizon"] = o.horizon;
  cfg["width"] = o.width;
  cfg["exact"] = o.exact;
  DiagramSource src = load_diagram(o.diagram);
  if (!src.diagram.is_stationary()) throw ConfigError("analyze needs a stationary diagram");
  const Matrix m = src.diagram.matrix(0);
  const Vertex anchor = o.anchor.value_or(default_anchor(src));
  cfg["anchor"] = anchor;
  json rep = envelope(cfg);
  const Window w = window_around(m.index_set(), anchor, o.width / 2);
  PerronReport pr = perron_scan(m, anchor, {{o.horizon, w}}, o.ceiling);
  rep["lambda"] = num(pr.lambda);
  rep["lambda_sequence"] = pr.ratio_sequence;
  rep["root_sequence"] = pr.root_sequence;
  rep["n_values"] = pr.n_values;
  rep["root_lower_bound"] = pr.root_lower_bound;
  rep["period"] = pr.period;
  if (pr.diverged) {
    json radii = json::array();
    for (Vertex r : {10, 20, 30}) {
      auto tr = truncated_spectral_radius(m, window_around(m.index_set(), anchor, r));
      radii.push_back({{"width", 2 * r + 1}, {"estimate", tr.estimate}, {"lower", tr.lower}, {"upper", tr.upper}});
    }
    rep["truncated_radius"] = radii;
    rep["error"] = {{"kind", "DivergenceDetected"},
                    {"message", "Perron estimates exceed the ceiling " + std::to_string(o.ceiling)}};
    emit(out, o, rep);
    return 1;
  }
  double lambda = pr.lambda;
  ClassifyOptions copts;
  if (src.entry) {
    const Oracle& orc = src.entry->oracle;
    if (orc.pair) {
      lambda = orc.pair->lambda;
      rep["lambda_oracle"] = orc.pair->lambda;
      if (o.exact && orc.pair->lambda_exact) rep["lambda_exact"] = orc.pair->lambda_exact->str();
      copts.eta_dot_xi = summability([&](Vertex v) { return orc.pair->xi(v) * orc.pair->eta(v); },
                                     m.index_set(), anchor, orc.eta_dot_xi_tail());
    }
    copts.analytic = orc.recurrence;
    rep["lambda_derived"] = orc.lambda_derived;
  }
  RecurrenceReport rr = classify_recurrence(m, lambda, anchor, o.horizon, o.tol, copts);
  rep["class"] = to_string(rr.cls);
  rep["class_numeric"] = to_string(rr.numeric);
  rep["class_analytic"] = rr.analytic;
  rep["consistent"] = rr.consistent;
  rep["certificate"] = rr.certificate;
  rep["partial_sum"] = rr.partial_sums.empty() ? 0.0 : rr.partial_sums.back();
  rep["eta_dot_xi"] = rr.eta_dot_xi ? json(*rr.eta_dot_xi)
                                    : (copts.eta_dot_xi ? json(to_string(copts.eta_dot_xi->status)) : json(nullptr));
  ColumnSumBounds b = column_sum_bounds(m, window_around(m.index_set(), anchor, 20));
  rep["bounds"] = {{"column_sum_inf", b.inf}, {"column_sum_sup", b.sup}, {"equal_column_sums", b.exact}};
  if (b.exact_value) rep["bounds"]["column_sum"] = big(*b.exact_value);
  emit(out, o, rep);
  return 0;
}

// measure ------------------------------------------------------------------

int cmd_measure(const Options& o, std::ostream& out) {
  json cfg = base_config("measure", o);
  cfg["mode"] = o.mode;
  cfg["depth"] = o.depth;
  cfg["gap"] = o.gap;
  cfg["normalization"] = o.normalization;
  if (!o.cylinder.empty()) cfg["cylinder"] = o.cylinder;
  if (o.mode != "eigen" && o.mode != "inverse-limit") throw ConfigError("mode must be eigen or inverse-limit");
  if (o.normalization != "probability" && o.normalization != "sigma-finite")
    throw ConfigError("normalization must be probability or sigma-finite");
  DiagramSource src = load_diagram(o.diagram);
  const Window w = window_or(o, src, Window{1, 30}, Window{-10, 10});
  const Vertex anchor = o.anchor.value_or(default_anchor(src));
  std::optional<FinitePath> cyl;
  if (!o.cylinder.empty()) cyl = path_from_json(load_json_arg(o.cylinder));
  if (cyl && !src.diagram.valid(*cyl)) throw InvalidPath("cylinder is not a path of the diagram");
  json rep = envelope(cfg);
  MeasureVectors mv;
  if (o.mode == "eigen") {
    auto pair = eigenpair_for(src, o, anchor);
    if (!pair) throw ConfigError("eigen mode needs a stationary diagram");
    mv = measure_from_eigenpair(src.diagram, *pair, o.depth, w);
    rep["lambda"] = pair->lambda;
    rep["provenance"] = pair->provenance;
    if (cyl) {
      CylinderMeasure cm = stationary_cylinder_measure(*pair, *cyl);
      rep["cylinder_measure"] = cm.value;
      if (cm.exact) rep["cylinder_measure_exact"] = cm.exact->str();
    }
  } else {
    InverseLimitOptions opts;
    opts.depth_gap = o.gap;
    opts.max_gap = std::max(o.gap, 160);
    if (o.normalization == "sigma-finite") {
      opts.normalization = Normalization::SigmaFinite;
      opts.anchor = anchor;
    }
    try {
      mv = invariant_vectors(src.diagram, o.depth, w, o.tol, opts);
    } catch (const ConeCollapse& ex) {
      rep["error"] = {{"kind", ex.kind()}, {"message", ex.what()}, {"label", "evidence"}};
      if (src.entry) rep["error"]["catalog_properties"] = src.entry->oracle.properties;
      emit(out, o, rep);
      return 1;
    }
    rep["converged"] = mv.converged;
    rep["cauchy"] = mv.cauchy;
    rep["depth_gap"] = mv.depth_gap;
    rep["inner_mass"] = mv.inner_mass;
    if (cyl) rep["cylinder_measure"] = mv.at(static_cast<int>(cyl->length()), cyl->range());
  }
  rep["window"] = {mv.interior.lo, mv.interior.hi};
  rep["residuals"] = mv.residuals;
  json levels = json::array();
  for (int n = 0; n < mv.levels(); ++n) {
    json vals = json::array();
    for (Vertex v = mv.interior.lo; v <= mv.interior.hi; ++v) vals.push_back(mv.at(n, v));
    levels.push_back({{"n", n}, {"p", vals}});
  }
  rep["levels"] = levels;
  if (o.report == "table") {
    std::ostream& s = out;
    s << "# " << envelope(cfg).dump() << '\n';
    s << std::setw(6) << "v";
    for (int n = 0; n < mv.levels(); ++n) s << std::setw(16) << ("p" + std::to_string(n));
    s << '\n';
    for (Vertex v = mv.interior.lo; v <= mv.interior.hi; ++v) {
      s << std::setw(6) << v;
      for (int n = 0; n < mv.levels(); ++n) s << std::setw(16) << std::setprecision(8) << mv.at(n, v);
      s << '\n';
    }
    return 0;
  }
  emit(out, o, rep);
  return 0;
}

// vershik ------------------------------------------------------------------

OrderedDiagram ordered_for(const Options& o, DiagramSource& src) {
  if (o.order.rfind("file:", 0) == 0) {
    LabelTable t = LabelTable::from_json(read_json_file(o.order.substr(5)));
    Diagram d = t.diagram();
    return OrderedDiagram(d, t.order(), nearest_tail(d));
  }
  if (o.diagram.empty()) throw ConfigError("--diagram is required unless --order file:<labels.json> is given");
  src = load_diagram(o.diagram);
  if (o.order == "catalog") {
    if (src.entry && src.entry->ordered) return *src.entry->ordered;
    return OrderedDiagram(src.diagram, EdgeOrder::left_to_right(), nearest_tail(src.diagram));
  }
  TailRule tail = src.entry && src.entry->ordered ? src.entry->ordered->default_tail() : nearest_tail(src.diagram);
  if (o.order == "left-to-right") return OrderedDiagram(src.diagram, EdgeOrder::left_to_right(), tail);
  if (o.order == "right-to-left") return OrderedDiagram(src.diagram, EdgeOrder::right_to_left(), tail);
  if (o.order == "slanted") return OrderedDiagram(src.diagram, EdgeOrder::slanted_extremes(), tail);
  throw ConfigError("unknown order '" + o.order + "'");
}

OrderedPath initial_path(const Options& o, const OrderedDiagram& od, Vertex fallback) {
  if (!o.path.empty()) {
    json j = load_json_arg(o.path);
    FinitePath p = path_from_json(j);
    if (!od.diagram().valid(p)) throw InvalidPath("--path is not a path of the diagram");
    return OrderedPath::from(p, tail_from_json(j.value("tail", json::object()), od));
  }
  return OrderedPath::from(minimal_path_into(od, o.vertex.value_or(fallback), o.depth), od.default_tail());
}

int cmd_vershik(const Options& o, std::ostream& out) {
  json cfg = base_config("vershik", o);
  cfg["order"] = o.order;
  cfg["steps"] = o.steps;
  cfg["depth"] = o.depth;
  cfg["inverse"] = o.inverse;
  if (!o.path.empty()) cfg["path"] = o.path;
  DiagramSource src;
  OrderedDiagram od = ordered_for(o, src);
  const Vertex fallback = od.diagram().index_set() == IndexSet::Integers ? 0 : 1;
  if (o.vertex) cfg["vertex"] = *o.vertex;
  out << envelope(cfg).dump() << '\n';
  OrderedPath x = initial_path(o, od, fallback);
  const int probe = std::max<int>(o.depth, static_cast<int>(x.prefix.size())) + 2;
  out << json{{"step", 0}, {"path", to_json(od, x, probe)}}.dump() << '\n';
  for (int k = 1; k <= o.steps; ++k) {
    StepResult r = o.inverse ? vershik_inverse_step(od, x, probe) : vershik_step(od, x, probe);
    if (!r.ok()) {
      out << json{{"step", k}, {"status", "ExtremeThroughDepth"}, {"depth", probe}}.dump() << '\n';
      break;
    }
    x = r.path;
    out << json{{"step", k}, {"edited_edge", r.m}, {"path", to_json(od, x, probe)}}.dump() << '\n';
  }
  return 0;
}

// heights ------------------------------------------------------------------

int cmd_heights(const Options& o, std::ostream& out) {
  json cfg = base_config("heights", o);
  cfg["depth"] = o.depth;
  DiagramSource src = load_diagram(o.diagram);
  const Window w = window_or(o, src, Window{1, 10}, Window{-5, 5});
  json rep = envelope(cfg);
  HeightTable h(src.diagram);
  json levels = json::array();
  for (int n = 0; n <= o.depth; ++n) {
    json vals = json::object();
    for (Vertex v = w.lo; v <= w.hi; ++v) vals[std::to_string(v)] = big(h(n, v));
    levels.push_back({{"n", n}, {"H", vals}});
  }
  rep["window"] = {w.lo, w.hi};
  rep["levels"] = levels;
  if (o.output == "table") {
    out << std::setw(6) << "n";
    for (Vertex v = w.lo; v <= w.hi; ++v) out << std::setw(14) << v;
    out << '\n';
    for (int n = 0; n <= o.depth; ++n) {
      out << std::setw(6) << n;
      for (Vertex v = w.lo; v <= w.hi; ++v) out << std::setw(14) << h(n, v).str();
      out << '\n';
    }
    return 0;
  }
  emit(out, o, rep);
  return 0;
}

// walk ---------------------------------------------------------------------

int cmd_walk(const Options& o, std::ostream& out) {
  json cfg = base_config("walk", o);
  cfg["steps"] = o.steps;
  cfg["walkers"] = o.walkers;
  DiagramSource src = load_diagram(o.diagram);
  if (!src.diagram.is_stationary()) throw ConfigError("walk needs a stationary diagram");
  const Vertex start = o.vertex.value_or(default_anchor(src));
  cfg["vertex"] = start;
  if (o.walkers < 1 || o.steps < 1) throw ConfigError("walkers and steps must be positive");
  auto pair = eigenpair_for(src, o, start);
  const Matrix m = src.diagram.matrix(0);
  StochasticMatrix p = stochastic_from_eigenpair(m, *pair);
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  constexpr Vertex kRadius = 64;
  std::map<Vertex, std::vector<std::pair<Vertex, double>>> rows;
  auto row = [&](Vertex w) -> const std::vector<std::pair<Vertex, double>>& {
    auto it = rows.find(w);
    if (it != rows.end()) return it->second;
    auto r = p.row(w, window_around(m.index_set(), w, kRadius));
    double acc = 0.0;
    for (auto& [v, q] : r) q = acc += q;
    return rows.emplace(w, std::move(r)).first->second;
  };
  std::vector<int> returns(o.steps, 0);
  std::map<Vertex, long> visits;
  for (int k = 0; k < o.walkers; ++k) {
    Vertex cur = start;
    for (int n = 0; n < o.steps; ++n) {
      const auto& r = row(cur);
      if (r.empty()) throw NoPositiveSolution("walk reached a vertex without outgoing mass");
      const double u = unif(rng) * r.back().second;
      auto it = std::lower_bound(r.begin(), r.end(), u, [](const auto& a, double x) { return a.second < x; });
      cur = it == r.end() ? r.back().first : it->first;
      ++visits[cur];
      if (cur == start) ++returns[n];
    }
  }
  json rep = envelope(cfg);
  rep["lambda"] = pair->lambda;
  rep["row_window_radius"] = kRadius;
  std::vector<double> exact;
  try {
    exact = p.return_probabilities(start, o.steps);
  } catch (const ColumnSupportUnbounded&) {
  }
  json table = json::array();
  for (int n = 0; n < o.steps; ++n) {
    json row_j{{"n", n + 1}, {"empirical", static_cast<double>(returns[n]) / o.walkers}};
    if (!exact.empty()) row_j["exact"] = exact[n];
    table.push_back(row_j);
  }
  rep["return_frequency"] = table;
  json vis = json::object();
  const double total = static_cast<double>(o.walkers) * o.steps;
  for (const auto& [v, c] : visits)
    if (std::abs(v - start) <= 10) vis[std::to_string(v)] = static_cast<double>(c) / total;
  rep["visit_frequency"] = vis;
  emit(out, o, rep);
  return 0;
}

// witness ------------------------------------------------------------------

int cmd_witness(const Options& o, std::ostream& out) {
  json cfg = base_config("witness", o);
  cfg["kind"] = o.kind;
  json rep;
  if (o.kind == "transitive") {
    cfg["count"] = o.count;
    cfg["length"] = o.length;
    cfg["period"] = o.period;
    cfg["horizon"] = o.horizon;
    DiagramSource src = load_diagram(o.diagram);
    const Vertex i = o.vertex.value_or(default_anchor(src));
    cfg["vertex"] = i;
    rep = envelope(cfg);
    const Window w = window_or(o, src, Window{1, 10}, Window{-5, 5});
    std::mt19937_64 rng(o.seed);
    std::uniform_int_distribution<Vertex> pick(w.lo, w.hi);
    HeightTable h(src.diagram);
    json found = json::array();
    int ok = 0;
    for (int c = 0; c < o.count; ++c) {
      FinitePath cyl = random_path_into(src.diagram, h, pick(rng), o.length, rng);
      try {
        TransitiveWitness tw = transitive_witness(src.diagram, cyl, i, o.period, o.horizon);
        ++ok;
        found.push_back({{"cylinder", path_json(cyl)}, {"end_level", tw.end_level},
                         {"connector_length", tw.connector.length()}});
      } catch (const NoWitnessWithinHorizon& ex) {
        found.push_back({{"cylinder", path_json(cyl)}, {"error", ex.what()}});
      }
    }
    rep["witnesses"] = found;
    rep["succeeded"] = ok;
    emit(out, o, rep);
    return ok == o.count ? 0 : 1;
  }
  if (o.kind == "discontinuity" || o.kind == "extreme") {
    DiagramSource src;
    Options oo = o;
    if (oo.order.empty()) oo.order = "catalog";
    OrderedDiagram od = ordered_for(oo, src);
    const Vertex start = o.vertex.value_or(od.diagram().index_set() == IndexSet::Integers ? 0 : 1);
    cfg["vertex"] = start;
    cfg["depth"] = o.depth;
    if (o.kind == "extreme") {
      rep = envelope(cfg);
      const Window w = o.window.empty() ? Window{start, start + 5} : parse_window(o.window, od.diagram().index_set());
      ExtremePathReport er = extreme_paths(od, w, o.depth);
      rep["emptiness_certificate"] = er.emptiness_certificate;
      rep["certificate"] = er.certificate;
      auto stubs = [](const std::vector<ExtremeStub>& v) {
        json a = json::array();
        for (const auto& s : v) a.push_back({{"start", s.start}, {"length", s.edges.size()},
                                              {"died_at", s.died_at ? json(*s.died_at) : json(nullptr)}});
        return a;
      };
      rep["minimal"] = stubs(er.minimal);
      rep["maximal"] = stubs(er.maximal);
      emit(out, o, rep);
      return 0;
    }
    cfg["epsilon"] = o.epsilon;
    rep = envelope(cfg);
    OrderedPath x;
    x.start = start;
    x.tail = TailRule::maximal_out();
    try {
      DiscontinuityWitness dw = discontinuity_witness(od, x, o.epsilon, 64, std::max(o.depth, 16));
      rep["n"] = dw.n;
      rep["k"] = dw.k;
      const int show = dw.n + dw.k + 2;
      rep["x1"] = to_json(od, dw.x1, show);
      rep["x2"] = to_json(od, dw.x2, show);
      rep["distance_x1"] = dw.distance_x1;
      rep["distance_x2"] = dw.distance_x2;
      rep["image_distance"] = dw.image_distance;
    } catch (const ConditionFails& ex) {
      rep["error"] = {{"kind", ex.kind()}, {"message", ex.what()}};
      emit(out, o, rep);
      return 1;
    }
    emit(out, o, rep);
    return 0;
  }
  if (o.kind == "slanting") {
    cfg["w"] = o.w;
    cfg["sign"] = o.sign;
    if (o.path.empty()) throw ConfigError("slanting witness needs --path");
    cfg["path"] = o.path;
    if (o.sign != "plus" && o.sign != "minus") throw ConfigError("sign must be plus or minus");
    DiagramSource src = load_diagram(o.diagram);
    rep = envelope(cfg);
    FinitePath p = path_from_json(load_json_arg(o.path));
    if (!src.diagram.valid(p)) throw InvalidPath("--path is not a path of the diagram");
    SlantVerdict v = slanting_membership(src.diagram, p, o.w, o.sign == "plus" ? SlantSign::Plus : SlantSign::Minus);
    rep["consistent"] = v.consistent;
    rep["depth"] = v.depth;
    rep["violated_level"] = v.violated_level ? json(*v.violated_level) : json(nullptr);
    emit(out, o, rep);
    return 0;
  }
  throw ConfigError("unknown witness kind '" + o.kind + "'");
}

// verify -------------------------------------------------------------------

struct Check {
  std::string name;
  std::string status;  // pass, fail, skipped
  json detail;
};

template <class F>
void run_check(std::vector<Check>& checks, const std::string& name, F&& f) {
  Check c{name, "pass", json::object()};
  try {
    bool ok = f(c.detail);
    c.status = ok ? "pass" : "fail";
  } catch (const ColumnSupportUnbounded& ex) {
    c.status = "skipped";
    c.detail["reason"] = ex.what();
  } catch (const Error& ex) {
    c.status = "fail";
    c.detail["error"] = ex.what();
  }
  checks.push_back(std::move(c));
}

int cmd_verify(const Options& o, std::ostream& out) {
  json cfg = base_config("verify", o);
  cfg["depth"] = o.depth;
  DiagramSource src = load_diagram(o.diagram);
  const Diagram& d = src.diagram;
  const Vertex anchor = o.anchor.value_or(default_anchor(src));
  std::vector<Check> checks;
  const int small = std::min(o.depth, 6);
  const Window probe = d.index_set() == IndexSet::Integers ? Window{anchor - 3, anchor + 3} : Window{1, 6};

  run_check(checks, "heights match path enumeration", [&](json& det) {
    HeightTable h(d);
    for (int n = 0; n <= std::min(small, 5); ++n)
      for (Vertex v = probe.lo; v <= probe.hi; ++v) {
        if (h(n, v) > 100000) continue;
        const auto count = enumerate_paths_into(d, v, n).size();
        if (h(n, v) != count) {
          det["vertex"] = v;
          det["level"] = n;
          return false;
        }
      }
    det["levels"] = std::min(small, 5);
    return true;
  });
  if (d.band())
    run_check(checks, "bounded-size band", [&](json& det) {
      BandCheck bc = validate_band(d, probe, small);
      if (!bc.ok) det["violation"] = bc.violation;
      return bc.ok;
    });

  if (d.is_stationary() && src.entry && src.entry->oracle.pair) {
    const Matrix m = d.matrix(0);
    const Oracle& orc = src.entry->oracle;
    const EigenPair& pair = *orc.pair;
    const Window wide = window_around(d.index_set(), anchor, 25);
    const Window rows = d.index_set() == IndexSet::Integers ? Window{wide.lo + 1, wide.hi - 1} : Window{1, 50};
    run_check(checks, "right eigenvector residual", [&](json& det) {
      if (pair.lambda_exact && pair.xi.exact) {
        auto r = exact_right_residual(m, pair.xi, *pair.lambda_exact, rows);
        if (r) {
          det["exact"] = r->str();
          return r->is_zero();
        }
      }
      double r = right_residual(m, pair.xi, pair.lambda, rows);
      det["numeric"] = r;
      return r <= 1e-12;
    });
    run_check(checks, "left eigenvector residual", [&](json& det) {
      if (pair.lambda_exact && pair.eta.exact) {
        auto r = exact_left_residual(m, pair.eta, *pair.lambda_exact, rows);
        if (r) {
          det["exact"] = r->str();
          return r->is_zero();
        }
      }
      double r = left_residual(m, pair.eta, pair.lambda, rows);
      det["numeric"] = r;
      return r <= 1e-12;
    });
    run_check(checks, "Perron estimate within 1%", [&](json& det) {
      PerronReport pr = perron_estimate(m, anchor, o.horizon, window_around(d.index_set(), anchor, o.width / 2));
      det["estimate"] = pr.lambda;
      det["oracle"] = pair.lambda;
      return std::abs(pr.lambda - pair.lambda) <= 0.01 * pair.lambda;
    });
    run_check(checks, "recurrence class consistent", [&](json& det) {
      ClassifyOptions co;
      co.analytic = orc.recurrence;
      co.eta_dot_xi = summability([&](Vertex v) { return pair.xi(v) * pair.eta(v); }, d.index_set(), anchor,
                                  orc.eta_dot_xi_tail());
      RecurrenceReport rr = classify_recurrence(m, pair.lambda, anchor, o.horizon, o.tol, co);
      det["class"] = to_string(rr.cls);
      det["numeric"] = to_string(rr.numeric);
      return rr.consistent;
    });
    run_check(checks, "A and P return series agree", [&](json& det) {
      StochasticMatrix p = stochastic_from_eigenpair(m, pair);
      auto probs = p.return_probabilities(anchor, o.horizon);
      auto counts = return_counts(m, anchor, o.horizon);
      double worst = 0.0;
      for (std::size_t k = 0; k < probs.size(); ++k) {
        double t = counts[k] == 0 ? 0.0 : std::exp(log_big(counts[k]) - static_cast<double>(k + 1) * std::log(pair.lambda));
        worst = std::max(worst, std::abs(t - probs[k]) / std::max(t, 1e-300));
      }
      ClassifyOptions co;
      RecurrenceReport ra = classify_recurrence(m, pair.lambda, anchor, o.horizon, o.tol, co);
      RecurrenceReport rp = classify_series(probs, o.tol, co);
      det["max_relative_gap"] = worst;
      det["A"] = to_string(ra.numeric);
      det["P"] = to_string(rp.numeric);
      return worst < 1e-8 && ra.numeric == rp.numeric;
    });
    run_check(checks, "stochastic rows sum to 1", [&](json& det) {
      StochasticMatrix p = stochastic_from_eigenpair(m, pair);
      RowCheck rc = validate_rows(p, rows, 1e-9);
      det["verified"] = rc.verified.size();
      det["unverifiable"] = rc.unverifiable.size();
      det["max_deviation"] = rc.max_deviation;
      return true;
    });
    run_check(checks, "power identity", [&](json& det) {
      double worst = 0.0;
      for (int n = 1; n <= small; ++n) worst = std::max(worst, verify_power_identity(m, pair, anchor, n).diff);
      det["max_diff"] = worst;
      return worst < 1e-12;
    });
    if (orc.xi_sum)
      run_check(checks, "declared sum of xi", [&](json& det) {
        Summability s = summability(pair.xi.value, d.index_set(), anchor, TailModel::numeric(200));
        det["status"] = to_string(s.status);
        det["declared"] = num(*orc.xi_sum);
        if (std::isfinite(*orc.xi_sum)) {
          det["value"] = s.value;
          return s.status == Summability::Status::FiniteSum && std::abs(s.value - *orc.xi_sum) < 1e-6 * *orc.xi_sum;
        }
        return s.status != Summability::Status::FiniteSum;
      });
    if (orc.probability())
      run_check(checks, "tower measures sum to 1", [&](json& det) {
        HeightTable h(d);
        double worst = 0.0;
        const Window tw = window_around(d.index_set(), anchor, 60);
        for (int n = 0; n <= small; ++n) {
          double s = 0.0;
          for (Vertex v = tw.lo; v <= tw.hi; ++v) s += tower_measure(pair, h, v, n, 1.0 / *orc.xi_sum);
          worst = std::max(worst, std::abs(s - 1.0));
        }
        det["max_error"] = worst;
        return worst < 1e-9;
      });
  }

  if (src.entry && src.entry->ordered) {
    const OrderedDiagram& od = *src.entry->ordered;
    const int lv = std::min(small, 4);
    run_check(checks, "order is a permutation of incoming edges", [&](json& det) {
      validate_order(od, probe, lv);
      det["levels"] = lv;
      return true;
    });
    run_check(checks, "Vershik step matches lexicographic successor", [&](json& det) {
      long compared = 0;
      for (Vertex v = probe.lo; v <= probe.hi; ++v) {
        auto paths = lexicographic_paths_into(od, v, lv);
        for (std::size_t i = 0; i + 1 < paths.size(); ++i) {
          OrderedPath x = OrderedPath::from(paths[i], od.default_tail());
          StepResult r = vershik_step(od, x, lv);
          if (!r.ok() || materialize(od, r.path, lv) != paths[i + 1].edges) {
            det["vertex"] = v;
            det["index"] = i;
            return false;
          }
          ++compared;
        }
      }
      det["compared"] = compared;
      return true;
    });
    run_check(checks, "inverse step undoes the Vershik step", [&](json& det) {
      long compared = 0;
      for (Vertex v = probe.lo; v <= probe.hi; ++v) {
        auto paths = lexicographic_paths_into(od, v, lv);
        for (std::size_t i = 0; i + 1 < paths.size(); ++i) {
          OrderedPath x = OrderedPath::from(paths[i], od.default_tail());
          StepResult f = vershik_step(od, x, lv);
          StepResult b = vershik_inverse_step(od, f.path, lv);
          if (!b.ok() || materialize(od, b.path, lv + 2) != materialize(od, x, lv + 2)) {
            det["vertex"] = v;
            det["index"] = i;
            return false;
          }
          ++compared;
        }
      }
      det["compared"] = compared;
      return true;
    });
  }

  if (d.is_stationary() && (!src.entry || !src.entry->oracle.pair))
    run_check(checks, "truncated spectral radius", [&](json& det) {
      const Matrix m = d.matrix(0);
      json radii = json::array();
      bool increasing = true;
      double prev = 0.0;
      for (Vertex r : {10, 20, 30}) {
        const double e = truncated_spectral_radius(m, window_around(d.index_set(), anchor, r)).estimate;
        increasing = increasing && e > prev;
        prev = e;
        radii.push_back(e);
      }
      det["estimates"] = radii;
      det["increasing"] = increasing;
      const bool infinite =
          src.entry && std::count(src.entry->oracle.properties.begin(), src.entry->oracle.properties.end(),
                                  std::string("infinite Perron value")) > 0;
      return !infinite || (increasing && prev > 10.0);
    });

  json rep = envelope(cfg);
  json list = json::array();
  bool all = true;
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"status", c.status}, {"detail", c.detail}});
    if (c.status == "fail") all = false;
  }
  rep["checks"] = list;
  rep["passed"] = all;
  emit(out, o, rep);
  return all ? 0 : 1;
}

// render -------------------------------------------------------------------

int cmd_render(const Options& o, std::ostream& out) {
  json cfg = base_config("render", o);
  cfg["depth"] = o.depth;
  DiagramSource src = load_diagram(o.diagram);
  const Window w = window_or(o, src, Window{1, 6}, Window{-3, 3});
  if (o.output == "dot") {
    out << "// " << envelope(cfg).dump() << '\n' << render_dot(src.diagram, o.depth, w);
    return 0;
  }
  json rep = envelope(cfg);
  rep["diagram"] = render_json(src.diagram, o.depth, w);
  emit(out, o, rep);
  return 0;
}

// catalog ------------------------------------------------------------------

int cmd_catalog_list(const Options& o, std::ostream& out) {
  json cfg = base_config("catalog list", o);
  json rep = envelope(cfg);
  json items = json::array();
  for (const auto& info : catalog_index())
    items.push_back({{"id", info.id}, {"summary", info.summary}, {"defaults", info.defaults}, {"ordered", info.ordered}});
  rep["entries"] = items;
  emit(out, o, rep);
  return 0;
}

int cmd_catalog_show(const Options& o, std::ostream& out) {
  json cfg = base_config("catalog show", o);
  cfg["id"] = o.id;
  CatalogEntry e = catalog_resolve(o.id);
  json rep = envelope(cfg);
  rep["entry"] = e.describe();
  emit(out, o, rep);
  return 0;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized Bratteli diagram toolkit", "gbd"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options o;
  std::function<int(const Options&, std::ostream&)> action;

  auto common = [&](CLI::App* s, bool needs_diagram) {
    auto* d = s->add_option("--diagram", o.diagram, "catalog:<id>?k=v, a JSON file, or inline JSON");
    if (needs_diagram) d->required();
    s->add_option("--output", o.output, "json | table | dot")->check(CLI::IsMember({"json", "table", "dot"}));
    s->add_option("--seed", o.seed, "seed recorded in the report and used by sampled probes");
    s->add_option("--window", o.window, "vertex window lo:hi");
    s->add_option("--tol", o.tol, "tolerance (default from GBD_TOL or 1e-10)")->check(CLI::PositiveNumber);
  };

  auto* analyze = app.add_subcommand("analyze", "Perron value, recurrence class and bounds");
  common(analyze, true);
  analyze->add_option("--horizon", o.horizon)->check(CLI::Range(1, 100000));
  analyze->add_option("--width", o.width)->check(CLI::Range(3, 1000000));
  analyze->add_option("--anchor", o.anchor);
  analyze->add_option("--ceiling", o.ceiling)->check(CLI::PositiveNumber);
  analyze->add_flag("--exact", o.exact, "render exact eigenvalues");
  analyze->callback([&] { action = cmd_analyze; });

  auto* measure = app.add_subcommand("measure", "tail-invariant measure vectors");
  common(measure, true);
  measure->add_option("--mode", o.mode)->check(CLI::IsMember({"eigen", "inverse-limit"}));
  measure->add_option("--depth", o.depth)->check(CLI::Range(0, 10000));
  measure->add_option("--cylinder", o.cylinder, "cylinder path as JSON or a JSON file");
  measure->add_option("--gap", o.gap)->check(CLI::Range(1, 100000));
  measure->add_option("--report", o.report)->check(CLI::IsMember({"json", "table"}));
  measure->add_option("--normalization", o.normalization);
  measure->add_option("--anchor", o.anchor);
  measure->callback([&] { action = cmd_measure; });

  auto* vershik = app.add_subcommand("vershik", "Vershik map orbit as JSON lines");
  common(vershik, false);
  vershik->add_option("--order", o.order, "catalog | left-to-right | right-to-left | slanted | file:<labels.json>");
  vershik->add_option("--steps", o.steps)->check(CLI::Range(0, 100000000));
  vershik->add_option("--path", o.path, "start path as JSON or a JSON file");
  vershik->add_option("--depth", o.depth)->check(CLI::Range(1, 60));
  vershik->add_option("--vertex", o.vertex);
  vershik->add_flag("--inverse", o.inverse);
  vershik->callback([&] { action = cmd_vershik; });

  auto* heights = app.add_subcommand("heights", "tower heights H^(n)");
  common(heights, true);
  heights->add_option("--depth", o.depth)->check(CLI::Range(0, 200));
  heights->callback([&] { action = cmd_heights; });

  auto* walk = app.add_subcommand("walk", "Monte-Carlo walk of the induced stochastic matrix");
  common(walk, true);
  walk->add_option("--steps", o.steps)->check(CLI::Range(1, 100000));
  walk->add_option("--walkers", o.walkers)->check(CLI::Range(1, 10000000));
  walk->add_option("--vertex", o.vertex);
  walk->add_option("--horizon", o.horizon);
  walk->add_option("--width", o.width);
  walk->callback([&] { action = cmd_walk; });

  auto* witness = app.add_subcommand("witness", "transitivity, discontinuity, extreme-path and slanting witnesses");
  common(witness, false);
  witness->add_option("--kind", o.kind)->check(CLI::IsMember({"transitive", "discontinuity", "extreme", "slanting"}));
  witness->add_option("--count", o.count)->check(CLI::Range(1, 100000));
  witness->add_option("--length", o.length)->check(CLI::Range(0, 64));
  witness->add_option("--period", o.period)->check(CLI::Range(1, 64));
  witness->add_option("--horizon", o.horizon)->check(CLI::Range(1, 100000));
  witness->add_option("--vertex", o.vertex);
  witness->add_option("--epsilon", o.epsilon)->check(CLI::PositiveNumber);
  witness->add_option("--depth", o.depth)->check(CLI::Range(1, 60));
  witness->add_option("--order", o.order);
  witness->add_option("--path", o.path);
  witness->add_option("--w", o.w);
  witness->add_option("--sign", o.sign);
  witness->callback([&] { action = cmd_witness; });

  auto* verify = app.add_subcommand("verify", "run the invariant suite on a diagram");
  common(verify, true);
  verify->add_option("--depth", o.depth)->check(CLI::Range(1, 60));
  verify->add_option("--horizon", o.horizon)->check(CLI::Range(1, 10000));
  verify->add_option("--width", o.width)->check(CLI::Range(3, 1000000));
  verify->add_option("--anchor", o.anchor);
  verify->callback([&] { action = cmd_verify; });

  auto* render = app.add_subcommand("render", "export a truncated diagram as DOT or JSON");
  common(render, true);
  render->add_option("--depth", o.depth)->check(CLI::Range(1, 60));
  render->callback([&] { action = cmd_render; });

  auto* catalog = app.add_subcommand("catalog", "catalog entries");
  catalog->require_subcommand(1);
  auto* list = catalog->add_subcommand("list", "list entries");
  auto catalog_common = [&](CLI::App* s) {
    s->add_option("--output", o.output)->check(CLI::IsMember({"json", "table"}));
    s->add_option("--seed", o.seed);
    s->add_option("--tol", o.tol)->check(CLI::PositiveNumber);
  };
  catalog_common(list);
  list->callback([&] { action = cmd_catalog_list; });
  auto* show = catalog->add_subcommand("show", "show one entry with its oracle data");
  show->add_option("id", o.id, "<id> or <id>?k=v")->required();
  catalog_common(show);
  show->callback([&] { action = cmd_catalog_show; });

  try {
    o.tol = env_tolerance(o.tol);
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what() << '\n';
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    // Format and order are checked up front; the index set is checked once the diagram is known.
    if (!o.window.empty()) parse_window(o.window, IndexSet::Integers);
    return action(o, out);
  } catch (const ConfigError& ex) {
    err << "error: " << ex.what() << '\n';
    return 2;
  } catch (const ParamOutOfRange& ex) {
    err << "error: " << ex.what() << '\n';
    return 2;
  } catch (const Error& ex) {
    json rep{{"version", kVersion}, {"error", {{"kind", ex.kind()}, {"message", ex.what()}}}};
    out << rep.dump(2) << '\n';
    return 1;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return 1;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> storage = args;
  storage.insert(storage.begin(), "gbd");
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace gbd::cli
