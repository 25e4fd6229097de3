#include "gbd/order.hpp"

#include <algorithm>
#include <map>

namespace gbd {

EdgeOrder::EdgeOrder(std::string kind, Ranker ranker, nlohmann::json descriptor)
    : kind_(std::move(kind)), ranker_(std::move(ranker)), desc_(std::move(descriptor)) {
  if (desc_.is_null()) desc_ = {{"kind", kind_}};
}

namespace {

std::vector<Slot> slots_left_to_right(const Diagram& d, int level, Vertex target) {
  std::vector<Slot> out;
  for (const Edge& e : d.incoming(level, target)) out.push_back({e.source, e.copy});
  std::sort(out.begin(), out.end(),
            [](const Slot& a, const Slot& b) { return a.source != b.source ? a.source < b.source : a.copy < b.copy; });
  return out;
}

}  // namespace

EdgeOrder EdgeOrder::left_to_right() { return EdgeOrder("left-to-right", slots_left_to_right); }

EdgeOrder EdgeOrder::right_to_left() {
  return EdgeOrder("right-to-left", [](const Diagram& d, int level, Vertex target) {
    auto s = slots_left_to_right(d, level, target);
    std::reverse(s.begin(), s.end());
    return s;
  });
}

EdgeOrder EdgeOrder::slanted_extremes() {
  return EdgeOrder("slanted", [](const Diagram& d, int level, Vertex target) {
    auto s = slots_left_to_right(d, level, target);
    std::vector<std::size_t> right;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i].source > target) right.push_back(i);
    if (right.size() < 2)
      throw InvalidOrder("vertex " + std::to_string(target) + " at level " + std::to_string(level + 1) +
                         " has fewer than two incoming edges from the right");
    std::vector<Slot> out{s[right.front()]};
    for (std::size_t i = 0; i < s.size(); ++i)
      if (i != right.front() && i != right.back()) out.push_back(s[i]);
    out.push_back(s[right.back()]);
    return out;
  });
}

bool LabelRule::matches(int level, Vertex target) const {
  if (levels == Levels::Even && level % 2 != 0) return false;
  if (levels == Levels::Odd && level % 2 == 0) return false;
  switch (cond) {
    case Cond::Eq: return target == a;
    case Cond::Ge: return target >= a;
    default: return target >= a && target <= b;
  }
}

LabelTable LabelTable::from_json(const nlohmann::json& j) {
  LabelTable t;
  try {
    t.name = j.at("name").get<std::string>();
    t.figure = j.value("figure", "");
    t.index_set = index_set_from_string(j.value("index_set", "N"));
    for (const auto& r : j.at("rules")) {
      LabelRule rule;
      std::string lv = r.value("levels", "all");
      if (lv == "all") rule.levels = LabelRule::Levels::All;
      else if (lv == "even") rule.levels = LabelRule::Levels::Even;
      else if (lv == "odd") rule.levels = LabelRule::Levels::Odd;
      else throw ConfigError("unknown level selector '" + lv + "'");
      const auto& tg = r.at("target");
      if (tg.contains("eq")) {
        rule.cond = LabelRule::Cond::Eq;
        rule.a = rule.b = tg.at("eq").get<Vertex>();
      } else if (tg.contains("ge")) {
        rule.cond = LabelRule::Cond::Ge;
        rule.a = tg.at("ge").get<Vertex>();
      } else if (tg.contains("range")) {
        rule.cond = LabelRule::Cond::Range;
        rule.a = tg.at("range").at(0).get<Vertex>();
        rule.b = tg.at("range").at(1).get<Vertex>();
      } else {
        throw ConfigError("target condition needs eq, ge or range");
      }
      for (const auto& e : r.at("edges")) {
        LabelRule::Item item;
        if (e.contains("abs")) {
          item.value = e.at("abs").get<Vertex>();
        } else if (e.contains("rel")) {
          item.relative = true;
          item.value = e.at("rel").get<Vertex>();
        } else {
          throw ConfigError("edge needs abs or rel source");
        }
        item.label = e.at("label").get<int>();
        rule.items.push_back(item);
      }
      t.rules.push_back(std::move(rule));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("label table: ") + ex.what());
  }
  return t;
}

nlohmann::json LabelTable::to_json() const {
  nlohmann::json out_rules = nlohmann::json::array();
  for (const auto& r : rules) {
    nlohmann::json target;
    if (r.cond == LabelRule::Cond::Eq) target = {{"eq", r.a}};
    else if (r.cond == LabelRule::Cond::Ge) target = {{"ge", r.a}};
    else target = {{"range", {r.a, r.b}}};
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& it : r.items) edges.push_back({{it.relative ? "rel" : "abs", it.value}, {"label", it.label}});
    const char* lv = r.levels == LabelRule::Levels::All ? "all" : (r.levels == LabelRule::Levels::Even ? "even" : "odd");
    out_rules.push_back({{"levels", lv}, {"target", target}, {"edges", edges}});
  }
  return {{"name", name}, {"figure", figure}, {"index_set", gbd::to_string(index_set)}, {"rules", out_rules}};
}

bool LabelTable::level_dependent() const {
  return std::any_of(rules.begin(), rules.end(), [](const LabelRule& r) { return r.levels != LabelRule::Levels::All; });
}

const LabelRule& LabelTable::rule_for(int level, Vertex target) const {
  for (const auto& r : rules)
    if (r.matches(level, target)) return r;
  throw InvalidOrder(name + ": no rule for vertex " + std::to_string(target) + " at level " + std::to_string(level + 1));
}

std::vector<std::pair<Slot, int>> LabelTable::labelled(int level, Vertex target) const {
  const LabelRule& r = rule_for(level, target);
  std::map<Vertex, int> copies;
  std::vector<std::pair<Slot, int>> out;
  for (const auto& it : r.items) {
    Vertex s = it.relative ? target + it.value : it.value;
    if (!in_index_set(index_set, s))
      throw InvalidOrder(name + ": source " + std::to_string(s) + " outside the index set");
    out.push_back({Slot{s, copies[s]++}, it.label});
  }
  return out;
}

Matrix LabelTable::matrix(int parity) const {
  const LabelTable self = *this;
  auto columns = [self, parity](Vertex target) {
    std::map<Vertex, BigInt> acc;
    for (const auto& [slot, label] : self.labelled(parity, target)) acc[slot.source] += 1;
    std::vector<Entry> out;
    for (auto& [s, v] : acc) out.push_back({s, v});
    return out;
  };
  auto rows = [self, parity](Vertex source) {
    RowPattern p;
    for (const auto& r : self.rules) {
      if (r.levels == LabelRule::Levels::Even && parity % 2 != 0) continue;
      if (r.levels == LabelRule::Levels::Odd && parity % 2 == 0) continue;
      for (const auto& it : r.items) {
        if (it.relative) {
          Vertex t = source - it.value;
          if (!in_index_set(self.index_set, t) || !r.matches(parity, t)) continue;
          if (&self.rule_for(parity, t) != &r) continue;
          p.finite.push_back({t, 1});
        } else if (it.value == source) {
          if (r.cond == LabelRule::Cond::Ge) {
            p.rays.push_back({r.a, 1, 1});
          } else {
            for (Vertex t = r.a; t <= r.b; ++t)
              if (in_index_set(self.index_set, t) && &self.rule_for(parity, t) == &r) p.finite.push_back({t, 1});
          }
        }
      }
    }
    std::map<Vertex, BigInt> merged;
    for (const auto& e : p.finite) merged[e.index] += e.value;
    p.finite.clear();
    for (auto& [k, v] : merged) p.finite.push_back({k, v});
    return p;
  };
  return Matrix::from_rows(index_set, rows, columns, {{"kind", "labels"}, {"table", to_json()}, {"parity", parity}});
}

Diagram LabelTable::diagram() const {
  IncidenceSequence seq;
  seq.index_set = index_set;
  seq.stationary = !level_dependent();
  Matrix even = matrix(0);
  Matrix odd = level_dependent() ? matrix(1) : even;
  seq.level = [even, odd](int n) { return n % 2 == 0 ? even : odd; };
  return Diagram(seq, std::nullopt, name);
}

EdgeOrder LabelTable::order() const {
  const LabelTable self = *this;
  return EdgeOrder(
      "labels",
      [self](const Diagram&, int level, Vertex target) {
        auto lab = self.labelled(level, target);
        std::sort(lab.begin(), lab.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
        for (std::size_t i = 1; i < lab.size(); ++i)
          if (lab[i].second == lab[i - 1].second)
            throw InvalidOrder(self.name + ": repeated label at vertex " + std::to_string(target));
        std::vector<Slot> out;
        for (const auto& [s, l] : lab) out.push_back(s);
        return out;
      },
      {{"kind", "labels"}, {"name", name}});
}

TailRule TailRule::vertical(int copy) {
  TailRule t;
  t.kind = Kind::Vertical;
  t.copy = copy;
  t.name = "vertical";
  return t;
}

TailRule TailRule::shift(Vertex offset) {
  TailRule t;
  t.kind = Kind::Shift;
  t.offset = offset;
  t.name = "shift";
  return t;
}

TailRule TailRule::minimal_out() {
  TailRule t;
  t.kind = Kind::MinimalOut;
  t.name = "minimal";
  return t;
}

TailRule TailRule::maximal_out() {
  TailRule t;
  t.kind = Kind::MaximalOut;
  t.name = "maximal";
  return t;
}

TailRule TailRule::custom(std::string name, std::function<Edge(int, Vertex)> fn) {
  TailRule t;
  t.kind = Kind::Custom;
  t.fn = std::move(fn);
  t.name = std::move(name);
  return t;
}

nlohmann::json TailRule::to_json() const {
  nlohmann::json j{{"kind", name}};
  if (kind == Kind::Vertical) j["copy"] = copy;
  if (kind == Kind::Shift) j["offset"] = offset;
  return j;
}

OrderedDiagram::OrderedDiagram(Diagram d, EdgeOrder order, TailRule default_tail, Vertex radius)
    : d_(std::move(d)), order_(std::move(order)), tail_(std::move(default_tail)), radius_(radius) {}

int OrderedDiagram::rank(const Edge& e) const {
  auto s = ranked(e.level, e.target);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i].source == e.source && s[i].copy == e.copy) return static_cast<int>(i);
  throw InvalidPath("edge " + to_string(e) + " is not in the diagram");
}

bool OrderedDiagram::is_maximal(const Edge& e) const {
  return rank(e) + 1 == static_cast<int>(ranked(e.level, e.target).size());
}

Window OrderedDiagram::out_window(int level, Vertex source) const {
  if (out_window_) return out_window_(level, source);
  Vertex r = d_.band() ? d_.band()->t(level) : radius_;
  Window w{source - r, source + r};
  if (d_.index_set() == IndexSet::Naturals) w.lo = std::max<Vertex>(w.lo, 1);
  return w;
}

void validate_order(const OrderedDiagram& od, const Window& targets, int levels) {
  for (int n = 0; n < levels; ++n)
    for (Vertex v = targets.lo; v <= targets.hi; ++v) {
      if (!in_index_set(od.diagram().index_set(), v)) continue;
      auto ranked = od.ranked(n, v);
      std::vector<Slot> expected;
      for (const Edge& e : od.diagram().incoming(n, v)) expected.push_back({e.source, e.copy});
      auto key = [](const Slot& a, const Slot& b) {
        return a.source != b.source ? a.source < b.source : a.copy < b.copy;
      };
      auto sorted = ranked;
      std::sort(sorted.begin(), sorted.end(), key);
      std::sort(expected.begin(), expected.end(), key);
      if (sorted != expected)
        throw InvalidOrder("order at vertex " + std::to_string(v) + ", level " + std::to_string(n + 1) +
                           " is not a permutation of the incoming edges");
    }
}

OrderedDiagram telescope_ordered(const OrderedDiagram& od, const std::vector<int>& cuts) {
  if (cuts.size() < 2) throw std::invalid_argument("telescope_ordered: need at least two cuts");
  const int gap = cuts.back() - cuts[cuts.size() - 2];
  auto cut = [cuts, gap](int k) {
    if (k < static_cast<int>(cuts.size())) return cuts[k];
    return cuts.back() + (k - static_cast<int>(cuts.size()) + 1) * gap;
  };
  const OrderedDiagram base = od;
  EdgeOrder order(
      "telescoped",
      [base, cut](const Diagram&, int k, Vertex target) {
        const int lo = cut(k), hi = cut(k + 1);
        struct Partial {
          std::vector<int> key;
          Vertex head;
        };
        std::vector<Partial> paths{{{}, target}};
        for (int lvl = hi - 1; lvl >= lo; --lvl) {
          std::vector<Partial> next;
          for (const auto& p : paths) {
            auto slots = base.ranked(lvl, p.head);
            for (std::size_t r = 0; r < slots.size(); ++r) {
              Partial q = p;
              q.key.push_back(static_cast<int>(r));
              q.head = slots[r].source;
              next.push_back(std::move(q));
            }
          }
          paths = std::move(next);
        }
        std::sort(paths.begin(), paths.end(), [](const Partial& a, const Partial& b) { return a.key < b.key; });
        std::map<Vertex, int> copies;
        std::vector<Slot> out;
        for (const auto& p : paths) out.push_back({p.head, copies[p.head]++});
        return out;
      },
      {{"kind", "telescoped"}, {"base", od.order().descriptor()}, {"cuts", cuts}});
  TailRule tail = od.default_tail();
  if (tail.kind == TailRule::Kind::Custom || tail.kind == TailRule::Kind::Shift) tail = TailRule::minimal_out();
  OrderedDiagram out(od.diagram().telescoped(cuts), order, tail);
  out.set_out_window([base, cut](int k, Vertex source) {
    Window w{source, source};
    for (int lvl = cut(k); lvl < cut(k + 1); ++lvl) {
      Window a = base.out_window(lvl, w.lo), b = base.out_window(lvl, w.hi);
      w = Window{std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
    }
    return w;
  });
  return out;
}

std::optional<Edge> successor_edge(const OrderedDiagram& od, const Edge& e) {
  auto s = od.ranked(e.level, e.target);
  int r = od.rank(e);
  if (r + 1 >= static_cast<int>(s.size())) return std::nullopt;
  return Edge{e.level, s[r + 1].source, e.target, s[r + 1].copy};
}

std::optional<Edge> predecessor_edge(const OrderedDiagram& od, const Edge& e) {
  auto s = od.ranked(e.level, e.target);
  int r = od.rank(e);
  if (r == 0) return std::nullopt;
  return Edge{e.level, s[r - 1].source, e.target, s[r - 1].copy};
}

namespace {

FinitePath extreme_path_into(const OrderedDiagram& od, Vertex v, int n, bool minimal) {
  std::vector<Edge> rev;
  Vertex cur = v;
  for (int lvl = n - 1; lvl >= 0; --lvl) {
    auto s = od.ranked(lvl, cur);
    if (s.empty()) throw InvalidPath("vertex " + std::to_string(cur) + " has no incoming edges");
    const Slot& slot = minimal ? s.front() : s.back();
    rev.push_back({lvl, slot.source, cur, slot.copy});
    cur = slot.source;
  }
  FinitePath p;
  p.edges.assign(rev.rbegin(), rev.rend());
  p.start = cur;
  return p;
}

std::optional<Edge> extreme_out(const OrderedDiagram& od, int n, Vertex source, bool minimal) {
  Window w = od.out_window(n, source);
  for (Vertex t = w.lo; t <= w.hi; ++t) {
    if (!in_index_set(od.diagram().index_set(), t)) continue;
    std::vector<Slot> s;
    try {
      s = od.ranked(n, t);
    } catch (const InvalidOrder&) {
      continue;
    }
    if (s.empty()) continue;
    const Slot& slot = minimal ? s.front() : s.back();
    if (slot.source == source) return Edge{n, source, t, slot.copy};
  }
  return std::nullopt;
}

}  // namespace

FinitePath minimal_path_into(const OrderedDiagram& od, Vertex v, int n) { return extreme_path_into(od, v, n, true); }
FinitePath maximal_path_into(const OrderedDiagram& od, Vertex v, int n) { return extreme_path_into(od, v, n, false); }

std::optional<Edge> minimal_out(const OrderedDiagram& od, int n, Vertex source) {
  return extreme_out(od, n, source, true);
}
std::optional<Edge> maximal_out(const OrderedDiagram& od, int n, Vertex source) {
  return extreme_out(od, n, source, false);
}

OrderedPath OrderedPath::from(const FinitePath& p, TailRule tail) {
  OrderedPath x;
  x.prefix = p.edges;
  x.start = p.source();
  x.tail = std::move(tail);
  return x;
}

Edge tail_edge(const OrderedDiagram& od, const TailRule& tail, int level, Vertex v) {
  const Diagram& d = od.diagram();
  std::optional<Edge> e;
  switch (tail.kind) {
    case TailRule::Kind::Vertical: e = Edge{level, v, v, tail.copy}; break;
    case TailRule::Kind::Shift: e = Edge{level, v, v + tail.offset, 0}; break;
    case TailRule::Kind::MinimalOut: e = minimal_out(od, level, v); break;
    case TailRule::Kind::MaximalOut: e = maximal_out(od, level, v); break;
    case TailRule::Kind::Custom: e = tail.fn(level, v); break;
  }
  if (!e || !d.valid(*e))
    throw InvalidPath("tail rule '" + tail.name + "' has no edge out of " + std::to_string(v) + " at level " +
                      std::to_string(level));
  return *e;
}

std::vector<Edge> materialize(const OrderedDiagram& od, const OrderedPath& x, int n) {
  std::vector<Edge> out;
  const std::size_t keep = std::min<std::size_t>(x.prefix.size(), static_cast<std::size_t>(std::max(n, 0)));
  out.assign(x.prefix.begin(), x.prefix.begin() + static_cast<long>(keep));
  Vertex cur = x.start;
  if (keep > 0) cur = x.prefix[keep - 1].target;
  else if (!x.prefix.empty()) cur = x.prefix.front().source;
  while (static_cast<int>(out.size()) < n) {
    Edge e = tail_edge(od, x.tail, static_cast<int>(out.size()), cur);
    cur = e.target;
    out.push_back(e);
  }
  return out;
}

std::optional<int> first_difference(const OrderedDiagram& od, const OrderedPath& x, const OrderedPath& y, int depth) {
  auto a = materialize(od, x, depth), b = materialize(od, y, depth);
  for (int i = 0; i < depth; ++i)
    if (!(a[i] == b[i])) return i;
  return std::nullopt;
}

double path_distance(const OrderedDiagram& od, const OrderedPath& x, const OrderedPath& y, int depth) {
  auto n = first_difference(od, x, y, depth);
  return n ? std::ldexp(1.0, -*n) : 0.0;
}

nlohmann::json to_json(const Edge& e) {
  return {{"level", e.level}, {"source", e.source}, {"target", e.target}, {"copy", e.copy}};
}

Edge edge_from_json(const nlohmann::json& j) {
  try {
    return Edge{j.at("level").get<int>(), j.at("source").get<Vertex>(), j.at("target").get<Vertex>(),
                j.value("copy", 0)};
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("edge: ") + ex.what());
  }
}

nlohmann::json to_json(const OrderedDiagram& od, const OrderedPath& x, int depth) {
  nlohmann::json prefix = nlohmann::json::array();
  for (const auto& e : x.prefix) prefix.push_back(to_json(e));
  nlohmann::json vertices = nlohmann::json::array();
  auto edges = materialize(od, x, depth);
  vertices.push_back(edges.empty() ? x.start : edges.front().source);
  for (const auto& e : edges) vertices.push_back(e.target);
  return {{"prefix", prefix}, {"start", x.start}, {"tail", x.tail.to_json()}, {"vertices", vertices}};
}

OrderedPath random_forward_path(const OrderedDiagram& od, const Window& starts, int length, std::mt19937_64& rng) {
  std::uniform_int_distribution<Vertex> pick_start(starts.lo, starts.hi);
  OrderedPath x;
  x.start = pick_start(rng);
  x.tail = od.default_tail();
  Vertex cur = x.start;
  for (int n = 0; n < length; ++n) {
    auto out = od.diagram().outgoing(n, cur, od.out_window(n, cur));
    if (out.empty()) throw InvalidPath("no edge out of " + std::to_string(cur) + " at level " + std::to_string(n));
    std::uniform_int_distribution<std::size_t> pick(0, out.size() - 1);
    Edge e = out[pick(rng)];
    x.prefix.push_back(e);
    cur = e.target;
  }
  return x;
}

}  // namespace gbd
