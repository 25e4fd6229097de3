#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gbd/diagram.hpp"

namespace gbd {

// An incoming edge slot of a fixed target: (source, copy).
struct Slot {
  Vertex source = 0;
  int copy = 0;
  bool operator==(const Slot&) const = default;
};

// Total order on r^{-1}(v) for every target v and level; ranked() lists slots from minimal to maximal.
class EdgeOrder {
 public:
  using Ranker = std::function<std::vector<Slot>(const Diagram&, int level, Vertex target)>;

  EdgeOrder() = default;
  EdgeOrder(std::string kind, Ranker ranker, nlohmann::json descriptor = {});

  static EdgeOrder left_to_right();
  static EdgeOrder right_to_left();
  // Minimal and maximal slots are the leftmost and rightmost slots whose source exceeds the target;
  // the remaining slots keep the left-to-right order.  Throws InvalidOrder when fewer than two exist.
  static EdgeOrder slanted_extremes();

  std::vector<Slot> ranked(const Diagram& d, int level, Vertex target) const { return ranker_(d, level, target); }
  const std::string& kind() const { return kind_; }
  const nlohmann::json& descriptor() const { return desc_; }
  bool valid() const { return static_cast<bool>(ranker_); }

 private:
  std::string kind_;
  Ranker ranker_;
  nlohmann::json desc_;
};

// Per-level label table: rules match targets by eq/ge/range and levels by parity;
// each rule lists sources (absolute or relative to the target) with labels, 0 minimal.
// Repeated sources are parallel edges, numbered by their order of appearance.
struct LabelRule {
  enum class Levels { All, Even, Odd } levels = Levels::All;
  enum class Cond { Eq, Ge, Range } cond = Cond::Eq;
  Vertex a = 1;
  Vertex b = 1;
  struct Item {
    bool relative = false;
    Vertex value = 0;
    int label = 0;
  };
  std::vector<Item> items;

  bool matches(int level, Vertex target) const;
};

struct LabelTable {
  std::string name;
  std::string figure;  // figure the table transcribes
  IndexSet index_set = IndexSet::Naturals;
  std::vector<LabelRule> rules;

  static LabelTable from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  bool level_dependent() const;
  const LabelRule& rule_for(int level, Vertex target) const;  // throws InvalidOrder
  // (source, copy, label) for the edges into target.
  std::vector<std::pair<Slot, int>> labelled(int level, Vertex target) const;
  Matrix matrix(int parity) const;
  Diagram diagram() const;
  EdgeOrder order() const;
};

struct TailRule {
  enum class Kind { Vertical, Shift, MinimalOut, MaximalOut, Custom } kind = Kind::Vertical;
  int copy = 0;
  Vertex offset = 0;
  std::function<Edge(int level, Vertex v)> fn;
  std::string name;

  static TailRule vertical(int copy = 0);
  static TailRule shift(Vertex offset);
  static TailRule minimal_out();
  static TailRule maximal_out();
  static TailRule custom(std::string name, std::function<Edge(int, Vertex)> fn);
  nlohmann::json to_json() const;
};

class OrderedDiagram {
 public:
  OrderedDiagram() = default;
  OrderedDiagram(Diagram d, EdgeOrder order, TailRule default_tail = TailRule::vertical(), Vertex radius = 4);

  const Diagram& diagram() const { return d_; }
  const EdgeOrder& order() const { return order_; }
  const TailRule& default_tail() const { return tail_; }
  std::vector<Slot> ranked(int level, Vertex target) const { return order_.ranked(d_, level, target); }
  // Position of the edge in the order of its target; throws InvalidPath for unknown edges.
  int rank(const Edge& e) const;
  bool is_minimal(const Edge& e) const { return rank(e) == 0; }
  bool is_maximal(const Edge& e) const;
  // Targets considered when searching edges out of a source.
  Window out_window(int level, Vertex source) const;
  void set_out_window(std::function<Window(int, Vertex)> f) { out_window_ = std::move(f); }

 private:
  Diagram d_;
  EdgeOrder order_;
  TailRule tail_;
  Vertex radius_ = 4;
  std::function<Window(int, Vertex)> out_window_;
};

// Checks that every ranked list is a permutation of the incoming slots.
void validate_order(const OrderedDiagram& od, const Window& targets, int levels);

// Order on composite edges of a telescoping: the edge at the higher level is more significant.
OrderedDiagram telescope_ordered(const OrderedDiagram& od, const std::vector<int>& cuts);

std::optional<Edge> successor_edge(const OrderedDiagram& od, const Edge& e);
std::optional<Edge> predecessor_edge(const OrderedDiagram& od, const Edge& e);
FinitePath minimal_path_into(const OrderedDiagram& od, Vertex v, int n);
FinitePath maximal_path_into(const OrderedDiagram& od, Vertex v, int n);

// Extreme edge out of source at level n (smallest target first), if any.
std::optional<Edge> minimal_out(const OrderedDiagram& od, int n, Vertex source);
std::optional<Edge> maximal_out(const OrderedDiagram& od, int n, Vertex source);

// Infinite path: finite prefix from level 0 followed by a tail rule.
struct OrderedPath {
  std::vector<Edge> prefix;
  Vertex start = 0;  // source at level 0 when the prefix is empty
  TailRule tail;

  static OrderedPath from(const FinitePath& p, TailRule tail);
};

Edge tail_edge(const OrderedDiagram& od, const TailRule& tail, int level, Vertex v);
// The first n edges of the path.
std::vector<Edge> materialize(const OrderedDiagram& od, const OrderedPath& x, int n);
// Index of the first differing edge within depth, or nullopt.
std::optional<int> first_difference(const OrderedDiagram& od, const OrderedPath& x, const OrderedPath& y, int depth);
// 2^{-N} with N the first differing edge; 0 when equal through depth.
double path_distance(const OrderedDiagram& od, const OrderedPath& x, const OrderedPath& y, int depth);

nlohmann::json to_json(const Edge& e);
Edge edge_from_json(const nlohmann::json& j);
nlohmann::json to_json(const OrderedDiagram& od, const OrderedPath& x, int depth);

// Random path of the given length from a start drawn in the window, continued by the default tail.
OrderedPath random_forward_path(const OrderedDiagram& od, const Window& starts, int length, std::mt19937_64& rng);

}  // namespace gbd
