#pragma once

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gbd/matrix.hpp"

namespace gbd {

// Bounded-size data: sources of edges into v at level n + 1 lie in [v - t(n), v + t(n)]
// and v has at most L(n) incoming edges.
struct BandSpec {
  std::function<Vertex(int)> t;
  std::function<BigInt(int)> L;

  static BandSpec uniform(Vertex t, BigInt L);
  Vertex sum_t(int from, int to) const;  // t(from) + ... + t(to - 1)
  BigInt prod_L(int from, int to) const;
};

// Edge at level n from source in V_n to target in V_{n+1}; copy < multiplicity.
struct Edge {
  int level = 0;
  Vertex source = 0;
  Vertex target = 0;
  int copy = 0;
  bool operator==(const Edge&) const = default;
};

std::string to_string(const Edge& e);

struct FinitePath {
  std::vector<Edge> edges;
  Vertex start = 0;  // used when edges is empty

  std::size_t length() const { return edges.size(); }
  Vertex source() const { return edges.empty() ? start : edges.front().source; }
  Vertex range() const { return edges.empty() ? start : edges.back().target; }
  int end_level() const { return edges.empty() ? 0 : edges.back().level + 1; }
  bool operator==(const FinitePath&) const = default;
};

class Diagram {
 public:
  Diagram() = default;
  Diagram(IncidenceSequence seq, std::optional<BandSpec> band = std::nullopt, std::string name = {});
  static Diagram stationary(const Matrix& a, std::optional<BandSpec> band = std::nullopt, std::string name = {});

  IndexSet index_set() const { return seq_.index_set; }
  bool is_stationary() const { return seq_.stationary; }
  const IncidenceSequence& sequence() const { return seq_; }
  // A_n = F_n^T, a_{source,target} for edges from level n to level n + 1.
  Matrix matrix(int n) const { return seq_.at(n); }
  const std::optional<BandSpec>& band() const { return band_; }
  const std::string& name() const { return name_; }

  BigInt multiplicity(int n, Vertex source, Vertex target) const { return matrix(n).at(source, target); }
  // Every edge into target (in V_{n+1}), ordered by (source, copy).
  std::vector<Edge> incoming(int n, Vertex target) const;
  // Edges out of source (in V_n) with target in the window.
  std::vector<Edge> outgoing(int n, Vertex source, const Window& targets) const;
  bool valid(const Edge& e) const;
  bool valid(const FinitePath& p) const;

  Diagram telescoped(const std::vector<int>& cuts) const;

 private:
  IncidenceSequence seq_;
  std::optional<BandSpec> band_;
  std::string name_;
};

// |E(w at level m, v at level n)|, computed target-backward.
BigInt count_paths(const Diagram& d, int m, Vertex w, int n, Vertex v);
// Counts into v at level n from every vertex of level m.
SparseVector count_paths_into(const Diagram& d, int m, int n, Vertex v);

// Memoized heights H^(n)_v = sum_w a^(n-1)_{w,v} H^(n-1)_w; exact because columns are finite.
class HeightTable {
 public:
  explicit HeightTable(Diagram d, std::function<BigInt(Vertex)> seed = {});
  const BigInt& operator()(int n, Vertex v);
  const Diagram& diagram() const { return d_; }

 private:
  Diagram d_;
  std::function<BigInt(Vertex)> seed_;
  std::map<std::pair<int, Vertex>, BigInt> memo_;
};

struct HeightVector {
  int level = 0;
  Window window;
  std::map<Vertex, BigInt> values;
  bool exact = true;  // heights follow complete finite column supports

  const BigInt& at(Vertex v) const { return values.at(v); }
};

HeightVector height_vector(const Diagram& d, int n, const Window& window,
                           std::function<BigInt(Vertex)> seed = {});

enum class ConeDirection { Ancestors, Descendants };

struct ConeBounds {
  Window interval;
  std::optional<BigInt> path_bound;  // L_0 ... L_{n-1} for ancestors
};

// Ancestors of v in V_n lie in v -+ (t_0 + ... + t_{n-1}); descendants of v in V_n
// after m steps lie in v -+ (t_n + ... + t_{n+m-1}).
ConeBounds cone_bounds(const Diagram& d, Vertex v, int n, ConeDirection dir, int m_steps = 0);

struct BandCheck {
  bool ok = true;
  std::string violation;
};

// Checks the bounded-size inequalities and the nonempty extreme-edge convention on a window.
BandCheck validate_band(const Diagram& d, const Window& targets, int levels);

struct TransitiveWitness {
  FinitePath cylinder;
  FinitePath connector;  // from r(cylinder) to the vertical vertex
  FinitePath loop;       // return path of length k at the vertical vertex
  int end_level = 0;     // level where the connector reaches the vertical vertex (a multiple of k)
};

// Joins the cylinder ending at j in V_N to the vertical path through i visiting i at levels sk.
TransitiveWitness transitive_witness(const Diagram& d, const FinitePath& cylinder, Vertex i, int k, int horizon);

enum class SlantSign { Plus, Minus };

struct SlantVerdict {
  bool consistent = true;
  int depth = 0;                      // edges checked
  std::optional<int> violated_level;  // -1 marks the source condition
};

SlantVerdict slanting_membership(const Diagram& d, const FinitePath& x, Vertex w, SlantSign sign);

// Uniformly random path in E(V_0, v) at level n (weights are heights).
FinitePath random_path_into(const Diagram& d, HeightTable& heights, Vertex v, int n, std::mt19937_64& rng);
// Every path in E(V_0, v) at level n.
std::vector<FinitePath> enumerate_paths_into(const Diagram& d, Vertex v, int n);

// Rank of an edge among the edges into its target; used for order checks.
using EdgeRank = std::function<int(const Edge&)>;

struct IsoMaps {
  std::function<Vertex(int, Vertex)> g;  // level, vertex -> vertex
  std::function<Edge(const Edge&)> h;
};

enum class OrderRelation { None, Preserve, Reverse };

struct IsoVerdict {
  bool verified = true;
  int depth = 0;
  std::optional<int> violation_level;
  std::string witness;
};

// Intertwining, bijectivity on windows and, optionally, the order relation between ranks.
IsoVerdict verify_isomorphism(const Diagram& a, const Diagram& b, const IsoMaps& maps, int depth,
                              const Window& targets, OrderRelation rel = OrderRelation::None,
                              EdgeRank rank_a = {}, EdgeRank rank_b = {});

// Exports of a truncated diagram.
nlohmann::json render_json(const Diagram& d, int levels, const Window& window);
std::string render_dot(const Diagram& d, int levels, const Window& window);

}  // namespace gbd
