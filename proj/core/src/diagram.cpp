#include "gbd/diagram.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace gbd {

BandSpec BandSpec::uniform(Vertex t, BigInt L) {
  return BandSpec{[t](int) { return t; }, [L](int) { return L; }};
}

Vertex BandSpec::sum_t(int from, int to) const {
  Vertex s = 0;
  for (int i = from; i < to; ++i) s += t(i);
  return s;
}

BigInt BandSpec::prod_L(int from, int to) const {
  BigInt p = 1;
  for (int i = from; i < to; ++i) p *= L(i);
  return p;
}

std::string to_string(const Edge& e) {
  std::ostringstream os;
  os << "(" << e.level << ": " << e.source << " -> " << e.target << " #" << e.copy << ")";
  return os.str();
}

Diagram::Diagram(IncidenceSequence seq, std::optional<BandSpec> band, std::string name)
    : seq_(std::move(seq)), band_(std::move(band)), name_(std::move(name)) {}

Diagram Diagram::stationary(const Matrix& a, std::optional<BandSpec> band, std::string name) {
  return Diagram(stationary_sequence(a), std::move(band), std::move(name));
}

std::vector<Edge> Diagram::incoming(int n, Vertex target) const {
  std::vector<Edge> out;
  for (const auto& [s, mult] : matrix(n).column(target)) {
    int m = mult.convert_to<int>();
    for (int c = 0; c < m; ++c) out.push_back({n, s, target, c});
  }
  return out;
}

std::vector<Edge> Diagram::outgoing(int n, Vertex source, const Window& targets) const {
  std::vector<Edge> out;
  for (const auto& [t, mult] : matrix(n).row(source, targets).entries) {
    int m = mult.convert_to<int>();
    for (int c = 0; c < m; ++c) out.push_back({n, source, t, c});
  }
  return out;
}

bool Diagram::valid(const Edge& e) const {
  if (e.level < 0 || e.copy < 0) return false;
  if (!in_index_set(index_set(), e.source) || !in_index_set(index_set(), e.target)) return false;
  return multiplicity(e.level, e.source, e.target) > e.copy;
}

bool Diagram::valid(const FinitePath& p) const {
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    const Edge& e = p.edges[i];
    if (!valid(e)) return false;
    if (i > 0 && (e.level != p.edges[i - 1].level + 1 || e.source != p.edges[i - 1].target)) return false;
  }
  return true;
}

Diagram Diagram::telescoped(const std::vector<int>& cuts) const {
  std::optional<BandSpec> band;
  if (band_) {
    const BandSpec b = *band_;
    int gap = cuts.size() >= 2 ? cuts.back() - cuts[cuts.size() - 2] : 1;
    auto cut = [cuts, gap](int k) {
      if (k < static_cast<int>(cuts.size())) return cuts[k];
      return cuts.back() + (k - static_cast<int>(cuts.size()) + 1) * gap;
    };
    band = BandSpec{[b, cut](int k) { return b.sum_t(cut(k), cut(k + 1)); },
                    [b, cut](int k) { return b.prod_L(cut(k), cut(k + 1)); }};
  }
  return Diagram(telescope(seq_, cuts), band, name_.empty() ? name_ : name_ + "/telescoped");
}

SparseVector count_paths_into(const Diagram& d, int m, int n, Vertex v) {
  if (m > n) throw std::invalid_argument("count_paths: m must not exceed n");
  SparseVector u{{v, BigInt(1)}};
  for (int level = n - 1; level >= m; --level) {
    SparseVector next;
    Matrix a = d.matrix(level);
    for (const auto& [t, val] : u)
      for (const auto& [s, mult] : a.column(t)) next[s] += mult * val;
    u = std::move(next);
  }
  return u;
}

BigInt count_paths(const Diagram& d, int m, Vertex w, int n, Vertex v) {
  auto u = count_paths_into(d, m, n, v);
  auto it = u.find(w);
  return it == u.end() ? BigInt(0) : it->second;
}

HeightTable::HeightTable(Diagram d, std::function<BigInt(Vertex)> seed) : d_(std::move(d)), seed_(std::move(seed)) {}

const BigInt& HeightTable::operator()(int n, Vertex v) {
  auto key = std::make_pair(n, v);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  BigInt h = 0;
  if (n == 0) {
    h = seed_ ? seed_(v) : BigInt(1);
  } else {
    for (const auto& [s, mult] : d_.matrix(n - 1).column(v)) h += mult * (*this)(n - 1, s);
  }
  return memo_.emplace(key, std::move(h)).first->second;
}

HeightVector height_vector(const Diagram& d, int n, const Window& window, std::function<BigInt(Vertex)> seed) {
  HeightTable table(d, std::move(seed));
  HeightVector hv;
  hv.level = n;
  hv.window = window;
  for (Vertex v = window.lo; v <= window.hi; ++v) hv.values[v] = table(n, v);
  return hv;
}

ConeBounds cone_bounds(const Diagram& d, Vertex v, int n, ConeDirection dir, int m_steps) {
  if (!d.band()) throw InvalidMatrix("cone bounds need a band specification");
  const BandSpec& b = *d.band();
  ConeBounds out;
  if (dir == ConeDirection::Ancestors) {
    Vertex s = b.sum_t(0, n);
    out.interval = Window{v - s, v + s};
    out.path_bound = b.prod_L(0, n);
  } else {
    Vertex s = b.sum_t(n, n + m_steps);
    out.interval = Window{v - s, v + s};
  }
  if (d.index_set() == IndexSet::Naturals) out.interval.lo = std::max<Vertex>(out.interval.lo, 1);
  return out;
}

BandCheck validate_band(const Diagram& d, const Window& targets, int levels) {
  BandCheck check;
  if (!d.band()) {
    check.ok = false;
    check.violation = "no band specification";
    return check;
  }
  const BandSpec& b = *d.band();
  for (int n = 0; n < levels; ++n) {
    const Vertex t = b.t(n);
    const Matrix a = d.matrix(n);
    for (Vertex v = targets.lo; v <= targets.hi; ++v) {
      BigInt total = 0;
      bool lo = false, hi = false;
      for (const auto& [s, mult] : a.column(v)) {
        if (s < v - t || s > v + t) {
          check.ok = false;
          check.violation = "level " + std::to_string(n) + ": source " + std::to_string(s) + " outside band of " +
                            std::to_string(v);
          return check;
        }
        total += mult;
        lo = lo || s == v - t;
        hi = hi || s == v + t;
      }
      if (total > b.L(n)) {
        check.ok = false;
        check.violation = "level " + std::to_string(n) + ": vertex " + std::to_string(v) + " has " +
                          total.str() + " incoming edges";
        return check;
      }
      bool lo_exists = in_index_set(d.index_set(), v - t);
      if ((lo_exists && !lo) || !hi) {
        check.ok = false;
        check.violation = "level " + std::to_string(n) + ": missing extreme edge into " + std::to_string(v);
        return check;
      }
    }
  }
  return check;
}

namespace {

// Builds a path of the given length from `from` to the vertex whose backward
// count vectors are stored in `back` (back[r] = counts of length-r paths to the end).
FinitePath walk_counts(const Diagram& d, int level, Vertex from, const std::vector<SparseVector>& back, int length) {
  FinitePath p;
  p.start = from;
  Vertex cur = from;
  for (int r = length; r >= 1; --r) {
    const int lvl = level + (length - r);
    const Matrix a = d.matrix(lvl);
    bool moved = false;
    for (const auto& [x, cnt] : back[r - 1]) {
      if (cnt == 0) continue;
      if (a.at(cur, x) > 0) {
        p.edges.push_back({lvl, cur, x, 0});
        cur = x;
        moved = true;
        break;
      }
    }
    if (!moved) throw NoWitnessWithinHorizon("path reconstruction failed");
  }
  return p;
}

SparseVector backward_step(const Matrix& a, const SparseVector& u) {
  SparseVector next;
  for (const auto& [t, val] : u)
    for (const auto& [s, mult] : a.column(t)) next[s] += mult * val;
  return next;
}

}  // namespace

TransitiveWitness transitive_witness(const Diagram& d, const FinitePath& cylinder, Vertex i, int k, int horizon) {
  if (!d.is_stationary()) throw std::invalid_argument("transitive_witness needs a stationary diagram");
  if (k < 1) throw std::invalid_argument("return length must be positive");
  const Matrix a = d.matrix(0);
  const Vertex j = cylinder.range();
  const int N = cylinder.end_level();
  TransitiveWitness w;
  w.cylinder = cylinder;

  std::vector<SparseVector> loop_back{{{i, BigInt(1)}}};
  for (int r = 1; r <= k; ++r) loop_back.push_back(backward_step(a, loop_back.back()));
  if (loop_back[k].count(i) == 0 || loop_back[k][i] == 0)
    throw NoWitnessWithinHorizon("no return of length " + std::to_string(k) + " at vertex " + std::to_string(i));

  std::vector<SparseVector> back{{{i, BigInt(1)}}};
  for (int len = 1; len <= horizon; ++len) {
    back.push_back(backward_step(a, back.back()));
    if ((N + len) % k != 0) continue;
    auto it = back[len].find(j);
    if (it == back[len].end() || it->second == 0) continue;
    w.connector = walk_counts(d, N, j, back, len);
    w.end_level = N + len;
    w.loop = walk_counts(d, w.end_level, i, loop_back, k);
    return w;
  }
  throw NoWitnessWithinHorizon("vertex " + std::to_string(i) + " not reached from " + std::to_string(j) +
                               " within " + std::to_string(horizon) + " levels");
}

SlantVerdict slanting_membership(const Diagram& d, const FinitePath& x, Vertex w, SlantSign sign) {
  if (!d.band()) throw InvalidMatrix("slanting sets need a band specification");
  const BandSpec& b = *d.band();
  SlantVerdict v;
  const bool plus = sign == SlantSign::Plus;
  const Vertex s0 = x.source();
  if (plus ? s0 < w : s0 > w) {
    v.consistent = false;
    v.violated_level = -1;
    return v;
  }
  Vertex bound = 0;
  for (const Edge& e : x.edges) {
    bound += b.t(e.level);
    const Vertex r = e.target;
    if (plus ? r < w + bound : r > w - bound) {
      v.consistent = false;
      v.violated_level = e.level;
      return v;
    }
    v.depth = e.level + 1;
  }
  return v;
}

FinitePath random_path_into(const Diagram& d, HeightTable& heights, Vertex v, int n, std::mt19937_64& rng) {
  FinitePath p;
  p.start = v;
  Vertex cur = v;
  std::vector<Edge> rev;
  for (int lvl = n - 1; lvl >= 0; --lvl) {
    auto in = d.incoming(lvl, cur);
    if (in.empty()) throw InvalidPath("vertex " + std::to_string(cur) + " has no incoming edges");
    std::vector<double> wts;
    BigInt top = 0;
    for (const auto& e : in) top = std::max(top, heights(lvl, e.source));
    for (const auto& e : in) wts.push_back(ratio_big(heights(lvl, e.source), top));
    std::discrete_distribution<std::size_t> pick(wts.begin(), wts.end());
    const Edge& e = in[pick(rng)];
    rev.push_back(e);
    cur = e.source;
  }
  p.edges.assign(rev.rbegin(), rev.rend());
  if (p.edges.empty()) p.start = v;
  return p;
}

std::vector<FinitePath> enumerate_paths_into(const Diagram& d, Vertex v, int n) {
  std::vector<std::vector<Edge>> partial{{}};
  std::vector<Vertex> heads{v};
  for (int lvl = n - 1; lvl >= 0; --lvl) {
    std::vector<std::vector<Edge>> next;
    std::vector<Vertex> next_heads;
    for (std::size_t k = 0; k < partial.size(); ++k) {
      for (const auto& e : d.incoming(lvl, heads[k])) {
        auto p = partial[k];
        p.push_back(e);
        next.push_back(std::move(p));
        next_heads.push_back(e.source);
      }
    }
    partial = std::move(next);
    heads = std::move(next_heads);
  }
  std::vector<FinitePath> out;
  for (auto& rev : partial) {
    FinitePath p;
    p.edges.assign(rev.rbegin(), rev.rend());
    p.start = p.edges.empty() ? v : p.edges.front().source;
    out.push_back(std::move(p));
  }
  return out;
}

IsoVerdict verify_isomorphism(const Diagram& a, const Diagram& b, const IsoMaps& maps, int depth,
                              const Window& targets, OrderRelation rel, EdgeRank rank_a, EdgeRank rank_b) {
  IsoVerdict out;
  auto fail = [&](int level, std::string why) {
    out.verified = false;
    out.violation_level = level;
    out.witness = std::move(why);
    return out;
  };
  for (int n = 0; n <= depth; ++n) {
    std::set<Vertex> images;
    for (Vertex v = targets.lo; v <= targets.hi; ++v) {
      if (!in_index_set(a.index_set(), v)) continue;
      Vertex gv = maps.g(n, v);
      if (!in_index_set(b.index_set(), gv))
        return fail(n, "g_" + std::to_string(n) + "(" + std::to_string(v) + ") outside the target index set");
      if (!images.insert(gv).second) return fail(n, "g_" + std::to_string(n) + " is not injective");
    }
  }
  for (int n = 0; n < depth; ++n) {
    for (Vertex v = targets.lo; v <= targets.hi; ++v) {
      if (!in_index_set(a.index_set(), v)) continue;
      const Vertex gv = maps.g(n + 1, v);
      auto ea = a.incoming(n, v);
      auto eb = b.incoming(n, gv);
      if (ea.size() != eb.size())
        return fail(n, "vertex " + std::to_string(v) + " has " + std::to_string(ea.size()) + " incoming edges, image " +
                           std::to_string(eb.size()));
      std::vector<Edge> imgs;
      for (const Edge& e : ea) {
        Edge f = maps.h(e);
        if (f.level != n || f.target != gv || f.source != maps.g(n, e.source) || !b.valid(f))
          return fail(n, "edge " + to_string(e) + " maps to " + to_string(f));
        if (std::find(imgs.begin(), imgs.end(), f) != imgs.end())
          return fail(n, "h_" + std::to_string(n) + " is not injective at " + to_string(e));
        imgs.push_back(f);
      }
      if (rel != OrderRelation::None && rank_a && rank_b) {
        std::vector<std::pair<int, int>> ranks;
        for (std::size_t k = 0; k < ea.size(); ++k) ranks.push_back({rank_a(ea[k]), rank_b(imgs[k])});
        std::sort(ranks.begin(), ranks.end());
        for (std::size_t k = 1; k < ranks.size(); ++k) {
          bool up = ranks[k].second > ranks[k - 1].second;
          if (up != (rel == OrderRelation::Preserve))
            return fail(n, "order relation broken at vertex " + std::to_string(v));
        }
      }
    }
    out.depth = n + 1;
  }
  return out;
}

nlohmann::json render_json(const Diagram& d, int levels, const Window& window) {
  nlohmann::json edges = nlohmann::json::array();
  for (int n = 0; n < levels; ++n)
    for (Vertex v = window.lo; v <= window.hi; ++v)
      for (const auto& [s, mult] : d.matrix(n).column(v))
        edges.push_back({{"level", n}, {"source", s}, {"target", v}, {"multiplicity", mult.str()},
                         {"source_in_window", window.contains(s)}});
  return {{"index_set", to_string(d.index_set())},
          {"levels", levels},
          {"window", {window.lo, window.hi}},
          {"edges", edges}};
}

std::string render_dot(const Diagram& d, int levels, const Window& window) {
  std::ostringstream os;
  os << "digraph gbd {\n  rankdir=TB;\n";
  for (int n = 0; n <= levels; ++n) {
    os << "  { rank=same;";
    for (Vertex v = window.lo; v <= window.hi; ++v) os << " \"" << n << ":" << v << "\"";
    os << " }\n";
  }
  for (int n = 0; n < levels; ++n)
    for (Vertex v = window.lo; v <= window.hi; ++v)
      for (const auto& [s, mult] : d.matrix(n).column(v)) {
        if (!window.contains(s)) continue;
        os << "  \"" << n << ":" << s << "\" -> \"" << n + 1 << ":" << v << "\"";
        if (mult > 1) os << " [label=\"" << mult << "\"]";
        os << ";\n";
      }
  os << "}\n";
  return os.str();
}

}  // namespace gbd
