#include "gbd/vershik.hpp"

#include <algorithm>
#include <cmath>

namespace gbd {

namespace {

StepResult step(const OrderedDiagram& od, const OrderedPath& x, int depth_limit, bool forward) {
  StepResult res;
  auto edges = materialize(od, x, depth_limit);
  for (int m = 0; m < depth_limit; ++m) {
    auto next = forward ? successor_edge(od, edges[m]) : predecessor_edge(od, edges[m]);
    if (!next) continue;
    FinitePath below = forward ? minimal_path_into(od, next->source, m) : maximal_path_into(od, next->source, m);
    OrderedPath out;
    out.tail = x.tail;
    out.prefix = below.edges;
    out.prefix.push_back(*next);
    for (std::size_t i = static_cast<std::size_t>(m) + 1; i < x.prefix.size(); ++i) out.prefix.push_back(x.prefix[i]);
    out.start = out.prefix.front().source;
    res.path = std::move(out);
    res.m = m;
    return res;
  }
  res.status = StepResult::Status::ExtremeThroughDepth;
  res.path = x;
  return res;
}

}  // namespace

StepResult vershik_step(const OrderedDiagram& od, const OrderedPath& x, int depth_limit) {
  return step(od, x, depth_limit, true);
}

StepResult vershik_inverse_step(const OrderedDiagram& od, const OrderedPath& x, int depth_limit) {
  return step(od, x, depth_limit, false);
}

std::vector<FinitePath> lexicographic_paths_into(const OrderedDiagram& od, Vertex v, int n) {
  auto paths = enumerate_paths_into(od.diagram(), v, n);
  std::vector<std::pair<std::vector<int>, FinitePath>> keyed;
  for (auto& p : paths) {
    std::vector<int> key;
    for (auto it = p.edges.rbegin(); it != p.edges.rend(); ++it) key.push_back(od.rank(*it));
    keyed.push_back({std::move(key), std::move(p)});
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<FinitePath> out;
  for (auto& [k, p] : keyed) out.push_back(std::move(p));
  return out;
}

ExtremePathReport extreme_paths(const OrderedDiagram& od, const Window& starts, int depth) {
  ExtremePathReport rep;
  for (Vertex w = starts.lo; w <= starts.hi; ++w) {
    if (!in_index_set(od.diagram().index_set(), w)) continue;
    for (int kind = 0; kind < 2; ++kind) {
      ExtremeStub stub;
      stub.start = w;
      Vertex cur = w;
      for (int n = 0; n < depth; ++n) {
        auto e = kind == 0 ? minimal_out(od, n, cur) : maximal_out(od, n, cur);
        if (!e) {
          stub.died_at = n;
          break;
        }
        stub.edges.push_back(*e);
        cur = e->target;
      }
      (kind == 0 ? rep.minimal : rep.maximal).push_back(std::move(stub));
    }
  }
  if (od.diagram().index_set() != IndexSet::Naturals) {
    rep.certificate = "no certificate: vertices indexed by Z";
    return rep;
  }
  const Vertex top = starts.hi + 2;
  for (int n = 0; n < depth; ++n) {
    for (Vertex v = 1; v <= top; ++v) {
      auto s = od.ranked(n, v);
      if (s.empty()) continue;
      if (s.front().source <= v || s.back().source <= v) {
        rep.certificate = "extreme edge into " + std::to_string(v) + " at level " + std::to_string(n + 1) +
                          " does not come from the right";
        return rep;
      }
    }
  }
  for (const auto* list : {&rep.minimal, &rep.maximal})
    for (const auto& stub : *list)
      if (!stub.died_at) {
        rep.certificate = "extreme stub from " + std::to_string(stub.start) + " survives depth " + std::to_string(depth);
        return rep;
      }
  rep.emptiness_certificate = true;
  rep.certificate = "every extreme edge into vertices 1.." + std::to_string(top) + " through level " +
                    std::to_string(depth) + " satisfies r(e) < s(e); all extreme stubs end before depth " +
                    std::to_string(depth);
  return rep;
}

std::optional<int> discontinuity_condition(const BandSpec& band, int N, int horizon) {
  for (int k = 1; k <= horizon; ++k)
    if (band.t(N + k) < band.sum_t(N, N + k)) return k;
  return std::nullopt;
}

DiscontinuityWitness discontinuity_witness(const OrderedDiagram& od, const OrderedPath& x, double epsilon,
                                           int k_horizon, int depth) {
  if (!od.diagram().band()) throw InvalidMatrix("discontinuity witness needs a band specification");
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  DiscontinuityWitness w;
  int n = 1;
  while (!(std::ldexp(1.0, -(n - 1)) < epsilon)) ++n;
  auto k = discontinuity_condition(*od.diagram().band(), n, k_horizon);
  if (!k) throw ConditionFails("no k <= " + std::to_string(k_horizon) + " for N = " + std::to_string(n));
  w.n = n;
  w.k = *k;
  w.x = x;
  auto xe = materialize(od, x, n + *k + 1);
  for (int i = 0; i < n + *k; ++i)
    if (!od.is_maximal(xe[i])) throw InvalidPath("edge " + std::to_string(i) + " of the reference path is not maximal");

  auto branch = [&](int at) {
    OrderedPath p;
    p.prefix.assign(xe.begin(), xe.begin() + at);
    auto e = minimal_out(od, at, xe[at - 1].target);
    if (!e) throw InvalidPath("no minimal edge out of " + std::to_string(xe[at - 1].target));
    p.prefix.push_back(*e);
    p.start = p.prefix.front().source;
    p.tail = od.default_tail();
    return p;
  };
  w.x1 = branch(n);
  w.x2 = branch(n + *k);
  const int probe = std::max(depth, n + *k + 2);
  auto s1 = vershik_step(od, w.x1, probe), s2 = vershik_step(od, w.x2, probe);
  if (!s1.ok() || !s2.ok()) throw InvalidPath("witness path is maximal through the probe depth");
  w.y1 = s1.path;
  w.y2 = s2.path;
  w.distance_x1 = path_distance(od, x, w.x1, probe);
  w.distance_x2 = path_distance(od, x, w.x2, probe);
  w.image_distance = path_distance(od, w.y1, w.y2, probe);
  return w;
}

std::vector<ProbeSample> neighborhood_samples(const OrderedDiagram& od, const OrderedPath& extreme,
                                              const std::vector<int>& Ms, int extra, std::size_t cap) {
  std::vector<ProbeSample> out;
  const Diagram& d = od.diagram();
  for (int M : Ms) {
    auto xe = materialize(od, extreme, M + 1);
    const Vertex u = M == 0 ? xe[0].source : xe[M - 1].target;
    std::vector<std::vector<Edge>> frontier;
    for (const Edge& e : d.outgoing(M, u, od.out_window(M, u))) {
      if (e == xe[M]) continue;
      std::vector<Edge> p(xe.begin(), xe.begin() + M);
      p.push_back(e);
      frontier.push_back(std::move(p));
    }
    for (int lvl = M + 1; lvl <= M + extra; ++lvl) {
      std::vector<std::vector<Edge>> next;
      for (const auto& p : frontier) {
        const Vertex r = p.back().target;
        for (const Edge& e : d.outgoing(lvl, r, od.out_window(lvl, r))) {
          if (next.size() >= cap) break;
          auto q = p;
          q.push_back(e);
          next.push_back(std::move(q));
        }
      }
      frontier = std::move(next);
    }
    for (auto& p : frontier) {
      if (out.size() >= cap * Ms.size()) break;
      ProbeSample s;
      s.M = M;
      s.path.prefix = std::move(p);
      s.path.start = s.path.prefix.front().source;
      s.path.tail = od.default_tail();
      out.push_back(std::move(s));
    }
  }
  return out;
}

ProbeTable continuity_probe(const OrderedDiagram& od, const OrderedPath& extreme, const PairingRule& pairing,
                            const std::vector<ProbeSample>& samples, ProbeDirection dir, int depth) {
  ProbeTable table;
  const OrderedPath paired = pairing(extreme);
  std::map<int, ProbeRow> rows;
  for (const auto& s : samples) {
    ProbeRow& row = rows[s.M];
    row.M = s.M;
    auto r = dir == ProbeDirection::Forward ? vershik_step(od, s.path, depth) : vershik_inverse_step(od, s.path, depth);
    if (!r.ok()) {
      ++row.skipped;
      continue;
    }
    ++row.samples;
    double dist = path_distance(od, r.path, paired, depth);
    row.max_image_distance = std::max(row.max_image_distance, dist);
    row.min_image_distance = std::min(row.min_image_distance, dist);
    if (dist > std::ldexp(1.0, -(s.M - 1)) * (1 + 1e-12)) ++row.violations;
  }
  for (auto& [M, row] : rows) {
    if (row.violations > 0) table.any_violation = true;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace gbd
