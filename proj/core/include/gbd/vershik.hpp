#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gbd/order.hpp"

namespace gbd {

struct StepResult {
  enum class Status { Image, ExtremeThroughDepth } status = Status::Image;
  OrderedPath path;
  int m = -1;  // index of the edited edge

  bool ok() const { return status == Status::Image; }
};

// Successor in the lexicographic order: edits the least non-maximal edge and replaces the
// edges below it by the minimal path.  ExtremeThroughDepth when every probed edge is maximal.
StepResult vershik_step(const OrderedDiagram& od, const OrderedPath& x, int depth_limit);
StepResult vershik_inverse_step(const OrderedDiagram& od, const OrderedPath& x, int depth_limit);

// Independent successor on E(V_0, v): sort all paths by their rank vectors read from the top edge.
std::vector<FinitePath> lexicographic_paths_into(const OrderedDiagram& od, Vertex v, int n);

struct ExtremeStub {
  Vertex start = 0;
  std::vector<Edge> edges;
  std::optional<int> died_at;  // level with no extreme edge out of the current vertex
};

struct ExtremePathReport {
  std::vector<ExtremeStub> minimal;
  std::vector<ExtremeStub> maximal;
  bool emptiness_certificate = false;
  std::string certificate;
};

// Forward extreme stubs from each start in the window, and the emptiness certificate when every
// extreme edge into targets of the probed window satisfies r(e) < s(e) (index set N).
ExtremePathReport extreme_paths(const OrderedDiagram& od, const Window& starts, int depth);

// Smallest k in [1, horizon] with t_{N+k} < t_N + ... + t_{N+k-1}.
std::optional<int> discontinuity_condition(const BandSpec& band, int N, int horizon);

struct DiscontinuityWitness {
  int n = 0;
  int k = 0;
  OrderedPath x, x1, x2, y1, y2;
  double distance_x1 = 0.0;
  double distance_x2 = 0.0;
  double image_distance = 0.0;
};

// Two paths in the epsilon-ball of the maximal path x whose images differ in the first edge.
// Throws ConditionFails when no k within the horizon satisfies the band condition.
DiscontinuityWitness discontinuity_witness(const OrderedDiagram& od, const OrderedPath& x, double epsilon,
                                           int k_horizon = 64, int depth = 64);

using PairingRule = std::function<OrderedPath(const OrderedPath&)>;

enum class ProbeDirection { Forward, Inverse };

struct ProbeSample {
  int M = 0;  // sample agrees with the extreme path on edges 0..M-1 and differs at M
  OrderedPath path;
};

struct ProbeRow {
  int M = 0;
  int samples = 0;
  int skipped = 0;  // extreme through depth
  double max_image_distance = 0.0;
  double min_image_distance = 1.0;
  int violations = 0;  // image distance above 2^{-(M-1)}
};

struct ProbeTable {
  std::vector<ProbeRow> rows;
  bool any_violation = false;
};

// Every path agreeing with the extreme path below M, differing at M, with `extra` free levels after M.
std::vector<ProbeSample> neighborhood_samples(const OrderedDiagram& od, const OrderedPath& extreme,
                                              const std::vector<int>& Ms, int extra, std::size_t cap = 4096);

ProbeTable continuity_probe(const OrderedDiagram& od, const OrderedPath& extreme, const PairingRule& pairing,
                            const std::vector<ProbeSample>& samples, ProbeDirection dir, int depth);

}  // namespace gbd
