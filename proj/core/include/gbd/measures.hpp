#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gbd/diagram.hpp"
#include "gbd/spectral.hpp"

namespace gbd {

struct CylinderMeasure {
  double value = 0.0;
  std::optional<Surd> exact;
};

// mu([e]) = xi_v / lambda^n for a cylinder of length n ending at v.
CylinderMeasure stationary_cylinder_measure(const EigenPair& pair, const FinitePath& cylinder);

enum class Normalization { Probability, SigmaFinite };

// p^(n) for n = 0..N on a common window; p^(n) = A_n p^(n+1) holds on rows inside the window.
struct MeasureVectors {
  Window window;    // storage window
  Window interior;  // window reported and checked
  std::vector<std::vector<double>> p;
  std::vector<double> residuals;  // level n: sup |A_n p^(n+1) - p^(n)| / sup p^(n) over interior rows
  Normalization normalization = Normalization::Probability;
  Vertex anchor = 0;
  int depth_gap = 0;
  double cauchy = 0.0;  // sup relative change against the previous depth gap
  bool converged = false;
  std::vector<double> inner_mass;  // per depth gap: sup over interior / sup over storage window at level 0
  std::string seed;

  int levels() const { return static_cast<int>(p.size()); }
  double at(int n, Vertex v) const;
};

struct InverseLimitOptions {
  int depth_gap = 40;
  int max_gap = 160;
  int gap_step = 20;
  std::optional<Window> deep_window;               // default: interior padded by gap * reach
  std::function<double(Vertex)> seed;              // default: uniform
  std::string seed_name = "uniform";
  Normalization normalization = Normalization::Probability;
  Vertex anchor = 0;                               // sigma-finite: p^(0)_anchor = 1
  double collapse_threshold = 1e-6;
};

// Pulls seed vectors back from level N + gap through A_k restricted to the deep window until the
// vectors on levels 0..N are Cauchy within tol.  Throws ConeCollapse when the interior loses its
// mass as the gap grows.
MeasureVectors invariant_vectors(const Diagram& d, int N, const Window& interior, double tol,
                                 const InverseLimitOptions& opts = {});

// p^(n)_v = scale * xi_v / lambda^n.
MeasureVectors measure_from_eigenpair(const Diagram& d, const EigenPair& pair, int N, const Window& window,
                                      double scale = 1.0);

double tower_measure(const MeasureVectors& m, HeightTable& heights, Vertex v, int n);
double tower_measure(const EigenPair& pair, HeightTable& heights, Vertex v, int n, double scale = 1.0);

struct NormalizedSequences {
  std::vector<double> lambda;               // lambda_n = |mu^n| / |mu^(n+1)|, n < N
  std::vector<std::vector<double>> mu_hat;  // on the interior window
  std::vector<std::vector<double>> H_hat;
  std::vector<double> inner_products;       // <mu_hat^n, H_hat^n>
  std::vector<double> mu_residuals;         // A_n mu_hat^(n+1) = lambda_n mu_hat^n
  std::vector<double> H_residuals;          // F_n H_hat^n = lambda_n H_hat^(n+1)
  double reconstruction_error = 0.0;        // p^n = |mu^0| mu_hat^n / (lambda_0 ... lambda_{n-1})
  double mu0_norm = 0.0;
  Window window;
};

NormalizedSequences normalized_sequences(const Diagram& d, const MeasureVectors& m, HeightTable& heights);

enum class StochasticKind { PHat, G };

struct StochasticLevel {
  int n = 0;
  std::map<Vertex, std::vector<std::pair<Vertex, double>>> rows;
  double max_row_deviation = 0.0;
  std::optional<double> consistency;  // G: sup |C_n s^(n+1) - s^(n)| relative
};

std::vector<StochasticLevel> stochastic_sequence(const Diagram& d, const MeasureVectors& m, HeightTable& heights,
                                                 StochasticKind kind);

struct NuReport {
  std::vector<double> distance;       // sup_v |nu^(n)_v - xi_v eta_v| over the window
  std::vector<double> mass;           // sum_v nu^(n)_v
  std::vector<double> closed_form;    // sup relative error against xi_v H^(n)_v / lambda^n
  std::vector<std::vector<double>> nu;
  Window window;
};

// nu^(n+1) = nu^(n) P from nu^(0) = xi, xi probability and eta normalized by eta.xi = 1 on the window.
NuReport nu_iteration(const StochasticMatrix& p, const EigenVector& eta, const Window& window, int n_max,
                      HeightTable* heights = nullptr);

struct LimitReport {
  std::vector<int> n;
  std::vector<double> values;
  double target = 0.0;
  std::vector<double> errors;
  double final_error() const { return errors.empty() ? 0.0 : errors.back(); }
};

// H^(n)_w / H^(n+1)_v against eta_w / (lambda eta_v).
LimitReport height_ratio_limit(const Diagram& d, const EigenPair& pair, Vertex w, Vertex v, int n_max);
// a^(N-n)_{w,v} / H^(N)_v against xi_w / (lambda^n sum xi).
LimitReport frequency_check(const Diagram& d, const EigenPair& pair, double xi_sum, Vertex w, int n, Vertex v,
                            const std::vector<int>& horizons);
// a^(N-n1)_{v1,w} / a^(N-n2)_{v2,w} against (xi_v1 / xi_v2) lambda^(n2-n1).
LimitReport ratio_limit_check(const Diagram& d, const EigenPair& pair, Vertex v1, int n1, Vertex v2, int n2, Vertex w,
                              const std::vector<int>& horizons);

}  // namespace gbd
