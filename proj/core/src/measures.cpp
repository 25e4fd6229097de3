#include "gbd/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gbd {

CylinderMeasure stationary_cylinder_measure(const EigenPair& pair, const FinitePath& cylinder) {
  const Vertex v = cylinder.range();
  const int n = static_cast<int>(cylinder.length());
  CylinderMeasure m;
  m.value = pair.xi(v) / std::pow(pair.lambda, n);
  if (pair.lambda_exact) {
    if (auto x = pair.xi.exact_at(v)) m.exact = *x / pair.lambda_exact->pow(n);
  }
  return m;
}

double MeasureVectors::at(int n, Vertex v) const {
  if (n < 0 || n >= levels() || !window.contains(v)) throw InvalidWindow("measure vector entry outside its window");
  return p[n][v - window.lo];
}

namespace {

using Rows = std::vector<std::vector<std::pair<std::size_t, double>>>;

Rows window_rows(const Matrix& a, const Window& w) {
  Rows rows(w.size());
  for (Vertex i = w.lo; i <= w.hi; ++i)
    for (const auto& [j, v] : a.row(i, w).entries)
      rows[i - w.lo].push_back({static_cast<std::size_t>(j - w.lo), v.convert_to<double>()});
  return rows;
}

std::vector<double> mul(const Rows& rows, const std::vector<double>& x) {
  std::vector<double> y(rows.size(), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (const auto& [j, a] : rows[i]) y[i] += a * x[j];
  return y;
}

double level_residual(const Rows& rows, const std::vector<double>& upper, const std::vector<double>& lower,
                      const Window& storage, const Window& interior) {
  auto y = mul(rows, upper);
  double worst = 0.0, scale = 0.0;
  for (Vertex i = interior.lo; i <= interior.hi; ++i) {
    const std::size_t k = static_cast<std::size_t>(i - storage.lo);
    worst = std::max(worst, std::abs(y[k] - lower[k]));
    scale = std::max(scale, std::abs(lower[k]));
  }
  return scale > 0 ? worst / scale : worst;
}

struct PullBack {
  std::vector<std::vector<double>> p;
  double inner_mass = 0.0;
  bool positive = true;
};

PullBack pull_back(const Diagram& d, int N, int M, const Window& W, const Window& interior,
                   const InverseLimitOptions& opts) {
  std::vector<double> v(W.size(), 1.0);
  if (opts.seed)
    for (Vertex i = W.lo; i <= W.hi; ++i) v[i - W.lo] = opts.seed(i);
  std::optional<Rows> cached;
  if (d.is_stationary()) cached = window_rows(d.matrix(0), W);
  std::vector<std::vector<double>> kept(N + 1);
  std::vector<double> scale(N + 1, 1.0);  // c_k for k < N
  PullBack out;
  for (int k = M - 1; k >= 0; --k) {
    std::vector<double> w = mul(cached ? *cached : window_rows(d.matrix(k), W), v);
    double c = *std::max_element(w.begin(), w.end());
    if (!(c > 0)) {
      out.positive = false;
      return out;
    }
    for (auto& x : w) x /= c;
    v = std::move(w);
    if (k <= N) kept[k] = v;
    if (k < N) scale[k] = c;
  }
  double z = 0.0;
  if (opts.normalization == Normalization::Probability) {
    for (double x : kept[0]) z += x;
  } else {
    if (!W.contains(opts.anchor)) throw InvalidWindow("anchor outside the window");
    z = kept[0][opts.anchor - W.lo];
  }
  if (!(z > 0)) {
    out.positive = false;
    return out;
  }
  double factor = z;
  out.p.resize(N + 1);
  for (int k = 0; k <= N; ++k) {
    if (k > 0) factor *= scale[k - 1];
    out.p[k] = kept[k];
    for (auto& x : out.p[k]) x /= factor;
  }
  double inner = 0.0;
  for (Vertex i = interior.lo; i <= interior.hi; ++i) {
    double x = kept[0][i - W.lo];
    if (!(x > 0)) out.positive = false;
    inner = std::max(inner, x);
  }
  out.inner_mass = inner;
  return out;
}

}  // namespace

MeasureVectors invariant_vectors(const Diagram& d, int N, const Window& interior, double tol,
                                 const InverseLimitOptions& opts) {
  if (N < 0) throw std::invalid_argument("invariant_vectors: negative level");
  const Vertex reach = d.matrix(0).reach().value_or(1);
  std::optional<std::vector<std::vector<double>>> prev;
  std::optional<Window> prev_window;
  MeasureVectors best;
  std::vector<double> masses;
  for (int gap = opts.depth_gap; gap <= std::max(opts.max_gap, opts.depth_gap); gap += opts.gap_step) {
    const Window W = opts.deep_window ? *opts.deep_window
                                      : pad(d.index_set(), interior, static_cast<Vertex>(gap + N + 10) * reach);
    if (!(W.contains(interior.lo) && W.contains(interior.hi))) throw InvalidWindow("deep window misses the interior");
    PullBack pb = pull_back(d, N, N + gap, W, interior, opts);
    masses.push_back(pb.inner_mass);
    if (!pb.positive) {
      std::ostringstream os;
      os << "non-positive approximant on the window at depth gap " << gap;
      throw ConeCollapse(os.str());
    }
    MeasureVectors mv;
    mv.window = W;
    mv.interior = interior;
    mv.p = std::move(pb.p);
    mv.normalization = opts.normalization;
    mv.anchor = opts.anchor;
    mv.depth_gap = gap;
    mv.seed = opts.seed_name;
    mv.inner_mass = masses;
    for (int n = 0; n < N; ++n)
      mv.residuals.push_back(level_residual(window_rows(d.matrix(n), W), mv.p[n + 1], mv.p[n], W, interior));
    if (prev) {
      double diff = 0.0;
      for (int n = 0; n <= N; ++n) {
        double sup = 0.0, dn = 0.0;
        for (Vertex i = interior.lo; i <= interior.hi; ++i) {
          double a = mv.p[n][i - W.lo], b = (*prev)[n][i - prev_window->lo];
          sup = std::max(sup, std::abs(a));
          dn = std::max(dn, std::abs(a - b));
        }
        diff = std::max(diff, sup > 0 ? dn / sup : dn);
      }
      mv.cauchy = diff;
      if (diff < tol) {
        mv.converged = true;
        return mv;
      }
    } else {
      mv.cauchy = std::numeric_limits<double>::infinity();
    }
    prev = mv.p;
    prev_window = W;
    best = std::move(mv);
  }
  bool decreasing = masses.size() >= 2;
  for (std::size_t i = 1; i < masses.size(); ++i)
    if (!(masses[i] < masses[i - 1])) decreasing = false;
  if (decreasing && masses.back() < opts.collapse_threshold) {
    std::ostringstream os;
    os << "interior mass relative to the window fell to " << masses.back() << " and decreased across "
       << masses.size() << " depth gaps";
    throw ConeCollapse(os.str());
  }
  return best;
}

MeasureVectors measure_from_eigenpair(const Diagram& d, const EigenPair& pair, int N, const Window& window,
                                      double scale) {
  MeasureVectors mv;
  mv.window = window;
  const Vertex reach = d.matrix(0).reach().value_or(1);
  mv.interior = window;
  if (d.index_set() == IndexSet::Integers || window.lo > 1) mv.interior.lo += reach;
  mv.interior.hi -= reach;
  if (mv.interior.hi < mv.interior.lo) throw InvalidWindow("window too small for an interior");
  mv.seed = "eigen";
  mv.converged = true;
  for (int n = 0; n <= N; ++n) {
    std::vector<double> level(window.size());
    const double ln = std::pow(pair.lambda, n);
    for (Vertex v = window.lo; v <= window.hi; ++v) level[v - window.lo] = scale * pair.xi(v) / ln;
    mv.p.push_back(std::move(level));
  }
  for (int n = 0; n < N; ++n)
    mv.residuals.push_back(level_residual(window_rows(d.matrix(n), window), mv.p[n + 1], mv.p[n], window, mv.interior));
  return mv;
}

double tower_measure(const MeasureVectors& m, HeightTable& heights, Vertex v, int n) {
  return m.at(n, v) * heights(n, v).convert_to<double>();
}

double tower_measure(const EigenPair& pair, HeightTable& heights, Vertex v, int n, double scale) {
  return scale * pair.xi(v) * std::exp(log_big(heights(n, v)) - n * std::log(pair.lambda));
}

NormalizedSequences normalized_sequences(const Diagram& d, const MeasureVectors& m, HeightTable& heights) {
  NormalizedSequences out;
  const Window I = m.interior;
  const Window W = m.window;
  out.window = I;
  const int L = m.levels();
  std::vector<double> norms(L);
  for (int n = 0; n < L; ++n) {
    double s = 0.0;
    for (Vertex v = I.lo; v <= I.hi; ++v) s = std::max(s, m.at(n, v));
    if (!(s > 0)) throw NoPositiveSolution("measure vector vanishes on the window at level " + std::to_string(n));
    norms[n] = s;
  }
  out.mu0_norm = norms[0];
  std::vector<double> ip(L);
  for (int n = 0; n < L; ++n) {
    std::vector<double> mh, hh;
    double acc = 0.0;
    for (Vertex v = I.lo; v <= I.hi; ++v) {
      double x = m.at(n, v) / norms[n];
      mh.push_back(x);
      acc += x * heights(n, v).convert_to<double>();
    }
    ip[n] = acc;
    double check = 0.0;
    for (Vertex v = I.lo; v <= I.hi; ++v) {
      double h = heights(n, v).convert_to<double>() / acc;
      hh.push_back(h);
      check += mh[v - I.lo] * h;
    }
    out.mu_hat.push_back(std::move(mh));
    out.H_hat.push_back(std::move(hh));
    out.inner_products.push_back(check);
    if (n + 1 < L) out.lambda.push_back(norms[n] / norms[n + 1]);
  }
  for (int n = 0; n + 1 < L; ++n) {
    const Matrix a = d.matrix(n);
    const double lam = out.lambda[n];
    double worst = 0.0, scale = 0.0;
    for (Vertex w = I.lo; w <= I.hi; ++w) {
      double acc = 0.0;
      for (const auto& [v, val] : a.row(w, W).entries) acc += val.convert_to<double>() * m.at(n + 1, v) / norms[n + 1];
      double target = lam * m.at(n, w) / norms[n];
      worst = std::max(worst, std::abs(acc - target));
      scale = std::max(scale, std::abs(target));
    }
    out.mu_residuals.push_back(scale > 0 ? worst / scale : worst);
    worst = scale = 0.0;
    for (Vertex v = I.lo; v <= I.hi; ++v) {
      double acc = 0.0;
      for (const auto& [w, val] : a.column(v)) acc += val.convert_to<double>() * heights(n, w).convert_to<double>() / ip[n];
      double target = lam * heights(n + 1, v).convert_to<double>() / ip[n + 1];
      worst = std::max(worst, std::abs(acc - target));
      scale = std::max(scale, std::abs(target));
    }
    out.H_residuals.push_back(scale > 0 ? worst / scale : worst);
  }
  double prod = 1.0, err = 0.0;
  for (int n = 0; n < L; ++n) {
    if (n > 0) prod *= out.lambda[n - 1];
    for (Vertex v = I.lo; v <= I.hi; ++v) {
      double rebuilt = out.mu0_norm * out.mu_hat[n][v - I.lo] / prod;
      double orig = m.at(n, v);
      err = std::max(err, std::abs(rebuilt - orig) / std::max(std::abs(orig), 1e-300));
    }
  }
  out.reconstruction_error = err;
  return out;
}

std::vector<StochasticLevel> stochastic_sequence(const Diagram& d, const MeasureVectors& m, HeightTable& heights,
                                                 StochasticKind kind) {
  std::vector<StochasticLevel> out;
  const Window I = m.interior, W = m.window;
  for (int n = 0; n + 1 < m.levels(); ++n) {
    const Matrix a = d.matrix(n);
    StochasticLevel lvl;
    lvl.n = n;
    if (kind == StochasticKind::PHat) {
      for (Vertex w = I.lo; w <= I.hi; ++w) {
        double sum = 0.0;
        auto& row = lvl.rows[w];
        for (const auto& [v, val] : a.row(w, W).entries) {
          double p = val.convert_to<double>() * m.at(n + 1, v) / m.at(n, w);
          row.push_back({v, p});
          sum += p;
        }
        lvl.max_row_deviation = std::max(lvl.max_row_deviation, std::abs(sum - 1.0));
      }
    } else {
      for (Vertex v = I.lo; v <= I.hi; ++v) {
        double sum = 0.0;
        auto& row = lvl.rows[v];
        const double hv = heights(n + 1, v).convert_to<double>();
        for (const auto& [w, val] : a.column(v)) {
          double g = val.convert_to<double>() * heights(n, w).convert_to<double>() / hv;
          row.push_back({w, g});
          sum += g;
        }
        lvl.max_row_deviation = std::max(lvl.max_row_deviation, std::abs(sum - 1.0));
      }
      double worst = 0.0, scale = 0.0;
      for (Vertex w = I.lo; w <= I.hi; ++w) {
        double acc = 0.0;
        const double hw = heights(n, w).convert_to<double>();
        for (const auto& [v, val] : a.row(w, W).entries) {
          double hv = heights(n + 1, v).convert_to<double>();
          acc += (val.convert_to<double>() * hw / hv) * m.at(n + 1, v) * hv;
        }
        double target = m.at(n, w) * hw;
        worst = std::max(worst, std::abs(acc - target));
        scale = std::max(scale, std::abs(target));
      }
      lvl.consistency = scale > 0 ? worst / scale : worst;
    }
    out.push_back(std::move(lvl));
  }
  return out;
}

NuReport nu_iteration(const StochasticMatrix& p, const EigenVector& eta, const Window& window, int n_max,
                      HeightTable* heights) {
  NuReport rep;
  rep.window = window;
  const std::size_t sz = window.size();
  std::vector<double> xi(sz), target(sz);
  double xs = 0.0;
  for (Vertex v = window.lo; v <= window.hi; ++v) xs += xi[v - window.lo] = p.xi()(v);
  for (auto& x : xi) x /= xs;
  double dot = 0.0;
  for (Vertex v = window.lo; v <= window.hi; ++v) dot += eta(v) * xi[v - window.lo];
  for (Vertex v = window.lo; v <= window.hi; ++v) target[v - window.lo] = xi[v - window.lo] * eta(v) / dot;

  const bool naturals = p.matrix().index_set() == IndexSet::Naturals;
  std::vector<double> nu = xi;
  for (int n = 0; n <= n_max; ++n) {
    double dist = 0.0, mass = 0.0;
    for (std::size_t k = 0; k < sz; ++k) {
      dist = std::max(dist, std::abs(nu[k] - target[k]));
      mass += nu[k];
    }
    rep.distance.push_back(dist);
    rep.mass.push_back(mass);
    if (heights) {
      double worst = 0.0;
      const Vertex lo = naturals ? window.lo : window.lo + n, hi = window.hi - n;
      for (Vertex v = lo; v <= hi; ++v) {
        double cf = xi[v - window.lo] * std::exp(log_big((*heights)(n, v)) - n * std::log(p.lambda()));
        worst = std::max(worst, std::abs(nu[v - window.lo] - cf) / cf);
      }
      rep.closed_form.push_back(worst);
    }
    rep.nu.push_back(nu);
    if (n == n_max) break;
    std::vector<double> next(sz, 0.0);
    for (Vertex v = window.lo; v <= window.hi; ++v)
      for (const auto& [w, pw] : p.column(v))
        if (window.contains(w)) next[v - window.lo] += nu[w - window.lo] * pw;
    nu = std::move(next);
  }
  return rep;
}

LimitReport height_ratio_limit(const Diagram& d, const EigenPair& pair, Vertex w, Vertex v, int n_max) {
  HeightTable h(d);
  LimitReport rep;
  rep.target = pair.eta(w) / (pair.lambda * pair.eta(v));
  for (int n = 0; n <= n_max; ++n) {
    double r = ratio_big(h(n, w), h(n + 1, v));
    rep.n.push_back(n);
    rep.values.push_back(r);
    rep.errors.push_back(std::abs(r - rep.target));
  }
  return rep;
}

LimitReport frequency_check(const Diagram& d, const EigenPair& pair, double xi_sum, Vertex w, int n, Vertex v,
                            const std::vector<int>& horizons) {
  if (!d.is_stationary()) throw std::invalid_argument("frequency_check needs a stationary diagram");
  HeightTable h(d);
  const Matrix a = d.matrix(0);
  LimitReport rep;
  rep.target = pair.xi(w) / (std::pow(pair.lambda, n) * xi_sum);
  for (int N : horizons) {
    if (N <= n) throw std::invalid_argument("horizon must exceed the cylinder length");
    auto col = power_column(a, N - n, v);
    auto it = col.find(w);
    double r = it == col.end() ? 0.0 : ratio_big(it->second, h(N, v));
    rep.n.push_back(N);
    rep.values.push_back(r);
    rep.errors.push_back(std::abs(r - rep.target));
  }
  return rep;
}

LimitReport ratio_limit_check(const Diagram& d, const EigenPair& pair, Vertex v1, int n1, Vertex v2, int n2, Vertex w,
                              const std::vector<int>& horizons) {
  if (!d.is_stationary()) throw std::invalid_argument("ratio_limit_check needs a stationary diagram");
  const Matrix a = d.matrix(0);
  LimitReport rep;
  rep.target = pair.xi(v1) / pair.xi(v2) * std::pow(pair.lambda, n2 - n1);
  for (int N : horizons) {
    auto c1 = power_column(a, N - n1, w);
    auto c2 = n1 == n2 ? c1 : power_column(a, N - n2, w);
    auto i1 = c1.find(v1), i2 = c2.find(v2);
    if (i1 == c1.end() || i2 == c2.end() || i2->second == 0)
      throw NoWitnessWithinHorizon("vertex " + std::to_string(w) + " not reached from both cylinders");
    double r = ratio_big(i1->second, i2->second);
    rep.n.push_back(N);
    rep.values.push_back(r);
    rep.errors.push_back(std::abs(r - rep.target));
  }
  return rep;
}

}  // namespace gbd
