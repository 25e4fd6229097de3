#include "gbd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace gbd {

namespace {

using DVec = std::map<Vertex, double>;

SparseVector step_backward(const Matrix& m, const SparseVector& u, const std::optional<Window>& confine) {
  SparseVector next;
  for (const auto& [j, val] : u)
    for (const auto& [i, a] : m.column(j))
      if (!confine || confine->contains(i)) next[i] += a * val;
  return next;
}

SparseVector step_forward(const Matrix& m, const SparseVector& u, const std::optional<Window>& confine) {
  SparseVector next;
  for (const auto& [i, val] : u) {
    std::vector<Entry> row;
    if (confine) {
      row = m.row(i, *confine).entries;
    } else {
      auto r = m.finite_row(i);
      if (!r) throw InvalidMatrix("row " + std::to_string(i) + " is infinite; supply a window");
      row = std::move(*r);
    }
    for (const auto& [j, a] : row) next[j] += a * val;
  }
  return next;
}

bool is_tridiagonal(const Matrix& m) {
  auto o = m.band_offsets();
  if (!o) return false;
  return std::all_of(o->begin(), o->end(), [](int x) { return x >= -1 && x <= 1; });
}

Surd surd_of(const BigInt& x) { return Surd(Rational(x)); }

struct SparseRows {
  Window window;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
};

SparseRows sparse_truncation(const Matrix& m, const Window& w) {
  SparseRows s;
  s.window = w;
  s.rows.resize(w.size());
  for (Vertex i = w.lo; i <= w.hi; ++i)
    for (const auto& [j, v] : m.row(i, w).entries)
      s.rows[i - w.lo].push_back({static_cast<std::size_t>(j - w.lo), v.convert_to<double>()});
  return s;
}

// Power iteration on (A_W + I); returns the Perron vector of the truncation.
std::vector<double> truncated_perron_vector(const SparseRows& s, double tol, int max_iter, double* radius = nullptr,
                                            int* iterations = nullptr) {
  const std::size_t n = s.rows.size();
  std::vector<double> x(n, 1.0), y(n);
  double rho = 0.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = x[i];
      for (const auto& [j, a] : s.rows[i]) acc += a * x[j];
      y[i] = acc;
    }
    double mx = *std::max_element(y.begin(), y.end());
    if (!(mx > 0)) break;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double v = y[i] / mx;
      // Relative change, so geometrically decaying vectors converge entrywise.
      if (v > 1e-290) change = std::max(change, std::abs(v - x[i]) / v);
      x[i] = v;
    }
    rho = mx - 1.0;
    if (change < tol) break;
  }
  if (radius) *radius = rho;
  if (iterations) *iterations = it;
  return x;
}

EigenVector windowed_vector(std::shared_ptr<DVec> values, const Window& w, Vertex anchor, std::string provenance) {
  EigenVector ev;
  ev.window = w;
  ev.anchor = anchor;
  ev.provenance = std::move(provenance);
  ev.value = [values, w](Vertex v) {
    auto it = values->find(v);
    if (it == values->end()) throw InvalidWindow("vector entry " + std::to_string(v) + " outside its window");
    return it->second;
  };
  return ev;
}

EigenVector exact_vector(std::shared_ptr<std::map<Vertex, Surd>> values, const Window& w, Vertex anchor) {
  auto dv = std::make_shared<DVec>();
  for (const auto& [k, s] : *values) (*dv)[k] = s.value();
  EigenVector ev = windowed_vector(dv, w, anchor, "recurrence");
  ev.exact = [values](Vertex v) -> std::optional<Surd> {
    auto it = values->find(v);
    if (it == values->end()) return std::nullopt;
    return it->second;
  };
  return ev;
}

std::optional<std::map<Vertex, Surd>> tridiagonal_sweep(const Matrix& m, const Surd& lambda, const Window& w,
                                                        Vertex anchor, const Surd& next_ratio) {
  std::map<Vertex, Surd> x;
  x[anchor] = Surd(1);
  if (anchor + 1 <= w.hi) x[anchor + 1] = next_ratio;
  for (Vertex i = anchor + 1; i < w.hi; ++i) {
    BigInt up = m.at(i, i + 1);
    if (up == 0) return std::nullopt;
    Surd rhs = (lambda - surd_of(m.at(i, i))) * x[i];
    if (in_index_set(m.index_set(), i - 1)) rhs -= surd_of(m.at(i, i - 1)) * x[i - 1];
    x[i + 1] = rhs / surd_of(up);
  }
  for (Vertex i = anchor; i > w.lo; --i) {
    BigInt down = m.at(i, i - 1);
    if (down == 0) return std::nullopt;
    Surd rhs = (lambda - surd_of(m.at(i, i))) * x[i] - surd_of(m.at(i, i + 1)) * x[i + 1];
    x[i - 1] = rhs / surd_of(down);
  }
  return x;
}

std::vector<Rational> convergents(double x, std::int64_t max_den) {
  std::vector<Rational> out;
  BigInt p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int iter = 0; iter < 40; ++iter) {
    double a = std::floor(r);
    BigInt ai(static_cast<long long>(a));
    BigInt p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    out.emplace_back(p2, q2);
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    double frac = r - a;
    if (std::abs(frac) < 1e-14) break;
    r = 1.0 / frac;
  }
  return out;
}

EigenVector numeric_right(const Matrix& m, double lambda, const Window& window, Vertex anchor, double tol) {
  SparseRows s = sparse_truncation(m, window);
  auto x = truncated_perron_vector(s, tol, 200000);
  double a = x[anchor - window.lo];
  if (!(a > 0)) throw NoPositiveSolution("anchor entry of the windowed Perron vector is not positive");
  auto values = std::make_shared<DVec>();
  for (Vertex v = window.lo; v <= window.hi; ++v) {
    double val = x[v - window.lo] / a;
    if (!(val > 0)) throw NoPositiveSolution("non-positive entry at " + std::to_string(v));
    (*values)[v] = val;
  }
  EigenVector ev = windowed_vector(values, window, anchor, "windowed");
  ev.residual = right_residual(m, ev, lambda, window);
  return ev;
}

}  // namespace

PerronReport perron_scan(const Matrix& m, Vertex anchor, const std::vector<ScheduleStep>& schedule, double ceiling) {
  if (schedule.empty()) throw std::invalid_argument("perron_scan: empty schedule");
  PerronReport r;
  for (const auto& step : schedule) {
    r = PerronReport{};
    r.horizon = step.n;
    r.window = step.window;
    std::vector<BigInt> counts;
    SparseVector u;
    u[anchor] = 1;
    bool by_rows = false;
    for (int k = 1; k <= step.n; ++k) {
      if (!by_rows) {
        try {
          u = step_backward(m, u, step.window);
        } catch (const ColumnSupportUnbounded&) {
          by_rows = true;
          u.clear();
          u[anchor] = 1;
          counts.clear();
          for (int kk = 1; kk < k; ++kk) {
            u = step_forward(m, u, step.window);
            auto it = u.find(anchor);
            counts.push_back(it == u.end() ? BigInt(0) : it->second);
          }
          u = step_forward(m, u, step.window);
        }
      } else {
        u = step_forward(m, u, step.window);
      }
      auto it = u.find(anchor);
      counts.push_back(it == u.end() ? BigInt(0) : it->second);
      if (counts.back() > 0 && nth_root_big(counts.back(), k) > ceiling) {
        r.diverged = true;
        break;
      }
    }
    int d = 0;
    for (std::size_t k = 0; k < counts.size(); ++k)
      if (counts[k] > 0) d = std::gcd(d, static_cast<int>(k + 1));
    if (d == 0) throw NoReturnFound("no return to the anchor within the schedule");
    r.period = d;
    double sup = 0.0;
    for (std::size_t k = d; k <= counts.size(); k += d) {
      const BigInt& c = counts[k - 1];
      if (c == 0) continue;
      double root = nth_root_big(c, static_cast<int>(k));
      sup = std::max(sup, root);
      r.n_values.push_back(static_cast<int>(k));
      r.root_sequence.push_back(root);
      r.running_sup.push_back(sup);
      if (k > static_cast<std::size_t>(d) && counts[k - 1 - d] > 0) {
        double ratio = std::exp((log_big(c) - log_big(counts[k - 1 - d])) / d);
        r.ratio_sequence.push_back(ratio);
        if (ratio > ceiling) r.diverged = true;
      }
      if (root > ceiling) r.diverged = true;
    }
    r.root_lower_bound = sup;
    r.lambda = r.ratio_sequence.empty() ? sup : r.ratio_sequence.back();
  }
  return r;
}

PerronReport perron_estimate(const Matrix& m, Vertex anchor, const std::vector<ScheduleStep>& schedule,
                             double ceiling) {
  PerronReport r = perron_scan(m, anchor, schedule, ceiling);
  if (r.diverged)
    throw DivergenceDetected("n-th root estimates exceed " + std::to_string(ceiling) + " by n = " +
                             std::to_string(r.n_values.empty() ? 0 : r.n_values.back()));
  return r;
}

PerronReport perron_estimate(const Matrix& m, Vertex anchor, int n, const Window& window, double ceiling) {
  return perron_estimate(m, anchor, std::vector<ScheduleStep>{{n, window}}, ceiling);
}

TruncatedRadius truncated_spectral_radius(const Matrix& m, const Window& window, double tol) {
  SparseRows s = sparse_truncation(m, window);
  TruncatedRadius out;
  auto x = truncated_perron_vector(s, tol, 500000, &out.estimate, &out.iterations);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0)) continue;
    double acc = 0.0;
    for (const auto& [j, a] : s.rows[i]) acc += a * x[j];
    lo = std::min(lo, acc / x[i]);
    hi = std::max(hi, acc / x[i]);
  }
  out.lower = lo;
  out.upper = hi;
  return out;
}

EigenVector right_eigenvector(const Matrix& m, double lambda, const std::optional<Surd>& lambda_exact,
                              const Window& window, Vertex anchor, double tol) {
  if (!(lambda > 0)) throw std::invalid_argument("right_eigenvector: lambda must be positive");
  if (!window.contains(anchor)) throw InvalidWindow("anchor outside the window");
  if (is_tridiagonal(m) && lambda_exact) {
    if (m.index_set() == IndexSet::Naturals) {
      Window w{1, window.hi};
      BigInt up = m.at(1, 2);
      if (up == 0) throw NoPositiveSolution("first row has no superdiagonal entry");
      Surd x2 = (*lambda_exact - surd_of(m.at(1, 1))) / surd_of(up);
      auto x = tridiagonal_sweep(m, *lambda_exact, w, 1, x2);
      if (!x) throw NoPositiveSolution("zero off-diagonal entry breaks the recurrence");
      for (const auto& [k, v] : *x)
        if (v.sign() <= 0) throw NoPositiveSolution("recurrence produced a non-positive entry at " + std::to_string(k));
      Surd a = x->at(anchor);
      auto values = std::make_shared<std::map<Vertex, Surd>>();
      for (const auto& [k, v] : *x)
        if (window.contains(k)) (*values)[k] = v / a;
      EigenVector ev = exact_vector(values, window, anchor);
      ev.residual = right_residual(m, ev, lambda, window);
      return ev;
    }
    if (lambda_exact->is_rational()) {
      Window wide = pad(m.index_set(), window, 20);
      EigenVector num = numeric_right(m, lambda, wide, anchor, tol);
      double rho = num(anchor + 1);
      Window core{anchor - static_cast<Vertex>(window.size() / 4), anchor + static_cast<Vertex>(window.size() / 4)};
      for (const auto& cand : convergents(rho, 1000000)) {
        if (cand <= 0) continue;
        auto x = tridiagonal_sweep(m, *lambda_exact, wide, anchor, Surd(cand));
        if (!x) break;
        bool ok = true;
        for (const auto& [k, v] : *x)
          if (v.sign() <= 0) { ok = false; break; }
        for (Vertex k = core.lo; ok && k <= core.hi; ++k) {
          double e = x->at(k).value(), n = num(k);
          if (std::abs(e - n) > 1e-6 * std::max(1.0, std::abs(n))) ok = false;
        }
        if (!ok) continue;
        auto values = std::make_shared<std::map<Vertex, Surd>>();
        for (const auto& [k, v] : *x)
          if (window.contains(k)) (*values)[k] = v;
        EigenVector ev = exact_vector(values, window, anchor);
        ev.residual = right_residual(m, ev, lambda, window);
        return ev;
      }
    }
  }
  return numeric_right(m, lambda, window, anchor, tol);
}

EigenVector left_eigenvector(const Matrix& m, double lambda, const std::optional<Surd>& lambda_exact,
                             const Window& window, Vertex anchor, double tol) {
  EigenVector ev = right_eigenvector(Matrix::transpose(m), lambda, lambda_exact, window, anchor, tol);
  ev.residual = left_residual(m, ev, lambda, window);
  return ev;
}

namespace {

bool inside_domain(const EigenVector& x, Vertex v) { return !x.window || x.window->contains(v); }

}  // namespace

double right_residual(const Matrix& m, const EigenVector& xi, double lambda, const Window& rows) {
  double worst = 0.0, scale = 0.0;
  for (Vertex i = rows.lo; i <= rows.hi; ++i) {
    auto r = m.finite_row(i);
    if (!r || !inside_domain(xi, i)) continue;
    bool ok = std::all_of(r->begin(), r->end(), [&](const Entry& e) { return inside_domain(xi, e.index); });
    if (!ok) continue;
    double acc = 0.0;
    for (const auto& [j, a] : *r) acc += a.convert_to<double>() * xi(j);
    worst = std::max(worst, std::abs(acc - lambda * xi(i)));
    scale = std::max(scale, std::abs(xi(i)));
  }
  return scale > 0 ? worst / scale : worst;
}

double left_residual(const Matrix& m, const EigenVector& eta, double lambda, const Window& cols) {
  double worst = 0.0, scale = 0.0;
  for (Vertex j = cols.lo; j <= cols.hi; ++j) {
    std::vector<Entry> c;
    try {
      c = m.column(j);
    } catch (const ColumnSupportUnbounded&) {
      continue;
    }
    if (!inside_domain(eta, j)) continue;
    bool ok = std::all_of(c.begin(), c.end(), [&](const Entry& e) { return inside_domain(eta, e.index); });
    if (!ok) continue;
    double acc = 0.0;
    for (const auto& [i, a] : c) acc += a.convert_to<double>() * eta(i);
    worst = std::max(worst, std::abs(acc - lambda * eta(j)));
    scale = std::max(scale, std::abs(eta(j)));
  }
  return scale > 0 ? worst / scale : worst;
}

namespace {

Surd abs_surd(const Surd& s) { return s.sign() < 0 ? -s : s; }

}  // namespace

std::optional<Surd> exact_right_residual(const Matrix& m, const EigenVector& xi, const Surd& lambda,
                                         const Window& rows) {
  Surd worst(0);
  for (Vertex i = rows.lo; i <= rows.hi; ++i) {
    auto r = m.finite_row(i);
    if (!r || !inside_domain(xi, i)) continue;
    bool ok = std::all_of(r->begin(), r->end(), [&](const Entry& e) { return inside_domain(xi, e.index); });
    if (!ok) continue;
    Surd acc(0);
    for (const auto& [j, a] : *r) {
      auto x = xi.exact_at(j);
      if (!x) return std::nullopt;
      acc += surd_of(a) * *x;
    }
    auto xi_i = xi.exact_at(i);
    if (!xi_i) return std::nullopt;
    Surd res = abs_surd(acc - lambda * *xi_i);
    if (worst < res) worst = res;
  }
  return worst;
}

std::optional<Surd> exact_left_residual(const Matrix& m, const EigenVector& eta, const Surd& lambda,
                                        const Window& cols) {
  Surd worst(0);
  for (Vertex j = cols.lo; j <= cols.hi; ++j) {
    std::vector<Entry> c;
    try {
      c = m.column(j);
    } catch (const ColumnSupportUnbounded&) {
      continue;
    }
    if (!inside_domain(eta, j)) continue;
    bool ok = std::all_of(c.begin(), c.end(), [&](const Entry& e) { return inside_domain(eta, e.index); });
    if (!ok) continue;
    Surd acc(0);
    for (const auto& [i, a] : c) {
      auto x = eta.exact_at(i);
      if (!x) return std::nullopt;
      acc += surd_of(a) * *x;
    }
    auto eta_j = eta.exact_at(j);
    if (!eta_j) return std::nullopt;
    Surd res = abs_surd(acc - lambda * *eta_j);
    if (worst < res) worst = res;
  }
  return worst;
}

ColumnSumBounds column_sum_bounds(const Matrix& m, const Window& window) {
  ColumnSumBounds b;
  std::optional<BigInt> lo, hi;
  for (Vertex j = window.lo; j <= window.hi; ++j) {
    std::vector<Entry> c;
    try {
      c = m.column(j);
    } catch (const ColumnSupportUnbounded&) {
      b.skipped.push_back(j);
      continue;
    }
    BigInt s = 0;
    for (const auto& e : c) s += e.value;
    if (!lo || s < *lo) lo = s;
    if (!hi || s > *hi) hi = s;
  }
  if (!lo) return b;
  b.inf = lo->convert_to<double>();
  b.sup = hi->convert_to<double>();
  b.exact = (*lo == *hi);
  if (b.exact) b.exact_value = *lo;
  return b;
}

std::string to_string(RecurrenceClass c) {
  switch (c) {
    case RecurrenceClass::Transient: return "Transient";
    case RecurrenceClass::NullRecurrent: return "NullRecurrent";
    case RecurrenceClass::PositiveRecurrent: return "PositiveRecurrent";
    default: return "Inconclusive";
  }
}

RecurrenceClass recurrence_from_string(const std::string& s) {
  if (s == "Transient") return RecurrenceClass::Transient;
  if (s == "NullRecurrent") return RecurrenceClass::NullRecurrent;
  if (s == "PositiveRecurrent") return RecurrenceClass::PositiveRecurrent;
  return RecurrenceClass::Inconclusive;
}

std::string to_string(Summability::Status s) {
  switch (s) {
    case Summability::Status::FiniteSum: return "FiniteSum";
    case Summability::Status::Divergent: return "Divergent";
    default: return "Inconclusive";
  }
}

Summability summability(const std::function<double(Vertex)>& x, IndexSet s, Vertex anchor, const TailModel& tail) {
  Summability out;
  if (tail.kind == TailModel::Kind::ClosedFormSum) {
    if (std::isfinite(tail.value)) {
      out.status = Summability::Status::FiniteSum;
      out.value = tail.value;
      out.certificate = "closed form";
    } else {
      out.status = Summability::Status::Divergent;
      out.certificate = "closed form diverges";
    }
    return out;
  }
  const int n = tail.horizon;
  std::vector<std::vector<double>> sides;
  std::vector<double> right;
  for (int k = 0; k < n; ++k) right.push_back(x(anchor + k));
  sides.push_back(right);
  if (s == IndexSet::Integers) {
    std::vector<double> left;
    for (int k = 1; k <= n; ++k) left.push_back(x(anchor - k));
    sides.push_back(left);
  }
  double total = 0.0;
  bool finite = true, divergent = false;
  std::string cert;
  for (const auto& side : sides) {
    double partial = std::accumulate(side.begin(), side.end(), 0.0);
    total += partial;
    double last = side.back();
    if (tail.kind == TailModel::Kind::GeometricRatio) {
      if (tail.rho >= 1.0) {
        divergent = true;
        cert = "ratio " + std::to_string(tail.rho) + " >= 1";
      } else {
        total += last * tail.rho / (1.0 - tail.rho);
        cert = "geometric tail with ratio " + std::to_string(tail.rho);
      }
      continue;
    }
    double rho = 0.0;
    bool bounded_below = true;
    for (std::size_t k = side.size() / 2; k + 1 < side.size(); ++k) {
      if (side[k] <= 0) continue;
      rho = std::max(rho, side[k + 1] / side[k]);
    }
    double first_half_max = *std::max_element(side.begin(), side.begin() + static_cast<long>(side.size() / 2));
    if (last < 1e-12 * std::max(first_half_max, 1e-300)) bounded_below = false;
    if (rho < 1.0 - 1e-9) {
      total += last * rho / (1.0 - rho);
      cert = "ratio test, max tail ratio " + std::to_string(rho);
    } else if (bounded_below) {
      divergent = true;
      cert = "terms do not decay (ratio " + std::to_string(rho) + ")";
    } else {
      finite = false;
      cert = "no certificate within horizon";
    }
  }
  out.partial = total;
  out.certificate = cert;
  if (divergent) out.status = Summability::Status::Divergent;
  else if (finite) {
    out.status = Summability::Status::FiniteSum;
    out.value = total;
  }
  return out;
}

RecurrenceReport classify_series(const std::vector<double>& terms, double tol, const ClassifyOptions& opts) {
  RecurrenceReport r;
  r.terms = terms;
  r.horizon = static_cast<int>(terms.size());
  double s = 0.0;
  int d = 0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    s += terms[k];
    r.partial_sums.push_back(s);
    if (terms[k] > 0) d = std::gcd(d, static_cast<int>(k + 1));
  }
  r.period = d == 0 ? 1 : d;
  std::vector<double> sub;
  for (std::size_t k = r.period; k <= terms.size(); k += r.period)
    if (terms[k - 1] > 0) sub.push_back(terms[k - 1]);

  RecurrenceClass numeric = RecurrenceClass::Inconclusive;
  std::string cert;
  if (sub.size() >= 8) {
    std::size_t q = sub.size() - sub.size() / 4;
    double rho = 0.0;
    for (std::size_t k = q; k + 1 < sub.size(); ++k) rho = std::max(rho, sub[k + 1] / sub[k]);
    double tail = rho < 1.0 ? sub.back() * rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
    const double mean_last = std::accumulate(sub.begin() + static_cast<long>(q), sub.end(), 0.0) /
                             static_cast<double>(sub.size() - q);
    double spread = 0.0;
    for (std::size_t k = q; k < sub.size(); ++k) spread = std::max(spread, std::abs(sub[k] - mean_last));
    const double early = sub[sub.size() / 4];
    if (rho < 1.0 - 1e-3 && tail < tol) {
      numeric = RecurrenceClass::Transient;
      cert = "geometric tail certificate, ratio " + std::to_string(rho);
    } else if (s >= opts.divergence_threshold) {
      if (opts.eta_dot_xi && opts.eta_dot_xi->status == Summability::Status::FiniteSum) {
        numeric = RecurrenceClass::PositiveRecurrent;
        cert = "partial sums exceed threshold; eta.xi finite";
        r.eta_dot_xi = opts.eta_dot_xi->value;
      } else if (opts.eta_dot_xi && opts.eta_dot_xi->status == Summability::Status::Divergent) {
        numeric = RecurrenceClass::NullRecurrent;
        cert = "partial sums exceed threshold; eta.xi divergent";
      } else if (spread < 1e-2 * mean_last && mean_last > tol) {
        numeric = RecurrenceClass::PositiveRecurrent;
        cert = "return terms converge to a positive limit";
      } else if (sub.back() < 0.5 * early) {
        numeric = RecurrenceClass::NullRecurrent;
        cert = "partial sums exceed threshold while terms decay to 0";
      } else {
        cert = "recurrent evidence without a positive/null certificate";
      }
    } else {
      cert = "neither certificate fired within the horizon";
    }
  } else {
    cert = "too few returns within the horizon";
  }
  r.numeric = numeric;
  r.certificate = cert;
  if (opts.analytic) {
    r.cls = *opts.analytic;
    r.analytic = true;
    r.consistent = numeric == *opts.analytic || numeric == RecurrenceClass::Inconclusive;
  } else {
    r.cls = numeric;
  }
  if (!r.eta_dot_xi && opts.eta_dot_xi && opts.eta_dot_xi->status == Summability::Status::FiniteSum)
    r.eta_dot_xi = opts.eta_dot_xi->value;
  return r;
}

std::vector<BigInt> first_return_counts(const Matrix& m, Vertex v, int n_max, const std::optional<Window>& confine) {
  std::vector<BigInt> out;
  SparseVector u;
  for (const auto& [i, a] : m.column(v))
    if (!confine || confine->contains(i)) u[i] += a;
  for (int k = 1; k <= n_max; ++k) {
    auto it = u.find(v);
    out.push_back(it == u.end() ? BigInt(0) : it->second);
    SparseVector next;
    for (const auto& [j, val] : u) {
      if (j == v) continue;
      for (const auto& [i, a] : m.column(j))
        if (!confine || confine->contains(i)) next[i] += a * val;
    }
    u = std::move(next);
  }
  return out;
}

RecurrenceReport classify_recurrence(const Matrix& m, double lambda, Vertex anchor, int horizon, double tol,
                                     const ClassifyOptions& opts) {
  auto counts = return_counts(m, anchor, horizon, opts.confine);
  std::vector<double> terms;
  const double ll = std::log(lambda);
  for (std::size_t k = 0; k < counts.size(); ++k)
    terms.push_back(counts[k] == 0 ? 0.0 : std::exp(log_big(counts[k]) - static_cast<double>(k + 1) * ll));
  RecurrenceReport r = classify_series(terms, tol, opts);
  try {
    auto first = first_return_counts(m, anchor, horizon, opts.confine);
    double s = 0.0;
    for (std::size_t k = 0; k < first.size(); ++k) {
      if (first[k] != 0) s += std::exp(log_big(first[k]) - static_cast<double>(k + 1) * ll);
      r.first_return_partial.push_back(s);
    }
  } catch (const ColumnSupportUnbounded&) {
  }
  return r;
}

double StochasticMatrix::p(Vertex w, Vertex v) const {
  BigInt a = a_.at(w, v);
  if (a == 0) return 0.0;
  return a.convert_to<double>() * xi_(v) / (lambda_ * xi_(w));
}

std::vector<std::pair<Vertex, double>> StochasticMatrix::column(Vertex v) const {
  std::vector<std::pair<Vertex, double>> out;
  const double xv = xi_(v);
  for (const auto& [w, a] : a_.column(v)) out.push_back({w, a.convert_to<double>() * xv / (lambda_ * xi_(w))});
  return out;
}

std::vector<std::pair<Vertex, double>> StochasticMatrix::row(Vertex w, const Window& window, bool* exceeds) const {
  RowSlice s = a_.row(w, window);
  if (exceeds) *exceeds = s.support_exceeds_window;
  std::vector<std::pair<Vertex, double>> out;
  const double xw = xi_(w);
  for (const auto& [v, a] : s.entries) out.push_back({v, a.convert_to<double>() * xi_(v) / (lambda_ * xw)});
  return out;
}

std::optional<double> StochasticMatrix::row_sum(Vertex w) const {
  auto r = a_.finite_row(w);
  if (!r) return std::nullopt;
  double acc = 0.0;
  const double xw = xi_(w);
  for (const auto& [v, a] : *r) acc += a.convert_to<double>() * xi_(v) / (lambda_ * xw);
  return acc;
}

std::vector<double> StochasticMatrix::return_probabilities(Vertex v, int n_max) const {
  std::vector<double> out;
  DVec u;
  for (const auto& [w, p] : column(v)) u[w] += p;
  for (int k = 1; k <= n_max; ++k) {
    auto it = u.find(v);
    out.push_back(it == u.end() ? 0.0 : it->second);
    if (k == n_max) break;
    DVec next;
    for (const auto& [j, val] : u)
      for (const auto& [i, p] : column(j)) next[i] += p * val;
    u = std::move(next);
  }
  return out;
}

StochasticMatrix stochastic_from_eigenpair(const Matrix& m, const EigenPair& pair) {
  return StochasticMatrix(m, pair.lambda, pair.xi);
}

RowCheck validate_rows(const StochasticMatrix& p, const Window& rows, double tol) {
  RowCheck check;
  for (Vertex w = rows.lo; w <= rows.hi; ++w) {
    auto s = p.row_sum(w);
    if (!s) {
      check.unverifiable.push_back(w);
      continue;
    }
    double dev = std::abs(*s - 1.0);
    check.max_deviation = std::max(check.max_deviation, dev);
    if (dev > tol) throw RowSumViolation("row " + std::to_string(w) + " sums to " + std::to_string(*s));
    check.verified.push_back(w);
  }
  return check;
}

PowerIdentity verify_power_identity(const Matrix& m, const EigenPair& pair, Vertex v, int n) {
  StochasticMatrix p = stochastic_from_eigenpair(m, pair);
  PowerIdentity out;
  out.lhs = p.return_probabilities(v, n).back();
  BigInt a = power_entry(m, n, v, v);
  out.rhs = a == 0 ? 0.0 : std::exp(log_big(a) - n * std::log(pair.lambda));
  out.diff = std::abs(out.lhs - out.rhs);
  return out;
}

}  // namespace gbd
