#include "gbd/matrix.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <set>

namespace gbd {

std::string to_string(IndexSet s) { return s == IndexSet::Integers ? "Z" : "N"; }

IndexSet index_set_from_string(const std::string& s) {
  if (s == "Z" || s == "Integers" || s == "integers") return IndexSet::Integers;
  if (s == "N" || s == "Naturals" || s == "naturals") return IndexSet::Naturals;
  throw ConfigError("unknown index set '" + s + "'");
}

bool in_index_set(IndexSet s, Vertex v) { return s == IndexSet::Integers || v >= 1; }

Vertex first_index(IndexSet s) {
  return s == IndexSet::Naturals ? 1 : std::numeric_limits<Vertex>::min();
}

Window make_window(IndexSet s, Vertex lo, Vertex hi) {
  if (lo > hi) throw InvalidWindow("lo > hi");
  if (s == IndexSet::Naturals && lo < 1) throw InvalidWindow("window below 1 on a one-sided index set");
  return Window{lo, hi};
}

Window window_around(IndexSet s, Vertex center, Vertex radius) {
  Vertex lo = center - radius;
  if (s == IndexSet::Naturals) lo = std::max<Vertex>(lo, 1);
  return make_window(s, lo, center + radius);
}

Window pad(IndexSet s, const Window& w, Vertex amount) {
  Vertex lo = w.lo - amount;
  if (s == IndexSet::Naturals) lo = std::max<Vertex>(lo, 1);
  return Window{lo, w.hi + amount};
}

namespace {

void add_to(SparseVector& v, Vertex k, const BigInt& x) {
  if (x == 0) return;
  auto it = v.find(k);
  if (it == v.end()) v.emplace(k, x);
  else it->second += x;
}

RowSlice slice_finite(const std::vector<Entry>& row, const Window& w) {
  RowSlice out;
  for (const auto& e : row) {
    if (e.value == 0) continue;
    if (w.contains(e.index)) out.entries.push_back(e);
    else out.support_exceeds_window = true;
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
  return out;
}

class BandedImpl final : public MatrixImpl {
 public:
  BandedImpl(IndexSet s, std::vector<int> offsets, std::function<BigInt(int, Vertex)> rule, nlohmann::json desc)
      : s_(s), offsets_(std::move(offsets)), rule_(std::move(rule)), desc_(std::move(desc)) {
    std::sort(offsets_.begin(), offsets_.end());
    offsets_.erase(std::unique(offsets_.begin(), offsets_.end()), offsets_.end());
    if (offsets_.empty()) throw InvalidMatrix("banded matrix needs at least one offset");
  }
  IndexSet index_set() const override { return s_; }
  bool columns_finite() const override { return true; }
  std::vector<Entry> column(Vertex j) const override {
    std::vector<Entry> out;
    for (auto it = offsets_.rbegin(); it != offsets_.rend(); ++it) {
      Vertex i = j - *it;
      if (!in_index_set(s_, i)) continue;
      BigInt v = rule_(*it, i);
      if (v < 0) throw InvalidMatrix("negative entry");
      if (v != 0) out.push_back({i, std::move(v)});
    }
    return out;
  }
  std::optional<std::vector<Entry>> finite_row(Vertex i) const override {
    std::vector<Entry> out;
    for (int o : offsets_) {
      Vertex j = i + o;
      if (!in_index_set(s_, j)) continue;
      BigInt v = rule_(o, i);
      if (v != 0) out.push_back({j, std::move(v)});
    }
    return out;
  }
  RowSlice row(Vertex i, const Window& w) const override { return slice_finite(*finite_row(i), w); }
  BigInt at(Vertex i, Vertex j) const override {
    if (!in_index_set(s_, i) || !in_index_set(s_, j)) return 0;
    int o = static_cast<int>(j - i);
    if (!std::binary_search(offsets_.begin(), offsets_.end(), o)) return 0;
    return rule_(o, i);
  }
  nlohmann::json descriptor() const override { return desc_; }
  std::optional<Vertex> reach() const override {
    return std::max(std::abs(offsets_.front()), std::abs(offsets_.back()));
  }
  std::optional<std::vector<int>> band_offsets() const override { return offsets_; }

 private:
  IndexSet s_;
  std::vector<int> offsets_;
  std::function<BigInt(int, Vertex)> rule_;
  nlohmann::json desc_;
};

class PatternImpl final : public MatrixImpl {
 public:
  PatternImpl(IndexSet s, std::function<RowPattern(Vertex)> rows, std::function<std::vector<Entry>(Vertex)> cols,
              nlohmann::json desc, bool columns_finite, std::optional<Vertex> reach)
      : s_(s), rows_(std::move(rows)), cols_(std::move(cols)), desc_(std::move(desc)),
        columns_finite_(columns_finite), reach_(reach) {}
  IndexSet index_set() const override { return s_; }
  bool columns_finite() const override { return columns_finite_; }
  std::vector<Entry> column(Vertex j) const override {
    auto c = cols_(j);
    std::sort(c.begin(), c.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
    return c;
  }
  std::optional<std::vector<Entry>> finite_row(Vertex i) const override {
    RowPattern p = rows_(i);
    if (p.infinite()) return std::nullopt;
    return p.finite;
  }
  RowSlice row(Vertex i, const Window& w) const override {
    RowPattern p = rows_(i);
    RowSlice out = slice_finite(p.finite, w);
    for (const auto& r : p.rays) {
      if (r.value == 0) continue;
      out.support_exceeds_window = true;
      Vertex start = r.from;
      if (start < w.lo) start = r.from + ((w.lo - r.from + r.step - 1) / r.step) * r.step;
      for (Vertex j = start; j <= w.hi; j += r.step) out.entries.push_back({j, r.value});
    }
    std::map<Vertex, BigInt> merged;
    for (auto& e : out.entries) merged[e.index] += e.value;
    out.entries.clear();
    for (auto& [k, v] : merged) out.entries.push_back({k, v});
    return out;
  }
  BigInt at(Vertex i, Vertex j) const override {
    if (!in_index_set(s_, i) || !in_index_set(s_, j)) return 0;
    RowPattern p = rows_(i);
    BigInt v = 0;
    for (const auto& e : p.finite)
      if (e.index == j) v += e.value;
    for (const auto& r : p.rays)
      if (j >= r.from && (j - r.from) % r.step == 0) v += r.value;
    return v;
  }
  nlohmann::json descriptor() const override { return desc_; }
  std::optional<Vertex> reach() const override { return reach_; }

 private:
  IndexSet s_;
  std::function<RowPattern(Vertex)> rows_;
  std::function<std::vector<Entry>(Vertex)> cols_;
  nlohmann::json desc_;
  bool columns_finite_;
  std::optional<Vertex> reach_;
};

class ProductImpl final : public MatrixImpl {
 public:
  ProductImpl(Matrix a, Matrix b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.index_set() != b_.index_set()) throw InvalidMatrix("product of matrices over different index sets");
  }
  IndexSet index_set() const override { return a_.index_set(); }
  bool columns_finite() const override { return a_.columns_finite() && b_.columns_finite(); }
  std::vector<Entry> column(Vertex j) const override {
    SparseVector acc;
    for (const auto& [m, bmj] : b_.column(j))
      for (const auto& [i, aim] : a_.column(m)) add_to(acc, i, aim * bmj);
    std::vector<Entry> out;
    for (auto& [i, v] : acc) out.push_back({i, v});
    return out;
  }
  std::optional<std::vector<Entry>> finite_row(Vertex i) const override {
    auto ra = a_.finite_row(i);
    if (!ra) return std::nullopt;
    SparseVector acc;
    for (const auto& [m, aim] : *ra) {
      auto rb = b_.finite_row(m);
      if (!rb) return std::nullopt;
      for (const auto& [j, bmj] : *rb) add_to(acc, j, aim * bmj);
    }
    std::vector<Entry> out;
    for (auto& [j, v] : acc) out.push_back({j, v});
    return out;
  }
  RowSlice row(Vertex i, const Window& w) const override {
    if (auto r = finite_row(i)) return slice_finite(*r, w);
    RowSlice out;
    out.support_exceeds_window = true;
    for (Vertex j = w.lo; j <= w.hi; ++j) {
      BigInt v = at(i, j);
      if (v != 0) out.entries.push_back({j, v});
    }
    return out;
  }
  BigInt at(Vertex i, Vertex j) const override {
    for (const auto& e : column(j))
      if (e.index == i) return e.value;
    return 0;
  }
  nlohmann::json descriptor() const override {
    return {{"kind", "product"}, {"factors", {a_.descriptor(), b_.descriptor()}}};
  }
  std::optional<Vertex> reach() const override {
    auto ra = a_.reach(), rb = b_.reach();
    if (ra && rb) return *ra + *rb;
    return std::nullopt;
  }

 private:
  Matrix a_, b_;
};

class TransposeImpl final : public MatrixImpl {
 public:
  explicit TransposeImpl(Matrix a) : a_(std::move(a)) {}
  IndexSet index_set() const override { return a_.index_set(); }
  bool columns_finite() const override { return a_.band_offsets().has_value(); }
  std::vector<Entry> column(Vertex j) const override {
    auto r = a_.finite_row(j);
    if (!r) throw ColumnSupportUnbounded("transposed column " + std::to_string(j) + " is an infinite row");
    return *r;
  }
  std::optional<std::vector<Entry>> finite_row(Vertex i) const override {
    try {
      return a_.column(i);
    } catch (const ColumnSupportUnbounded&) {
      return std::nullopt;
    }
  }
  RowSlice row(Vertex i, const Window& w) const override {
    if (auto r = finite_row(i)) return slice_finite(*r, w);
    RowSlice out;
    out.support_exceeds_window = true;
    for (Vertex j = w.lo; j <= w.hi; ++j) {
      BigInt v = a_.at(j, i);
      if (v != 0) out.entries.push_back({j, v});
    }
    return out;
  }
  BigInt at(Vertex i, Vertex j) const override { return a_.at(j, i); }
  nlohmann::json descriptor() const override { return {{"kind", "transpose"}, {"of", a_.descriptor()}}; }
  std::optional<Vertex> reach() const override { return a_.reach(); }
  std::optional<std::vector<int>> band_offsets() const override {
    auto o = a_.band_offsets();
    if (!o) return std::nullopt;
    std::vector<int> neg;
    for (int x : *o) neg.push_back(-x);
    std::sort(neg.begin(), neg.end());
    return neg;
  }

 private:
  Matrix a_;
};

}  // namespace

Matrix Matrix::banded(IndexSet s, std::vector<int> offsets, std::function<BigInt(int, Vertex)> rule,
                      nlohmann::json descriptor) {
  return Matrix(std::make_shared<BandedImpl>(s, std::move(offsets), std::move(rule), std::move(descriptor)));
}

Matrix Matrix::from_rows(IndexSet s, std::function<RowPattern(Vertex)> rows,
                         std::function<std::vector<Entry>(Vertex)> columns, nlohmann::json descriptor,
                         bool columns_finite, std::optional<Vertex> reach) {
  return Matrix(std::make_shared<PatternImpl>(s, std::move(rows), std::move(columns), std::move(descriptor),
                                              columns_finite, reach));
}

Matrix Matrix::product(const Matrix& a, const Matrix& b) { return Matrix(std::make_shared<ProductImpl>(a, b)); }

Matrix Matrix::transpose(const Matrix& a) { return Matrix(std::make_shared<TransposeImpl>(a)); }

RowSlice row_entries(const Matrix& m, Vertex row, const Window& window) {
  if (m.index_set() == IndexSet::Naturals && window.lo < 1) throw InvalidWindow("window below 1");
  return m.row(row, window);
}

std::vector<Entry> column_entries(const Matrix& m, Vertex col) { return m.column(col); }

namespace {

SparseVector power_column_by_rows(const Matrix& m, int n, Vertex target, const Window& w) {
  SparseVector u;
  if (!w.contains(target)) return u;
  u[target] = 1;
  for (int k = 0; k < n; ++k) {
    SparseVector next;
    for (Vertex i = w.lo; i <= w.hi; ++i) {
      BigInt acc = 0;
      for (const auto& [j, a] : m.row(i, w).entries) {
        auto it = u.find(j);
        if (it != u.end()) acc += a * it->second;
      }
      if (acc != 0) next.emplace(i, std::move(acc));
    }
    u = std::move(next);
  }
  return u;
}

}  // namespace

SparseVector power_column(const Matrix& m, int n, Vertex target, const std::optional<Window>& confine) {
  if (n < 1) throw std::invalid_argument("power_column: n must be >= 1");
  if (confine && !confine->contains(target)) return {};
  try {
    SparseVector u;
    u[target] = 1;
    for (int k = 0; k < n; ++k) {
      SparseVector next;
      for (const auto& [j, val] : u)
        for (const auto& [i, a] : m.column(j))
          if (!confine || confine->contains(i)) add_to(next, i, a * val);
      u = std::move(next);
    }
    return u;
  } catch (const ColumnSupportUnbounded&) {
    if (!confine) throw;
    return power_column_by_rows(m, n, target, *confine);
  }
}

SparseVector power_row(const Matrix& m, int n, Vertex source, const std::optional<Window>& confine) {
  if (n < 1) throw std::invalid_argument("power_row: n must be >= 1");
  SparseVector u;
  if (confine && !confine->contains(source)) return u;
  u[source] = 1;
  for (int k = 0; k < n; ++k) {
    SparseVector next;
    for (const auto& [i, val] : u) {
      std::vector<Entry> row;
      if (confine) {
        row = m.row(i, *confine).entries;
      } else {
        auto r = m.finite_row(i);
        if (!r) throw InvalidMatrix("row " + std::to_string(i) + " is infinite; source-forward DP needs a window");
        row = std::move(*r);
      }
      for (const auto& [j, a] : row) add_to(next, j, a * val);
    }
    u = std::move(next);
  }
  return u;
}

BigInt power_entry(const Matrix& m, int n, Vertex source, Vertex target) {
  if (n < 1) throw std::invalid_argument("power_entry: n must be >= 1");
  try {
    auto u = power_column(m, n, target);
    auto it = u.find(source);
    return it == u.end() ? BigInt(0) : it->second;
  } catch (const ColumnSupportUnbounded&) {
    auto u = power_row(m, n, source);
    auto it = u.find(target);
    return it == u.end() ? BigInt(0) : it->second;
  }
}

std::vector<BigInt> return_counts(const Matrix& m, Vertex v, int n_max, const std::optional<Window>& confine) {
  std::vector<BigInt> out;
  out.reserve(n_max);
  auto run = [&](auto&& step_from) {
    SparseVector u;
    u[v] = 1;
    for (int k = 1; k <= n_max; ++k) {
      u = step_from(u);
      auto it = u.find(v);
      out.push_back(it == u.end() ? BigInt(0) : it->second);
    }
  };
  try {
    run([&](const SparseVector& u) {
      SparseVector next;
      for (const auto& [j, val] : u)
        for (const auto& [i, a] : m.column(j))
          if (!confine || confine->contains(i)) add_to(next, i, a * val);
      return next;
    });
  } catch (const ColumnSupportUnbounded&) {
    out.clear();
    run([&](const SparseVector& u) {
      SparseVector next;
      for (const auto& [i, val] : u) {
        std::vector<Entry> row;
        if (confine) {
          row = m.row(i, *confine).entries;
        } else {
          auto r = m.finite_row(i);
          if (!r) throw InvalidMatrix("neither the column nor the row support is finite");
          row = std::move(*r);
        }
        for (const auto& [j, a] : row) add_to(next, j, a * val);
      }
      return next;
    });
  }
  return out;
}

DenseMatrix truncate(const Matrix& m, const Window& window) {
  DenseMatrix d;
  d.window = window;
  d.a.assign(window.size(), std::vector<BigInt>(window.size(), BigInt(0)));
  for (Vertex i = window.lo; i <= window.hi; ++i)
    for (const auto& [j, v] : m.row(i, window).entries) d.a[i - window.lo][j - window.lo] = v;
  return d;
}

IncidenceSequence stationary_sequence(const Matrix& m) {
  IncidenceSequence s;
  s.index_set = m.index_set();
  s.level = [m](int) { return m; };
  s.stationary = true;
  return s;
}

IncidenceSequence telescope(const IncidenceSequence& seq, std::function<int(int)> cuts, bool stationary_result) {
  if (cuts(0) != 0) throw std::invalid_argument("telescope: cuts must start at 0");
  IncidenceSequence out;
  out.index_set = seq.index_set;
  out.stationary = stationary_result;
  out.level = [seq, cuts](int k) {
    int lo = cuts(k), hi = cuts(k + 1);
    if (hi <= lo) throw std::invalid_argument("telescope: cuts must be strictly increasing");
    Matrix acc = seq.at(lo);
    for (int n = lo + 1; n < hi; ++n) acc = Matrix::product(acc, seq.at(n));
    return acc;
  };
  return out;
}

IncidenceSequence telescope(const IncidenceSequence& seq, const std::vector<int>& cuts) {
  if (cuts.empty() || cuts.front() != 0) throw std::invalid_argument("telescope: cuts must start at 0");
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (cuts[i] <= cuts[i - 1]) throw std::invalid_argument("telescope: cuts must be strictly increasing");
  int gap = cuts.size() >= 2 ? cuts.back() - cuts[cuts.size() - 2] : 1;
  auto rule = [cuts, gap](int k) {
    if (k < static_cast<int>(cuts.size())) return cuts[k];
    return cuts.back() + (k - static_cast<int>(cuts.size()) + 1) * gap;
  };
  bool uniform = true;
  for (std::size_t i = 1; i < cuts.size(); ++i)
    if (cuts[i] - cuts[i - 1] != gap) uniform = false;
  return telescope(seq, rule, seq.stationary && uniform);
}

int period(const Matrix& m, Vertex v, int n_max) {
  if (n_max < 1) throw std::invalid_argument("period: n_max must be >= 1");
  auto counts = return_counts(m, v, n_max);
  int g = 0;
  for (int k = 1; k <= n_max; ++k)
    if (counts[k - 1] > 0) g = std::gcd(g, k);
  if (g == 0) throw NoReturnFound("no return to " + std::to_string(v) + " within " + std::to_string(n_max) + " steps");
  return g;
}

IrreducibilityVerdict irreducible_on_window(const Matrix& m, const Window& window, int path_bound) {
  IrreducibilityVerdict verdict;
  verdict.padded = pad(m.index_set(), window, static_cast<Vertex>(path_bound) * m.reach().value_or(1));
  const Window& pw = verdict.padded;
  std::map<Vertex, std::vector<Vertex>> adj;
  for (Vertex i = pw.lo; i <= pw.hi; ++i)
    for (const auto& e : m.row(i, pw).entries) adj[i].push_back(e.index);
  for (Vertex u = window.lo; u <= window.hi; ++u) {
    std::map<Vertex, int> dist{{u, 0}};
    std::deque<Vertex> q{u};
    std::set<Vertex> reached;
    while (!q.empty()) {
      Vertex x = q.front();
      q.pop_front();
      int d = dist[x];
      if (d == path_bound) continue;
      for (Vertex y : adj[x]) {
        if (window.contains(y)) reached.insert(y);
        if (!dist.count(y)) {
          dist[y] = d + 1;
          q.push_back(y);
        }
      }
    }
    for (Vertex v = window.lo; v <= window.hi; ++v) {
      if (!reached.count(v)) {
        verdict.irreducible = false;
        verdict.witness = std::make_pair(u, v);
        return verdict;
      }
    }
  }
  verdict.irreducible = true;
  return verdict;
}

}  // namespace gbd
