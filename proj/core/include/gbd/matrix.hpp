#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gbd/errors.hpp"
#include "gbd/numeric.hpp"

namespace gbd {

enum class IndexSet { Integers, Naturals };

std::string to_string(IndexSet s);
IndexSet index_set_from_string(const std::string& s);
bool in_index_set(IndexSet s, Vertex v);
Vertex first_index(IndexSet s);  // 1 for Naturals; undefined lower end for Integers (returns INT64_MIN)

// Inclusive vertex range used to truncate infinite objects.
struct Window {
  Vertex lo = 1;
  Vertex hi = 1;
  bool contains(Vertex v) const { return v >= lo && v <= hi; }
  std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }
  bool operator==(const Window&) const = default;
};

Window make_window(IndexSet s, Vertex lo, Vertex hi);
Window window_around(IndexSet s, Vertex center, Vertex radius);
Window pad(IndexSet s, const Window& w, Vertex amount);

struct Entry {
  Vertex index;
  BigInt value;
  bool operator==(const Entry&) const = default;
};

struct RowSlice {
  std::vector<Entry> entries;
  bool support_exceeds_window = false;
};

// value at columns from, from + step, from + 2 step, ...
struct Ray {
  Vertex from;
  Vertex step;
  BigInt value;
};

struct RowPattern {
  std::vector<Entry> finite;
  std::vector<Ray> rays;
  bool infinite() const { return !rays.empty(); }
};

class MatrixImpl {
 public:
  virtual ~MatrixImpl() = default;
  virtual IndexSet index_set() const = 0;
  virtual bool columns_finite() const = 0;
  virtual std::vector<Entry> column(Vertex j) const = 0;
  virtual std::optional<std::vector<Entry>> finite_row(Vertex i) const = 0;
  virtual RowSlice row(Vertex i, const Window& w) const = 0;
  virtual BigInt at(Vertex i, Vertex j) const = 0;
  virtual nlohmann::json descriptor() const = 0;
  virtual std::optional<Vertex> reach() const { return std::nullopt; }
  virtual std::optional<std::vector<int>> band_offsets() const { return std::nullopt; }
};

// Countably infinite non-negative integer matrix A = F^T with a_{source,target};
// column j lists the incoming edges of vertex j.  Immutable and cheap to copy.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::shared_ptr<const MatrixImpl> impl) : impl_(std::move(impl)) {}

  IndexSet index_set() const { return impl_->index_set(); }
  bool columns_finite() const { return impl_->columns_finite(); }
  std::vector<Entry> column(Vertex j) const { return impl_->column(j); }
  std::optional<std::vector<Entry>> finite_row(Vertex i) const { return impl_->finite_row(i); }
  RowSlice row(Vertex i, const Window& w) const { return impl_->row(i, w); }
  BigInt at(Vertex i, Vertex j) const { return impl_->at(i, j); }
  nlohmann::json descriptor() const { return impl_->descriptor(); }
  std::optional<Vertex> reach() const { return impl_->reach(); }
  std::optional<std::vector<int>> band_offsets() const { return impl_->band_offsets(); }
  bool valid() const { return static_cast<bool>(impl_); }

  // a_{i,i+o} = rule(o, i) for o in offsets.
  static Matrix banded(IndexSet s, std::vector<int> offsets, std::function<BigInt(int, Vertex)> rule,
                       nlohmann::json descriptor);
  // Rows described by closed-form patterns; columns by a separate rule that may
  // throw ColumnSupportUnbounded.
  static Matrix from_rows(IndexSet s, std::function<RowPattern(Vertex)> rows,
                          std::function<std::vector<Entry>(Vertex)> columns, nlohmann::json descriptor,
                          bool columns_finite = true, std::optional<Vertex> reach = std::nullopt);
  static Matrix product(const Matrix& a, const Matrix& b);
  static Matrix transpose(const Matrix& a);

 private:
  std::shared_ptr<const MatrixImpl> impl_;
};

using SparseVector = std::map<Vertex, BigInt>;

RowSlice row_entries(const Matrix& m, Vertex row, const Window& window);
std::vector<Entry> column_entries(const Matrix& m, Vertex col);

// u(s) = a^(n)_{s,target} for every source s, by scattering through column supports.
SparseVector power_column(const Matrix& m, int n, Vertex target, const std::optional<Window>& confine = std::nullopt);
// u(t) = a^(n)_{source,t}; needs finite rows or a confining window.
SparseVector power_row(const Matrix& m, int n, Vertex source, const std::optional<Window>& confine = std::nullopt);
BigInt power_entry(const Matrix& m, int n, Vertex source, Vertex target);
// a^(k)_{vv} for k = 1..n_max (index 0 holds k = 1).
std::vector<BigInt> return_counts(const Matrix& m, Vertex v, int n_max,
                                  const std::optional<Window>& confine = std::nullopt);

struct DenseMatrix {
  Window window;
  std::vector<std::vector<BigInt>> a;
  const BigInt& operator()(Vertex i, Vertex j) const { return a[i - window.lo][j - window.lo]; }
  std::size_t size() const { return a.size(); }
};

DenseMatrix truncate(const Matrix& m, const Window& window);

// A_n for n = 0, 1, 2, ... (edges from level n to level n + 1).
struct IncidenceSequence {
  IndexSet index_set = IndexSet::Naturals;
  std::function<Matrix(int)> level;
  bool stationary = false;
  Matrix at(int n) const { return level(n); }
};

IncidenceSequence stationary_sequence(const Matrix& m);
// cuts(k) is the original level of telescoped level k; cuts(0) = 0, strictly increasing.
IncidenceSequence telescope(const IncidenceSequence& seq, std::function<int(int)> cuts, bool stationary_result = false);
// Finite cut list; beyond the list the last gap repeats.
IncidenceSequence telescope(const IncidenceSequence& seq, const std::vector<int>& cuts);

int period(const Matrix& m, Vertex v, int n_max);

struct IrreducibilityVerdict {
  bool irreducible = false;
  std::optional<std::pair<Vertex, Vertex>> witness;  // (from, to) with no path found
  Window padded;
};

IrreducibilityVerdict irreducible_on_window(const Matrix& m, const Window& window, int path_bound);

}  // namespace gbd
