#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "gbd/gbd.hpp"

namespace gbd::test {

// Seeded case generator; every property test draws from one of these.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  std::int64_t integer(std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// Runs body on `cases` generators derived from the base seed; the seed is reported on failure.
inline void for_all(std::uint64_t base, int cases, const std::function<void(Gen&, std::uint64_t)>& body) {
  for (int i = 0; i < cases; ++i) {
    const std::uint64_t seed = base * 1000003u + static_cast<std::uint64_t>(i);
    Gen g(seed);
    body(g, seed);
  }
}

// Banded matrix with entries drawn per (offset, row) from a fixed table so rows are reproducible.
struct RandomBanded {
  IndexSet set;
  std::vector<int> offsets;
  std::map<std::pair<int, Vertex>, std::int64_t> table;
  std::int64_t base = 1;
  Matrix matrix;
};

inline RandomBanded random_banded(Gen& g, IndexSet set, int max_reach = 2, std::int64_t max_entry = 3) {
  RandomBanded rb;
  rb.set = set;
  const int reach = static_cast<int>(g.integer(1, max_reach));
  for (int o = -reach; o <= reach; ++o)
    if (o == -1 || o == 1 || g.coin()) rb.offsets.push_back(o);
  auto table = std::make_shared<std::map<std::pair<int, Vertex>, std::int64_t>>();
  for (int o : rb.offsets)
    for (Vertex i = -40; i <= 40; ++i) (*table)[{o, i}] = g.integer(o == -1 || o == 1 ? 1 : 0, max_entry);
  rb.table = *table;
  rb.matrix = Matrix::banded(
      set, rb.offsets,
      [table](int o, Vertex i) -> BigInt {
        auto it = table->find({o, i});
        return it != table->end() ? BigInt(it->second) : BigInt(1);
      },
      nlohmann::json{{"kind", "random"}});
  return rb;
}

// Dense BigInt power of the truncation; exact for entries whose paths stay inside the window.
inline std::vector<std::vector<BigInt>> dense_power(const DenseMatrix& d, int n) {
  const std::size_t k = d.size();
  std::vector<std::vector<BigInt>> r(k, std::vector<BigInt>(k, 0));
  for (std::size_t i = 0; i < k; ++i) r[i][i] = 1;
  for (int s = 0; s < n; ++s) {
    std::vector<std::vector<BigInt>> next(k, std::vector<BigInt>(k, 0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t m = 0; m < k; ++m)
        if (r[i][m] != 0)
          for (std::size_t j = 0; j < k; ++j) next[i][j] += r[i][m] * d.a[m][j];
    r = std::move(next);
  }
  return r;
}

// Counts paths of length n from w to v by depth-first search over columns.
inline BigInt dfs_paths(const Diagram& d, int m, Vertex w, int n, Vertex v) {
  if (m == n) return w == v ? 1 : 0;
  BigInt total = 0;
  for (const auto& e : d.matrix(n - 1).column(v)) total += e.value * dfs_paths(d, m, w, n - 1, e.index);
  return total;
}

}  // namespace gbd::test
