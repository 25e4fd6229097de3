#include "gbd/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "gbd/embedded_data.hpp"

namespace gbd {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

class Params {
 public:
  Params(std::string id, const json& in) : id_(std::move(id)), in_(in.is_null() ? json::object() : in) {
    if (!in_.is_object()) throw ConfigError(id_ + ": parameters must be an object");
  }

  std::int64_t integer(const std::string& key, std::int64_t def) {
    used_.insert(key);
    if (!in_.contains(key)) {
      out_[key] = def;
      return def;
    }
    const json& v = in_.at(key);
    std::int64_t x = 0;
    if (v.is_number_integer()) x = v.get<std::int64_t>();
    else if (v.is_string()) {
      try {
        std::size_t pos = 0;
        x = std::stoll(v.get<std::string>(), &pos);
        if (pos != v.get<std::string>().size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ConfigError(id_ + ": parameter '" + key + "' is not an integer");
      }
    } else {
      throw ConfigError(id_ + ": parameter '" + key + "' is not an integer");
    }
    out_[key] = x;
    return x;
  }

  std::vector<std::int64_t> list(const std::string& key) {
    used_.insert(key);
    std::vector<std::int64_t> out;
    if (!in_.contains(key)) return out;
    const json& v = in_.at(key);
    if (v.is_array()) {
      for (const auto& x : v) out.push_back(x.get<std::int64_t>());
    } else if (v.is_string()) {
      std::stringstream ss(v.get<std::string>());
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        try {
          out.push_back(std::stoll(tok));
        } catch (const std::exception&) {
          throw ConfigError(id_ + ": parameter '" + key + "' must be a comma-separated integer list");
        }
      }
    } else {
      throw ConfigError(id_ + ": parameter '" + key + "' must be a list");
    }
    out_[key] = out;
    return out;
  }

  void require(bool ok, const std::string& what) const {
    if (!ok) throw ParamOutOfRange(id_ + ": " + what);
  }

  json finish() const {
    for (const auto& [k, v] : in_.items())
      if (!used_.count(k)) throw ConfigError(id_ + ": unknown parameter '" + k + "'");
    return out_;
  }

 private:
  std::string id_;
  json in_;
  json out_ = json::object();
  std::set<std::string> used_;
};

json catalog_descriptor(const std::string& id, const json& params) {
  return {{"kind", "catalog"}, {"name", id}, {"params", params}};
}

Surd sqrt_surd(const BigInt& n) {
  BigInt r = boost::multiprecision::sqrt(n);
  if (r * r == n) return Surd(Rational(r));
  return Surd::sqrt_of(n);
}

Rational rpow(const Rational& x, std::int64_t k) { return pow_rational(x, static_cast<int>(k)); }

EigenVector closed_vector(const std::string& id, std::function<double(Vertex)> value,
                          std::function<std::optional<Surd>(Vertex)> exact = {}, Vertex anchor = 1) {
  EigenVector v;
  v.value = std::move(value);
  v.exact = std::move(exact);
  v.provenance = "closed-form:" + id;
  v.anchor = anchor;
  return v;
}

EigenVector ones(const std::string& id, Vertex anchor) {
  return closed_vector(
      id, [](Vertex) { return 1.0; }, [](Vertex) { return std::optional<Surd>(Surd(1)); }, anchor);
}

double sum_numeric(const std::function<double(Vertex)>& f, Vertex from, int terms) {
  double s = 0.0;
  for (int k = 0; k < terms; ++k) s += f(from + k);
  return s;
}

CatalogEntry make_a1(Params& p) {
  const auto a = p.integer("a", 1), b = p.integer("b", 1);
  p.require(a >= 1 && b >= 1, "a and b must be positive integers");
  CatalogEntry e;
  e.id = "A1";
  e.summary = "two-sided banded matrix with eigenvalue a + 2b and geometric right eigenvector";
  e.params = p.finish();
  auto rule = [a, b](int o, Vertex i) -> BigInt {
    if (i >= 2) return o == -1 ? a : (o == 1 ? 2 * b : 0);
    if (i == 1) return o == -1 ? b : (o == 1 ? 2 * b : 0);
    if (i == 0) return o == -1 ? b : (o == 0 ? a : 2 * b);
    if (i == -1) return o == -1 ? 2 * b : (o == 0 ? a : b);
    if (i == -2) return o == -1 ? 2 * b : (o == 1 ? b : 0);
    return o == -1 ? 2 * b : (o == 1 ? a : 0);
  };
  Matrix m = Matrix::banded(IndexSet::Integers, {-1, 0, 1}, rule, catalog_descriptor("A1", e.params));
  e.diagram = Diagram::stationary(m, BandSpec::uniform(1, a + 2 * b), "A1");
  e.anchor = 0;
  const Rational q(a, b);
  const double qd = static_cast<double>(a) / static_cast<double>(b);
  auto fold = [](Vertex v) { return v >= 0 ? v : -1 - v; };
  EigenPair pair;
  pair.lambda = static_cast<double>(a + 2 * b);
  pair.lambda_exact = Surd(Rational(a + 2 * b));
  pair.xi = closed_vector(
      "A1",
      [qd, fold](Vertex v) {
        Vertex m = fold(v);
        return m == 0 ? 1.0 : std::ldexp(std::pow(qd, static_cast<double>(m - 1)), -static_cast<int>(m));
      },
      [q, fold](Vertex v) -> std::optional<Surd> {
        Vertex m = fold(v);
        if (m == 0) return Surd(1);
        return Surd(rpow(q, m - 1) / rpow(Rational(2), m));
      },
      0);
  pair.eta = ones("A1", 0);
  pair.provenance = "closed-form:A1";
  e.oracle.pair = pair;
  if (a < 2 * b) {
    Rational s = Rational(2) + Rational(2 * b, 2 * b - a);
    e.oracle.xi_sum_exact = s;
    e.oracle.xi_sum = to_double(s);
    e.oracle.eta_dot_xi = to_double(s);
    e.oracle.recurrence = RecurrenceClass::PositiveRecurrent;
  } else {
    e.oracle.xi_sum = kInf;
    e.oracle.eta_dot_xi = kInf;
    // drift of the induced walk: towards 0 with probability 2b / lambda, away with a / lambda
    e.oracle.recurrence = a == 2 * b ? RecurrenceClass::NullRecurrent : RecurrenceClass::Transient;
    e.oracle.recurrence_derived = true;
  }
  e.oracle.properties = {"equal column sums a + 2b", "finite measure iff a < 2b"};
  e.ordered = OrderedDiagram(e.diagram, EdgeOrder::left_to_right(), nearest_tail(e.diagram));
  return e;
}

// (x)^{n/2} for a positive rational x = num / den, as an exact surd.
std::optional<Surd> half_power(std::int64_t num, std::int64_t den, Vertex n) {
  Vertex k = n >= 0 ? n / 2 : -((-n + 1) / 2);
  Surd base(rpow(Rational(num, den), k));
  if (n - 2 * k == 0) return base;
  return base * sqrt_surd(BigInt(num) * den) * Surd(Rational(1, den));
}

CatalogEntry make_a2(Params& p) {
  const auto a = p.integer("a", 1), b = p.integer("b", 1);
  p.require(a >= 1 && b >= 1, "a and b must be positive integers");
  CatalogEntry e;
  e.id = "A2";
  e.summary = "period-two walk matrix on Z with two positive eigenvectors";
  e.params = p.finish();
  Matrix m = Matrix::banded(
      IndexSet::Integers, {-1, 1}, [a, b](int o, Vertex) -> BigInt { return o == -1 ? a : b; },
      catalog_descriptor("A2", e.params));
  e.diagram = Diagram::stationary(m, BandSpec::uniform(1, a + b), "A2");
  e.anchor = 0;
  const double r = static_cast<double>(a) / static_cast<double>(b);
  EigenPair tilde;
  tilde.lambda = 2.0 * std::sqrt(static_cast<double>(a * b));
  tilde.lambda_exact = Surd(2) * sqrt_surd(BigInt(a * b));
  tilde.xi = closed_vector(
      "A2", [r](Vertex n) { return std::pow(r, static_cast<double>(n) / 2.0); },
      [a, b](Vertex n) { return half_power(a, b, n); }, 0);
  tilde.eta = closed_vector(
      "A2", [r](Vertex n) { return std::pow(r, -static_cast<double>(n) / 2.0); },
      [a, b](Vertex n) { return half_power(b, a, n); }, 0);
  tilde.provenance = "closed-form:A2";
  EigenPair flat;
  flat.lambda = static_cast<double>(a + b);
  flat.lambda_exact = Surd(Rational(a + b));
  flat.xi = ones("A2", 0);
  flat.eta = ones("A2", 0);
  flat.provenance = "closed-form:A2";
  e.oracle.pair = tilde;
  e.oracle.secondary = flat;
  e.oracle.period = 2;
  e.oracle.recurrence = RecurrenceClass::NullRecurrent;
  e.oracle.xi_sum = kInf;
  e.oracle.eta_dot_xi = kInf;
  e.oracle.properties = {"period 2", "two sigma-finite tail-invariant measures when a != b",
                         "secondary pair (a + b, constant vector)"};
  e.ordered = OrderedDiagram(e.diagram, EdgeOrder::left_to_right(), TailRule::shift(1));
  return e;
}

CatalogEntry make_a3(Params& p) {
  const auto b = p.integer("b", 1), c = p.integer("c", 1), al = p.integer("alpha", 2);
  p.require(b >= 0 && c >= 1, "b must be non-negative and c positive");
  p.require(al > 1, "alpha must exceed 1");
  CatalogEntry e;
  e.id = "A3";
  e.summary = "one-sided balanced tridiagonal matrix with geometric eigenvector";
  e.params = p.finish();
  auto rule = [b, c, al](int o, Vertex i) -> BigInt {
    if (i == 1) return o == 0 ? b + al * c : (o == 1 ? al * c : 0);
    return o == -1 ? c : (o == 0 ? b : al * c);
  };
  Matrix m = Matrix::banded(IndexSet::Naturals, {-1, 0, 1}, rule, catalog_descriptor("A3", e.params));
  const std::int64_t lam = b + c + al * c;
  e.diagram = Diagram::stationary(m, BandSpec::uniform(1, lam), "A3");
  EigenPair pair;
  pair.lambda = static_cast<double>(lam);
  pair.lambda_exact = Surd(Rational(lam));
  const double ad = static_cast<double>(al);
  pair.xi = closed_vector(
      "A3", [ad](Vertex n) { return std::pow(ad, -static_cast<double>(n - 1)); },
      [al](Vertex n) -> std::optional<Surd> { return Surd(rpow(Rational(1, al), n - 1)); });
  pair.eta = ones("A3", 1);
  pair.provenance = "closed-form:A3";
  e.oracle.pair = pair;
  Rational s(al, al - 1);
  e.oracle.xi_sum_exact = s;
  e.oracle.xi_sum = to_double(s);
  e.oracle.eta_dot_xi = to_double(s);
  e.oracle.recurrence = RecurrenceClass::PositiveRecurrent;
  e.oracle.recurrence_derived = true;
  e.oracle.properties = {"balanced", "equal column sums b + c + alpha c"};
  e.ordered = OrderedDiagram(e.diagram, EdgeOrder::left_to_right(), TailRule::vertical(0));
  return e;
}

CatalogEntry make_a4(Params& p) {
  const auto b = p.integer("b", 0), r = p.integer("r", 2), al = p.integer("alpha", 1), be = p.integer("beta", 0);
  p.require(b >= 0 && r >= 1, "b must be non-negative and r positive");
  p.require(std::abs(al) < r && std::abs(be) < r, "|alpha| and |beta| must be below r");
  CatalogEntry e;
  e.id = "A4";
  e.summary = "one-sided tridiagonal matrix with alternating off-diagonal weights";
  e.params = p.finish();
  auto rule = [b, r, al, be](int o, Vertex i) -> BigInt {
    if (i == 1) return o == 0 ? b + r + al : (o == 1 ? r + be : 0);
    const std::int64_t s = i % 2 == 0 ? al : be;
    return o == -1 ? r - s : (o == 0 ? b : r + s);
  };
  Matrix m = Matrix::banded(IndexSet::Naturals, {-1, 0, 1}, rule, catalog_descriptor("A4", e.params));
  const std::int64_t lam = b + 2 * r;
  e.diagram = Diagram::stationary(m, BandSpec::uniform(1, lam), "A4");
  const Rational q1(r - al, r + be), q2(r - be, r + al);
  const double q1d = to_double(q1), q2d = to_double(q2);
  EigenPair pair;
  pair.lambda = static_cast<double>(lam);
  pair.lambda_exact = Surd(Rational(lam));
  pair.xi = closed_vector(
      "A4",
      [q1d, q2d](Vertex n) {
        const double k = static_cast<double>(n / 2);
        return n % 2 == 0 ? std::pow(q1d, k) * std::pow(q2d, k - 1) : std::pow(q1d * q2d, k);
      },
      [q1, q2](Vertex n) -> std::optional<Surd> {
        const Vertex k = n / 2;
        return Surd(n % 2 == 0 ? rpow(q1, k) * rpow(q2, k - 1) : rpow(q1 * q2, k));
      });
  pair.eta = ones("A4", 1);
  pair.provenance = "closed-form:A4";
  e.oracle.pair = pair;
  if (q1 * q2 < 1) {
    Rational s = (1 + q1) / (1 - q1 * q2);
    e.oracle.xi_sum_exact = s;
    e.oracle.xi_sum = to_double(s);
    e.oracle.eta_dot_xi = to_double(s);
    e.oracle.recurrence = RecurrenceClass::PositiveRecurrent;
    e.oracle.recurrence_derived = true;
  } else {
    e.oracle.xi_sum = kInf;
    e.oracle.eta_dot_xi = kInf;
  }
  e.oracle.properties = {"equal column sums b + 2r", "finite measure iff q1 q2 < 1"};
  e.ordered = OrderedDiagram(e.diagram, EdgeOrder::left_to_right(), nearest_tail(e.diagram));
  return e;
}

// Row 1 is all ones; row i > 1 has a single one in column i - 1.
Matrix renewal_matrix(const json& desc) {
  auto rows = [](Vertex i) {
    RowPattern p;
    if (i == 1) p.rays.push_back({1, 1, 1});
    else p.finite.push_back({i - 1, 1});
    return p;
  };
  auto cols = [](Vertex j) { return std::vector<Entry>{{1, 1}, {j + 1, 1}}; };
  return Matrix::from_rows(IndexSet::Naturals, rows, cols, desc, true, std::nullopt);
}

CatalogEntry make_a5(Params& p) {
  CatalogEntry e;
  e.id = "A5";
  e.summary = "renewal matrix with Perron value 2";
  e.params = p.finish();
  e.diagram = Diagram::stationary(renewal_matrix(catalog_descriptor("A5", e.params)), std::nullopt, "A5");
  EigenPair pair;
  pair.lambda = 2.0;
  pair.lambda_exact = Surd(2);
  pair.xi = closed_vector(
      "A5", [](Vertex k) { return std::ldexp(1.0, -static_cast<int>(k)); },
      [](Vertex k) -> std::optional<Surd> { return Surd(rpow(Rational(1, 2), k)); });
  pair.eta = ones("A5", 1);
  pair.provenance = "closed-form:A5";
  e.oracle.pair = pair;
  e.oracle.xi_sum_exact = Rational(1);
  e.oracle.xi_sum = 1.0;
  e.oracle.eta_dot_xi = 1.0;
  e.oracle.recurrence = RecurrenceClass::PositiveRecurrent;
  e.oracle.properties = {"balanced", "unique probability tail-invariant measure", "infinite first row"};
  e.ordered = OrderedDiagram(e.diagram, EdgeOrder::left_to_right(), nearest_tail(e.diagram));
  return e;
}

CatalogEntry make_a6(Params& p) {
  CatalogEntry e;
  e.id = "A6";
  e.summary = "pair renewal matrix with Perron value 1 + sqrt 2";
  e.params = p.finish();
  auto rows = [](Vertex i) {
    RowPattern r;
    if (i == 1) r.rays.push_back({1, 1, 1});
    else if (i == 2) {
      r.finite.push_back({1, 1});
      r.rays.push_back({2, 2, 1});
    } else {
      r.finite.push_back({i - 1, 1});
    }
    return r;
  };
  auto cols = [](Vertex j) {
    std::vector<Entry> out{{1, 1}};
    if (j % 2 == 0) out.push_back({2, 1});
    out.push_back({j + 1, 1});
    return out;
  };
  Matrix m = Matrix::from_rows(IndexSet::Naturals, rows, cols, catalog_descriptor("A6", e.params), true, std::nullopt);
  e.diagram = Diagram::stationary(m, std::nullopt, "A6");
  const Surd lam = Surd(1) + Surd::sqrt_of(2);
  const Surd inv = Surd::sqrt_of(2) - Surd(1);
  const double ld = 1.0 + std::sqrt(2.0);
  EigenPair pair;
  pair.lambda = ld;
  pair.lambda_exact = lam;
  pair.xi = closed_vector(
      "A6", [ld](Vertex n) { return n == 1 ? 1.0 / ld : 2.0 * std::pow(ld, -static_cast<double>(n)); },
      [inv](Vertex n) -> std::optional<Surd> { return n == 1 ? inv : Surd(2) * inv.pow(static_cast<int>(n)); });
  pair.eta = closed_vector(
      "A6", [ld](Vertex n) { return n % 2 == 1 ? 1.0 : ld - 1.0; },
      [lam](Vertex n) -> std::optional<Surd> { return n % 2 == 1 ? Surd(1) : lam - Surd(1); });
  pair.provenance = "closed-form:A6";
  e.oracle.pair = pair;
  e.oracle.xi_sum_exact = Rational(1);
  e.oracle.xi_sum = 1.0;
  e.oracle.eta_dot_xi = sum_numeric([&](Vertex v) { return pair.xi(v) * pair.eta(v); }, 1, 200);
  e.oracle.recurrence = RecurrenceClass::PositiveRecurrent;
  e.oracle.properties = {"not balanced", "finite tail-invariant measure unique up to scaling"};
  e.ordered = OrderedDiagram(e.diagram, EdgeOrder::left_to_right(), nearest_tail(e.diagram));
  return e;
}

CatalogEntry make_a7(Params& p) {
  auto cycle = p.list("cycle");
  const auto c = p.integer("c", 1);
  if (cycle.empty()) cycle = {c};
  for (auto x : cycle) p.require(x >= 1 && x <= 1000, "coefficients must lie in [1, 1000]");
  CatalogEntry e;
  e.id = "A7";
  e.summary = "matrix with first column (c_k) and superdiagonal ones";
  e.params = p.finish();
  const auto cyc = cycle;
  auto coef = [cyc](Vertex k) { return cyc[static_cast<std::size_t>(k % static_cast<Vertex>(cyc.size()))]; };
  auto rows = [coef](Vertex i) {
    RowPattern r;
    r.finite.push_back({1, coef(i - 1)});
    r.finite.push_back({i + 1, 1});
    return r;
  };
  auto cols = [](Vertex j) -> std::vector<Entry> {
    if (j == 1) throw ColumnSupportUnbounded("column 1 of A7 has infinitely many non-zero entries");
    return {{j - 1, 1}};
  };
  Matrix m = Matrix::from_rows(IndexSet::Naturals, rows, cols, catalog_descriptor("A7", e.params), false, std::nullopt);
  e.diagram = Diagram::stationary(m, std::nullopt, "A7");

  // sum_k c_k z^{-(k+1)} = 1 over one period: S(z) = P(z) / (1 - z^{-p})
  const std::size_t per = cyc.size();
  auto series = [cyc, per](double z) {
    double s = 0.0;
    for (std::size_t k = 0; k < per; ++k) s += static_cast<double>(cyc[k]) * std::pow(z, -static_cast<double>(k + 1));
    return s / (1.0 - std::pow(z, -static_cast<double>(per)));
  };
  const bool constant = std::all_of(cyc.begin(), cyc.end(), [&](auto x) { return x == cyc[0]; });
  double lam;
  std::optional<Surd> lam_exact;
  if (constant) {
    lam = static_cast<double>(cyc[0] + 1);
    lam_exact = Surd(Rational(cyc[0] + 1));
  } else {
    double lo = 1.0 + 1e-12, hi = static_cast<double>(*std::max_element(cyc.begin(), cyc.end())) + 1.0;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (series(mid) > 1.0 ? lo : hi) = mid;
    }
    lam = 0.5 * (lo + hi);
    e.oracle.lambda_derived = true;
  }
  EigenPair pair;
  pair.lambda = lam;
  pair.lambda_exact = lam_exact;
  // xi_1 = 1 and xi_{k+2} = sum_{j >= 1} c_{k+j} lambda^{-j}, the stable form of the forward recurrence
  auto xi = [coef, lam, constant](Vertex v) {
    if (v == 1 || constant) return 1.0;
    double s = 0.0, w = 1.0;
    for (int j = 1; j < 400; ++j) {
      w /= lam;
      s += static_cast<double>(coef(v - 2 + j)) * w;
      if (w < 1e-18) break;
    }
    return s;
  };
  pair.xi = closed_vector("A7", xi,
                          constant ? std::function<std::optional<Surd>(Vertex)>(
                                         [](Vertex) -> std::optional<Surd> { return Surd(1); })
                                   : std::function<std::optional<Surd>(Vertex)>());
  pair.eta = closed_vector(
      "A7", [lam](Vertex v) { return std::pow(lam, -static_cast<double>(v - 1)); },
      constant ? std::function<std::optional<Surd>(Vertex)>([l = cyc[0] + 1](Vertex v) -> std::optional<Surd> {
        return Surd(rpow(Rational(1, l), v - 1));
      })
               : std::function<std::optional<Surd>(Vertex)>());
  pair.provenance = constant ? "closed-form:A7" : "derived:A7";
  e.oracle.pair = pair;
  e.oracle.xi_sum = kInf;
  e.oracle.eta_dot_xi = sum_numeric([&](Vertex v) { return pair.xi(v) * pair.eta(v); }, 1, 2000);
  e.oracle.recurrence = RecurrenceClass::PositiveRecurrent;
  e.oracle.recurrence_derived = true;
  e.oracle.properties = {"column 1 has infinite support", "sigma-finite infinite tail-invariant measure",
                         constant ? "lambda = c + 1" : "lambda solved numerically from the series equation"};
  return e;
}

CatalogEntry make_no_measure(Params& p) {
  CatalogEntry e;
  e.id = "NoMeasure";
  e.summary = "increasing diagonal with a unit off-diagonal; no tail-invariant measure with finite cylinder values";
  e.params = p.finish();
  Matrix m = Matrix::banded(
      IndexSet::Naturals, {-1, 0}, [](int o, Vertex i) -> BigInt { return o == 0 ? BigInt(i + 1) : BigInt(1); },
      catalog_descriptor("NoMeasure", e.params));
  e.diagram = Diagram::stationary(m, std::nullopt, "NoMeasure");
  e.oracle.properties = {"no tail-invariant measure with finite values on cylinders"};
  return e;
}

CatalogEntry make_infinite_perron(Params& p) {
  CatalogEntry e;
  e.id = "InfinitePerron";
  e.summary = "tridiagonal matrix on Z with diagonal |m|^|m|; the Perron value is infinite";
  e.params = p.finish();
  auto rule = [](int o, Vertex i) -> BigInt {
    if (o != 0 || i == 0) return 1;
    BigInt m = i < 0 ? -i : i;
    return boost::multiprecision::pow(m, static_cast<unsigned>(m));
  };
  Matrix m = Matrix::banded(IndexSet::Integers, {-1, 0, 1}, rule, catalog_descriptor("InfinitePerron", e.params));
  e.diagram = Diagram::stationary(m, std::nullopt, "InfinitePerron");
  e.anchor = 0;
  e.oracle.properties = {"infinite Perron value", "truncated spectral radius unbounded"};
  return e;
}

LabelTable embedded_table(std::string_view text) { return LabelTable::from_json(json::parse(text)); }

CatalogEntry make_labelled(Params& p, const std::string& id, std::string_view text, std::string summary,
                           std::vector<std::string> props, std::optional<TailRule> tail = std::nullopt) {
  CatalogEntry e;
  e.id = id;
  e.summary = std::move(summary);
  e.params = p.finish();
  LabelTable t = embedded_table(text);
  e.diagram = t.diagram();
  e.ordered = OrderedDiagram(e.diagram, t.order(), tail ? *tail : nearest_tail(e.diagram));
  e.oracle.properties = std::move(props);
  return e;
}

Vertex pow2(int n) {
  if (n < 0 || n > 61) throw InvalidWindow("compressible diagram level out of range");
  return Vertex{1} << n;
}

// Level n: vertices 1..2^n form a binary tree part, vertices 2^n + j a tridiagonal part.
class CompressibleImpl final : public MatrixImpl {
 public:
  explicit CompressibleImpl(int n) : n_(n), p_(pow2(n)), q_(pow2(n + 1)) {}
  IndexSet index_set() const override { return IndexSet::Naturals; }
  bool columns_finite() const override { return true; }
  std::vector<Entry> column(Vertex t) const override {
    if (t < 1) return {};
    if (t <= q_) return {{(t + 1) / 2, 1}, {p_ + 1, 1}};
    const Vertex j = t - q_;
    std::vector<Entry> out;
    if (j >= 2) out.push_back({p_ + j - 1, 1});
    out.push_back({p_ + j, 2});
    out.push_back({p_ + j + 1, 1});
    return out;
  }
  std::optional<std::vector<Entry>> finite_row(Vertex s) const override {
    if (s == p_ + 1 && q_ > (Vertex{1} << 16)) return std::nullopt;
    return row(s, Window{1, q_ + std::max<Vertex>(s - p_, 0) + 2}).entries;
  }
  RowSlice row(Vertex s, const Window& w) const override {
    RowSlice out;
    std::vector<Entry> all;
    auto add = [&](Vertex t, BigInt v) {
      if (w.contains(t)) all.push_back({t, std::move(v)});
      else out.support_exceeds_window = true;
    };
    if (s >= 1 && s <= p_) {
      add(2 * s - 1, 1);
      add(2 * s, 1);
    } else if (s > p_) {
      const Vertex k = s - p_;
      if (k == 1) {
        const Vertex lo = std::max<Vertex>(w.lo, 1), hi = std::min<Vertex>(w.hi, q_);
        for (Vertex t = lo; t <= hi; ++t) all.push_back({t, 1});
        if (lo > 1 || hi < q_) out.support_exceeds_window = true;
      }
      if (k >= 2) add(q_ + k - 1, 1);
      add(q_ + k, 2);
      add(q_ + k + 1, 1);
    }
    std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) { return a.index < b.index; });
    out.entries = std::move(all);
    return out;
  }
  BigInt at(Vertex s, Vertex t) const override {
    for (const auto& e : column(t))
      if (e.index == s) return e.value;
    return 0;
  }
  nlohmann::json descriptor() const override {
    return {{"kind", "catalog"}, {"name", "Compressible"}, {"params", json::object()}, {"level", n_}};
  }

 private:
  int n_;
  Vertex p_, q_;
};

CatalogEntry make_compressible(Params& p) {
  CatalogEntry e;
  e.id = "Compressible";
  e.summary = "binary tree glued to a tridiagonal part; the Vershik map sends the path space onto the complement of C";
  e.params = p.finish();
  IncidenceSequence seq;
  seq.index_set = IndexSet::Naturals;
  seq.stationary = false;
  seq.level = [](int n) { return Matrix(std::make_shared<CompressibleImpl>(n)); };
  e.diagram = Diagram(seq, std::nullopt, "Compressible");
  TailRule tail = TailRule::custom("compressible", [](int n, Vertex v) {
    const Vertex p = pow2(n), q = pow2(n + 1);
    if (v <= p) return Edge{n, v, 2 * v - 1, 0};
    return Edge{n, v, q + (v - p), 0};
  });
  OrderedDiagram od(e.diagram, EdgeOrder::left_to_right(), tail);
  od.set_out_window([](int n, Vertex v) {
    const Vertex p = pow2(n), q = pow2(n + 1);
    return Window{1, q + std::max<Vertex>(v - p, 0) + 1};
  });
  e.ordered = od;
  e.oracle.properties = {"C = paths starting at vertex 1 of level 0", "no maximal paths",
                         "image of the Vershik map is the complement of C", "no invariant probability measure"};
  return e;
}

CatalogEntry make_continuous_vershik(Params& p) {
  CatalogEntry e;
  e.id = "ContinuousVershik";
  e.summary = "bounded-size diagram on Z with t_n = 2^(n-1) and two incoming edges per vertex";
  e.params = p.finish();
  auto t = [](int n) -> Vertex { return n == 0 ? 1 : pow2(n - 1); };
  IncidenceSequence seq;
  seq.index_set = IndexSet::Integers;
  seq.stationary = false;
  seq.level = [t](int n) {
    const int s = static_cast<int>(t(n));
    return Matrix::banded(
        IndexSet::Integers, {-s, s}, [](int, Vertex) -> BigInt { return 1; },
        json{{"kind", "catalog"}, {"name", "ContinuousVershik"}, {"params", json::object()}, {"level", n}});
  };
  BandSpec band;
  band.t = t;
  band.L = [](int) { return BigInt(2); };
  e.diagram = Diagram(seq, band, "ContinuousVershik");
  e.ordered = OrderedDiagram(e.diagram, EdgeOrder::left_to_right(), TailRule::maximal_out());
  e.oracle.properties = {"t_0 = 1, t_n = 2^(n-1), L = 2", "discontinuity condition fails for every N",
                         "Vershik map continuous with the pairing x_max(w) -> x_min(w)"};
  return e;
}

CatalogEntry make_uniform_band(Params& p) {
  const auto t = p.integer("t", 1);
  p.require(t >= 1 && t <= 64, "t must lie in [1, 64]");
  CatalogEntry e;
  e.id = "UniformBand";
  e.summary = "all edges between vertices at distance at most t, uniformly bounded size";
  e.params = p.finish();
  std::vector<int> offs;
  for (int o = -static_cast<int>(t); o <= t; ++o) offs.push_back(o);
  Matrix m = Matrix::banded(
      IndexSet::Integers, offs, [](int, Vertex) -> BigInt { return 1; }, catalog_descriptor("UniformBand", e.params));
  e.diagram = Diagram::stationary(m, BandSpec::uniform(t, 2 * t + 1), "UniformBand");
  e.anchor = 0;
  EigenPair pair;
  pair.lambda = static_cast<double>(2 * t + 1);
  pair.lambda_exact = Surd(Rational(2 * t + 1));
  pair.xi = ones("UniformBand", 0);
  pair.eta = ones("UniformBand", 0);
  pair.provenance = "closed-form:UniformBand";
  e.oracle.pair = pair;
  e.oracle.xi_sum = kInf;
  e.oracle.eta_dot_xi = kInf;
  e.oracle.recurrence = RecurrenceClass::NullRecurrent;
  e.oracle.recurrence_derived = true;
  e.oracle.properties = {"uniformly bounded size", "discontinuity condition holds for every N"};
  e.ordered = OrderedDiagram(e.diagram, EdgeOrder::left_to_right(), TailRule::vertical(0));
  return e;
}

Matrix iso_z_matrix() {
  return Matrix::banded(
      IndexSet::Integers, {-1, 0, 1}, [](int o, Vertex) -> BigInt { return o == 0 ? 2 : 1; },
      catalog_descriptor("IsoPairZ", json::object()));
}

// Paper vertex k in N_0 is stored as k + 1.
Matrix iso_n_matrix() {
  auto entries = [](Vertex i) {
    const Vertex k = i - 1;
    std::vector<Entry> out;
    if (k == 0) out = {{1, 2}, {2, 1}, {3, 1}};
    else if (k == 1) out = {{1, 1}, {2, 2}, {4, 1}};
    else if (k == 2) out = {{1, 1}, {3, 2}, {5, 1}};
    else if (k == 3) out = {{2, 1}, {4, 2}, {6, 1}};
    else out = {{i - 2, 1}, {i, 2}, {i + 2, 1}};
    return out;
  };
  auto rows = [entries](Vertex i) {
    RowPattern p;
    p.finite = entries(i);
    return p;
  };
  return Matrix::from_rows(IndexSet::Naturals, rows, entries, catalog_descriptor("IsoPairN", json::object()), true, 2);
}

Vertex iso_g(Vertex n) { return (n >= 0 ? 2 * n : -2 * n - 1) + 1; }

CatalogEntry make_iso(Params& p, bool z) {
  CatalogEntry e;
  e.id = z ? "IsoPairZ" : "IsoPairN";
  e.summary = z ? "tridiagonal 1-2-1 diagram on Z" : "the same diagram relabelled on N by folding Z";
  e.params = p.finish();
  e.diagram = z ? Diagram::stationary(iso_z_matrix(), BandSpec::uniform(1, 4), e.id)
                : Diagram::stationary(iso_n_matrix(), std::nullopt, e.id);
  e.anchor = z ? 0 : 1;
  EigenPair pair;
  pair.lambda = 4.0;
  pair.lambda_exact = Surd(4);
  pair.xi = ones(e.id, e.anchor);
  pair.eta = ones(e.id, e.anchor);
  pair.provenance = "closed-form:" + e.id;
  e.oracle.pair = pair;
  e.oracle.xi_sum = kInf;
  e.oracle.eta_dot_xi = kInf;
  e.oracle.properties = {"isomorphic via g(n) = 2n for n >= 0 and -2n - 1 for n < 0"};
  e.ordered = OrderedDiagram(e.diagram, EdgeOrder::left_to_right(), TailRule::vertical(0));
  return e;
}

struct Maker {
  CatalogInfo info;
  std::function<CatalogEntry(Params&)> make;
};

const std::vector<Maker>& makers() {
  static const std::vector<Maker> list = [] {
    std::vector<Maker> m;
    auto add = [&](std::string id, std::string summary, json defaults, bool ordered,
                   std::function<CatalogEntry(Params&)> f) {
      m.push_back({CatalogInfo{std::move(id), std::move(summary), std::move(defaults), ordered}, std::move(f)});
    };
    add("A1", "two-sided banded matrix, lambda = a + 2b", {{"a", 1}, {"b", 1}}, true, make_a1);
    add("A2", "period-two walk on Z, lambda = 2 sqrt(ab), second pair (a + b, 1)", {{"a", 1}, {"b", 1}}, true,
        make_a2);
    add("A3", "balanced one-sided tridiagonal, lambda = b + c + alpha c", {{"b", 1}, {"c", 1}, {"alpha", 2}}, true,
        make_a3);
    add("A4", "alternating one-sided tridiagonal, lambda = b + 2r", {{"b", 0}, {"r", 2}, {"alpha", 1}, {"beta", 0}},
        true, make_a4);
    add("A5", "renewal matrix, lambda = 2", json::object(), true, make_a5);
    add("A6", "pair renewal matrix, lambda = 1 + sqrt 2", json::object(), true, make_a6);
    add("A7", "first column (c_k), lambda solves sum c_k / z^(k+1) = 1", {{"c", 1}}, false, make_a7);
    add("NoMeasure", "increasing diagonal, no tail-invariant measure", json::object(), false, make_no_measure);
    add("InfinitePerron", "infinite Perron value", json::object(), false, make_infinite_perron);
    add("SlantedOrder", "stationary slanted order, no extreme paths", json::object(), true, [](Params& p) {
      return make_labelled(p, "SlantedOrder", embedded::slanted_order,
                           "renewal diagram with two shifts and a slanted stationary order",
                           {"no maximal or minimal paths", "Vershik map is a minimal homeomorphism"});
    });
    add("AlternatingOrder", "orders alternating with level parity", json::object(), true, [](Params& p) {
      return make_labelled(p, "AlternatingOrder", embedded::alternating_order,
                           "tridiagonal diagram with doubled verticals and parity-dependent orders",
                           {"no extreme paths after telescoping to even levels"}, TailRule::vertical(0));
    });
    add("BothDiscontinuous", "Vershik map and inverse both discontinuous", json::object(), true, [](Params& p) {
      return make_labelled(p, "BothDiscontinuous", embedded::both_discontinuous,
                           "order whose Vershik map and its inverse are discontinuous",
                           {"one maximal and one minimal path", "forward map discontinuous at x_max",
                            "inverse discontinuous at x_min"});
    });
    add("InverseDiscontinuous", "Vershik map continuous, inverse discontinuous", json::object(), true,
        [](Params& p) {
          return make_labelled(p, "InverseDiscontinuous", embedded::inverse_discontinuous,
                               "order whose Vershik map is continuous while its inverse is not",
                               {"forward map continuous", "inverse discontinuous at x_min"});
        });
    add("Compressible", "no maximal paths, image misses C", json::object(), true, make_compressible);
    add("ContinuousVershik", "t_n = 2^(n-1), continuous Vershik map", json::object(), true, make_continuous_vershik);
    add("UniformBand", "uniformly bounded size band of width t", {{"t", 1}}, true, make_uniform_band);
    add("IsoPairZ", "1-2-1 diagram on Z", json::object(), true, [](Params& p) { return make_iso(p, true); });
    add("IsoPairN", "1-2-1 diagram folded onto N", json::object(), true, [](Params& p) { return make_iso(p, false); });
    return m;
  }();
  return list;
}

std::string json_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].dump();
    return s;
  }
  return v.dump();
}

}  // namespace

TailModel Oracle::xi_tail() const {
  if (xi_sum) return TailModel::closed_form(*xi_sum);
  return TailModel::numeric(200);
}

TailModel Oracle::eta_dot_xi_tail() const {
  if (eta_dot_xi) return TailModel::closed_form(*eta_dot_xi);
  return TailModel::numeric(200);
}

std::string CatalogEntry::reference() const {
  std::string s = "catalog:" + id;
  char sep = '?';
  for (const auto& [k, v] : params.items()) {
    s += sep + k + "=" + json_scalar(v);
    sep = '&';
  }
  return s;
}

nlohmann::json CatalogEntry::describe() const {
  json j{{"id", id}, {"params", params}, {"summary", summary}, {"reference", reference()},
         {"index_set", to_string(diagram.index_set())}, {"stationary", stationary()}, {"ordered", ordered.has_value()},
         {"anchor", anchor}};
  json o{{"properties", oracle.properties}, {"period", oracle.period}};
  auto pair_json = [](const EigenPair& p) {
    json q{{"lambda", p.lambda}, {"provenance", p.provenance}};
    if (p.lambda_exact) q["lambda_exact"] = p.lambda_exact->str();
    json xs = json::array(), es = json::array();
    for (Vertex v = p.xi.anchor; v < p.xi.anchor + 5; ++v) {
      xs.push_back(p.xi(v));
      es.push_back(p.eta(v));
    }
    q["xi_from_anchor"] = xs;
    q["eta_from_anchor"] = es;
    return q;
  };
  if (oracle.pair) o["pair"] = pair_json(*oracle.pair);
  if (oracle.secondary) o["secondary"] = pair_json(*oracle.secondary);
  o["lambda_derived"] = oracle.lambda_derived;
  if (oracle.recurrence) {
    o["recurrence"] = to_string(*oracle.recurrence);
    o["recurrence_derived"] = oracle.recurrence_derived;
  }
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json("infinity"); };
  if (oracle.xi_sum) o["xi_sum"] = num(*oracle.xi_sum);
  if (oracle.xi_sum_exact) o["xi_sum_exact"] = to_string(*oracle.xi_sum_exact);
  if (oracle.eta_dot_xi) o["eta_dot_xi"] = num(*oracle.eta_dot_xi);
  j["oracle"] = o;
  j["matrix"] = diagram.is_stationary() ? matrix().descriptor() : json{{"kind", "catalog"}, {"name", id}};
  return j;
}

const std::vector<CatalogInfo>& catalog_index() {
  static const std::vector<CatalogInfo> list = [] {
    std::vector<CatalogInfo> out;
    for (const auto& m : makers()) out.push_back(m.info);
    return out;
  }();
  return list;
}

CatalogEntry catalog_get(const std::string& id, const nlohmann::json& params) {
  for (const auto& m : makers())
    if (m.info.id == id) {
      Params p(id, params);
      return m.make(p);
    }
  throw ConfigError("unknown catalog entry '" + id + "'");
}

bool is_catalog_ref(const std::string& s) { return s.rfind("catalog:", 0) == 0; }

std::pair<std::string, nlohmann::json> parse_catalog_ref(const std::string& ref) {
  std::string body = is_catalog_ref(ref) ? ref.substr(8) : ref;
  const auto q = body.find('?');
  std::string id = body.substr(0, q);
  if (id.empty()) throw ConfigError("empty catalog id in '" + ref + "'");
  json params = json::object();
  if (q != std::string::npos) {
    std::stringstream ss(body.substr(q + 1));
    std::string kv;
    while (std::getline(ss, kv, '&')) {
      if (kv.empty()) continue;
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("malformed catalog parameter '" + kv + "'");
      const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (params.contains(key)) throw ConfigError("repeated catalog parameter '" + key + "'");
      params[key] = val;
    }
  }
  return {id, params};
}

CatalogEntry catalog_resolve(const std::string& ref) {
  auto [id, params] = parse_catalog_ref(ref);
  return catalog_get(id, params);
}

TailRule nearest_tail(const Diagram& d) {
  return TailRule::custom("nearest", [d](int n, Vertex v) {
    const Matrix m = d.matrix(n);
    if (m.at(v, v) > 0) return Edge{n, v, v, 0};
    for (Vertex r = 1; r <= 16; ++r)
      for (Vertex t : {v - r, v + r})
        if (in_index_set(d.index_set(), t) && m.at(v, t) > 0) return Edge{n, v, t, 0};
    throw InvalidPath("no edge out of " + std::to_string(v) + " within distance 16");
  });
}

IsoPair iso_pair() {
  IsoPair p;
  p.z = Diagram::stationary(iso_z_matrix(), BandSpec::uniform(1, 4), "IsoPairZ");
  p.n = Diagram::stationary(iso_n_matrix(), std::nullopt, "IsoPairN");
  p.g = iso_g;
  p.maps.g = [](int, Vertex v) { return iso_g(v); };
  p.maps.h = [](const Edge& e) { return Edge{e.level, iso_g(e.source), iso_g(e.target), e.copy}; };
  return p;
}

}  // namespace gbd
