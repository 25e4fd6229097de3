#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gbd/matrix.hpp"

namespace gbd {

// Positive vector indexed by vertices, either closed form or computed on a window.
struct EigenVector {
  std::function<double(Vertex)> value;
  std::function<std::optional<Surd>(Vertex)> exact;  // empty when no exact form exists
  std::string provenance;                             // "closed-form:<id>", "recurrence", "windowed"
  std::optional<Window> window;                       // domain of windowed vectors
  Vertex anchor = 1;
  double residual = 0.0;                              // interior sup-norm residual, relative

  double operator()(Vertex v) const { return value(v); }
  std::optional<Surd> exact_at(Vertex v) const { return exact ? exact(v) : std::nullopt; }
};

struct EigenPair {
  double lambda = 0.0;
  std::optional<Surd> lambda_exact;
  EigenVector xi;   // right: A xi = lambda xi
  EigenVector eta;  // left: eta A = lambda eta
  std::string provenance;
};

struct ScheduleStep {
  int n;
  Window window;
};

struct PerronReport {
  double lambda = 0.0;                // period-aware ratio estimate at the last n
  double root_lower_bound = 0.0;      // running sup of (a^(n)_ii)^(1/n)
  std::vector<double> root_sequence;  // (a^(n)_ii)^(1/n) over n = d, 2d, ...
  std::vector<double> running_sup;
  std::vector<double> ratio_sequence;
  std::vector<int> n_values;
  int period = 1;
  int horizon = 0;
  Window window;
  bool diverged = false;
};

// Runs the schedule and never throws on divergence; the flag is set instead.
PerronReport perron_scan(const Matrix& m, Vertex anchor, const std::vector<ScheduleStep>& schedule,
                         double ceiling = 1e6);
// Same, but raises DivergenceDetected when the estimates pass the ceiling.
PerronReport perron_estimate(const Matrix& m, Vertex anchor, const std::vector<ScheduleStep>& schedule,
                             double ceiling = 1e6);
PerronReport perron_estimate(const Matrix& m, Vertex anchor, int n, const Window& window, double ceiling = 1e6);

struct TruncatedRadius {
  double estimate = 0.0;
  double lower = 0.0;  // Collatz-Wielandt bounds on the truncation
  double upper = 0.0;
  int iterations = 0;
};

TruncatedRadius truncated_spectral_radius(const Matrix& m, const Window& window, double tol = 1e-12);

// Exact forward recurrence for tridiagonal matrices (exact when lambda is given
// exactly), otherwise power iteration on the truncation.  Normalized so that
// the anchor entry is 1.  Throws NoPositiveSolution.
EigenVector right_eigenvector(const Matrix& m, double lambda, const std::optional<Surd>& lambda_exact,
                              const Window& window, Vertex anchor, double tol = 1e-12);
EigenVector left_eigenvector(const Matrix& m, double lambda, const std::optional<Surd>& lambda_exact,
                             const Window& window, Vertex anchor, double tol = 1e-12);

// Relative residual sup |(A x)_i - lambda x_i| / sup |x| over rows whose support lies in the window.
double right_residual(const Matrix& m, const EigenVector& xi, double lambda, const Window& rows);
double left_residual(const Matrix& m, const EigenVector& eta, double lambda, const Window& cols);
// Exact residual over rows whose support lies in the window; nullopt when some entry lacks an exact form.
std::optional<Surd> exact_right_residual(const Matrix& m, const EigenVector& xi, const Surd& lambda, const Window& rows);
std::optional<Surd> exact_left_residual(const Matrix& m, const EigenVector& eta, const Surd& lambda, const Window& cols);

struct ColumnSumBounds {
  double inf = 0.0;
  double sup = 0.0;
  bool exact = false;                // all probed column sums equal
  std::optional<BigInt> exact_value;
  std::vector<Vertex> skipped;       // columns without certified finite support
};

ColumnSumBounds column_sum_bounds(const Matrix& m, const Window& window);

enum class RecurrenceClass { Transient, NullRecurrent, PositiveRecurrent, Inconclusive };
std::string to_string(RecurrenceClass c);
RecurrenceClass recurrence_from_string(const std::string& s);

struct TailModel {
  enum class Kind { GeometricRatio, ClosedFormSum, NumericHorizon } kind = Kind::NumericHorizon;
  double rho = 0.0;     // GeometricRatio
  double value = 0.0;   // ClosedFormSum (infinity allowed)
  int horizon = 200;    // terms inspected on each side

  static TailModel geometric(double rho, int horizon = 200) { return {Kind::GeometricRatio, rho, 0.0, horizon}; }
  static TailModel closed_form(double v) { return {Kind::ClosedFormSum, 0.0, v, 200}; }
  static TailModel numeric(int horizon) { return {Kind::NumericHorizon, 0.0, 0.0, horizon}; }
};

struct Summability {
  enum class Status { FiniteSum, Divergent, Inconclusive } status = Status::Inconclusive;
  double value = 0.0;
  double partial = 0.0;
  std::string certificate;
};

std::string to_string(Summability::Status s);

// Sum of x over the index set (both directions from the anchor on Z).
Summability summability(const std::function<double(Vertex)>& x, IndexSet s, Vertex anchor, const TailModel& tail);

struct RecurrenceReport {
  RecurrenceClass cls = RecurrenceClass::Inconclusive;
  RecurrenceClass numeric = RecurrenceClass::Inconclusive;  // certificate-only verdict
  bool analytic = false;                                   // cls taken from a catalog classification
  bool consistent = true;                                  // numeric verdict agrees or is inconclusive
  std::vector<double> terms;                               // a^(n)_ii / lambda^n
  std::vector<double> partial_sums;
  std::vector<double> first_return_partial;                // sum_k l_ii(k) / lambda^k (diagnostic)
  int horizon = 0;
  int period = 1;
  std::optional<double> eta_dot_xi;
  std::string certificate;
};

struct ClassifyOptions {
  std::optional<Summability> eta_dot_xi;      // summability of eta_i xi_i
  std::optional<RecurrenceClass> analytic;    // catalog classification, labelled as such
  std::optional<Window> confine;
  double divergence_threshold = 10.0;
};

RecurrenceReport classify_recurrence(const Matrix& m, double lambda, Vertex anchor, int horizon, double tol,
                                     const ClassifyOptions& opts = {});
// Same certificates applied to an arbitrary return series r_n (n = 1..N).
RecurrenceReport classify_series(const std::vector<double>& terms, double tol, const ClassifyOptions& opts = {});

// p_{w,v} = a_{w,v} xi_v / (lambda xi_w)
class StochasticMatrix {
 public:
  StochasticMatrix(Matrix a, double lambda, EigenVector xi)
      : a_(std::move(a)), lambda_(lambda), xi_(std::move(xi)) {}
  double p(Vertex w, Vertex v) const;
  std::vector<std::pair<Vertex, double>> column(Vertex v) const;
  std::vector<std::pair<Vertex, double>> row(Vertex w, const Window& window, bool* exceeds = nullptr) const;
  // Sum of the row when its support is finite; nullopt otherwise.
  std::optional<double> row_sum(Vertex w) const;
  const Matrix& matrix() const { return a_; }
  double lambda() const { return lambda_; }
  const EigenVector& xi() const { return xi_; }
  // P^n restricted to returns: p^(n)_{vv}, n = 1..n_max.
  std::vector<double> return_probabilities(Vertex v, int n_max) const;

 private:
  Matrix a_;
  double lambda_;
  EigenVector xi_;
};

struct RowCheck {
  std::vector<Vertex> verified;
  std::vector<Vertex> unverifiable;  // infinite rows
  double max_deviation = 0.0;
};

StochasticMatrix stochastic_from_eigenpair(const Matrix& m, const EigenPair& pair);
// Throws RowSumViolation when |sum - 1| > tol on a finite row of the window.
RowCheck validate_rows(const StochasticMatrix& p, const Window& rows, double tol = 1e-9);

struct PowerIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double diff = 0.0;
};

PowerIdentity verify_power_identity(const Matrix& m, const EigenPair& pair, Vertex v, int n);

// First-return counts l_{v,v}(k), k = 1..n_max.
std::vector<BigInt> first_return_counts(const Matrix& m, Vertex v, int n_max,
                                        const std::optional<Window>& confine = std::nullopt);

}  // namespace gbd
