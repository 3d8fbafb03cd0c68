#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "sll/errors.hpp"
#include "sll/graph.hpp"
#include "sll/matrix.hpp"

namespace sll {

/// Neighbor-weight decay law. Power-law schedules evaluate c*(k+1)^(-rho) so
/// the sequence is defined at k = 0; schedules like 1/k then start at c, which
/// may equal 1 for the first step only (rho > 0 forces every later value into
/// (0,1)). Constant schedules must lie strictly inside (0,1).
class LambdaSchedule {
public:
  enum class Kind { Constant, Power, Table };

  static LambdaSchedule constant(double c) {
    if (!(c > 0.0 && c < 1.0))
      throw ConfigError("lambda schedule: constant must lie in (0,1)");
    LambdaSchedule s(Kind::Constant);
    s.c_ = c;
    return s;
  }

  static LambdaSchedule power(double c, double rho) {
    if (!(c > 0.0 && c <= 1.0)) throw ConfigError("lambda schedule: c must lie in (0,1]");
    if (!(rho >= 0.0)) throw ConfigError("lambda schedule: rho must be nonnegative");
    if (c == 1.0 && rho == 0.0)
      throw ConfigError("lambda schedule: c = 1 with rho = 0 is the constant-1 schedule");
    LambdaSchedule s(Kind::Power);
    s.c_ = c;
    s.rho_ = rho;
    return s;
  }

  /// Explicit values for k = 0..len-1; queries past the end repeat the last
  /// value, which keeps long simulations well defined.
  static LambdaSchedule table(std::vector<double> values) {
    if (values.empty()) throw ConfigError("lambda schedule: table must be nonempty");
    for (double v : values)
      if (!(v > 0.0 && v < 1.0))
        throw ConfigError("lambda schedule: table values must lie in (0,1)");
    LambdaSchedule s(Kind::Table);
    s.values_ = std::move(values);
    return s;
  }

  double at(std::uint64_t k) const {
    switch (kind_) {
      case Kind::Constant: return c_;
      case Kind::Power: return c_ * std::pow(static_cast<double>(k) + 1.0, -rho_);
      case Kind::Table:
        return k < values_.size() ? values_[k] : values_.back();
    }
    return c_;
  }

  Kind kind() const { return kind_; }
  double c() const { return c_; }
  double rho() const { return rho_; }
  const std::vector<double>& values() const { return values_; }

private:
  explicit LambdaSchedule(Kind kind) : kind_(kind) {}
  Kind kind_;
  double c_ = 0.0;
  double rho_ = 0.0;
  std::vector<double> values_;
};

/// How the compliant stochastic matrix A_k is built from an edge set. Equal
/// split over the closed neighborhood fixes the nonzero lower bound at 1/n.
struct WeightPolicy {
  enum class Kind { RowStochastic, ColumnStochastic };
  Kind kind = Kind::RowStochastic;

  bool row() const { return kind == Kind::RowStochastic; }
};

struct WeightMatrix {
  Matrix values;
  std::uint64_t k = 0;
};

/// T_k = (1 - lambda) I + lambda A_k with A_k the equal-split stochastic
/// matrix over the edge set. Row kind splits each receiver's unit mass over
/// its in-neighborhood; column kind splits each sender's mass over its
/// out-neighborhood, so column sums are 1 without global knowledge.
inline WeightMatrix build_weight_matrix(const EdgeSet& edges, double lambda_k,
                                        const WeightPolicy& policy, std::uint64_t k = 0) {
  if (!(lambda_k > 0.0 && lambda_k <= 1.0))
    throw ConfigError("build_weight_matrix: lambda must lie in (0,1]");
  const std::size_t n = static_cast<std::size_t>(edges.n);
  Matrix a(n, n);
  if (policy.row()) {
    const auto nbrs = edges.in_neighbors();
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 1.0 / (static_cast<double>(nbrs[i].size()) + 1.0);
      a(i, i) = w;
      for (int j : nbrs[i]) a(i, static_cast<std::size_t>(j)) = w;
    }
  } else {
    const auto nbrs = edges.out_neighbors();
    for (std::size_t j = 0; j < n; ++j) {
      const double w = 1.0 / (static_cast<double>(nbrs[j].size()) + 1.0);
      a(j, j) = w;
      for (int i : nbrs[j]) a(static_cast<std::size_t>(i), j) = w;
    }
  }
  Matrix t(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      t(i, j) = (i == j ? 1.0 - lambda_k : 0.0) + lambda_k * a(i, j);
  return WeightMatrix{std::move(t), k};
}

enum class LimitClass { DivergesToInfinity, FinitePositive, Zero };
enum class SumClass { Divergent, Convergent };

inline const char* to_string(LimitClass c) {
  switch (c) {
    case LimitClass::DivergesToInfinity: return "diverges-to-infinity";
    case LimitClass::FinitePositive: return "finite-positive";
    case LimitClass::Zero: return "zero";
  }
  return "?";
}

inline const char* to_string(SumClass c) {
  return c == SumClass::Divergent ? "divergent" : "convergent";
}

/// Verdict on a decay schedule for a given connectivity window B. The two
/// criteria are reported separately on purpose: at the boundary (window
/// products shrinking exactly like 1/k) the k-scaled limit stays finite while
/// the window-product series still diverges, and the two tests disagree.
struct ScheduleVerdict {
  int b = 1;
  LimitClass limit_classification = LimitClass::FinitePositive;
  SumClass bc_sum_classification = SumClass::Divergent;
  bool learning_guaranteed = false;  // k-scaled window product diverges
  bool converse_applies = false;     // k-scaled window product stays finite
  bool ergodic_by_bc = false;        // window-product series diverges
  bool empirical = false;            // classified numerically over a finite horizon

  std::string render_text() const {
    std::string s;
    s += "schedule verdict (B = " + std::to_string(b) + ")\n";
    s += "  k-scaled window product: ";
    s += to_string(limit_classification);
    s += "\n  window-product series:   ";
    s += to_string(bc_sum_classification);
    s += "\n";
    if (learning_guaranteed)
      s += "  learning guaranteed: the product k * prod(lambda over each window) diverges.\n";
    else
      s += "  learning not guaranteed by the sufficient condition.\n";
    if (converse_applies)
      s += "  converse applies: the k-scaled window product stays finite, so full-activation\n"
           "  windows occur only finitely often on general graphs of this window length.\n";
    if (ergodic_by_bc && !learning_guaranteed)
      s += "  the window-product series still diverges, so full-activation windows recur\n"
           "  and the weight chain mixes infinitely often.\n";
    if (empirical) s += "  (classified numerically over the given horizon)\n";
    return s;
  }

  std::string render_key_values() const {
    std::string s;
    s += "b = " + std::to_string(b) + "\n";
    s += std::string("limit_classification = ") + to_string(limit_classification) + "\n";
    s += std::string("bc_sum_classification = ") + to_string(bc_sum_classification) + "\n";
    s += std::string("learning_guaranteed = ") + (learning_guaranteed ? "true" : "false") + "\n";
    s += std::string("converse_applies = ") + (converse_applies ? "true" : "false") + "\n";
    s += std::string("ergodic_by_bc = ") + (ergodic_by_bc ? "true" : "false") + "\n";
    s += std::string("empirical = ") + (empirical ? "true" : "false") + "\n";
    return s;
  }
};

namespace detail {

/// Numeric fallback for table schedules: inspect k * prod(window lambda) and
/// the partial window-product sums at geometric checkpoints over the horizon.
inline ScheduleVerdict classify_empirically(const LambdaSchedule& lambda, int b,
                                            std::uint64_t windows) {
  ScheduleVerdict v;
  v.b = b;
  v.empirical = true;
  if (windows < 8) windows = 8;

  const std::uint64_t checkpoints[4] = {windows / 8, windows / 4, windows / 2, windows};
  double log_scaled[4] = {0, 0, 0, 0};
  double sum = 0.0;
  double last_term = 0.0;
  double tail = 0.0;  // sum over the last half of the horizon
  std::size_t cp = 0;
  for (std::uint64_t w = 1; w <= windows; ++w) {
    double log_prod = 0.0;
    for (std::uint64_t i = w * static_cast<std::uint64_t>(b);
         i < (w + 1) * static_cast<std::uint64_t>(b); ++i)
      log_prod += std::log(lambda.at(i));
    const double term = std::exp(log_prod);
    sum += term;
    last_term = term;
    if (w > windows / 2) tail += term;
    if (cp < 4 && w == checkpoints[cp]) {
      log_scaled[cp] = std::log(static_cast<double>(w)) + log_prod;
      ++cp;
    }
  }

  const bool growing = log_scaled[1] > log_scaled[0] + 1e-3 &&
                       log_scaled[2] > log_scaled[1] + 1e-3 &&
                       log_scaled[3] > log_scaled[2] + 1e-3;
  const bool shrinking = log_scaled[3] < log_scaled[2] - 1e-3 &&
                         log_scaled[2] < log_scaled[1] - 1e-3;
  if (growing)
    v.limit_classification = LimitClass::DivergesToInfinity;
  else if (shrinking && log_scaled[3] < std::log(1e-6))
    v.limit_classification = LimitClass::Zero;
  else
    v.limit_classification = LimitClass::FinitePositive;

  v.bc_sum_classification =
      (last_term < 1e-9 && tail < 1e-6) ? SumClass::Convergent : SumClass::Divergent;

  v.learning_guaranteed = v.limit_classification == LimitClass::DivergesToInfinity;
  v.converse_applies = !v.learning_guaranteed;
  v.ergodic_by_bc = v.bc_sum_classification == SumClass::Divergent;
  return v;
}

}  // namespace detail

/// Classifies a decay schedule against the learning condition for window
/// length b. Window products of a power law with exponent rho scale like
/// k^(-rho*b), so the k-scaled limit diverges iff rho*b < 1, is finite and
/// positive iff rho*b = 1 and vanishes otherwise; the window-product series
/// diverges iff rho*b <= 1. Constants always diverge. Exponents within 1e-9
/// of the boundary are treated as exactly on it.
inline ScheduleVerdict classify_schedule(const LambdaSchedule& lambda, int b) {
  if (b < 1) throw ConfigError("classify_schedule: B must be >= 1");
  ScheduleVerdict v;
  v.b = b;

  switch (lambda.kind()) {
    case LambdaSchedule::Kind::Table:
      return detail::classify_empirically(lambda, b,
                                          lambda.values().size() / static_cast<std::size_t>(b));
    case LambdaSchedule::Kind::Constant:
      v.limit_classification = LimitClass::DivergesToInfinity;
      v.bc_sum_classification = SumClass::Divergent;
      break;
    case LambdaSchedule::Kind::Power: {
      const double exponent = lambda.rho() * static_cast<double>(b);
      if (exponent < 1.0 - 1e-9)
        v.limit_classification = LimitClass::DivergesToInfinity;
      else if (exponent <= 1.0 + 1e-9)
        v.limit_classification = LimitClass::FinitePositive;
      else
        v.limit_classification = LimitClass::Zero;
      v.bc_sum_classification =
          exponent <= 1.0 + 1e-9 ? SumClass::Divergent : SumClass::Convergent;
      break;
    }
  }

  v.learning_guaranteed = v.limit_classification == LimitClass::DivergesToInfinity;
  v.converse_applies = !v.learning_guaranteed;
  v.ergodic_by_bc = v.bc_sum_classification == SumClass::Divergent;
  return v;
}

}  // namespace sll
