#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "sll/errors.hpp"
#include "sll/hypothesis.hpp"
#include "sll/matrix.hpp"
#include "sll/rng.hpp"
#include "sll/weights.hpp"

namespace sll {

inline constexpr double kStochasticTol = 1e-9;

/// Per-agent beliefs over the hypothesis set, kept as natural logs. All
/// arithmetic stays in the log domain; probability-domain beliefs underflow
/// after a few thousand informative observations at realistic KL gaps.
struct BeliefState {
  Matrix log_beliefs;  // n x p
  std::uint64_t k = 0;

  static BeliefState uniform(std::size_t n, std::size_t p) {
    BeliefState s;
    s.log_beliefs = Matrix(n, p, -std::log(static_cast<double>(p)));
    return s;
  }

  static BeliefState from_priors(const std::vector<CategoricalDistribution>& priors) {
    BeliefState s;
    s.log_beliefs = Matrix(priors.size(), priors.front().size());
    for (std::size_t i = 0; i < priors.size(); ++i) {
      if (priors[i].size() != priors.front().size())
        throw ConfigError("priors: agents disagree on the hypothesis count");
      for (std::size_t t = 0; t < priors[i].size(); ++t)
        s.log_beliefs(i, t) = std::log(priors[i][t]);
    }
    return s;
  }

  std::size_t agents() const { return log_beliefs.rows(); }
  std::size_t hypotheses() const { return log_beliefs.cols(); }
  double belief(std::size_t agent, std::size_t theta) const {
    return std::exp(log_beliefs(agent, theta));
  }
};

/// Max-shifted log-sum-exp of one row; subtracting it renormalizes the row.
inline double log_normalizer(const Matrix& m, std::size_t row) {
  double mx = m(row, 0);
  for (std::size_t t = 1; t < m.cols(); ++t) mx = std::max(mx, m(row, t));
  double s = 0.0;
  for (std::size_t t = 0; t < m.cols(); ++t) s += std::exp(m(row, t) - mx);
  return mx + std::log(s);
}

/// Push-sum mass weights; all ones at k = 0. Under column-stochastic mixing
/// the total mass stays equal to the agent count.
struct PushSumState {
  std::vector<double> y;

  static PushSumState ones(std::size_t n) { return PushSumState{std::vector<double>(n, 1.0)}; }
};

/// Independent per-agent observation substreams. Substream i is seeded with
/// mix64(seed XOR i); sampling is inverse-CDF over the agent's true
/// distribution, so identical seeds and scenarios replay identical sequences
/// on every platform.
class ObservationStream {
public:
  ObservationStream(std::uint64_t seed, const std::vector<AgentModel>& agents) : seed_(seed) {
    streams_.reserve(agents.size());
    for (std::size_t i = 0; i < agents.size(); ++i) {
      streams_.emplace_back(mix64(seed ^ static_cast<std::uint64_t>(i)));
      dists_.push_back(agents[i].true_dist);
    }
  }

  std::uint64_t seed() const { return seed_; }
  std::size_t agents() const { return streams_.size(); }

  /// One outcome index per agent.
  std::vector<std::size_t> next() {
    std::vector<std::size_t> out(streams_.size());
    for (std::size_t i = 0; i < streams_.size(); ++i) {
      const double u = streams_[i].next_double();
      double cum = 0.0;
      std::size_t x = dists_[i].size() - 1;
      for (std::size_t c = 0; c < dists_[i].size(); ++c) {
        cum += dists_[i][c];
        if (u < cum) {
          x = c;
          break;
        }
      }
      out[i] = x;
    }
    return out;
  }

private:
  std::uint64_t seed_;
  std::vector<SplitMix64> streams_;
  std::vector<CategoricalDistribution> dists_;
};

/// One step of the log-linear rule: each agent takes the T_k-weighted mean of
/// the neighbors' log-beliefs, adds its own log-likelihood for the fresh
/// observation, and renormalizes.
inline BeliefState log_linear_step(const BeliefState& state, const WeightMatrix& t,
                                   const std::vector<std::size_t>& observations,
                                   const std::vector<AgentModel>& models) {
  const std::size_t n = state.agents();
  const std::size_t p = state.hypotheses();
  if (!is_row_stochastic(t.values, kStochasticTol))
    throw ContractViolation("log_linear_step: weight matrix is not row-stochastic");
  if (t.values.rows() != n || observations.size() != n || models.size() != n)
    throw ConfigError("log_linear_step: agent count mismatch");

  BeliefState next;
  next.k = state.k + 1;
  next.log_beliefs = Matrix(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t theta = 0; theta < p; ++theta) {
      double mixed = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        mixed += t.values(i, j) * state.log_beliefs(j, theta);
      next.log_beliefs(i, theta) = mixed + std::log(models[i].family[theta][observations[i]]);
    }
    const double z = log_normalizer(next.log_beliefs, i);
    for (std::size_t theta = 0; theta < p; ++theta) next.log_beliefs(i, theta) -= z;
  }
  return next;
}

/// One step of the push-sum variant for column-stochastic weights: mass
/// weights mix as y' = T y and the log-belief aggregate is scaled by 1/y'_i
/// before renormalization. With doubly stochastic T and unit y this reduces
/// to the plain log-linear step.
inline std::pair<BeliefState, PushSumState> push_sum_step(
    const BeliefState& state, const PushSumState& mass, const WeightMatrix& t,
    const std::vector<std::size_t>& observations, const std::vector<AgentModel>& models) {
  const std::size_t n = state.agents();
  const std::size_t p = state.hypotheses();
  if (!is_column_stochastic(t.values, kStochasticTol))
    throw ContractViolation("push_sum_step: weight matrix is not column-stochastic");
  if (t.values.rows() != n || observations.size() != n || models.size() != n ||
      mass.y.size() != n)
    throw ConfigError("push_sum_step: agent count mismatch");

  PushSumState next_mass;
  next_mass.y.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) next_mass.y[i] += t.values(i, j) * mass.y[j];
    if (!(next_mass.y[i] > 0.0))
      throw ContractViolation("push_sum_step: push-sum mass became non-positive");
  }

  BeliefState next;
  next.k = state.k + 1;
  next.log_beliefs = Matrix(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t theta = 0; theta < p; ++theta) {
      double mixed = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        mixed += t.values(i, j) * mass.y[j] * state.log_beliefs(j, theta);
      next.log_beliefs(i, theta) =
          (mixed + std::log(models[i].family[theta][observations[i]])) / next_mass.y[i];
    }
    const double z = log_normalizer(next.log_beliefs, i);
    for (std::size_t theta = 0; theta < p; ++theta) next.log_beliefs(i, theta) -= z;
  }
  return {std::move(next), std::move(next_mass)};
}

}  // namespace sll
