#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sll/beliefs.hpp"
#include "sll/errors.hpp"
#include "sll/graph.hpp"
#include "sll/hypothesis.hpp"
#include "sll/weights.hpp"

namespace sll {

/// Snapshot cadence. Geometric spacing (default ratio 1.2) keeps the output
/// bounded on long runs while resolving the early transient, matching a
/// log-scale iteration axis. Step 0 and the final step are always recorded.
struct RecordSpec {
  enum class Kind { Every, Geometric };
  Kind kind = Kind::Geometric;
  std::uint64_t every = 1;
  double ratio = 1.2;

  static RecordSpec every_n(std::uint64_t n) {
    if (n == 0) throw ConfigError("record-every: interval must be positive");
    return RecordSpec{Kind::Every, n, 0.0};
  }

  static RecordSpec geometric(double ratio = 1.2) {
    if (!(ratio > 1.0)) throw ConfigError("record-every: geometric ratio must exceed 1");
    return RecordSpec{Kind::Geometric, 1, ratio};
  }

  /// Accepts an integer interval or "geometric:RATIO".
  static RecordSpec parse(const std::string& text) {
    if (text.rfind("geometric:", 0) == 0) {
      char* end = nullptr;
      const double r = std::strtod(text.c_str() + 10, &end);
      if (end == nullptr || *end != '\0')
        throw ConfigError("record-every: malformed ratio in '" + text + "'");
      return geometric(r);
    }
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (end == nullptr || *end != '\0' || text.empty())
      throw ConfigError("record-every: expected integer or geometric:RATIO, got '" + text + "'");
    return every_n(v);
  }

  std::uint64_t next_after(std::uint64_t k) const {
    if (kind == Kind::Every) return k + every;
    const double scaled = static_cast<double>(k) * ratio;
    const std::uint64_t jump = static_cast<std::uint64_t>(scaled);
    return jump > k ? jump : k + 1;
  }

  std::string describe() const {
    if (kind == Kind::Every) return std::to_string(every);
    return "geometric:" + std::to_string(ratio);
  }
};

struct Snapshot {
  std::uint64_t k = 0;
  Matrix log_beliefs;     // n x p
  std::vector<double> y;  // push-sum mass; empty for the log-linear rule

  double belief(std::size_t agent, std::size_t theta) const {
    return std::exp(log_beliefs(agent, theta));
  }
};

enum class UpdateRule { LogLinear, PushSum };

struct SimulationSpec {
  std::vector<AgentModel> agents;
  HypothesisSet hypotheses;
  GraphSchedule graph;
  LambdaSchedule lambda;
  WeightPolicy policy;
  UpdateRule rule = UpdateRule::LogLinear;
  std::uint64_t horizon = 1;
  std::uint64_t seed = 0;
  RecordSpec record;
  std::optional<std::vector<CategoricalDistribution>> priors;  // default uniform
};

using SnapshotSink = std::function<void(const Snapshot&)>;
using StepObserver = std::function<void(const WeightMatrix&)>;

namespace detail {

inline void validate_spec(const SimulationSpec& spec) {
  if (spec.agents.empty()) throw ConfigError("simulation: no agents");
  if (spec.horizon < 1) throw ConfigError("simulation: horizon must be >= 1");
  const std::size_t p = spec.hypotheses.size();
  for (const auto& agent : spec.agents)
    if (agent.family.size() != p)
      throw ConfigError("simulation: agent family does not cover the hypothesis set");
  if (static_cast<int>(spec.agents.size()) != spec.graph.n())
    throw ConfigError("simulation: graph and scenario disagree on the agent count");
  if (spec.rule == UpdateRule::PushSum && spec.policy.row())
    throw ConfigError("simulation: push-sum requires the column-stochastic policy");
  if (spec.rule == UpdateRule::LogLinear && !spec.policy.row())
    throw ConfigError("simulation: log-linear requires the row-stochastic policy");
  if (spec.priors) {
    if (spec.priors->size() != spec.agents.size())
      throw ConfigError("simulation: prior count differs from agent count");
    for (const auto& prior : *spec.priors)
      if (prior.size() != p) throw ConfigError("simulation: prior size differs from |Theta|");
  }
}

}  // namespace detail

/// Runs the belief dynamics for spec.horizon steps, invoking sink at the
/// recording cadence (always at k = 0 and the horizon) and observe, when
/// given, with every weight matrix as it is produced. Sequential by design;
/// distinct runs are independent and may execute concurrently.
inline void run_simulation(const SimulationSpec& spec, const SnapshotSink& sink,
                           const StepObserver& observe = {}) {
  detail::validate_spec(spec);
  const std::size_t n = spec.agents.size();
  const std::size_t p = spec.hypotheses.size();

  BeliefState state =
      spec.priors ? BeliefState::from_priors(*spec.priors) : BeliefState::uniform(n, p);
  PushSumState mass = PushSumState::ones(n);
  ObservationStream observations(spec.seed, spec.agents);

  auto emit = [&](const BeliefState& s) {
    Snapshot snap;
    snap.k = s.k;
    snap.log_beliefs = s.log_beliefs;
    if (spec.rule == UpdateRule::PushSum) snap.y = mass.y;
    if (sink) sink(snap);
  };

  emit(state);
  std::uint64_t next_record = spec.record.next_after(0);
  for (std::uint64_t k = 0; k < spec.horizon; ++k) {
    const EdgeSet edges = spec.graph.edges_at(k);
    const double lambda_k = spec.lambda.at(k);
    WeightMatrix t = build_weight_matrix(edges, lambda_k, spec.policy, k);
    if (observe) observe(t);
    const std::vector<std::size_t> x = observations.next();
    if (spec.rule == UpdateRule::LogLinear) {
      state = log_linear_step(state, t, x, spec.agents);
    } else {
      auto [next_state, next_mass] = push_sum_step(state, mass, t, x, spec.agents);
      state = std::move(next_state);
      mass = std::move(next_mass);
    }
    if (state.k >= next_record || state.k == spec.horizon) {
      emit(state);
      while (next_record <= state.k) next_record = spec.record.next_after(next_record);
    }
  }
}

inline std::vector<Snapshot> run_simulation(const SimulationSpec& spec) {
  std::vector<Snapshot> trajectory;
  run_simulation(spec, [&](const Snapshot& s) { trajectory.push_back(s); });
  return trajectory;
}

}  // namespace sll
