#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sll/errors.hpp"

namespace sll {

/// Probability vector over a finite outcome alphabet indexed 0..m-1.
/// Construction rejects any zero entry: the learning model assumes full
/// support everywhere, so a zero likelihood is a modelling error, not a
/// value to be smoothed over at runtime.
class CategoricalDistribution {
public:
  explicit CategoricalDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw ConfigError("distribution: empty probability vector");
    double sum = 0.0;
    for (double p : probs_) {
      if (!(p > 0.0)) throw ConfigError("distribution: entries must be strictly positive");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw ConfigError("distribution: entries must sum to 1 within 1e-12");
  }

  /// Two-outcome distribution with P(outcome 1) = p.
  static CategoricalDistribution bernoulli(double p) {
    return CategoricalDistribution({1.0 - p, p});
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t x) const { return probs_[x]; }
  const std::vector<double>& probs() const { return probs_; }

  double max_distance(const CategoricalDistribution& other) const {
    if (other.size() != size()) throw ConfigError("distribution: alphabet mismatch");
    double d = 0.0;
    for (std::size_t x = 0; x < size(); ++x) d = std::max(d, std::abs(probs_[x] - other[x]));
    return d;
  }

private:
  std::vector<double> probs_;
};

/// KL divergence sum_x p(x) ln(p(x)/q(x)), in nats.
inline double kl_divergence(const CategoricalDistribution& p, const CategoricalDistribution& q) {
  if (p.size() != q.size()) throw ConfigError("kl_divergence: alphabet mismatch");
  double d = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) d += p[x] * std::log(p[x] / q[x]);
  return d < 0.0 ? 0.0 : d;  // clamp the tiny negative round-off at p == q
}

/// Ordered list of hypothesis labels.
class HypothesisSet {
public:
  explicit HypothesisSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2) throw ConfigError("hypotheses: need at least two");
    auto sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ConfigError("hypotheses: labels must be unique");
  }

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t t) const { return labels_[t]; }
  const std::vector<std::string>& labels() const { return labels_; }

  std::size_t index_of(const std::string& label) const {
    for (std::size_t t = 0; t < labels_.size(); ++t)
      if (labels_[t] == label) return t;
    throw ConfigError("hypotheses: unknown label '" + label + "'");
  }

private:
  std::vector<std::string> labels_;
};

/// One agent: its true observation distribution and the parametrized family,
/// one distribution per hypothesis, all over the same alphabet.
struct AgentModel {
  CategoricalDistribution true_dist;
  std::vector<CategoricalDistribution> family;

  AgentModel(CategoricalDistribution truth, std::vector<CategoricalDistribution> fam)
      : true_dist(std::move(truth)), family(std::move(fam)) {
    if (family.empty()) throw ConfigError("agent: family must cover every hypothesis");
    for (const auto& d : family)
      if (d.size() != true_dist.size())
        throw ConfigError("agent: family and true distribution must share one alphabet");
  }
};

/// Which hypotheses minimize the group objective and each agent's local one.
struct IdentifiabilityReport {
  std::vector<std::size_t> global_opt;               // the optimal set
  std::vector<std::vector<std::size_t>> local_opts;  // per-agent optimal sets
  bool no_conflict = false;  // intersection nonempty and contains the global optimum
  bool conflicting = false;  // intersection empty
  std::vector<double> group_objective;  // summed KL per hypothesis
};

/// Computes the global and per-agent argmin sets of the summed KL objective.
/// Ties are resolved with an absolute tolerance: a hypothesis belongs to an
/// optimal set when its objective is within tol of the minimum.
inline IdentifiabilityReport optimal_sets(const std::vector<AgentModel>& scenario,
                                          double tol = 1e-12) {
  if (scenario.empty()) throw ConfigError("optimal_sets: empty scenario");
  if (tol < 0.0) throw ConfigError("optimal_sets: tol must be nonnegative");
  const std::size_t p = scenario.front().family.size();
  for (const auto& agent : scenario)
    if (agent.family.size() != p)
      throw ConfigError("optimal_sets: agents disagree on the hypothesis count");

  IdentifiabilityReport report;
  report.group_objective.assign(p, 0.0);
  report.local_opts.reserve(scenario.size());

  for (const auto& agent : scenario) {
    std::vector<double> kl(p);
    for (std::size_t t = 0; t < p; ++t) {
      kl[t] = kl_divergence(agent.true_dist, agent.family[t]);
      report.group_objective[t] += kl[t];
    }
    const double local_min = *std::min_element(kl.begin(), kl.end());
    std::vector<std::size_t> local;
    for (std::size_t t = 0; t < p; ++t)
      if (kl[t] <= local_min + tol) local.push_back(t);
    report.local_opts.push_back(std::move(local));
  }

  const double global_min =
      *std::min_element(report.group_objective.begin(), report.group_objective.end());
  for (std::size_t t = 0; t < p; ++t)
    if (report.group_objective[t] <= global_min + tol) report.global_opt.push_back(t);

  if (report.global_opt.size() == p)
    throw DegenerateScenarioError(
        "optimal_sets: every hypothesis minimizes the group objective; "
        "the scenario carries no information");

  // Intersection of the per-agent optimal sets.
  std::vector<std::size_t> intersection = report.local_opts.front();
  for (std::size_t i = 1; i < report.local_opts.size(); ++i) {
    std::vector<std::size_t> next;
    std::set_intersection(intersection.begin(), intersection.end(),
                          report.local_opts[i].begin(), report.local_opts[i].end(),
                          std::back_inserter(next));
    intersection = std::move(next);
  }

  report.conflicting = intersection.empty();
  report.no_conflict =
      !intersection.empty() &&
      std::includes(intersection.begin(), intersection.end(), report.global_opt.begin(),
                    report.global_opt.end());
  return report;
}

}  // namespace sll
