#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "oracles.hpp"
#include "sll/hypothesis.hpp"

using sll::AgentModel;
using sll::CategoricalDistribution;
using sll::kl_divergence;
using sll::optimal_sets;

namespace {

// The section-VI models: one informative agent plus uninformative ones whose
// truth sits symmetrically between the two candidate distributions.
AgentModel informative_agent() {
  return AgentModel(CategoricalDistribution::bernoulli(0.7),
                    {CategoricalDistribution::bernoulli(0.2),
                     CategoricalDistribution::bernoulli(0.8)});
}

AgentModel uninformative_agent() {
  return AgentModel(CategoricalDistribution::bernoulli(0.5),
                    {CategoricalDistribution::bernoulli(0.2),
                     CategoricalDistribution::bernoulli(0.8)});
}

}  // namespace

TEST_CASE("categorical distribution validates full support and normalization") {
  CHECK_NOTHROW(CategoricalDistribution({0.25, 0.25, 0.5}));
  CHECK_THROWS_AS(CategoricalDistribution({0.5, 0.5, 0.0}), sll::ConfigError);
  CHECK_THROWS_AS(CategoricalDistribution({0.7, 0.2}), sll::ConfigError);
  CHECK_THROWS_AS(CategoricalDistribution({-0.1, 1.1}), sll::ConfigError);
  CHECK_THROWS_AS(CategoricalDistribution({}), sll::ConfigError);
}

TEST_CASE("kl divergence matches the closed form") {
  const auto b7 = CategoricalDistribution::bernoulli(0.7);
  const auto b8 = CategoricalDistribution::bernoulli(0.8);
  const auto b2 = CategoricalDistribution::bernoulli(0.2);

  CHECK(kl_divergence(b7, b7) == 0.0);
  // 0.7*ln(0.7/0.8) + 0.3*ln(0.3/0.2), evaluated independently.
  CHECK_THAT(kl_divergence(b7, b8),
             Catch::Matchers::WithinAbs(0.028167557595283554, 1e-15));
  CHECK_THAT(kl_divergence(b7, b2),
             Catch::Matchers::WithinAbs(0.5826853020432394, 1e-15));

  CHECK_THROWS_AS(kl_divergence(b7, CategoricalDistribution({0.2, 0.3, 0.5})),
                  sll::ConfigError);
}

TEST_CASE("kl divergence is nonnegative and vanishes only at equality") {
  sll::SplitMix64 rng(0x5eed0001);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 2 + rng.next_below(5);
    const auto p = gen::distribution(rng, m);
    const auto q = gen::distribution(rng, m);
    const double d = kl_divergence(p, q);
    CHECK(d >= 0.0);
    if (p.max_distance(q) < 1e-12) CHECK(d < 1e-12);
    CHECK(kl_divergence(p, p) < 1e-15);
    if (p.max_distance(q) > 1e-6) CHECK(d > 0.0);
  }
}

TEST_CASE("optimal sets identify the informative minimizer") {
  std::vector<AgentModel> scenario{informative_agent()};
  for (int i = 0; i < 9; ++i) scenario.push_back(uninformative_agent());

  const auto report = optimal_sets(scenario);
  CHECK(report.global_opt == std::vector<std::size_t>{1});
  CHECK(report.local_opts[0] == std::vector<std::size_t>{1});
  for (int i = 1; i < 10; ++i)
    CHECK(report.local_opts[i] == std::vector<std::size_t>{0, 1});  // both tie
  CHECK(report.no_conflict);
  CHECK_FALSE(report.conflicting);
}

TEST_CASE("single agent with the truth in its family") {
  std::vector<AgentModel> scenario{
      AgentModel(CategoricalDistribution::bernoulli(0.8),
                 {CategoricalDistribution::bernoulli(0.2),
                  CategoricalDistribution::bernoulli(0.8)})};
  const auto report = optimal_sets(scenario);
  CHECK(report.global_opt == std::vector<std::size_t>{1});
  CHECK(report.local_opts[0] == std::vector<std::size_t>{1});
  CHECK(report.group_objective[1] == 0.0);
}

TEST_CASE("conflicting two-agent scenario") {
  // Agent 1 locally prefers hypothesis 0, agent 2 hypothesis 1; the summed
  // objective still selects hypothesis 1. Sums verified against the
  // closed-form Bernoulli KL.
  std::vector<AgentModel> scenario{
      AgentModel(CategoricalDistribution::bernoulli(0.5),
                 {CategoricalDistribution::bernoulli(0.3),
                  CategoricalDistribution::bernoulli(0.9)}),
      AgentModel(CategoricalDistribution::bernoulli(0.8),
                 {CategoricalDistribution::bernoulli(0.3),
                  CategoricalDistribution::bernoulli(0.8)})};

  const auto report = optimal_sets(scenario);
  CHECK(report.global_opt == std::vector<std::size_t>{1});
  CHECK(report.local_opts[0] == std::vector<std::size_t>{0});
  CHECK(report.local_opts[1] == std::vector<std::size_t>{1});
  CHECK(report.conflicting);
  CHECK_FALSE(report.no_conflict);

  const double sum0 = oracles::bernoulli_kl(0.5, 0.3) + oracles::bernoulli_kl(0.8, 0.3);
  const double sum1 = oracles::bernoulli_kl(0.5, 0.9) + oracles::bernoulli_kl(0.8, 0.8);
  CHECK_THAT(report.group_objective[0], Catch::Matchers::WithinAbs(sum0, 1e-15));
  CHECK_THAT(report.group_objective[1], Catch::Matchers::WithinAbs(sum1, 1e-15));
}

TEST_CASE("degenerate scenarios are rejected") {
  std::vector<AgentModel> scenario{uninformative_agent(), uninformative_agent()};
  CHECK_THROWS_AS(optimal_sets(scenario), sll::DegenerateScenarioError);
  CHECK_THROWS_AS(optimal_sets({}), sll::ConfigError);
}

TEST_CASE("optimal sets are equivariant under relabeling") {
  sll::SplitMix64 rng(0x5eed0002);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.next_below(3);
    const std::size_t p = 2 + rng.next_below(2);
    auto scenario = gen::scenario(rng, n, 3, p);

    sll::IdentifiabilityReport base;
    try {
      base = optimal_sets(scenario);
    } catch (const sll::DegenerateScenarioError&) {
      continue;
    }

    // Agent permutation: reverse order.
    auto reversed = scenario;
    std::reverse(reversed.begin(), reversed.end());
    const auto rev_report = optimal_sets(reversed);
    CHECK(rev_report.global_opt == base.global_opt);
    CHECK(rev_report.no_conflict == base.no_conflict);
    CHECK(rev_report.conflicting == base.conflicting);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(rev_report.local_opts[i] == base.local_opts[n - 1 - i]);

    // Hypothesis permutation: rotate the families by one.
    std::vector<AgentModel> rotated;
    for (const auto& agent : scenario) {
      auto family = agent.family;
      std::rotate(family.begin(), family.begin() + 1, family.end());
      rotated.emplace_back(agent.true_dist, std::move(family));
    }
    const auto rot_report = optimal_sets(rotated);
    auto unrotate = [&](std::vector<std::size_t> v) {
      for (auto& t : v) t = (t + 1) % p;
      std::sort(v.begin(), v.end());
      return v;
    };
    CHECK(unrotate(rot_report.global_opt) == base.global_opt);
  }
}

TEST_CASE("no-conflict scenarios have a strict local KL gap") {
  sll::SplitMix64 rng(0x5eed0003);
  int checked = 0;
  for (int trial = 0; trial < 2000 && checked < 200; ++trial) {
    auto scenario = gen::scenario(rng, 1 + rng.next_below(4), 3, 2 + rng.next_below(2));
    sll::IdentifiabilityReport report;
    try {
      report = optimal_sets(scenario);
    } catch (const sll::DegenerateScenarioError&) {
      continue;
    }
    if (!report.no_conflict) continue;
    ++checked;
    for (std::size_t i = 0; i < scenario.size(); ++i) {
      for (std::size_t star : report.global_opt) {
        for (std::size_t t = 0; t < scenario[i].family.size(); ++t) {
          const bool t_local = std::find(report.local_opts[i].begin(),
                                         report.local_opts[i].end(),
                                         t) != report.local_opts[i].end();
          if (t_local) continue;
          CHECK(kl_divergence(scenario[i].true_dist, scenario[i].family[t]) >
                kl_divergence(scenario[i].true_dist, scenario[i].family[star]));
        }
      }
    }
  }
  CHECK(checked >= 100);
}
