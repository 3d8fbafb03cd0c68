#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "oracles.hpp"
#include "sll/weights.hpp"

using sll::build_weight_matrix;
using sll::classify_schedule;
using sll::EdgeSet;
using sll::LambdaSchedule;
using sll::LimitClass;
using sll::SumClass;
using sll::WeightPolicy;

namespace {

const WeightPolicy kRow{WeightPolicy::Kind::RowStochastic};
const WeightPolicy kColumn{WeightPolicy::Kind::ColumnStochastic};

}  // namespace

TEST_CASE("empty edge set yields the identity") {
  const auto t = build_weight_matrix(EdgeSet::empty(4), 0.7, kRow);
  CHECK(t.values == sll::Matrix::identity(4));
}

TEST_CASE("two-node complete graph with lambda one half") {
  const auto t = build_weight_matrix(EdgeSet::complete(2), 0.5, kRow);
  CHECK(t.values(0, 0) == 0.75);
  CHECK(t.values(0, 1) == 0.25);
  CHECK(t.values(1, 0) == 0.25);
  CHECK(t.values(1, 1) == 0.75);
}

TEST_CASE("three-node path rows split over the closed in-neighborhood") {
  const auto t = build_weight_matrix(EdgeSet::path(3), 0.5, kRow);
  CHECK_THAT(t.values(0, 0), Catch::Matchers::WithinAbs(0.75, 1e-15));
  CHECK_THAT(t.values(0, 1), Catch::Matchers::WithinAbs(0.25, 1e-15));
  CHECK(t.values(0, 2) == 0.0);
  CHECK_THAT(t.values(1, 0), Catch::Matchers::WithinAbs(1.0 / 6.0, 1e-15));
  CHECK_THAT(t.values(1, 1), Catch::Matchers::WithinAbs(4.0 / 6.0, 1e-15));
  CHECK_THAT(t.values(1, 2), Catch::Matchers::WithinAbs(1.0 / 6.0, 1e-15));
  CHECK(t.values(2, 0) == 0.0);
  CHECK_THAT(t.values(2, 1), Catch::Matchers::WithinAbs(0.25, 1e-15));
}

TEST_CASE("lambda outside its range is rejected") {
  CHECK_THROWS_AS(build_weight_matrix(EdgeSet::path(3), 0.0, kRow), sll::ConfigError);
  CHECK_THROWS_AS(build_weight_matrix(EdgeSet::path(3), -0.5, kRow), sll::ConfigError);
  CHECK_THROWS_AS(build_weight_matrix(EdgeSet::path(3), 1.5, kRow), sll::ConfigError);
  // Schedules like 1/k start at exactly 1; the builder accepts it and the
  // step degenerates to pure averaging.
  CHECK_NOTHROW(build_weight_matrix(EdgeSet::path(3), 1.0, kRow));
}

TEST_CASE("column policy splits sender mass over out-neighborhoods") {
  // Single directed edge 1 -> 0: sender 1 splits between itself and node 0.
  const EdgeSet e(2, {{1, 0}});
  const auto t = build_weight_matrix(e, 1.0, kColumn);
  CHECK(t.values(0, 0) == 1.0);
  CHECK(t.values(0, 1) == 0.5);
  CHECK(t.values(1, 0) == 0.0);
  CHECK(t.values(1, 1) == 0.5);
  CHECK(sll::is_column_stochastic(t.values, 1e-15));
}

TEST_CASE("weight matrices satisfy the structural bounds") {
  sll::SplitMix64 rng(0x5eed2001);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(6));
    const auto edges = gen::edge_set(rng, n);
    const double lambda = 0.01 + 0.99 * rng.next_double();
    const bool row = rng.next_double() < 0.5;
    const auto t = build_weight_matrix(edges, lambda, row ? kRow : kColumn);

    if (row)
      CHECK(sll::is_row_stochastic(t.values, 1e-12));
    else
      CHECK(sll::is_column_stochastic(t.values, 1e-12));

    // Sparsity pattern is exactly the edge set plus the diagonal, with the
    // receiver/sender bounds from the equal split.
    for (int i = 0; i < n; ++i) {
      double off_diag = 0.0;
      for (int j = 0; j < n; ++j) {
        const double v = row ? t.values(i, j) : t.values(j, i);
        const bool edge = std::find(edges.edges.begin(), edges.edges.end(),
                                    row ? std::make_pair(j, i)
                                        : std::make_pair(i, j)) != edges.edges.end();
        if (i == j) {
          CHECK(v >= 1.0 - lambda - 1e-15);
        } else if (edge) {
          CHECK(v >= lambda / n - 1e-15);
          off_diag += v;
        } else {
          CHECK(v == 0.0);
        }
      }
      CHECK(off_diag <= lambda + 1e-12);
    }
  }
}

TEST_CASE("decomposition round-trip recovers a stochastic mixing matrix") {
  sll::SplitMix64 rng(0x5eed2002);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(6));
    const auto edges = gen::edge_set(rng, n);
    const double lambda = 0.05 + 0.9 * rng.next_double();
    const bool row = rng.next_double() < 0.5;
    const auto t = build_weight_matrix(edges, lambda, row ? kRow : kColumn);

    sll::Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        a(i, j) = (t.values(i, j) - (i == j ? 1.0 - lambda : 0.0)) / lambda;

    CHECK((row ? sll::is_row_stochastic(a, 1e-9) : sll::is_column_stochastic(a, 1e-9)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (std::abs(a(i, j)) > 1e-9) CHECK(a(i, j) >= 1.0 / n - 1e-9);
  }
}

TEST_CASE("lambda schedules validate their parameters") {
  CHECK_THROWS_AS(LambdaSchedule::constant(1.0), sll::ConfigError);
  CHECK_THROWS_AS(LambdaSchedule::constant(0.0), sll::ConfigError);
  CHECK_THROWS_AS(LambdaSchedule::power(1.0, 0.0), sll::ConfigError);
  CHECK_THROWS_AS(LambdaSchedule::power(0.5, -1.0), sll::ConfigError);
  CHECK_THROWS_AS(LambdaSchedule::table({0.5, 1.0}), sll::ConfigError);
  CHECK_THROWS_AS(LambdaSchedule::table({}), sll::ConfigError);

  const auto power = LambdaSchedule::power(1.0, 1.0 / 3.0);
  CHECK(power.at(0) == 1.0);
  CHECK_THAT(power.at(7), Catch::Matchers::WithinAbs(std::pow(8.0, -1.0 / 3.0), 1e-15));

  const auto table = LambdaSchedule::table({0.5, 0.25});
  CHECK(table.at(0) == 0.5);
  CHECK(table.at(1) == 0.25);
  CHECK(table.at(100) == 0.25);  // repeats the last value
}

TEST_CASE("schedule classification follows the analytic rule") {
  SECTION("constant always learns") {
    const auto v = classify_schedule(LambdaSchedule::constant(0.5), 3);
    CHECK(v.limit_classification == LimitClass::DivergesToInfinity);
    CHECK(v.learning_guaranteed);
    CHECK_FALSE(v.converse_applies);
    CHECK(v.ergodic_by_bc);
  }
  SECTION("1/k at window 1 sits exactly on the boundary") {
    const auto v = classify_schedule(LambdaSchedule::power(1.0, 1.0), 1);
    CHECK(v.limit_classification == LimitClass::FinitePositive);
    CHECK_FALSE(v.learning_guaranteed);
    CHECK(v.converse_applies);
    CHECK(v.bc_sum_classification == SumClass::Divergent);
    CHECK(v.ergodic_by_bc);
  }
  SECTION("1/k at window 3 vanishes and the series converges") {
    const auto v = classify_schedule(LambdaSchedule::power(1.0, 1.0), 3);
    CHECK(v.limit_classification == LimitClass::Zero);
    CHECK(v.converse_applies);
    CHECK(v.bc_sum_classification == SumClass::Convergent);
    CHECK_FALSE(v.ergodic_by_bc);
  }
  SECTION("k^(-1/3) at window 3: boundary limit but divergent series") {
    const auto v = classify_schedule(LambdaSchedule::power(1.0, 1.0 / 3.0), 3);
    CHECK(v.limit_classification == LimitClass::FinitePositive);
    CHECK_FALSE(v.learning_guaranteed);
    CHECK(v.converse_applies);
    CHECK(v.bc_sum_classification == SumClass::Divergent);
    CHECK(v.ergodic_by_bc);
  }
  SECTION("learning implies a divergent series on a parameter sweep") {
    sll::SplitMix64 rng(0x5eed2003);
    for (int trial = 0; trial < 200; ++trial) {
      const double rho = 2.0 * rng.next_double();
      const int b = 1 + static_cast<int>(rng.next_below(4));
      const auto v = classify_schedule(LambdaSchedule::power(0.9, rho), b);
      if (v.learning_guaranteed) CHECK(v.ergodic_by_bc);
      CHECK(v.learning_guaranteed != v.converse_applies);
    }
  }
}

TEST_CASE("classification agrees with the numerical oracle") {
  for (const double rho : {0.0, 1.0 / 3.0, 0.5, 1.0, 2.0}) {
    for (const int b : {1, 2, 3}) {
      const auto lambda =
          rho == 0.0 ? LambdaSchedule::constant(0.5) : LambdaSchedule::power(1.0, rho);
      const auto verdict = classify_schedule(lambda, b);
      const auto oracle = oracles::numerical_classify(lambda, b);
      INFO("rho=" << rho << " b=" << b);
      CHECK(verdict.limit_classification == oracle.limit);
      CHECK(verdict.bc_sum_classification == oracle.bc_sum);
    }
  }
}

TEST_CASE("table schedules are classified empirically") {
  std::vector<double> values;
  for (int k = 0; k < 50000; ++k) values.push_back(0.5);
  const auto v = classify_schedule(LambdaSchedule::table(values), 2);
  CHECK(v.empirical);
  CHECK(v.limit_classification == LimitClass::DivergesToInfinity);
  CHECK(v.bc_sum_classification == SumClass::Divergent);
}

TEST_CASE("verdict rendering carries the machine-readable block") {
  const auto v = classify_schedule(LambdaSchedule::power(1.0, 1.0 / 3.0), 3);
  const std::string text = v.render_text();
  const std::string kv = v.render_key_values();
  CHECK(text.find("finite-positive") != std::string::npos);
  CHECK(kv.find("learning_guaranteed = false") != std::string::npos);
  CHECK(kv.find("ergodic_by_bc = true") != std::string::npos);
  CHECK(kv.find("b = 3") != std::string::npos);
}
