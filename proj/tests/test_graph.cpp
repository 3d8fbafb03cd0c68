#include <catch2/catch_amalgamated.hpp>

#include "generators.hpp"
#include "oracles.hpp"
#include "sll/graph.hpp"

using sll::EdgeSet;
using sll::GraphSchedule;
using sll::verify_b_connectivity;

namespace {

GraphSchedule sec6_schedule() {
  return GraphSchedule::periodic_active(EdgeSet::path(10), 3);
}

}  // namespace

TEST_CASE("edge sets drop self-loops and validate endpoints") {
  const EdgeSet e(3, {{0, 0}, {0, 1}, {1, 0}, {0, 1}});
  CHECK(e.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 0}});
  CHECK_THROWS_AS(EdgeSet(2, {{0, 2}}), sll::ConfigError);
  CHECK_THROWS_AS(EdgeSet(0, {}), sll::ConfigError);
}

TEST_CASE("periodic-active schedule activates every period steps") {
  const auto schedule = sec6_schedule();
  CHECK(schedule.edges_at(0) == EdgeSet::path(10));
  CHECK(schedule.edges_at(1).is_empty());
  CHECK(schedule.edges_at(2).is_empty());
  CHECK(schedule.edges_at(3) == EdgeSet::path(10));
  CHECK(schedule.edges_at(3000000000ULL) == EdgeSet::path(10));
}

TEST_CASE("static schedule returns the base graph at every step") {
  const auto schedule = GraphSchedule::static_graph(EdgeSet::complete(4));
  for (std::uint64_t k : {0ULL, 1ULL, 17ULL, 123456789ULL})
    CHECK(schedule.edges_at(k) == EdgeSet::complete(4));
}

TEST_CASE("section-VI schedule is 3-connected but not 2-connected") {
  const auto schedule = sec6_schedule();

  const auto ok = verify_b_connectivity(schedule, 3, 50);
  CHECK(ok.b == 3);
  CHECK_FALSE(ok.first_failing_window.has_value());
  CHECK(ok.windows_checked == 50);

  // Windows of length 2 cover steps {0,1}, {2,3}, {4,5}, ...; the third
  // window {4,5} contains no active step.
  const auto bad = verify_b_connectivity(schedule, 2, 50);
  CHECK_FALSE(bad.b.has_value());
  CHECK(bad.first_failing_window == 2);
}

TEST_CASE("never-connected schedule fails at window zero") {
  const auto schedule = GraphSchedule::static_graph(EdgeSet::empty(3));
  const auto cert = verify_b_connectivity(schedule, 4, 10);
  CHECK(cert.first_failing_window == 0);
  CHECK(cert.windows_checked == 1);
}

TEST_CASE("passing b implies passing every multiple of b") {
  sll::SplitMix64 rng(0x5eed1001);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(4));
    const std::uint64_t window = 1 + rng.next_below(3);
    const auto schedule = GraphSchedule::seeded_random(
        n, window, GraphSchedule::Family::Path, rng.next_u64());
    const int b = static_cast<int>(window);
    REQUIRE(verify_b_connectivity(schedule, b, 60).b == b);
    for (int mult : {2, 3}) {
      const auto cert = verify_b_connectivity(schedule, b * mult, 60 / mult);
      CHECK(cert.b == b * mult);
    }
  }
}

TEST_CASE("window unions are order-independent and idempotent") {
  sll::SplitMix64 rng(0x5eed1002);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(5));
    const auto a = gen::edge_set(rng, n);
    const auto b = gen::edge_set(rng, n);
    CHECK((a | b) == (b | a));
    CHECK((a | a) == a);
    CHECK(((a | b) | b) == (a | b));
  }
}

TEST_CASE("strong connectivity agrees with the transitive-closure oracle") {
  sll::SplitMix64 rng(0x5eed1003);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(6));
    const auto g = gen::edge_set(rng, n, 0.15 + 0.5 * rng.next_double());
    CHECK(sll::strongly_connected(g) == oracles::transitive_closure_strongly_connected(g));
  }
}

TEST_CASE("seeded-random schedules are deterministic and window-connected") {
  const auto schedule =
      GraphSchedule::seeded_random(5, 4, GraphSchedule::Family::Ring, 42);
  const auto again =
      GraphSchedule::seeded_random(5, 4, GraphSchedule::Family::Ring, 42);
  for (std::uint64_t k = 0; k < 100; ++k) CHECK(schedule.edges_at(k) == again.edges_at(k));

  const auto cert = verify_b_connectivity(schedule, 4, 100);
  CHECK(cert.b == 4);

  const auto other = GraphSchedule::seeded_random(5, 4, GraphSchedule::Family::Ring, 43);
  bool differs = false;
  for (std::uint64_t k = 0; k < 100 && !differs; ++k)
    differs = !(schedule.edges_at(k) == other.edges_at(k));
  CHECK(differs);
}

TEST_CASE("table schedules cycle through their entries") {
  const auto schedule = GraphSchedule::table({EdgeSet::ring(3), EdgeSet::empty(3)});
  CHECK(schedule.edges_at(0) == EdgeSet::ring(3));
  CHECK(schedule.edges_at(1).is_empty());
  CHECK(schedule.edges_at(2) == EdgeSet::ring(3));
  CHECK(schedule.natural_b() == 2);
}
