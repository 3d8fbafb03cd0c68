#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sll/errors.hpp"
#include "sll/rng.hpp"

namespace sll {

/// Directed edge set at one time step. An edge (j, i) means agent j can send
/// to agent i. Self-loops are implicit: every agent always hears itself, so
/// they are dropped at construction and never stored.
struct EdgeSet {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // (from, to), sorted, deduplicated

  EdgeSet() = default;
  EdgeSet(int agent_count, std::vector<std::pair<int, int>> raw) : n(agent_count) {
    if (n <= 0) throw ConfigError("edge set: agent count must be positive");
    for (auto [f, t] : raw) {
      if (f < 0 || f >= n || t < 0 || t >= n)
        throw ConfigError("edge set: endpoint out of range");
      if (f != t) edges.emplace_back(f, t);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }

  static EdgeSet empty(int n) { return EdgeSet(n, {}); }

  /// Undirected path 0-1-...-n-1, stored as both directions of each edge.
  static EdgeSet path(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) {
      e.emplace_back(i, i + 1);
      e.emplace_back(i + 1, i);
    }
    return EdgeSet(n, std::move(e));
  }

  /// Directed cycle 0 -> 1 -> ... -> n-1 -> 0.
  static EdgeSet ring(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return EdgeSet(n, std::move(e));
  }

  static EdgeSet complete(int n) {
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) e.emplace_back(i, j);
    return EdgeSet(n, std::move(e));
  }

  bool is_empty() const { return edges.empty(); }

  std::vector<std::vector<int>> in_neighbors() const {
    std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(n));
    for (auto [f, t] : edges) nbrs[static_cast<std::size_t>(t)].push_back(f);
    return nbrs;
  }

  std::vector<std::vector<int>> out_neighbors() const {
    std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(n));
    for (auto [f, t] : edges) nbrs[static_cast<std::size_t>(f)].push_back(t);
    return nbrs;
  }

  friend EdgeSet operator|(const EdgeSet& a, const EdgeSet& b) {
    if (a.n != b.n) throw ConfigError("edge set union: agent counts differ");
    std::vector<std::pair<int, int>> merged = a.edges;
    merged.insert(merged.end(), b.edges.begin(), b.edges.end());
    return EdgeSet(a.n, std::move(merged));
  }

  friend bool operator==(const EdgeSet& a, const EdgeSet& b) {
    return a.n == b.n && a.edges == b.edges;
  }
};

/// Strong connectivity via forward and backward reachability from node 0
/// (with implicit self-loops, a single node is strongly connected).
inline bool strongly_connected(const EdgeSet& g) {
  const int n = g.n;
  if (n == 1) return true;
  auto reach = [&](bool forward) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (auto [f, t] : g.edges)
      forward ? adj[static_cast<std::size_t>(f)].push_back(t)
              : adj[static_cast<std::size_t>(t)].push_back(f);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[static_cast<std::size_t>(v)])
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          stack.push_back(w);
        }
    }
    return std::count(seen.begin(), seen.end(), char(1)) == n;
  };
  return reach(true) && reach(false);
}

/// Deterministic generator of the communication graph sequence. Same
/// parameters always yield the same edge set at every step.
class GraphSchedule {
public:
  enum class Kind { Static, PeriodicActive, Table, SeededRandom };
  enum class Family { Path, Ring };

  static GraphSchedule static_graph(EdgeSet base) {
    GraphSchedule s(Kind::Static, base.n);
    s.base_ = std::move(base);
    return s;
  }

  /// Base edges when k mod period == 0, empty otherwise.
  static GraphSchedule periodic_active(EdgeSet base, std::uint64_t period) {
    if (period == 0) throw ConfigError("graph schedule: period must be positive");
    GraphSchedule s(Kind::PeriodicActive, base.n);
    s.base_ = std::move(base);
    s.period_ = period;
    return s;
  }

  /// Explicit per-step table, repeated cyclically.
  static GraphSchedule table(std::vector<EdgeSet> steps) {
    if (steps.empty()) throw ConfigError("graph schedule: table must be nonempty");
    const int n = steps.front().n;
    for (const auto& e : steps)
      if (e.n != n) throw ConfigError("graph schedule: table entries disagree on n");
    GraphSchedule s(Kind::Table, n);
    s.table_ = std::move(steps);
    return s;
  }

  /// Each window [w*window_len, (w+1)*window_len) draws one strongly connected
  /// graph (the family over a random node permutation) and places it at one
  /// random step of the window; every other step is empty. The window union is
  /// therefore strongly connected by construction.
  static GraphSchedule seeded_random(int n, std::uint64_t window_len, Family family,
                                     std::uint64_t seed) {
    if (n <= 0) throw ConfigError("graph schedule: agent count must be positive");
    if (window_len == 0) throw ConfigError("graph schedule: window must be positive");
    GraphSchedule s(Kind::SeededRandom, n);
    s.period_ = window_len;
    s.family_ = family;
    s.seed_ = seed;
    return s;
  }

  Kind kind() const { return kind_; }
  int n() const { return n_; }

  /// Natural connectivity window length for this schedule kind.
  std::uint64_t natural_b() const {
    switch (kind_) {
      case Kind::Static: return 1;
      case Kind::PeriodicActive:
      case Kind::SeededRandom: return period_;
      case Kind::Table: return table_.size();
    }
    return 1;
  }

  EdgeSet edges_at(std::uint64_t k) const {
    switch (kind_) {
      case Kind::Static: return base_;
      case Kind::PeriodicActive:
        return (k % period_ == 0) ? base_ : EdgeSet::empty(n_);
      case Kind::Table: return table_[k % table_.size()];
      case Kind::SeededRandom: return random_window_edges(k);
    }
    return EdgeSet::empty(n_);
  }

private:
  GraphSchedule(Kind kind, int n) : kind_(kind), n_(n) {
    if (n <= 0) throw ConfigError("graph schedule: agent count must be positive");
  }

  EdgeSet random_window_edges(std::uint64_t k) const {
    const std::uint64_t window = k / period_;
    SplitMix64 rng(mix64(seed_ ^ (window * 0x9E3779B97F4A7C15ULL + 1)));
    const std::uint64_t active_step = window * period_ + rng.next_below(period_);
    std::vector<int> perm(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (std::size_t i = perm.size(); i > 1; --i)
      std::swap(perm[i - 1], perm[rng.next_below(i)]);
    if (k != active_step) return EdgeSet::empty(n_);
    std::vector<std::pair<int, int>> e;
    if (family_ == Family::Ring) {
      for (int i = 0; i < n_; ++i)
        e.emplace_back(perm[static_cast<std::size_t>(i)],
                       perm[static_cast<std::size_t>((i + 1) % n_)]);
    } else {
      for (int i = 0; i + 1 < n_; ++i) {
        e.emplace_back(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(i + 1)]);
        e.emplace_back(perm[static_cast<std::size_t>(i + 1)], perm[static_cast<std::size_t>(i)]);
      }
    }
    return EdgeSet(n_, std::move(e));
  }

  Kind kind_;
  int n_;
  EdgeSet base_;
  std::vector<EdgeSet> table_;
  std::uint64_t period_ = 1;
  Family family_ = Family::Path;
  std::uint64_t seed_ = 0;
};

/// Result of checking window connectivity over a finite horizon. A failing
/// window is data, not an error; b is set only when every window passed.
struct ConnectivityCertificate {
  std::optional<int> b;
  std::uint64_t windows_checked = 0;
  std::optional<std::uint64_t> first_failing_window;
};

/// Unions the edge sets over each window [w*candidate_b, (w+1)*candidate_b)
/// for w < horizon_windows and tests strong connectivity of each union.
inline ConnectivityCertificate verify_b_connectivity(const GraphSchedule& schedule,
                                                     int candidate_b,
                                                     std::uint64_t horizon_windows) {
  if (candidate_b <= 0) throw ConfigError("verify_b_connectivity: b must be positive");
  if (horizon_windows == 0) throw ConfigError("verify_b_connectivity: horizon must be >= 1");
  ConnectivityCertificate cert;
  for (std::uint64_t w = 0; w < horizon_windows; ++w) {
    EdgeSet window_union = EdgeSet::empty(schedule.n());
    for (std::uint64_t k = w * static_cast<std::uint64_t>(candidate_b);
         k < (w + 1) * static_cast<std::uint64_t>(candidate_b); ++k)
      window_union = window_union | schedule.edges_at(k);
    cert.windows_checked = w + 1;
    if (!strongly_connected(window_union)) {
      cert.first_failing_window = w;
      return cert;
    }
  }
  cert.b = candidate_b;
  return cert;
}

}  // namespace sll
