#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sll/errors.hpp"
#include "sll/hypothesis.hpp"
#include "sll/simulation.hpp"
#include "sll/weights.hpp"

namespace sll {

/// FNV-1a over a byte string; used as the config fingerprint recorded in the
/// manifest and referenced by every CSV a run writes.
inline std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// A fully validated run description: the simulation spec plus everything the
/// harness needs (identifiability report, connectivity window, output paths).
struct ScenarioConfig {
  SimulationSpec sim;
  IdentifiabilityReport report;
  double tol = 1e-12;
  bool diagnostics = true;
  int b = 1;
  std::string out_dir;
  std::string canonical_text;
  std::uint64_t config_hash = 0;
};

namespace detail {

struct ConfigLine {
  int line_no = 0;
  std::string key;
  std::string value;
};

struct ParsedConfig {
  std::string origin;
  std::vector<ConfigLine> top;                    // top-level keys, file order
  std::vector<std::vector<ConfigLine>> agents;    // one vector per [agent] section
  std::vector<int> agent_line;                    // line of each [agent] header
};

[[noreturn]] inline void fail_at(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline double parse_double(const std::string& s, const std::string& origin, int line,
                           const std::string& key) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end == nullptr || *end != '\0')
    fail_at(origin, line, key + ": expected a number, got '" + s + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& origin, int line,
                               const std::string& key) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || end == nullptr || *end != '\0')
    fail_at(origin, line, key + ": expected a nonnegative integer, got '" + s + "'");
  return v;
}

inline ParsedConfig parse_lines(const std::string& text, const std::string& origin) {
  ParsedConfig parsed;
  parsed.origin = origin;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool in_agent = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line == "[agent]") {
      parsed.agents.emplace_back();
      parsed.agent_line.push_back(line_no);
      in_agent = true;
      continue;
    }
    if (line.front() == '[') fail_at(origin, line_no, "unknown section '" + line + "'");
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail_at(origin, line_no, "expected 'key = value', got '" + line + "'");
    ConfigLine entry{line_no, trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
    if (entry.key.empty()) fail_at(origin, line_no, "empty key");
    (in_agent ? parsed.agents.back() : parsed.top).push_back(std::move(entry));
  }
  return parsed;
}

inline EdgeSet parse_edges(const std::string& value, int n, const std::string& origin,
                           int line) {
  std::vector<std::pair<int, int>> pairs;
  if (trim(value) != "none") {
    for (const std::string& tok : split_ws(value)) {
      const auto gt = tok.find('>');
      if (gt == std::string::npos)
        fail_at(origin, line, "edge '" + tok + "' must look like FROM>TO");
      const std::string from = tok.substr(0, gt), to = tok.substr(gt + 1);
      pairs.emplace_back(static_cast<int>(parse_u64(from, origin, line, "edge")),
                         static_cast<int>(parse_u64(to, origin, line, "edge")));
    }
  }
  try {
    return EdgeSet(n, std::move(pairs));
  } catch (const ConfigError& e) {
    fail_at(origin, line, e.what());
  }
}

}  // namespace detail

/// Parses and validates a scenario. Overrides are (key, value) pairs applied
/// to top-level keys before validation; the canonical text (and the config
/// hash) reflect the effective configuration. Every module precondition is
/// checked here, before any computation, and degenerate scenarios whose
/// optimal set is the whole hypothesis set are rejected.
inline ScenarioConfig parse_scenario(
    const std::string& text, const std::string& origin,
    const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  using detail::fail_at;
  detail::ParsedConfig parsed = detail::parse_lines(text, origin);

  for (const auto& [key, value] : overrides) {
    bool replaced = false;
    for (auto& entry : parsed.top)
      if (entry.key == key) {
        entry.value = value;
        replaced = true;
      }
    if (!replaced) parsed.top.push_back(detail::ConfigLine{0, key, value});
  }

  std::map<std::string, detail::ConfigLine> top;
  for (const auto& entry : parsed.top) top[entry.key] = entry;

  auto has = [&](const std::string& key) { return top.count(key) != 0; };
  auto get = [&](const std::string& key) -> const detail::ConfigLine& {
    auto it = top.find(key);
    if (it == top.end()) fail_at(origin, 0, "missing required key '" + key + "'");
    return it->second;
  };
  auto get_or = [&](const std::string& key, const std::string& fallback) {
    auto it = top.find(key);
    return it == top.end() ? fallback : it->second.value;
  };

  // Hypotheses.
  const auto& hyp_line = get("hypotheses");
  std::vector<std::string> labels = detail::split_ws(hyp_line.value);
  if (labels.size() < 2) fail_at(origin, hyp_line.line_no, "need at least two hypotheses");
  HypothesisSet hypotheses = [&] {
    try {
      return HypothesisSet(labels);
    } catch (const ConfigError& e) {
      fail_at(origin, hyp_line.line_no, e.what());
    }
  }();

  // Agents.
  if (parsed.agents.empty()) fail_at(origin, 0, "no [agent] sections");
  std::vector<AgentModel> agents;
  std::vector<CategoricalDistribution> priors;
  bool any_prior = false;
  for (std::size_t a = 0; a < parsed.agents.size(); ++a) {
    const int section_line = parsed.agent_line[a];
    std::map<std::string, detail::ConfigLine> keys;
    for (const auto& entry : parsed.agents[a]) keys[entry.key] = entry;

    auto dist_at = [&](const std::string& key) -> CategoricalDistribution {
      auto it = keys.find(key);
      if (it == keys.end())
        fail_at(origin, section_line, "agent section is missing '" + key + "'");
      std::vector<double> probs;
      for (const std::string& tok : detail::split_ws(it->second.value))
        probs.push_back(detail::parse_double(tok, origin, it->second.line_no, key));
      try {
        return CategoricalDistribution(std::move(probs));
      } catch (const ConfigError& e) {
        fail_at(origin, it->second.line_no, e.what());
      }
    };

    CategoricalDistribution truth = dist_at("true");
    std::vector<CategoricalDistribution> family;
    for (const std::string& label : hypotheses.labels()) family.push_back(dist_at(label));

    std::uint64_t repeat = 1;
    if (auto it = keys.find("repeat"); it != keys.end())
      repeat = detail::parse_u64(it->second.value, origin, it->second.line_no, "repeat");
    if (repeat == 0) fail_at(origin, section_line, "repeat must be positive");

    CategoricalDistribution prior = CategoricalDistribution(
        std::vector<double>(hypotheses.size(), 1.0 / static_cast<double>(hypotheses.size())));
    if (auto it = keys.find("prior"); it != keys.end()) {
      any_prior = true;
      prior = dist_at("prior");
      if (prior.size() != hypotheses.size())
        fail_at(origin, it->second.line_no, "prior size differs from the hypothesis count");
    }

    for (std::uint64_t r = 0; r < repeat; ++r) {
      try {
        agents.emplace_back(truth, family);
      } catch (const ConfigError& e) {
        fail_at(origin, section_line, e.what());
      }
      priors.push_back(prior);
    }
  }

  // Graph schedule.
  const std::string graph_kind = get("graph.kind").value;
  const int n = static_cast<int>(
      detail::parse_u64(get("graph.n").value, origin, get("graph.n").line_no, "graph.n"));
  if (static_cast<std::size_t>(n) != agents.size())
    fail_at(origin, get("graph.n").line_no,
            "graph.n = " + std::to_string(n) + " but the scenario defines " +
                std::to_string(agents.size()) + " agents");

  auto base_edges = [&]() -> EdgeSet {
    const std::string base = get_or("graph.base", "path");
    if (base == "path") return EdgeSet::path(n);
    if (base == "ring") return EdgeSet::ring(n);
    if (base == "complete") return EdgeSet::complete(n);
    if (base == "edges") {
      const auto& line = get("graph.edges");
      return detail::parse_edges(line.value, n, origin, line.line_no);
    }
    fail_at(origin, get("graph.base").line_no, "unknown graph.base '" + base + "'");
  };

  GraphSchedule graph = [&]() -> GraphSchedule {
    try {
      if (graph_kind == "static") return GraphSchedule::static_graph(base_edges());
      if (graph_kind == "periodic-active") {
        const auto& period = get("graph.period");
        return GraphSchedule::periodic_active(
            base_edges(), detail::parse_u64(period.value, origin, period.line_no, "graph.period"));
      }
      if (graph_kind == "seeded-random") {
        const auto& window = get("graph.window");
        const std::string family = get_or("graph.family", "path");
        if (family != "path" && family != "ring")
          fail_at(origin, get("graph.family").line_no, "unknown graph.family '" + family + "'");
        return GraphSchedule::seeded_random(
            n, detail::parse_u64(window.value, origin, window.line_no, "graph.window"),
            family == "ring" ? GraphSchedule::Family::Ring : GraphSchedule::Family::Path,
            detail::parse_u64(get_or("graph.seed", "0"), origin, 0, "graph.seed"));
      }
      if (graph_kind == "table") {
        std::vector<EdgeSet> steps;
        for (std::size_t s = 0;; ++s) {
          const std::string key = "graph.table." + std::to_string(s);
          if (!has(key)) break;
          const auto& line = get(key);
          steps.push_back(detail::parse_edges(line.value, n, origin, line.line_no));
        }
        if (steps.empty())
          fail_at(origin, get("graph.kind").line_no,
                  "graph.kind = table needs graph.table.0, graph.table.1, ...");
        return GraphSchedule::table(std::move(steps));
      }
      fail_at(origin, get("graph.kind").line_no, "unknown graph.kind '" + graph_kind + "'");
    } catch (const ConfigError& e) {
      if (std::string(e.what()).rfind(origin, 0) == 0) throw;
      fail_at(origin, get("graph.kind").line_no, e.what());
    }
  }();

  // Lambda schedule.
  LambdaSchedule lambda = [&]() -> LambdaSchedule {
    const auto& kind_line = get("lambda.kind");
    try {
      if (kind_line.value == "constant")
        return LambdaSchedule::constant(
            detail::parse_double(get("lambda.c").value, origin, get("lambda.c").line_no,
                                 "lambda.c"));
      if (kind_line.value == "power")
        return LambdaSchedule::power(
            detail::parse_double(get_or("lambda.c", "1"), origin, kind_line.line_no, "lambda.c"),
            detail::parse_double(get("lambda.rho").value, origin, get("lambda.rho").line_no,
                                 "lambda.rho"));
      if (kind_line.value == "table") {
        std::vector<double> values;
        const auto& line = get("lambda.values");
        for (const std::string& tok : detail::split_ws(line.value))
          values.push_back(detail::parse_double(tok, origin, line.line_no, "lambda.values"));
        return LambdaSchedule::table(std::move(values));
      }
      fail_at(origin, kind_line.line_no, "unknown lambda.kind '" + kind_line.value + "'");
    } catch (const ConfigError& e) {
      if (std::string(e.what()).rfind(origin, 0) == 0) throw;
      fail_at(origin, kind_line.line_no, e.what());
    }
  }();

  // Policy and rule.
  const std::string policy_text = get_or("policy", "row");
  WeightPolicy policy;
  if (policy_text == "row")
    policy.kind = WeightPolicy::Kind::RowStochastic;
  else if (policy_text == "column")
    policy.kind = WeightPolicy::Kind::ColumnStochastic;
  else
    fail_at(origin, get("policy").line_no, "policy must be 'row' or 'column'");

  const std::string rule_text = get_or("rule", "log-linear");
  UpdateRule rule;
  if (rule_text == "log-linear")
    rule = UpdateRule::LogLinear;
  else if (rule_text == "push-sum")
    rule = UpdateRule::PushSum;
  else
    fail_at(origin, get("rule").line_no, "rule must be 'log-linear' or 'push-sum'");

  ScenarioConfig config{
      SimulationSpec{std::move(agents), std::move(hypotheses), std::move(graph),
                     std::move(lambda), policy, rule,
                     detail::parse_u64(get("horizon").value, origin, get("horizon").line_no,
                                       "horizon"),
                     detail::parse_u64(get_or("seed", "0"), origin, 0, "seed"),
                     RecordSpec::geometric(), std::nullopt},
      IdentifiabilityReport{}, 1e-12, true, 1, std::string(), std::string(), 0};
  if (config.sim.horizon < 1) fail_at(origin, get("horizon").line_no, "horizon must be >= 1");
  if (any_prior) config.sim.priors = std::move(priors);

  if (has("record_every")) {
    try {
      config.sim.record = RecordSpec::parse(get("record_every").value);
    } catch (const ConfigError& e) {
      fail_at(origin, get("record_every").line_no, e.what());
    }
  }

  config.tol = has("tol") ? detail::parse_double(get("tol").value, origin, get("tol").line_no,
                                                 "tol")
                          : 1e-12;
  if (config.tol < 0) fail_at(origin, get("tol").line_no, "tol must be nonnegative");

  const std::string diag = get_or("diagnostics", "on");
  if (diag != "on" && diag != "off")
    fail_at(origin, get("diagnostics").line_no, "diagnostics must be 'on' or 'off'");
  config.diagnostics = diag == "on";

  config.b = static_cast<int>(has("b") ? detail::parse_u64(get("b").value, origin,
                                                           get("b").line_no, "b")
                                       : config.sim.graph.natural_b());
  if (config.b < 1) fail_at(origin, get("b").line_no, "b must be >= 1");
  config.out_dir = get_or("out", "");

  // Identifiability: computed up front so degenerate scenarios never run.
  try {
    config.report = optimal_sets(config.sim.agents, config.tol);
  } catch (const DegenerateScenarioError&) {
    throw;
  } catch (const ConfigError& e) {
    fail_at(origin, 0, e.what());
  }

  // Validate every simulation precondition now rather than mid-run.
  detail::validate_spec(config.sim);

  // Canonical form: effective top-level keys in file order, then agents.
  std::ostringstream canon;
  for (const auto& entry : parsed.top) canon << entry.key << " = " << entry.value << "\n";
  for (std::size_t a = 0; a < parsed.agents.size(); ++a) {
    canon << "[agent]\n";
    for (const auto& entry : parsed.agents[a])
      canon << entry.key << " = " << entry.value << "\n";
  }
  config.canonical_text = canon.str();
  config.config_hash = fnv1a64(config.canonical_text);
  return config;
}

inline ScenarioConfig load_scenario(
    const std::string& path,
    const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path, overrides);
}

}  // namespace sll
