// Command-line harness: runs scenarios, classifies decay schedules, and
// sweeps parameter grids. Outputs are deterministic given a config and seed.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sll/sll.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartialFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitContractViolation = 3;

std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& raw) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const std::string& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw sll::ConfigError("--override expects KEY=VALUE, got '" + item + "'");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

ordered_json manifest_json(const sll::ScenarioConfig& config, const sll::ScheduleVerdict& verdict,
                           const sll::ConnectivityCertificate& cert, double wall_clock_seconds) {
  const auto& hyp = config.sim.hypotheses;
  auto label_set = [&](const std::vector<std::size_t>& indices) {
    std::vector<std::string> labels;
    for (std::size_t t : indices) labels.push_back(hyp.label(t));
    return labels;
  };

  ordered_json m;
  m["config_hash"] = sll::format_hex64(config.config_hash);
  m["library_version"] = sll::kVersion;
  m["seed"] = config.sim.seed;
  m["generator"] = sll::kGeneratorId;
  m["rule"] = config.sim.rule == sll::UpdateRule::LogLinear ? "log-linear" : "push-sum";
  m["policy"] = config.sim.policy.row() ? "row" : "column";
  m["horizon"] = config.sim.horizon;
  m["record_every"] = config.sim.record.describe();
  m["hypotheses"] = hyp.labels();
  m["optimal_set"] = label_set(config.report.global_opt);
  ordered_json locals = ordered_json::array();
  for (const auto& local : config.report.local_opts) locals.push_back(label_set(local));
  m["local_optimal_sets"] = locals;
  m["no_conflict"] = config.report.no_conflict;
  m["conflicting"] = config.report.conflicting;
  ordered_json objective;
  for (std::size_t t = 0; t < hyp.size(); ++t)
    objective[hyp.label(t)] = config.report.group_objective[t];
  m["group_objective"] = objective;

  ordered_json v;
  v["b"] = verdict.b;
  v["limit_classification"] = sll::to_string(verdict.limit_classification);
  v["bc_sum_classification"] = sll::to_string(verdict.bc_sum_classification);
  v["learning_guaranteed"] = verdict.learning_guaranteed;
  v["converse_applies"] = verdict.converse_applies;
  v["ergodic_by_bc"] = verdict.ergodic_by_bc;
  v["empirical"] = verdict.empirical;
  m["schedule_verdict"] = v;

  ordered_json c;
  if (cert.b)
    c["b"] = *cert.b;
  else
    c["b"] = nullptr;
  c["windows_checked"] = cert.windows_checked;
  if (cert.first_failing_window)
    c["first_failing_window"] = *cert.first_failing_window;
  else
    c["first_failing_window"] = nullptr;
  m["connectivity"] = c;

  m["diagnostics"] = !config.diagnostics ? "off"
                     : config.sim.policy.row() ? "row"
                                               : "transposed-column";
  if (wall_clock_seconds >= 0.0)
    m["wall_clock_seconds"] = wall_clock_seconds;
  else
    m["wall_clock_seconds"] = nullptr;
  return m;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw sll::ConfigError("cannot write " + path.string());
  out << contents;
  if (!out) throw sll::ConfigError("short write to " + path.string());
}

/// Runs one scenario into out_dir: manifest first, then verdict and the CSV
/// trajectories. The manifest is rewritten with the wall clock only after the
/// data files are complete.
void execute_run(const sll::ScenarioConfig& config, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const std::string hash = sll::format_hex64(config.config_hash);

  const sll::ScheduleVerdict verdict = sll::classify_schedule(config.sim.lambda, config.b);
  const std::uint64_t windows =
      std::min<std::uint64_t>(200, config.sim.horizon / static_cast<std::uint64_t>(config.b) + 1);
  const sll::ConnectivityCertificate cert =
      sll::verify_b_connectivity(config.sim.graph, config.b, windows);

  write_file(out_dir / "manifest.json",
             manifest_json(config, verdict, cert, -1.0).dump(2) + "\n");
  write_file(out_dir / "verdict.txt", verdict.render_text() + "\n" + verdict.render_key_values());

  std::ofstream beliefs(out_dir / "beliefs.csv", std::ios::binary);
  if (!beliefs) throw sll::ConfigError("cannot write " + (out_dir / "beliefs.csv").string());
  beliefs << "# manifest_hash=" << hash << "\n";
  beliefs << "k,agent,hypothesis,belief\n";

  std::ofstream diagnostics;
  if (config.diagnostics) {
    diagnostics.open(out_dir / "diagnostics.csv", std::ios::binary);
    if (!diagnostics)
      throw sll::ConfigError("cannot write " + (out_dir / "diagnostics.csv").string());
    diagnostics << "# manifest_hash=" << hash << "\n";
    diagnostics << "k,pi,row_spread,delta_estimate\n";
  }

  const std::size_t n = config.sim.agents.size();
  const std::size_t p = config.sim.hypotheses.size();
  sll::ProductTracker tracker(n, config.b);
  const bool transpose = !config.sim.policy.row();

  sll::StepObserver observer;
  if (config.diagnostics)
    observer = [&](const sll::WeightMatrix& t) {
      tracker.push(transpose ? t.values.transposed() : t.values);
    };

  auto sink = [&](const sll::Snapshot& snap) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < p; ++t)
        beliefs << snap.k << ',' << (i + 1) << ',' << config.sim.hypotheses.label(t) << ','
                << sll::format_g17(snap.belief(i, t)) << "\n";
    if (config.diagnostics && snap.k > 0) {
      const sll::ErgodicityDiagnostics d = tracker.diagnostics();
      diagnostics << snap.k << ',' << sll::format_g17(d.pi) << ','
                  << sll::format_g17(d.row_spread) << ',' << sll::format_g17(d.delta_estimate)
                  << "\n";
    }
  };

  const auto start = std::chrono::steady_clock::now();
  sll::run_simulation(config.sim, sink, observer);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                             .count();

  beliefs.close();
  if (config.diagnostics) diagnostics.close();
  write_file(out_dir / "manifest.json",
             manifest_json(config, verdict, cert, elapsed).dump(2) + "\n");
}

struct RunOptions {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::string seed;
  std::string horizon;
  std::string record_every;

  std::vector<std::pair<std::string, std::string>> effective_overrides() const {
    auto list = parse_overrides(overrides);
    if (!seed.empty()) list.emplace_back("seed", seed);
    if (!horizon.empty()) list.emplace_back("horizon", horizon);
    if (!record_every.empty()) list.emplace_back("record_every", record_every);
    return list;
  }
};

int cmd_run(const RunOptions& opt) {
  const sll::ScenarioConfig config =
      sll::load_scenario(opt.config_path, opt.effective_overrides());
  const std::string out = !opt.out_dir.empty() ? opt.out_dir : config.out_dir;
  if (out.empty())
    throw sll::ConfigError("no output directory: pass --out or set 'out' in the config");
  execute_run(config, out);
  std::cout << "run complete: " << out << " (config " << sll::format_hex64(config.config_hash)
            << ")\n";
  return kExitOk;
}

struct ClassifyOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string kind;
  double c = 1.0;
  double rho = 0.0;
  std::vector<double> values;
  int b = 1;
};

int cmd_classify(const ClassifyOptions& opt) {
  sll::LambdaSchedule lambda = [&]() -> sll::LambdaSchedule {
    if (!opt.config_path.empty()) {
      const auto config = sll::load_scenario(opt.config_path, parse_overrides(opt.overrides));
      return config.sim.lambda;
    }
    if (opt.kind == "constant") return sll::LambdaSchedule::constant(opt.c);
    if (opt.kind == "power") return sll::LambdaSchedule::power(opt.c, opt.rho);
    if (opt.kind == "table") return sll::LambdaSchedule::table(opt.values);
    throw sll::ConfigError("classify: --kind must be constant, power or table (or use --config)");
  }();
  const sll::ScheduleVerdict verdict = sll::classify_schedule(lambda, opt.b);
  std::cout << verdict.render_text() << "\n" << verdict.render_key_values();
  return kExitOk;
}

struct SweepOptions {
  RunOptions run;
  std::vector<std::string> grid;
  unsigned parallel = 1;
};

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

std::vector<GridAxis> parse_grid(const std::vector<std::string>& raw) {
  if (raw.empty()) throw sll::ConfigError("sweep: at least one --grid KEY=V1,V2,... is required");
  std::vector<GridAxis> axes;
  for (const std::string& item : raw) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw sll::ConfigError("--grid expects KEY=V1,V2,..., got '" + item + "'");
    GridAxis axis;
    axis.key = item.substr(0, eq);
    std::string rest = item.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const auto comma = rest.find(',', pos);
      const std::string value =
          rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (value.empty()) throw sll::ConfigError("--grid " + axis.key + ": empty value");
      axis.values.push_back(value);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (axis.values.empty()) throw sll::ConfigError("--grid " + axis.key + ": no values");
    axes.push_back(std::move(axis));
  }
  return axes;
}

std::string sanitize_for_path(const std::string& s) {
  std::string out;
  for (char ch : s)
    out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' ||
            ch == '=' || ch == '_')
               ? ch
               : '_';
  return out;
}

unsigned thread_cap(unsigned requested) {
  if (requested == 0) requested = 1;
  if (const char* env = std::getenv("SLL_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != nullptr && *end == '\0' && cap >= 1)
      requested = std::min<unsigned>(requested, static_cast<unsigned>(cap));
  }
  return requested;
}

int cmd_sweep(const SweepOptions& opt) {
  const std::vector<GridAxis> axes = parse_grid(opt.grid);
  if (opt.run.out_dir.empty()) throw sll::ConfigError("sweep: --out DIR is required");

  const auto global_overrides = opt.run.effective_overrides();
  const sll::ScenarioConfig base = sll::load_scenario(opt.run.config_path, global_overrides);
  const std::uint64_t base_seed = base.sim.seed;

  std::size_t cells = 1;
  for (const auto& axis : axes) cells *= axis.values.size();

  struct Cell {
    std::size_t index;
    std::vector<std::pair<std::string, std::string>> assignment;
    std::string dir_name;
  };
  std::vector<Cell> grid_cells;
  for (std::size_t idx = 0; idx < cells; ++idx) {
    Cell cell;
    cell.index = idx;
    std::size_t rest = idx;
    std::string name = "cell_" + std::to_string(idx);
    for (const auto& axis : axes) {
      const std::string& value = axis.values[rest % axis.values.size()];
      rest /= axis.values.size();
      cell.assignment.emplace_back(axis.key, value);
      name += "__" + sanitize_for_path(axis.key + "=" + value);
    }
    cell.dir_name = name;
    grid_cells.push_back(std::move(cell));
  }

  std::mutex report_mutex;
  std::vector<std::string> failures;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= grid_cells.size()) return;
      const Cell& cell = grid_cells[idx];
      try {
        auto overrides = global_overrides;
        for (const auto& kv : cell.assignment) overrides.push_back(kv);
        overrides.emplace_back("seed", std::to_string(base_seed + cell.index));
        const sll::ScenarioConfig config = sll::load_scenario(opt.run.config_path, overrides);
        execute_run(config, fs::path(opt.run.out_dir) / cell.dir_name);
        std::lock_guard<std::mutex> lock(report_mutex);
        std::cout << cell.dir_name << ": ok\n";
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(report_mutex);
        failures.push_back(cell.dir_name + ": " + e.what());
        std::cerr << cell.dir_name << ": FAILED: " << e.what() << "\n";
      }
    }
  };

  const unsigned threads =
      std::min<unsigned>(thread_cap(opt.parallel), static_cast<unsigned>(grid_cells.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  if (!failures.empty()) {
    std::cerr << failures.size() << " of " << grid_cells.size() << " cells failed\n";
    return kExitPartialFailure;
  }
  std::cout << "sweep complete: " << grid_cells.size() << " cells in " << opt.run.out_dir
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"social learning simulator: log-linear belief dynamics over "
               "time-varying graphs with decaying neighbor weights"};
  app.require_subcommand(1);

  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "run one scenario and write CSV trajectories");
  run->add_option("--config", run_opt.config_path, "scenario file")->required();
  run->add_option("--seed", run_opt.seed, "override the scenario seed (u64)");
  run->add_option("--horizon", run_opt.horizon, "override the horizon (u64)");
  run->add_option("--out", run_opt.out_dir, "output directory");
  run->add_option("--record-every", run_opt.record_every,
                  "snapshot cadence: integer or geometric:RATIO");
  run->add_option("--override", run_opt.overrides, "KEY=VALUE config override (repeatable)");

  ClassifyOptions cls_opt;
  CLI::App* classify =
      app.add_subcommand("classify", "classify a decay schedule against the learning conditions");
  classify->add_option("--config", cls_opt.config_path, "read lambda.* from a scenario file");
  classify->add_option("--override", cls_opt.overrides, "KEY=VALUE config override (repeatable)");
  classify->add_option("--kind", cls_opt.kind, "constant | power | table");
  classify->add_option("--c", cls_opt.c, "scale parameter, in (0,1] (power) or (0,1) (constant)");
  classify->add_option("--rho", cls_opt.rho, "power-law exponent, >= 0");
  classify->add_option("--values", cls_opt.values, "table values (space separated)");
  classify->add_option("--b", cls_opt.b, "connectivity window length")->required();

  SweepOptions sweep_opt;
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid of scenarios");
  sweep->add_option("--config", sweep_opt.run.config_path, "scenario template")->required();
  sweep->add_option("--grid", sweep_opt.grid, "KEY=V1,V2,... grid axis (repeatable)")
      ->required();
  sweep->add_option("--out", sweep_opt.run.out_dir, "output directory")->required();
  sweep->add_option("--parallel", sweep_opt.parallel,
                    "max concurrent cells (capped by SLL_THREADS)");
  sweep->add_option("--seed", sweep_opt.run.seed, "override the base seed");
  sweep->add_option("--horizon", sweep_opt.run.horizon, "override the horizon");
  sweep->add_option("--record-every", sweep_opt.run.record_every, "snapshot cadence");
  sweep->add_option("--override", sweep_opt.run.overrides, "KEY=VALUE override (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(run_opt);
    if (classify->parsed()) return cmd_classify(cls_opt);
    if (sweep->parsed()) return cmd_sweep(sweep_opt);
    return kExitConfigError;
  } catch (const sll::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const sll::ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitContractViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitContractViolation;
  }
}
