#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "repeaterforge/config.hpp"
#include "repeaterforge/output.hpp"
#include "repeaterforge/targetmetric.hpp"

using namespace rf;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum ExitCode { kOk = 0, kFailed = 1, kConfigError = 2, kUsageError = 3, kRuntimeError = 4 };

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::string out_dir = "repeaterforge-out";
  std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c, bool needs_config = true) {
  auto* opt = cmd->add_option("--config", c.config, "Scenario configuration (YAML)");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Override the configuration seed");
  cmd->add_option("--runs", c.runs, "Override the number of independent runs")->check(CLI::PositiveNumber);
  cmd->add_option("--out-dir", c.out_dir, "Directory for result files")->capture_default_str();
  cmd->add_option("--format", c.format, "Result file format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
}

ScenarioConfig load_with_overrides(const Common& c) {
  ScenarioConfig cfg = load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.runs) {
    if (*c.runs < 1) throw ConfigError(ConfigError::Kind::Range, "n_runs", 0, "--runs must be at least 1");
    cfg.n_runs = *c.runs;
  }
  return cfg;
}

RunInfo run_info(const std::string& command, const ScenarioConfig& cfg) {
  return {command, cfg.name, config_hash(cfg), cfg.seed, cfg.n_runs};
}

std::string output_path(const Common& c, const std::string& file) {
  std::filesystem::create_directories(c.out_dir);
  return (std::filesystem::path(c.out_dir) / file).string();
}

void write_json(const Common& c, const std::string& file, const nlohmann::json& j) {
  const std::string path = output_path(c, file);
  write_text_file(path, j.dump(2) + "\n");
  std::cout << "wrote " << path << "\n";
}

void write_csv(const Common& c, const std::string& file, const std::string& text) {
  const std::string path = output_path(c, file);
  write_text_file(path, text);
  std::cout << "wrote " << path << "\n";
}

double default_horizon(const ScenarioConfig& cfg) {
  return cfg.optimizer.horizon_factor * cfg.protocol.n_pairs / cfg.target.rate;
}

void print_metrics(const Metrics& m, const PerformanceTarget& t) {
  const TargetCheck c = targets_met(m.rate, m.f_tel, t);
  std::printf("pairs %d  rate %.6g +/- %.2g Hz  F_tel %.6f +/- %.2g  targets (R %.4g Hz, F %.4f) %s\n", m.n, m.rate,
              m.sem_rate, m.f_tel, m.sem_f, t.rate, t.fidelity, c.met ? "met" : "not met");
}

int cmd_simulate(const Common& c, std::optional<int> pairs, bool records, bool trace, std::optional<double> horizon) {
  ScenarioConfig cfg = load_with_overrides(c);
  if (pairs) cfg.protocol.n_pairs = *pairs;
  const RunInfo info = run_info("simulate", cfg);
  const Scenario sc = cfg.scenario();
  const double h = horizon.value_or(kInf);
  const Evaluation ev = evaluate(sc, cfg.seed, cfg.n_runs, cfg.target.server_T, true, h);
  print_metrics(ev.metrics, cfg.target);
  if (c.format == "json") {
    write_json(c, "simulation.json", simulation_json(info, ev, cfg.target, records));
  } else {
    write_csv(c, "metrics.csv", metrics_csv(info, ev.metrics, cfg.target));
    if (records) write_csv(c, "records.csv", records_csv(info, ev));
  }
  if (trace) {
    SimulationOptions opt;
    opt.seed = cfg.seed;
    opt.trace = true;
    opt.horizon = h;
    write_csv(c, "trace.ndjson", trace_ndjson(info, run_simulation(sc, opt)));
  }
  return kOk;
}

int cmd_optimize(const Common& c, std::optional<int> population, std::optional<int> generations, int threads) {
  ScenarioConfig cfg = load_with_overrides(c);
  if (population) cfg.optimizer.ga.population = *population;
  if (generations) cfg.optimizer.ga.generations = *generations;
  GaConfig ga = cfg.optimizer.ga;
  ga.seed = cfg.seed;
  ga.threads = threads;
  const RunInfo info = run_info("optimize", cfg);
  const OptimizationProblem problem = cfg.problem();
  const GaResult r = genetic_optimize(make_ga_problem(problem), ga);
  std::printf("generations %zu%s  best cost %.6g  H_C %.4g  rate %.6g Hz  F_tel %.6f  %s\n", r.history.size(),
              r.var_terminated ? " (VAR)" : "", r.best.cost, r.best.hardware_cost, r.best.rate, r.best.f_tel,
              r.best.meets_targets ? "targets met" : "targets not met");
  if (c.format == "json")
    write_json(c, "optimization.json", optimization_json(info, r, problem));
  else
    write_csv(c, "history.csv", history_csv(info, r, problem.parameters));
  return kOk;
}

struct MinimalOptions {
  std::string parameter;
  std::vector<double> k_grid;
  double k_max = 100.0;
  int k_points = 25;
  std::vector<double> cutoff_fractions{1.0};
  std::vector<double> alphas;
  std::vector<double> windows;
  bool perfect_detection = false;
};

int cmd_sweep(const Common& c, const MinimalOptions& mo, std::optional<double> horizon) {
  ScenarioConfig cfg = load_with_overrides(c);
  if (!mo.parameter.empty()) {
    ScenarioConfig base = cfg;
    base.sweep.reset();
    MinimalSweepConfig msc;
    msc.k_grid = mo.k_grid.empty() ? geometric_grid(1.0, mo.k_max, mo.k_points) : mo.k_grid;
    msc.cutoff_fractions = mo.cutoff_fractions;
    msc.alphas = mo.alphas;
    msc.coincidence_windows = mo.windows;
    msc.seed = cfg.seed;
    msc.perfect_detection = mo.perfect_detection;
    const RunInfo info = run_info("sweep", base);
    const MinimalSweepResult r = absolute_minimal_sweep(base.problem(), mo.parameter, msc);
    if (r.minimal)
      std::printf("%s: minimal improvement factor %.6g (value %.6g), rate %.6g Hz, F_tel %.6f\n", r.parameter.c_str(),
                  r.minimal->k, r.minimal->value, r.minimal->result.rate, r.minimal->result.f_tel);
    else
      std::printf("%s: targets not reached up to k = %.6g\n", r.parameter.c_str(), msc.k_grid.back());
    if (c.format == "json")
      write_json(c, "minimal_sweep.json", minimal_sweep_json(info, r));
    else
      write_csv(c, "minimal_sweep.csv", minimal_sweep_csv(info, r));
    return kOk;
  }
  if (!cfg.sweep)
    throw ConfigError(ConfigError::Kind::Schema, "sweep", 0, "configuration has no sweep stanza and no --improve was given");
  const RunInfo info = run_info("sweep", cfg);
  std::vector<SweepRow> rows;
  const std::vector<ScenarioConfig> points = expand_sweep(cfg);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const ScenarioConfig& p = points[i];
    const Evaluation ev = evaluate(p.scenario(), p.seed, p.n_runs, p.target.server_T, false,
                                   horizon.value_or(default_horizon(p)));
    SweepRow row;
    row.value = cfg.sweep->values[i];
    row.metrics = ev.metrics;
    row.check = targets_met(ev.metrics.rate, ev.metrics.f_tel, p.target);
    std::printf("%s = %-10g ", cfg.sweep->parameter.c_str(), row.value);
    print_metrics(ev.metrics, p.target);
    rows.push_back(row);
  }
  if (c.format == "json")
    write_json(c, "sweep.json", sweep_json(info, cfg.sweep->parameter, rows));
  else
    write_csv(c, "sweep.csv", sweep_csv(info, rows));
  return kOk;
}

int cmd_bound(double rate, double server_T, const std::string& format) {
  const double f = vbqc_min_fidelity(rate, server_T);
  if (format == "json")
    std::cout << nlohmann::json{{"rate_hz", rate}, {"server_T_s", server_T}, {"min_fidelity", f}, {"version", version_string()}}
                     .dump()
              << "\n";
  else
    std::printf("%.4f\n", f);
  return kOk;
}

int cmd_validate(const Common& c, bool write) {
  const std::uint64_t seed = c.seed.value_or(1);
  if (!c.config.empty()) {
    const ScenarioConfig cfg = load_with_overrides(c);
    for (const auto& p : expand_sweep(cfg)) p.scenario().validate();
    cfg.problem().validate();
    std::printf("config %s ok, hash %s\n", cfg.name.c_str(), config_hash(cfg).c_str());
    if (write) {
      const std::string path = output_path(c, "config.json");
      write_text_file(path, canonical_form(cfg) + "\n");
      std::cout << "wrote " << path << "\n";
    }
  }
  const std::vector<oracle::SuiteResult> suites = oracle::all_suites(seed);
  bool ok = true;
  nlohmann::json js = nlohmann::json::array();
  for (const auto& s : suites) {
    ok = ok && s.ok();
    std::printf("%-4s %-16s %d/%d  max error %.3g  tolerance %.3g\n", s.ok() ? "PASS" : "FAIL", s.name.c_str(), s.passed,
                s.total, s.max_error, s.tolerance);
    js.push_back({{"name", s.name},
                  {"passed", s.passed},
                  {"total", s.total},
                  {"max_error", s.max_error},
                  {"tolerance", s.tolerance},
                  {"ok", s.ok()}});
  }
  if (write) {
    const RunInfo info{"validate", "oracle-suites", sha256_hex("oracle-suites"), seed, 1};
    if (c.format == "json") {
      write_json(c, "validate.json", {{"run", run_info_json(info)}, {"suites", js}, {"ok", ok}});
    } else {
      std::string csv = "# repeaterforge " + version_string() + " command=validate seed=" + std::to_string(seed) +
                        "\nsuite,passed,total,max_error,tolerance,ok\n";
      for (const auto& s : js)
        csv += s["name"].get<std::string>() + "," + std::to_string(s["passed"].get<int>()) + "," +
               std::to_string(s["total"].get<int>()) + "," + s["max_error"].dump() + "," + s["tolerance"].dump() + "," +
               (s["ok"].get<bool>() ? "1" : "0") + "\n";
      write_csv(c, "validate.csv", csv);
    }
  }
  return ok ? kOk : kFailed;
}

int report(const nlohmann::json& err, int code) {
  std::cerr << err.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum repeater simulation and hardware-requirement optimization"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  Common common;
  std::optional<int> pairs, population, generations;
  std::optional<double> horizon;
  bool records = false, trace = false, write_validate = false;
  int threads = 0;
  double rate = 0.0, server_T = 0.0;
  std::string bound_format = "csv";
  MinimalOptions mo;

  CLI::App* sim = app.add_subcommand("simulate", "Simulate a scenario and report rate and fidelity");
  add_common(sim, common);
  sim->add_option("--pairs", pairs, "Override the number of delivered pairs per run")->check(CLI::PositiveNumber);
  sim->add_option("--horizon", horizon, "Stop each run after this much simulated time (s)")->check(CLI::PositiveNumber);
  sim->add_flag("--records", records, "Include per-delivery records");
  sim->add_flag("--trace", trace, "Write the event trace of run 0 as NDJSON");

  CLI::App* opt = app.add_subcommand("optimize", "Search for the cheapest hardware improvements meeting the targets");
  add_common(opt, common);
  opt->add_option("--population", population, "Override the population size");
  opt->add_option("--generations", generations, "Override the generation cap");
  opt->add_option("--threads", threads, "Evaluation threads (0: all cores, capped by REPEATERFORGE_THREADS)");

  CLI::App* sweep = app.add_subcommand("sweep", "Run the configuration's sweep stanza or an improvement-factor sweep");
  add_common(sweep, common);
  sweep->add_option("--horizon", horizon, "Simulated-time cap per run (s)")->check(CLI::PositiveNumber);
  sweep->add_option("--improve", mo.parameter, "Sweep this parameter's improvement factor with all others perfect");
  sweep->add_option("--k-grid", mo.k_grid, "Explicit increasing improvement factors")->delimiter(',');
  sweep->add_option("--k-max", mo.k_max, "Largest factor of the default geometric grid")->capture_default_str();
  sweep->add_option("--k-points", mo.k_points, "Points of the default geometric grid")->capture_default_str();
  sweep->add_option("--cutoff-fractions", mo.cutoff_fractions, "Cut-off times as fractions of the coherence time")
      ->delimiter(',');
  sweep->add_option("--alphas", mo.alphas, "Bright-state parameters to try (single click)")->delimiter(',');
  sweep->add_option("--windows", mo.windows, "Coincidence windows to try (s)")->delimiter(',');
  sweep->add_flag("--perfect-detection", mo.perfect_detection, "Also set the zero-length detection probability to 1");

  CLI::App* bound = app.add_subcommand("bound", "Minimal average teleportation fidelity for a rate and server memory");
  bound->add_option("rate", rate, "Entanglement rate (Hz)")->required()->check(CLI::PositiveNumber);
  bound->add_option("server_T", server_T, "Server memory lifetime (s)")->required()->check(CLI::PositiveNumber);
  bound->add_option("--format", bound_format, "json, or csv for the bare value")->check(CLI::IsMember({"json", "csv"}));

  CLI::App* val = app.add_subcommand("validate", "Run the closed-form vs oracle suites and check an optional configuration");
  add_common(val, common, false);
  val->add_flag("--write", write_validate, "Also write the suite results to --out-dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(error_json("usage", e.what()), kUsageError);
  }

  try {
    if (sim->parsed()) return cmd_simulate(common, pairs, records, trace, horizon);
    if (opt->parsed()) return cmd_optimize(common, population, generations, threads);
    if (sweep->parsed()) return cmd_sweep(common, mo, horizon);
    if (bound->parsed()) return cmd_bound(rate, server_T, bound_format);
    if (val->parsed()) return cmd_validate(common, write_validate || val->count("--out-dir") > 0);
  } catch (const ConfigError& e) {
    return report(error_json(to_string(e.kind()), e.message(), e.path(), e.line()), kConfigError);
  } catch (const std::invalid_argument& e) {
    return report(error_json("invalid_argument", e.what()), kRuntimeError);
  } catch (const std::exception& e) {
    return report(error_json("runtime", e.what()), kRuntimeError);
  }
  return kUsageError;
}
