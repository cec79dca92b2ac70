#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "repeaterforge/config.hpp"
#include "repeaterforge/engine.hpp"
#include "repeaterforge/optimizer.hpp"

namespace rf {

std::string version_string();

// Replay metadata embedded in every output file.
struct RunInfo {
  std::string command;
  std::string config_name;
  std::string config_hash;
  std::uint64_t seed = 0;
  int n_runs = 0;
};

nlohmann::json run_info_json(const RunInfo& info);
nlohmann::json density_matrix_json(const DensityMatrix& rho);
nlohmann::json metrics_json(const Metrics& m);
nlohmann::json candidate_json(const Candidate& c, const std::vector<std::string>& parameters);
nlohmann::json tunables_json(const Tunables& t);

// simulate: metrics plus optional per-delivery records.
nlohmann::json simulation_json(const RunInfo& info, const Evaluation& ev, const PerformanceTarget& target,
                               bool include_records);
// One row per delivery: run,index,completion_time_s,f_tel,frame_x,frame_z,attempts_link0,attempts_link1,storage_time_s,discards
std::string records_csv(const RunInfo& info, const Evaluation& ev);
// One row: n,rate_hz,sem_rate_hz,f_tel,sem_f_tel,f_dummy,f_trap,q_bound,vbqc_ok,rate_met,fidelity_met,total_time_s
std::string metrics_csv(const RunInfo& info, const Metrics& m, const PerformanceTarget& target);

// optimize
nlohmann::json optimization_json(const RunInfo& info, const GaResult& r, const OptimizationProblem& p);
// One row per generation: generation,best_cost,rate_hz,f_tel,hardware_cost,meets_targets,k_<parameter>...
std::string history_csv(const RunInfo& info, const GaResult& r, const std::vector<std::string>& parameters);

// sweep over a config stanza: one row per value.
struct SweepRow {
  double value = 0.0;
  Metrics metrics;
  TargetCheck check;
};
nlohmann::json sweep_json(const RunInfo& info, const std::string& parameter, const std::vector<SweepRow>& rows);
// value,n,rate_hz,sem_rate_hz,f_tel,sem_f_tel,q_bound,vbqc_ok,rate_met,fidelity_met
std::string sweep_csv(const RunInfo& info, const std::vector<SweepRow>& rows);

// Improvement-factor sweep: k,value,cutoff_time_s,alpha,coincidence_window_s,rate_hz,sem_rate_hz,f_tel,sem_f_tel,meets_targets
nlohmann::json minimal_sweep_json(const RunInfo& info, const MinimalSweepResult& r);
std::string minimal_sweep_csv(const RunInfo& info, const MinimalSweepResult& r);

// One JSON object per line; the first line is the run metadata.
std::string trace_ndjson(const RunInfo& info, const SimulationResult& r);

nlohmann::json error_json(const std::string& kind, const std::string& message, const std::string& path = "",
                          int line = 0);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace rf
