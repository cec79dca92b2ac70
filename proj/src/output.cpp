#include "repeaterforge/output.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace rf {

using nlohmann::json;

namespace {

json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return v;
}

json opt_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string csv_opt(const std::optional<double>& v) { return v ? csv_num(*v) : std::string(); }

std::string csv_header(const RunInfo& info) {
  std::ostringstream os;
  os << "# repeaterforge " << version_string() << " command=" << info.command << " config=" << info.config_name
     << " config_hash=" << info.config_hash << " seed=" << info.seed << " n_runs=" << info.n_runs << "\n";
  return os.str();
}

}  // namespace

std::string version_string() {
#ifdef REPEATERFORGE_VERSION
  return REPEATERFORGE_VERSION;
#else
  return "unknown";
#endif
}

json run_info_json(const RunInfo& info) {
  return {{"tool", "repeaterforge"},
          {"version", version_string()},
          {"command", info.command},
          {"config_name", info.config_name},
          {"config_hash", info.config_hash},
          {"seed", info.seed},
          {"n_runs", info.n_runs}};
}

json density_matrix_json(const DensityMatrix& rho) {
  json entries = json::array();
  for (int r = 0; r < rho.dim(); ++r)
    for (int c = 0; c < rho.dim(); ++c) entries.push_back({rho(r, c).real(), rho(r, c).imag()});
  return {{"dim", rho.dim()}, {"entries", entries}};
}

json metrics_json(const Metrics& m) {
  return {{"n", m.n},
          {"rate_hz", num(m.rate)},
          {"sem_rate_hz", num(m.sem_rate)},
          {"f_tel", num(m.f_tel)},
          {"sem_f_tel", num(m.sem_f)},
          {"f_dummy", num(m.f_dummy)},
          {"f_trap", num(m.f_trap)},
          {"q_bound", num(m.q_bound)},
          {"vbqc_ok", m.vbqc_ok},
          {"total_time_s", num(m.total_time)}};
}

json tunables_json(const Tunables& t) {
  return {{"cutoff_time_s", opt_num(t.cutoff_time)},
          {"alpha", opt_num(t.alpha)},
          {"coincidence_window_s", opt_num(t.coincidence_window)}};
}

json candidate_json(const Candidate& c, const std::vector<std::string>& parameters) {
  json k = json::object();
  for (std::size_t i = 0; i < c.k.size(); ++i) k[i < parameters.size() ? parameters[i] : std::to_string(i)] = num(c.k[i]);
  return {{"improvement_factors", k},
          {"tunables", tunables_json(c.tunables)},
          {"rate_hz", num(c.rate)},
          {"sem_rate_hz", num(c.sem_rate)},
          {"f_tel", num(c.f_tel)},
          {"sem_f_tel", num(c.sem_f)},
          {"hardware_cost", num(c.hardware_cost)},
          {"cost", num(c.cost)},
          {"meets_targets", c.meets_targets}};
}

static json target_json(const PerformanceTarget& t) {
  return {{"fidelity", num(t.fidelity)}, {"rate_hz", num(t.rate)}, {"server_T_s", num(t.server_T)}};
}

static json check_json(const TargetCheck& c) {
  return {{"met", c.met},
          {"rate_met", c.rate_met},
          {"fidelity_met", c.fidelity_met},
          {"rate_margin_hz", num(c.rate_margin)},
          {"fidelity_margin", num(c.fidelity_margin)}};
}

json simulation_json(const RunInfo& info, const Evaluation& ev, const PerformanceTarget& target, bool include_records) {
  json j;
  j["run"] = run_info_json(info);
  j["metrics"] = metrics_json(ev.metrics);
  j["target"] = target_json(target);
  j["target_check"] = check_json(targets_met(ev.metrics.rate, ev.metrics.f_tel, target));
  if (include_records) {
    json runs = json::array();
    for (std::size_t r = 0; r < ev.runs.size(); ++r) {
      json recs = json::array();
      for (const auto& d : ev.runs[r].records)
        recs.push_back({{"index", d.index},
                        {"completion_time_s", num(d.completion_time)},
                        {"f_tel", num(avg_teleportation_fidelity(d.state))},
                        {"frame", {d.frame.x, d.frame.z}},
                        {"attempts", d.attempts},
                        {"storage_time_s", num(d.storage_time)},
                        {"discards", d.discards},
                        {"state", density_matrix_json(d.state)}});
      runs.push_back({{"run", r},
                      {"events", ev.runs[r].events},
                      {"local_circuit_time_s", num(ev.runs[r].local_circuit_time)},
                      {"records", recs}});
    }
    j["runs"] = runs;
  }
  return j;
}

std::string records_csv(const RunInfo& info, const Evaluation& ev) {
  std::ostringstream os;
  os << csv_header(info);
  os << "run,index,completion_time_s,f_tel,frame_x,frame_z,attempts_link0,attempts_link1,storage_time_s,discards\n";
  for (std::size_t r = 0; r < ev.runs.size(); ++r)
    for (const auto& d : ev.runs[r].records) {
      os << r << ',' << d.index << ',' << csv_num(d.completion_time) << ',' << csv_num(avg_teleportation_fidelity(d.state))
         << ',' << d.frame.x << ',' << d.frame.z << ',' << (d.attempts.size() > 0 ? d.attempts[0] : 0) << ','
         << (d.attempts.size() > 1 ? std::to_string(d.attempts[1]) : std::string()) << ',' << csv_num(d.storage_time)
         << ',' << d.discards << '\n';
    }
  return os.str();
}

std::string metrics_csv(const RunInfo& info, const Metrics& m, const PerformanceTarget& target) {
  const TargetCheck c = targets_met(m.rate, m.f_tel, target);
  std::ostringstream os;
  os << csv_header(info);
  os << "n,rate_hz,sem_rate_hz,f_tel,sem_f_tel,f_dummy,f_trap,q_bound,vbqc_ok,rate_met,fidelity_met,total_time_s\n";
  os << m.n << ',' << csv_num(m.rate) << ',' << csv_num(m.sem_rate) << ',' << csv_num(m.f_tel) << ',' << csv_num(m.sem_f)
     << ',' << csv_num(m.f_dummy) << ',' << csv_num(m.f_trap) << ',' << csv_num(m.q_bound) << ',' << int(m.vbqc_ok) << ','
     << int(c.rate_met) << ',' << int(c.fidelity_met) << ',' << csv_num(m.total_time) << '\n';
  return os.str();
}

json optimization_json(const RunInfo& info, const GaResult& r, const OptimizationProblem& p) {
  json hist = json::array();
  for (const auto& g : r.history)
    hist.push_back({{"generation", g.generation}, {"best_cost", num(g.best_cost)}, {"best", candidate_json(g.best, p.parameters)}});
  return {{"run", run_info_json(info)},
          {"parameters", p.parameters},
          {"target", target_json(p.target)},
          {"weights", {{"w1", p.weights.w1}, {"w2", p.weights.w2}, {"w3", p.weights.w3}}},
          {"best", candidate_json(r.best, p.parameters)},
          {"var_terminated", r.var_terminated},
          {"generations_run", r.history.size()},
          {"history", hist}};
}

std::string history_csv(const RunInfo& info, const GaResult& r, const std::vector<std::string>& parameters) {
  std::ostringstream os;
  os << csv_header(info);
  os << "generation,best_cost,rate_hz,f_tel,hardware_cost,meets_targets";
  for (const auto& p : parameters) os << ",k_" << p;
  os << '\n';
  for (const auto& g : r.history) {
    os << g.generation << ',' << csv_num(g.best_cost) << ',' << csv_num(g.best.rate) << ',' << csv_num(g.best.f_tel) << ','
       << csv_num(g.best.hardware_cost) << ',' << int(g.best.meets_targets);
    for (std::size_t i = 0; i < parameters.size(); ++i) os << ',' << (i < g.best.k.size() ? csv_num(g.best.k[i]) : "");
    os << '\n';
  }
  return os.str();
}

json sweep_json(const RunInfo& info, const std::string& parameter, const std::vector<SweepRow>& rows) {
  json pts = json::array();
  for (const auto& r : rows)
    pts.push_back({{"value", num(r.value)}, {"metrics", metrics_json(r.metrics)}, {"target_check", check_json(r.check)}});
  return {{"run", run_info_json(info)}, {"parameter", parameter}, {"points", pts}};
}

std::string sweep_csv(const RunInfo& info, const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << csv_header(info);
  os << "value,n,rate_hz,sem_rate_hz,f_tel,sem_f_tel,q_bound,vbqc_ok,rate_met,fidelity_met\n";
  for (const auto& r : rows)
    os << csv_num(r.value) << ',' << r.metrics.n << ',' << csv_num(r.metrics.rate) << ',' << csv_num(r.metrics.sem_rate)
       << ',' << csv_num(r.metrics.f_tel) << ',' << csv_num(r.metrics.sem_f) << ',' << csv_num(r.metrics.q_bound) << ','
       << int(r.metrics.vbqc_ok) << ',' << int(r.check.rate_met) << ',' << int(r.check.fidelity_met) << '\n';
  return os.str();
}

json minimal_sweep_json(const RunInfo& info, const MinimalSweepResult& r) {
  auto point = [](const SweepPoint& p) {
    return json{{"k", num(p.k)},
                {"value", num(p.value)},
                {"tunables", tunables_json(p.tunables)},
                {"rate_hz", num(p.result.rate)},
                {"sem_rate_hz", num(p.result.sem_rate)},
                {"f_tel", num(p.result.f_tel)},
                {"sem_f_tel", num(p.result.sem_f)},
                {"meets_targets", p.result.meets_targets}};
  };
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back(point(p));
  return {{"run", run_info_json(info)},
          {"parameter", r.parameter},
          {"feasible", r.feasible},
          {"minimal", r.minimal ? point(*r.minimal) : json(nullptr)},
          {"points", pts}};
}

std::string minimal_sweep_csv(const RunInfo& info, const MinimalSweepResult& r) {
  std::ostringstream os;
  os << csv_header(info);
  os << "k,value,cutoff_time_s,alpha,coincidence_window_s,rate_hz,sem_rate_hz,f_tel,sem_f_tel,meets_targets\n";
  for (const auto& p : r.points)
    os << csv_num(p.k) << ',' << csv_num(p.value) << ',' << csv_opt(p.tunables.cutoff_time) << ','
       << csv_opt(p.tunables.alpha) << ',' << csv_opt(p.tunables.coincidence_window) << ',' << csv_num(p.result.rate) << ','
       << csv_num(p.result.sem_rate) << ',' << csv_num(p.result.f_tel) << ',' << csv_num(p.result.sem_f) << ','
       << int(p.result.meets_targets) << '\n';
  return os.str();
}

std::string trace_ndjson(const RunInfo& info, const SimulationResult& r) {
  std::ostringstream os;
  os << run_info_json(info).dump() << '\n';
  for (const auto& e : r.trace)
    os << json{{"time_s", num(e.time)}, {"node", e.node}, {"kind", e.kind}, {"detail", e.detail}}.dump() << '\n';
  return os.str();
}

json error_json(const std::string& kind, const std::string& message, const std::string& path, int line) {
  json e = {{"kind", kind}, {"message", message}};
  if (!path.empty()) e["path"] = path;
  if (line > 0) e["line"] = line;
  return {{"error", e}, {"version", version_string()}};
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace rf
