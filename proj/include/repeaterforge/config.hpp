#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "repeaterforge/engine.hpp"
#include "repeaterforge/hardware.hpp"
#include "repeaterforge/optimizer.hpp"
#include "repeaterforge/targetmetric.hpp"

namespace rf {

class ConfigError : public std::runtime_error {
public:
  enum class Kind { Schema, Reference, Range };
  ConfigError(Kind kind, std::string path, int line, const std::string& message);
  Kind kind() const { return kind_; }
  const std::string& path() const { return path_; }
  int line() const { return line_; }  // 1-based, 0 when unknown
  const std::string& message() const { return message_; }

private:
  Kind kind_;
  std::string path_;
  int line_;
  std::string message_;
};

std::string to_string(ConfigError::Kind k);

struct HardwareSpec {
  Platform platform = Platform::Abstract;
  std::string baseline;  // baseline name or file path, used as-is
  std::string map_from;  // baseline mapped onto the abstract model
  std::map<std::string, double> parameters;  // inline full parameter set
  std::map<std::string, double> overrides;
  std::map<std::string, double> improvements;
};

struct OptimizerSpec {
  GaConfig ga;
  std::vector<std::string> parameters;  // empty: every improvable parameter
  bool tune_cutoff = true;
  bool tune_alpha = false;
  bool tune_coincidence = false;
  double alpha_min = 1e-3;
  double alpha_max = 0.5;
  double horizon_factor = 50.0;
};

struct SweepSpec {
  std::string parameter;  // dotted path, e.g. protocol.cutoff_time or hardware.improvements.T2
  std::vector<double> values;
};

struct ScenarioConfig {
  std::string name;
  std::uint64_t seed = 1;
  int n_runs = 10;
  bool standard_scenario = false;
  Topology topology;
  HardwareSpec hardware_spec;
  HardwareParams hardware;  // resolved
  ProtocolConfig protocol;
  PerformanceTarget target;
  bool fidelity_from_bound = true;  // target fidelity derived from (rate, server_T)
  OptimizerSpec optimizer;
  std::optional<SweepSpec> sweep;

  Scenario scenario() const;
  OptimizationProblem problem() const;
};

ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<config>");

// Deterministic JSON rendering of the parsed configuration; parses back to itself.
std::string canonical_form(const ScenarioConfig& c);
std::string sha256_hex(const std::string& data);
std::string config_hash(const ScenarioConfig& c);

// One configuration per sweep value, each without the sweep stanza.
std::vector<ScenarioConfig> expand_sweep(const ScenarioConfig& c);

}  // namespace rf
