#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "repeaterforge/hardware.hpp"
#include "repeaterforge/linkmodels.hpp"
#include "repeaterforge/qstate.hpp"

namespace rf {

constexpr double kSpeedOfLightKmPerS = 299792.458;

struct LinkSpec {
  std::string station;
  double length_left_km = 0.0;   // left node to station
  double length_right_km = 0.0;  // station to right node
  double attenuation_db_per_km = 0.2;
  double length_km() const { return length_left_km + length_right_km; }
};

// A chain of two end nodes with at most one repeater between them.
struct Topology {
  std::vector<std::string> nodes;
  std::vector<LinkSpec> links;  // links[i] joins nodes[i] and nodes[i+1]
  double refractive_index = 1.44;
  void validate() const;
  double fiber_speed() const { return kSpeedOfLightKmPerS / refractive_index; }
  double total_length_km() const;
};

enum class Scheme { SingleClick, DoubleClick };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);
std::string to_string(DetectorMode m);
DetectorMode detector_from_string(const std::string& s);

struct ProtocolConfig {
  Scheme scheme = Scheme::DoubleClick;
  DetectorMode detector = DetectorMode::NR;
  double cutoff_time = std::numeric_limits<double>::infinity();
  // Bright-state parameter of the side with the smallest detection probability.
  double alpha = 0.1;
  std::optional<double> coincidence_window;
  bool move_to_memory = false;  // end node holding the first link moves it to memory (color center)
  int n_pairs = 10;
  void validate() const;
};

struct Scenario {
  Topology topology;
  HardwareParams hardware;
  ProtocolConfig protocol;
  void validate() const;
};

// Heralding-side quantities of one elementary link.
struct LinkModel {
  LinkOutcome outcome;
  double attempt_duration = 0.0;
  double p_left = 0.0;
  double p_right = 0.0;
  double alpha_left = 0.0;
  double alpha_right = 0.0;
};

double detection_prob_at(const HardwareParams& hw, double length_km, double attenuation_db_per_km);
double attempt_duration(const Scenario& sc, int link);
std::vector<LinkModel> build_link_models(const Scenario& sc);

struct DeliveryRecord {
  int index = 0;
  double completion_time = 0.0;
  DensityMatrix state;  // (first end node, last end node), Pauli frame corrected
  BellIndex frame;
  std::vector<long> attempts;  // per link, cumulative over discarded sessions
  double storage_time = 0.0;   // age of the first link at the swap (0 without repeater)
  int discards = 0;
};

struct TraceEvent {
  double time = 0.0;
  int node = 0;
  std::string kind;
  std::string detail;
};

struct SimulationResult {
  std::vector<DeliveryRecord> records;
  std::vector<TraceEvent> trace;
  double local_circuit_time = 0.0;  // summed move and swap durations
  long events = 0;
};

struct SimulationOptions {
  std::uint64_t seed = 1;
  std::uint64_t run = 0;
  bool trace = false;
  // Upper bound on simulated time; reaching it stops the run early.
  double horizon = std::numeric_limits<double>::infinity();
};

SimulationResult run_simulation(const Scenario& sc, const SimulationOptions& opt);

struct Metrics {
  int n = 0;
  double rate = 0.0;
  double sem_rate = 0.0;
  double f_tel = 0.0;
  double sem_f = 0.0;
  double f_dummy = 0.0;
  double f_trap = 0.0;
  double q_bound = 0.0;
  bool vbqc_ok = false;
  double total_time = 0.0;
};

// Metrics over records from one or more runs; total_time is the summed
// duration of the runs that produced them.
Metrics compute_metrics(const std::vector<DeliveryRecord>& records, double total_time, double server_T);
Metrics compute_metrics(const std::vector<DeliveryRecord>& records, double server_T);

struct Evaluation {
  Metrics metrics;
  std::vector<SimulationResult> runs;
};

// Runs n_runs independent simulations (run index 0..n_runs-1) and pools them.
// A run stopped by the horizon counts the full horizon as elapsed time; with no
// deliveries at all the metrics are zero.
Evaluation evaluate(const Scenario& sc, std::uint64_t seed, int n_runs, double server_T, bool keep_runs = false,
                    double horizon = std::numeric_limits<double>::infinity());

}  // namespace rf
