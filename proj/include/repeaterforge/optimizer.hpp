#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "repeaterforge/engine.hpp"
#include "repeaterforge/hardware.hpp"
#include "repeaterforge/targetmetric.hpp"

namespace rf {

// Probability of no imperfection for a parameter value and its inverse.
double no_imperfection_prob(ParamKind kind, double value);
double value_from_no_imperfection(ParamKind kind, double p_ni);
// p_ni -> p_ni^{1/k}, mapped back to the parameter's own units.
double improve_parameter(double baseline, ParamKind kind, double k);

// Parameters of the platform that can be improved (every non-Fixed entry).
std::vector<std::string> improvable_parameters(Platform p);

// Applies one improvement factor per named parameter. Improving the trapped-ion
// visibility also scales the photon-shape visibility used with a coincidence window.
HardwareParams apply_improvements(const HardwareParams& base, const std::vector<std::string>& names,
                                  const std::vector<double>& k);

struct CostWeights {
  double w1 = 1e20;
  double w2 = 1e20;
  double w3 = 1.0;
};

double hardware_cost(const std::vector<double>& k);
double total_cost(double f_tel, double rate, double h_c, const PerformanceTarget& target, const CostWeights& w);

struct Tunables {
  std::optional<double> cutoff_time;
  std::optional<double> alpha;
  std::optional<double> coincidence_window;
};

struct Candidate {
  std::vector<double> k;
  Tunables tunables;
  double rate = 0.0;
  double sem_rate = 0.0;
  double f_tel = 0.0;
  double sem_f = 0.0;
  double hardware_cost = 0.0;
  double cost = 0.0;
  bool meets_targets = false;
};

struct OptimizationProblem {
  Scenario scenario;  // baseline hardware and protocol
  std::vector<std::string> parameters;
  PerformanceTarget target;
  CostWeights weights;
  int n_runs = 10;
  bool tune_cutoff = true;
  bool tune_alpha = false;
  bool tune_coincidence = false;
  double alpha_min = 1e-3;
  double alpha_max = 0.5;
  double horizon_factor = 50.0;  // simulated-time cap per run, in units of n_pairs / target rate
  void validate() const;
};

// Memory coherence time that sets the cut-off range [0.1 T_C, T_C].
double coherence_time_scale(const HardwareParams& hw);

// Runs the scenario with the candidate's improvements and tunables.
Candidate evaluate_candidate(const OptimizationProblem& problem, const std::vector<double>& k, const Tunables& t,
                             std::uint64_t seed);

struct GaConfig {
  int population = 150;
  int generations = 200;
  int tournament = 3;
  double crossover_rate = 0.8;
  double mutation_rate = 0.1;
  double mutation_sigma = 0.2;
  int elitism = 1;
  double k_max = 100.0;
  double var_tolerance_percent = 0.0;  // 0 disables the VAR criterion
  int var_window = 15;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: hardware concurrency capped by REPEATERFORGE_THREADS
  void validate() const;
};

// Genome: log improvement factors followed by tunables normalized to [0,1].
struct Genome {
  std::vector<double> log_k;
  std::vector<double> u;
};

struct GaProblem {
  int n_factors = 0;
  int n_tunables = 0;
  std::function<Candidate(const Genome&, std::uint64_t seed)> evaluate;
};

struct GenerationRecord {
  int generation = 0;
  double best_cost = 0.0;
  Candidate best;
};

struct GaResult {
  Candidate best;
  Genome best_genome;
  std::vector<GenerationRecord> history;
  bool var_terminated = false;
};

GaProblem make_ga_problem(const OptimizationProblem& problem);
GaResult genetic_optimize(const GaProblem& problem, const GaConfig& config);
// VAR check after 1-based generation g on per-generation best costs.
bool var_converged(const std::vector<double>& best_costs, int window, double tolerance_percent);

int evaluation_threads(int requested);
// Evaluates fn(i) for i in [0, n) on a worker pool; results are placed by index.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

struct SweepPoint {
  double k = 1.0;
  double value = 0.0;
  Tunables tunables;
  Candidate result;
};

struct MinimalSweepResult {
  bool feasible = false;
  std::string parameter;
  std::optional<SweepPoint> minimal;
  std::vector<SweepPoint> points;  // every evaluated (k, tunables) point
};

struct MinimalSweepConfig {
  std::vector<double> k_grid;  // increasing, starting at 1
  std::vector<double> cutoff_fractions{1.0};
  std::vector<double> alphas;
  std::vector<double> coincidence_windows;
  std::uint64_t seed = 1;
  bool perfect_detection = false;
};

std::vector<double> geometric_grid(double lo, double hi, int n);

// Every other improvable parameter perfect; the named one swept over k until the
// targets are met for some tunable combination.
MinimalSweepResult absolute_minimal_sweep(const OptimizationProblem& problem, const std::string& parameter,
                                          const MinimalSweepConfig& config);

}  // namespace rf
