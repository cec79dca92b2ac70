#include "repeaterforge/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

namespace rf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_unit(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("no-imperfection probability must lie in [0,1]");
}

// 1 - (1 - e)^{1/k} without cancellation for small e.
double shrink_error(double e, double k) {
  if (e >= 1.0) return std::isinf(k) ? 0.0 : 1.0;
  return -std::expm1(std::log1p(-e) / k);
}

}  // namespace

double no_imperfection_prob(ParamKind kind, double value) {
  switch (kind) {
    case ParamKind::Probability:
    case ParamKind::SwapQuality:
    case ParamKind::ReadoutFidelity: check_unit(value); return value;
    case ParamKind::ErrorProbability: check_unit(value); return 1.0 - value;
    case ParamKind::DepolFidelity:
      if (!(value >= 0.25 && value <= 1.0)) throw std::invalid_argument("fidelity must lie in [0.25,1]");
      return (4.0 * value - 1.0) / 3.0;
    case ParamKind::N1e:
      if (!(value > 0.0)) throw std::invalid_argument("N_1/e must be positive");
      return 0.5 * (1.0 + std::exp(-1.0 / value));
    case ParamKind::Lifetime:
      if (!(value > 0.0)) throw std::invalid_argument("lifetime must be positive");
      return std::exp(-1.0 / value);
    case ParamKind::IonCoherence:
      if (!(value > 0.0)) throw std::invalid_argument("coherence time must be positive");
      return std::exp(-1.0 / (value * value));
    case ParamKind::Fixed: break;
  }
  throw std::invalid_argument("fixed parameters have no no-imperfection probability");
}

double value_from_no_imperfection(ParamKind kind, double p) {
  check_unit(p);
  switch (kind) {
    case ParamKind::Probability:
    case ParamKind::SwapQuality:
    case ParamKind::ReadoutFidelity: return p;
    case ParamKind::ErrorProbability: return 1.0 - p;
    case ParamKind::DepolFidelity: return (3.0 * p + 1.0) / 4.0;
    case ParamKind::N1e:
      if (!(p > 0.5)) throw std::invalid_argument("N_1/e no-imperfection probability must exceed 1/2");
      return p == 1.0 ? kInf : -1.0 / std::log(2.0 * p - 1.0);
    case ParamKind::Lifetime:
      if (!(p > 0.0)) throw std::invalid_argument("lifetime no-imperfection probability must be positive");
      return p == 1.0 ? kInf : -1.0 / std::log(p);
    case ParamKind::IonCoherence:
      if (!(p > 0.0)) throw std::invalid_argument("coherence no-imperfection probability must be positive");
      return p == 1.0 ? kInf : std::sqrt(-1.0 / std::log(p));
    case ParamKind::Fixed: break;
  }
  throw std::invalid_argument("fixed parameters cannot be improved");
}

double improve_parameter(double baseline, ParamKind kind, double k) {
  if (!(k >= 1.0)) throw std::invalid_argument("improvement factor must be >= 1");
  switch (kind) {
    case ParamKind::Lifetime: no_imperfection_prob(kind, baseline); return baseline * k;
    case ParamKind::IonCoherence: no_imperfection_prob(kind, baseline); return baseline * std::sqrt(k);
    case ParamKind::ErrorProbability: no_imperfection_prob(kind, baseline); return shrink_error(baseline, k);
    case ParamKind::DepolFidelity:
      no_imperfection_prob(kind, baseline);
      return 1.0 - 0.75 * shrink_error(4.0 * (1.0 - baseline) / 3.0, k);
    case ParamKind::Fixed: throw std::invalid_argument("fixed parameters cannot be improved");
    default: break;
  }
  const double p = no_imperfection_prob(kind, baseline);
  return value_from_no_imperfection(kind, std::pow(p, 1.0 / k));
}

std::vector<std::string> improvable_parameters(Platform p) {
  std::vector<std::string> out;
  for (const auto& info : parameter_catalog(p))
    if (info.kind != ParamKind::Fixed) out.push_back(info.name);
  return out;
}

HardwareParams apply_improvements(const HardwareParams& base, const std::vector<std::string>& names,
                                  const std::vector<double>& k) {
  if (names.size() != k.size()) throw std::invalid_argument("one improvement factor per parameter is required");
  HardwareParams hw = base;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const ParamInfo& info = parameter_info(base.platform(), names[i]);
    hw.set(names[i], improve_parameter(base.get(names[i]), info.kind, k[i]));
    if (names[i] == "visibility" && base.platform() == Platform::TrappedIon)
      hw.set_visibility_factor(base.visibility_factor() * k[i]);
  }
  return hw;
}

double hardware_cost(const std::vector<double>& k) {
  double s = 0.0;
  for (double v : k) {
    if (!(v >= 1.0)) throw std::invalid_argument("improvement factor must be >= 1");
    s += v;
  }
  return s;
}

double total_cost(double f_tel, double rate, double h_c, const PerformanceTarget& target, const CostWeights& w) {
  double c = w.w3 * h_c;
  if (f_tel < target.fidelity) c += w.w1 * (1.0 + (target.fidelity - f_tel) * (target.fidelity - f_tel));
  if (rate < target.rate) c += w.w2 * (1.0 + (target.rate - rate) * (target.rate - rate));
  return c;
}

void OptimizationProblem::validate() const {
  scenario.validate();
  target.validate();
  for (const auto& name : parameters)
    if (parameter_info(scenario.hardware.platform(), name).kind == ParamKind::Fixed)
      throw std::invalid_argument("parameter '" + name + "' is fixed and cannot be optimized");
  if (n_runs < 1) throw std::invalid_argument("n_runs must be at least 1");
  if (!(alpha_min > 0.0 && alpha_min <= alpha_max && alpha_max < 1.0))
    throw std::invalid_argument("bright-state range must satisfy 0 < alpha_min <= alpha_max < 1");
  if (tune_coincidence && scenario.hardware.platform() != Platform::TrappedIon)
    throw std::invalid_argument("coincidence-window tuning needs the trapped-ion platform");
  if (!(horizon_factor > 0.0)) throw std::invalid_argument("horizon factor must be positive");
}

double coherence_time_scale(const HardwareParams& hw) {
  switch (hw.platform()) {
    case Platform::ColorCenter: return hw.get("carbon_T2");
    case Platform::TrappedIon: return hw.get("coherence_time");
    case Platform::Abstract: return hw.get("T2");
  }
  return kInf;
}

namespace {

Candidate run_candidate(const OptimizationProblem& problem, const HardwareParams& hw, std::vector<double> k,
                        const Tunables& t, std::uint64_t seed) {
  Scenario sc = problem.scenario;
  sc.hardware = hw;
  if (t.cutoff_time) sc.protocol.cutoff_time = *t.cutoff_time;
  if (t.alpha) sc.protocol.alpha = *t.alpha;
  if (t.coincidence_window) sc.protocol.coincidence_window = *t.coincidence_window;
  const double horizon = problem.horizon_factor * sc.protocol.n_pairs / problem.target.rate;
  const Evaluation ev = evaluate(sc, seed, problem.n_runs, problem.target.server_T, false, horizon);
  Candidate c;
  c.k = std::move(k);
  c.tunables = t;
  c.rate = ev.metrics.rate;
  c.sem_rate = ev.metrics.sem_rate;
  c.f_tel = ev.metrics.f_tel;
  c.sem_f = ev.metrics.sem_f;
  c.hardware_cost = c.k.empty() ? 0.0 : hardware_cost(c.k);
  c.cost = total_cost(c.f_tel, c.rate, c.hardware_cost, problem.target, problem.weights);
  c.meets_targets = targets_met(c.rate, c.f_tel, problem.target).met;
  return c;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

Candidate evaluate_candidate(const OptimizationProblem& problem, const std::vector<double>& k, const Tunables& t,
                             std::uint64_t seed) {
  const HardwareParams hw = apply_improvements(problem.scenario.hardware, problem.parameters, k);
  return run_candidate(problem, hw, k, t, seed);
}

void GaConfig::validate() const {
  if (population < 4) throw std::invalid_argument("population must be at least 4");
  if (generations < 1) throw std::invalid_argument("generations must be at least 1");
  if (tournament < 1 || tournament > population) throw std::invalid_argument("tournament size out of range");
  if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw std::invalid_argument("crossover rate must lie in [0,1]");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw std::invalid_argument("mutation rate must lie in [0,1]");
  if (!(mutation_sigma >= 0.0)) throw std::invalid_argument("mutation sigma must be nonnegative");
  if (elitism < 0 || elitism >= population) throw std::invalid_argument("elitism must lie in [0, population)");
  if (!(k_max > 1.0)) throw std::invalid_argument("k_max must exceed 1");
  if (!(var_tolerance_percent >= 0.0)) throw std::invalid_argument("VAR tolerance must be nonnegative");
  if (var_window < 1) throw std::invalid_argument("VAR window must be at least 1");
}

GaProblem make_ga_problem(const OptimizationProblem& problem) {
  problem.validate();
  GaProblem ga;
  ga.n_factors = static_cast<int>(problem.parameters.size());
  ga.n_tunables = int(problem.tune_cutoff) + int(problem.tune_alpha) + int(problem.tune_coincidence);
  ga.evaluate = [problem](const Genome& g, std::uint64_t seed) {
    std::vector<double> k(g.log_k.size());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = std::exp(g.log_k[i]);
    const HardwareParams hw = apply_improvements(problem.scenario.hardware, problem.parameters, k);
    Tunables t;
    std::size_t j = 0;
    if (problem.tune_cutoff) t.cutoff_time = coherence_time_scale(hw) * (0.1 + 0.9 * g.u.at(j++));
    if (problem.tune_alpha)
      t.alpha = problem.alpha_min * std::pow(problem.alpha_max / problem.alpha_min, g.u.at(j++));
    if (problem.tune_coincidence) t.coincidence_window = hw.get("detection_window") * (0.02 + 0.98 * g.u.at(j++));
    return run_candidate(problem, hw, k, t, seed);
  };
  return ga;
}

bool var_converged(const std::vector<double>& best, int window, double tolerance_percent) {
  if (!(tolerance_percent > 0.0)) return false;
  const int g = static_cast<int>(best.size());
  if (g < window + 1) return false;
  double cur = 0.0, prev = 0.0;
  for (int i = g - window; i < g; ++i) cur += best[i];
  for (int i = g - window - 1; i < g - 1; ++i) prev += best[i];
  cur /= window;
  prev /= window;
  if (prev == 0.0) return cur == 0.0;
  return std::abs(cur - prev) / std::abs(prev) * 100.0 <= tolerance_percent;
}

int evaluation_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("REPEATERFORGE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(threads, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

GaResult genetic_optimize(const GaProblem& problem, const GaConfig& config) {
  config.validate();
  if (problem.n_factors + problem.n_tunables < 1) throw std::invalid_argument("nothing to optimize");
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32), 0x6761u};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, config.mutation_sigma);
  const double log_k_max = std::log(config.k_max);
  const int threads = evaluation_threads(config.threads);

  struct Individual {
    Genome genome;
    std::optional<Candidate> result;
  };
  std::vector<Individual> pop(config.population);
  for (auto& ind : pop) {
    ind.genome.log_k.resize(problem.n_factors);
    ind.genome.u.resize(problem.n_tunables);
    for (auto& g : ind.genome.log_k) g = unit(rng) * log_k_max;
    for (auto& g : ind.genome.u) g = unit(rng);
  }

  GaResult out;
  std::vector<double> best_costs;
  for (int gen = 1; gen <= config.generations; ++gen) {
    parallel_for(config.population, threads, [&](int i) {
      if (!pop[i].result)
        pop[i].result = problem.evaluate(pop[i].genome, derive_seed(config.seed, gen, static_cast<std::uint64_t>(i)));
    });
    std::vector<int> order(config.population);
    for (int i = 0; i < config.population; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return pop[a].result->cost < pop[b].result->cost; });
    const Individual& best = pop[order[0]];
    if (out.history.empty() || best.result->cost <= out.best.cost) {
      out.best = *best.result;
      out.best_genome = best.genome;
    }
    best_costs.push_back(out.best.cost);
    out.history.push_back({gen, out.best.cost, out.best});
    if (var_converged(best_costs, config.var_window, config.var_tolerance_percent)) {
      out.var_terminated = true;
      break;
    }
    if (gen == config.generations) break;

    auto tournament = [&]() -> const Individual& {
      std::uniform_int_distribution<int> pick(0, config.population - 1);
      int w = pick(rng);
      for (int t = 1; t < config.tournament; ++t) {
        const int c = pick(rng);
        if (pop[c].result->cost < pop[w].result->cost) w = c;
      }
      return pop[w];
    };
    auto mutate = [&](double& g, double hi) {
      if (unit(rng) < config.mutation_rate) g = std::clamp(g + gauss(rng), 0.0, hi);
    };
    std::vector<Individual> next;
    for (int e = 0; e < config.elitism; ++e) next.push_back(pop[order[e]]);
    while (static_cast<int>(next.size()) < config.population) {
      const Individual& a = tournament();
      const Individual& b = tournament();
      Individual child;
      child.genome = a.genome;
      if (unit(rng) < config.crossover_rate) {
        for (int i = 0; i < problem.n_factors; ++i)
          if (unit(rng) < 0.5) child.genome.log_k[i] = b.genome.log_k[i];
        for (int i = 0; i < problem.n_tunables; ++i)
          if (unit(rng) < 0.5) child.genome.u[i] = b.genome.u[i];
      }
      for (auto& g : child.genome.log_k) mutate(g, log_k_max);
      for (auto& g : child.genome.u) mutate(g, 1.0);
      next.push_back(std::move(child));
    }
    pop = std::move(next);
  }
  return out;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi >= lo) || n < 1) throw std::invalid_argument("geometric grid needs 0 < lo <= hi and n >= 1");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

MinimalSweepResult absolute_minimal_sweep(const OptimizationProblem& problem, const std::string& parameter,
                                          const MinimalSweepConfig& config) {
  problem.validate();
  if (config.k_grid.empty()) throw std::invalid_argument("k grid is empty");
  const HardwareParams& baseline = problem.scenario.hardware;
  const ParamInfo& info = parameter_info(baseline.platform(), parameter);
  if (info.kind == ParamKind::Fixed) throw std::invalid_argument("parameter '" + parameter + "' is fixed");
  HardwareParams perfect = perfect_hardware(baseline, config.perfect_detection);

  std::vector<Tunables> grid;
  const bool single = problem.scenario.protocol.scheme == Scheme::SingleClick;
  std::vector<std::optional<double>> alphas{std::nullopt}, windows{std::nullopt};
  if (single && !config.alphas.empty()) alphas.assign(config.alphas.begin(), config.alphas.end());
  if (!config.coincidence_windows.empty()) windows.assign(config.coincidence_windows.begin(), config.coincidence_windows.end());
  for (double fc : config.cutoff_fractions)
    for (const auto& a : alphas)
      for (const auto& w : windows) {
        Tunables t;
        t.cutoff_time = fc;  // fraction, resolved per hardware below
        t.alpha = a;
        t.coincidence_window = w;
        grid.push_back(t);
      }

  MinimalSweepResult res;
  res.parameter = parameter;
  for (double k : config.k_grid) {
    HardwareParams hw = perfect;
    const double value = improve_parameter(baseline.get(parameter), info.kind, k);
    hw.set(parameter, value);
    if (parameter == "visibility" && baseline.platform() == Platform::TrappedIon)
      hw.set_visibility_factor(baseline.visibility_factor() * k);
    std::optional<SweepPoint> best;
    for (const Tunables& g : grid) {
      Tunables t = g;
      t.cutoff_time = *g.cutoff_time * coherence_time_scale(hw);
      SweepPoint p;
      p.k = k;
      p.value = value;
      p.tunables = t;
      p.result = run_candidate(problem, hw, {}, t, config.seed);
      res.points.push_back(p);
      if (p.result.meets_targets && (!best || p.result.f_tel > best->result.f_tel)) best = p;
    }
    if (best) {
      res.feasible = true;
      res.minimal = best;
      break;
    }
  }
  return res;
}

}  // namespace rf
