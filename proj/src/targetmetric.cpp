#include "repeaterforge/targetmetric.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rf {

namespace {

void check_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

}  // namespace

void PerformanceTarget::validate() const {
  if (!(fidelity > 0.5 && fidelity <= 1.0)) throw std::invalid_argument("target fidelity must lie in (0.5,1]");
  check_positive(rate, "target rate");
  check_positive(server_T, "server memory time");
}

double vbqc_min_fidelity(double rate, double server_T) {
  check_positive(rate, "rate");
  check_positive(server_T, "server memory time");
  return 0.5 * (1.0 + std::exp(1.0 / (2.0 * rate * server_T)) / std::sqrt(2.0));
}

PerformanceTarget vbqc_target(double rate, double server_T) {
  return {vbqc_min_fidelity(rate, server_T), rate, server_T};
}

double test_round_failure_prob(double f_dummy, double f_trap) {
  check_unit(f_dummy, "dummy fidelity");
  check_unit(f_trap, "trap fidelity");
  return f_dummy * (1.0 - f_trap) + f_trap * (1.0 - f_dummy);
}

FailureBound avg_failure_bound(double f_dummy, double f_trap, double rate, double server_T) {
  check_positive(rate, "rate");
  check_positive(server_T, "server memory time");
  const double p = test_round_failure_prob(f_dummy, f_trap);
  const double decay = std::exp(-1.0 / (rate * server_T));
  FailureBound b;
  b.q = decay * p + 0.5 * (1.0 - decay);
  b.applicable = p <= 0.5;
  return b;
}

TargetCheck targets_met(double rate, double f_tel, const PerformanceTarget& target) {
  TargetCheck c;
  c.rate_margin = rate - target.rate;
  c.fidelity_margin = f_tel - target.fidelity;
  c.rate_met = c.rate_margin >= 0.0;
  c.fidelity_met = c.fidelity_margin >= 0.0;
  c.met = c.rate_met && c.fidelity_met;
  return c;
}

}  // namespace rf
