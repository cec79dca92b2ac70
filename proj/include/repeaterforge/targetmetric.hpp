#pragma once

namespace rf {

struct PerformanceTarget {
  double fidelity = 0.8717;  // average teleportation fidelity
  double rate = 0.1;         // Hz
  double server_T = 100.0;   // s
  void validate() const;
};

// Smallest average teleportation fidelity that supports VBQC at rate R with
// server memory coherence time T: (1 + e^{1/(2RT)} / sqrt2) / 2.
double vbqc_min_fidelity(double rate, double server_T);
// Target whose fidelity is the bound for (rate, server_T).
PerformanceTarget vbqc_target(double rate, double server_T);

double test_round_failure_prob(double f_dummy, double f_trap);

struct FailureBound {
  double q = 0.0;
  bool applicable = true;  // false when the averaged single-test failure exceeds 1/2
};
FailureBound avg_failure_bound(double f_dummy, double f_trap, double rate, double server_T);

struct TargetCheck {
  bool met = false;
  bool rate_met = false;
  bool fidelity_met = false;
  double rate_margin = 0.0;      // rate - target
  double fidelity_margin = 0.0;  // F_tel - target
};
TargetCheck targets_met(double rate, double f_tel, const PerformanceTarget& target);

}  // namespace rf
