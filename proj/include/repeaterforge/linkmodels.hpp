#pragma once

#include <optional>
#include <random>

#include "repeaterforge/qstate.hpp"

namespace rf {

enum class DetectorMode { NR, NNR };

struct CoincidenceFactors {
  double p_ph_ph = 1.0;
  double p_ph_dc = 1.0;
  double p_dc_dc = 1.0;
};

struct DoubleClickParams {
  double p_A = 1.0;
  double p_B = 1.0;
  double V = 1.0;
  double p_dc = 0.0;
  double F_em_A = 1.0;
  double F_em_B = 1.0;
  DetectorMode mode = DetectorMode::NR;
  std::optional<CoincidenceFactors> coincidence;
  void validate() const;
};

struct DoubleClickCases {
  double p_T = 0.0;
  double p_F1 = 0.0;
  double p_F2 = 0.0;
  double p_F3 = 0.0;
  double p_F4 = 0.0;
  double q_em = 1.0;
  double total() const { return p_T + p_F1 + p_F2 + p_F3 + p_F4; }
};

struct SingleClickParams {
  double alpha_A = 0.1;
  double alpha_B = 0.1;
  double p_A = 1.0;
  double p_B = 1.0;
  double V = 1.0;
  double p_dc = 0.0;
  double p_dexc = 0.0;
  double sigma_phase = 0.0;
  DetectorMode mode = DetectorMode::NR;
  void validate() const;
};

struct SingleClickCases {
  double p1a = 0.0, p1b = 0.0, p1c = 0.0;
  double p2a = 0.0, p2b = 0.0;
  double p3a = 0.0, p3b = 0.0;
  double p4 = 0.0;
  double p1() const { return p1a + p1b + p1c; }
  double p2() const { return p2a + p2b; }
  double p3() const { return p3a + p3b; }
  double total() const { return p1() + p2() + p3() + p4; }
};

// Success probability summed over both heralded branches and the normalized
// state of each branch. Qubit 0 is side A.
struct LinkOutcome {
  double success_prob = 0.0;
  DensityMatrix state_plus;
  DensityMatrix state_minus;
  BellIndex index_plus{1, 0};
  BellIndex index_minus{1, 1};
};

DoubleClickCases double_click_cases(const DoubleClickParams& p);
LinkOutcome double_click_outcome(const DoubleClickParams& p);

SingleClickCases single_click_cases(const SingleClickParams& p);
double phase_dephasing_prob(double sigma_phase);
LinkOutcome single_click_outcome(const SingleClickParams& p);

struct LinkSample {
  long n_attempts = 1;
  double delay = 0.0;
  DensityMatrix state;
  BellIndex bell_index;
};

long sample_attempts(double success_prob, std::mt19937_64& rng);
// Draws the attempt count, then the heralded branch (uniform), from one stream.
LinkSample sample_link(const LinkOutcome& outcome, double attempt_duration, std::mt19937_64& rng);

}  // namespace rf
