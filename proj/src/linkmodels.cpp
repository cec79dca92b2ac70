#include "repeaterforge/linkmodels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rf {

namespace {

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

DensityMatrix projector(int index) { return DensityMatrix::basis_state(2, index); }

DensityMatrix normalized_or_mixed(const Mat& m) {
  const double t = m.trace().real();
  if (!(t > 0.0)) return DensityMatrix::maximally_mixed(2);
  return DensityMatrix(m / t, false);
}

}  // namespace

void DoubleClickParams::validate() const {
  check_unit(p_A, "p_A");
  check_unit(p_B, "p_B");
  check_unit(V, "visibility");
  if (!(p_dc >= 0.0 && p_dc < 1.0)) throw std::invalid_argument("dark-count probability must lie in [0,1)");
  if (!(F_em_A >= 0.25 && F_em_A <= 1.0) || !(F_em_B >= 0.25 && F_em_B <= 1.0))
    throw std::invalid_argument("emission fidelity must lie in [0.25,1]");
  if (coincidence) {
    check_unit(coincidence->p_ph_ph, "p_ph_ph");
    check_unit(coincidence->p_ph_dc, "p_ph_dc");
    check_unit(coincidence->p_dc_dc, "p_dc_dc");
  }
}

void SingleClickParams::validate() const {
  check_unit(alpha_A, "alpha_A");
  check_unit(alpha_B, "alpha_B");
  check_unit(p_A, "p_A");
  check_unit(p_B, "p_B");
  check_unit(V, "visibility");
  if (!(p_dc >= 0.0 && p_dc < 1.0)) throw std::invalid_argument("dark-count probability must lie in [0,1)");
  check_unit(p_dexc, "p_dexc");
  if (!(sigma_phase >= 0.0)) throw std::invalid_argument("phase uncertainty must be nonnegative");
}

DoubleClickCases double_click_cases(const DoubleClickParams& p) {
  p.validate();
  const double q = 1.0 - p.p_dc;
  const bool nr = p.mode == DetectorMode::NR;
  const double pp = p.p_A * p.p_B;
  DoubleClickCases c;
  c.q_em = (4 * p.F_em_A - 1) * (4 * p.F_em_B - 1) / 9.0;
  c.p_T = 0.5 * pp * p.V * (nr ? std::pow(q, 4) : q * q);
  c.p_F1 = 0.5 * pp * (1 - p.V) * (nr ? std::pow(q, 4) : q * q);
  c.p_F2 = nr ? 0.0 : 0.5 * pp * (1 + p.V) * p.p_dc * q * q;
  c.p_F3 = 2 * (p.p_A * (1 - p.p_B) + (1 - p.p_A) * p.p_B) * p.p_dc * (nr ? std::pow(q, 3) : q * q);
  c.p_F4 = 4 * (1 - p.p_A) * (1 - p.p_B) * p.p_dc * p.p_dc * q * q;
  if (p.coincidence) {
    c.p_T *= p.coincidence->p_ph_ph;
    c.p_F1 *= p.coincidence->p_ph_ph;
    c.p_F2 *= p.coincidence->p_ph_dc;
    c.p_F3 *= p.coincidence->p_ph_dc;
    c.p_F4 *= p.coincidence->p_dc_dc;
  }
  return c;
}

LinkOutcome double_click_outcome(const DoubleClickParams& p) {
  const DoubleClickCases c = double_click_cases(p);
  const Mat anti = 0.5 * (projector(1).matrix() + projector(2).matrix());
  const Mat corr = 0.5 * (projector(0).matrix() + projector(3).matrix());
  const Mat mixed = Mat::Identity(4, 4) / 4.0;
  const double mixed_weight = (1 - c.q_em) * (c.p_T + c.p_F1 + c.p_F2) + c.p_F3 + c.p_F4;
  LinkOutcome out;
  out.success_prob = c.total();
  for (int branch = 0; branch < 2; ++branch) {
    const BellIndex idx = branch == 0 ? out.index_plus : out.index_minus;
    Mat rho = c.q_em * (c.p_T * bell_state(idx).matrix() + c.p_F1 * anti + c.p_F2 * corr) + mixed_weight * mixed;
    (branch == 0 ? out.state_plus : out.state_minus) = normalized_or_mixed(rho);
  }
  return out;
}

SingleClickCases single_click_cases(const SingleClickParams& p) {
  p.validate();
  const bool nr = p.mode == DetectorMode::NR;
  const double dc = p.p_dc;
  const double q = 1.0 - dc;
  const double keep = nr ? 1.0 - dc * dc : q;
  const double aa = p.alpha_A * p.alpha_B;
  SingleClickCases c;
  c.p1a = aa * keep * (p.p_A * (1 - p.p_B) + p.p_B * (1 - p.p_A));
  c.p1b = 2 * aa * (1 - p.p_A) * (1 - p.p_B) * q * dc;
  c.p1c = nr ? 0.0 : aa * p.p_A * p.p_B * (1 - (1 - p.V) / 2) * q;
  c.p2a = p.alpha_A * (1 - p.alpha_B) * keep * p.p_A;
  c.p2b = 2 * p.alpha_A * (1 - p.alpha_B) * (1 - p.p_A) * q * dc;
  c.p3a = p.alpha_B * (1 - p.alpha_A) * keep * p.p_B;
  c.p3b = 2 * p.alpha_B * (1 - p.alpha_A) * (1 - p.p_B) * q * dc;
  c.p4 = 2 * (1 - p.alpha_A) * (1 - p.alpha_B) * q * dc;
  return c;
}

double phase_dephasing_prob(double sigma_phase) {
  if (std::isinf(sigma_phase)) return 0.5;
  return 0.5 * -std::expm1(-sigma_phase * sigma_phase / 2.0);
}

LinkOutcome single_click_outcome(const SingleClickParams& p) {
  const SingleClickCases c = single_click_cases(p);
  const double p2 = c.p2(), p3 = c.p3();
  const double coh = std::sqrt(p.V * p2 * p3);
  LinkOutcome out;
  out.success_prob = c.total();
  for (int branch = 0; branch < 2; ++branch) {
    Mat rho = Mat::Zero(4, 4);
    rho(0, 0) = c.p1();
    rho(1, 1) = p2;
    rho(2, 2) = p3;
    rho(3, 3) = c.p4;
    rho(1, 2) = rho(2, 1) = branch == 0 ? coh : -coh;
    DensityMatrix st = normalized_or_mixed(rho);
    st = apply_channel(st, Dephasing{p.p_dexc / 2.0}, {0, 1});
    st = apply_channel(st, Dephasing{phase_dephasing_prob(p.sigma_phase)}, {0});
    (branch == 0 ? out.state_plus : out.state_minus) = st;
  }
  return out;
}

long sample_attempts(double success_prob, std::mt19937_64& rng) {
  if (!(success_prob > 0.0 && success_prob <= 1.0))
    throw std::invalid_argument("success probability must lie in (0,1]");
  if (success_prob == 1.0) return 1;
  std::geometric_distribution<long> g(success_prob);
  return g(rng) + 1;
}

LinkSample sample_link(const LinkOutcome& outcome, double attempt_duration, std::mt19937_64& rng) {
  if (!(attempt_duration > 0.0)) throw std::invalid_argument("attempt duration must be positive");
  LinkSample s;
  s.n_attempts = sample_attempts(outcome.success_prob, rng);
  s.delay = static_cast<double>(s.n_attempts) * attempt_duration;
  std::uniform_int_distribution<int> branch(0, 1);
  const bool plus = branch(rng) == 0;
  s.state = plus ? outcome.state_plus : outcome.state_minus;
  s.bell_index = plus ? outcome.index_plus : outcome.index_minus;
  return s;
}

}  // namespace rf
