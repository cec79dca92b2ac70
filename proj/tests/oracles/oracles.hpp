#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "repeaterforge/linkmodels.hpp"
#include "repeaterforge/timewindows.hpp"

namespace rf::oracle {

// Brute-force double-click midpoint: two emitters and four photonic modes
// (H_A, H_B, V_A, V_B), Werner emission, amplitude-damping loss and the
// dark-count-dressed single-click POVM elements. Each branch is unnormalized.
struct DoubleClickBranches {
  double prob_same = 0.0;  // same polarizing beam splitter
  double prob_diff = 0.0;  // different polarizing beam splitters
  Eigen::Matrix4cd rho_same = Eigen::Matrix4cd::Zero();
  Eigen::Matrix4cd rho_diff = Eigen::Matrix4cd::Zero();
};
DoubleClickBranches double_click_povm(const DoubleClickParams& p);

// Detection-time density p(t) = 2ab eta/(a-2b) (e^{-2bt} - e^{-at}); the nested
// variant integrates p_em(t0)|psi_{t0}(t)|^2 over t0 instead.
double quad_detection_density(const PhotonShape& s, double t);
double quad_detection_density_nested(const PhotonShape& s, double t);
double quad_detection_probability(const PhotonShape& s, double T);
double quad_ph_ph(const PhotonShape& s, double T, double tau);
double quad_ph_dc(const PhotonShape& s, double T, double tau);
double quad_dc_dc(double T, double tau);
// Overlap of the two-photon interference term over the accepted click pairs,
// relative to the non-interfering coincidences. The nested variant also
// integrates the emission time numerically.
double quad_visibility(const PhotonShape& s, double T, double tau);
double quad_visibility_nested(const PhotonShape& s, double T, double tau);

// Teleportation by explicit Bell measurement and correction, averaged over
// the Bloch sphere with product Gauss-Legendre quadrature.
double teleportation_fidelity(const Eigen::Matrix4cd& sigma, int n_theta = 16, int n_phi = 32);

struct SuiteResult {
  std::string name;
  int passed = 0;
  int total = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  bool ok() const { return total > 0 && passed == total; }
};

SuiteResult double_click_suite(int n_draws, std::uint64_t seed);
SuiteResult time_window_suite(int n_tuples, std::uint64_t seed);
SuiteResult teleportation_suite(std::uint64_t seed);
SuiteResult vbqc_bound_suite();

std::vector<SuiteResult> all_suites(std::uint64_t seed);

}  // namespace rf::oracle
