#pragma once

namespace rf {

// Emission time density a e^{-a t0}; pure photon amplitude sqrt(2b) e^{-b (t - t0)} for t >= t0.
struct PhotonShape {
  double a = 1.0;
  double b = 1.0;
  double eta = 1.0;
  void validate() const;
};

struct WindowConfig {
  double T = 1.0;
  double tau = 1.0;
  void validate() const;
};

// Click-time density of a single photon (integrates to eta over [0, inf)).
double detection_density(const PhotonShape& s, double t);
double detection_probability(const PhotonShape& s, double T);

// Probabilities conditioned on both clicks falling inside the detection window.
double coincidence_prob_ph_ph(const PhotonShape& s, const WindowConfig& w);
double coincidence_prob_ph_dc(const PhotonShape& s, const WindowConfig& w);
double coincidence_prob_dc_dc(const WindowConfig& w);

// Hong-Ou-Mandel visibility of clicks accepted by both windows.
double visibility(const PhotonShape& s, const WindowConfig& w);

// a = ln2 / hl_emission, b = ln2 / hl_wavefunction (half-life of the amplitude).
PhotonShape shape_from_half_lives(double hl_wavefunction, double hl_emission, double eta = 1.0);
void half_lives(const PhotonShape& s, double& hl_wavefunction, double& hl_emission);

}  // namespace rf
