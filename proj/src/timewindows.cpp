#include "repeaterforge/timewindows.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace rf {

namespace {

constexpr double kDegenerateBand = 1e-3;
constexpr double kStep = 1e-2;

// (1 - e^{-x t}) / x, continuous at x = 0.
double one_minus_exp_over(double x, double t) {
  if (x == 0.0) return t;
  return -std::expm1(-x * t) / x;
}

bool near(double a, double target) { return std::abs(a - target) < kDegenerateBand * a; }

// Fourth-order symmetric estimate of f(a) from points at a +/- h and a +/- 2h.
double extrapolate(const std::function<double(double)>& f, double a) {
  const double h = kStep * a;
  return (4.0 * (f(a + h) + f(a - h)) - (f(a + 2 * h) + f(a - 2 * h))) / 6.0;
}

double pdet_unit(double a, double b, double T) {
  const double c = 2.0 * b;
  return 1.0 - std::exp(-c * T) * (1.0 + c * one_minus_exp_over(a - c, T));
}

double ph_ph_raw(double a, double b, double T, double tau) {
  const double d = a - 2 * b;
  const double d2 = d * d;
  const double s = a + 2 * b;
  const double v = a * a / (d * s) * -std::expm1(-2 * b * tau) - 4 * b * b / (d * s) * -std::expm1(-a * tau) +
                   a * a / d2 * (std::exp(-4 * b * T) - std::exp(2 * b * tau - 4 * b * T)) +
                   4 * b * b / d2 * (std::exp(-2 * a * T) - std::exp(a * tau - 2 * a * T)) -
                   4 * a * b / d2 *
                       (std::exp(-s * T) - (a * std::exp(2 * b * tau - s * T) + 2 * b * std::exp(a * tau - s * T)) / s);
  const double p = pdet_unit(a, b, T);
  return v / (p * p);
}

double ph_dc_raw(double a, double b, double T, double tau) {
  const double d = a - 2 * b;
  const double c = 2 * b;
  const double v1 = c * tau - std::expm1(-c * tau) + std::exp(-c * T) * (1 - c * tau) - std::exp(c * tau - c * T);
  const double v2 = a * tau - std::expm1(-a * tau) + std::exp(-a * T) * (1 - a * tau) - std::exp(a * tau - a * T);
  const double v = a / (c * d * T) * v1 - c / (a * d * T) * v2;
  return v / pdet_unit(a, b, T);
}

double vis_raw(double a, double b, double T, double tau) {
  const double d = a - 2 * b;
  const double d2 = d * d;
  const double s = a + 2 * b;
  const double v = a / s * -std::expm1(-2 * b * tau) +
                   2 * a * b * b / (d2 * (a - b)) * (std::exp(-2 * a * T) - std::exp(2 * (a - b) * tau - 2 * a * T)) +
                   a * a / d2 * (std::exp(-4 * b * T) - std::exp(2 * b * tau - 4 * b * T)) -
                   16 * a * b * b / (d2 * s) * (std::exp(-s * T) - std::exp(a * tau - s * T));
  const double p = pdet_unit(a, b, T);
  return v / (p * p * ph_ph_raw(a, b, T, tau));
}

}  // namespace

void PhotonShape::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("photon shape rate a must be positive");
  if (!(b > 0.0) || !std::isfinite(b)) throw std::invalid_argument("photon shape rate b must be positive");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("detector efficiency must lie in [0,1]");
}

void WindowConfig::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("detection window must be positive");
  if (!(tau >= 0.0)) throw std::invalid_argument("coincidence window must be nonnegative");
  if (tau > T) throw std::invalid_argument("coincidence window exceeds detection window");
}

double detection_density(const PhotonShape& s, double t) {
  s.validate();
  if (t < 0.0) return 0.0;
  return s.eta * 2.0 * s.a * s.b * std::exp(-2.0 * s.b * t) * one_minus_exp_over(s.a - 2.0 * s.b, t);
}

double detection_probability(const PhotonShape& s, double T) {
  s.validate();
  if (!(T >= 0.0)) throw std::invalid_argument("detection window must be nonnegative");
  if (std::isinf(T)) return s.eta;
  return s.eta * pdet_unit(s.a, s.b, T);
}

double coincidence_prob_ph_ph(const PhotonShape& s, const WindowConfig& w) {
  s.validate();
  w.validate();
  if (w.tau == 0.0) return 0.0;
  auto f = [&](double a) { return ph_ph_raw(a, s.b, w.T, w.tau); };
  return near(s.a, 2 * s.b) ? extrapolate(f, s.a) : f(s.a);
}

double coincidence_prob_ph_dc(const PhotonShape& s, const WindowConfig& w) {
  s.validate();
  w.validate();
  if (w.tau == 0.0) return 0.0;
  auto f = [&](double a) { return ph_dc_raw(a, s.b, w.T, w.tau); };
  return near(s.a, 2 * s.b) ? extrapolate(f, s.a) : f(s.a);
}

double coincidence_prob_dc_dc(const WindowConfig& w) {
  w.validate();
  const double r = (w.T - w.tau) / w.T;
  return 1.0 - r * r;
}

double visibility(const PhotonShape& s, const WindowConfig& w) {
  s.validate();
  w.validate();
  if (w.tau == 0.0) throw std::domain_error("visibility undefined when no coincidences are accepted");
  auto f = [&](double a) { return vis_raw(a, s.b, w.T, w.tau); };
  return near(s.a, 2 * s.b) || near(s.a, s.b) ? extrapolate(f, s.a) : f(s.a);
}

PhotonShape shape_from_half_lives(double hl_wavefunction, double hl_emission, double eta) {
  if (!(hl_wavefunction > 0.0) || !(hl_emission > 0.0)) throw std::invalid_argument("half-lives must be positive");
  PhotonShape s{std::log(2.0) / hl_emission, std::log(2.0) / hl_wavefunction, eta};
  s.validate();
  return s;
}

void half_lives(const PhotonShape& s, double& hl_wavefunction, double& hl_emission) {
  s.validate();
  hl_emission = std::log(2.0) / s.a;
  hl_wavefunction = std::log(2.0) / s.b;
}

}  // namespace rf
