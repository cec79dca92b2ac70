#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <limits>

#include "oracles.hpp"
#include "repeaterforge/timewindows.hpp"

using namespace rf;

namespace {

const PhotonShape kShape{0.3, 0.2, 0.8};

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_CASE("detection probability limits and quadrature") {
  CHECK(detection_probability(kShape, 0.0) == 0.0);
  CHECK(detection_probability(kShape, std::numeric_limits<double>::infinity()) == kShape.eta);
  CHECK(detection_probability(kShape, 400.0) == doctest::Approx(kShape.eta).epsilon(1e-12));
  for (double T : {0.1, 1.0, 5.0, 20.0})
    CHECK(rel(detection_probability(kShape, T), oracle::quad_detection_probability(kShape, T)) < 1e-8);
}

TEST_CASE("detection density equals the emission-time convolution") {
  for (double t : {0.05, 0.7, 3.0, 9.0})
    CHECK(rel(detection_density(kShape, t), oracle::quad_detection_density_nested(kShape, t)) < 1e-8);
}

TEST_CASE("detection probability is nondecreasing in T and linear in eta") {
  double prev = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double p = detection_probability(kShape, 0.3 * i);
    CHECK(p >= prev);
    prev = p;
  }
  PhotonShape half = kShape;
  half.eta = kShape.eta / 2;
  CHECK(detection_probability(half, 2.0) == doctest::Approx(detection_probability(kShape, 2.0) / 2).epsilon(1e-15));
}

TEST_CASE("photon-photon coincidences") {
  const double T = 5.0;
  CHECK(coincidence_prob_ph_ph(kShape, {T, 0.0}) == 0.0);
  CHECK(rel(coincidence_prob_ph_ph(kShape, {T, T}), oracle::quad_ph_ph(kShape, T, T)) < 1e-6);
  CHECK(coincidence_prob_ph_ph(kShape, {T, T}) == doctest::Approx(1.0).epsilon(1e-9));
  double prev = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double p = coincidence_prob_ph_ph(kShape, {T, T * i / 20.0});
    CHECK(p >= prev - 1e-15);
    prev = p;
  }
}

TEST_CASE("dark-count coincidences") {
  CHECK(coincidence_prob_dc_dc({2.0, 0.0}) == 0.0);
  CHECK(coincidence_prob_dc_dc({2.0, 2.0}) == 1.0);
  CHECK(coincidence_prob_dc_dc({2.0, 1.0}) == doctest::Approx(0.75));
  CHECK(rel(coincidence_prob_dc_dc({3.0, 0.7}), oracle::quad_dc_dc(3.0, 0.7)) < 1e-9);
}

TEST_CASE("photon-dark-count coincidences") {
  const double T = 4.0;
  CHECK(coincidence_prob_ph_dc(kShape, {T, 0.0}) == 0.0);
  CHECK(coincidence_prob_ph_dc(kShape, {T, T}) == doctest::Approx(1.0).epsilon(1e-9));
  for (double tau : {0.1, 1.0, 2.5})
    CHECK(rel(coincidence_prob_ph_dc(kShape, {T, tau}), oracle::quad_ph_dc(kShape, T, tau)) < 1e-6);
}

TEST_CASE("visibility against quadrature and its limits") {
  CHECK(rel(visibility(kShape, {5.0, 1.3}), oracle::quad_visibility_nested(kShape, 5.0, 1.3)) < 1e-5);
  CHECK(rel(visibility(kShape, {5.0, 1.3}), oracle::quad_visibility(kShape, 5.0, 1.3)) < 1e-5);
  // T -> inf then tau -> inf.
  CHECK(visibility(kShape, {400.0, 400.0}) == doctest::Approx(kShape.a / (kShape.a + 2 * kShape.b)).epsilon(1e-9));
  CHECK_THROWS_AS(visibility(kShape, {1.0, 0.0}), std::domain_error);
}

TEST_CASE("visibility is nonincreasing in tau at large T") {
  double prev = 2.0;
  for (int i = 1; i <= 40; ++i) {
    const double v = visibility(kShape, {60.0, 0.25 * i});
    CHECK(v <= prev + 1e-12);
    prev = v;
  }
}

TEST_CASE("degenerate a = 2b and a = b match quadrature") {
  for (PhotonShape s : {PhotonShape{0.4, 0.2, 0.9}, PhotonShape{0.2, 0.2, 0.9}}) {
    CHECK(rel(detection_probability(s, 3.0), oracle::quad_detection_probability(s, 3.0)) < 1e-8);
    CHECK(rel(coincidence_prob_ph_ph(s, {3.0, 0.8}), oracle::quad_ph_ph(s, 3.0, 0.8)) < 1e-6);
    CHECK(rel(coincidence_prob_ph_dc(s, {3.0, 0.8}), oracle::quad_ph_dc(s, 3.0, 0.8)) < 1e-6);
    CHECK(rel(visibility(s, {3.0, 0.8}), oracle::quad_visibility_nested(s, 3.0, 0.8)) < 1e-5);
  }
}

TEST_CASE("closed forms match quadrature on random tuples") {
  oracle::SuiteResult r = oracle::time_window_suite(20, 77);
  CHECK(r.passed == r.total);
}

TEST_CASE("half-life conversion and round trip") {
  PhotonShape s = shape_from_half_lives(3.01e-6, 6.79e-6);
  CHECK(s.a == doctest::Approx(std::log(2.0) / 6.79e-6).epsilon(1e-15));
  CHECK(s.b == doctest::Approx(std::log(2.0) / 3.01e-6).epsilon(1e-15));
  double hw = 0, he = 0;
  half_lives(s, hw, he);
  CHECK(hw == doctest::Approx(3.01e-6).epsilon(1e-15));
  CHECK(he == doctest::Approx(6.79e-6).epsilon(1e-15));
}

TEST_CASE("trapped-ion visibility at T = 17.5 us, tau = 0.5 us is 0.89 +/- 0.01") {
  const double v = visibility(shape_from_half_lives(3.01e-6, 6.79e-6), {17.5e-6, 0.5e-6});
  CHECK(std::abs(v - 0.89) <= 0.01);
}

TEST_CASE("invalid windows are rejected") {
  CHECK_THROWS_AS(coincidence_prob_ph_ph(kShape, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(coincidence_prob_dc_dc({0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(detection_probability(PhotonShape{-1.0, 1.0, 1.0}, 1.0), std::invalid_argument);
}
