#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <random>

#include "oracles.hpp"
#include "repeaterforge/linkmodels.hpp"

using namespace rf;

namespace {

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

DoubleClickParams random_double_click(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DoubleClickParams p;
  p.p_A = u(rng);
  p.p_B = u(rng);
  p.V = u(rng);
  p.p_dc = 0.3 * u(rng);
  p.F_em_A = 0.25 + 0.75 * u(rng);
  p.F_em_B = 0.25 + 0.75 * u(rng);
  p.mode = u(rng) < 0.5 ? DetectorMode::NR : DetectorMode::NNR;
  if (u(rng) < 0.5) p.coincidence = CoincidenceFactors{u(rng), u(rng), u(rng)};
  return p;
}

}  // namespace

TEST_CASE("ideal double click heralds Psi+ or Psi- with probability 1/2") {
  DoubleClickParams p;
  LinkOutcome o = double_click_outcome(p);
  CHECK(o.success_prob == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(max_abs(o.state_plus.matrix() - bell_state({1, 0}).matrix()) < 1e-15);
  CHECK(max_abs(o.state_minus.matrix() - bell_state({1, 1}).matrix()) < 1e-15);
  oracle::DoubleClickBranches b = oracle::double_click_povm(p);
  CHECK(b.prob_same == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(max_abs(b.rho_same / b.prob_same - bell_state({1, 0}).matrix()) < 1e-12);
}

TEST_CASE("dark counts alone: success 4 q^2 (1-q)^2 and maximally mixed state") {
  for (double q : {0.01, 0.1, 0.3}) {
    DoubleClickParams p;
    p.p_A = p.p_B = 0.0;
    p.p_dc = q;
    LinkOutcome o = double_click_outcome(p);
    CHECK(o.success_prob == doctest::Approx(4 * q * q * (1 - q) * (1 - q)).epsilon(1e-14));
    CHECK(max_abs(o.state_plus.matrix() - Mat::Identity(4, 4) / 4.0) < 1e-14);
  }
}

TEST_CASE("NR and NNR agree without dark counts") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    DoubleClickParams p = random_double_click(rng);
    p.p_dc = 0.0;
    p.mode = DetectorMode::NR;
    const double nr = double_click_outcome(p).success_prob;
    p.mode = DetectorMode::NNR;
    CHECK(double_click_outcome(p).success_prob == doctest::Approx(nr).epsilon(1e-15));
  }
}

TEST_CASE("distinguishable photons give the classical anti-correlated mixture") {
  DoubleClickParams p;
  p.V = 0.0;
  LinkOutcome o = double_click_outcome(p);
  Mat want = Mat::Zero(4, 4);
  want(1, 1) = want(2, 2) = 0.5;
  CHECK(max_abs(o.state_plus.matrix() - want) < 1e-15);
  oracle::DoubleClickBranches b = oracle::double_click_povm(p);
  CHECK(max_abs(b.rho_same / b.prob_same - want) < 1e-12);
}

TEST_CASE("maximally mixed emission leaves a maximally mixed heralded state") {
  DoubleClickParams p;
  p.F_em_A = 0.25;
  p.p_dc = 0.05;
  LinkOutcome o = double_click_outcome(p);
  CHECK(max_abs(o.state_plus.matrix() - Mat::Identity(4, 4) / 4.0) < 1e-14);
  CHECK(max_abs(o.state_minus.matrix() - Mat::Identity(4, 4) / 4.0) < 1e-14);
}

TEST_CASE("double-click closed form matches the POVM oracle on random draws") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    DoubleClickParams p = random_double_click(rng);
    LinkOutcome o = double_click_outcome(p);
    oracle::DoubleClickBranches b = oracle::double_click_povm(p);
    const double half = 0.5 * o.success_prob;
    CHECK(std::abs(b.prob_same - half) < 1e-10);
    CHECK(std::abs(b.prob_diff - half) < 1e-10);
    CHECK(max_abs(b.rho_same - half * o.state_plus.matrix()) < 1e-10);
    CHECK(max_abs(b.rho_diff - half * o.state_minus.matrix()) < 1e-10);
  }
}

TEST_CASE("double click without dark counts succeeds with p_A p_B / 2 times p_ph-ph") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    DoubleClickParams p = random_double_click(rng);
    p.p_dc = 0.0;
    const double scale = p.coincidence ? p.coincidence->p_ph_ph : 1.0;
    CHECK(double_click_outcome(p).success_prob == doctest::Approx(0.5 * p.p_A * p.p_B * scale).epsilon(1e-14));
  }
}

TEST_CASE("ideal branches are related by Z x I conjugation") {
  DoubleClickParams p;
  p.p_A = 0.3;
  p.p_B = 0.6;
  LinkOutcome o = double_click_outcome(p);
  DensityMatrix z = apply_unitary(o.state_plus, pauli::Z(), {0});
  CHECK(max_abs(z.matrix() - o.state_minus.matrix()) < 1e-12);
}

TEST_CASE("case probabilities are in [0,1] and states are valid for random parameters") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    DoubleClickParams d = random_double_click(rng);
    DoubleClickCases c = double_click_cases(d);
    for (double v : {c.p_T, c.p_F1, c.p_F2, c.p_F3, c.p_F4}) CHECK((v >= 0.0 && v <= 1.0));
    CHECK((c.total() >= 0.0 && c.total() <= 1.0));
    LinkOutcome o = double_click_outcome(d);
    CHECK(o.state_plus.is_valid());
    CHECK(o.state_minus.is_valid());

    SingleClickParams s;
    s.alpha_A = u(rng);
    s.alpha_B = u(rng);
    s.p_A = u(rng);
    s.p_B = u(rng);
    s.V = u(rng);
    s.p_dc = 0.3 * u(rng);
    s.p_dexc = 0.2 * u(rng);
    s.sigma_phase = u(rng);
    s.mode = u(rng) < 0.5 ? DetectorMode::NR : DetectorMode::NNR;
    SingleClickCases sc = single_click_cases(s);
    for (double v : {sc.p1a, sc.p1b, sc.p1c, sc.p2a, sc.p2b, sc.p3a, sc.p3b, sc.p4}) CHECK((v >= 0.0 && v <= 1.0));
    CHECK((sc.total() >= 0.0 && sc.total() <= 1.0));
    LinkOutcome so = single_click_outcome(s);
    CHECK(so.state_plus.is_valid());
    CHECK(so.state_minus.is_valid());
  }
}

TEST_CASE("parameter validation rejects out-of-range inputs") {
  DoubleClickParams d;
  d.V = 1.2;
  CHECK_THROWS_AS(double_click_outcome(d), std::invalid_argument);
  d = DoubleClickParams{};
  d.F_em_A = 0.1;
  CHECK_THROWS_AS(double_click_outcome(d), std::invalid_argument);
  SingleClickParams s;
  s.alpha_A = -0.1;
  CHECK_THROWS_AS(single_click_outcome(s), std::invalid_argument);
  s = SingleClickParams{};
  s.sigma_phase = -1.0;
  CHECK_THROWS_AS(single_click_outcome(s), std::invalid_argument);
}

TEST_CASE("single click with no bright population heralds |11> from dark counts only") {
  SingleClickParams p;
  p.alpha_A = p.alpha_B = 0.0;
  p.p_dc = 0.1;
  LinkOutcome o = single_click_outcome(p);
  CHECK(o.success_prob == doctest::Approx(2 * 0.1 * 0.9).epsilon(1e-14));
  CHECK(o.state_plus(3, 3).real() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("single click state matches hand evaluation at alpha = 0.1, p = 0.2") {
  SingleClickParams p;
  p.alpha_A = p.alpha_B = 0.1;
  p.p_A = p.p_B = 0.2;
  // Cases: both bright, one photon lost (case 1); exactly one side bright (cases 2, 3).
  const double p1 = 0.01 * 2 * 0.2 * 0.8;
  const double p2 = 0.1 * 0.9 * 0.2;
  const double total = p1 + 2 * p2;
  LinkOutcome o = single_click_outcome(p);
  CHECK(o.success_prob == doctest::Approx(total).epsilon(1e-14));
  CHECK(fidelity(o.state_plus, bell_state({1, 0})) == doctest::Approx(2 * p2 / total).epsilon(1e-14));
  CHECK(fidelity(o.state_minus, bell_state({1, 1})) == doctest::Approx(2 * p2 / total).epsilon(1e-14));
}

TEST_CASE("phase drift dephases one qubit with probability (1 - e^{-sigma^2/2})/2") {
  SingleClickParams p;
  p.alpha_A = p.alpha_B = 0.2;
  p.p_A = p.p_B = 0.5;
  const double coh = std::abs(single_click_outcome(p).state_plus(1, 2));
  CHECK(coh > 0.0);
  p.sigma_phase = 1.0;
  const double pd = 0.5 * -std::expm1(-0.5);
  CHECK(phase_dephasing_prob(1.0) == doctest::Approx(pd).epsilon(1e-15));
  CHECK(std::abs(single_click_outcome(p).state_plus(1, 2)) == doctest::Approx((1 - 2 * pd) * coh).epsilon(1e-13));
  p.sigma_phase = std::numeric_limits<double>::infinity();
  CHECK(phase_dephasing_prob(p.sigma_phase) == 0.5);
  CHECK(std::abs(single_click_outcome(p).state_plus(1, 2)) < 1e-15);
}

TEST_CASE("single-click success probability is nondecreasing for alpha, p <= 1/2") {
  const double alphas[] = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  const double probs[] = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  const double darks[] = {0.0, 0.01, 0.05, 0.1, 0.2};
  auto success = [](double aA, double aB, double pA, double pB, double dc, DetectorMode m) {
    SingleClickParams p;
    p.alpha_A = aA;
    p.alpha_B = aB;
    p.p_A = pA;
    p.p_B = pB;
    p.p_dc = dc;
    p.mode = m;
    return single_click_outcome(p).success_prob;
  };
  for (auto m : {DetectorMode::NR, DetectorMode::NNR})
    for (double aB : alphas)
      for (double pA : probs)
        for (double pB : probs)
          for (double dc : darks) {
            double prev = -1.0;
            for (double aA : alphas) {
              const double s = success(aA, aB, pA, pB, dc, m);
              CHECK(s >= prev - 1e-15);
              prev = s;
            }
            prev = -1.0;
            for (double x : probs) {
              const double s = success(aB, aB, x, pB, dc, m);
              CHECK(s >= prev - 1e-15);
              prev = s;
            }
            prev = -1.0;
            for (double d : darks) {
              const double s = success(aB, aB, pA, pB, d, m);
              CHECK(s >= prev - 1e-15);
              prev = s;
            }
          }
}

TEST_CASE("single-click success probability is not monotone once two photons are likely") {
  // Two clicks are a failed herald for resolving detectors.
  SingleClickParams p;
  p.p_A = p.p_B = 1.0;
  p.alpha_A = p.alpha_B = 0.1;
  CHECK(single_click_outcome(p).success_prob > 0.0);
  p.alpha_A = p.alpha_B = 1.0;
  CHECK(single_click_outcome(p).success_prob == 0.0);

  p.alpha_A = p.alpha_B = 0.8;
  p.p_A = 0.9;
  const double lower_p = single_click_outcome(p).success_prob;
  p.p_A = 1.0;
  CHECK(single_click_outcome(p).success_prob < lower_p);

  // One side always delivers a photon, so a dark click can only spoil the herald.
  p.alpha_A = 0.0;
  p.alpha_B = 1.0;
  CHECK(single_click_outcome(p).success_prob == doctest::Approx(1.0));
  p.p_dc = 0.2;
  CHECK(single_click_outcome(p).success_prob < 1.0);
}

TEST_CASE("attempt sampling: certain success, geometric mean and determinism") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) CHECK(sample_attempts(1.0, rng) == 1);
  const int n = 100000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double k = static_cast<double>(sample_attempts(0.25, rng));
    sum += k;
    sum2 += k * k;
  }
  const double mean = sum / n, sem = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 4.0) < 3 * sem);

  DoubleClickParams lossy;
  lossy.p_A = lossy.p_B = 0.3;
  LinkOutcome o = double_click_outcome(lossy);
  std::mt19937_64 a(99), b(99);
  for (int i = 0; i < 50; ++i) {
    LinkSample x = sample_link(o, 1e-5, a), y = sample_link(o, 1e-5, b);
    CHECK(x.n_attempts == y.n_attempts);
    CHECK(x.bell_index == y.bell_index);
    CHECK(x.delay == doctest::Approx(x.n_attempts * 1e-5));
  }
  CHECK_THROWS_AS(sample_attempts(0.0, rng), std::invalid_argument);
}

TEST_CASE("heralded branches are chosen uniformly") {
  LinkOutcome o = double_click_outcome(DoubleClickParams{});
  std::mt19937_64 rng(21);
  int plus = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) plus += sample_link(o, 1.0, rng).bell_index == o.index_plus;
  CHECK(std::abs(plus - n / 2) < 3 * std::sqrt(n / 4.0));
}
