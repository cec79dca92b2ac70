#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <random>

#include "repeaterforge/circuits.hpp"

using namespace rf;

namespace {

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

DensityMatrix plus_state() {
  Vec v(2);
  v << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  return DensityMatrix::pure(v);
}

DensityMatrix two_pairs() { return tensor(bell_state({0, 0}), bell_state({0, 0})); }

}  // namespace

TEST_CASE("noiseless BSM circuits implement an exact entanglement swap for every outcome") {
  for (Platform p : {Platform::ColorCenter, Platform::TrappedIon, Platform::Abstract})
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        DensityMatrix out = bell_state_measurement_forced(two_pairs(), p, a, b);
        BellIndex idx = bsm_outcome_index(p, a, b);
        CHECK(fidelity(out, bell_state(idx)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(avg_teleportation_fidelity(apply_pauli_correction(out, idx)) == doctest::Approx(1.0).epsilon(1e-12));
      }
}

TEST_CASE("BSM outcome tables are bijective") {
  for (Platform p : {Platform::ColorCenter, Platform::TrappedIon, Platform::Abstract}) {
    int seen = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        BellIndex i = bsm_outcome_index(p, a, b);
        seen |= 1 << (2 * i.x + i.z);
      }
    CHECK(seen == 15);
  }
}

TEST_CASE("BSM on arbitrary Bell inputs swaps the composed frame") {
  for (Platform p : {Platform::ColorCenter, Platform::TrappedIon, Platform::Abstract})
    for (int f1 = 0; f1 < 4; ++f1)
      for (int f2 = 0; f2 < 4; ++f2) {
        BellIndex i1{f1 >> 1, f1 & 1}, i2{f2 >> 1, f2 & 1};
        DensityMatrix four = tensor(bell_state(i1), bell_state({0, 0}));
        four = apply_unitary(four, pauli_correction(i2), {2});
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            DensityMatrix un = bell_state_measurement_forced(four, p, a, b);
            BellIndex frame = compose(compose(i1, i2), bsm_outcome_index(p, a, b));
            CHECK(fidelity(un, bell_state(frame)) == doctest::Approx(1.0).epsilon(1e-12));
          }
      }
}

TEST_CASE("perfect gates give unit teleportation fidelity in the sampled BSM") {
  std::mt19937_64 rng(7);
  for (const char* base : {"cc-baseline", "ti-baseline"}) {
    HardwareParams hw = perfect_hardware(load_baseline(base));
    for (int i = 0; i < 8; ++i) {
      BsmResult r = bell_state_measurement(two_pairs(), hw, rng);
      CHECK(avg_teleportation_fidelity(apply_pauli_correction(r.state, r.frame)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    HardwareParams a = map_to_abstract(hw);
    BsmResult r = bell_state_measurement(two_pairs(), a, rng);
    CHECK(avg_teleportation_fidelity(apply_pauli_correction(r.state, r.frame)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("baseline gates reduce the swapped fidelity") {
  std::mt19937_64 rng(9);
  for (const char* base : {"cc-baseline", "ti-baseline"}) {
    HardwareParams hw = load_baseline(base);
    double acc = 0;
    const int n = 200;
    for (int i = 0; i < n; ++i) {
      BsmResult r = bell_state_measurement(two_pairs(), hw, rng);
      acc += fidelity(apply_pauli_correction(r.state, r.frame), bell_state({0, 0}));
    }
    CHECK(acc / n < 0.99);
  }
}

TEST_CASE("abstract swap applies the swap-quality channel") {
  std::mt19937_64 rng(11);
  HardwareParams a = map_to_abstract(perfect_hardware(load_baseline("ti-baseline")));
  a.set("swap_quality", 0.8);
  BsmResult r = bell_state_measurement(two_pairs(), a, rng);
  DensityMatrix fixed = apply_pauli_correction(r.state, r.frame);
  CHECK(fidelity(fixed, bell_state({0, 0})) == doctest::Approx((1 + 3 * 0.8) / 4).epsilon(1e-12));
  CHECK(r.duration == a.get("swap_duration"));
}

TEST_CASE("BSM durations follow the hardware tables") {
  std::mt19937_64 rng(13);
  HardwareParams ti = load_baseline("ti-baseline");
  BsmResult r = bell_state_measurement(two_pairs(), ti, rng);
  CHECK(r.duration == doctest::Approx(ti.get("ms_duration") + ti.get("z_duration") + ti.get("readout_duration")));
  HardwareParams cc = load_baseline("cc-baseline");
  BsmResult c = bell_state_measurement(two_pairs(), cc, rng);
  CHECK(c.duration == doctest::Approx(bsm_duration(cc)));
  CHECK(bsm_duration(cc) == doctest::Approx(1029.415e-6).epsilon(1e-12));
}

TEST_CASE("move to memory: perfect gates preserve, baseline gates reduce fidelity") {
  HardwareParams cc = load_baseline("cc-baseline");
  for (int k = 0; k < 4; ++k) {
    BellIndex idx{k >> 1, k & 1};
    MoveResult m = move_to_memory(bell_state(idx), perfect_hardware(cc));
    CHECK(fidelity(m.state, bell_state(idx)) == doctest::Approx(1.0).epsilon(1e-12));
    MoveResult noisy = move_to_memory(bell_state(idx), cc);
    CHECK(fidelity(noisy.state, bell_state(idx)) < 0.99);
    CHECK(noisy.duration == doctest::Approx(move_duration(cc)));
  }
  CHECK_THROWS_AS(move_to_memory(bell_state({0, 0}), load_baseline("ti-baseline")), std::invalid_argument);
}

TEST_CASE("emission: perfect Phi+, depolarized with p = 4(1-F)/3, TI duration 50 us") {
  HardwareParams ti = load_baseline("ti-baseline");
  EmissionResult e = emit_entangled_photon_state(ti);
  CHECK(e.duration == doctest::Approx(50e-6));
  const double p = 4 * (1 - 0.99) / 3;
  CHECK(fidelity(e.state, bell_state({0, 0})) == doctest::Approx(1 - 3 * p / 4).epsilon(1e-14));
  CHECK(fidelity(emit_entangled_photon_state(perfect_hardware(ti)).state, bell_state({0, 0})) ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("induced dephasing probability") {
  CHECK(induced_dephasing_prob(0, 0.3, 5300) == 0.0);
  CHECK(induced_dephasing_prob(1, 0.5, 5300) == doctest::Approx(0.5 * (1 - std::exp(-1.0 / 5300))).epsilon(1e-14));
  CHECK(induced_dephasing_prob(100000000, 0.1, 5300) == doctest::Approx(0.5).epsilon(1e-12));
  HardwareParams cc = load_baseline("cc-baseline");
  DensityMatrix b = bell_state({0, 0});
  CHECK(max_abs(apply_induced_dephasing(b, 0, 0, 0.1, cc, 1).matrix() - b.matrix()) < 1e-15);
  // Two applications compose to 1 - 2p' = (1 - 2p)^2.
  const double p = induced_dephasing_prob(500, 0.1, cc.get("n_1e"));
  DensityMatrix twice = apply_induced_dephasing(b, 0, 500, 0.1, cc, 2);
  CHECK(std::abs(twice(0, 3)) == doctest::Approx(0.5 * (1 - 2 * p) * (1 - 2 * p)).epsilon(1e-12));
}

TEST_CASE("idle decoherence") {
  HardwareParams cc = load_baseline("cc-baseline");
  DensityMatrix plus = plus_state();
  CHECK(max_abs(decohere_idle(plus, 0, QubitRole::Memory, 0.0, cc).matrix() - plus.matrix()) < 1e-15);
  // Amplitude damping then phase damping on the carbon (T2 = 1 s, T1 = 10 h) for 1 s.
  DensityMatrix out = decohere_idle(plus, 0, QubitRole::Memory, 1.0, cc);
  CHECK(std::abs(out(0, 1)) == doctest::Approx(0.5 * std::exp(-1.0) * std::exp(-1.0 / 36000)).epsilon(1e-12));
  DensityMatrix pd = apply_channel(plus, PhaseDamping{1.0, 36000, 1.0}, {0});
  CHECK(std::abs(pd(0, 1)) == doctest::Approx(0.5 * std::exp(-1.0) * std::exp(-1.0 / 72000)).epsilon(1e-12));
}

TEST_CASE("ions in one trap share the dephasing rate") {
  HardwareParams ti = load_baseline("ti-baseline");
  DensityMatrix phi = bell_state({0, 0});
  const double r = 0.7, t = 0.02;
  DensityMatrix both = decohere_idle(decohere_idle(phi, 0, QubitRole::Memory, t, ti, r), 1, QubitRole::Memory, t, ti, r);
  // Each ion adds the phase e^{-2i r t/T_c} to <00|rho|11>.
  const double phase = std::arg(both(0, 3));
  CHECK(std::abs(both(0, 3)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(std::remainder(phase + 4 * r * t / ti.get("coherence_time"), 2 * M_PI)) < 1e-12);
  DensityMatrix psi = bell_state({1, 0});
  DensityMatrix p2 = decohere_idle(decohere_idle(psi, 0, QubitRole::Memory, t, ti, r), 1, QubitRole::Memory, t, ti, r);
  CHECK(max_abs(p2.matrix() - psi.matrix()) < 1e-14);
}
