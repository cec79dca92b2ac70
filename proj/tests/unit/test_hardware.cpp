#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <limits>

#include "repeaterforge/hardware.hpp"

using namespace rf;

TEST_CASE("baselines load and validate") {
  HardwareParams cc = load_baseline("cc-baseline");
  HardwareParams ti = load_baseline("ti-baseline");
  CHECK(cc.platform() == Platform::ColorCenter);
  CHECK(ti.platform() == Platform::TrappedIon);
  CHECK(cc.get("ec_gate_duration") == doctest::Approx(500e-6));
  CHECK(ti.get("emission_duration") == doctest::Approx(50e-6));
  CHECK(ti.get("visibility") == doctest::Approx(0.89));
  CHECK_NOTHROW(cc.validate());
  CHECK_NOTHROW(ti.validate());
}

TEST_CASE("unknown baselines, platforms and parameters are rejected") {
  CHECK_THROWS_AS(load_baseline("no-such-baseline"), std::invalid_argument);
  CHECK_THROWS_AS(platform_from_string("superconducting"), std::invalid_argument);
  HardwareParams hp(Platform::Abstract);
  CHECK_THROWS_AS(hp.set("ms_fidelity", 0.9), std::invalid_argument);
  CHECK_THROWS_AS(hp.get("T2"), std::out_of_range);
}

TEST_CASE("validation checks ranges per parameter kind") {
  HardwareParams ti = load_baseline("ti-baseline");
  ti.set("ms_fidelity", 0.2);
  CHECK_THROWS_AS(ti.validate(), std::invalid_argument);
  ti = load_baseline("ti-baseline");
  ti.set("coherence_time", 0.0);
  CHECK_THROWS_AS(ti.validate(), std::invalid_argument);
  ti = load_baseline("ti-baseline");
  ti.set("dark_count", 1.5);
  CHECK_THROWS_AS(ti.validate(), std::invalid_argument);
  HardwareParams partial(Platform::Abstract);
  partial.set("T1", 1.0);
  CHECK_THROWS_AS(partial.validate(), std::invalid_argument);
}

TEST_CASE("inline hardware YAML parses") {
  const std::string text = R"(platform: abstract
parameters:
  visibility: 0.9
  dark_count: 1e-6
  p_det_zero: 0.1
  emission_fidelity: 0.99
  emission_duration: 1e-5
  swap_quality: 0.9
  swap_duration: 1e-3
  T1: .inf
  T2: 0.1
  attempt_overhead: 0
)";
  HardwareParams hp = parse_hardware_yaml(text, "inline");
  CHECK(hp.platform() == Platform::Abstract);
  CHECK(std::isinf(hp.get("T1")));
  CHECK_THROWS_AS(parse_hardware_yaml("platform: abstract\n", "inline"), std::invalid_argument);
}

TEST_CASE("swap quality of the baselines: CC 0.83, TI 0.94") {
  CHECK(swap_quality(load_baseline("cc-baseline")) == doctest::Approx(0.83).epsilon(0.005 / 0.83));
  CHECK(swap_quality(load_baseline("ti-baseline")) == doctest::Approx(0.94).epsilon(0.005 / 0.94));
  CHECK(swap_quality(perfect_hardware(load_baseline("cc-baseline"))) == 1.0);
  CHECK(swap_quality(perfect_hardware(load_baseline("ti-baseline"))) == 1.0);
}

TEST_CASE("abstract mapping copies link parameters and memory times") {
  HardwareParams ti = load_baseline("ti-baseline");
  HardwareParams a = map_to_abstract(ti);
  CHECK(a.platform() == Platform::Abstract);
  CHECK(a.get("p_det_zero") == ti.get("p_det_zero"));
  CHECK(a.get("T2") == ti.get("coherence_time"));
  CHECK(std::isinf(a.get("T1")));
  CHECK(a.get("swap_quality") == doctest::Approx(swap_quality(ti)));
  CHECK(a.get("swap_duration") == doctest::Approx(swap_duration(ti)));
  CHECK(a.get("attempt_overhead") == ti.get("init_duration"));

  HardwareParams cc = load_baseline("cc-baseline");
  HardwareParams b = map_to_abstract(cc);
  CHECK(b.get("T2") == cc.get("carbon_T2"));
  CHECK(b.get("T1") == cc.get("carbon_T1"));
  CHECK(b.get("attempt_overhead") == 0.0);
  CHECK(swap_duration(cc) == doctest::Approx(503.7e-6));
  CHECK(map_to_abstract(b).values() == b.values());
}

TEST_CASE("perfect hardware keeps durations and detection unless asked") {
  HardwareParams cc = load_baseline("cc-baseline");
  HardwareParams p = perfect_hardware(cc);
  CHECK(p.get("ec_gate_fidelity") == 1.0);
  CHECK(p.get("dark_count") == 0.0);
  CHECK(std::isinf(p.get("carbon_T2")));
  CHECK(std::isinf(p.get("n_1e")));
  CHECK(p.get("sigma_phase") == 0.0);
  CHECK(p.get("ec_gate_duration") == cc.get("ec_gate_duration"));
  CHECK(p.get("p_det_zero") == cc.get("p_det_zero"));
  CHECK(perfect_hardware(cc, true).get("p_det_zero") == 1.0);
  CHECK(std::isinf(perfect_hardware(load_baseline("ti-baseline")).visibility_factor()));
}

TEST_CASE("depolarizing probability from fidelity") {
  CHECK(depolarizing_prob(1.0) == 0.0);
  CHECK(depolarizing_prob(0.25) == doctest::Approx(1.0));
  CHECK(depolarizing_prob(0.99) == doctest::Approx(4 * 0.01 / 3));
}

TEST_CASE("every catalog entry has a unit string and a unique name") {
  for (Platform p : {Platform::ColorCenter, Platform::TrappedIon, Platform::Abstract}) {
    const auto& cat = parameter_catalog(p);
    for (std::size_t i = 0; i < cat.size(); ++i)
      for (std::size_t j = i + 1; j < cat.size(); ++j) CHECK(cat[i].name != cat[j].name);
    CHECK(to_string(p) == to_string(platform_from_string(to_string(p))));
  }
}
