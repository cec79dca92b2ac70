#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <string>

#include "repeaterforge/config.hpp"

using namespace rf;

namespace {

const std::string kDir = REPEATERFORGE_CONFIG_DIR;

const char* kMinimal = R"(name: t
topology:
  nodes: [A, B]
  links:
    - {station: M, length_left_km: 1, length_right_km: 1, attenuation_db_per_km: 0.2}
hardware:
  map_from: ti-baseline
)";

ConfigError::Kind error_kind(const std::string& text, std::string* path = nullptr, int* line = nullptr) {
  try {
    parse_config(text, "test");
  } catch (const ConfigError& e) {
    if (path) *path = e.path();
    if (line) *line = e.line();
    return e.kind();
  }
  FAIL("configuration was accepted");
  return ConfigError::Kind::Schema;
}

std::string with(const std::string& extra) { return std::string(kMinimal) + extra; }

}  // namespace

TEST_CASE("every shipped configuration loads and validates") {
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kDir)) {
    if (entry.path().extension() != ".yaml") continue;
    CAPTURE(entry.path().string());
    ScenarioConfig c = load_config(entry.path().string());
    CHECK_NOTHROW(c.scenario().validate());
    CHECK_NOTHROW(c.problem().validate());
    for (const auto& e : expand_sweep(c)) CHECK_NOTHROW(e.scenario().validate());
    ++n;
  }
  CHECK(n >= 5);
}

TEST_CASE("two-node-minimal round-trips through its canonical form") {
  ScenarioConfig c = load_config(kDir + "/two-node-minimal.yaml");
  CHECK(c.topology.nodes.size() == 2);
  CHECK(c.hardware.platform() == Platform::Abstract);
  const std::string canon = canonical_form(c);
  ScenarioConfig back = parse_config(canon, "canonical");
  CHECK(canonical_form(back) == canon);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(back.hardware.values() == c.hardware.values());
  for (const char* name : {"cutoff-sweep.yaml", "ga-20km.yaml", "delft-eindhoven-cc.yaml"}) {
    ScenarioConfig d = load_config(kDir + "/" + name);
    CHECK(canonical_form(parse_config(canonical_form(d))) == canonical_form(d));
  }
}

TEST_CASE("configuration hash is SHA-256 of the canonical form and sensitive to values") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  ScenarioConfig a = parse_config(kMinimal);
  ScenarioConfig b = parse_config(with("seed: 2\n"));
  CHECK(config_hash(a).size() == 64);
  CHECK(config_hash(a) == sha256_hex(canonical_form(a)));
  CHECK(config_hash(a) != config_hash(b));
  // Comments and key order do not change the hash.
  ScenarioConfig c = parse_config("# comment\n" + std::string(kMinimal));
  CHECK(config_hash(a) == config_hash(c));
}

TEST_CASE("defaults and derived target fidelity") {
  ScenarioConfig c = parse_config(kMinimal);
  CHECK(c.seed == 1);
  CHECK(c.n_runs == 10);
  CHECK(c.protocol.scheme == Scheme::DoubleClick);
  CHECK(std::isinf(c.protocol.cutoff_time));
  CHECK(c.fidelity_from_bound);
  CHECK(std::abs(c.target.fidelity - 0.8717) <= 5e-5);
  ScenarioConfig d = parse_config(with("target: {rate: 0.5, server_T: 100, fidelity: 0.95}\n"));
  CHECK_FALSE(d.fidelity_from_bound);
  CHECK(d.target.fidelity == 0.95);
}

TEST_CASE("unknown fields are schema errors with a path and a line") {
  std::string path;
  int line = 0;
  CHECK(error_kind(with("protocol:\n  scheme: double_click\n  bogus: 3\n"), &path, &line) == ConfigError::Kind::Schema);
  CHECK(path == "protocol.bogus");
  CHECK(line == 10);
  CHECK(error_kind(with("extra: 1\n"), &path) == ConfigError::Kind::Schema);
  CHECK(path == "extra");
  CHECK(error_kind(with("protocol: {n_pairs: many}\n"), &path) == ConfigError::Kind::Schema);
  CHECK(path == "protocol.n_pairs");
  CHECK(error_kind("name: [unclosed\n") == ConfigError::Kind::Schema);
  CHECK(error_kind("topology: {}\n", &path) == ConfigError::Kind::Schema);
  CHECK(path == "name");
}

TEST_CASE("dangling and inconsistent references are reference errors") {
  std::string path;
  const std::string bad_baseline = R"(name: t
topology:
  nodes: [A, B]
  links:
    - {station: M, length_left_km: 1, length_right_km: 1, attenuation_db_per_km: 0.2}
hardware:
  baseline: no-such-baseline
)";
  CHECK(error_kind(bad_baseline, &path) == ConfigError::Kind::Reference);
  CHECK(path == "hardware.baseline");
  const std::string bad_links = R"(name: t
topology:
  nodes: [A, R, B]
  links:
    - {station: M, length_left_km: 1, length_right_km: 1, attenuation_db_per_km: 0.2}
hardware:
  map_from: ti-baseline
)";
  CHECK(error_kind(bad_links, &path) == ConfigError::Kind::Reference);
  CHECK(path == "topology.links");
  CHECK(error_kind(with("protocol: {move_to_memory: true}\n"), &path) == ConfigError::Kind::Reference);
  CHECK(error_kind(with("hardware_extra: 1\n")) == ConfigError::Kind::Schema);
  CHECK(error_kind(with("optimizer: {parameters: [attempt_overhead]}\n"), &path) == ConfigError::Kind::Reference);
  CHECK(path == "optimizer.parameters[0]");
  CHECK(error_kind(with("sweep: {parameter: protocol.nothing, values: [1]}\n")) == ConfigError::Kind::Reference);
}

TEST_CASE("out-of-range values are range errors") {
  std::string path;
  CHECK(error_kind(with("protocol: {alpha: 1.5}\n"), &path) == ConfigError::Kind::Range);
  CHECK(path == "protocol.alpha");
  CHECK(error_kind(with("protocol: {n_pairs: 0}\n"), &path) == ConfigError::Kind::Range);
  CHECK(path == "protocol.n_pairs");
  CHECK(error_kind(with("target: {rate: -1}\n"), &path) == ConfigError::Kind::Range);
  CHECK(path == "target.rate");
  CHECK(error_kind(with("protocol: {cutoff_time: 0}\n")) == ConfigError::Kind::Range);
  CHECK(error_kind(with("n_runs: 0\n")) == ConfigError::Kind::Range);
  CHECK(error_kind(with("optimizer: {population: 2}\n")) == ConfigError::Kind::Range);
  const std::string neg = R"(name: t
topology:
  nodes: [A, B]
  links:
    - {station: M, length_left_km: -1, length_right_km: 1, attenuation_db_per_km: 0.2}
hardware:
  map_from: ti-baseline
)";
  CHECK(error_kind(neg, &path) == ConfigError::Kind::Range);
  CHECK(path == "topology.links[0].length_left_km");
}

TEST_CASE("attenuation is required unless the standard scenario is requested") {
  const std::string no_att = R"(name: t
topology:
  nodes: [A, B]
  links:
    - {station: M, length_left_km: 1, length_right_km: 1}
hardware:
  map_from: ti-baseline
)";
  CHECK(error_kind(no_att) == ConfigError::Kind::Schema);
  const std::string standard = R"(name: t
topology:
  standard_scenario: true
  nodes: [A, B]
  links:
    - {station: M, length_left_km: 1, length_right_km: 1}
hardware:
  map_from: ti-baseline
)";
  CHECK(parse_config(standard).topology.links[0].attenuation_db_per_km == 0.2);
}

TEST_CASE("hardware overrides and improvements are applied") {
  ScenarioConfig c = parse_config(with(""));
  ScenarioConfig d = parse_config(R"(name: t
topology:
  nodes: [A, B]
  links:
    - {station: M, length_left_km: 1, length_right_km: 1, attenuation_db_per_km: 0.2}
hardware:
  map_from: ti-baseline
  overrides: {dark_count: 0}
  improvements: {T2: 4}
)");
  CHECK(d.hardware.get("dark_count") == 0.0);
  CHECK(d.hardware.get("T2") == doctest::Approx(4 * c.hardware.get("T2")));
  CHECK(error_kind(with("").replace(std::string(kMinimal).find("map_from"), 0, "improvements: {T2: 0.5}\n  ")) ==
        ConfigError::Kind::Range);
}

TEST_CASE("sweep expands to one configuration per value") {
  ScenarioConfig c = load_config(kDir + "/cutoff-sweep.yaml");
  REQUIRE(c.sweep.has_value());
  std::vector<ScenarioConfig> all = expand_sweep(c);
  REQUIRE(all.size() == 5);
  CHECK(std::isinf(all[0].protocol.cutoff_time));
  CHECK(all[1].protocol.cutoff_time == 0.05);
  CHECK(all[4].protocol.cutoff_time == 0.005);
  for (const auto& e : all) {
    CHECK_FALSE(e.sweep.has_value());
    CHECK(e.seed == c.seed);
    CHECK(e.topology.links.size() == c.topology.links.size());
  }
  ScenarioConfig t2 = parse_config(with("sweep: {parameter: hardware.improvements.T2, values: [1, 10]}\n"));
  std::vector<ScenarioConfig> ks = expand_sweep(t2);
  REQUIRE(ks.size() == 2);
  CHECK(ks[1].hardware.get("T2") == doctest::Approx(10 * ks[0].hardware.get("T2")));
  ScenarioConfig len = parse_config(with("sweep: {parameter: topology.links.0.length_left_km, values: [2, 3]}\n"));
  CHECK(expand_sweep(len)[1].topology.links[0].length_left_km == 3.0);
  CHECK(expand_sweep(parse_config(kMinimal)).size() == 1);
}

TEST_CASE("missing files are reported") {
  try {
    load_config(kDir + "/does-not-exist.yaml");
    FAIL("missing file accepted");
  } catch (const ConfigError& e) {
    CHECK(e.kind() == ConfigError::Kind::Reference);
    CHECK(std::string(e.what()).find("does-not-exist") != std::string::npos);
  }
  CHECK(to_string(ConfigError::Kind::Range) == "range");
}
