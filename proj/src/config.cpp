#include "repeaterforge/config.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rf {

using nlohmann::json;

ConfigError::ConfigError(Kind kind, std::string path, int line, const std::string& message)
    : std::runtime_error(to_string(kind) + " error at " + (path.empty() ? std::string("<root>") : path) +
                         (line > 0 ? " (line " + std::to_string(line) + ")" : std::string()) + ": " + message),
      kind_(kind),
      path_(std::move(path)),
      line_(line),
      message_(message) {}

std::string to_string(ConfigError::Kind k) {
  switch (k) {
    case ConfigError::Kind::Schema: return "schema";
    case ConfigError::Kind::Reference: return "reference";
    case ConfigError::Kind::Range: return "range";
  }
  return "schema";
}

namespace {

using Kind = ConfigError::Kind;
constexpr double kInf = std::numeric_limits<double>::infinity();

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

[[noreturn]] void fail(Kind kind, const std::string& path, const YAML::Node& n, const std::string& msg) {
  throw ConfigError(kind, path, line_of(n), msg);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void expect_map(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) fail(Kind::Schema, path, n, "expected a mapping");
}

void check_keys(const YAML::Node& n, const std::string& path, const std::set<std::string>& allowed) {
  expect_map(n, path);
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(Kind::Schema, join(path, key), kv.first, "unknown field '" + key + "'");
  }
}

YAML::Node required(const YAML::Node& n, const std::string& path, const std::string& key) {
  YAML::Node v = n[key];
  if (!v) fail(Kind::Schema, join(path, key), n, "required field '" + key + "' is missing");
  return v;
}

double as_double(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(Kind::Schema, path, n, "expected a number");
  const std::string s = n.Scalar();
  if (s == "inf" || s == ".inf" || s == "Infinity" || s == "+inf") return kInf;
  try {
    const double v = n.as<double>();
    if (std::isnan(v)) fail(Kind::Range, path, n, "value is not a number");
    return v;
  } catch (const YAML::BadConversion&) {
    fail(Kind::Schema, path, n, "expected a number, got '" + s + "'");
  }
}

long long as_int(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(Kind::Schema, path, n, "expected an integer");
  try {
    return n.as<long long>();
  } catch (const YAML::BadConversion&) {
    fail(Kind::Schema, path, n, "expected an integer, got '" + n.Scalar() + "'");
  }
}

std::uint64_t as_u64(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(Kind::Schema, path, n, "expected a nonnegative integer");
  try {
    return n.as<std::uint64_t>();
  } catch (const YAML::BadConversion&) {
    fail(Kind::Schema, path, n, "expected a nonnegative integer, got '" + n.Scalar() + "'");
  }
}

bool as_bool(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(Kind::Schema, path, n, "expected a boolean");
  try {
    return n.as<bool>();
  } catch (const YAML::BadConversion&) {
    fail(Kind::Schema, path, n, "expected a boolean, got '" + n.Scalar() + "'");
  }
}

std::string as_string(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) fail(Kind::Schema, path, n, "expected a string");
  return n.Scalar();
}

void range(bool ok, const std::string& path, const YAML::Node& n, const std::string& msg) {
  if (!ok) fail(Kind::Range, path, n, msg);
}

std::map<std::string, double> read_number_map(const YAML::Node& n, const std::string& path) {
  std::map<std::string, double> out;
  if (!n) return out;
  expect_map(n, path);
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    out[key] = as_double(kv.second, join(path, key));
  }
  return out;
}

void read_topology(const YAML::Node& n, ScenarioConfig& c) {
  const std::string p = "topology";
  check_keys(n, p, {"standard_scenario", "refractive_index", "nodes", "links"});
  if (n["standard_scenario"]) c.standard_scenario = as_bool(n["standard_scenario"], join(p, "standard_scenario"));
  if (n["refractive_index"]) {
    c.topology.refractive_index = as_double(n["refractive_index"], join(p, "refractive_index"));
    range(c.topology.refractive_index >= 1.0 && std::isfinite(c.topology.refractive_index), join(p, "refractive_index"),
          n["refractive_index"], "refractive index must be finite and >= 1");
  }
  const YAML::Node nodes = required(n, p, "nodes");
  if (!nodes.IsSequence()) fail(Kind::Schema, join(p, "nodes"), nodes, "expected a list of node names");
  std::set<std::string> names;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string name = as_string(nodes[i], index(join(p, "nodes"), i));
    if (!names.insert(name).second) fail(Kind::Reference, index(join(p, "nodes"), i), nodes[i], "duplicate node '" + name + "'");
    c.topology.nodes.push_back(name);
  }
  if (nodes.size() < 2 || nodes.size() > 3)
    fail(Kind::Range, join(p, "nodes"), nodes, "a path has two end nodes and at most one repeater");
  const YAML::Node links = required(n, p, "links");
  if (!links.IsSequence()) fail(Kind::Schema, join(p, "links"), links, "expected a list of links");
  if (links.size() + 1 != nodes.size())
    fail(Kind::Reference, join(p, "links"), links,
         "expected " + std::to_string(nodes.size() - 1) + " links joining consecutive nodes, got " + std::to_string(links.size()));
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string lp = index(join(p, "links"), i);
    const YAML::Node l = links[i];
    check_keys(l, lp, {"station", "length_left_km", "length_right_km", "attenuation_db_per_km"});
    LinkSpec s;
    s.station = as_string(required(l, lp, "station"), join(lp, "station"));
    if (names.count(s.station)) fail(Kind::Reference, join(lp, "station"), l["station"], "station name clashes with a node");
    s.length_left_km = as_double(required(l, lp, "length_left_km"), join(lp, "length_left_km"));
    s.length_right_km = as_double(required(l, lp, "length_right_km"), join(lp, "length_right_km"));
    range(s.length_left_km >= 0.0 && std::isfinite(s.length_left_km), join(lp, "length_left_km"), l["length_left_km"],
          "length must be finite and nonnegative");
    range(s.length_right_km >= 0.0 && std::isfinite(s.length_right_km), join(lp, "length_right_km"), l["length_right_km"],
          "length must be finite and nonnegative");
    if (l["attenuation_db_per_km"]) {
      s.attenuation_db_per_km = as_double(l["attenuation_db_per_km"], join(lp, "attenuation_db_per_km"));
      range(s.attenuation_db_per_km > 0.0 && std::isfinite(s.attenuation_db_per_km), join(lp, "attenuation_db_per_km"),
            l["attenuation_db_per_km"], "attenuation must be positive");
    } else if (c.standard_scenario) {
      s.attenuation_db_per_km = 0.2;
    } else {
      fail(Kind::Schema, join(lp, "attenuation_db_per_km"), l,
           "attenuation is required unless topology.standard_scenario is true");
    }
    c.topology.links.push_back(s);
  }
}

void read_hardware(const YAML::Node& n, ScenarioConfig& c) {
  const std::string p = "hardware";
  check_keys(n, p, {"platform", "baseline", "map_from", "parameters", "overrides", "improvements"});
  HardwareSpec& h = c.hardware_spec;
  std::optional<Platform> platform;
  if (n["platform"]) {
    try {
      platform = platform_from_string(as_string(n["platform"], join(p, "platform")));
    } catch (const std::invalid_argument& e) {
      fail(Kind::Schema, join(p, "platform"), n["platform"], e.what());
    }
  }
  const int sources = int(bool(n["baseline"])) + int(bool(n["map_from"])) + int(bool(n["parameters"]));
  if (sources != 1) fail(Kind::Schema, p, n, "exactly one of baseline, map_from or parameters is required");
  HardwareParams hw;
  if (n["parameters"]) {
    if (!platform) fail(Kind::Schema, join(p, "platform"), n, "inline parameters need a platform");
    h.parameters = read_number_map(n["parameters"], join(p, "parameters"));
    hw = HardwareParams(*platform);
    for (const auto& [k, v] : h.parameters) {
      try {
        hw.set(k, v);
      } catch (const std::invalid_argument& e) {
        fail(Kind::Reference, join(join(p, "parameters"), k), n["parameters"][k], e.what());
      }
    }
  } else {
    const bool mapped = bool(n["map_from"]);
    const std::string key = mapped ? "map_from" : "baseline";
    const std::string name = as_string(n[key], join(p, key));
    (mapped ? h.map_from : h.baseline) = name;
    try {
      hw = load_baseline(name);
    } catch (const std::invalid_argument& e) {
      fail(Kind::Reference, join(p, key), n[key], e.what());
    }
    if (mapped) {
      if (platform && *platform != Platform::Abstract)
        fail(Kind::Reference, join(p, "platform"), n["platform"], "map_from produces the abstract platform");
      if (hw.platform() == Platform::Abstract)
        fail(Kind::Reference, join(p, key), n[key], "map_from needs a color-center or trapped-ion baseline");
      hw = map_to_abstract(hw);
    } else if (platform && *platform != hw.platform()) {
      fail(Kind::Reference, join(p, "platform"), n["platform"],
           "baseline '" + name + "' is a " + to_string(hw.platform()) + " parameter set");
    }
  }
  h.platform = hw.platform();
  h.overrides = read_number_map(n["overrides"], join(p, "overrides"));
  for (const auto& [k, v] : h.overrides) {
    try {
      hw.set(k, v);
    } catch (const std::invalid_argument& e) {
      fail(Kind::Reference, join(join(p, "overrides"), k), n["overrides"][k], e.what());
    }
  }
  h.improvements = read_number_map(n["improvements"], join(p, "improvements"));
  std::vector<std::string> names;
  std::vector<double> ks;
  for (const auto& [k, v] : h.improvements) {
    const std::string kp = join(join(p, "improvements"), k);
    try {
      if (parameter_info(hw.platform(), k).kind == ParamKind::Fixed)
        fail(Kind::Reference, kp, n["improvements"][k], "parameter '" + k + "' is fixed and cannot be improved");
    } catch (const std::invalid_argument& e) {
      fail(Kind::Reference, kp, n["improvements"][k], e.what());
    }
    range(v >= 1.0, kp, n["improvements"][k], "improvement factor must be >= 1");
    names.push_back(k);
    ks.push_back(v);
  }
  try {
    hw = apply_improvements(hw, names, ks);
    hw.validate();
  } catch (const std::invalid_argument& e) {
    fail(Kind::Range, p, n, e.what());
  }
  c.hardware = hw;
}

void read_protocol(const YAML::Node& n, ScenarioConfig& c) {
  const std::string p = "protocol";
  check_keys(n, p, {"scheme", "detector", "cutoff_time", "alpha", "coincidence_window", "move_to_memory", "n_pairs"});
  ProtocolConfig& pc = c.protocol;
  try {
    if (n["scheme"]) pc.scheme = scheme_from_string(as_string(n["scheme"], join(p, "scheme")));
  } catch (const std::invalid_argument& e) {
    fail(Kind::Schema, join(p, "scheme"), n["scheme"], e.what());
  }
  try {
    if (n["detector"]) pc.detector = detector_from_string(as_string(n["detector"], join(p, "detector")));
  } catch (const std::invalid_argument& e) {
    fail(Kind::Schema, join(p, "detector"), n["detector"], e.what());
  }
  if (n["cutoff_time"]) {
    pc.cutoff_time = as_double(n["cutoff_time"], join(p, "cutoff_time"));
    range(pc.cutoff_time > 0.0, join(p, "cutoff_time"), n["cutoff_time"], "cut-off time must be positive");
  }
  if (n["alpha"]) {
    pc.alpha = as_double(n["alpha"], join(p, "alpha"));
    range(pc.alpha > 0.0 && pc.alpha < 1.0, join(p, "alpha"), n["alpha"], "bright-state parameter must lie in (0,1)");
  }
  if (n["coincidence_window"]) {
    const double w = as_double(n["coincidence_window"], join(p, "coincidence_window"));
    range(w > 0.0 && std::isfinite(w), join(p, "coincidence_window"), n["coincidence_window"],
          "coincidence window must be positive and finite");
    if (c.hardware.platform() != Platform::TrappedIon)
      fail(Kind::Reference, join(p, "coincidence_window"), n["coincidence_window"],
           "a coincidence window needs the trapped-ion photon shape");
    range(w <= c.hardware.get("detection_window"), join(p, "coincidence_window"), n["coincidence_window"],
          "coincidence window exceeds the detection window");
    pc.coincidence_window = w;
  }
  if (n["move_to_memory"]) {
    pc.move_to_memory = as_bool(n["move_to_memory"], join(p, "move_to_memory"));
    if (pc.move_to_memory && c.hardware.platform() != Platform::ColorCenter)
      fail(Kind::Reference, join(p, "move_to_memory"), n["move_to_memory"], "moving to memory needs the color-center platform");
  }
  if (n["n_pairs"]) {
    const long long v = as_int(n["n_pairs"], join(p, "n_pairs"));
    range(v >= 1 && v <= 100000000, join(p, "n_pairs"), n["n_pairs"], "n_pairs must lie in [1, 1e8]");
    pc.n_pairs = static_cast<int>(v);
  }
}

void read_target(const YAML::Node& n, ScenarioConfig& c) {
  const std::string p = "target";
  check_keys(n, p, {"fidelity", "rate", "server_T"});
  PerformanceTarget& t = c.target;
  if (n["rate"]) t.rate = as_double(n["rate"], join(p, "rate"));
  range(t.rate > 0.0 && std::isfinite(t.rate), join(p, "rate"), n["rate"] ? n["rate"] : n, "target rate must be positive");
  if (n["server_T"]) t.server_T = as_double(n["server_T"], join(p, "server_T"));
  range(t.server_T > 0.0, join(p, "server_T"), n["server_T"] ? n["server_T"] : n, "server memory time must be positive");
  if (n["fidelity"]) {
    c.fidelity_from_bound = false;
    t.fidelity = as_double(n["fidelity"], join(p, "fidelity"));
    range(t.fidelity > 0.5 && t.fidelity <= 1.0, join(p, "fidelity"), n["fidelity"], "target fidelity must lie in (0.5,1]");
  } else {
    c.fidelity_from_bound = true;
    t.fidelity = vbqc_min_fidelity(t.rate, t.server_T);
  }
}

void read_optimizer(const YAML::Node& n, ScenarioConfig& c) {
  const std::string p = "optimizer";
  check_keys(n, p, {"population", "generations", "tournament", "crossover_rate", "mutation_rate", "mutation_sigma",
                    "elitism", "k_max", "var_tolerance_percent", "var_window", "parameters", "tune_cutoff", "tune_alpha",
                    "tune_coincidence", "alpha_min", "alpha_max", "horizon_factor"});
  OptimizerSpec& o = c.optimizer;
  GaConfig& g = o.ga;
  auto int_field = [&](const char* key, int& out) {
    if (n[key]) out = static_cast<int>(as_int(n[key], join(p, key)));
  };
  auto num_field = [&](const char* key, double& out) {
    if (n[key]) out = as_double(n[key], join(p, key));
  };
  auto bool_field = [&](const char* key, bool& out) {
    if (n[key]) out = as_bool(n[key], join(p, key));
  };
  int_field("population", g.population);
  int_field("generations", g.generations);
  int_field("tournament", g.tournament);
  num_field("crossover_rate", g.crossover_rate);
  num_field("mutation_rate", g.mutation_rate);
  num_field("mutation_sigma", g.mutation_sigma);
  int_field("elitism", g.elitism);
  num_field("k_max", g.k_max);
  num_field("var_tolerance_percent", g.var_tolerance_percent);
  int_field("var_window", g.var_window);
  bool_field("tune_cutoff", o.tune_cutoff);
  bool_field("tune_alpha", o.tune_alpha);
  bool_field("tune_coincidence", o.tune_coincidence);
  num_field("alpha_min", o.alpha_min);
  num_field("alpha_max", o.alpha_max);
  num_field("horizon_factor", o.horizon_factor);
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    fail(Kind::Range, p, n, e.what());
  }
  range(o.alpha_min > 0.0 && o.alpha_min <= o.alpha_max && o.alpha_max < 1.0, join(p, "alpha_min"), n,
        "bright-state range must satisfy 0 < alpha_min <= alpha_max < 1");
  range(o.horizon_factor > 0.0, join(p, "horizon_factor"), n, "horizon factor must be positive");
  if (o.tune_coincidence && c.hardware.platform() != Platform::TrappedIon)
    fail(Kind::Reference, join(p, "tune_coincidence"), n["tune_coincidence"], "coincidence tuning needs the trapped-ion platform");
  if (n["parameters"]) {
    const YAML::Node ps = n["parameters"];
    if (!ps.IsSequence()) fail(Kind::Schema, join(p, "parameters"), ps, "expected a list of parameter names");
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string name = as_string(ps[i], index(join(p, "parameters"), i));
      try {
        if (parameter_info(c.hardware.platform(), name).kind == ParamKind::Fixed)
          fail(Kind::Reference, index(join(p, "parameters"), i), ps[i], "parameter '" + name + "' is fixed");
      } catch (const std::invalid_argument& e) {
        fail(Kind::Reference, index(join(p, "parameters"), i), ps[i], e.what());
      }
      o.parameters.push_back(name);
    }
  }
}

void read_sweep(const YAML::Node& n, ScenarioConfig& c) {
  const std::string p = "sweep";
  check_keys(n, p, {"parameter", "values"});
  SweepSpec s;
  s.parameter = as_string(required(n, p, "parameter"), join(p, "parameter"));
  const YAML::Node vals = required(n, p, "values");
  if (!vals.IsSequence() || vals.size() == 0) fail(Kind::Schema, join(p, "values"), vals, "expected a nonempty list of numbers");
  for (std::size_t i = 0; i < vals.size(); ++i) s.values.push_back(as_double(vals[i], index(join(p, "values"), i)));
  c.sweep = s;
}

json number_or_inf(double v) { return std::isinf(v) ? json("inf") : json(v); }

json canonical_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["n_runs"] = c.n_runs;
  json links = json::array();
  for (const auto& l : c.topology.links)
    links.push_back({{"station", l.station},
                     {"length_left_km", l.length_left_km},
                     {"length_right_km", l.length_right_km},
                     {"attenuation_db_per_km", l.attenuation_db_per_km}});
  j["topology"] = {{"standard_scenario", c.standard_scenario},
                   {"refractive_index", c.topology.refractive_index},
                   {"nodes", c.topology.nodes},
                   {"links", links}};
  json hw;
  hw["platform"] = to_string(c.hardware_spec.platform);
  if (!c.hardware_spec.baseline.empty()) hw["baseline"] = c.hardware_spec.baseline;
  if (!c.hardware_spec.map_from.empty()) hw["map_from"] = c.hardware_spec.map_from;
  if (!c.hardware_spec.parameters.empty()) {
    json ps = json::object();
    for (const auto& [k, v] : c.hardware_spec.parameters) ps[k] = number_or_inf(v);
    hw["parameters"] = ps;
  }
  json ov = json::object(), im = json::object();
  for (const auto& [k, v] : c.hardware_spec.overrides) ov[k] = number_or_inf(v);
  for (const auto& [k, v] : c.hardware_spec.improvements) im[k] = number_or_inf(v);
  hw["overrides"] = ov;
  hw["improvements"] = im;
  j["hardware"] = hw;
  json pr = {{"scheme", to_string(c.protocol.scheme)},
             {"detector", to_string(c.protocol.detector)},
             {"cutoff_time", number_or_inf(c.protocol.cutoff_time)},
             {"alpha", c.protocol.alpha},
             {"move_to_memory", c.protocol.move_to_memory},
             {"n_pairs", c.protocol.n_pairs}};
  if (c.protocol.coincidence_window) pr["coincidence_window"] = *c.protocol.coincidence_window;
  j["protocol"] = pr;
  json tg = {{"rate", c.target.rate}, {"server_T", number_or_inf(c.target.server_T)}};
  if (!c.fidelity_from_bound) tg["fidelity"] = c.target.fidelity;
  j["target"] = tg;
  const OptimizerSpec& o = c.optimizer;
  j["optimizer"] = {{"population", o.ga.population},
                    {"generations", o.ga.generations},
                    {"tournament", o.ga.tournament},
                    {"crossover_rate", o.ga.crossover_rate},
                    {"mutation_rate", o.ga.mutation_rate},
                    {"mutation_sigma", o.ga.mutation_sigma},
                    {"elitism", o.ga.elitism},
                    {"k_max", o.ga.k_max},
                    {"var_tolerance_percent", o.ga.var_tolerance_percent},
                    {"var_window", o.ga.var_window},
                    {"parameters", o.parameters},
                    {"tune_cutoff", o.tune_cutoff},
                    {"tune_alpha", o.tune_alpha},
                    {"tune_coincidence", o.tune_coincidence},
                    {"alpha_min", o.alpha_min},
                    {"alpha_max", o.alpha_max},
                    {"horizon_factor", o.horizon_factor}};
  if (c.sweep) {
    json vals = json::array();
    for (double v : c.sweep->values) vals.push_back(number_or_inf(v));
    j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", vals}};
  }
  return j;
}

}  // namespace

Scenario ScenarioConfig::scenario() const { return {topology, hardware, protocol}; }

OptimizationProblem ScenarioConfig::problem() const {
  OptimizationProblem pr;
  pr.scenario = scenario();
  pr.parameters = optimizer.parameters.empty() ? improvable_parameters(hardware.platform()) : optimizer.parameters;
  pr.target = target;
  pr.n_runs = n_runs;
  pr.tune_cutoff = optimizer.tune_cutoff;
  pr.tune_alpha = optimizer.tune_alpha;
  pr.tune_coincidence = optimizer.tune_coincidence;
  pr.alpha_min = optimizer.alpha_min;
  pr.alpha_max = optimizer.alpha_max;
  pr.horizon_factor = optimizer.horizon_factor;
  return pr;
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(Kind::Schema, "", e.mark.is_null() ? 0 : e.mark.line + 1, origin + ": " + e.msg);
  }
  check_keys(root, "", {"name", "seed", "n_runs", "topology", "hardware", "protocol", "target", "optimizer", "sweep"});
  ScenarioConfig c;
  c.name = as_string(required(root, "", "name"), "name");
  if (root["seed"]) c.seed = as_u64(root["seed"], "seed");
  if (root["n_runs"]) {
    const long long v = as_int(root["n_runs"], "n_runs");
    range(v >= 1 && v <= 1000000, "n_runs", root["n_runs"], "n_runs must lie in [1, 1e6]");
    c.n_runs = static_cast<int>(v);
  }
  read_topology(required(root, "", "topology"), c);
  read_hardware(required(root, "", "hardware"), c);
  read_protocol(root["protocol"] ? root["protocol"] : YAML::Node(YAML::NodeType::Map), c);
  read_target(root["target"] ? root["target"] : YAML::Node(YAML::NodeType::Map), c);
  read_optimizer(root["optimizer"] ? root["optimizer"] : YAML::Node(YAML::NodeType::Map), c);
  if (root["sweep"]) read_sweep(root["sweep"], c);
  try {
    c.scenario().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(Kind::Range, "", 0, e.what());
  }
  if (c.sweep) expand_sweep(c);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(Kind::Reference, "", 0, "cannot open configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string canonical_form(const ScenarioConfig& c) { return canonical_json(c).dump(2) + "\n"; }

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

std::string config_hash(const ScenarioConfig& c) { return sha256_hex(canonical_form(c)); }

std::vector<ScenarioConfig> expand_sweep(const ScenarioConfig& c) {
  if (!c.sweep) return {c};
  json base = canonical_json(c);
  base.erase("sweep");
  const std::string& path = c.sweep->parameter;
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  auto bad = [&](const std::string& msg) { throw ConfigError(Kind::Reference, "sweep.parameter", 0, msg); };
  if (parts.size() < 2) bad("sweep parameter '" + path + "' must name a field inside a section");
  std::vector<ScenarioConfig> out;
  for (double v : c.sweep->values) {
    json j = base;
    json* node = &j;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      const std::string& key = parts[i];
      if (node->is_array()) {
        std::size_t idx = 0;
        try {
          idx = std::stoul(key);
        } catch (const std::exception&) {
          bad("'" + key + "' in '" + path + "' is not a list index");
        }
        if (idx >= node->size()) bad("index " + key + " in '" + path + "' is out of range");
        node = &(*node)[idx];
      } else {
        if (!node->contains(key)) bad("sweep parameter '" + path + "' does not exist");
        node = &(*node)[key];
      }
    }
    const std::string& leaf = parts.back();
    const bool open_map = parts.size() >= 2 && (parts[parts.size() - 2] == "improvements" ||
                                                 parts[parts.size() - 2] == "overrides");
    if (!node->is_object() || (!open_map && !node->contains(leaf) && leaf != "coincidence_window" && leaf != "fidelity"))
      bad("sweep parameter '" + path + "' does not exist");
    (*node)[leaf] = number_or_inf(v);
    out.push_back(parse_config(j.dump(), "sweep " + path + "=" + std::to_string(v)));
  }
  return out;
}

}  // namespace rf
