#include "repeaterforge/hardware.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rf {

namespace {

using K = ParamKind;

const std::vector<ParamInfo> kColorCenter = {
    {"visibility", K::Probability, ""},
    {"p_dexc", K::ErrorProbability, ""},
    {"n_1e", K::N1e, "attempts"},
    {"sigma_phase", K::Fixed, "rad"},
    {"p_det_zero", K::Probability, ""},
    {"dark_count", K::ErrorProbability, ""},
    {"emission_fidelity", K::DepolFidelity, ""},
    {"emission_duration", K::Fixed, "s"},
    {"electron_readout_f0", K::ReadoutFidelity, ""},
    {"electron_readout_f1", K::ReadoutFidelity, ""},
    {"electron_readout_duration", K::Fixed, "s"},
    {"carbon_init_fidelity", K::DepolFidelity, ""},
    {"carbon_init_duration", K::Fixed, "s"},
    {"carbon_z_fidelity", K::DepolFidelity, ""},
    {"carbon_z_duration", K::Fixed, "s"},
    {"ec_gate_fidelity", K::DepolFidelity, ""},
    {"ec_gate_duration", K::Fixed, "s"},
    {"electron_init_fidelity", K::DepolFidelity, ""},
    {"electron_init_duration", K::Fixed, "s"},
    {"electron_gate_fidelity", K::DepolFidelity, ""},
    {"electron_gate_duration", K::Fixed, "s"},
    {"electron_T1", K::Lifetime, "s"},
    {"electron_T2", K::Lifetime, "s"},
    {"carbon_T1", K::Lifetime, "s"},
    {"carbon_T2", K::Lifetime, "s"},
};

const std::vector<ParamInfo> kTrappedIon = {
    {"visibility", K::Probability, ""},
    {"dark_count", K::ErrorProbability, ""},
    {"p_det_zero", K::Probability, ""},
    {"emission_fidelity", K::DepolFidelity, ""},
    {"emission_duration", K::Fixed, "s"},
    {"readout_f0", K::ReadoutFidelity, ""},
    {"readout_f1", K::ReadoutFidelity, ""},
    {"readout_duration", K::Fixed, "s"},
    {"init_fidelity", K::Fixed, ""},
    {"init_duration", K::Fixed, "s"},
    {"z_fidelity", K::DepolFidelity, ""},
    {"z_duration", K::Fixed, "s"},
    {"ms_fidelity", K::DepolFidelity, ""},
    {"ms_duration", K::Fixed, "s"},
    {"coherence_time", K::IonCoherence, "s"},
    {"detection_window", K::Fixed, "s"},
    {"hl_wavefunction", K::Fixed, "s"},
    {"hl_emission", K::Fixed, "s"},
};

const std::vector<ParamInfo> kAbstract = {
    {"visibility", K::Probability, ""},
    {"dark_count", K::ErrorProbability, ""},
    {"p_det_zero", K::Probability, ""},
    {"emission_fidelity", K::DepolFidelity, ""},
    {"emission_duration", K::Fixed, "s"},
    {"swap_quality", K::SwapQuality, ""},
    {"swap_duration", K::Fixed, "s"},
    {"T1", K::Lifetime, "s"},
    {"T2", K::Lifetime, "s"},
    {"attempt_overhead", K::Fixed, "s"},
};

double readout_factor(double f0, double f1) { return f0 + f1 - 1.0; }

}  // namespace

std::string to_string(Platform p) {
  switch (p) {
    case Platform::ColorCenter: return "color_center";
    case Platform::TrappedIon: return "trapped_ion";
    case Platform::Abstract: return "abstract";
  }
  return "abstract";
}

Platform platform_from_string(const std::string& s) {
  if (s == "color_center") return Platform::ColorCenter;
  if (s == "trapped_ion") return Platform::TrappedIon;
  if (s == "abstract") return Platform::Abstract;
  throw std::invalid_argument("unknown platform '" + s + "'");
}

const std::vector<ParamInfo>& parameter_catalog(Platform p) {
  switch (p) {
    case Platform::ColorCenter: return kColorCenter;
    case Platform::TrappedIon: return kTrappedIon;
    case Platform::Abstract: return kAbstract;
  }
  return kAbstract;
}

const ParamInfo& parameter_info(Platform p, const std::string& name) {
  for (const auto& info : parameter_catalog(p))
    if (info.name == name) return info;
  throw std::invalid_argument("unknown " + to_string(p) + " parameter '" + name + "'");
}

double HardwareParams::get(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw std::out_of_range("hardware parameter '" + name + "' is not set");
  return it->second;
}

void HardwareParams::set(const std::string& name, double value) {
  parameter_info(platform_, name);
  values_[name] = value;
}

void HardwareParams::validate() const {
  for (const auto& info : parameter_catalog(platform_)) {
    auto it = values_.find(info.name);
    if (it == values_.end()) throw std::invalid_argument("hardware parameter '" + info.name + "' is missing");
    const double v = it->second;
    bool ok = !std::isnan(v);
    switch (info.kind) {
      case K::Probability:
      case K::ErrorProbability:
      case K::SwapQuality:
      case K::ReadoutFidelity: ok = ok && v >= 0.0 && v <= 1.0; break;
      case K::DepolFidelity: ok = ok && v >= 0.25 && v <= 1.0; break;
      case K::N1e:
      case K::Lifetime:
      case K::IonCoherence: ok = ok && v > 0.0; break;
      case K::Fixed: ok = ok && v >= 0.0 && std::isfinite(v); break;
    }
    if (!ok) throw std::invalid_argument("hardware parameter '" + info.name + "' is out of range");
  }
  if (!(visibility_factor_ >= 1.0)) throw std::invalid_argument("visibility improvement factor must be >= 1");
}

std::string data_directory() {
  if (const char* env = std::getenv("REPEATERFORGE_DATA_DIR")) return env;
  return REPEATERFORGE_DATA_DIR;
}

HardwareParams parse_hardware_yaml(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw std::invalid_argument(origin + ": " + e.what());
  }
  if (!root["platform"] || !root["parameters"]) throw std::invalid_argument(origin + ": needs 'platform' and 'parameters'");
  HardwareParams hp(platform_from_string(root["platform"].as<std::string>()));
  for (const auto& kv : root["parameters"]) {
    const std::string key = kv.first.as<std::string>();
    try {
      hp.set(key, kv.second.as<double>());
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(origin + ": " + e.what());
    }
  }
  hp.validate();
  return hp;
}

HardwareParams load_baseline(const std::string& name_or_path) {
  std::filesystem::path path(name_or_path);
  if (!std::filesystem::exists(path)) path = std::filesystem::path(data_directory()) / (name_or_path + ".yaml");
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("unknown hardware baseline '" + name_or_path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_hardware_yaml(ss.str(), path.string());
}

double swap_quality(const HardwareParams& p) {
  switch (p.platform()) {
    case Platform::ColorCenter: {
      const double r = readout_factor(p.get("electron_readout_f0"), p.get("electron_readout_f1"));
      return p.get("ec_gate_fidelity") * r * r;
    }
    case Platform::TrappedIon: {
      const double r = readout_factor(p.get("readout_f0"), p.get("readout_f1"));
      return p.get("ms_fidelity") * p.get("z_fidelity") * r * r;
    }
    case Platform::Abstract: return p.get("swap_quality");
  }
  return 1.0;
}

double swap_duration(const HardwareParams& p) {
  switch (p.platform()) {
    case Platform::ColorCenter: return p.get("ec_gate_duration") + p.get("electron_readout_duration");
    case Platform::TrappedIon: return p.get("ms_duration") + p.get("z_duration") + p.get("readout_duration");
    case Platform::Abstract: return p.get("swap_duration");
  }
  return 0.0;
}

HardwareParams map_to_abstract(const HardwareParams& p) {
  if (p.platform() == Platform::Abstract) return p;
  HardwareParams a(Platform::Abstract);
  for (const char* key : {"visibility", "dark_count", "p_det_zero", "emission_fidelity", "emission_duration"})
    a.set(key, p.get(key));
  a.set("swap_quality", swap_quality(p));
  a.set("swap_duration", swap_duration(p));
  if (p.platform() == Platform::ColorCenter) {
    a.set("T1", p.get("carbon_T1"));
    a.set("T2", p.get("carbon_T2"));
    a.set("attempt_overhead", 0.0);
  } else {
    a.set("T1", std::numeric_limits<double>::infinity());
    a.set("T2", p.get("coherence_time"));
    a.set("attempt_overhead", p.get("init_duration"));
  }
  a.set_visibility_factor(p.visibility_factor());
  a.validate();
  return a;
}

HardwareParams perfect_hardware(const HardwareParams& p, bool perfect_detection) {
  HardwareParams out = p;
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& info : parameter_catalog(p.platform())) {
    if (info.name == "p_det_zero" && !perfect_detection) continue;
    switch (info.kind) {
      case K::Probability:
      case K::SwapQuality:
      case K::ReadoutFidelity:
      case K::DepolFidelity: out.set(info.name, 1.0); break;
      case K::ErrorProbability: out.set(info.name, 0.0); break;
      case K::N1e:
      case K::Lifetime:
      case K::IonCoherence: out.set(info.name, inf); break;
      case K::Fixed: break;
    }
  }
  if (out.has("sigma_phase")) out.set("sigma_phase", 0.0);
  if (p.platform() == Platform::TrappedIon) out.set_visibility_factor(inf);
  return out;
}

double depolarizing_prob(double fidelity) { return 4.0 * (1.0 - fidelity) / 3.0; }

}  // namespace rf
