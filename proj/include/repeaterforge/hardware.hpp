#pragma once

#include <map>
#include <string>
#include <vector>

namespace rf {

enum class Platform { ColorCenter, TrappedIon, Abstract };

std::string to_string(Platform p);
Platform platform_from_string(const std::string& s);

// How a parameter maps to its probability of no imperfection.
enum class ParamKind {
  Probability,       // p_ni = value
  ErrorProbability,  // p_ni = 1 - value
  DepolFidelity,     // p_ni = (4F - 1) / 3
  N1e,               // p_ni = (1 + e^{-1/N}) / 2
  Lifetime,          // p_ni = e^{-1/T}
  IonCoherence,      // p_ni = e^{-1/T^2}
  SwapQuality,       // p_ni = s_q
  ReadoutFidelity,   // p_ni = F
  Fixed              // durations and shape constants, never improved
};

struct ParamInfo {
  std::string name;
  ParamKind kind;
  std::string unit;
};

const std::vector<ParamInfo>& parameter_catalog(Platform p);
const ParamInfo& parameter_info(Platform p, const std::string& name);

class HardwareParams {
public:
  HardwareParams() = default;
  explicit HardwareParams(Platform p) : platform_(p) {}

  Platform platform() const { return platform_; }
  double get(const std::string& name) const;
  void set(const std::string& name, double value);
  bool has(const std::string& name) const { return values_.count(name) > 0; }
  const std::map<std::string, double>& values() const { return values_; }

  // Improvement factors already folded into values; TI visibility is applied on
  // top of the window-model value at link time.
  double visibility_factor() const { return visibility_factor_; }
  void set_visibility_factor(double k) { visibility_factor_ = k; }

  // Throws std::invalid_argument when a required entry is missing or out of range.
  void validate() const;

private:
  Platform platform_ = Platform::Abstract;
  std::map<std::string, double> values_;
  double visibility_factor_ = 1.0;
};

std::string data_directory();
// Loads "cc-baseline", "ti-baseline" or a path to a YAML parameter file.
HardwareParams load_baseline(const std::string& name_or_path);
HardwareParams parse_hardware_yaml(const std::string& text, const std::string& origin);

// Product of the logical swap's operation fidelities (readouts as F0 + F1 - 1).
double swap_quality(const HardwareParams& p);
double swap_duration(const HardwareParams& p);
HardwareParams map_to_abstract(const HardwareParams& p);

// Same platform with every improvable parameter at its perfect value;
// durations, shape constants and p_det_zero are kept unless perfect_detection.
HardwareParams perfect_hardware(const HardwareParams& p, bool perfect_detection = false);

// Convenience accessors shared by every platform.
double depolarizing_prob(double fidelity);

}  // namespace rf
