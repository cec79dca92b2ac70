#include "repeaterforge/circuits.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace rf {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Runs a gate sequence either noisily (sampled outcomes, readout flips) or
// noiselessly with forced outcomes.
struct Executor {
  DensityMatrix rho;
  const HardwareParams* hw = nullptr;
  std::mt19937_64* rng = nullptr;
  std::array<int, 2> forced{-1, -1};
  int n_measured = 0;
  double duration = 0.0;

  bool noisy() const { return hw != nullptr; }
  double param(const char* name) const { return noisy() ? hw->get(name) : 1.0; }
  double time(const char* name) const { return noisy() ? hw->get(name) : 0.0; }

  void depolarize(const std::vector<int>& qubits, double fidelity) {
    if (fidelity < 1.0) rho = apply_channel(rho, Depolarizing{depolarizing_prob(fidelity)}, qubits);
  }

  void gate(const Mat& u, const std::vector<int>& qubits, const char* fid, const char* dur) {
    rho = apply_unitary(rho, u, qubits);
    if (noisy()) {
      depolarize(qubits, param(fid));
      duration += time(dur);
    }
  }

  void init(int qubit, const char* fid, const char* dur) {
    rho = reset_qubit(rho, qubit);
    if (noisy()) {
      depolarize({qubit}, param(fid));
      duration += time(dur);
    }
  }

  int measure(int qubit, const char* f0, const char* f1, const char* dur) {
    const int slot = n_measured++;
    if (!noisy()) {
      const int m = forced[slot];
      DensityMatrix un = project(rho, qubit, m);
      if (!(un.trace() > 1e-12)) throw std::logic_error("forced outcome has zero probability");
      rho = un.normalized();
      return m;
    }
    MeasureResult res = rf::measure(rho, qubit);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int actual = u(*rng) < res.prob[0] ? 0 : 1;
    rho = res.post[actual];
    if (dur != nullptr) duration += time(dur);
    if (f0 == nullptr) return actual;
    ReadoutError err{1.0 - param(f0), 1.0 - param(f1)};
    return err.apply(actual, u(*rng));
  }
};

using Pair = std::array<int, 2>;

Pair run_cc_bsm(Executor& ex) {
  const Mat crx = crx_gate();
  Pair m{};
  ex.gate(crx, {1, 2}, "ec_gate_fidelity", "ec_gate_duration");
  ex.gate(pauli::rx(kPi / 2), {1}, "electron_gate_fidelity", "electron_gate_duration");
  m[0] = ex.measure(1, "electron_readout_f0", "electron_readout_f1", "electron_readout_duration");
  ex.gate(pauli::rz(kPi / 2), {2}, "carbon_z_fidelity", "carbon_z_duration");
  ex.init(1, "electron_init_fidelity", "electron_init_duration");
  ex.gate(pauli::ry(kPi / 2), {1}, "electron_gate_fidelity", "electron_gate_duration");
  ex.gate(crx, {1, 2}, "ec_gate_fidelity", "ec_gate_duration");
  ex.gate(pauli::rx(kPi / 2), {1}, "electron_gate_fidelity", "electron_gate_duration");
  m[1] = ex.measure(1, "electron_readout_f0", "electron_readout_f1", "electron_readout_duration");
  return m;
}

Pair run_ti_bsm(Executor& ex) {
  Pair m{};
  ex.gate(pauli::rz(-kPi / 2), {1}, "z_fidelity", "z_duration");
  ex.gate(ms_gate(), {1, 2}, "ms_fidelity", "ms_duration");
  m[0] = ex.measure(1, "readout_f0", "readout_f1", "readout_duration");
  // Both ions are read out in parallel.
  const double before = ex.duration;
  m[1] = ex.measure(2, "readout_f0", "readout_f1", "readout_duration");
  ex.duration = before;
  return m;
}

Pair run_abstract_bsm(Executor& ex) {
  Pair m{};
  ex.rho = apply_unitary(ex.rho, cnot_gate(), {1, 2});
  ex.rho = apply_unitary(ex.rho, pauli::H(), {1});
  const bool was_noisy = ex.noisy();
  m[0] = ex.measure(1, nullptr, nullptr, nullptr);
  m[1] = ex.measure(2, nullptr, nullptr, nullptr);
  if (was_noisy) ex.duration = ex.hw->get("swap_duration");
  return m;
}

Pair run_bsm(Platform platform, Executor& ex) {
  switch (platform) {
    case Platform::ColorCenter: return run_cc_bsm(ex);
    case Platform::TrappedIon: return run_ti_bsm(ex);
    case Platform::Abstract: return run_abstract_bsm(ex);
  }
  return {};
}

BellIndex identify_bell(const DensityMatrix& pair) {
  for (int x = 0; x < 2; ++x)
    for (int z = 0; z < 2; ++z)
      if (fidelity(pair, bell_state({x, z})) > 1.0 - 1e-9) return {x, z};
  throw std::logic_error("noiseless Bell-state measurement did not produce a Bell state");
}

}  // namespace

Mat crx_gate() {
  Mat u = Mat::Zero(4, 4);
  u.block(0, 0, 2, 2) = pauli::rx(kPi / 2);
  u.block(2, 2, 2, 2) = pauli::rx(-kPi / 2);
  return u;
}

Mat ms_gate() {
  const Mat xx = embed(pauli::X(), {0}, 2) * embed(pauli::X(), {1}, 2);
  return std::cos(kPi / 4) * Mat::Identity(4, 4) + cplx(0, 1) * std::sin(kPi / 4) * xx;
}

Mat cnot_gate() {
  Mat u = Mat::Zero(4, 4);
  u(0, 0) = u(1, 1) = u(2, 3) = u(3, 2) = 1.0;
  return u;
}

DensityMatrix decohere_idle(const DensityMatrix& rho, int qubit, QubitRole role, double elapsed,
                            const HardwareParams& hw, double trap_rate) {
  if (!(elapsed >= 0.0)) throw std::invalid_argument("elapsed time must be nonnegative");
  if (elapsed == 0.0) return rho;
  double T1 = 0.0, T2 = 0.0;
  switch (hw.platform()) {
    case Platform::TrappedIon:
      return apply_channel(rho, CollectiveGaussian{trap_rate, elapsed, hw.get("coherence_time")}, {qubit});
    case Platform::ColorCenter:
      T1 = hw.get(role == QubitRole::Communication ? "electron_T1" : "carbon_T1");
      T2 = hw.get(role == QubitRole::Communication ? "electron_T2" : "carbon_T2");
      break;
    case Platform::Abstract:
      T1 = hw.get("T1");
      T2 = hw.get("T2");
      break;
  }
  DensityMatrix out = apply_channel(rho, AmplitudeDamping{elapsed, T1}, {qubit});
  return apply_channel(out, PhaseDamping{elapsed, T1, T2}, {qubit});
}

double induced_dephasing_prob(long attempts, double alpha, double n_1e) {
  if (attempts < 0) throw std::invalid_argument("attempt count must be nonnegative");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("bright-state parameter must lie in [0,1]");
  if (!(n_1e > 0.0)) throw std::invalid_argument("N_1/e must be positive");
  const double p_single = (1.0 - alpha) * -std::expm1(-1.0 / n_1e);
  return 0.5 * (1.0 - std::pow(1.0 - 2.0 * p_single, static_cast<double>(attempts)));
}

DensityMatrix apply_induced_dephasing(const DensityMatrix& rho, int qubit, long attempts, double alpha,
                                      const HardwareParams& hw, int times) {
  if (hw.platform() != Platform::ColorCenter) throw std::invalid_argument("induced dephasing applies to color centers only");
  const double p = induced_dephasing_prob(attempts, alpha, hw.get("n_1e"));
  DensityMatrix out = rho;
  for (int i = 0; i < times; ++i) out = apply_channel(out, Dephasing{p}, {qubit});
  return out;
}

EmissionResult emit_entangled_photon_state(const HardwareParams& hw) {
  EmissionResult r;
  r.state = apply_channel(bell_state({0, 0}), Depolarizing{depolarizing_prob(hw.get("emission_fidelity"))}, {0});
  r.duration = hw.get("emission_duration");
  return r;
}

BsmResult bell_state_measurement(const DensityMatrix& four, const HardwareParams& hw, std::mt19937_64& rng) {
  if (four.num_qubits() != 4) throw std::invalid_argument("Bell-state measurement needs a 4-qubit state");
  Executor ex;
  ex.rho = four;
  ex.hw = &hw;
  ex.rng = &rng;
  BsmResult r;
  r.outcomes = run_bsm(hw.platform(), ex);
  r.duration = ex.duration;
  r.state = partial_trace(ex.rho, {0, 3});
  if (hw.platform() == Platform::Abstract) r.state = swap_quality_channel(r.state, hw.get("swap_quality"), 0);
  r.frame = bsm_outcome_index(hw.platform(), r.outcomes[0], r.outcomes[1]);
  return r;
}

DensityMatrix bell_state_measurement_forced(const DensityMatrix& four, Platform platform, int m0, int m1) {
  Executor ex;
  ex.rho = four;
  ex.forced = {m0, m1};
  run_bsm(platform, ex);
  return partial_trace(ex.rho, {0, 3});
}

BellIndex bsm_outcome_index(Platform platform, int m0, int m1) {
  static std::mutex mu;
  static std::map<int, std::array<BellIndex, 4>> cache;
  std::lock_guard<std::mutex> lock(mu);
  const int key = static_cast<int>(platform);
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::array<BellIndex, 4> table;
    const DensityMatrix four = tensor(bell_state({0, 0}), bell_state({0, 0}));
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) table[2 * a + b] = identify_bell(bell_state_measurement_forced(four, platform, a, b));
    it = cache.emplace(key, table).first;
  }
  return it->second[2 * m0 + m1];
}

double bsm_duration(const HardwareParams& hw) {
  if (hw.platform() != Platform::ColorCenter) return swap_duration(hw);
  return 2 * hw.get("ec_gate_duration") + 3 * hw.get("electron_gate_duration") +
         2 * hw.get("electron_readout_duration") + hw.get("carbon_z_duration") + hw.get("electron_init_duration");
}

MoveResult move_to_memory(const DensityMatrix& pair, const HardwareParams& hw) {
  if (hw.platform() != Platform::ColorCenter) throw std::invalid_argument("move applies to color centers only");
  if (pair.num_qubits() != 2) throw std::invalid_argument("move needs a 2-qubit state");
  Executor ex;
  ex.rho = tensor(pair, DensityMatrix::basis_state(1, 0));
  ex.hw = &hw;
  const Mat crx = crx_gate();
  ex.init(2, "carbon_init_fidelity", "carbon_init_duration");
  ex.gate(pauli::rx(kPi / 2), {1}, "electron_gate_fidelity", "electron_gate_duration");
  ex.gate(crx, {1, 2}, "ec_gate_fidelity", "ec_gate_duration");
  ex.gate(pauli::ry(kPi / 2), {1}, "electron_gate_fidelity", "electron_gate_duration");
  ex.gate(pauli::rz(-kPi / 2), {2}, "carbon_z_fidelity", "carbon_z_duration");
  ex.gate(crx, {1, 2}, "ec_gate_fidelity", "ec_gate_duration");
  ex.gate(pauli::rz(-kPi / 2), {2}, "carbon_z_fidelity", "carbon_z_duration");
  return {partial_trace(ex.rho, {0, 2}), ex.duration};
}

double move_duration(const HardwareParams& hw) {
  return hw.get("carbon_init_duration") + 2 * hw.get("electron_gate_duration") + 2 * hw.get("ec_gate_duration") +
         2 * hw.get("carbon_z_duration");
}

DensityMatrix apply_pauli_correction(const DensityMatrix& pair, BellIndex frame) {
  return apply_unitary(pair, pauli_correction(frame).adjoint(), {0});
}

}  // namespace rf
