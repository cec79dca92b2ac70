#pragma once

#include <array>
#include <random>

#include "repeaterforge/hardware.hpp"
#include "repeaterforge/qstate.hpp"

namespace rf {

enum class QubitRole { Communication, Memory };

// Electron-carbon native gate |0><0| (x) Rx(pi/2) + |1><1| (x) Rx(-pi/2); control first.
Mat crx_gate();
// Molmer-Sorensen gate exp(+i pi/4 XX).
Mat ms_gate();
Mat cnot_gate();

// Storage noise for one qubit. CC uses role-specific T1/T2, abstract uniform
// T1/T2, TI the trap rotation with sampled rate r.
DensityMatrix decohere_idle(const DensityMatrix& rho, int qubit, QubitRole role, double elapsed,
                            const HardwareParams& hw, double trap_rate = 0.0);

double induced_dephasing_prob(long attempts, double alpha, double n_1e);
// Applies the accumulated dephasing `times` times to the memory qubit (CC only).
DensityMatrix apply_induced_dephasing(const DensityMatrix& rho, int qubit, long attempts, double alpha,
                                      const HardwareParams& hw, int times);

struct EmissionResult {
  DensityMatrix state;  // (matter, photon)
  double duration = 0.0;
};
EmissionResult emit_entangled_photon_state(const HardwareParams& hw);

// Bell-state measurement on qubits 1 and 2 of a 4-qubit state (X, q1, q2, Y).
// For the color center q1 is the electron and q2 the carbon.
struct BsmResult {
  std::array<int, 2> outcomes{0, 0};  // reported (after readout error)
  BellIndex frame;                    // Pauli frame of the (X, Y) output for Phi+ inputs
  double duration = 0.0;
  DensityMatrix state;  // uncorrected (X, Y)
};
BsmResult bell_state_measurement(const DensityMatrix& four, const HardwareParams& hw, std::mt19937_64& rng);
// Noiseless circuit with forced outcomes, used to build the outcome table.
DensityMatrix bell_state_measurement_forced(const DensityMatrix& four, Platform platform, int m0, int m1);
BellIndex bsm_outcome_index(Platform platform, int m0, int m1);

// Color-center move of qubit 1 (electron) of (X, e) onto a fresh carbon; returns (X, c).
struct MoveResult {
  DensityMatrix state;
  double duration = 0.0;
};
MoveResult move_to_memory(const DensityMatrix& pair, const HardwareParams& hw);
double move_duration(const HardwareParams& hw);
double bsm_duration(const HardwareParams& hw);

// Applies (X^x Z^z)^dagger to qubit 0.
DensityMatrix apply_pauli_correction(const DensityMatrix& pair, BellIndex frame);

}  // namespace rf
