#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <random>
#include <variant>
#include <vector>

namespace rf {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

constexpr int kMaxQubits = 4;

// Qubit 0 is the most significant tensor factor.
class DensityMatrix {
public:
  DensityMatrix();
  explicit DensityMatrix(Mat m, bool check = true);

  static DensityMatrix pure(const Vec& psi);
  static DensityMatrix maximally_mixed(int num_qubits);
  static DensityMatrix basis_state(int num_qubits, int index);

  int dim() const { return static_cast<int>(m_.rows()); }
  int num_qubits() const;
  const Mat& matrix() const { return m_; }
  cplx operator()(int r, int c) const { return m_(r, c); }

  double trace() const { return m_.trace().real(); }
  DensityMatrix normalized() const;

  // Throws std::domain_error on Hermiticity, trace or positivity violations.
  void validate(double herm_tol = 1e-12, double trace_tol = 1e-12, double psd_tol = 1e-10) const;
  bool is_valid(double herm_tol = 1e-12, double trace_tol = 1e-12, double psd_tol = 1e-10) const;

private:
  Mat m_;
};

struct BellIndex {
  int x = 0;
  int z = 0;
  bool operator==(const BellIndex&) const = default;
};

BellIndex compose(BellIndex a, BellIndex b);

namespace pauli {
Mat I();
Mat X();
Mat Y();
Mat Z();
Mat H();
Mat rx(double theta);
Mat ry(double theta);
Mat rz(double theta);
}  // namespace pauli

Vec bell_vector(BellIndex idx);
DensityMatrix bell_state(BellIndex idx);
Mat pauli_correction(BellIndex idx);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);
// Moves qubit order so that new qubit i is old qubit order[i].
DensityMatrix permute_qubits(const DensityMatrix& rho, const std::vector<int>& order);

// Full-space operator acting as op on the listed qubits (op dimension 2^qubits.size()).
Mat embed(const Mat& op, const std::vector<int>& qubits, int num_qubits);

DensityMatrix apply_unitary(const DensityMatrix& rho, const Mat& u, const std::vector<int>& qubits);
DensityMatrix apply_kraus(const DensityMatrix& rho, const std::vector<Mat>& kraus,
                          const std::vector<int>& qubits);

struct Depolarizing { double p; };
struct AmplitudeDamping { double t; double T1; };
struct PhaseDamping { double t; double T1; double T2; };
struct Dephasing { double p; };
// Sampled-rate collective rotation exp(-i r t/tau sum_j Z_j).
struct CollectiveGaussian { double r; double t; double tau; };
// Gaussian average over r of the collective rotation.
struct CollectiveGaussianAveraged { double t; double tau; };

using ChannelSpec = std::variant<Depolarizing, AmplitudeDamping, PhaseDamping, Dephasing,
                                 CollectiveGaussian, CollectiveGaussianAveraged>;

// Single-qubit kinds act independently on every listed qubit; collective kinds act jointly.
DensityMatrix apply_channel(const DensityMatrix& rho, const ChannelSpec& ch,
                            const std::vector<int>& qubits);

// rho -> ((1+3s)/4) rho + ((1-s)/4)(X rho X + Y rho Y + Z rho Z) on one qubit.
DensityMatrix swap_quality_channel(const DensityMatrix& rho, double s_q, int qubit);

struct ReadoutError {
  double p0 = 0.0;  // probability that |0> is reported as 1
  double p1 = 0.0;  // probability that |1> is reported as 0
  int apply(int outcome, double uniform) const;
};

struct MeasureResult {
  double prob[2];
  DensityMatrix post[2];
};
// Computational-basis measurement of one qubit; post states are normalized
// (left as the input when the branch has zero probability).
MeasureResult measure(const DensityMatrix& rho, int qubit);
DensityMatrix project(const DensityMatrix& rho, int qubit, int outcome);
DensityMatrix reset_qubit(const DensityMatrix& rho, int qubit);

double fidelity(const DensityMatrix& a, const DensityMatrix& b_pure);

DensityMatrix teleportation_channel_apply(const DensityMatrix& sigma, const DensityMatrix& psi);
double avg_teleportation_fidelity(const DensityMatrix& sigma);
// 2 * average of <psi psi*| sigma |psi psi*> over the six Pauli eigenstates.
double rsp_fidelity(const DensityMatrix& sigma);
// Averages of the teleported-state fidelity over {|0>,|1>} and over the eight
// equatorial states (|0> + e^{i k pi/4}|1>)/sqrt2.
double avg_dummy_fidelity(const DensityMatrix& sigma);
double avg_trap_fidelity(const DensityMatrix& sigma);

std::array<Vec, 6> pauli_eigenstates();
DensityMatrix werner_state(double bell_fraction);

Vec haar_random_vector(int dim, std::mt19937_64& rng);
DensityMatrix random_density_matrix(int num_qubits, std::mt19937_64& rng);

}  // namespace rf
