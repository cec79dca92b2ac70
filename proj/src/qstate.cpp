#include "repeaterforge/qstate.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rf {

namespace {

int qubits_for_dim(int dim) {
  int n = 0;
  while ((1 << n) < dim) ++n;
  if ((1 << n) != dim) throw std::invalid_argument("dimension is not a power of two");
  return n;
}

inline int bit(int index, int qubit, int n) { return (index >> (n - 1 - qubit)) & 1; }

int sub_index(int index, const std::vector<int>& qubits, int n) {
  int s = 0;
  for (int q : qubits) s = (s << 1) | bit(index, q, n);
  return s;
}

int rest_mask(const std::vector<int>& qubits, int n) {
  int mask = (1 << n) - 1;
  for (int q : qubits) mask &= ~(1 << (n - 1 - q));
  return mask;
}

void check_qubits(const std::vector<int>& qubits, int n) {
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    if (qubits[i] < 0 || qubits[i] >= n) throw std::out_of_range("qubit index out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (qubits[i] == qubits[j]) throw std::invalid_argument("qubit indices must be distinct");
  }
}

void check_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0,1]");
}

void check_time(double t, double T, const char* what) {
  if (!(t >= 0.0)) throw std::invalid_argument("elapsed time must be nonnegative");
  if (!(T > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
}

Mat single(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}

DensityMatrix apply_each(const DensityMatrix& rho, const std::vector<Mat>& kraus,
                         const std::vector<int>& qubits) {
  DensityMatrix out = rho;
  for (int q : qubits) out = apply_kraus(out, kraus, {q});
  return out;
}

DensityMatrix pauli_mix(const DensityMatrix& rho, double pz, const std::vector<int>& qubits) {
  const std::vector<Mat> k = {std::sqrt(1.0 - pz) * pauli::I(), std::sqrt(pz) * pauli::Z()};
  return apply_each(rho, k, qubits);
}

}  // namespace

DensityMatrix::DensityMatrix() : m_(Mat::Zero(2, 2)) { m_(0, 0) = 1.0; }

DensityMatrix::DensityMatrix(Mat m, bool check) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("density matrix must be square");
  int n = qubits_for_dim(static_cast<int>(m_.rows()));
  if (n < 1 || n > kMaxQubits) throw std::invalid_argument("unsupported number of qubits");
  if (check) validate();
}

DensityMatrix DensityMatrix::pure(const Vec& psi) {
  Vec v = psi / psi.norm();
  return DensityMatrix(v * v.adjoint(), false);
}

DensityMatrix DensityMatrix::maximally_mixed(int num_qubits) {
  int d = 1 << num_qubits;
  return DensityMatrix(Mat::Identity(d, d) / static_cast<double>(d), false);
}

DensityMatrix DensityMatrix::basis_state(int num_qubits, int index) {
  int d = 1 << num_qubits;
  Mat m = Mat::Zero(d, d);
  m(index, index) = 1.0;
  return DensityMatrix(m, false);
}

int DensityMatrix::num_qubits() const { return qubits_for_dim(dim()); }

DensityMatrix DensityMatrix::normalized() const {
  double t = trace();
  if (!(t > 0.0)) throw std::domain_error("cannot normalize a zero-trace operator");
  return DensityMatrix(m_ / t, false);
}

bool DensityMatrix::is_valid(double herm_tol, double trace_tol, double psd_tol) const {
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > herm_tol) return false;
  if (std::abs(m_.trace() - cplx(1.0, 0.0)) > trace_tol) return false;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m_ + m_.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -psd_tol;
}

void DensityMatrix::validate(double herm_tol, double trace_tol, double psd_tol) const {
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > herm_tol)
    throw std::domain_error("density matrix is not Hermitian");
  if (std::abs(m_.trace() - cplx(1.0, 0.0)) > trace_tol)
    throw std::domain_error("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m_ + m_.adjoint()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -psd_tol)
    throw std::domain_error("density matrix has a negative eigenvalue");
}

BellIndex compose(BellIndex a, BellIndex b) { return {a.x ^ b.x, a.z ^ b.z}; }

namespace pauli {
Mat I() { return Mat::Identity(2, 2); }
Mat X() { return single(0, 1, 1, 0); }
Mat Y() {
  Mat m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
Mat Z() { return single(1, 0, 0, -1); }
Mat H() { return single(1, 1, 1, -1) / std::sqrt(2.0); }
Mat rx(double t) { return std::cos(t / 2) * I() - cplx(0, 1) * std::sin(t / 2) * X(); }
Mat ry(double t) { return std::cos(t / 2) * I() - cplx(0, 1) * std::sin(t / 2) * Y(); }
Mat rz(double t) { return std::cos(t / 2) * I() - cplx(0, 1) * std::sin(t / 2) * Z(); }
}  // namespace pauli

Mat pauli_correction(BellIndex idx) {
  Mat p = pauli::I();
  if (idx.x) p = p * pauli::X();
  if (idx.z) p = p * pauli::Z();
  return p;
}

Vec bell_vector(BellIndex idx) {
  Vec phi = Vec::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  Mat op = Eigen::kroneckerProduct(pauli_correction(idx), pauli::I()).eval();
  return op * phi;
}

DensityMatrix bell_state(BellIndex idx) { return DensityMatrix::pure(bell_vector(idx)); }

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  Mat k = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
  return DensityMatrix(std::move(k), false);
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  int n = rho.num_qubits();
  check_qubits(keep, n);
  int d = 1 << keep.size();
  int mask = rest_mask(keep, n);
  Mat out = Mat::Zero(d, d);
  const Mat& m = rho.matrix();
  for (int r = 0; r < rho.dim(); ++r)
    for (int c = 0; c < rho.dim(); ++c)
      if ((r & mask) == (c & mask)) out(sub_index(r, keep, n), sub_index(c, keep, n)) += m(r, c);
  return DensityMatrix(std::move(out), false);
}

DensityMatrix permute_qubits(const DensityMatrix& rho, const std::vector<int>& order) {
  int n = rho.num_qubits();
  if (static_cast<int>(order.size()) != n) throw std::invalid_argument("permutation size mismatch");
  check_qubits(order, n);
  int d = rho.dim();
  std::vector<int> old_of(d);
  for (int j = 0; j < d; ++j) {
    int o = 0;
    for (int i = 0; i < n; ++i) o |= bit(j, i, n) << (n - 1 - order[i]);
    old_of[j] = o;
  }
  Mat out(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) out(j, k) = rho.matrix()(old_of[j], old_of[k]);
  return DensityMatrix(std::move(out), false);
}

Mat embed(const Mat& op, const std::vector<int>& qubits, int n) {
  check_qubits(qubits, n);
  if (op.rows() != (1 << qubits.size())) throw std::invalid_argument("operator size mismatch");
  int d = 1 << n;
  int mask = rest_mask(qubits, n);
  Mat full = Mat::Zero(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      if ((r & mask) == (c & mask)) full(r, c) = op(sub_index(r, qubits, n), sub_index(c, qubits, n));
  return full;
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const Mat& u, const std::vector<int>& qubits) {
  Mat full = embed(u, qubits, rho.num_qubits());
  return DensityMatrix(full * rho.matrix() * full.adjoint(), false);
}

DensityMatrix apply_kraus(const DensityMatrix& rho, const std::vector<Mat>& kraus,
                          const std::vector<int>& qubits) {
  int n = rho.num_qubits();
  Mat out = Mat::Zero(rho.dim(), rho.dim());
  for (const Mat& k : kraus) {
    Mat full = embed(k, qubits, n);
    out += full * rho.matrix() * full.adjoint();
  }
  return DensityMatrix(std::move(out), false);
}

DensityMatrix apply_channel(const DensityMatrix& rho, const ChannelSpec& ch,
                            const std::vector<int>& qubits) {
  int n = rho.num_qubits();
  check_qubits(qubits, n);
  if (const auto* c = std::get_if<Depolarizing>(&ch)) {
    check_prob(c->p, "depolarizing probability");
    const double p = c->p;
    const std::vector<Mat> k = {std::sqrt(1.0 - 0.75 * p) * pauli::I(), std::sqrt(p / 4) * pauli::X(),
                                std::sqrt(p / 4) * pauli::Y(), std::sqrt(p / 4) * pauli::Z()};
    return apply_each(rho, k, qubits);
  }
  if (const auto* c = std::get_if<AmplitudeDamping>(&ch)) {
    check_time(c->t, c->T1, "T1");
    if (std::isinf(c->T1)) return rho;
    const double keep = std::exp(-c->t / c->T1);
    const std::vector<Mat> k = {single(1, 0, 0, std::sqrt(keep)), single(0, std::sqrt(1.0 - keep), 0, 0)};
    return apply_each(rho, k, qubits);
  }
  if (const auto* c = std::get_if<PhaseDamping>(&ch)) {
    check_time(c->t, c->T1, "T1");
    check_time(c->t, c->T2, "T2");
    const double decay = std::exp(-c->t / c->T2) * std::exp(-c->t / (2.0 * c->T1));
    return pauli_mix(rho, 0.5 * (1.0 - decay), qubits);
  }
  if (const auto* c = std::get_if<Dephasing>(&ch)) {
    check_prob(c->p, "dephasing probability");
    return pauli_mix(rho, c->p, qubits);
  }
  if (const auto* c = std::get_if<CollectiveGaussian>(&ch)) {
    check_time(c->t, c->tau, "coherence time");
    const double theta = c->r * c->t / c->tau;
    Mat out = rho.matrix();
    for (int i = 0; i < rho.dim(); ++i) {
      int si = 0;
      for (int q : qubits) si += bit(i, q, n) ? -1 : 1;
      for (int j = 0; j < rho.dim(); ++j) {
        int sj = 0;
        for (int q : qubits) sj += bit(j, q, n) ? -1 : 1;
        out(i, j) *= std::polar(1.0, -theta * (si - sj));
      }
    }
    return DensityMatrix(std::move(out), false);
  }
  const auto& c = std::get<CollectiveGaussianAveraged>(ch);
  check_time(c.t, c.tau, "coherence time");
  const double x = c.t / c.tau;
  Mat out = rho.matrix();
  for (int i = 0; i < rho.dim(); ++i) {
    int si = 0;
    for (int q : qubits) si += bit(i, q, n) ? -1 : 1;
    for (int j = 0; j < rho.dim(); ++j) {
      int sj = 0;
      for (int q : qubits) sj += bit(j, q, n) ? -1 : 1;
      const double ds = si - sj;
      out(i, j) *= std::exp(-0.5 * x * x * ds * ds);
    }
  }
  return DensityMatrix(std::move(out), false);
}

DensityMatrix swap_quality_channel(const DensityMatrix& rho, double s_q, int qubit) {
  check_prob(s_q, "swap quality");
  const double w0 = (1.0 + 3.0 * s_q) / 4.0;
  const double w = (1.0 - s_q) / 4.0;
  return apply_kraus(rho,
                     {std::sqrt(w0) * pauli::I(), std::sqrt(w) * pauli::X(), std::sqrt(w) * pauli::Y(),
                      std::sqrt(w) * pauli::Z()},
                     {qubit});
}

int ReadoutError::apply(int outcome, double uniform) const {
  const double flip = outcome == 0 ? p0 : p1;
  return uniform < flip ? 1 - outcome : outcome;
}

DensityMatrix project(const DensityMatrix& rho, int qubit, int outcome) {
  Mat p = Mat::Zero(2, 2);
  p(outcome, outcome) = 1.0;
  Mat full = embed(p, {qubit}, rho.num_qubits());
  return DensityMatrix(full * rho.matrix() * full, false);
}

MeasureResult measure(const DensityMatrix& rho, int qubit) {
  MeasureResult res;
  for (int o = 0; o < 2; ++o) {
    DensityMatrix un = project(rho, qubit, o);
    res.prob[o] = std::max(0.0, un.trace());
    res.post[o] = res.prob[o] > 0.0 ? un.normalized() : rho;
  }
  return res;
}

DensityMatrix reset_qubit(const DensityMatrix& rho, int qubit) {
  return apply_kraus(rho, {single(1, 0, 0, 0), single(0, 1, 0, 0)}, {qubit});
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b_pure) {
  if (a.dim() != b_pure.dim()) throw std::invalid_argument("dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Mat> es(b_pure.matrix());
  int top = static_cast<int>(es.eigenvalues().size()) - 1;
  if (std::abs(es.eigenvalues()(top) - 1.0) > 1e-9) throw std::invalid_argument("reference state is not pure");
  Vec phi = es.eigenvectors().col(top);
  return (phi.adjoint() * a.matrix() * phi)(0, 0).real();
}

DensityMatrix teleportation_channel_apply(const DensityMatrix& sigma, const DensityMatrix& psi) {
  if (sigma.dim() != 4 || psi.dim() != 2) throw std::invalid_argument("teleportation needs a 2-qubit resource and a 1-qubit input");
  Mat joint = Eigen::kroneckerProduct(sigma.matrix(), psi.matrix()).eval();
  Mat out = Mat::Zero(2, 2);
  for (int x = 0; x < 2; ++x)
    for (int z = 0; z < 2; ++z) {
      BellIndex b{x, z};
      Mat k = Eigen::kroneckerProduct(pauli_correction(b), bell_vector(b).adjoint()).eval();
      out += k * joint * k.adjoint();
    }
  return DensityMatrix(std::move(out), false);
}

std::array<Vec, 6> pauli_eigenstates() {
  const double s = 1.0 / std::sqrt(2.0);
  std::array<Vec, 6> st;
  for (auto& v : st) v = Vec::Zero(2);
  st[0](0) = 1;
  st[1](1) = 1;
  st[2] << s, s;
  st[3] << s, -s;
  st[4] << s, cplx(0, s);
  st[5] << s, cplx(0, -s);
  return st;
}

namespace {
double teleported_overlap(const DensityMatrix& sigma, const Vec& v) {
  DensityMatrix in = DensityMatrix::pure(v);
  DensityMatrix out = teleportation_channel_apply(sigma, in);
  return (v.adjoint() * out.matrix() * v)(0, 0).real();
}
}  // namespace

double avg_teleportation_fidelity(const DensityMatrix& sigma) {
  if (sigma.dim() != 4) throw std::invalid_argument("teleportation fidelity needs a 2-qubit state");
  double acc = 0.0;
  for (const Vec& v : pauli_eigenstates()) acc += teleported_overlap(sigma, v);
  return acc / 6.0;
}

double rsp_fidelity(const DensityMatrix& sigma) {
  if (sigma.dim() != 4) throw std::invalid_argument("RSP fidelity needs a 2-qubit state");
  double acc = 0.0;
  for (const Vec& v : pauli_eigenstates()) {
    Vec w = Eigen::kroneckerProduct(v, v.conjugate()).eval();
    acc += (w.adjoint() * sigma.matrix() * w)(0, 0).real();
  }
  return 2.0 * acc / 6.0;
}

double avg_dummy_fidelity(const DensityMatrix& sigma) {
  auto st = pauli_eigenstates();
  return 0.5 * (teleported_overlap(sigma, st[0]) + teleported_overlap(sigma, st[1]));
}

double avg_trap_fidelity(const DensityMatrix& sigma) {
  double acc = 0.0;
  for (int k = 0; k < 8; ++k) {
    Vec v(2);
    v << 1.0 / std::sqrt(2.0), std::polar(1.0 / std::sqrt(2.0), k * M_PI / 4.0);
    acc += teleported_overlap(sigma, v);
  }
  return acc / 8.0;
}

DensityMatrix werner_state(double f) {
  Mat phi = bell_state({0, 0}).matrix();
  Mat m = f * phi + (1.0 - f) / 3.0 * (Mat::Identity(4, 4) - phi);
  return DensityMatrix(std::move(m), false);
}

Vec haar_random_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cplx(g(rng), g(rng));
  return v / v.norm();
}

DensityMatrix random_density_matrix(int num_qubits, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  int d = 1 << num_qubits;
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(g(rng), g(rng));
  Mat m = a * a.adjoint();
  m /= m.trace().real();
  return DensityMatrix(0.5 * (m + m.adjoint()), false);
}

}  // namespace rf
