#include "cavityq/hilbert.hpp"

#include <cmath>
#include <sstream>

namespace cavityq {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::CutoffOverflow: return "CutoffOverflow";
    case ErrorKind::BadAxis: return "BadAxis";
    case ErrorKind::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorKind::StepControlFailure: return "StepControlFailure";
    case ErrorKind::EigenFailure: return "EigenFailure";
    case ErrorKind::EnvelopeUnsuitable: return "EnvelopeUnsuitable";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

std::vector<std::string> SystemSpec::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw Error(ErrorKind::InvalidArgument, "omega must be positive");
  if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorKind::InvalidArgument, "g must be positive");
  if (n_max < 2) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 2");
  std::vector<std::string> warnings;
  if (g / omega >= 0.2) {
    std::ostringstream os;
    os << "g/omega = " << g / omega << " is outside the RWA regime (>= 0.2)";
    warnings.push_back(os.str());
  }
  return warnings;
}

double PureState::leakage() const {
  const int nf = spec.fock_dim();
  double p = 0.0;
  for (int q = 0; q < 4; ++q)
    for (int n = spec.n_max - 1; n <= spec.n_max; ++n) p += std::norm(amplitudes[q * nf + n]);
  return p;
}

double PureState::photon_number() const {
  const int nf = spec.fock_dim();
  double acc = 0.0;
  for (int q = 0; q < 4; ++q)
    for (int n = 0; n < nf; ++n) acc += n * std::norm(amplitudes[q * nf + n]);
  return acc;
}

double PureState::excited_qubits() const {
  const int nf = spec.fock_dim();
  static constexpr int kExc[4] = {0, 1, 1, 2};
  double acc = 0.0;
  for (int q = 0; q < 4; ++q)
    for (int n = 0; n < nf; ++n) acc += kExc[q] * std::norm(amplitudes[q * nf + n]);
  return acc;
}

bool OperatorMatrix::check(double tol_herm, double tol_unit) const {
  switch (kind) {
    case MatrixKind::Hermitian:
      return (m - m.adjoint()).cwiseAbs().maxCoeff() < tol_herm;
    case MatrixKind::Unitary: {
      CMatrix d = m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols());
      return d.cwiseAbs().maxCoeff() < tol_unit;
    }
    case MatrixKind::General:
      return true;
  }
  return true;
}

CMatrix fock_annihilation(int n_max) {
  CMatrix a = CMatrix::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

CMatrix expm_hermitian(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "Hermitian eigensolver failed");
  CVector ph = (-I * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix fock_displacement(cplx z, int n_max) {
  CMatrix a = fock_annihilation(n_max);
  CMatrix gen = z * a.adjoint() - std::conj(z) * a;
  return expm_hermitian(I * gen);
}

CMatrix fock_squeeze(double r, int n_max) {
  CMatrix a = fock_annihilation(n_max);
  CMatrix a2 = a * a;
  CMatrix gen = 0.5 * r * (a2.adjoint() - a2);
  return expm_hermitian(I * gen);
}

Matrix2c single_qubit(SigmaKind kind) {
  Matrix2c m = Matrix2c::Zero();
  switch (kind) {
    case SigmaKind::Plus: m(1, 0) = 1.0; break;
    case SigmaKind::Minus: m(0, 1) = 1.0; break;
    case SigmaKind::X: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case SigmaKind::Y: m(0, 1) = I; m(1, 0) = -I; break;
    case SigmaKind::Z: m(0, 0) = -1.0; m(1, 1) = 1.0; break;
  }
  return m;
}

Matrix2c single_qubit_rotation(double theta, const std::array<double, 3>& axis) {
  const double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (std::abs(len - 1.0) > 1e-12) throw Error(ErrorKind::BadAxis, "rotation axis is not unit length");
  Matrix2c ns = axis[0] * single_qubit(SigmaKind::X) + axis[1] * single_qubit(SigmaKind::Y) +
                axis[2] * single_qubit(SigmaKind::Z);
  return std::cos(theta / 2) * Matrix2c::Identity() - I * std::sin(theta / 2) * ns;
}

OperatorMatrix kron_qubit_fock(const Matrix4c& q, const CMatrix& f) {
  const Eigen::Index nf = f.rows();
  CMatrix out(4 * nf, 4 * nf);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out.block(i * nf, j * nf, nf, nf) = q(i, j) * f;
  return {out, MatrixKind::General};
}

Matrix4c kron_qubits(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
  return out;
}

namespace {

double poisson_top_two(double mean, int n_max) {
  if (mean == 0.0) return 0.0;
  double p = 0.0;
  for (int n = n_max - 1; n <= n_max; ++n)
    p += std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0));
  return p;
}

}  // namespace

OperatorMatrix annihilation(const SystemSpec& spec) {
  auto op = kron_qubit_fock(Matrix4c::Identity(), fock_annihilation(spec.n_max));
  return op;
}

OperatorMatrix collective_sigma(SigmaKind kind, const SystemSpec& spec) {
  Matrix2c s = single_qubit(kind);
  Matrix4c q = kron_qubits(s, Matrix2c::Identity()) + kron_qubits(Matrix2c::Identity(), s);
  auto op = kron_qubit_fock(q, CMatrix::Identity(spec.fock_dim(), spec.fock_dim()));
  op.kind = (kind == SigmaKind::Plus || kind == SigmaKind::Minus) ? MatrixKind::General
                                                                  : MatrixKind::Hermitian;
  return op;
}

OperatorMatrix displacement_op(cplx z, const SystemSpec& spec, double leak_tol) {
  const double leak = poisson_top_two(std::norm(z), spec.n_max);
  if (leak > leak_tol) {
    std::ostringstream os;
    os << "coherent tail leakage " << leak << " for |z|^2 = " << std::norm(z) << " at n_max = " << spec.n_max;
    throw Error(ErrorKind::CutoffOverflow, os.str());
  }
  auto op = kron_qubit_fock(Matrix4c::Identity(), fock_displacement(z, spec.n_max));
  op.kind = MatrixKind::Unitary;
  return op;
}

CVector squeezed_vacuum_amplitudes(double r, int n_max) {
  CVector c = CVector::Zero(n_max + 1);
  const double t = std::tanh(r);
  double cm = 1.0 / std::sqrt(std::cosh(r));
  for (int m = 0; 2 * m <= n_max; ++m) {
    c[2 * m] = cm;
    cm *= t * std::sqrt((2.0 * m + 1.0) / (2.0 * m + 2.0));
  }
  return c / c.norm();
}

namespace {

// Untruncated squeezed-vacuum photon distribution P(2m), m = 0..
std::vector<double> squeezed_distribution(double r, double floor) {
  std::vector<double> p;
  const double t2 = std::tanh(r) * std::tanh(r);
  double pm = 1.0 / std::cosh(r);
  for (int m = 0;; ++m) {
    p.push_back(pm);
    pm *= t2 * (2.0 * m + 1.0) / (2.0 * m + 2.0);
    if (pm < floor && 2.0 * m > 4.0 * std::sinh(r) * std::sinh(r)) break;
    if (m > 2000000) break;
  }
  return p;
}

}  // namespace

int squeezed_cutoff(double r, double tol) {
  const double s2 = std::sinh(r) * std::sinh(r);
  int n = int(std::ceil(6.0 * s2 + 20.0));
  if (n % 2) ++n;
  if (r == 0.0) return n;
  auto p = squeezed_distribution(r, tol * 1e-6);
  // tail[m] = sum_{k >= m} P(2k)
  std::vector<double> tail(p.size() + 1, 0.0);
  for (size_t m = p.size(); m-- > 0;) tail[m] = tail[m + 1] + p[m];
  const double target = tol * 1e-2;
  size_t m = size_t(n / 2) + 1;
  while (m < tail.size() && tail[m] >= target) ++m;
  return std::max<int>(n, 2 * int(m - 1));
}

int coherent_cutoff(cplx z) {
  const double a = std::abs(z);
  return std::max(2, int(std::ceil(a * a + 8.0 * a + 10.0)));
}

OperatorMatrix squeeze_op(double r, const SystemSpec& spec, double leak_tol) {
  if (r < 0.0) throw Error(ErrorKind::InvalidArgument, "squeeze parameter must be >= 0");
  if (r > 0.0) {
    auto p = squeezed_distribution(r, 1e-300);
    double top = 0.0;
    for (int n = spec.n_max - 1; n <= spec.n_max; ++n)
      if (n % 2 == 0 && size_t(n / 2) < p.size()) top += p[n / 2];
    if (top > leak_tol) {
      std::ostringstream os;
      os << "squeezed tail leakage " << top << " at r = " << r << ", n_max = " << spec.n_max;
      throw Error(ErrorKind::CutoffOverflow, os.str());
    }
  }
  auto op = kron_qubit_fock(Matrix4c::Identity(), fock_squeeze(r, spec.n_max));
  op.kind = MatrixKind::Unitary;
  return op;
}

OperatorMatrix qubit_rotation(double theta, const std::array<double, 3>& axis, const SystemSpec& spec) {
  Matrix2c r = single_qubit_rotation(theta, axis);
  auto op = kron_qubit_fock(kron_qubits(r, r), CMatrix::Identity(spec.fock_dim(), spec.fock_dim()));
  op.kind = MatrixKind::Unitary;
  return op;
}

PureState basis_state(const SystemSpec& spec, int q, int n) {
  PureState s(spec);
  s.at(q, n) = 1.0;
  return s;
}

PureState psi_plus(const SystemSpec& spec, int n) {
  PureState s(spec);
  s.at(1, n) = s.at(2, n) = 1.0 / std::sqrt(2.0);
  return s;
}

PureState psi_minus(const SystemSpec& spec, int n) {
  PureState s(spec);
  s.at(1, n) = 1.0 / std::sqrt(2.0);
  s.at(2, n) = -1.0 / std::sqrt(2.0);
  return s;
}

PureState coherent_state(cplx z, const SystemSpec& spec) {
  PureState s(spec);
  CMatrix d = fock_displacement(z, spec.n_max);
  for (int n = 0; n <= spec.n_max; ++n) s.at(0, n) = d(n, 0);
  return s;
}

void apply_qubit_op(PureState& s, const Matrix4c& q) {
  Eigen::Map<CMatrix> m(s.amplitudes.data(), s.spec.fock_dim(), 4);
  CMatrix tmp = m * q.transpose();
  m = tmp;
}

void apply_fock_op(PureState& s, const CMatrix& f) {
  Eigen::Map<CMatrix> m(s.amplitudes.data(), s.spec.fock_dim(), 4);
  CMatrix tmp = f * m;
  m = tmp;
}

QubitDensityMatrix partial_trace_cavity(const PureState& s) {
  Eigen::Map<const CMatrix> m(s.amplitudes.data(), s.spec.fock_dim(), 4);
  QubitDensityMatrix rho = m.transpose() * m.conjugate();
  return rho;
}

}  // namespace cavityq
