#pragma once

#include <array>
#include <string>
#include <vector>

#include "cavityq/types.hpp"

namespace cavityq {

struct SystemSpec {
  double omega = 1.0;
  double g = 0.05;
  int n_max = 20;

  int fock_dim() const { return n_max + 1; }
  int dim() const { return 4 * (n_max + 1); }
  // Throws InvalidArgument; returns warnings for soft limits.
  std::vector<std::string> validate() const;
};

inline constexpr double kDefaultLeakageTol = 1e-8;

// Qubit label q = 2*qA + qB, ordering 00, 01, 10, 11.
inline int basis_index(const SystemSpec& s, int q, int n) { return q * s.fock_dim() + n; }

struct PureState {
  SystemSpec spec;
  CVector amplitudes;

  PureState() = default;
  explicit PureState(const SystemSpec& s) : spec(s), amplitudes(CVector::Zero(s.dim())) {}

  cplx& at(int q, int n) { return amplitudes[q * spec.fock_dim() + n]; }
  cplx at(int q, int n) const { return amplitudes[q * spec.fock_dim() + n]; }
  double norm() const { return amplitudes.norm(); }
  // Population in the top two Fock levels.
  double leakage() const;
  double photon_number() const;
  double excited_qubits() const;
};

enum class MatrixKind { Hermitian, Unitary, General };

struct OperatorMatrix {
  CMatrix m;
  MatrixKind kind = MatrixKind::General;
  bool check(double tol_herm = 1e-12, double tol_unit = 1e-10) const;
};

using QubitDensityMatrix = Matrix4c;

enum class SigmaKind { Plus, Minus, X, Y, Z };

// Fock-factor building blocks, size (n_max+1)^2.
CMatrix fock_annihilation(int n_max);
CMatrix fock_displacement(cplx z, int n_max);
CMatrix fock_squeeze(double r, int n_max);
Matrix2c single_qubit(SigmaKind kind);
Matrix2c single_qubit_rotation(double theta, const std::array<double, 3>& axis);
// Two-qubit operator a (qubit A) x b (qubit B).
Matrix4c kron_qubits(const Matrix2c& a, const Matrix2c& b);

// Full-space operators, qubits-major.
OperatorMatrix annihilation(const SystemSpec& spec);
OperatorMatrix collective_sigma(SigmaKind kind, const SystemSpec& spec);
OperatorMatrix displacement_op(cplx z, const SystemSpec& spec, double leak_tol = kDefaultLeakageTol);
OperatorMatrix squeeze_op(double r, const SystemSpec& spec, double leak_tol = kDefaultLeakageTol);
OperatorMatrix qubit_rotation(double theta, const std::array<double, 3>& axis, const SystemSpec& spec);
OperatorMatrix kron_qubit_fock(const Matrix4c& q, const CMatrix& f);

// exp(-i H) for Hermitian H via eigendecomposition.
CMatrix expm_hermitian(const CMatrix& h);

PureState basis_state(const SystemSpec& spec, int q, int n);
// |Psi+> x |n>, |Psi-> x |n>
PureState psi_plus(const SystemSpec& spec, int n);
PureState psi_minus(const SystemSpec& spec, int n);
PureState coherent_state(cplx z, const SystemSpec& spec);
// Analytic squeezed-vacuum amplitudes on the truncated space, renormalized.
CVector squeezed_vacuum_amplitudes(double r, int n_max);

// Qubit operator Q (4x4) applied on the qubit factor; F on the Fock factor.
void apply_qubit_op(PureState& s, const Matrix4c& q);
void apply_fock_op(PureState& s, const CMatrix& f);

QubitDensityMatrix partial_trace_cavity(const PureState& s);

// Smallest cutoffs meeting the leakage target.
int coherent_cutoff(cplx z);
int squeezed_cutoff(double r, double tol = kDefaultLeakageTol);

}  // namespace cavityq
