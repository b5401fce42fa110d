#pragma once

#include <array>

#include "cavityq/hilbert.hpp"

namespace cavityq {

struct ConcurrenceResult {
  std::array<double, 4> lambdas{};  // descending
  double naive = 0.0;
  double concurrence = 0.0;
  double max_imag = 0.0;  // largest |Im| among eigenvalues of rho * rho~ before clamping
  bool used_fallback = false;
};

inline constexpr double kEigenClamp = 1e-10;

Matrix4c spin_flip(const QubitDensityMatrix& rho);
ConcurrenceResult concurrence(const QubitDensityMatrix& rho);
double naive_concurrence(const PureState& s);
// |<psi| sy sy |psi*>| for a two-qubit pure state.
double pure_state_concurrence(const Eigen::Vector4cd& psi);

double sector_concurrence(int n, double t, const SystemSpec& spec);
double max_sector_concurrence(int n);
// Grid search plus Brent refinement of sector_concurrence over one period 2 pi / g_n.
double numeric_max_sector_concurrence(int n, const SystemSpec& spec, int grid = 2000);

}  // namespace cavityq
