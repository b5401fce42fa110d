#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cavityq/dynamics.hpp"
#include "cavityq/pulses.hpp"

namespace cavityq {

struct Displacement {
  cplx z;
};
struct Rotation {
  double theta;
  std::array<double, 3> axis;
};
// exp(sigma_z (beta a+ - beta* a)) with collective sigma_z
struct ConditionalDisplacement {
  cplx beta;
};
// exp(-i angle sigma_z)
struct CollectiveZRotation {
  double angle;
};
// exp(i phase)
struct GlobalPhase {
  double phase;
};

using PropagatorFactor = std::variant<Displacement, Rotation, ConditionalDisplacement, CollectiveZRotation, GlobalPhase>;

// Factors are listed left to right as in the written product and applied right to left.
struct AnalyticPropagator {
  std::vector<PropagatorFactor> factors;

  void apply(PureState& s) const;
  CMatrix materialize(const SystemSpec& spec) const;
};

CMatrix materialize_factor(const PropagatorFactor& f, const SystemSpec& spec);

inline double g_tau_d(const PulseSpec& p, const SystemSpec& s) { return s.g * p.tau_d(s); }

cplx displacement_amplitude(const PulseSpec& p, double u);
cplx displacement_amplitude(const PulseSpec& p, const FunctionalSet& fs);

struct RotationParams {
  double theta = 0.0;
  std::array<double, 3> axis{1.0, 0.0, 0.0};
  bool axis_defined = true;  // false when |s11| < 1e-14; theta is then 0
};
RotationParams rotation_params(const PulseSpec& p, const SystemSpec& spec, double u);
RotationParams rotation_params(const PulseSpec& p, const SystemSpec& spec, const FunctionalSet& fs);

struct HigherOrderTerms {
  cplx conditional_displacement;  // beta of exp(sigma_z (beta a+ - beta* a))
  double z_rotation_angle = 0.0;  // angle of exp(-i angle sigma_z)
};
HigherOrderTerms higher_order_terms(const PulseSpec& p, const SystemSpec& spec, double u);
HigherOrderTerms higher_order_terms(const PulseSpec& p, const SystemSpec& spec, const FunctionalSet& fs);

double scalar_phase(const PulseSpec& p, const FunctionalSet& fs);

AnalyticPropagator analytic_propagator(const PulseSpec& p, const SystemSpec& spec, const FunctionalSet& fs, int order);

// Analytic state at lab time t >= -T from the state at -T:
// U_g(t) Ucal(min(t, T)) U_g(T) psi(-T).
PureState analytic_state_at(const PureState& psi_start, const PulseSpec& p, const SystemSpec& spec, int order, double t,
                            const FunctionalTable& table, double leak_tol = kDefaultLeakageTol);
// Final state at t = T.
PureState analytic_propagate(const PureState& psi_start, const PulseSpec& p, const SystemSpec& spec, int order);

double overlap(const PureState& a, const PureState& b);

struct TargetPulse {
  double area = 0.0;
  double phi = 0.0;
};
TargetPulse solve_displacement_target(cplx z0, const Envelope& envelope);

struct FidelityOptions {
  double g_over_omega = 0.01;
  double window = 5.0;
  int n_max = 0;  // 0: coherent cutoff from z0
  IntegratorConfig integrator{};
};

struct FidelityPoint {
  double g_tau_d = 0.0;
  double omega_tau_d = 0.0;
  double area = 0.0;
  double phi = 0.0;
  double fidelity = 0.0;
  double one_minus_f = 0.0;
};

FidelityPoint displacement_fidelity(cplx z0, const Envelope& envelope, double g_tau_d,
                                    const FidelityOptions& opt = {});

struct FidelitySweep {
  std::vector<FidelityPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
};

std::vector<double> geometric_grid(double lo, double hi, int n);
// Points are independent and evaluated concurrently.
FidelitySweep fidelity_sweep(cplx z0, const Envelope& envelope, const std::vector<double>& g_tau_d,
                             const FidelityOptions& opt = {});
// Least-squares slope and intercept of log y vs log x.
std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

// Numeric Magnus exponents by nested Chebyshev-panel quadrature, dense on a small cutoff.
struct MagnusTerms {
  CMatrix a1;      // A_I^(1)(T)
  CMatrix a2;      // A_I^(2)(T)
  CMatrix a2p1;    // A_II'^(1)(T)
  CMatrix a2p2;    // A_II'^(2)(T)
};
MagnusTerms numeric_magnus_terms(const PulseSpec& p, const SystemSpec& spec);
// Largest singular value on the subspace of total excitation <= sector.
double sector_norm(const CMatrix& a, const SystemSpec& spec, int sector);

struct ScalingEntry {
  std::string term;
  std::string transform;   // "Omega/2" or "tau_d/2"
  double norm_base = 0.0;  // measured (ratio for the A_II'/A_I entry)
  double norm_scaled = 0.0;
  double predicted_order = 0.0;  // (sqrt(n) Omega tau_d)^m or (Omega tau_d g tau_d)^m at base
  double predicted_exponent = 0.0;
  double fitted_exponent = 0.0;
  double ratio_error() const;  // |measured ratio / 2^predicted_exponent - 1|
};

struct ScalingReport {
  int sector = 0;
  std::vector<ScalingEntry> entries;
};

ScalingReport magnus_scaling_check(const PulseSpec& p, const SystemSpec& spec, int sector);

}  // namespace cavityq
