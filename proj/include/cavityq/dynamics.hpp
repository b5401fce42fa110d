#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cavityq/hilbert.hpp"
#include "cavityq/pulses.hpp"

namespace cavityq {

enum class Coupling { Rwa, Full };

enum class IntegratorMethod { DormandPrince45, Rk4Fixed };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::DormandPrince45;
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  // Max step in units of min(tau_d, 2 pi / omega); also the fixed RK4 step.
  double max_step_fraction = 0.05;
  double leak_tol = kDefaultLeakageTol;
  double norm_tol = 1e-8;  // per-step norm drift before renormalization
  void validate() const;
};

// Block bookkeeping for H_g: bright triple per excitation number plus dark states.
struct BlockInfo {
  int excitation;
  int size;        // 1, 2 or 3 bright states present under the cutoff
  double g_n;      // sqrt(4n - 2) g for n >= 1, 0 for n = 0
};
std::vector<BlockInfo> block_decomposition(const SystemSpec& spec);

PureState evolve_free(const PureState& state, double dt);

struct Trajectory {
  SystemSpec spec;
  std::vector<double> t;
  std::vector<CVector> psi;
  long steps = 0;
  long rejected = 0;

  PureState state(size_t i) const;
  PureState final_state() const { return state(psi.size() - 1); }
};

// Integrates the rotating-frame Schrodinger equation from t0 to t1 (either
// direction). Samples are returned at t0, every entry of sample_times inside
// the span, and t1.
Trajectory evolve_driven(const PureState& state, const PulseSpec& p, const SystemSpec& spec, double t0, double t1,
                         const IntegratorConfig& cfg, Coupling coupling,
                         const std::vector<double>& sample_times = {});

// Dense rotating-frame Hamiltonian at time t (pulse may be null).
CMatrix dense_hamiltonian(const SystemSpec& spec, const PulseSpec* p, double t, Coupling coupling);
// Diagonal of the excitation number operator a+a + sum s+s-.
Eigen::VectorXd excitation_diagonal(const SystemSpec& spec);
// Ground state of the undriven Hamiltonian, expressed in the rotating frame at time t0.
// Rwa gives |00;0>; Full diagonalizes the lab-frame Rabi-type Hamiltonian.
PureState undriven_ground_state(const SystemSpec& spec, Coupling coupling, double t0);

struct Populations {
  double p00 = 0.0, ppsi = 0.0, p11 = 0.0;
};
Populations closed_form_populations(int n, double t, const SystemSpec& spec);

void write_trajectory_csv(std::ostream& os, const Trajectory& tr, const std::map<std::string, std::string>& meta);

}  // namespace cavityq

namespace cavityq {

// Same pulse run with RWA and full cavity-qubit coupling; the full run starts from
// the full-coupling ground state.
struct RwaComparison {
  std::vector<double> t;
  std::vector<double> naive_rwa;
  std::vector<double> naive_full;
  std::vector<double> slow_full;  // moving average over one counter-rotating period pi/omega
  double residual_amplitude = 0.0;   // max |naive_full - slow_full| after the pulse
  double envelope_deviation = 0.0;   // max |slow_full - naive_rwa| after the pulse
  double rwa_swing = 0.0;            // max - min of naive_rwa after the pulse
  double ground_state_concurrence = 0.0;
};

RwaComparison rwa_comparison(const PulseSpec& p, const SystemSpec& spec, double gt_end, double sample_dt,
                             const IntegratorConfig& cfg);

}  // namespace cavityq
