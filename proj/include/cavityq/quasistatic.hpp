#pragma once

#include <vector>

#include "cavityq/hilbert.hpp"

namespace cavityq {

struct QuasistaticPoint {
  double r = 0.0;
  bool with_rotation = true;
  double theta_r = 0.0;           // applied rotation (0 without rotation)
  double omega_drive_over_g = 0.0;  // Omega / g implied by the squeezing, 2 sin(theta)
  double n_gamma = 0.0;
  double n_q = 0.0;
  double n_total = 0.0;
};

// theta_r with cos(theta_r) = exp(-2 r)
double rotation_angle(double r);
QuasistaticPoint excitation_numbers(double r, bool with_rotation);

// R[theta_r; e_y]|00> x |r> (or |00> x |r>) from analytic squeezed amplitudes.
PureState ground_state(double r, const SystemSpec& spec, bool with_rotation);

enum class GroundStateRoute { Analytic, MatrixExponential };
// ||H^RWA |E0; r>|| / g with Omega = 2 g sin(theta_r).
double verify_ground_state(double r, const SystemSpec& spec, GroundStateRoute route = GroundStateRoute::Analytic);

struct QuenchSeries {
  double r = 0.0;
  bool with_rotation = true;
  int n_max = 0;
  std::vector<double> t;
  std::vector<double> naive;
  double max_naive = 0.0;
  double t_at_max = 0.0;
  double fraction_positive = 0.0;
  double max_excitation_drift = 0.0;
};

// t in [0, gt_max / g], `points` samples.
std::vector<double> quench_grid(const SystemSpec& spec, double gt_max = 20.0, int points = 2000);

// Block evolution under H_g from the ground state; time points are evaluated concurrently
// unless parallel is false. spec.n_max <= 0 selects the squeezed cutoff for r.
QuenchSeries quench_concurrence(double r, bool with_rotation, const std::vector<double>& t_grid, SystemSpec spec,
                                bool parallel = true);

struct SpectralPeak {
  double frequency = 0.0;  // angular, units of g
  double relative_power = 0.0;
};

// Periodogram peaks of a uniformly sampled series, strongest first. Frequencies below
// min_bins resolution bins are ignored.
std::vector<SpectralPeak> spectral_peaks(const std::vector<double>& series, double dt, double g, double f_max_over_g = 40.0,
                                         double min_bins = 2.0, bool parallel = true);

}  // namespace cavityq
