#include "cavityq/quasistatic.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "cavityq/dynamics.hpp"
#include "cavityq/entanglement.hpp"
#include "cavityq/kernels.hpp"

namespace cavityq {

double rotation_angle(double r) {
  if (r < 0.0) throw Error(ErrorKind::InvalidArgument, "squeeze parameter must be >= 0");
  return std::acos(std::exp(-2.0 * r));
}

QuasistaticPoint excitation_numbers(double r, bool with_rotation) {
  QuasistaticPoint q;
  q.r = r;
  q.with_rotation = with_rotation;
  const double th = rotation_angle(r);
  q.omega_drive_over_g = 2.0 * std::sin(th);
  q.theta_r = with_rotation ? th : 0.0;
  q.n_gamma = std::sinh(r) * std::sinh(r);
  q.n_q = 2.0 * std::sin(q.theta_r / 2) * std::sin(q.theta_r / 2);
  q.n_total = q.n_gamma + q.n_q;
  return q;
}

namespace {

Matrix4c rotation_pair(double theta) {
  Matrix2c u = single_qubit_rotation(theta, {0.0, 1.0, 0.0});
  return kron_qubits(u, u);
}

void check_squeezed_leakage(double r, const SystemSpec& spec) {
  if (r == 0.0) return;
  // untruncated distribution at the top two levels
  const double t2 = std::tanh(r) * std::tanh(r);
  double lp = -std::log(std::cosh(r));
  double top = 0.0;
  for (int m = 0; 2 * m <= spec.n_max; ++m) {
    if (2 * m >= spec.n_max - 1) top += std::exp(lp);
    lp += std::log(t2 * (2.0 * m + 1.0) / (2.0 * m + 2.0));
  }
  if (top > kDefaultLeakageTol) {
    std::ostringstream os;
    os << "squeezed state r = " << r << " leaks " << top << " at n_max = " << spec.n_max;
    throw Error(ErrorKind::CutoffOverflow, os.str());
  }
}

PureState product_state(const CVector& fock, double theta, const SystemSpec& spec) {
  PureState s(spec);
  s.amplitudes.head(spec.fock_dim()) = fock;
  if (theta != 0.0) apply_qubit_op(s, rotation_pair(theta));
  return s;
}

}  // namespace

PureState ground_state(double r, const SystemSpec& spec, bool with_rotation) {
  spec.validate();
  check_squeezed_leakage(r, spec);
  return product_state(squeezed_vacuum_amplitudes(r, spec.n_max), with_rotation ? rotation_angle(r) : 0.0, spec);
}

double verify_ground_state(double r, const SystemSpec& spec, GroundStateRoute route) {
  spec.validate();
  const double th = rotation_angle(r);
  PureState s(spec);
  if (route == GroundStateRoute::Analytic) {
    s = product_state(squeezed_vacuum_amplitudes(r, spec.n_max), th, spec);
  } else {
    CVector vac = CVector::Zero(spec.fock_dim());
    vac[0] = 1.0;
    s = product_state(fock_squeeze(r, spec.n_max) * vac, th, spec);
  }
  kernels::HamiltonianTerms h;
  h.g = spec.g;
  h.drive = 0.5 * 2.0 * spec.g * std::sin(th);  // Omega (a + a+) / 2
  CVector out(spec.dim());
  kernels::apply_hamiltonian(h, spec.n_max, s.amplitudes.data(), out.data());
  return out.norm() / spec.g;
}

std::vector<double> quench_grid(const SystemSpec& spec, double gt_max, int points) {
  std::vector<double> t(points);
  for (int i = 0; i < points; ++i) t[i] = gt_max / spec.g * double(i) / double(points - 1);
  return t;
}

QuenchSeries quench_concurrence(double r, bool with_rotation, const std::vector<double>& t_grid, SystemSpec spec,
                                bool parallel) {
  if (spec.n_max <= 0) spec.n_max = squeezed_cutoff(r);
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw Error(ErrorKind::InvalidArgument, "time grid must be sorted");
  const PureState psi0 = ground_state(r, spec, with_rotation);
  const Eigen::VectorXd nop = excitation_diagonal(spec);
  const double exc0 = (nop.array() * psi0.amplitudes.array().abs2()).sum();

  QuenchSeries q;
  q.r = r;
  q.with_rotation = with_rotation;
  q.n_max = spec.n_max;
  q.t = t_grid;
  q.naive.assign(t_grid.size(), 0.0);
  std::vector<double> drift(t_grid.size(), 0.0);
  std::vector<std::exception_ptr> errors(t_grid.size());
  const long n = long(t_grid.size());
  auto one = [&](long i) {
    try {
      PureState s = psi0;
      kernels::propagate_blocks_serial(spec.g, t_grid[i], spec.n_max, s.amplitudes.data());
      if (s.leakage() > kDefaultLeakageTol) {
        std::ostringstream os;
        os << "quench leaks " << s.leakage() << " into the top Fock levels at t = " << t_grid[i];
        throw Error(ErrorKind::CutoffOverflow, os.str());
      }
      drift[i] = std::abs((nop.array() * s.amplitudes.array().abs2()).sum() - exc0);
      q.naive[i] = naive_concurrence(s);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) one(i);
  } else {
    for (long i = 0; i < n; ++i) one(i);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  long positive = 0;
  q.max_naive = -1e300;
  for (size_t i = 0; i < q.naive.size(); ++i) {
    if (q.naive[i] > q.max_naive) {
      q.max_naive = q.naive[i];
      q.t_at_max = q.t[i];
    }
    if (q.naive[i] > 0.0) ++positive;
    q.max_excitation_drift = std::max(q.max_excitation_drift, drift[i]);
  }
  q.fraction_positive = q.naive.empty() ? 0.0 : double(positive) / double(q.naive.size());
  return q;
}

std::vector<SpectralPeak> spectral_peaks(const std::vector<double>& series, double dt, double g, double f_max_over_g,
                                         double min_bins, bool parallel) {
  const double span = dt * double(series.size() - 1);
  const double bin = 2.0 * kPi / span;
  const double df = bin / 8.0;
  const double f_lo = min_bins * bin;
  const double f_hi = std::min(kPi / dt, f_max_over_g * g);
  std::vector<double> freqs;
  for (double f = f_lo; f <= f_hi; f += df) freqs.push_back(f);
  const std::vector<double> pw =
      parallel ? kernels::periodogram_omp(series, dt, freqs) : kernels::periodogram_serial(series, dt, freqs);
  std::vector<SpectralPeak> peaks;
  for (size_t i = 1; i + 1 < pw.size(); ++i)
    if (pw[i] > pw[i - 1] && pw[i] >= pw[i + 1]) peaks.push_back({freqs[i] / g, pw[i]});
  std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) { return a.relative_power > b.relative_power; });
  if (!peaks.empty()) {
    const double top = peaks.front().relative_power;
    for (auto& pk : peaks) pk.relative_power /= top;
  }
  return peaks;
}

}  // namespace cavityq
