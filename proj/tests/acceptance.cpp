// Acceptance suite: one line per criterion, tolerances and runtime budgets pinned.
#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "cavityq/dynamics.hpp"
#include "cavityq/entanglement.hpp"
#include "cavityq/magnus.hpp"
#include "cavityq/quasistatic.hpp"
#include "cavityq/selftest.hpp"

using namespace cavityq;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<Outcome()> run;
};

void require(Outcome& o, bool ok, const std::string& what) {
  if (!ok) o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += (ok ? "" : "FAILED ") + what;
}

PulseSpec fig_pulse(int m, double area) {
  PulseSpec p;
  p.omega_tau_d = kPi;
  p.area = area;
  p.envelope = {{m, 1.0}};
  return p;
}

PureState numeric_final(const PulseSpec& p, const SystemSpec& spec) {
  const double T = p.half_width(spec);
  return evolve_driven(basis_state(spec, 0, 0), p, spec, -T, T, IntegratorConfig{}, Coupling::Rwa).final_state();
}

Outcome sector_maxima() {
  Outcome o;
  const SystemSpec spec{1.0, 0.05, 8};
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n) worst = std::max(worst, std::abs(numeric_max_sector_concurrence(n, spec) - 1.0 / n));
  require(o, worst < 1e-6, fmt::format("max |max_t C_n - 1/n| = {:.2e} (< 1e-6), n = 1..6", worst));
  return o;
}

Outcome closed_form_populations_check() {
  Outcome o;
  const SystemSpec spec{1.0, 0.05, 8};
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n) {
    const double period = 2 * kPi / (std::sqrt(4.0 * n - 2.0) * spec.g);
    for (int k = 0; k < 200; ++k) {
      const double t = period * k / 199.0;
      const PureState s = evolve_free(basis_state(spec, 0, n), t);
      const Populations p = closed_form_populations(n, t, spec);
      worst = std::max({worst, std::abs(std::norm(s.at(0, n)) - p.p00),
                        std::abs(0.5 * std::norm(s.at(1, n - 1) + s.at(2, n - 1)) - p.ppsi),
                        std::abs((n >= 2 ? std::norm(s.at(3, n - 2)) : 0.0) - p.p11)});
    }
  }
  require(o, worst < 1e-9, fmt::format("max population error {:.2e} (< 1e-9), 200 points, n = 1..6", worst));
  return o;
}

Outcome quasistatic_table() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  // 1% relative tolerance on every quoted value
  auto near = [&](const char* what, double v, double ref) {
    require(o, std::abs(v - ref) <= 0.01 * ref, fmt::format("{} = {:.5g} (quoted {}, rel {:.1e})", what, v, ref,
                                                           std::abs(v / ref - 1)));
  };
  const QuasistaticPoint a = excitation_numbers(0.899, true);
  near("n_gamma(0.899)", a.n_gamma, 1.05);
  near("n_q(0.899)", a.n_q, 0.83);
  near("n(0.899)", a.n_total, 1.89);
  near("n_gamma(1.11)", excitation_numbers(1.11, false).n_gamma, 1.84);
  near("n(0.0492, rot)", excitation_numbers(0.0492, true).n_total, 0.0962);
  near("n(0.0492, no rot)", excitation_numbers(0.0492, false).n_total, 0.00243);
  near("n(3.15, rot)", excitation_numbers(3.15, true).n_total, 137.0);
  near("n(3.15, no rot)", excitation_numbers(3.15, false).n_total, 136.0);
  const double analytic_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  require(o, analytic_s < 1.0, fmt::format("analytic part {:.3f}s (< 1 s)", analytic_s));

  const auto t1 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double r : {0.3, 0.6, 0.899}) worst = std::max(worst, verify_ground_state(r, SystemSpec{1.0, 0.05, 80}));
  require(o, worst < 1e-6, fmt::format("ground-state residual {:.2e} at n_max 80, r <= 0.899 (< 1e-6)", worst));
  // second route: squeezed vacuum from the truncated matrix exponential
  std::vector<double> expm;
  for (int n = 20; n <= 100; n += 20)
    expm.push_back(verify_ground_state(0.899, SystemSpec{1.0, 0.05, n}, GroundStateRoute::MatrixExponential));
  bool monotone = true;
  for (size_t i = 1; i < expm.size(); ++i) monotone = monotone && expm[i] < expm[i - 1];
  require(o, monotone,
          fmt::format("exp-route residual at r 0.899 decreases over n_max 20..100: {:.1e} -> {:.1e} (n_max 80: {:.1e})",
                      expm.front(), expm.back(), expm[3]));
  const double numeric_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
  require(o, numeric_s < 30.0, fmt::format("residual check {:.2f}s (< 30 s)", numeric_s));
  return o;
}

Outcome fidelity_slopes() {
  Outcome o;
  const auto grid = geometric_grid(0.05, 0.6, 7);
  const cplx z0(0.0, -0.05);
  const auto t0 = std::chrono::steady_clock::now();
  const FidelitySweep mixed = fidelity_sweep(z0, {{0, std::sqrt(0.5)}, {1, std::sqrt(0.5)}}, grid);
  const double s1 = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto t1 = std::chrono::steady_clock::now();
  const FidelitySweep hg0 = fidelity_sweep(z0, {{0, 1.0}}, grid);
  const double s2 = std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
  require(o, std::abs(mixed.slope - 2.0) <= 0.3, fmt::format("mixed envelope slope {:.4f} (2 +- 0.3)", mixed.slope));
  require(o, std::abs(hg0.slope - 4.0) <= 0.3, fmt::format("HG0 slope {:.4f} (4 +- 0.3)", hg0.slope));
  require(o, s1 < 180.0 && s2 < 180.0, fmt::format("sweeps {:.2f}s, {:.2f}s (< 180 s each)", s1, s2));
  return o;
}

Outcome analytic_agreement() {
  Outcome o;
  const SystemSpec spec{1.0, 0.05, 40};
  const PulseSpec weak = fig_pulse(0, 0.0531);
  const double o1 = overlap(numeric_final(weak, spec), analytic_propagate(basis_state(spec, 0, 0), weak, spec, 1));
  require(o, o1 >= 0.99, fmt::format("order-1 overlap at area 0.0531: {:.9f} (>= 0.99)", o1));
  const PulseSpec strong = fig_pulse(1, 4.1);
  const PureState num = numeric_final(strong, spec);
  double ov[3];
  for (int k = 0; k < 3; ++k) ov[k] = overlap(num, analytic_propagate(basis_state(spec, 0, 0), strong, spec, k + 1));
  require(o, ov[0] < ov[1] && ov[1] < ov[2],
          fmt::format("area 4.1 overlaps {:.9f} < {:.9f} < {:.9f}", ov[0], ov[1], ov[2]));
  return o;
}

Outcome rotation_angle_check() {
  Outcome o;
  const SystemSpec spec{1.0, 0.05, 20};
  const PulseSpec p = fig_pulse(1, 4.1);
  const double theta = rotation_params(p, spec, FunctionalTable(p).final()).theta;
  // independent oracle: composite trapezoid for s11 over the window
  const int n = 20000;
  const double h = 2 * p.window / n;
  cplx s11 = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double u = -p.window + i * h;
    s11 += (i == 0 || i == n ? 0.5 : 1.0) * u * pulse_value(p, u) * std::exp(-I * p.omega_tau_d * u);
  }
  s11 *= h;
  const double oracle = 2 * p.area * g_tau_d(p, spec) * std::abs(s11);
  require(o, theta > kPi / 2, fmt::format("theta(T) = {:.5f} > pi/2", theta));
  require(o, std::abs(theta - oracle) <= 0.02 * oracle,
          fmt::format("oracle {:.5f}, relative difference {:.1e} (<= 2%)", oracle, std::abs(theta / oracle - 1)));
  require(o, std::abs(theta - 1.715) <= 0.02 * 1.715, "within 2% of 1.715");
  return o;
}

Outcome rwa_validity() {
  Outcome o;
  PulseSpec p;
  // tau_d = T_omega / 45 for the Gaussian exp(-t^2 / tau_d^2); HG0 with tau_d / sqrt 2
  p.omega_tau_d = 2 * kPi / 45 / std::sqrt(2.0);
  p.area = 0.225 * p.omega_tau_d;
  p.envelope = {{0, std::pow(kPi, 0.25)}};
  const SystemSpec spec{1.0, 0.005, 10}, half{1.0, 0.0025, 10};
  const RwaComparison a = rwa_comparison(p, spec, 3.0, 0.05, IntegratorConfig{});
  const RwaComparison b = rwa_comparison(p, half, 3.0, 0.05, IntegratorConfig{});
  require(o, a.residual_amplitude > 1e-7, fmt::format("fast residual amplitude {:.3e} (> 1e-7)", a.residual_amplitude));
  require(o, a.envelope_deviation < 0.1 * a.rwa_swing,
          fmt::format("slow envelope deviation {:.3e} vs RWA swing {:.3e} (< 10%)", a.envelope_deviation, a.rwa_swing));
  require(o, b.residual_amplitude < a.residual_amplitude,
          fmt::format("residual at g/2 {:.3e} (ratio {:.2f})", b.residual_amplitude,
                      a.residual_amplitude / b.residual_amplitude));
  require(o, a.ground_state_concurrence > 1e-6 && a.ground_state_concurrence < 1e-4,
          fmt::format("non-RWA ground-state concurrence {:.3e} (1e-6 .. 1e-4)", a.ground_state_concurrence));
  return o;
}

Outcome magnus_scaling() {
  Outcome o;
  PulseSpec p;
  p.omega_tau_d = 4 * kPi;
  p.area = 0.5;
  p.envelope = {{0, std::sqrt(0.5)}, {1, std::sqrt(0.5)}};
  const SystemSpec spec{1.0, 0.05 / (4 * kPi), 8};
  const ScalingReport rep = magnus_scaling_check(p, spec, 2);
  const double tol[] = {0.01, 0.05, 0.01, 0.10};
  for (size_t i = 0; i < rep.entries.size(); ++i) {
    const ScalingEntry& e = rep.entries[i];
    require(o, e.ratio_error() < tol[i] && std::isfinite(e.fitted_exponent),
            fmt::format("{} under {}: exponent {:.4f} (expect {:.0f}, tol {:.0f}%)", e.term, e.transform,
                        e.fitted_exponent, e.predicted_exponent, tol[i] * 100));
  }
  return o;
}

Outcome spectral_property() {
  Outcome o;
  const SystemSpec spec{1.0, 0.05, 0};
  const auto grid = quench_grid(spec);
  const double dt = grid[1] - grid[0];
  const auto norot = spectral_peaks(quench_concurrence(0.0492, false, grid, spec).naive, dt, spec.g);
  const auto rot = spectral_peaks(quench_concurrence(0.0492, true, grid, spec).naive, dt, spec.g);
  const double second_norot = norot.size() > 1 ? norot[1].relative_power : 0.0;
  require(o, !norot.empty() && second_norot < 0.1,
          fmt::format("no rotation: main {:.3f} g, second peak {:.4f} (< 0.1)", norot.empty() ? 0.0 : norot[0].frequency,
                      second_norot));
  require(o, rot.size() >= 2 && rot[1].relative_power >= 0.1,
          fmt::format("rotation: peaks {:.3f} g and {:.3f} g, relative power {:.3f} (>= 0.1)",
                      rot.empty() ? 0.0 : rot[0].frequency, rot.size() > 1 ? rot[1].frequency : 0.0,
                      rot.size() > 1 ? rot[1].relative_power : 0.0));
  return o;
}

Outcome invariant_suite() {
  Outcome o;
  for (const CheckResult& r : run_selftest(1))
    require(o, r.pass, fmt::format("{} {:.1e}", r.name, r.value));
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "sector concurrence maxima", 1.0, sector_maxima},
      {2, "closed-form vs block populations", 5.0, closed_form_populations_check},
      {3, "quasistatic excitation table", 31.0, quasistatic_table},
      {4, "fidelity convergence slopes", 360.0, fidelity_slopes},
      {5, "analytic propagator agreement", 120.0, analytic_agreement},
      {6, "rotation angle", 1.0, rotation_angle_check},
      {7, "RWA validity", 300.0, rwa_validity},
      {8, "Magnus term scaling", 60.0, magnus_scaling},
      {9, "low-squeezing spectrum", 10.0, spectral_property},
      {10, "invariant suite", 300.0, invariant_suite},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs < c.budget_seconds;
    const bool pass = o.pass && in_budget;
    failed += pass ? 0 : 1;
    fmt::print("[{}] {:>2}. {} ({:.2f}s, budget {:.0f}s{}): {}\n", pass ? "PASS" : "FAIL", c.id, c.title, secs,
               c.budget_seconds, in_budget ? "" : ", OVER BUDGET", o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
