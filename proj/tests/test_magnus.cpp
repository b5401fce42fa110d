#include <catch_amalgamated.hpp>

#include <cmath>

#include "cavityq/entanglement.hpp"
#include "cavityq/magnus.hpp"

using namespace cavityq;
using Catch::Matchers::WithinAbs;

namespace {

const double kPi14 = std::pow(kPi, 0.25);

PulseSpec pulse(int m, double area, double phi = 0.0) {
  PulseSpec p;
  p.omega_tau_d = kPi;
  p.area = area;
  p.phi = phi;
  p.envelope = {{m, 1.0}};
  return p;
}

PureState numeric_final(const PulseSpec& p, const SystemSpec& spec) {
  const double T = p.half_width(spec);
  return evolve_driven(basis_state(spec, 0, 0), p, spec, -T, T, IntegratorConfig{}, Coupling::Rwa).final_state();
}

double unitarity_defect(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("displacement amplitude", "[magnus]") {
  const PulseSpec p = pulse(0, 0.0531);
  const cplx z = displacement_amplitude(p, p.window);
  CHECK_THAT(z.real(), WithinAbs(0.0, 1e-12));
  CHECK_THAT(z.imag(), WithinAbs(-0.9414 * 0.0531, 1e-5));
  CHECK(displacement_amplitude(pulse(0, 0.0), 5.0) == cplx(0.0));
  CHECK(std::abs(displacement_amplitude(pulse(1, 2.0), 5.0)) < 1e-3 * 2.0);
}

TEST_CASE("rotation parameters", "[magnus]") {
  SystemSpec spec{1.0, 0.05, 20};
  const RotationParams a = rotation_params(pulse(1, 2.05), spec, 5.0);
  // asymptotic |s11| = pi^{1/4}
  CHECK_THAT(a.theta, WithinAbs(2 * 2.05 * 0.05 * kPi * kPi14, 1e-3));
  CHECK_THAT(a.theta, WithinAbs(0.857, 1e-3));
  const RotationParams b = rotation_params(pulse(1, 4.1), spec, 5.0);
  CHECK(b.theta > kPi / 2);
  CHECK_THAT(b.theta, WithinAbs(1.715, 0.02 * 1.715));
  CHECK(std::abs(std::hypot(b.axis[0], b.axis[1]) - 1.0) < 1e-14);
  CHECK(b.axis[2] == 0.0);
  // even envelope: only the window tail survives
  CHECK(rotation_params(pulse(0, 4.1), spec, 5.0).theta < 1e-5);
  const RotationParams none = rotation_params(pulse(1, 4.1), spec, -5.0);
  CHECK_FALSE(none.axis_defined);
  CHECK(none.theta == 0.0);
}

TEST_CASE("higher-order terms", "[magnus]") {
  SystemSpec spec{1.0, 0.05, 20};
  const HigherOrderTerms zero = higher_order_terms(pulse(1, 4.1), spec, -5.0);
  CHECK(zero.conditional_displacement == cplx(0.0));
  CHECK(zero.z_rotation_angle == 0.0);
  const HigherOrderTerms h1 = higher_order_terms(pulse(1, 2.05), spec, 5.0);
  const HigherOrderTerms h2 = higher_order_terms(pulse(1, 4.1), spec, 5.0);
  CHECK(std::abs(h2.conditional_displacement - 2.0 * h1.conditional_displacement) < 1e-12);
  CHECK_THAT(h2.z_rotation_angle, WithinAbs(4.0 * h1.z_rotation_angle, 1e-12));
}

TEST_CASE("analytic propagator against numerics", "[magnus]") {
  SystemSpec spec{1.0, 0.05, 40};
  const PulseSpec weak = pulse(0, 0.0531);
  CHECK(overlap(numeric_final(weak, spec), analytic_propagate(basis_state(spec, 0, 0), weak, spec, 1)) >= 0.99);

  const PulseSpec p4a = pulse(1, 2.05);
  const PureState num = numeric_final(p4a, spec);
  const double o1 = overlap(num, analytic_propagate(basis_state(spec, 0, 0), p4a, spec, 1));
  const double o2 = overlap(num, analytic_propagate(basis_state(spec, 0, 0), p4a, spec, 2));
  CHECK(o2 >= o1);
  CHECK(o2 > 0.999);

  const PulseSpec p4b = pulse(1, 4.1);
  const PureState num_b = numeric_final(p4b, spec);
  const double d2 = 1.0 - overlap(num_b, analytic_propagate(basis_state(spec, 0, 0), p4b, spec, 2));
  const double d3 = 1.0 - overlap(num_b, analytic_propagate(basis_state(spec, 0, 0), p4b, spec, 3));
  CHECK(d3 < d2);

  // zero area leaves only the free evolution across the window
  const PureState s = basis_state(spec, 1, 2);
  const PulseSpec idle = pulse(1, 0.0);
  const PureState free = evolve_free(s, 2.0 * idle.half_width(spec));
  for (int order = 1; order <= 3; ++order)
    CHECK(overlap(free, analytic_propagate(s, idle, spec, order)) > 1.0 - 1e-12);
}

TEST_CASE("order hierarchy", "[magnus][property]") {
  // same-state comparisons; 1e-9 is the integrator floor at rel_tol 1e-10
  SystemSpec spec{1.0, 0.05, 40};
  for (const PulseSpec& p : {pulse(0, 0.0531), pulse(0, 1.29), pulse(1, 2.05), pulse(1, 4.1)}) {
    const PureState num = numeric_final(p, spec);
    double prev = 0.0;
    for (int order = 1; order <= 3; ++order) {
      const double o = overlap(num, analytic_propagate(basis_state(spec, 0, 0), p, spec, order));
      CHECK(o >= prev - 1e-9);
      prev = o;
    }
  }
}

TEST_CASE("materialized factors are unitary", "[magnus][property]") {
  SystemSpec spec{1.0, 0.05, 30};
  const PulseSpec p = pulse(1, 4.1, 0.3);
  const AnalyticPropagator prop = analytic_propagator(p, spec, FunctionalTable(p).final(), 3);
  CHECK(prop.factors.size() == 5);
  for (const auto& f : prop.factors) CHECK(unitarity_defect(materialize_factor(f, spec)) < 1e-10);
  // apply() and the dense product agree
  PureState s = basis_state(spec, 0, 1);
  const CVector dense = prop.materialize(spec) * s.amplitudes;
  prop.apply(s);
  CHECK((dense - s.amplitudes).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("global phase never changes observables", "[magnus][property]") {
  SystemSpec spec{1.0, 0.05, 30};
  const PulseSpec p = pulse(1, 4.1);
  const AnalyticPropagator full = analytic_propagator(p, spec, FunctionalTable(p).final(), 3);
  AnalyticPropagator stripped;
  for (const auto& f : full.factors)
    if (!std::holds_alternative<GlobalPhase>(f)) stripped.factors.push_back(f);
  REQUIRE(stripped.factors.size() + 1 == full.factors.size());
  PureState a = psi_plus(spec, 1), b = psi_plus(spec, 1);
  full.apply(a);
  stripped.apply(b);
  CHECK_THAT(concurrence(partial_trace_cavity(a)).concurrence,
             WithinAbs(concurrence(partial_trace_cavity(b)).concurrence, 1e-7));
  CHECK((partial_trace_cavity(a) - partial_trace_cavity(b)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("displacement targeting", "[magnus]") {
  const TargetPulse t = solve_displacement_target(cplx(0.0, -0.05), {{0, 1.0}});
  CHECK_THAT(t.area, WithinAbs(0.1 / (std::sqrt(2.0) * kPi14), 1e-12));
  CHECK_THAT(t.area, WithinAbs(0.05311, 1e-5));
  CHECK_THAT(t.phi, WithinAbs(0.0, 1e-12));
  CHECK(solve_displacement_target(0.0, {{0, 1.0}}).area == 0.0);
  try {
    solve_displacement_target(cplx(0.0, -0.05), {{1, 1.0}});
    FAIL("expected EnvelopeUnsuitable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EnvelopeUnsuitable);
  }
}

TEST_CASE("targeting round trip", "[magnus][property]") {
  for (const cplx z0 : {cplx(0.0, -0.05), cplx(0.3, 0.2), cplx(-0.1, 0.0)}) {
    for (double otd : {kPi, 2 * kPi}) {
      const Envelope env{{0, 0.7071067811865476}, {1, 0.7071067811865476}};
      const TargetPulse t = solve_displacement_target(z0, env);
      PulseSpec p;
      p.omega_tau_d = otd;
      p.area = t.area;
      p.phi = t.phi;
      p.envelope = env;
      const double bound = std::abs(0.5 * envelope_fourier(p, 2 * otd)) * t.area + 1e-6;
      CHECK(std::abs(displacement_amplitude(p, p.window) - z0) <= bound);
    }
  }
}

TEST_CASE("displacement fidelity", "[magnus]") {
  // at g / omega = 0.01 the point gtd = 0.01 sits at omega tau_d = 1, where the counter-rotating
  // part of the transform spoils the targeting
  const FidelityPoint coarse = displacement_fidelity(cplx(0.0, -0.05), {{0, 1.0}}, 0.01);
  CHECK_THAT(coarse.omega_tau_d, WithinAbs(1.0, 1e-12));
  CHECK(coarse.fidelity < 0.99999);
  FidelityOptions fine;
  fine.g_over_omega = 0.001;
  const FidelityPoint f = displacement_fidelity(cplx(0.0, -0.05), {{0, 1.0}}, 0.01, fine);
  CHECK(f.fidelity >= 0.999999);
  CHECK_THAT(f.one_minus_f, WithinAbs(1.0 - f.fidelity, 1e-15));

  const auto grid = geometric_grid(0.05, 0.6, 7);
  REQUIRE(grid.size() == 7);
  CHECK_THAT(grid.front(), WithinAbs(0.05, 1e-15));
  CHECK_THAT(grid.back(), WithinAbs(0.6, 1e-14));
  const FidelitySweep hg0 = fidelity_sweep(cplx(0.0, -0.05), {{0, 1.0}}, grid);
  const FidelitySweep mixed =
      fidelity_sweep(cplx(0.0, -0.05), {{0, 0.7071067811865476}, {1, 0.7071067811865476}}, grid);
  CHECK_THAT(hg0.slope, WithinAbs(4.0, 0.3));
  CHECK_THAT(mixed.slope, WithinAbs(2.0, 0.3));
}

TEST_CASE("log-log fit", "[magnus]") {
  const std::vector<double> x{1.0, 2.0, 4.0, 8.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 2.5));
  const auto [slope, intercept] = loglog_fit(x, y);
  CHECK_THAT(slope, WithinAbs(2.5, 1e-12));
  CHECK_THAT(intercept, WithinAbs(std::log(3.0), 1e-12));
}

TEST_CASE("Magnus term scaling", "[magnus]") {
  PulseSpec p;
  p.omega_tau_d = 4 * kPi;
  p.area = 0.5;
  p.envelope = {{0, 0.7071067811865476}, {1, 0.7071067811865476}};
  SystemSpec spec{1.0, 0.05 / (4 * kPi), 8};
  const ScalingReport rep = magnus_scaling_check(p, spec, 2);
  REQUIRE(rep.entries.size() == 4);
  CHECK(rep.entries[0].ratio_error() < 0.01);
  CHECK(rep.entries[1].ratio_error() < 0.05);
  CHECK(rep.entries[2].ratio_error() < 0.01);
  CHECK(rep.entries[3].ratio_error() < 0.10);
  for (const auto& e : rep.entries) CHECK(std::isfinite(e.fitted_exponent));
}
