#include "cavityq/selftest.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cavityq/dynamics.hpp"
#include "cavityq/entanglement.hpp"
#include "cavityq/kernels.hpp"
#include "cavityq/magnus.hpp"

namespace cavityq {

namespace {

using Rng = std::mt19937_64;

PureState random_state(const SystemSpec& spec, Rng& rng) {
  std::normal_distribution<double> nd;
  PureState s(spec);
  for (Eigen::Index i = 0; i < s.amplitudes.size(); ++i) s.amplitudes[i] = cplx(nd(rng), nd(rng));
  // keep the top of the ladder empty so cutoff checks stay quiet
  for (int q = 0; q < 4; ++q) s.at(q, spec.n_max) = s.at(q, spec.n_max - 1) = 0.0;
  s.amplitudes.normalize();
  return s;
}

Matrix2c random_su2(Rng& rng) {
  std::normal_distribution<double> nd;
  std::array<double, 3> axis{nd(rng), nd(rng), nd(rng)};
  const double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  for (double& a : axis) a /= len;
  std::uniform_real_distribution<double> ud(0.0, 2.0 * kPi);
  return single_qubit_rotation(ud(rng), axis) * std::exp(I * ud(rng));
}

double unitarity_defect(const CMatrix& u) {
  return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

CheckResult check_unitarity(Rng& rng) {
  CheckResult r{"unitarity", false, 0.0, 1e-10, "", 0.0};
  std::normal_distribution<double> nd;
  double worst = 0.0;
  SystemSpec spec{1.0, 0.05, 40};
  for (int k = 0; k < 5; ++k) {
    const cplx z(0.5 * nd(rng), 0.5 * nd(rng));
    worst = std::max(worst, unitarity_defect(displacement_op(z, spec).m));
  }
  worst = std::max(worst, unitarity_defect(squeeze_op(0.3, SystemSpec{1.0, 0.05, 80}).m));
  for (int k = 0; k < 5; ++k) {
    const Matrix2c u = random_su2(rng);
    worst = std::max(worst, unitarity_defect(CMatrix(u)));
  }
  // materialized analytic-propagator factors at a strong HG1 pulse
  PulseSpec p;
  p.omega_tau_d = kPi;
  p.area = 4.1;
  p.envelope = {{1, 1.0}};
  SystemSpec s30{1.0, 0.05, 30};
  const AnalyticPropagator prop = analytic_propagator(p, s30, FunctionalTable(p).final(), 3);
  for (const auto& f : prop.factors) worst = std::max(worst, unitarity_defect(materialize_factor(f, s30)));
  r.value = worst;
  r.pass = worst < r.threshold;
  r.detail = "displacement, squeeze, SU(2), analytic factors";
  return r;
}

CheckResult check_trace_positivity(Rng& rng) {
  CheckResult r{"trace_positivity", false, 0.0, 1e-10, "", 0.0};
  SystemSpec spec{1.0, 0.05, 10};
  double worst_trace = 0.0, worst_herm = 0.0, worst_neg = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Matrix4c rho = partial_trace_cavity(random_state(spec, rng));
    worst_trace = std::max(worst_trace, std::abs(rho.trace() - 1.0));
    worst_herm = std::max(worst_herm, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(rho);
    worst_neg = std::max(worst_neg, -es.eigenvalues().minCoeff());
  }
  r.value = std::max({worst_trace, worst_herm, worst_neg});
  r.pass = worst_trace < 1e-10 && worst_herm < 1e-12 && worst_neg < 1e-10;
  std::ostringstream os;
  os << "trace " << worst_trace << ", hermiticity " << worst_herm << ", negativity " << worst_neg;
  r.detail = os.str();
  return r;
}

CheckResult check_local_unitary(Rng& rng) {
  CheckResult r{"local_unitary_invariance", false, 0.0, 1e-9, "", 0.0};
  SystemSpec spec{1.0, 0.05, 6};
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    PureState s = random_state(spec, rng);
    // mostly-pure states keep the concurrence away from zero
    if (k % 2 == 0)
      for (int n = 1; n <= spec.n_max; ++n)
        for (int q = 0; q < 4; ++q) s.at(q, n) *= 0.1;
    s.amplitudes.normalize();
    const Matrix4c rho = partial_trace_cavity(s);
    const Matrix4c u = kron_qubits(random_su2(rng), random_su2(rng));
    const Matrix4c rho2 = u * rho * u.adjoint();
    worst = std::max(worst, std::abs(concurrence(rho).concurrence - concurrence(rho2).concurrence));
  }
  r.value = worst;
  r.pass = worst < r.threshold;
  r.detail = "50 random reduced states, random U_A x U_B";
  return r;
}

CheckResult check_block_dense(Rng& rng) {
  CheckResult r{"block_dense_equivalence", false, 0.0, 1e-10, "", 0.0};
  SystemSpec spec{1.0, 0.05, 12};
  const CMatrix h = dense_hamiltonian(spec, nullptr, 0.0, Coupling::Rwa);
  std::uniform_real_distribution<double> ud(0.0, 200.0);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double t = ud(rng);
    PureState s = random_state(spec, rng);
    const CVector dense = expm_hermitian(h * t) * s.amplitudes;
    kernels::propagate_blocks(spec.g, t, spec.n_max, s.amplitudes.data());
    worst = std::max(worst, (dense - s.amplitudes).cwiseAbs().maxCoeff());
  }
  r.value = worst;
  r.pass = worst < r.threshold;
  r.detail = "exp(-i H_g t) by blocks vs dense eigendecomposition, n_max 12";
  return r;
}

CheckResult check_integrator_convergence() {
  CheckResult r{"integrator_convergence", false, 0.0, 2.0, "", 0.0};
  SystemSpec spec{1.0, 0.05, 16};
  PulseSpec p;
  p.omega_tau_d = kPi;
  p.area = 1.29;
  const double T = p.half_width(spec);
  const PureState psi0 = basis_state(spec, 0, 0);
  IntegratorConfig ref;
  ref.rel_tol = 1e-13;
  ref.abs_tol = 1e-15;
  const PureState exact = evolve_driven(psi0, p, spec, -T, T, ref, Coupling::Rwa).final_state();
  auto defect = [&](double tol) {
    IntegratorConfig c;
    c.rel_tol = tol;
    c.abs_tol = tol * 1e-2;
    c.max_step_fraction = 1.0;
    c.norm_tol = 1e-2;
    return 1.0 - overlap(exact, evolve_driven(psi0, p, spec, -T, T, c, Coupling::Rwa).final_state());
  };
  const double d1 = defect(1e-5), d2 = defect(5e-6);
  r.value = d1 / d2;
  r.pass = r.value >= r.threshold;
  std::ostringstream os;
  os << "defect " << d1 << " at tol 1e-5, " << d2 << " at tol 5e-6";
  r.detail = os.str();
  return r;
}

CheckResult check_commutator() {
  CheckResult r{"commutator_identity", false, 0.0, 1e-12, "", 0.0};
  const int n_max = 30;
  const CMatrix a = fock_annihilation(n_max);
  const CMatrix c = a * a.adjoint() - a.adjoint() * a;
  double worst = 0.0;
  for (int n = 0; n < n_max; ++n)
    for (int m = 0; m < n_max; ++m) worst = std::max(worst, std::abs(c(n, m) - (n == m ? 1.0 : 0.0)));
  r.value = worst;
  r.pass = worst < r.threshold;
  r.detail = "[a, a+] = 1 below the cutoff";
  return r;
}

CheckResult check_tensor_consistency(Rng& rng) {
  CheckResult r{"tensor_consistency", false, 0.0, 1e-12, "", 0.0};
  SystemSpec spec{1.0, 0.05, 8};
  const Matrix4c q = kron_qubits(random_su2(rng), random_su2(rng));
  std::normal_distribution<double> nd;
  const CMatrix f = fock_displacement(cplx(0.3 * nd(rng), 0.3 * nd(rng)), spec.n_max);
  PureState s = random_state(spec, rng);
  const CVector dense = kron_qubit_fock(q, f).m * s.amplitudes;
  apply_fock_op(s, f);
  apply_qubit_op(s, q);
  r.value = (dense - s.amplitudes).cwiseAbs().maxCoeff();
  r.pass = r.value < r.threshold;
  r.detail = "Kronecker product vs factor-wise application";
  return r;
}

CheckResult check_pauli() {
  CheckResult r{"pauli_expectations", false, 0.0, 1e-12, "", 0.0};
  SystemSpec spec{1.0, 0.05, 4};
  // <sigma_z> per qubit on |10;0>: qubit A up, qubit B down
  const PureState s = basis_state(spec, 2, 0);
  const Matrix4c rho = partial_trace_cavity(s);
  const Matrix2c z = single_qubit(SigmaKind::Z);
  const Matrix2c id = Matrix2c::Identity();
  const double za = (rho * kron_qubits(z, id)).trace().real();
  const double zb = (rho * kron_qubits(id, z)).trace().real();
  r.value = std::max(std::abs(za - 1.0), std::abs(zb + 1.0));
  r.pass = r.value < r.threshold;
  r.detail = "sigma_z on |10;0>";
  return r;
}

CheckResult check_excitation(Rng& rng) {
  CheckResult r{"excitation_conservation", false, 0.0, 1e-10, "", 0.0};
  SystemSpec spec{1.0, 0.05, 12};
  const Eigen::VectorXd nexc = excitation_diagonal(spec);
  PureState s = random_state(spec, rng);
  auto mean = [&](const PureState& x) { return (x.amplitudes.cwiseAbs2().array() * nexc.array()).sum(); };
  const double n0 = mean(s);
  kernels::propagate_blocks(spec.g, 123.4, spec.n_max, s.amplitudes.data());
  r.value = std::abs(mean(s) - n0);
  r.pass = r.value < r.threshold;
  r.detail = "mean excitation under undriven RWA evolution";
  return r;
}

CheckResult check_closed_form() {
  CheckResult r{"closed_form_populations", false, 0.0, 1e-9, "", 0.0};
  SystemSpec spec{1.0, 0.05, 10};
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n) {
    for (int k = 0; k < 50; ++k) {
      const double t = 0.5 * k;
      PureState s = basis_state(spec, 0, n);
      kernels::propagate_blocks(spec.g, t, spec.n_max, s.amplitudes.data());
      const Populations cf = closed_form_populations(n, t, spec);
      const double p00 = std::norm(s.at(0, n));
      const double p11 = n >= 2 ? std::norm(s.at(3, n - 2)) : 0.0;
      const double ppl = 0.5 * std::norm(s.at(1, n - 1) + s.at(2, n - 1));
      worst = std::max({worst, std::abs(p00 - cf.p00), std::abs(p11 - cf.p11), std::abs(ppl - cf.ppsi)});
    }
  }
  r.value = worst;
  r.pass = worst < r.threshold;
  r.detail = "|00;n> populations, n = 1..6";
  return r;
}

}  // namespace

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::function<CheckResult()>> checks = {
      [&] { return check_unitarity(rng); },
      [&] { return check_trace_positivity(rng); },
      [&] { return check_local_unitary(rng); },
      [&] { return check_block_dense(rng); },
      [&] { return check_integrator_convergence(); },
      [&] { return check_commutator(); },
      [&] { return check_tensor_consistency(rng); },
      [&] { return check_pauli(); },
      [&] { return check_excitation(rng); },
      [&] { return check_closed_form(); },
  };
  std::vector<CheckResult> out;
  for (auto& c : checks) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = c();
    } catch (const std::exception& e) {
      r.name = "check_" + std::to_string(out.size() + 1);
      r.pass = false;
      r.detail = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(r);
  }
  return out;
}

}  // namespace cavityq
