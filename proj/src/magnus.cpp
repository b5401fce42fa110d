#include "cavityq/magnus.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include "cavityq/kernels.hpp"

namespace cavityq {

namespace {

constexpr double kSigmaZ[4] = {-2.0, 0.0, 0.0, 2.0};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void apply_factor(const PropagatorFactor& f, PureState& s) {
  const int nf = s.spec.fock_dim();
  Eigen::Map<CMatrix> m(s.amplitudes.data(), nf, 4);
  std::visit(Overloaded{
                 [&](const Displacement& d) {
                   if (d.z != 0.0) apply_fock_op(s, fock_displacement(d.z, s.spec.n_max));
                 },
                 [&](const Rotation& r) {
                   if (r.theta == 0.0) return;
                   Matrix2c u = single_qubit_rotation(r.theta, r.axis);
                   apply_qubit_op(s, kron_qubits(u, u));
                 },
                 [&](const ConditionalDisplacement& c) {
                   if (c.beta == 0.0) return;
                   for (int q = 0; q < 4; ++q) {
                     if (kSigmaZ[q] == 0.0) continue;
                     CVector col = fock_displacement(kSigmaZ[q] * c.beta, s.spec.n_max) * m.col(q);
                     m.col(q) = col;
                   }
                 },
                 [&](const CollectiveZRotation& z) {
                   for (int q = 0; q < 4; ++q) m.col(q) *= std::exp(-I * z.angle * kSigmaZ[q]);
                 },
                 [&](const GlobalPhase& g) { s.amplitudes *= std::exp(I * g.phase); },
             },
             f);
}

}  // namespace

CMatrix materialize_factor(const PropagatorFactor& f, const SystemSpec& spec) {
  CMatrix out = CMatrix::Identity(spec.dim(), spec.dim());
  for (int j = 0; j < spec.dim(); ++j) {
    PureState s(spec);
    s.amplitudes[j] = 1.0;
    apply_factor(f, s);
    out.col(j) = s.amplitudes;
  }
  return out;
}

void AnalyticPropagator::apply(PureState& s) const {
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) apply_factor(*it, s);
}

CMatrix AnalyticPropagator::materialize(const SystemSpec& spec) const {
  CMatrix out = CMatrix::Identity(spec.dim(), spec.dim());
  for (const auto& f : factors) out = out * materialize_factor(f, spec);
  return out;
}

cplx displacement_amplitude(const PulseSpec& p, const FunctionalSet& fs) { return -I * p.area * std::conj(fs.s1); }

cplx displacement_amplitude(const PulseSpec& p, double u) { return -I * p.area * std::conj(functional_s1(p, u)); }

RotationParams rotation_params(const PulseSpec& p, const SystemSpec& spec, const FunctionalSet& fs) {
  RotationParams r;
  const double mag = std::abs(fs.s11);
  if (mag < 1e-14) {
    r.axis_defined = false;
    return r;
  }
  const double ph = std::arg(fs.s11);
  r.theta = 2.0 * p.area * g_tau_d(p, spec) * mag;
  r.axis = {std::sin(ph), -std::cos(ph), 0.0};
  return r;
}

RotationParams rotation_params(const PulseSpec& p, const SystemSpec& spec, double u) {
  FunctionalSet fs;
  fs.s11 = functional_s11(p, u);
  return rotation_params(p, spec, fs);
}

HigherOrderTerms higher_order_terms(const PulseSpec& p, const SystemSpec& spec, const FunctionalSet& fs) {
  const double gt = g_tau_d(p, spec);
  HigherOrderTerms h;
  h.conditional_displacement = -I * p.area * gt * gt * std::conj(fs.s12);
  h.z_rotation_angle = 2.0 * p.area * p.area * gt * gt * (fs.s221.real() - 0.5 * fs.s222.real());
  return h;
}

HigherOrderTerms higher_order_terms(const PulseSpec& p, const SystemSpec& spec, double u) {
  return higher_order_terms(p, spec, FunctionalTable(p).at(u));
}

double scalar_phase(const PulseSpec& p, const FunctionalSet& fs) { return -p.area * p.area * fs.sphase.real(); }

AnalyticPropagator analytic_propagator(const PulseSpec& p, const SystemSpec& spec, const FunctionalSet& fs, int order) {
  if (order < 1 || order > 3) throw Error(ErrorKind::InvalidArgument, "analytic propagator order must be 1, 2 or 3");
  AnalyticPropagator u;
  const Displacement d{displacement_amplitude(p, fs)};
  if (order == 1) {
    u.factors = {d};
    return u;
  }
  const RotationParams rp = rotation_params(p, spec, fs);
  const Rotation r{rp.theta, rp.axis};
  const GlobalPhase gp{scalar_phase(p, fs)};
  if (order == 2) {
    u.factors = {gp, d, r};
    return u;
  }
  const HigherOrderTerms h = higher_order_terms(p, spec, fs);
  u.factors = {gp, d, CollectiveZRotation{h.z_rotation_angle}, ConditionalDisplacement{h.conditional_displacement}, r};
  return u;
}

PureState analytic_state_at(const PureState& psi_start, const PulseSpec& p, const SystemSpec& spec, int order, double t,
                            const FunctionalTable& table, double leak_tol) {
  const double T = p.half_width(spec);
  PureState s = evolve_free(psi_start, T);
  const double u = std::min(t, T) / p.tau_d(spec);
  analytic_propagator(p, spec, table.at(u), order).apply(s);
  s = evolve_free(s, t);
  if (s.leakage() > leak_tol) {
    std::ostringstream os;
    os << "analytic state leaks " << s.leakage() << " into the top Fock levels (n_max = " << spec.n_max << ")";
    throw Error(ErrorKind::CutoffOverflow, os.str());
  }
  return s;
}

PureState analytic_propagate(const PureState& psi_start, const PulseSpec& p, const SystemSpec& spec, int order) {
  FunctionalTable table(p);
  return analytic_state_at(psi_start, p, spec, order, p.half_width(spec), table);
}

double overlap(const PureState& a, const PureState& b) { return std::norm(a.amplitudes.dot(b.amplitudes)); }

TargetPulse solve_displacement_target(cplx z0, const Envelope& envelope) {
  PulseSpec p;
  p.envelope = envelope;
  const double f0 = envelope_fourier(p, 0.0).real();
  if (!(f0 > 1e-9)) {
    std::ostringstream os;
    os << "envelope transform at zero frequency is " << f0 << "; cannot target a displacement";
    throw Error(ErrorKind::EnvelopeUnsuitable, os.str());
  }
  return {2.0 * std::abs(z0) / f0, -std::arg(z0) - kPi / 2};
}

FidelityPoint displacement_fidelity(cplx z0, const Envelope& envelope, double gtd, const FidelityOptions& opt) {
  if (!(gtd > 0.0)) throw Error(ErrorKind::InvalidArgument, "g_tau_d must be positive");
  const TargetPulse tp = solve_displacement_target(z0, envelope);
  PulseSpec p;
  p.envelope = envelope;
  p.window = opt.window;
  p.omega_tau_d = gtd / opt.g_over_omega;
  p.area = tp.area;
  p.phi = tp.phi;
  SystemSpec spec{1.0, opt.g_over_omega, opt.n_max > 0 ? opt.n_max : std::max(coherent_cutoff(z0), 8)};
  const double T = p.half_width(spec);
  Trajectory tr = evolve_driven(basis_state(spec, 0, 0), p, spec, -T, T, opt.integrator, Coupling::Rwa);
  PureState psi = evolve_free(tr.final_state(), -T);
  PureState target = coherent_state(z0, spec);
  target.amplitudes.normalize();
  const double nn = psi.amplitudes.squaredNorm();
  const double ov = std::norm(target.amplitudes.dot(psi.amplitudes));
  FidelityPoint fp;
  fp.g_tau_d = gtd;
  fp.omega_tau_d = p.omega_tau_d;
  fp.area = p.area;
  fp.phi = p.phi;
  fp.one_minus_f = (nn - ov) / nn;
  fp.fidelity = ov / nn;
  return fp;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo * std::pow(hi / lo, double(i) / (n - 1));
  return out;
}

std::pair<double, double> loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

FidelitySweep fidelity_sweep(cplx z0, const Envelope& envelope, const std::vector<double>& g_tau_d,
                             const FidelityOptions& opt) {
  FidelitySweep sw;
  sw.points.resize(g_tau_d.size());
  std::vector<std::exception_ptr> errors(g_tau_d.size());
  const long n = long(g_tau_d.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      sw.points[i] = displacement_fidelity(z0, envelope, g_tau_d[i], opt);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<double> x, y;
  for (const auto& pnt : sw.points) {
    x.push_back(pnt.g_tau_d);
    y.push_back(std::max(pnt.one_minus_f, 1e-300));
  }
  std::tie(sw.slope, sw.intercept) = loglog_fit(x, y);
  return sw;
}

MagnusTerms numeric_magnus_terms(const PulseSpec& p, const SystemSpec& spec) {
  p.validate();
  const int d = spec.dim();
  const CMatrix Hg = dense_hamiltonian(spec, nullptr, 0.0, Coupling::Rwa);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (Hg + Hg.adjoint()));
  if (es.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "H_g diagonalization failed");
  const CMatrix V = es.eigenvectors();
  const Eigen::VectorXd E = es.eigenvalues();
  const CMatrix aV = V.adjoint() * annihilation(spec).m * V;
  const CMatrix aVd = aV.adjoint();
  const double tau = p.tau_d(spec);
  const double k = p.omega_tau_d;
  FunctionalTable table(p);

  // Chebyshev-Lobatto cumulative integration on [-1, 1].
  const int nodes = 16;
  std::vector<double> xr(nodes);
  for (int i = 0; i < nodes; ++i) xr[i] = -std::cos(kPi * i / (nodes - 1));
  Eigen::MatrixXd Vc(nodes, nodes), Wc(nodes, nodes);
  auto cheb = [](int j, double x) { return std::cos(j * std::acos(std::clamp(x, -1.0, 1.0))); };
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      Vc(i, j) = cheb(j, xr[i]);
      if (j == 0)
        Wc(i, j) = xr[i] + 1.0;
      else if (j == 1)
        Wc(i, j) = 0.5 * (xr[i] * xr[i] - 1.0);
      else {
        auto prim = [&](double y) { return 0.5 * (cheb(j + 1, y) / (j + 1) - cheb(j - 1, y) / (j - 1)); };
        Wc(i, j) = prim(xr[i]) - prim(-1.0);
      }
    }
  const Eigen::MatrixXd S = Wc * Vc.inverse();

  const double width = std::min(0.25, 2.0 * kPi / (k + 4.0 * spec.g * tau * std::sqrt(double(spec.n_max + 2))));
  const int panels = std::max(1, int(std::ceil(2.0 * p.window / width)));
  const double h = 2.0 * p.window / panels;

  MagnusTerms out;
  CMatrix A1 = CMatrix::Zero(d, d), A2 = CMatrix::Zero(d, d), B1 = CMatrix::Zero(d, d), B2 = CMatrix::Zero(d, d);
  std::vector<CMatrix> hi(nodes), hii(nodes), a1n(nodes), b1n(nodes);
  for (int j = 0; j < panels; ++j) {
    const double ua = -p.window + j * h;
    for (int i = 0; i < nodes; ++i) {
      const double u = ua + 0.5 * h * (xr[i] + 1.0);
      const double t = u * tau;
      const double amp = p.area * pulse_value(p, u);
      CMatrix X = aV * std::exp(-I * k * u) + aVd * std::exp(I * k * u);
      CMatrix Xt(d, d);
      for (int c = 0; c < d; ++c)
        for (int r = 0; r < d; ++r) Xt(r, c) = X(r, c) * std::exp(I * (E[r] - E[c]) * t);
      hi[i] = amp * Xt;
      const cplx z = displacement_amplitude(p, table.at(u));
      CMatrix U1 = V.adjoint() * kron_qubit_fock(Matrix4c::Identity(), fock_displacement(z, spec.n_max)).m * V;
      hii[i] = amp * (U1.adjoint() * (Xt - X) * U1);
    }
    // running first-order terms at the nodes
    for (int i = 0; i < nodes; ++i) {
      a1n[i] = A1;
      b1n[i] = B1;
      for (int l = 0; l < nodes; ++l) {
        a1n[i] += (0.5 * h * S(i, l)) * hi[l];
        b1n[i] += (0.5 * h * S(i, l)) * hii[l];
      }
    }
    for (int l = 0; l < nodes; ++l) {
      const double w = 0.5 * h * S(nodes - 1, l);
      // B1 = -1/2: -1/2 [-i A1(u), H(u)]
      A2 += w * (0.5 * I) * (a1n[l] * hi[l] - hi[l] * a1n[l]);
      B2 += w * (0.5 * I) * (b1n[l] * hii[l] - hii[l] * b1n[l]);
    }
    A1 = a1n[nodes - 1];
    B1 = b1n[nodes - 1];
  }
  out.a1 = V * A1 * V.adjoint();
  out.a2 = V * A2 * V.adjoint();
  out.a2p1 = V * B1 * V.adjoint();
  out.a2p2 = V * B2 * V.adjoint();
  return out;
}

double sector_norm(const CMatrix& a, const SystemSpec& spec, int sector) {
  static constexpr int kExc[4] = {0, 1, 1, 2};
  std::vector<int> idx;
  for (int q = 0; q < 4; ++q)
    for (int n = 0; n <= spec.n_max; ++n)
      if (n + kExc[q] <= sector) idx.push_back(q * spec.fock_dim() + n);
  CMatrix sub(idx.size(), idx.size());
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = 0; j < idx.size(); ++j) sub(i, j) = a(idx[i], idx[j]);
  Eigen::JacobiSVD<CMatrix> svd(sub);
  return svd.singularValues()(0);
}

double ScalingEntry::ratio_error() const {
  return std::abs((norm_base / norm_scaled) / std::pow(2.0, predicted_exponent) - 1.0);
}

ScalingReport magnus_scaling_check(const PulseSpec& p, const SystemSpec& spec, int sector) {
  if (sector < 1 || sector > 4) throw Error(ErrorKind::InvalidArgument, "scaling check sector must be in 1..4");
  PulseSpec half_omega = p;
  half_omega.area *= 0.5;
  PulseSpec half_tau = p;
  half_tau.omega_tau_d *= 0.5;
  const MagnusTerms base = numeric_magnus_terms(p, spec);
  const MagnusTerms ho = numeric_magnus_terms(half_omega, spec);
  const MagnusTerms ht = numeric_magnus_terms(half_tau, spec);
  auto nrm = [&](const CMatrix& m) { return sector_norm(m, spec, sector); };
  const double om = std::sqrt(double(sector)) * p.area;
  const double gt = g_tau_d(p, spec);

  ScalingReport rep;
  rep.sector = sector;
  auto add = [&](std::string term, std::string tr, double b, double s, double pred, double pexp) {
    ScalingEntry e;
    e.term = std::move(term);
    e.transform = std::move(tr);
    e.norm_base = b;
    e.norm_scaled = s;
    e.predicted_order = pred;
    e.predicted_exponent = pexp;
    e.fitted_exponent = std::log2(b / s);
    rep.entries.push_back(e);
  };
  add("A_I^(1)", "Omega/2", nrm(base.a1), nrm(ho.a1), om, 1.0);
  add("A_I^(2)", "Omega/2", nrm(base.a2), nrm(ho.a2), om * om, 2.0);
  add("A_II'^(1)", "Omega/2", nrm(base.a2p1), nrm(ho.a2p1), p.area * gt, 1.0);
  add("A_II'^(1)/A_I^(1)", "tau_d/2", nrm(base.a2p1) / nrm(base.a1), nrm(ht.a2p1) / nrm(ht.a1), gt, 1.0);
  return rep;
}

}  // namespace cavityq
