#include "cavityq/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "cavityq/csv.hpp"
#include "cavityq/kernels.hpp"

namespace cavityq {

namespace {

constexpr int kDenseCap = 4096;

void check_dense_cap(const SystemSpec& spec) {
  if (spec.n_max > kDenseCap) {
    std::ostringstream os;
    os << "n_max = " << spec.n_max << " exceeds the dense evolution cap " << kDenseCap
       << "; use block propagation (evolve_free) for this size";
    throw Error(ErrorKind::DimensionTooLarge, os.str());
  }
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerances must be positive");
  if (!(max_step_fraction > 0.0)) throw Error(ErrorKind::InvalidArgument, "max_step_fraction must be positive");
  if (!(leak_tol > 0.0) || !(norm_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "leak/norm tolerances must be positive");
}

std::vector<BlockInfo> block_decomposition(const SystemSpec& spec) {
  std::vector<BlockInfo> out;
  for (int N = 0; N <= spec.n_max + 2; ++N) {
    int size = int(N <= spec.n_max) + int(N >= 1 && N - 1 <= spec.n_max) + int(N >= 2 && N - 2 <= spec.n_max);
    out.push_back({N, size, N >= 1 ? std::sqrt(4.0 * N - 2.0) * spec.g : 0.0});
  }
  return out;
}

PureState evolve_free(const PureState& state, double dt) {
  PureState out = state;
  kernels::propagate_blocks(state.spec.g, dt, state.spec.n_max, out.amplitudes.data());
  return out;
}

PureState Trajectory::state(size_t i) const {
  PureState s(spec);
  s.amplitudes = psi.at(i);
  return s;
}

namespace {

struct Rhs {
  const SystemSpec& spec;
  const PulseSpec& p;
  Coupling coupling;
  double tau_d;
  double T;
  double Omega;

  kernels::HamiltonianTerms terms(double t) const {
    kernels::HamiltonianTerms h;
    h.g = spec.g;
    if (coupling == Coupling::Full) h.counter = spec.g * std::exp(2.0 * I * spec.omega * t);
    if (Omega != 0.0 && std::abs(t) <= T) h.drive = Omega * pulse_value(p, t / tau_d) * std::exp(I * spec.omega * t);
    return h;
  }
  // k = -i H(t) y
  void operator()(double t, const CVector& y, CVector& k) const {
    kernels::apply_hamiltonian(terms(t), spec.n_max, y.data(), k.data());
    k *= -I;
  }
};

class Stepper {
 public:
  Stepper(const Rhs& f, const IntegratorConfig& cfg, double norm0, long& steps, long& rejected)
      : f_(f), cfg_(cfg), norm0_(norm0), steps_(steps), rejected_(rejected) {
    const int d = f.spec.dim();
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &y5_}) v->resize(d);
  }

  // Advance y from ta to tb with steps bounded by hmax.
  void run(CVector& y, double ta, double tb, double hmax) {
    if (ta == tb) return;
    if (cfg_.method == IntegratorMethod::Rk4Fixed)
      rk4(y, ta, tb, hmax);
    else
      dp45(y, ta, tb, hmax);
  }

 private:
  // Renormalizes y and returns the scale factor applied.
  double finish_step(CVector& y, double t) {
    const double nrm = y.norm();
    if (std::abs(nrm - norm0_) > cfg_.norm_tol) {
      std::ostringstream os;
      os << "norm drift " << std::abs(nrm - norm0_) << " at t = " << t;
      throw Error(ErrorKind::StepControlFailure, os.str());
    }
    y *= norm0_ / nrm;
    const int nf = f_.spec.fock_dim();
    double leak = 0.0;
    for (int q = 0; q < 4; ++q)
      for (int n = f_.spec.n_max - 1; n <= f_.spec.n_max; ++n) leak += std::norm(y[q * nf + n]);
    if (leak > cfg_.leak_tol) {
      std::ostringstream os;
      os << "population " << leak << " in the top two Fock levels at t = " << t << " (n_max = " << f_.spec.n_max
         << ")";
      throw Error(ErrorKind::CutoffOverflow, os.str());
    }
    ++steps_;
    return norm0_ / nrm;
  }

  void rk4(CVector& y, double ta, double tb, double hmax) {
    const long n = std::max(1L, long(std::ceil(std::abs(tb - ta) / hmax - 1e-12)));
    const double h = (tb - ta) / double(n);
    for (long i = 0; i < n; ++i) {
      const double t = ta + i * h;
      f_(t, y, k1_);
      tmp_ = y + 0.5 * h * k1_;
      f_(t + 0.5 * h, tmp_, k2_);
      tmp_ = y + 0.5 * h * k2_;
      f_(t + 0.5 * h, tmp_, k3_);
      tmp_ = y + h * k3_;
      f_(t + h, tmp_, k4_);
      y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
      finish_step(y, t + h);
    }
  }

  void dp45(CVector& y, double ta, double tb, double hmax) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    const double dir = tb > ta ? 1.0 : -1.0;
    double t = ta;
    if (h_ <= 0.0) h_ = std::min(hmax, 0.1 * hmax);
    h_ = std::min(h_, hmax);
    bool fsal = false;
    while (dir * (tb - t) > 0.0) {
      double h = std::min(h_, hmax);
      bool last = false;
      if (h >= dir * (tb - t)) {
        h = dir * (tb - t);
        last = true;
      }
      const double hs = dir * h;
      if (!fsal) f_(t, y, k1_);
      tmp_ = y + hs * a21 * k1_;
      f_(t + hs / 5, tmp_, k2_);
      tmp_ = y + hs * (a31 * k1_ + a32 * k2_);
      f_(t + 0.3 * hs, tmp_, k3_);
      tmp_ = y + hs * (a41 * k1_ + a42 * k2_ + a43 * k3_);
      f_(t + 0.8 * hs, tmp_, k4_);
      tmp_ = y + hs * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
      f_(t + 8.0 / 9.0 * hs, tmp_, k5_);
      tmp_ = y + hs * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
      const double tn = last ? tb : t + hs;
      f_(tn, tmp_, k6_);
      y5_ = y + hs * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
      f_(tn, y5_, k7_);
      tmp_ = hs * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double sc = cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y[i]), std::abs(y5_[i]));
        const double r = std::abs(tmp_[i]) / sc;
        acc += r * r;
      }
      const double err = std::sqrt(acc / double(y.size()));
      if (!std::isfinite(err)) throw Error(ErrorKind::StepControlFailure, "non-finite error estimate");
      const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        y = y5_;
        t = tn;
        k1_ = k7_ * finish_step(y, t);
        fsal = true;
        if (!last || fac < 1.0) h_ = h * fac;
      } else {
        ++rejected_;
        fsal = true;
        h_ = h * std::max(0.2, fac);
        if (h_ < 1e-13 * std::max(1.0, std::abs(t))) {
          std::ostringstream os;
          os << "step size underflow at t = " << t;
          throw Error(ErrorKind::StepControlFailure, os.str());
        }
      }
    }
  }

  const Rhs& f_;
  const IntegratorConfig& cfg_;
  double norm0_;
  long& steps_;
  long& rejected_;
  double h_ = 0.0;
  CVector k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y5_;
};

}  // namespace

Trajectory evolve_driven(const PureState& state, const PulseSpec& p, const SystemSpec& spec, double t0, double t1,
                         const IntegratorConfig& cfg, Coupling coupling, const std::vector<double>& sample_times) {
  spec.validate();
  p.validate();
  cfg.validate();
  check_dense_cap(spec);
  if (state.spec.n_max != spec.n_max) throw Error(ErrorKind::InvalidArgument, "state cutoff does not match spec");
  if (t0 == t1) throw Error(ErrorKind::InvalidArgument, "t0 == t1");

  const double tau = p.tau_d(spec);
  const double T = p.half_width(spec);
  Rhs rhs{spec, p, coupling, tau, T, p.drive(spec)};
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double h_in = cfg.max_step_fraction * std::min(tau, 2.0 * kPi / spec.omega);
  const double h_out = cfg.max_step_fraction * 2.0 * kPi / spec.omega;

  std::vector<double> targets;
  for (double s : sample_times)
    if (dir * (s - t0) > 0.0 && dir * (t1 - s) > 0.0) targets.push_back(s);
  std::sort(targets.begin(), targets.end(), [dir](double a, double b) { return dir * a < dir * b; });
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  targets.push_back(t1);

  Trajectory tr;
  tr.spec = spec;
  tr.t.push_back(t0);
  tr.psi.push_back(state.amplitudes);
  CVector y = state.amplitudes;
  const double norm0 = y.norm();
  Stepper stepper(rhs, cfg, norm0, tr.steps, tr.rejected);

  // Window edges split the span into drive-on and drive-off segments.
  std::vector<double> edges = {-T, T};
  double t = t0;
  for (double target : targets) {
    while (t != target) {
      double next = target;
      for (double e : edges)
        if (dir * (e - t) > 0.0 && dir * (next - e) > 0.0) next = e;
      const double mid = 0.5 * (t + next);
      const bool inside = std::abs(mid) < T && p.area != 0.0;
      if (!inside && coupling == Coupling::Rwa) {
        kernels::propagate_blocks(spec.g, next - t, spec.n_max, y.data());
      } else {
        stepper.run(y, t, next, inside ? h_in : h_out);
      }
      t = next;
    }
    tr.t.push_back(t);
    tr.psi.push_back(y);
  }
  return tr;
}

CMatrix dense_hamiltonian(const SystemSpec& spec, const PulseSpec* p, double t, Coupling coupling) {
  check_dense_cap(spec);
  const int d = spec.dim();
  kernels::HamiltonianTerms h;
  h.g = spec.g;
  if (coupling == Coupling::Full) h.counter = spec.g * std::exp(2.0 * I * spec.omega * t);
  if (p && p->area != 0.0 && std::abs(t) <= p->half_width(spec))
    h.drive = p->drive(spec) * pulse_value(*p, t / p->tau_d(spec)) * std::exp(I * spec.omega * t);
  CMatrix H(d, d);
  CVector e = CVector::Zero(d), col(d);
  for (int j = 0; j < d; ++j) {
    e.setZero();
    e[j] = 1.0;
    kernels::apply_hamiltonian_serial(h, spec.n_max, e.data(), col.data());
    H.col(j) = col;
  }
  return H;
}

Eigen::VectorXd excitation_diagonal(const SystemSpec& spec) {
  static constexpr int kExc[4] = {0, 1, 1, 2};
  Eigen::VectorXd d(spec.dim());
  for (int q = 0; q < 4; ++q)
    for (int n = 0; n <= spec.n_max; ++n) d[q * spec.fock_dim() + n] = double(n + kExc[q]);
  return d;
}

PureState undriven_ground_state(const SystemSpec& spec, Coupling coupling, double t0) {
  if (coupling == Coupling::Rwa) return basis_state(spec, 0, 0);
  check_dense_cap(spec);
  const Eigen::VectorXd N = excitation_diagonal(spec);
  // lab frame: omega N + g sigma_x (a + a+) = omega N + H_g + counter-rotating at t = 0
  CMatrix H = CMatrix(N.cast<cplx>().asDiagonal()) * spec.omega + dense_hamiltonian(spec, nullptr, 0.0, Coupling::Full);
  H = 0.5 * (H + H.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "ground-state diagonalization failed");
  PureState s(spec);
  s.amplitudes = es.eigenvectors().col(0);
  const cplx ref = s.amplitudes[0];
  if (std::abs(ref) > 0.0) s.amplitudes *= std::abs(ref) / ref;
  for (int i = 0; i < spec.dim(); ++i) s.amplitudes[i] *= std::exp(I * spec.omega * t0 * N[i]);
  return s;
}

Populations closed_form_populations(int n, double t, const SystemSpec& spec) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "excitation number must be >= 0");
  if (n > spec.n_max) throw Error(ErrorKind::InvalidArgument, "excitation number above cutoff");
  if (n == 0) return {1.0, 0.0, 0.0};
  const double p = double(n - 1) / (2.0 * n - 1.0);
  const double q = double(n) / (2.0 * n - 1.0);
  const double gn = std::sqrt(4.0 * n - 2.0) * spec.g;
  const double c = std::cos(gn * t), s = std::sin(gn * t);
  return {(p + q * c) * (p + q * c), q * s * s, p * q * (1.0 - c) * (1.0 - c)};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr, const std::map<std::string, std::string>& meta) {
  csv::write_meta(os, meta);
  csv::write_header(os, {"t", "re_00_0", "im_00_0", "re_00_1", "im_00_1", "re_psip_0", "im_psip_0", "re_11_0",
                         "im_11_0", "p_00", "p_psip", "p_psim", "p_11", "photons", "leakage"});
  const double r2 = 1.0 / std::sqrt(2.0);
  for (size_t i = 0; i < tr.t.size(); ++i) {
    PureState s = tr.state(i);
    QubitDensityMatrix rho = partial_trace_cavity(s);
    const cplx psip = r2 * (s.at(1, 0) + s.at(2, 0));
    const double pp = 0.5 * (rho(1, 1) + rho(2, 2) + rho(1, 2) + rho(2, 1)).real();
    const double pm = 0.5 * (rho(1, 1) + rho(2, 2) - rho(1, 2) - rho(2, 1)).real();
    csv::write_row(os, {tr.t[i], s.at(0, 0).real(), s.at(0, 0).imag(), s.at(0, 1).real(), s.at(0, 1).imag(),
                        psip.real(), psip.imag(), s.at(3, 0).real(), s.at(3, 0).imag(), rho(0, 0).real(), pp, pm,
                        rho(3, 3).real(), s.photon_number(), s.leakage()});
  }
}

}  // namespace cavityq

#include "cavityq/entanglement.hpp"

namespace cavityq {

RwaComparison rwa_comparison(const PulseSpec& p, const SystemSpec& spec, double gt_end, double sample_dt,
                             const IntegratorConfig& cfg) {
  const double T = p.half_width(spec);
  const double t_end = gt_end / spec.g;
  if (!(t_end > T)) throw Error(ErrorKind::InvalidArgument, "comparison must end after the pulse");
  std::vector<double> samples;
  for (double t = -T + sample_dt; t < t_end; t += sample_dt) samples.push_back(t);

  const PureState g_full = undriven_ground_state(spec, Coupling::Full, -T);
  Trajectory rwa = evolve_driven(basis_state(spec, 0, 0), p, spec, -T, t_end, cfg, Coupling::Rwa, samples);
  Trajectory full = evolve_driven(g_full, p, spec, -T, t_end, cfg, Coupling::Full, samples);

  RwaComparison out;
  out.ground_state_concurrence = concurrence(partial_trace_cavity(g_full)).concurrence;
  out.t = rwa.t;
  for (size_t i = 0; i < rwa.t.size(); ++i) {
    out.naive_rwa.push_back(naive_concurrence(rwa.state(i)));
    out.naive_full.push_back(naive_concurrence(full.state(i)));
  }
  // centered moving average over pi / omega
  const int half = std::max(1, int(std::lround(0.5 * kPi / spec.omega / sample_dt)));
  const size_t n = out.t.size();
  out.slow_full.assign(n, 0.0);
  std::vector<double> prefix(n + 1, 0.0);
  for (size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + out.naive_full[i];
  double lo = 1e300, hi = -1e300;
  for (size_t i = 0; i < n; ++i) {
    const size_t a = i >= size_t(half) ? i - half : 0;
    const size_t b = std::min(n - 1, i + half);
    out.slow_full[i] = (prefix[b + 1] - prefix[a]) / double(b - a + 1);
    const bool interior = i >= size_t(half) && i + half < n;
    if (out.t[i] > T + 2.0 * half * sample_dt && interior) {
      out.residual_amplitude = std::max(out.residual_amplitude, std::abs(out.naive_full[i] - out.slow_full[i]));
      out.envelope_deviation = std::max(out.envelope_deviation, std::abs(out.slow_full[i] - out.naive_rwa[i]));
      lo = std::min(lo, out.naive_rwa[i]);
      hi = std::max(hi, out.naive_rwa[i]);
    }
  }
  out.rwa_swing = hi > lo ? hi - lo : 0.0;
  return out;
}

}  // namespace cavityq
