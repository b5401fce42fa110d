#include "cavityq/entanglement.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/minima.hpp>

#include "cavityq/dynamics.hpp"

namespace cavityq {

namespace {

Matrix4c sigma_yy() {
  Matrix2c sy = single_qubit(SigmaKind::Y);
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = sy(i, j) * sy(k, l);
  return out;
}

}  // namespace

Matrix4c spin_flip(const QubitDensityMatrix& rho) {
  static const Matrix4c yy = sigma_yy();
  return yy * rho.conjugate() * yy;
}

ConcurrenceResult concurrence(const QubitDensityMatrix& rho) {
  ConcurrenceResult res;
  const Matrix4c flipped = spin_flip(rho);
  Eigen::ComplexEigenSolver<Matrix4c> es(rho * flipped, false);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "eigensolver failed on rho * rho~");
  std::array<double, 4> mu{};
  bool clamp_ok = true;
  for (int i = 0; i < 4; ++i) {
    const cplx ev = es.eigenvalues()[i];
    res.max_imag = std::max(res.max_imag, std::abs(ev.imag()));
    if (ev.real() < -kEigenClamp) clamp_ok = false;
    mu[i] = std::max(0.0, ev.real());
  }
  if (res.max_imag > kEigenClamp) clamp_ok = false;

  if (!clamp_ok) {
    // sqrt(rho) rho~ sqrt(rho) is Hermitian PSD with the same spectrum.
    Eigen::SelfAdjointEigenSolver<Matrix4c> er(rho);
    if (er.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "eigensolver failed on rho");
    Eigen::Vector4d ev = er.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Matrix4c sq = er.eigenvectors() * ev.cast<cplx>().asDiagonal() * er.eigenvectors().adjoint();
    Matrix4c R = sq * flipped * sq;
    Eigen::SelfAdjointEigenSolver<Matrix4c> eR(0.5 * (R + R.adjoint()), Eigen::EigenvaluesOnly);
    if (eR.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "eigensolver failed on fallback route");
    for (int i = 0; i < 4; ++i) mu[i] = std::max(0.0, eR.eigenvalues()[i]);
    res.used_fallback = true;
  }
  for (int i = 0; i < 4; ++i) res.lambdas[i] = std::sqrt(mu[i]);
  std::sort(res.lambdas.begin(), res.lambdas.end(), std::greater<>());
  res.naive = res.lambdas[0] - res.lambdas[1] - res.lambdas[2] - res.lambdas[3];
  res.concurrence = std::max(0.0, res.naive);
  return res;
}

double naive_concurrence(const PureState& s) { return concurrence(partial_trace_cavity(s)).naive; }

double pure_state_concurrence(const Eigen::Vector4cd& psi) {
  static const Matrix4c yy = sigma_yy();
  return std::abs(psi.dot(yy * psi.conjugate()));
}

double sector_concurrence(int n, double t, const SystemSpec& spec) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "excitation number must be >= 0");
  if (n == 0) return 0.0;
  SystemSpec big = spec;
  big.n_max = std::max(spec.n_max, n);
  const Populations p = closed_form_populations(n, t, big);
  return std::max(0.0, p.ppsi - 2.0 * std::sqrt(p.p00 * p.p11));
}

double max_sector_concurrence(int n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "excitation number must be >= 0");
  return n == 0 ? 0.0 : 1.0 / n;
}

double numeric_max_sector_concurrence(int n, const SystemSpec& spec, int grid) {
  if (n <= 0) return 0.0;
  const double gn = std::sqrt(4.0 * n - 2.0) * spec.g;
  const double period = 2.0 * kPi / gn;
  const double dt = period / grid;
  int best = 0;
  double best_v = -1.0;
  for (int i = 0; i <= grid; ++i) {
    const double v = sector_concurrence(n, i * dt, spec);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  auto neg = [&](double t) { return -sector_concurrence(n, t, spec); };
  auto r = boost::math::tools::brent_find_minima(neg, std::max(0.0, (best - 1) * dt), std::min(period, (best + 1) * dt),
                                                 std::numeric_limits<double>::digits / 2 + 8);
  return std::max(best_v, -r.second);
}

}  // namespace cavityq
