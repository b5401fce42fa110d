#include "cavityq/kernels.hpp"

#include <cmath>

namespace cavityq::kernels {

namespace {

inline void hamiltonian_row(const HamiltonianTerms& h, int n_max, const cplx* in, cplx* out, int n) {
  const int nf = n_max + 1;
  const cplx* x0 = in;
  const cplx* x1 = in + nf;
  const cplx* x2 = in + 2 * nf;
  const cplx* x3 = in + 3 * nf;
  const double su = n < n_max ? std::sqrt(double(n + 1)) : 0.0;  // a: n+1 -> n
  const double sd = n > 0 ? std::sqrt(double(n)) : 0.0;          // a+: n-1 -> n
  auto up = [&](const cplx* x) { return n < n_max ? su * x[n + 1] : cplx(0.0); };
  auto dn = [&](const cplx* x) { return n > 0 ? sd * x[n - 1] : cplx(0.0); };

  const cplx a0 = up(x0), a1 = up(x1), a2 = up(x2), a3 = up(x3);
  const cplx c0 = dn(x0), c1 = dn(x1), c2 = dn(x2), c3 = dn(x3);
  const cplx cc = std::conj(h.counter);
  const cplx dc = std::conj(h.drive);

  // collective s+: (0) <- 0, (1),(2) <- x0, (3) <- x1 + x2 ; s- is the transpose
  out[n] = h.g * (c1 + c2) + cc * (a1 + a2) + h.drive * c0 + dc * a0;
  out[nf + n] = h.g * (a0 + c3) + h.counter * c0 + cc * a3 + h.drive * c1 + dc * a1;
  out[2 * nf + n] = h.g * (a0 + c3) + h.counter * c0 + cc * a3 + h.drive * c2 + dc * a2;
  out[3 * nf + n] = h.g * (a1 + a2) + h.counter * (c1 + c2) + h.drive * c3 + dc * a3;
}

inline void block_update(double g, double t, int n_max, cplx* psi, int N) {
  const int nf = n_max + 1;
  const double r2 = 1.0 / std::sqrt(2.0);
  const bool has0 = N <= n_max;
  const bool has1 = N >= 1 && N - 1 <= n_max;
  const bool has2 = N >= 2 && N - 2 <= n_max;
  if (!has1) return;  // lone |00;0> has zero energy
  cplx x0 = has0 ? psi[N] : cplx(0.0);
  cplx* p1 = psi + nf + (N - 1);
  cplx* p2 = psi + 2 * nf + (N - 1);
  cplx x1 = r2 * (*p1 + *p2);
  const cplx xd = r2 * (*p1 - *p2);
  cplx x2 = has2 ? psi[3 * nf + N - 2] : cplx(0.0);

  const double A = has0 ? g * std::sqrt(2.0 * N) : 0.0;
  const double B = has2 ? g * std::sqrt(2.0 * (N - 1)) : 0.0;
  const double L2 = A * A + B * B;
  if (L2 == 0.0) return;
  const double L = std::sqrt(L2);
  const double s = std::sin(L * t) / L;
  const double c = (std::cos(L * t) - 1.0) / L2;
  // M x, M^2 x for M = [[0,A,0],[A,0,B],[0,B,0]]
  const cplx m0 = A * x1, m1 = A * x0 + B * x2, m2 = B * x1;
  const cplx q0 = A * m1, q1 = A * m0 + B * m2, q2 = B * m1;
  x0 += -I * s * m0 + c * q0;
  x1 += -I * s * m1 + c * q1;
  x2 += -I * s * m2 + c * q2;
  if (has0) psi[N] = x0;
  *p1 = r2 * (x1 + xd);
  *p2 = r2 * (x1 - xd);
  if (has2) psi[3 * nf + N - 2] = x2;
}

inline double periodogram_bin(const std::vector<double>& x, double mean, const std::vector<double>& w, double dt,
                              double f) {
  cplx acc = 0.0;
  for (size_t n = 0; n < x.size(); ++n) acc += w[n] * (x[n] - mean) * std::exp(-I * (f * dt * double(n)));
  return std::norm(acc);
}

void hann_and_mean(const std::vector<double>& x, std::vector<double>& w, double& mean) {
  const size_t N = x.size();
  w.resize(N);
  mean = 0.0;
  for (double v : x) mean += v;
  mean /= double(N);
  for (size_t n = 0; n < N; ++n) w[n] = N > 1 ? 0.5 - 0.5 * std::cos(2.0 * kPi * double(n) / double(N - 1)) : 1.0;
}

}  // namespace

void apply_hamiltonian_serial(const HamiltonianTerms& h, int n_max, const cplx* in, cplx* out) {
  for (int n = 0; n <= n_max; ++n) hamiltonian_row(h, n_max, in, out, n);
}

void apply_hamiltonian_omp(const HamiltonianTerms& h, int n_max, const cplx* in, cplx* out) {
#pragma omp parallel for schedule(static)
  for (int n = 0; n <= n_max; ++n) hamiltonian_row(h, n_max, in, out, n);
}

void apply_hamiltonian(const HamiltonianTerms& h, int n_max, const cplx* in, cplx* out) {
  if (n_max >= kParallelFockThreshold)
    apply_hamiltonian_omp(h, n_max, in, out);
  else
    apply_hamiltonian_serial(h, n_max, in, out);
}

void propagate_blocks_serial(double g, double t, int n_max, cplx* psi) {
  for (int N = 1; N <= n_max + 2; ++N) block_update(g, t, n_max, psi, N);
}

void propagate_blocks_omp(double g, double t, int n_max, cplx* psi) {
#pragma omp parallel for schedule(static)
  for (int N = 1; N <= n_max + 2; ++N) block_update(g, t, n_max, psi, N);
}

void propagate_blocks(double g, double t, int n_max, cplx* psi) {
  if (n_max >= kParallelFockThreshold)
    propagate_blocks_omp(g, t, n_max, psi);
  else
    propagate_blocks_serial(g, t, n_max, psi);
}

std::vector<double> periodogram_serial(const std::vector<double>& x, double dt, const std::vector<double>& freqs) {
  std::vector<double> w, out(freqs.size());
  double mean;
  hann_and_mean(x, w, mean);
  for (size_t j = 0; j < freqs.size(); ++j) out[j] = periodogram_bin(x, mean, w, dt, freqs[j]);
  return out;
}

std::vector<double> periodogram_omp(const std::vector<double>& x, double dt, const std::vector<double>& freqs) {
  std::vector<double> w, out(freqs.size());
  double mean;
  hann_and_mean(x, w, mean);
  const long nf = long(freqs.size());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < nf; ++j) out[j] = periodogram_bin(x, mean, w, dt, freqs[j]);
  return out;
}

}  // namespace cavityq::kernels
