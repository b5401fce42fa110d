#pragma once

#include <vector>

#include "cavityq/types.hpp"

// Hot loops with a serial reference and an OpenMP variant. Both produce
// bitwise-identical results: parallel loops never reduce across threads.
namespace cavityq::kernels {

// H = g(s+ a + s- a+) + counter s+ a+ + conj(counter) s- a + drive a+ + conj(drive) a
struct HamiltonianTerms {
  double g = 0.0;
  cplx counter = 0.0;
  cplx drive = 0.0;
};

void apply_hamiltonian_serial(const HamiltonianTerms& h, int n_max, const cplx* in, cplx* out);
void apply_hamiltonian_omp(const HamiltonianTerms& h, int n_max, const cplx* in, cplx* out);
void apply_hamiltonian(const HamiltonianTerms& h, int n_max, const cplx* in, cplx* out);

// In-place exp(-i H_g t) on the state, block by excitation number.
void propagate_blocks_serial(double g, double t, int n_max, cplx* psi);
void propagate_blocks_omp(double g, double t, int n_max, cplx* psi);
void propagate_blocks(double g, double t, int n_max, cplx* psi);

// |sum_n w_n (x_n - mean) exp(-i f t_n)|^2 with a Hann window w.
std::vector<double> periodogram_serial(const std::vector<double>& x, double dt, const std::vector<double>& freqs);
std::vector<double> periodogram_omp(const std::vector<double>& x, double dt, const std::vector<double>& freqs);

// Size above which the dispatching entry points use OpenMP.
inline constexpr int kParallelFockThreshold = 512;

}  // namespace cavityq::kernels
