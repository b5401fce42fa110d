#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "cavityq/kernels.hpp"

namespace {

using cavityq::cplx;
namespace k = cavityq::kernels;

std::vector<cplx> random_state(int n_max) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(4 * (n_max + 1));
  for (auto& x : v) x = {nd(rng), nd(rng)};
  return v;
}

template <bool Parallel>
void BM_apply_hamiltonian(benchmark::State& st) {
  const int n_max = int(st.range(0));
  const auto in = random_state(n_max);
  std::vector<cplx> out(in.size());
  const k::HamiltonianTerms h{1.0, cplx(0.01, 0.0), cplx(0.2, -0.1)};
  for (auto _ : st) {
    if constexpr (Parallel) k::apply_hamiltonian_omp(h, n_max, in.data(), out.data());
    else k::apply_hamiltonian_serial(h, n_max, in.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
  st.SetItemsProcessed(st.iterations() * int64_t(in.size()));
}

template <bool Parallel>
void BM_propagate_blocks(benchmark::State& st) {
  const int n_max = int(st.range(0));
  auto psi = random_state(n_max);
  for (auto _ : st) {
    if constexpr (Parallel) k::propagate_blocks_omp(1.0, 0.01, n_max, psi.data());
    else k::propagate_blocks_serial(1.0, 0.01, n_max, psi.data());
    benchmark::DoNotOptimize(psi.data());
  }
  st.SetItemsProcessed(st.iterations() * int64_t(psi.size()));
}

template <bool Parallel>
void BM_periodogram(benchmark::State& st) {
  const int n = int(st.range(0));
  std::vector<double> x(n), freqs(512);
  for (int i = 0; i < n; ++i) x[i] = std::sin(0.37 * i) + 0.3 * std::cos(1.1 * i);
  for (int i = 0; i < 512; ++i) freqs[i] = 0.01 * i;
  for (auto _ : st) {
    auto p = Parallel ? k::periodogram_omp(x, 0.1, freqs) : k::periodogram_serial(x, 0.1, freqs);
    benchmark::DoNotOptimize(p.data());
  }
}

}  // namespace

BENCHMARK(BM_apply_hamiltonian<false>)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_apply_hamiltonian<true>)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_propagate_blocks<false>)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_propagate_blocks<true>)->RangeMultiplier(4)->Range(64, 4096);
BENCHMARK(BM_periodogram<false>)->Arg(1024)->Arg(8192);
BENCHMARK(BM_periodogram<true>)->Arg(1024)->Arg(8192);

BENCHMARK_MAIN();
