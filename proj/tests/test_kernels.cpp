#include <catch_amalgamated.hpp>

#include <random>

#include "cavityq/kernels.hpp"
#include "cavityq/types.hpp"

using namespace cavityq;

namespace {

CVector random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(nd(rng), nd(rng));
  return v;
}

}  // namespace

TEST_CASE("Hamiltonian kernels agree", "[kernels]") {
  for (int n_max : {4, 700}) {
    const int dim = 4 * (n_max + 1);
    const CVector in = random_vector(dim, 5);
    CVector a(dim), b(dim);
    const kernels::HamiltonianTerms h{0.05, cplx(0.01, 0.02), cplx(-0.3, 0.1)};
    kernels::apply_hamiltonian_serial(h, n_max, in.data(), a.data());
    kernels::apply_hamiltonian_omp(h, n_max, in.data(), b.data());
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    // Hermitian: <x|Hy> = <Hx|y>
    const CVector y = random_vector(dim, 9);
    CVector hy(dim);
    kernels::apply_hamiltonian_serial(h, n_max, y.data(), hy.data());
    CHECK(std::abs(in.dot(hy) - a.dot(y)) < 1e-9 * dim);
  }
}

TEST_CASE("block propagation kernels agree", "[kernels]") {
  for (int n_max : {6, 900}) {
    const int dim = 4 * (n_max + 1);
    CVector a = random_vector(dim, 1), b = a;
    kernels::propagate_blocks_serial(0.05, 17.0, n_max, a.data());
    kernels::propagate_blocks_omp(0.05, 17.0, n_max, b.data());
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    CVector c = random_vector(dim, 1);
    CHECK(std::abs(a.norm() - c.norm()) < 1e-10 * c.norm());
  }
}

TEST_CASE("periodogram kernels agree", "[kernels]") {
  std::vector<double> x(500), f;
  for (int i = 0; i < 500; ++i) x[i] = std::sin(0.3 * i) + 0.1 * std::cos(1.1 * i);
  for (int i = 1; i < 200; ++i) f.push_back(0.01 * i);
  const auto a = kernels::periodogram_serial(x, 1.0, f), b = kernels::periodogram_omp(x, 1.0, f);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  const auto peak = std::max_element(a.begin(), a.end()) - a.begin();
  CHECK(std::abs(f[peak] - 0.3) < 0.011);
}
