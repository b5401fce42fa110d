#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cavityq {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;      // measured worst case
  double threshold = 0.0;
  std::string detail;
  double seconds = 0.0;
};

// Invariant suite: unitarity, trace/positivity, local-unitary invariance of the
// concurrence, block/dense equivalence, integrator convergence and a few
// algebraic identities. Random states come from a seeded mt19937_64.
std::vector<CheckResult> run_selftest(std::uint64_t seed = 1);

}  // namespace cavityq
