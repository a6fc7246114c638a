#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinsens/bloch_embedding.hpp"
#include "spinsens/network_model.hpp"
#include "spinsens/random.hpp"

namespace spinsens {

// A random nominal operating point: biases in [-2, 2], t_f in [0.5, 3],
// random distinct transfer spins. Rings for N >= 3, a chain for N = 2.
struct Instance {
  NetworkSpec spec;
  RealVector biases;
  double t_f = 0.0;
  std::uint64_t seed = 0;
};

Instance random_instance(int n, std::uint64_t seed);

// Analytic perfect-transfer points: N = 2 chain at t = pi/2 and N = 3 chain
// (1 -> 3) at t = pi/sqrt(2), both with zero bias.
Instance analytic_pst_instance(int n);

struct CheckResult {
  std::string name;
  bool passed = true;
  bool warning_only = false;  // empirical observations without a proof
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  int min_n = 2;
  int max_n = 6;
  int instances_per_n = 50;
  bool pst_only = false;
  AdjointConvention convention = AdjointConvention::kSchrodinger;
  int threads = 1;
};

// Runs the invariant suite and returns one result per property.
std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace spinsens
