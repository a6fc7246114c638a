#pragma once

#include <cstdint>
#include <vector>

#include "spinsens/network_model.hpp"
#include "spinsens/types.hpp"

namespace spinsens {

// A static-bias controller: biases Delta and read-out time t_f.
struct Controller {
  RealVector biases;
  double t_f = 0.0;
  double fidelity = 0.0;
  NetworkSpec spec;
  std::uint64_t seed = 0;
  int index = 0;
};

struct SynthesisConfig {
  int restarts = 100;
  double tf_min = 1.0;
  double tf_max = 50.0;
  double bias_min = 0.0;
  double bias_max = 10.0;
  // Stationarity threshold on the projected gradient (biases and t_f).
  double tolerance = 1e-8;
  int max_iterations = 200;  // quasi-Newton steps per round
  int max_rounds = 10;       // bias / read-out time alternations
  std::uint64_t seed = 0;

  void validate() const;
};

struct ObjectiveValue {
  double fidelity = 0.0;
  RealVector gradient;  // dF/dDelta_n
};

// Fidelity and its bias gradient. Component n is -zeta_n for the bias
// structure at site n with unit scaling, contracted in the eigenbasis.
ObjectiveValue fidelity_objective(const NetworkSpec& spec, const RealVector& biases, double t_f);

// Bloch-route fidelity for an existing controller.
double evaluate_fidelity(const NetworkSpec& spec, const RealVector& biases, double t_f);

enum class OptimizeStatus { kConverged, kMaxIter };

struct OptimizeResult {
  Controller controller;
  OptimizeStatus status = OptimizeStatus::kMaxIter;
  int iterations = 0;
};

// Projected BFGS ascent in the biases alternating with a golden-section
// search in t_f. Deterministic.
OptimizeResult local_optimize(const NetworkSpec& spec, const RealVector& initial_biases,
                              double initial_tf, const SynthesisConfig& config);

// `restarts` seeded local optimizations; near-duplicates collapsed, sorted by
// fidelity descending, indices 1.. assigned after the sort.
std::vector<Controller> synthesize_ensemble(const NetworkSpec& spec, const SynthesisConfig& config,
                                            int threads = 1);

}  // namespace spinsens
