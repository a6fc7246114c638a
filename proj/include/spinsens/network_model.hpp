#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spinsens/types.hpp"

namespace spinsens {

enum class Topology { kRing, kChain };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

// Spin network with uniform coupling. Spins are stored 1-indexed, matching
// every file format and CLI flag.
struct NetworkSpec {
  int num_spins = 2;
  Topology topology = Topology::kChain;
  double coupling = 1.0;
  int input_spin = 1;
  int output_spin = 2;
  // ZZ anisotropy. Accepted for completeness but must be zero: the
  // single-excitation diagonal convention for nonzero values is not fixed.
  double kappa = 0.0;

  // Throws ValidationError on any violated invariant.
  void validate() const;

  bool operator==(const NetworkSpec&) const = default;
};

struct SESHamiltonian {
  RealMatrix matrix;
  RealVector biases;
};

enum class StructureKind { kBias, kCoupling };
enum class ScalingRule { kControlField, kUnity };

struct UncertaintyStructure {
  int index = 0;  // 1-based n
  StructureKind kind = StructureKind::kBias;
  // 0-based sites. For bias structures site_a == site_b.
  int site_a = 0;
  int site_b = 0;
  RealMatrix matrix;
  ScalingRule scaling_rule = ScalingRule::kControlField;
};

// Nearest-neighbour pairs (0-based) in structure order: (k, k+1) ascending,
// then the ring closure (0, N-1).
std::vector<std::pair<int, int>> coupled_pairs(const NetworkSpec& spec);

SESHamiltonian build_hamiltonian(const NetworkSpec& spec, const RealVector& biases);

std::vector<UncertaintyStructure> enumerate_structures(const NetworkSpec& spec);

// f_n: |bias| at the addressed site for control channels, 1 otherwise.
double scaling_factor(const UncertaintyStructure& s, const RealVector& biases);

// H + delta * f_n * S_n, with f_n taken from the nominal biases of `h`.
SESHamiltonian perturb(const SESHamiltonian& h, const UncertaintyStructure& s, double delta);

}  // namespace spinsens
