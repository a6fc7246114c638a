#include "spinsens/network_model.hpp"

#include <cmath>

namespace spinsens {

std::string to_string(Topology t) { return t == Topology::kRing ? "ring" : "chain"; }

Topology topology_from_string(const std::string& s) {
  if (s == "ring") return Topology::kRing;
  if (s == "chain") return Topology::kChain;
  throw ValidationError("unknown topology '" + s + "' (expected ring or chain)");
}

void NetworkSpec::validate() const {
  if (num_spins < 2) throw ValidationError("network needs at least 2 spins");
  // A 2-ring would couple the same pair twice.
  if (topology == Topology::kRing && num_spins < 3)
    throw ValidationError("ring topology needs at least 3 spins");
  if (!(coupling > 0.0) || !std::isfinite(coupling))
    throw ValidationError("coupling J must be positive and finite");
  if (kappa != 0.0) throw ValidationError("nonzero kappa (ZZ coupling) is not supported");
  auto in_range = [this](int s) { return s >= 1 && s <= num_spins; };
  if (!in_range(input_spin) || !in_range(output_spin))
    throw ValidationError("transfer spins must lie in 1.." + std::to_string(num_spins));
  if (input_spin == output_spin) throw ValidationError("input and output spin must differ");
}

std::vector<std::pair<int, int>> coupled_pairs(const NetworkSpec& spec) {
  std::vector<std::pair<int, int>> pairs;
  for (int k = 0; k + 1 < spec.num_spins; ++k) pairs.emplace_back(k, k + 1);
  if (spec.topology == Topology::kRing) pairs.emplace_back(0, spec.num_spins - 1);
  return pairs;
}

SESHamiltonian build_hamiltonian(const NetworkSpec& spec, const RealVector& biases) {
  spec.validate();
  const int n = spec.num_spins;
  if (biases.size() != n)
    throw ValidationError("bias vector has length " + std::to_string(biases.size()) +
                          ", expected " + std::to_string(n));
  if (!biases.allFinite()) throw ValidationError("biases must be finite");
  RealMatrix h = RealMatrix::Zero(n, n);
  for (auto [a, b] : coupled_pairs(spec)) {
    h(a, b) = spec.coupling;
    h(b, a) = spec.coupling;
  }
  h.diagonal() = biases;
  return {std::move(h), biases};
}

std::vector<UncertaintyStructure> enumerate_structures(const NetworkSpec& spec) {
  spec.validate();
  const int n = spec.num_spins;
  std::vector<UncertaintyStructure> out;
  int index = 1;
  for (int k = 0; k < n; ++k) {
    UncertaintyStructure s;
    s.index = index++;
    s.kind = StructureKind::kBias;
    s.site_a = s.site_b = k;
    s.matrix = RealMatrix::Zero(n, n);
    s.matrix(k, k) = 1.0;
    s.scaling_rule = ScalingRule::kControlField;
    out.push_back(std::move(s));
  }
  for (auto [a, b] : coupled_pairs(spec)) {
    UncertaintyStructure s;
    s.index = index++;
    s.kind = StructureKind::kCoupling;
    s.site_a = a;
    s.site_b = b;
    s.matrix = RealMatrix::Zero(n, n);
    s.matrix(a, b) = 1.0;
    s.matrix(b, a) = 1.0;
    s.scaling_rule = ScalingRule::kUnity;
    out.push_back(std::move(s));
  }
  return out;
}

double scaling_factor(const UncertaintyStructure& s, const RealVector& biases) {
  if (s.scaling_rule == ScalingRule::kUnity) return 1.0;
  if (s.site_a < 0 || s.site_a >= biases.size())
    throw ValidationError("bias structure site outside the bias vector");
  return std::abs(biases(s.site_a));
}

SESHamiltonian perturb(const SESHamiltonian& h, const UncertaintyStructure& s, double delta) {
  if (s.matrix.rows() != h.matrix.rows() || s.matrix.cols() != h.matrix.cols())
    throw ValidationError("structure and Hamiltonian dimensions differ");
  const double f = scaling_factor(s, h.biases);
  SESHamiltonian out = h;
  out.matrix += (delta * f) * s.matrix;
  return out;
}

}  // namespace spinsens
