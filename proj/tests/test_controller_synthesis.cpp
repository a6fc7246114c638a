#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "spinsens/controller_synthesis.hpp"
#include "spinsens/sensitivity_engine.hpp"
#include "spinsens/verification.hpp"
#include "test_support.hpp"

using namespace spinsens;

namespace {

NetworkSpec ring4_12() {
  NetworkSpec s;
  s.num_spins = 4;
  s.topology = Topology::kRing;
  s.input_spin = 1;
  s.output_spin = 2;
  return s;
}

SynthesisConfig small_config(int restarts, std::uint64_t seed) {
  SynthesisConfig c;
  c.restarts = restarts;
  c.seed = seed;
  return c;
}

bool same(const Controller& a, const Controller& b) {
  return a.biases == b.biases && a.t_f == b.t_f && a.fidelity == b.fidelity && a.seed == b.seed &&
         a.index == b.index && a.spec == b.spec;
}

}  // namespace

TEST_CASE("fidelity gradient matches finite differences") {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const NetworkSpec spec = ring4_12();
    RealVector d(4);
    for (int k = 0; k < 4; ++k) d(k) = rng.uniform(0.0, 5.0);
    const double t = rng.uniform(1.0, 10.0);
    const ObjectiveValue v = fidelity_objective(spec, d, t);
    CHECK(v.fidelity == doctest::Approx(evaluate_fidelity(spec, d, t)).epsilon(1e-12));
    const double h = 1e-5;
    for (int k = 0; k < 4; ++k) {
      RealVector up = d, down = d;
      up(k) += h;
      down(k) -= h;
      const double fd = (evaluate_fidelity(spec, up, t) - evaluate_fidelity(spec, down, t)) / (2 * h);
      CHECK(std::abs(v.gradient(k) - fd) <= std::max(1e-6 * std::abs(fd), 1e-9));
    }
  }
}

TEST_CASE("fidelity gradient is the negated bias sensitivity") {
  const Instance inst = random_instance(5, 321);
  const ObjectiveValue v = fidelity_objective(inst.spec, inst.biases, inst.t_f);
  const auto h = build_hamiltonian(inst.spec, inst.biases);
  const BlochSystem sys = make_bloch_system(inst.spec, h, inst.t_f);
  const SpectralData sd = spectral_decompose(sys.A);
  for (const auto& s : enumerate_structures(inst.spec)) {
    if (s.kind != StructureKind::kBias) continue;
    const auto k = sensitivity_operator(sd, test::structure_image(s, *sys.basis), inst.t_f);
    CHECK(std::abs(v.gradient(s.site_a) + differential_sensitivity(sys, k, 1.0)) <= 1e-9);
  }
}

TEST_CASE("a uniform bias shift is a global phase") {
  const Instance inst = random_instance(4, 77);
  const ObjectiveValue base = fidelity_objective(inst.spec, inst.biases, inst.t_f);
  const RealVector shifted = inst.biases.array() + 1.75;
  const ObjectiveValue moved = fidelity_objective(inst.spec, shifted, inst.t_f);
  CHECK(moved.fidelity == doctest::Approx(base.fidelity).epsilon(1e-12));
  CHECK(std::abs(base.gradient.sum()) <= 1e-10);
  CHECK(std::abs(moved.gradient.sum()) <= 1e-10);
}

TEST_CASE("perfect transfer is a stationary point") {
  const Instance pst = analytic_pst_instance(2);
  const ObjectiveValue v = fidelity_objective(pst.spec, pst.biases, pst.t_f);
  CHECK(v.fidelity == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(v.gradient.norm() <= 1e-12);

  const OptimizeResult r = local_optimize(pst.spec, pst.biases, pst.t_f, SynthesisConfig{});
  CHECK(r.status == OptimizeStatus::kConverged);
  CHECK(r.controller.biases == pst.biases);
  CHECK(r.controller.t_f == pst.t_f);
  CHECK(r.controller.fidelity == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("local optimization improves fidelity and respects the box") {
  const NetworkSpec spec = ring4_12();
  const SynthesisConfig cfg;
  SplitMix64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    RealVector d(4);
    for (int k = 0; k < 4; ++k) d(k) = rng.uniform(cfg.bias_min, cfg.bias_max);
    const double t = rng.uniform(cfg.tf_min, cfg.tf_max);
    const OptimizeResult r = local_optimize(spec, d, t, cfg);
    CHECK(r.controller.fidelity >= evaluate_fidelity(spec, d, t) - 1e-12);
    CHECK((r.controller.biases.array() >= cfg.bias_min).all());
    CHECK((r.controller.biases.array() <= cfg.bias_max).all());
    CHECK(r.controller.t_f >= cfg.tf_min);
    CHECK(r.controller.t_f <= cfg.tf_max);
  }
}

TEST_CASE("local optimization rejects bad starting points") {
  const NetworkSpec spec = ring4_12();
  const SynthesisConfig cfg;
  CHECK_THROWS_AS(local_optimize(spec, RealVector::Constant(4, -1.0), 5.0, cfg), ValidationError);
  CHECK_THROWS_AS(local_optimize(spec, RealVector::Zero(4), 100.0, cfg), ValidationError);
  CHECK_THROWS_AS(local_optimize(spec, RealVector::Zero(3), 5.0, cfg), ValidationError);
}

TEST_CASE("synthesis configuration validation") {
  auto bad = [](auto mutate) {
    SynthesisConfig c;
    mutate(c);
    return c;
  };
  CHECK_NOTHROW(SynthesisConfig{}.validate());
  CHECK_THROWS_AS(bad([](SynthesisConfig& c) { c.restarts = 0; }).validate(), ValidationError);
  CHECK_THROWS_AS(bad([](SynthesisConfig& c) { c.tf_min = 0.0; }).validate(), ValidationError);
  CHECK_THROWS_AS(bad([](SynthesisConfig& c) { c.tf_max = 0.5; }).validate(), ValidationError);
  CHECK_THROWS_AS(bad([](SynthesisConfig& c) { c.bias_max = -1.0; }).validate(), ValidationError);
  CHECK_THROWS_AS(bad([](SynthesisConfig& c) { c.tolerance = 0.0; }).validate(), ValidationError);
  CHECK_THROWS_AS(bad([](SynthesisConfig& c) { c.max_rounds = 0; }).validate(), ValidationError);
}

TEST_CASE("single restart gives a singleton ensemble") {
  const auto e = synthesize_ensemble(ring4_12(), small_config(1, 3));
  REQUIRE(e.size() == 1);
  CHECK(e[0].index == 1);
}

TEST_CASE("ensemble of 100 restarts reaches good transfer and is deterministic") {
  const SynthesisConfig cfg = small_config(100, 2024);
  const auto a = synthesize_ensemble(ring4_12(), cfg, 1);
  const auto b = synthesize_ensemble(ring4_12(), cfg, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(same(a[i], b[i]));
  REQUIRE_FALSE(a.empty());
  CHECK(1.0 - a.front().fidelity < 1e-2);

  for (std::size_t i = 0; i < a.size(); ++i) {
    const Controller& c = a[i];
    CHECK(c.index == static_cast<int>(i) + 1);
    if (i > 0) CHECK(a[i - 1].fidelity >= c.fidelity);
    CHECK(c.fidelity >= -1e-12);
    CHECK(c.fidelity <= 1.0 + 1e-12);
    CHECK(c.t_f >= cfg.tf_min);
    CHECK(c.t_f <= cfg.tf_max);
    CHECK((c.biases.array() >= cfg.bias_min).all());
    CHECK((c.biases.array() <= cfg.bias_max).all());
    CHECK(std::abs(evaluate_fidelity(c.spec, c.biases, c.t_f) - c.fidelity) <= 1e-10);
    // Independent re-evaluation in Hilbert space.
    const ComplexMatrix h = build_hamiltonian(c.spec, c.biases).matrix.cast<Complex>();
    const double hilbert =
        schrodinger_fidelity(h, basis_state(4, 1), basis_state(4, 2), c.t_f);
    CHECK(std::abs(hilbert - c.fidelity) <= 1e-10);
  }
}

TEST_CASE("large ensembles span orders of magnitude in error") {
  const auto e = synthesize_ensemble(ring4_12(), small_config(200, 7), 2);
  REQUIRE(e.size() >= 2);
  double lo = 1.0, hi = 0.0;
  for (const auto& c : e) {
    const double err = std::max(1.0 - c.fidelity, 1e-300);
    lo = std::min(lo, err);
    hi = std::max(hi, err);
  }
  CHECK(hi / lo >= 100.0);
}
