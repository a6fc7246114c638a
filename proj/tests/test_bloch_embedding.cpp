#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <thread>
#include <unsupported/Eigen/MatrixFunctions>

#include "spinsens/bloch_embedding.hpp"
#include "spinsens/spectral.hpp"
#include "spinsens/verification.hpp"
#include "test_support.hpp"

using namespace spinsens;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

ComplexMatrix pauli(char which) {
  ComplexMatrix m(2, 2);
  const Complex i(0.0, 1.0);
  switch (which) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, -i, i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

}  // namespace

TEST_CASE("two-level basis is the normalized Pauli set") {
  const auto b = gell_mann_basis(2);
  REQUIRE(b->size() == 4);
  const char order[] = {'X', 'Y', 'Z', 'I'};
  for (int m = 0; m < 4; ++m)
    CHECK((b->elements[m] - kInvSqrt2 * pauli(order[m])).norm() <= 1e-15);
}

TEST_CASE("basis is orthonormal and Hermitian with one identity element") {
  for (int n = 2; n <= 6; ++n) {
    const auto b = gell_mann_basis(n);
    REQUIRE(b->size() == n * n);
    ComplexMatrix gram(n * n, n * n);
    int traceless = 0;
    for (int j = 0; j < n * n; ++j) {
      CHECK((b->elements[j] - b->elements[j].adjoint()).norm() == 0.0);
      if (std::abs(b->elements[j].trace()) <= 1e-14) ++traceless;
      for (int k = 0; k < n * n; ++k) gram(j, k) = (b->elements[j] * b->elements[k]).trace();
    }
    CHECK((gram - ComplexMatrix::Identity(n * n, n * n)).norm() <= 1e-13);
    CHECK(traceless == n * n - 1);
    const ComplexMatrix last = b->elements.back();
    CHECK((last - ComplexMatrix::Identity(n, n) / std::sqrt(double(n))).norm() <= 1e-15);
  }
  CHECK(gell_mann_basis(3)->size() == 9);
  CHECK_THROWS_AS(gell_mann_basis(1), ValidationError);
}

TEST_CASE("basis cache is shared across threads") {
  std::vector<std::shared_ptr<const HermitianBasis>> seen(8);
  std::vector<std::thread> pool;
  for (int t = 0; t < 8; ++t) pool.emplace_back([&, t] { seen[t] = gell_mann_basis(7); });
  for (auto& th : pool) th.join();
  for (const auto& p : seen) CHECK(p.get() == seen.front().get());
}

TEST_CASE("identity Hamiltonian generates no motion") {
  for (int n = 2; n <= 5; ++n) {
    const auto b = gell_mann_basis(n);
    CHECK(adjoint_rep(ComplexMatrix::Identity(n, n), *b).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("adjoint generator reproduces the two-level evolution") {
  const auto b = gell_mann_basis(2);
  const double t = 0.7;
  const ComplexMatrix x = pauli('X');
  const RealMatrix a = adjoint_rep(x, *b);
  // exp(-i X t) = cos t I - i sin t X
  const ComplexMatrix u = std::cos(t) * ComplexMatrix::Identity(2, 2) - Complex(0, std::sin(t)) * x;
  const ComplexVector psi0 = basis_state(2, 1);
  const ComplexMatrix rho0 = psi0 * psi0.adjoint();
  const RealVector expected = test::bloch_of_density(u * rho0 * u.adjoint(), *b);
  const RealVector r0 = state_to_bloch(psi0, *b);
  const RealMatrix at = a * t;
  const RealVector via_expm = at.exp() * r0;
  CHECK((via_expm - expected).norm() <= 1e-13);
  CHECK((propagator(a, t).phi * r0 - expected).norm() <= 1e-12);
}

TEST_CASE("adjoint generator is skew-symmetric and linear") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(5));
    const auto b = gell_mann_basis(n);
    const ComplexMatrix h1 = test::random_hermitian(n, rng);
    const ComplexMatrix h2 = test::random_hermitian(n, rng);
    const RealMatrix a1 = adjoint_rep(h1, *b);
    const RealMatrix a2 = adjoint_rep(h2, *b);
    CHECK((a1 + a1.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    const double alpha = rng.uniform(-2, 2), beta = rng.uniform(-2, 2);
    const RealMatrix combo = adjoint_rep(alpha * h1 + beta * h2, *b);
    CHECK((combo - alpha * a1 - beta * a2).cwiseAbs().maxCoeff() <= 1e-13);
    // The identity direction never moves.
    CHECK(a1.row(n * n - 1).norm() <= 1e-13);
    CHECK(a1.col(n * n - 1).norm() <= 1e-13);
  }
}

TEST_CASE("adjoint generator rejects bad operators") {
  const auto b = gell_mann_basis(3);
  CHECK_THROWS_AS(adjoint_rep(ComplexMatrix::Identity(2, 2), *b), ValidationError);
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h(0, 1) = 1.0;
  CHECK_THROWS_AS(adjoint_rep(h, *b), ValidationError);
}

TEST_CASE("Bloch vectors of pure states") {
  const auto b2 = gell_mann_basis(2);
  SUBCASE("spin 1 of a pair") {
    const RealVector r = state_to_bloch(basis_state(2, 1), *b2);
    RealVector expected(4);
    expected << 0, 0, kInvSqrt2, kInvSqrt2;
    CHECK((r - expected).norm() <= 1e-15);
  }
  SUBCASE("unit norm and trace identity on random states") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
      const int n = 2 + static_cast<int>(rng.below(5));
      const auto b = gell_mann_basis(n);
      const ComplexVector pa = test::random_state(n, rng);
      const ComplexVector pb = test::random_state(n, rng);
      const RealVector ra = state_to_bloch(pa, *b);
      const RealVector rb = state_to_bloch(pb, *b);
      CHECK(ra.norm() == doctest::Approx(1.0).epsilon(1e-13));
      CHECK(ra.dot(rb) == doctest::Approx(std::norm(pa.dot(pb))).epsilon(1e-12));
      CHECK((ra - test::bloch_of_density(pa * pa.adjoint(), *b)).norm() <= 1e-13);
    }
  }
  SUBCASE("orthogonal states") {
    // tr(rho_a rho_b) = 0; the identity components alone contribute 1/N.
    for (int n = 2; n <= 6; ++n) {
      const auto b = gell_mann_basis(n);
      const RealVector ra = state_to_bloch(basis_state(n, 1), *b);
      const RealVector rb = state_to_bloch(basis_state(n, n), *b);
      CHECK(std::abs(ra.dot(rb)) <= 1e-14);
      CHECK(ra(n * n - 1) * rb(n * n - 1) == doctest::Approx(1.0 / n).epsilon(1e-14));
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(state_to_bloch(2.0 * basis_state(2, 1), *b2), ValidationError);
    CHECK_THROWS_AS(state_to_bloch(basis_state(3, 1), *b2), ValidationError);
    CHECK_THROWS_AS(basis_state(3, 0), ValidationError);
    CHECK_THROWS_AS(basis_state(3, 4), ValidationError);
  }
}

TEST_CASE("propagator is a rotation") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance inst = random_instance(2 + static_cast<int>(rng.below(5)), rng.next());
    const auto h = build_hamiltonian(inst.spec, inst.biases);
    const BlochSystem sys = make_bloch_system(inst.spec, h, inst.t_f);
    const int d = static_cast<int>(sys.A.rows());
    const double n = inst.spec.num_spins;
    const SpectralData sd = spectral_decompose(sys.A);
    const RealMatrix phi = propagator(sd, inst.t_f).phi;
    CHECK((propagator(sd, 0.0).phi - RealMatrix::Identity(d, d)).norm() <= 1e-12);
    CHECK(phi.norm() == doctest::Approx(n).epsilon(1e-10));
    CHECK((phi.transpose() * phi - RealMatrix::Identity(d, d)).norm() <= 1e-10);
    CHECK(phi.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    // Group property: Phi(s) Phi(t) = Phi(s + t).
    const double s = 0.37;
    const RealMatrix lhs = propagator(sd, s).phi * phi;
    CHECK((lhs - propagator(sd, s + inst.t_f).phi).norm() <= 1e-10);
    // Independent scaling-and-squaring route.
    CHECK((propagator(sys.A, inst.t_f).phi - phi).norm() <= 1e-10);
  }
  const Instance inst = random_instance(3, 1);
  const auto h = build_hamiltonian(inst.spec, inst.biases);
  CHECK_THROWS_AS(make_bloch_system(inst.spec, h, -1.0), ValidationError);
}

TEST_CASE("fidelity of the propagated state") {
  SUBCASE("rf = Phi r0 is perfect") {
    const Instance inst = random_instance(4, 99);
    const auto h = build_hamiltonian(inst.spec, inst.biases);
    const BlochSystem sys = make_bloch_system(inst.spec, h, inst.t_f);
    const RealMatrix phi = propagator(sys.A, inst.t_f).phi;
    const Fidelity f = fidelity(phi * sys.r0, phi, sys.r0);
    CHECK(f.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(f.error) <= 1e-12);
  }
  SUBCASE("two-spin swap at t = pi/2") {
    const Instance inst = analytic_pst_instance(2);
    const auto h = build_hamiltonian(inst.spec, inst.biases);
    const BlochSystem sys = make_bloch_system(inst.spec, h, inst.t_f);
    const Fidelity f = fidelity(sys.rf, propagator(sys.A, sys.t_f).phi, sys.r0);
    CHECK(f.fidelity == doctest::Approx(1.0).epsilon(1e-13));
    // Oracle: |<2| cos t I - i sin t X |1>|^2 = sin^2 t.
    const double t = 0.9;
    const Fidelity g = fidelity(sys.rf, propagator(sys.A, t).phi, sys.r0);
    CHECK(g.fidelity == doctest::Approx(std::pow(std::sin(t), 2)).epsilon(1e-13));
  }
  SUBCASE("Bloch and Hilbert forms agree on random states") {
    SplitMix64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
      const Instance inst = random_instance(2 + static_cast<int>(rng.below(5)), rng.next());
      const int n = inst.spec.num_spins;
      const auto b = gell_mann_basis(n);
      const ComplexMatrix h = build_hamiltonian(inst.spec, inst.biases).matrix.cast<Complex>();
      const ComplexVector p0 = test::random_state(n, rng);
      const ComplexVector pf = test::random_state(n, rng);
      const RealMatrix phi = propagator(adjoint_rep(h, *b), inst.t_f).phi;
      const double bloch = fidelity(state_to_bloch(pf, *b), phi, state_to_bloch(p0, *b)).fidelity;
      // Oracle: direct complex matrix exponential.
      const ComplexMatrix mt = Complex(0, -inst.t_f) * h;
      const ComplexMatrix u = mt.exp();
      const double hilbert = std::norm(pf.dot(u * p0));
      CHECK(std::abs(bloch - hilbert) <= 1e-10);
      CHECK(std::abs(schrodinger_fidelity(h, p0, pf, inst.t_f) - hilbert) <= 1e-12);
    }
  }
}
