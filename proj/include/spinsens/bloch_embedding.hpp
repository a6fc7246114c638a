#pragma once

#include <memory>
#include <vector>

#include "spinsens/network_model.hpp"
#include "spinsens/spectral.hpp"
#include "spinsens/types.hpp"

namespace spinsens {

// Orthonormal basis of the N x N Hermitian matrices under tr(a b).
// Order: symmetric pairs (j<k ascending), antisymmetric pairs, traceless
// diagonals, identity/sqrt(N) last.
struct HermitianBasis {
  int dim = 0;
  std::vector<ComplexMatrix> elements;

  int size() const { return static_cast<int>(elements.size()); }
};

// Generalized Gell-Mann basis, memoized per N. Thread-safe.
std::shared_ptr<const HermitianBasis> gell_mann_basis(int n);

enum class AdjointConvention {
  // A_{ml} = tr(-i H [sigma_l, sigma_m]); reproduces rho' = -i[H, rho].
  kSchrodinger,
  // Transposed index order. Only exists so verification can show the
  // cross-formulation check rejects it.
  kTransposed,
};

// Real N^2 x N^2 generator of rho' = -i[H, rho] in Bloch coordinates.
RealMatrix adjoint_rep(const ComplexMatrix& h, const HermitianBasis& basis,
                       AdjointConvention convention = AdjointConvention::kSchrodinger);

RealVector state_to_bloch(const ComplexVector& psi, const HermitianBasis& basis);

// |k> for 1-based spin k.
ComplexVector basis_state(int n, int spin);

struct BlochSystem {
  RealMatrix A;
  RealVector r0;
  RealVector rf;
  std::shared_ptr<const HermitianBasis> basis;
  double t_f = 0.0;
};

BlochSystem make_bloch_system(const NetworkSpec& spec, const SESHamiltonian& h, double t_f,
                              AdjointConvention convention = AdjointConvention::kSchrodinger);

struct Propagator {
  RealMatrix phi;
};

Propagator propagator(const RealMatrix& a, double t_f);
Propagator propagator(const SpectralData& sd, double t_f);

struct Fidelity {
  double fidelity = 0.0;
  double error = 1.0;
};

Fidelity fidelity(const RealVector& rf, const RealMatrix& phi, const RealVector& r0);

// |<psi_f| exp(-i H t) |psi_0>|^2 computed directly in Hilbert space.
double schrodinger_fidelity(const ComplexMatrix& h, const ComplexVector& psi0,
                            const ComplexVector& psif, double t);

}  // namespace spinsens
