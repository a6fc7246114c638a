#include "spinsens/bloch_embedding.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>

namespace spinsens {

namespace {

HermitianBasis build_gell_mann(int n) {
  HermitianBasis basis;
  basis.dim = n;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      ComplexMatrix s = ComplexMatrix::Zero(n, n);
      s(j, k) = s(k, j) = inv_sqrt2;
      basis.elements.push_back(std::move(s));
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      ComplexMatrix s = ComplexMatrix::Zero(n, n);
      s(j, k) = Complex(0.0, -inv_sqrt2);
      s(k, j) = Complex(0.0, inv_sqrt2);
      basis.elements.push_back(std::move(s));
    }
  }
  for (int l = 1; l < n; ++l) {
    ComplexMatrix s = ComplexMatrix::Zero(n, n);
    const double c = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int j = 0; j < l; ++j) s(j, j) = c;
    s(l, l) = -l * c;
    basis.elements.push_back(std::move(s));
  }
  basis.elements.push_back(ComplexMatrix::Identity(n, n) / std::sqrt(static_cast<double>(n)));
  return basis;
}

// Column m holds vec(sigma_m).
ComplexMatrix stacked_basis(const HermitianBasis& basis) {
  const int n = basis.dim;
  ComplexMatrix b(n * n, basis.size());
  for (int m = 0; m < basis.size(); ++m)
    b.col(m) = Eigen::Map<const ComplexVector>(basis.elements[m].data(), n * n);
  return b;
}

void require_hermitian(const ComplexMatrix& h, int n) {
  if (h.rows() != n || h.cols() != n)
    throw ValidationError("operator dimension does not match the basis");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ValidationError("operator is not Hermitian");
}

}  // namespace

std::shared_ptr<const HermitianBasis> gell_mann_basis(int n) {
  if (n < 2) throw ValidationError("Gell-Mann basis needs N >= 2");
  static std::shared_mutex mutex;
  static std::map<int, std::shared_ptr<const HermitianBasis>> cache;
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const HermitianBasis>(build_gell_mann(n));
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.emplace(n, std::move(built));
  return it->second;
}

RealMatrix adjoint_rep(const ComplexMatrix& h, const HermitianBasis& basis,
                       AdjointConvention convention) {
  const int n = basis.dim;
  require_hermitian(h, n);
  const Complex minus_i(0.0, -1.0);
  const int d = basis.size();
  // Column l: coordinates of -i[H, sigma_l], so that A r = coords of -i[H, rho].
  ComplexMatrix commutators(n * n, d);
  for (int l = 0; l < d; ++l) {
    const ComplexMatrix& s = basis.elements[l];
    ComplexMatrix c = minus_i * (h * s - s * h);
    commutators.col(l) = Eigen::Map<const ComplexVector>(c.data(), n * n);
  }
  RealMatrix a = (stacked_basis(basis).adjoint() * commutators).real();
  if (convention == AdjointConvention::kTransposed) a.transposeInPlace();
  return a;
}

RealVector state_to_bloch(const ComplexVector& psi, const HermitianBasis& basis) {
  if (psi.size() != basis.dim) throw ValidationError("state dimension does not match the basis");
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw ValidationError("state vector is not normalized");
  RealVector r(basis.size());
  for (int m = 0; m < basis.size(); ++m)
    r(m) = psi.dot(basis.elements[m] * psi).real();
  return r;
}

ComplexVector basis_state(int n, int spin) {
  if (spin < 1 || spin > n) throw ValidationError("spin index out of range");
  ComplexVector psi = ComplexVector::Zero(n);
  psi(spin - 1) = 1.0;
  return psi;
}

BlochSystem make_bloch_system(const NetworkSpec& spec, const SESHamiltonian& h, double t_f,
                              AdjointConvention convention) {
  spec.validate();
  if (!(t_f >= 0.0)) throw ValidationError("read-out time must be non-negative");
  BlochSystem sys;
  sys.basis = gell_mann_basis(spec.num_spins);
  sys.A = adjoint_rep(h.matrix.cast<Complex>(), *sys.basis, convention);
  sys.r0 = state_to_bloch(basis_state(spec.num_spins, spec.input_spin), *sys.basis);
  sys.rf = state_to_bloch(basis_state(spec.num_spins, spec.output_spin), *sys.basis);
  sys.t_f = t_f;
  return sys;
}

Propagator propagator(const SpectralData& sd, double t_f) { return {exp_from_spectral(sd, t_f)}; }

Propagator propagator(const RealMatrix& a, double t_f) {
  return propagator(spectral_decompose(a), t_f);
}

Fidelity fidelity(const RealVector& rf, const RealMatrix& phi, const RealVector& r0) {
  const double f = rf.dot(phi * r0);
  return {f, 1.0 - f};
}

double schrodinger_fidelity(const ComplexMatrix& h, const ComplexVector& psi0,
                            const ComplexVector& psif, double t) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
  const ComplexMatrix& v = es.eigenvectors();
  const ComplexVector in = v.adjoint() * psi0;
  const ComplexVector out = v.adjoint() * psif;
  Complex amp = 0.0;
  for (int k = 0; k < in.size(); ++k)
    amp += std::conj(out(k)) * std::exp(Complex(0.0, -es.eigenvalues()(k) * t)) * in(k);
  return std::norm(amp);
}

}  // namespace spinsens
