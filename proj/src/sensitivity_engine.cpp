#include "spinsens/sensitivity_engine.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace spinsens {

namespace {

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

}  // namespace

double degeneracy_tolerance(const SpectralData& sd) { return 1e-10 * sd.max_abs_lambda(); }

ComplexMatrix hadamard_core(const ComplexMatrix& z, const RealVector& lambda, double t_f,
                            double degeneracy_tol) {
  const int d = static_cast<int>(lambda.size());
  if (z.rows() != d || z.cols() != d) throw ValidationError("Z and spectrum sizes differ");
  if (t_f == 0.0) return z;
  ComplexMatrix q(d, d);
  for (int l = 0; l < d; ++l) {
    for (int k = 0; k < d; ++k) {
      const double dl = lambda(k) - lambda(l);
      Complex x;
      if (std::abs(dl) <= degeneracy_tol) {
        x = std::exp(Complex(0.0, lambda(k) * t_f));
      } else {
        x = std::exp(Complex(0.0, 0.5 * (lambda(k) + lambda(l)) * t_f)) * sinc(0.5 * dl * t_f);
      }
      q(k, l) = z(k, l) * x;
    }
  }
  return q;
}

SensitivityOperator sensitivity_operator(const SpectralData& sd, const RealMatrix& s_bloch,
                                         double t_f) {
  const int d = static_cast<int>(sd.lambda.size());
  if (s_bloch.rows() != d || s_bloch.cols() != d)
    throw ValidationError("structure image and spectrum sizes differ");
  const ComplexMatrix z = sd.M.adjoint() * s_bloch.cast<Complex>() * sd.M;
  SensitivityOperator op;
  op.Q = hadamard_core(z, sd.lambda, t_f, degeneracy_tolerance(sd));
  const ComplexMatrix k = sd.M * op.Q * sd.M.adjoint();
  const double residue = k.imag().cwiseAbs().maxCoeff();
  if (residue > 1e-9 * std::max(1.0, s_bloch.norm()))
    throw NumericalError("sensitivity operator is not real; check the adjoint convention");
  op.K = k.real();
  op.norm_K = op.Q.norm();
  return op;
}

double differential_sensitivity(const BlochSystem& sys, const SensitivityOperator& k, double f_n) {
  if (f_n < 0.0) throw ValidationError("scaling factor must be non-negative");
  return -sys.t_f * f_n * sys.rf.dot(k.K * sys.r0);
}

double eigenbasis_sensitivity(const SpectralData& sd, const RealMatrix& s_bloch,
                              const RealVector& r0, const RealVector& rf, double t_f, double f_n) {
  const ComplexMatrix z = sd.M.adjoint() * s_bloch.cast<Complex>() * sd.M;
  const ComplexMatrix q = hadamard_core(z, sd.lambda, t_f, degeneracy_tolerance(sd));
  const ComplexVector u = sd.M.adjoint() * rf.cast<Complex>();
  const ComplexVector v = sd.M.adjoint() * r0.cast<Complex>();
  const Complex c = u.dot(q * v);  // u^dagger Q v
  return -t_f * f_n * c.real();
}

QuadratureRule gauss_legendre_unit(int n) {
  if (n < 1) throw ValidationError("quadrature needs at least one node");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence for P_n(x) and P_{n-1}(x).
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1, 1] -> [0, 1].
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

QuadratureOracle::QuadratureOracle(const RealMatrix& a, double t_f, const RealVector& r0,
                                   const RealVector& rf, int nodes)
    : t_f_(t_f) {
  if (nodes < 16) throw ValidationError("quadrature oracle needs at least 16 nodes");
  const QuadratureRule rule = gauss_legendre_unit(nodes);
  weights_ = rule.weights;
  for (int i = 0; i < nodes; ++i) {
    const double s = rule.nodes[i];
    forward_.push_back((a * (t_f * s)).exp() * r0);
    backward_.push_back((a * (t_f * (1.0 - s))).exp().transpose() * rf);
  }
}

double QuadratureOracle::zeta(const RealMatrix& s_bloch, double f_n) const {
  if (t_f_ == 0.0 || f_n == 0.0) return 0.0;
  double integral = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i)
    integral += weights_[i] * backward_[i].dot(s_bloch * forward_[i]);
  return -t_f_ * f_n * integral;
}

double quadrature_oracle(const RealMatrix& a, const RealMatrix& s_bloch, double t_f,
                         const RealVector& r0, const RealVector& rf, double f_n, int nodes) {
  if (nodes < 16) throw ValidationError("quadrature oracle needs at least 16 nodes");
  if (t_f == 0.0 || f_n == 0.0) return 0.0;
  return QuadratureOracle(a, t_f, r0, rf, nodes).zeta(s_bloch, f_n);
}

double fd_oracle(const NetworkSpec& spec, const SESHamiltonian& h, const UncertaintyStructure& s,
                 double t_f, double step) {
  const double mag = std::abs(step);
  if (mag < 1e-7 || mag > 1e-4) throw ValidationError("finite-difference step outside [1e-7, 1e-4]");
  const ComplexVector psi0 = basis_state(spec.num_spins, spec.input_spin);
  const ComplexVector psif = basis_state(spec.num_spins, spec.output_spin);
  auto error_at = [&](double delta) {
    const SESHamiltonian ht = perturb(h, s, delta);
    return 1.0 - schrodinger_fidelity(ht.matrix.cast<Complex>(), psi0, psif, t_f);
  };
  return (error_at(step) - error_at(-step)) / (2.0 * step);
}

}  // namespace spinsens
