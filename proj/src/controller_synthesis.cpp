#include "spinsens/controller_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "spinsens/bloch_embedding.hpp"
#include "spinsens/parallel.hpp"
#include "spinsens/random.hpp"
#include "spinsens/sensitivity_engine.hpp"
#include "spinsens/spectral.hpp"

namespace spinsens {

void SynthesisConfig::validate() const {
  if (restarts < 1) throw ValidationError("restarts must be at least 1");
  if (!(tf_min > 0.0) || !(tf_max >= tf_min)) throw ValidationError("invalid read-out time range");
  if (!(bias_max >= bias_min)) throw ValidationError("invalid bias range");
  if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
  if (max_iterations < 1 || max_rounds < 1) throw ValidationError("iteration caps must be positive");
}

namespace {

// Per-spec data shared by every evaluation: basis, Bloch states and the Bloch
// images of the bias structures.
struct TransferProblem {
  NetworkSpec spec;
  std::shared_ptr<const HermitianBasis> basis;
  RealVector r0, rf;
  std::vector<RealMatrix> bias_images;

  explicit TransferProblem(const NetworkSpec& s) : spec(s) {
    spec.validate();
    basis = gell_mann_basis(spec.num_spins);
    r0 = state_to_bloch(basis_state(spec.num_spins, spec.input_spin), *basis);
    rf = state_to_bloch(basis_state(spec.num_spins, spec.output_spin), *basis);
    for (const auto& s_n : enumerate_structures(spec)) {
      if (s_n.kind == StructureKind::kBias)
        bias_images.push_back(adjoint_rep(s_n.matrix.cast<Complex>(), *basis));
    }
  }

  SpectralData spectrum(const RealVector& biases) const {
    const SESHamiltonian h = build_hamiltonian(spec, biases);
    return spectral_decompose(adjoint_rep(h.matrix.cast<Complex>(), *basis));
  }
};

// F(t) and dF/dt for fixed biases, O(N^2) per evaluation once the spectrum
// is known: F(t) = sum_k conj(u_k) exp(i lambda_k t) v_k.
class TimeProfile {
 public:
  TimeProfile(const SpectralData& sd, const RealVector& r0, const RealVector& rf)
      : lambda_(sd.lambda),
        uv_((sd.M.adjoint() * rf.cast<Complex>()).conjugate().cwiseProduct(
            sd.M.adjoint() * r0.cast<Complex>())) {}

  double fidelity(double t) const {
    Complex acc = 0.0;
    for (int k = 0; k < lambda_.size(); ++k) acc += uv_(k) * std::exp(Complex(0.0, lambda_(k) * t));
    return acc.real();
  }

  double derivative(double t) const {
    Complex acc = 0.0;
    for (int k = 0; k < lambda_.size(); ++k)
      acc += uv_(k) * Complex(0.0, lambda_(k)) * std::exp(Complex(0.0, lambda_(k) * t));
    return acc.real();
  }

 private:
  RealVector lambda_;
  ComplexVector uv_;
};

ObjectiveValue objective(const TransferProblem& p, const RealVector& biases, double t_f) {
  const SpectralData sd = p.spectrum(biases);
  ObjectiveValue out;
  out.fidelity = fidelity(p.rf, exp_from_spectral(sd, t_f), p.r0).fidelity;
  out.gradient.resize(biases.size());
  for (int n = 0; n < biases.size(); ++n)
    out.gradient(n) = -eigenbasis_sensitivity(sd, p.bias_images[n], p.r0, p.rf, t_f, 1.0);
  return out;
}

double fidelity_only(const TransferProblem& p, const RealVector& biases, double t_f) {
  return TimeProfile(p.spectrum(biases), p.r0, p.rf).fidelity(t_f);
}

RealVector project_box(RealVector x, double lo, double hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Ascent direction components that point out of the box are dropped.
RealVector projected_gradient(const RealVector& x, const RealVector& g, double lo, double hi) {
  RealVector pg = g;
  for (int i = 0; i < x.size(); ++i) {
    if ((x(i) <= lo && g(i) < 0.0) || (x(i) >= hi && g(i) > 0.0)) pg(i) = 0.0;
  }
  return pg;
}

struct BiasStep {
  RealVector biases;
  ObjectiveValue value;
  int iterations = 0;
};

// Projected BFGS on F (maximization) at fixed t_f.
BiasStep ascend_biases(const TransferProblem& p, RealVector x, double t_f,
                       const SynthesisConfig& cfg) {
  const double lo = cfg.bias_min, hi = cfg.bias_max;
  const int n = static_cast<int>(x.size());
  ObjectiveValue cur = objective(p, x, t_f);
  RealMatrix inv_hessian = RealMatrix::Identity(n, n);
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    const RealVector pg = projected_gradient(x, cur.gradient, lo, hi);
    if (pg.norm() <= cfg.tolerance) break;

    RealVector dir = inv_hessian * pg;
    for (int i = 0; i < n; ++i)
      if (pg(i) == 0.0) dir(i) = 0.0;
    if (dir.dot(pg) <= 0.0) {
      inv_hessian.setIdentity();
      dir = pg;
    }
    double step = it == 0 ? std::min(1.0, 1.0 / pg.norm()) : 1.0;
    RealVector trial;
    double trial_f = -std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls, step *= 0.5) {
      trial = project_box(x + step * dir, lo, hi);
      trial_f = fidelity_only(p, trial, t_f);
      if (trial_f >= cur.fidelity + 1e-4 * cur.gradient.dot(trial - x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted || (trial - x).norm() == 0.0) break;

    ObjectiveValue next = objective(p, trial, t_f);
    const RealVector s = trial - x;
    // Curvature of -F.
    const RealVector y = cur.gradient - next.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const RealMatrix id = RealMatrix::Identity(n, n);
      inv_hessian = (id - rho * s * y.transpose()) * inv_hessian * (id - rho * y * s.transpose()) +
                    rho * s * s.transpose();
    }
    x = trial;
    cur = std::move(next);
  }
  return {std::move(x), std::move(cur), it};
}

// Golden-section refinement of F(t) around the best point of a coarse scan.
double search_time(const TimeProfile& profile, double t0, const SynthesisConfig& cfg) {
  const double half_width = 2.0;
  const double a0 = std::max(cfg.tf_min, t0 - half_width);
  const double b0 = std::min(cfg.tf_max, t0 + half_width);
  const int samples = 33;
  double best_t = t0, best_f = profile.fidelity(t0);
  const double h = (b0 - a0) / (samples - 1);
  for (int i = 0; i < samples && h > 0.0; ++i) {
    const double t = a0 + i * h;
    const double f = profile.fidelity(t);
    if (f > best_f) {
      best_f = f;
      best_t = t;
    }
  }
  double a = std::max(a0, best_t - h), b = std::min(b0, best_t + h);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = profile.fidelity(c), fd = profile.fidelity(d);
  while (b - a > 1e-12 * std::max(1.0, b)) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = profile.fidelity(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = profile.fidelity(d);
    }
  }
  const double t = 0.5 * (a + b);
  return profile.fidelity(t) > best_f ? t : best_t;
}

// dF/dt pointing out of [tf_min, tf_max] does not count against stationarity.
double projected_time_derivative(double t, double dfdt, const SynthesisConfig& cfg) {
  if ((t <= cfg.tf_min && dfdt < 0.0) || (t >= cfg.tf_max && dfdt > 0.0)) return 0.0;
  return dfdt;
}

}  // namespace

ObjectiveValue fidelity_objective(const NetworkSpec& spec, const RealVector& biases, double t_f) {
  return objective(TransferProblem(spec), biases, t_f);
}

double evaluate_fidelity(const NetworkSpec& spec, const RealVector& biases, double t_f) {
  const TransferProblem p(spec);
  return fidelity(p.rf, exp_from_spectral(p.spectrum(biases), t_f), p.r0).fidelity;
}

OptimizeResult local_optimize(const NetworkSpec& spec, const RealVector& initial_biases,
                              double initial_tf, const SynthesisConfig& config) {
  config.validate();
  const TransferProblem p(spec);
  if (initial_biases.size() != spec.num_spins) throw ValidationError("bias vector has wrong length");
  if ((initial_biases.array() < config.bias_min).any() ||
      (initial_biases.array() > config.bias_max).any())
    throw ValidationError("initial biases outside the configured range");
  if (initial_tf < config.tf_min || initial_tf > config.tf_max)
    throw ValidationError("initial read-out time outside the configured range");

  RealVector x = initial_biases;
  double t = initial_tf;
  OptimizeResult result;
  result.status = OptimizeStatus::kMaxIter;
  for (int round = 0; round < config.max_rounds; ++round) {
    BiasStep step = ascend_biases(p, x, t, config);
    x = step.biases;
    result.iterations += step.iterations;

    const TimeProfile profile(p.spectrum(x), p.r0, p.rf);
    const double gnorm = projected_gradient(x, step.value.gradient, config.bias_min,
                                            config.bias_max).norm();
    const double dt = projected_time_derivative(t, profile.derivative(t), config);
    if (gnorm <= config.tolerance && std::abs(dt) <= config.tolerance) {
      result.status = OptimizeStatus::kConverged;
      break;
    }
    if (std::abs(dt) > config.tolerance) t = search_time(profile, t, config);
  }

  Controller& c = result.controller;
  c.biases = x;
  c.t_f = t;
  c.fidelity = evaluate_fidelity(spec, x, t);
  c.spec = spec;
  return result;
}

std::vector<Controller> synthesize_ensemble(const NetworkSpec& spec, const SynthesisConfig& config,
                                            int threads) {
  config.validate();
  spec.validate();
  std::vector<Controller> runs(config.restarts);
  std::vector<char> ok(config.restarts, 0);
  parallel_for(static_cast<std::size_t>(config.restarts), threads, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(config.seed, i);
    SplitMix64 rng(seed);
    RealVector biases(spec.num_spins);
    for (int k = 0; k < spec.num_spins; ++k) biases(k) = rng.uniform(config.bias_min, config.bias_max);
    const double tf = rng.uniform(config.tf_min, config.tf_max);
    try {
      OptimizeResult r = local_optimize(spec, biases, tf, config);
      if (!std::isfinite(r.controller.fidelity)) return;
      r.controller.seed = seed;
      runs[i] = std::move(r.controller);
      ok[i] = 1;
    } catch (const NumericalError&) {
      // A diverged restart is dropped.
    }
  });

  std::vector<Controller> kept;
  for (int i = 0; i < config.restarts; ++i)
    if (ok[i]) kept.push_back(std::move(runs[i]));
  std::stable_sort(kept.begin(), kept.end(), [](const Controller& a, const Controller& b) {
    if (a.fidelity != b.fidelity) return a.fidelity > b.fidelity;
    return a.seed < b.seed;
  });

  std::vector<Controller> unique;
  for (auto& c : kept) {
    const bool duplicate = std::any_of(unique.begin(), unique.end(), [&](const Controller& u) {
      return (u.biases - c.biases).norm() < 1e-6 && std::abs(u.t_f - c.t_f) < 1e-6;
    });
    if (!duplicate) unique.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < unique.size(); ++i) unique[i].index = static_cast<int>(i) + 1;
  return unique;
}

}  // namespace spinsens
