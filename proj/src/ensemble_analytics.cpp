#include "spinsens/ensemble_analytics.hpp"

#include <algorithm>
#include <cmath>

#include "spinsens/bloch_embedding.hpp"
#include "spinsens/parallel.hpp"
#include "spinsens/sensitivity_engine.hpp"

namespace spinsens {

namespace {

void require_pairs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("correlation inputs differ in length");
  if (x.size() < 2) throw ValidationError("correlation needs at least two samples");
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  require_pairs(x, y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> kendall(std::span<const double> x, std::span<const double> y) {
  require_pairs(x, y);
  // tau-b = (C - D) / sqrt((n0 - n1)(n0 - n2)), counted pairwise.
  long long concordant_minus_discordant = 0;
  long long untied_x = 0, untied_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const int sx = sign(x[i] - x[j]);
      const int sy = sign(y[i] - y[j]);
      concordant_minus_discordant += sx * sy;
      untied_x += sx != 0;
      untied_y += sy != 0;
    }
  }
  if (untied_x == 0 || untied_y == 0) return std::nullopt;
  return static_cast<double>(concordant_minus_discordant) /
         std::sqrt(static_cast<double>(untied_x) * static_cast<double>(untied_y));
}

std::vector<GeometryRecord> evaluate_controller(const Controller& c,
                                                const std::vector<UncertaintyStructure>& structures,
                                                const std::vector<RealMatrix>& structure_images,
                                                double pst_tol) {
  const SESHamiltonian h = build_hamiltonian(c.spec, c.biases);
  const BlochSystem sys = make_bloch_system(c.spec, h, c.t_f);
  const SpectralData sd = spectral_decompose(sys.A);
  const RealMatrix phi = propagator(sd, c.t_f).phi;
  std::vector<GeometryRecord> out;
  out.reserve(structures.size());
  for (std::size_t s = 0; s < structures.size(); ++s) {
    const SensitivityOperator k = sensitivity_operator(sd, structure_images[s], c.t_f);
    const double f_n = scaling_factor(structures[s], c.biases);
    const double zeta = differential_sensitivity(sys, k, f_n);
    GeometryRecord rec = evaluate_geometry(sys, phi, k, zeta, f_n, pst_tol);
    rec.controller_index = c.index;
    rec.structure_index = structures[s].index;
    out.push_back(rec);
  }
  return out;
}

CorrelationSummary summarize(int structure_index, const std::vector<GeometryRecord>& records) {
  CorrelationSummary s;
  s.structure_index = structure_index;
  std::vector<double> log_e, log_zeta, e_rank, sin_rank;
  double sum_k = 0.0;
  for (const auto& r : records) {
    if (r.structure_index != structure_index) continue;
    ++s.count;
    sum_k += r.norm_K;
    // PST records have zeta = 0 and sin phi = 0 up to roundoff; treat as exact zeros.
    if (r.zeta != 0.0 && r.e > 0.0 && !r.pst) {
      log_e.push_back(std::log(r.e));
      log_zeta.push_back(std::log(std::abs(r.zeta)));
    } else {
      ++s.excluded_from_pearson;
    }
    if (!r.zero_fidelity && !r.undefined_angles && !r.pst) {
      e_rank.push_back(r.e);
      sin_rank.push_back(r.sin_phi);
    } else {
      ++s.excluded_from_kendall;
    }
  }
  if (s.count > 0) s.mean_norm_K = sum_k / s.count;
  if (s.count > 1) {
    double ss = 0.0;
    for (const auto& r : records)
      if (r.structure_index == structure_index) ss += (r.norm_K - s.mean_norm_K) * (r.norm_K - s.mean_norm_K);
    s.var_norm_K = ss / (s.count - 1);
  }
  if (log_e.size() >= 2) s.pearson_r_loglog = pearson(log_e, log_zeta);
  if (e_rank.size() >= 2) s.kendall_tau = kendall(e_rank, sin_rank);
  return s;
}

Analysis analyze(const std::vector<Controller>& controllers,
                 const std::vector<UncertaintyStructure>& structures,
                 const AnalysisOptions& options) {
  if (controllers.empty()) throw ValidationError("cannot analyze an empty ensemble");
  const NetworkSpec& spec = controllers.front().spec;
  const auto basis = gell_mann_basis(spec.num_spins);
  std::vector<RealMatrix> images;
  images.reserve(structures.size());
  for (const auto& s : structures) images.push_back(adjoint_rep(s.matrix.cast<Complex>(), *basis));

  std::vector<std::vector<GeometryRecord>> per_controller(controllers.size());
  std::vector<char> failed(controllers.size(), 0);
  parallel_for(controllers.size(), options.threads, [&](std::size_t i) {
    try {
      per_controller[i] = evaluate_controller(controllers[i], structures, images, options.pst_tol);
    } catch (const NumericalError&) {
      failed[i] = 1;
    }
  });

  Analysis out;
  for (std::size_t i = 0; i < controllers.size(); ++i) {
    if (failed[i]) {
      out.excluded_records += static_cast<int>(structures.size());
      continue;
    }
    for (auto& r : per_controller[i]) {
      const bool finite = std::isfinite(r.zeta) && std::isfinite(r.F) && std::isfinite(r.norm_Rs);
      if (finite) {
        out.records.push_back(r);
      } else {
        ++out.excluded_records;
      }
    }
  }
  for (const auto& s : structures) out.summaries.push_back(summarize(s.index, out.records));
  return out;
}

}  // namespace spinsens
