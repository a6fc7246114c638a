#pragma once

#include <optional>
#include <span>
#include <vector>

#include "spinsens/controller_synthesis.hpp"
#include "spinsens/geometry_model.hpp"
#include "spinsens/network_model.hpp"

namespace spinsens {

// Sample Pearson correlation. nullopt when either input has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

// Kendall tau-b over all pairs. nullopt when either input is entirely tied.
std::optional<double> kendall(std::span<const double> x, std::span<const double> y);

struct CorrelationSummary {
  int structure_index = 0;
  std::optional<double> pearson_r_loglog;  // log e vs log |zeta|
  std::optional<double> kendall_tau;       // e vs sin phi
  int count = 0;                           // records for this structure
  double mean_norm_K = 0.0;
  double var_norm_K = 0.0;  // sample variance
  int excluded_from_pearson = 0;  // zeta == 0, e <= 0 or PST
  int excluded_from_kendall = 0;  // zero fidelity, undefined angles or PST
};

struct AnalysisOptions {
  int threads = 1;
  double pst_tol = 1e-12;
};

struct Analysis {
  // Ordered by (controller position, structure index).
  std::vector<GeometryRecord> records;
  std::vector<CorrelationSummary> summaries;
  // Records that could not be evaluated (non-finite values).
  int excluded_records = 0;
};

// Full geometry record for every (controller, structure) pair. One spectral
// decomposition per controller is shared by all its structures.
std::vector<GeometryRecord> evaluate_controller(const Controller& c,
                                                const std::vector<UncertaintyStructure>& structures,
                                                const std::vector<RealMatrix>& structure_images,
                                                double pst_tol);

Analysis analyze(const std::vector<Controller>& controllers,
                 const std::vector<UncertaintyStructure>& structures,
                 const AnalysisOptions& options = {});

CorrelationSummary summarize(int structure_index, const std::vector<GeometryRecord>& records);

}  // namespace spinsens
