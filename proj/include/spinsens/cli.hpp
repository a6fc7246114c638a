#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "spinsens/controller_synthesis.hpp"
#include "spinsens/network_model.hpp"
#include "spinsens/verification.hpp"

namespace spinsens::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kInvariant = 2, kIo = 3 };

struct SynthOptions {
  NetworkSpec spec;
  SynthesisConfig config;
  std::string output = "controllers.json";
  int threads = 0;
};

struct AnalyzeOptions {
  std::string controllers_path;
  // Falls back to the spec recorded in the controller file's manifest.
  std::optional<NetworkSpec> spec;
  std::string records_path = "records.csv";
  std::string summaries_path = "summaries.csv";
  double pst_tol = 1e-12;
  int threads = 0;
};

// Each returns a process exit code and writes data files plus manifests.
int run_synth(const SynthOptions& options, std::ostream& log);
int run_analyze(const AnalyzeOptions& options, std::ostream& log);
int run_verify(const VerifyOptions& options, std::ostream& out);

// Full command-line entry point: synth | analyze | verify.
int main(int argc, char** argv);

}  // namespace spinsens::cli
