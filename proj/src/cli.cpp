#include "spinsens/cli.hpp"

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "spinsens/ensemble_analytics.hpp"
#include "spinsens/io.hpp"
#include "spinsens/parallel.hpp"

namespace spinsens::cli {

using nlohmann::json;

namespace {

json synthesis_to_json(const SynthesisConfig& c) {
  return json{{"restarts", c.restarts},     {"tf_range", {c.tf_min, c.tf_max}},
              {"bias_range", {c.bias_min, c.bias_max}}, {"tolerance", c.tolerance},
              {"max_iterations", c.max_iterations},     {"max_rounds", c.max_rounds},
              {"seed", c.seed}};
}

// Maps library exceptions onto exit codes.
template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    log << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return kIo;
  } catch (const NumericalError& e) {
    log << "error: " << e.what() << "\n";
    return kInvariant;
  }
}

}  // namespace

int run_synth(const SynthOptions& options, std::ostream& log) {
  return guarded(log, [&] {
    options.spec.validate();
    options.config.validate();
    RunManifest manifest;
    manifest.command = "synth";
    manifest.started_at = utc_timestamp();
    manifest.master_seed = options.config.seed;
    manifest.config = {{"spec", spec_to_json(options.spec)},
                       {"synthesis", synthesis_to_json(options.config)}};

    const auto controllers =
        synthesize_ensemble(options.spec, options.config, resolve_threads(options.threads));
    if (controllers.empty()) throw ValidationError("every restart diverged; check the configuration");

    write_file(options.output, controllers_to_json(controllers).dump(2) + "\n");
    manifest.outputs = {options.output};
    manifest.stats = {{"controllers", controllers.size()},
                      {"best_fidelity", controllers.front().fidelity},
                      {"worst_fidelity", controllers.back().fidelity}};
    manifest.finished_at = utc_timestamp();
    write_manifest(manifest, options.output);
    log << "wrote " << controllers.size() << " controllers to " << options.output << " (best e = "
        << 1.0 - controllers.front().fidelity << ")\n";
    return kOk;
  });
}

int run_analyze(const AnalyzeOptions& options, std::ostream& log) {
  return guarded(log, [&] {
    NetworkSpec spec;
    if (options.spec) {
      spec = *options.spec;
    } else {
      const std::string sidecar = manifest_path(options.controllers_path);
      if (!std::filesystem::exists(sidecar))
        throw ValidationError("no network spec given and no manifest at '" + sidecar + "'");
      spec = spec_from_json(read_json_file(sidecar).at("config").at("spec"));
    }
    spec.validate();

    const std::string raw = read_file(options.controllers_path);
    json parsed;
    try {
      parsed = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw IoError("'" + options.controllers_path + "' is not valid JSON: " + e.what());
    }
    const auto controllers = controllers_from_json(parsed, spec);
    if (controllers.empty()) throw ValidationError("controller file is empty");

    RunManifest manifest;
    manifest.command = "analyze";
    manifest.started_at = utc_timestamp();
    manifest.config = {{"spec", spec_to_json(spec)},
                       {"controllers_digest", config_hash(json(raw))},
                       {"pst_tol", options.pst_tol}};
    manifest.inputs = {options.controllers_path};

    AnalysisOptions ao;
    ao.threads = resolve_threads(options.threads);
    ao.pst_tol = options.pst_tol;
    const Analysis analysis = analyze(controllers, enumerate_structures(spec), ao);

    write_file(options.records_path, records_csv(analysis.records));
    write_file(options.summaries_path, summaries_csv(analysis.summaries));
    manifest.outputs = {options.records_path, options.summaries_path};
    json exclusions = json::array();
    for (const auto& s : analysis.summaries)
      exclusions.push_back({{"structure_index", s.structure_index},
                            {"excluded_from_pearson", s.excluded_from_pearson},
                            {"excluded_from_kendall", s.excluded_from_kendall}});
    manifest.stats = {{"records", analysis.records.size()},
                      {"excluded_records", analysis.excluded_records},
                      {"exclusions", exclusions}};
    manifest.finished_at = utc_timestamp();
    write_manifest(manifest, options.records_path);
    write_manifest(manifest, options.summaries_path);
    log << "wrote " << analysis.records.size() << " records (" << analysis.excluded_records
        << " excluded) to " << options.records_path << "\n";
    return kOk;
  });
}

int run_verify(const VerifyOptions& options, std::ostream& out) {
  return guarded(out, [&] {
    const auto start = std::chrono::steady_clock::now();
    const auto results = run_verification(options);
    bool ok = true;
    for (const auto& r : results) {
      const char* tag = r.passed ? "PASS" : (r.warning_only ? "WARN" : "FAIL");
      out << "[" << tag << "] " << std::left << std::setw(66) << r.name << " " << r.detail << "\n";
      if (!r.passed && !r.warning_only) ok = false;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << (ok ? "all checks passed" : "invariant violations found") << " in " << std::fixed
        << std::setprecision(1) << secs << " s\n";
    return ok ? kOk : kInvariant;
  });
}

namespace {

// Network flags shared by synth and analyze.
struct NetworkFlags {
  std::string spec_path;
  int n = 0;
  std::string topology = "ring";
  double j = 1.0;
  double kappa = 0.0;
  int in = 0;
  int out = 0;

  void attach(CLI::App* app) {
    app->add_option("--spec", spec_path, "Network spec JSON file");
    app->add_option("--n", n, "Number of spins");
    app->add_option("--topology", topology, "ring or chain");
    app->add_option("--j", j, "Uniform coupling J");
    app->add_option("--kappa", kappa, "ZZ anisotropy (must be 0)");
    app->add_option("--in", in, "Input spin (1-based)");
    app->add_option("--out", out, "Output spin (1-based)");
  }

  bool given() const { return !spec_path.empty() || n != 0; }

  NetworkSpec resolve() const {
    if (!spec_path.empty()) return spec_from_json(read_json_file(spec_path));
    NetworkSpec spec;
    spec.num_spins = n;
    spec.topology = topology_from_string(topology);
    spec.coupling = j;
    spec.kappa = kappa;
    spec.input_spin = in;
    spec.output_spin = out;
    spec.validate();
    return spec;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differential sensitivity analysis for spin-network state transfer"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: SPINSENS_THREADS or all cores)");

  NetworkFlags synth_net;
  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize a controller ensemble");
  synth_net.attach(synth_cmd);
  synth_cmd->add_option("--restarts", synth.config.restarts, "Independent restarts");
  synth_cmd->add_option("--seed", synth.config.seed, "Master seed");
  synth_cmd->add_option("--tf-min", synth.config.tf_min);
  synth_cmd->add_option("--tf-max", synth.config.tf_max);
  synth_cmd->add_option("--bias-min", synth.config.bias_min);
  synth_cmd->add_option("--bias-max", synth.config.bias_max);
  synth_cmd->add_option("--tol", synth.config.tolerance, "Stationarity tolerance");
  synth_cmd->add_option("--max-iter", synth.config.max_iterations, "Quasi-Newton steps per round");
  synth_cmd->add_option("--max-rounds", synth.config.max_rounds, "Bias/time alternations");
  synth_cmd->add_option("-o,--output", synth.output, "Controller JSON output");
  synth_cmd->add_option("--threads", threads, "Worker threads");

  NetworkFlags analyze_net;
  AnalyzeOptions analyze_opts;
  auto* analyze_cmd = app.add_subcommand("analyze", "Sensitivity and geometry analysis");
  analyze_net.attach(analyze_cmd);
  analyze_cmd->add_option("--controllers", analyze_opts.controllers_path, "Controller JSON")
      ->required();
  analyze_cmd->add_option("--records", analyze_opts.records_path, "Records CSV output");
  analyze_cmd->add_option("--summaries", analyze_opts.summaries_path, "Summaries CSV output");
  analyze_cmd->add_option("--pst-tol", analyze_opts.pst_tol, "Tolerance on ||rf - Phi r0||");
  analyze_cmd->add_option("--threads", threads, "Worker threads");

  VerifyOptions verify;
  int verify_n = 0;
  bool inject = false;
  auto* verify_cmd = app.add_subcommand("verify", "Run the invariant suite");
  verify_cmd->add_option("--seed", verify.seed, "Master seed");
  verify_cmd->add_option("--n", verify_n, "Restrict to one network size");
  verify_cmd->add_option("--instances", verify.instances_per_n, "Random instances per size");
  verify_cmd->add_flag("--pst", verify.pst_only, "Only the analytic perfect-transfer checks");
  verify_cmd->add_flag("--inject-sign-error", inject,
                       "Use the transposed adjoint convention (oracle self-test)");
  verify_cmd->add_option("--threads", threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  if (synth_cmd->parsed()) {
    return guarded(std::cerr, [&] {
      synth.spec = synth_net.resolve();
      synth.threads = threads;
      return run_synth(synth, std::cerr);
    });
  }
  if (analyze_cmd->parsed()) {
    return guarded(std::cerr, [&] {
      if (analyze_net.given()) analyze_opts.spec = analyze_net.resolve();
      analyze_opts.threads = threads;
      return run_analyze(analyze_opts, std::cerr);
    });
  }
  if (verify_n != 0) verify.min_n = verify.max_n = verify_n;
  if (verify.pst_only && verify_n == 0) verify.min_n = verify.max_n = 2;
  verify.convention = inject ? AdjointConvention::kTransposed : AdjointConvention::kSchrodinger;
  verify.threads = resolve_threads(threads);
  return run_verify(verify, std::cout);
}

}  // namespace spinsens::cli
