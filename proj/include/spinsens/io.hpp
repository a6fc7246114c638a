#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinsens/controller_synthesis.hpp"
#include "spinsens/ensemble_analytics.hpp"
#include "spinsens/network_model.hpp"

namespace spinsens {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kRecordsSchema = "records/v1";
inline constexpr const char* kSummariesSchema = "summaries/v1";

// {"n", "topology", "j", "in", "out"}; an optional "kappa" must be 0.
nlohmann::json spec_to_json(const NetworkSpec& spec);
NetworkSpec spec_from_json(const nlohmann::json& j);

// [{"index", "seed", "tf", "biases", "fidelity"}, ...]
nlohmann::json controllers_to_json(const std::vector<Controller>& controllers);
std::vector<Controller> controllers_from_json(const nlohmann::json& j, const NetworkSpec& spec);

// 17 significant digits, '.' decimal, locale independent.
std::string format_double(double v);

std::string records_csv(const std::vector<GeometryRecord>& records);
std::string summaries_csv(const std::vector<CorrelationSummary>& summaries);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);
nlohmann::json read_json_file(const std::string& path);

// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

std::string utc_timestamp();

// Provenance for one CLI run, written next to each data file as
// <file>.manifest.json. Only the timestamps vary between identical reruns.
struct RunManifest {
  std::string command;
  nlohmann::json config;  // everything that determines the data
  std::uint64_t master_seed = 0;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  nlohmann::json stats = nlohmann::json::object();

  nlohmann::json to_json() const;
};

std::string manifest_path(const std::string& data_path);
void write_manifest(const RunManifest& manifest, const std::string& data_path);

}  // namespace spinsens
