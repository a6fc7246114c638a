#include "spinsens/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

namespace spinsens {

using nlohmann::json;

json spec_to_json(const NetworkSpec& spec) {
  return json{{"n", spec.num_spins},
              {"topology", to_string(spec.topology)},
              {"j", spec.coupling},
              {"in", spec.input_spin},
              {"out", spec.output_spin}};
}

NetworkSpec spec_from_json(const json& j) {
  try {
    NetworkSpec spec;
    spec.num_spins = j.at("n").get<int>();
    spec.topology = topology_from_string(j.at("topology").get<std::string>());
    spec.coupling = j.value("j", 1.0);
    spec.input_spin = j.at("in").get<int>();
    spec.output_spin = j.at("out").get<int>();
    spec.kappa = j.value("kappa", 0.0);
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed network spec: ") + e.what());
  }
}

json controllers_to_json(const std::vector<Controller>& controllers) {
  json arr = json::array();
  for (const auto& c : controllers) {
    json biases = json::array();
    for (int k = 0; k < c.biases.size(); ++k) biases.push_back(c.biases(k));
    arr.push_back(json{{"index", c.index},
                       {"seed", c.seed},
                       {"tf", c.t_f},
                       {"biases", std::move(biases)},
                       {"fidelity", c.fidelity}});
  }
  return arr;
}

std::vector<Controller> controllers_from_json(const json& j, const NetworkSpec& spec) {
  if (!j.is_array()) throw IoError("controller file must hold a JSON array");
  std::vector<Controller> out;
  try {
    for (const auto& item : j) {
      Controller c;
      c.index = item.at("index").get<int>();
      c.seed = item.at("seed").get<std::uint64_t>();
      c.t_f = item.at("tf").get<double>();
      const auto& b = item.at("biases");
      if (!b.is_array() || static_cast<int>(b.size()) != spec.num_spins)
        throw IoError("controller " + std::to_string(c.index) + " has " +
                      std::to_string(b.size()) + " biases, expected " +
                      std::to_string(spec.num_spins));
      c.biases.resize(spec.num_spins);
      for (int k = 0; k < spec.num_spins; ++k) c.biases(k) = b[k].get<double>();
      c.fidelity = item.at("fidelity").get<double>();
      c.spec = spec;
      out.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed controller entry: ") + e.what());
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, end);
}

namespace {

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("nan");
}

}  // namespace

std::string records_csv(const std::vector<GeometryRecord>& records) {
  std::ostringstream os;
  os << "controller_index,structure_index,F,e,zeta,abs_zeta,f_n,tf,norm_K,norm_Rs,cos_phi,"
        "sin_phi,cos_theta,identity_residual,pst_flag\n";
  for (const auto& r : records) {
    os << r.controller_index << ',' << r.structure_index << ',' << format_double(r.F) << ','
       << format_double(r.e) << ',' << format_double(r.zeta) << ','
       << format_double(std::abs(r.zeta)) << ',' << format_double(r.f_n) << ','
       << format_double(r.t_f) << ',' << format_double(r.norm_K) << ','
       << format_double(r.norm_Rs) << ',' << format_double(r.cos_phi) << ','
       << format_double(r.sin_phi) << ',' << format_double(r.cos_theta) << ','
       << format_double(r.identity_residual) << ',' << (r.pst ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string summaries_csv(const std::vector<CorrelationSummary>& summaries) {
  std::ostringstream os;
  os << "structure_index,n_records,pearson_loglog,kendall_tau_e_vs_sinphi,mean_norm_K,var_norm_K\n";
  for (const auto& s : summaries) {
    os << s.structure_index << ',' << s.count << ',' << optional_field(s.pearson_r_loglog) << ','
       << optional_field(s.kendall_tau) << ',' << format_double(s.mean_norm_K) << ','
       << format_double(s.var_norm_K) << '\n';
  }
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw IoError("write to '" + path + "' failed");
}

json read_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json RunManifest::to_json() const {
  return json{{"command", command},
              {"config_hash", config_hash(config)},
              {"config", config},
              {"tool_version", kToolVersion},
              {"records_schema", kRecordsSchema},
              {"summaries_schema", kSummariesSchema},
              {"master_seed", master_seed},
              {"started_at", started_at},
              {"finished_at", finished_at},
              {"inputs", inputs},
              {"outputs", outputs},
              {"stats", stats}};
}

std::string manifest_path(const std::string& data_path) { return data_path + ".manifest.json"; }

void write_manifest(const RunManifest& manifest, const std::string& data_path) {
  write_file(manifest_path(data_path), manifest.to_json().dump(2) + "\n");
}

}  // namespace spinsens
