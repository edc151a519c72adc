#include <algorithm>
#include <fstream>

#include "ipcfuse/errors.hpp"
#include "ipcfuse/pipeline.hpp"

namespace ipcfuse::pipeline {

namespace {

std::string trim(std::string s) {
  const auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), sp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), sp).base(), s.end());
  return s;
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw SchemaError("not a boolean: " + v);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  try {
    if (key == "out_dir") out_dir = value;
    else if (key == "admin_shp") admin_shp = value;
    else if (key == "fs_dir") fs_dir = value;
    else if (key == "conflict_csv") conflict_csv = value;
    else if (key == "sliver_threshold") sliver_threshold = std::stod(value);
    else if (key == "lag_months") lag_months = std::stoi(value);
    else if (key == "cumulative_window") cumulative_window = std::stoi(value);
    else if (key == "alpha") alpha = std::stod(value);
    else if (key == "include_all_correlations") include_all_correlations = parse_bool(value);
    else if (key == "split_cutoff") {
      const auto p = Period::from_code(std::stoi(value));
      if (!p) throw SchemaError("split_cutoff must be a publication period (yyyymm)");
      split_cutoff = *p;
    } else if (key == "seed") seed = std::stoull(value);
    else if (key == "n_trees") n_trees = std::stoi(value);
    else if (key == "l2") l2 = std::stod(value);
    else if (key == "strict_acled") strict_acled = parse_bool(value);
    else if (key == "parallel") parallel = parse_bool(value);
    else if (key == "run_logistic") run_logistic = parse_bool(value);
    else if (key == "run_forest") run_forest = parse_bool(value);
    else if (key == "synth.n_countries") synth.n_countries = std::stoi(value);
    else if (key == "synth.regions_per_country") synth.regions_per_country = std::stoi(value);
    else if (key == "synth.districts_per_region") synth.districts_per_region = std::stoi(value);
    else if (key == "synth.n_years") synth.n_years = std::stoi(value);
    else if (key == "synth.start_year") synth.start_year = std::stoi(value);
    else if (key == "synth.base_conflict_rate") synth.base_conflict_rate = std::stod(value);
    else if (key == "synth.burst_prob") synth.burst_prob = std::stod(value);
    else if (key == "synth.burst_multiplier") synth.burst_multiplier = std::stod(value);
    else if (key == "synth.coupling_beta") synth.coupling_beta = std::stod(value);
    else if (key == "synth.phase_persistence") synth.phase_persistence = std::stod(value);
    else if (key == "synth.hot_fraction") synth.hot_fraction = std::stod(value);
    else if (key == "synth.burst_length_months") synth.burst_length_months = std::stoi(value);
    else if (key == "synth.escalation_base") synth.escalation_base = std::stod(value);
    else if (key == "synth.region_base_spread") synth.region_base_spread = std::stod(value);
    else if (key == "synth.jitter") synth.jitter = std::stod(value);
    else throw SchemaError("unknown config key: " + key);
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception&) {
    throw SchemaError("bad value for " + key + ": " + value);
  }
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open config file: " + path.string());
  RunConfig config;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw SchemaError("config line " + std::to_string(lineno) + ": expected key = value");
    config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

}  // namespace ipcfuse::pipeline
