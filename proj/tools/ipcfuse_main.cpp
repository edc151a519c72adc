// Command-line front end: synth | fuse | correlate | train-eval | report.
// Configuration comes from an optional flat key=value file plus long-name
// flag overrides that mirror the config keys. Logs go to stderr as key=value
// lines; data artifacts are files under the output directory.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ipcfuse/errors.hpp"
#include "ipcfuse/pipeline.hpp"

namespace {

using ipcfuse::pipeline::RunConfig;

struct Override {
  std::string key, value;
};

void add_common(CLI::App* cmd, std::string& config_path, std::vector<Override>& overrides) {
  cmd->add_option("--config", config_path, "flat key=value configuration file");
  static const char* kKeys[] = {
      "out_dir",          "admin_shp",         "fs_dir",
      "conflict_csv",     "sliver_threshold",  "lag_months",
      "cumulative_window", "alpha",            "include_all_correlations",
      "split_cutoff",     "seed",              "n_trees",
      "l2",               "strict_acled",      "parallel",
      "run_logistic",     "run_forest",        "synth.n_countries",
      "synth.regions_per_country", "synth.districts_per_region", "synth.n_years",
      "synth.start_year", "synth.base_conflict_rate", "synth.burst_prob",
      "synth.burst_multiplier", "synth.coupling_beta", "synth.phase_persistence",
      "synth.hot_fraction", "synth.burst_length_months", "synth.escalation_base",
      "synth.jitter"};
  for (const char* key : kKeys) {
    std::string flag = "--" + std::string(key);
    for (auto& c : flag) {
      if (c == '.') c = '-';
    }
    cmd->add_option_function<std::string>(
        flag,
        [&overrides, key](const std::string& value) {
          overrides.push_back({key, value});
        },
        std::string("override config key ") + key);
  }
}

RunConfig load(const std::string& config_path, const std::vector<Override>& overrides) {
  RunConfig config;
  if (!config_path.empty()) config = RunConfig::from_file(config_path);
  for (const auto& o : overrides) config.set(o.key, o.value);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conflict / food-security fusion pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<Override> overrides;

  CLI::App* synth = app.add_subcommand("synth", "generate the synthetic dataset");
  CLI::App* fuse = app.add_subcommand("fuse", "overlay, dedup, aggregate and join");
  CLI::App* correlate = app.add_subcommand("correlate", "three-level rank correlations");
  CLI::App* train_eval = app.add_subcommand("train-eval", "baselines + models, metrics table");
  CLI::App* report = app.add_subcommand("report", "run everything into one directory");
  for (CLI::App* cmd : {synth, fuse, correlate, train_eval, report}) {
    add_common(cmd, config_path, overrides);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig config = load(config_path, overrides);
    if (synth->parsed()) {
      ipcfuse::pipeline::run_synth(config);
    } else if (fuse->parsed()) {
      ipcfuse::pipeline::run_fuse(config);
    } else if (correlate->parsed()) {
      ipcfuse::pipeline::run_correlate(config);
    } else if (train_eval->parsed()) {
      ipcfuse::pipeline::run_train_eval(config);
    } else if (report->parsed()) {
      ipcfuse::pipeline::run_report(config);
    }
  } catch (const std::exception& e) {
    std::cerr << "error=\"" << e.what() << "\"\n";
    return 1;
  }
  return 0;
}
