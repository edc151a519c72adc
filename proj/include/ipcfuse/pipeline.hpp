#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ipcfuse/forest.hpp"
#include "ipcfuse/fuse.hpp"
#include "ipcfuse/logistic.hpp"
#include "ipcfuse/parallel.hpp"
#include "ipcfuse/period.hpp"
#include "ipcfuse/predict.hpp"
#include "ipcfuse/stats.hpp"
#include "ipcfuse/synth.hpp"

namespace ipcfuse::pipeline {

/// One flat configuration drives every stage. Defaults carry the pipeline's
/// standing parameters: 0.005 sliver threshold, 3-month lag, 24-month
/// cumulative window, alpha 0.05.
struct RunConfig {
  std::filesystem::path out_dir = "run";
  // input paths; when empty they default to the synth dataset under out_dir
  std::filesystem::path admin_shp;
  std::filesystem::path fs_dir;
  std::filesystem::path conflict_csv;

  double sliver_threshold = 0.005;
  int lag_months = 3;
  int cumulative_window = 24;
  double alpha = 0.05;
  bool include_all_correlations = false;
  std::optional<Period> split_cutoff;  // default: last 20% of observed periods
  uint64_t seed = 5;
  int n_trees = 200;
  double l2 = 1.0;
  bool strict_acled = false;
  bool parallel = true;
  bool run_logistic = true;
  bool run_forest = true;

  synth::SynthConfig synth;  // seed is overridden by the run seed

  Exec exec() const { return parallel ? Exec::Parallel : Exec::Serial; }
  std::filesystem::path dataset_dir() const { return out_dir / "dataset"; }
  std::filesystem::path admin_path() const {
    return admin_shp.empty() ? dataset_dir() / "admin.shp" : admin_shp;
  }
  std::filesystem::path fs_dir_path() const {
    return fs_dir.empty() ? dataset_dir() : fs_dir;
  }
  std::filesystem::path conflict_path() const {
    return conflict_csv.empty() ? dataset_dir() / "conflicts.csv" : conflict_csv;
  }

  /// Applies one `key = value` assignment; throws SchemaError on unknown
  /// keys or unparseable values.
  void set(const std::string& key, const std::string& value);

  /// Flat key=value file, '#' comments.
  static RunConfig from_file(const std::filesystem::path& path);
};

/// synth: writes the synthetic dataset under out_dir/dataset.
synth::EmittedPaths run_synth(const RunConfig& config);

struct FuseResult {
  std::vector<fuse::FusedRecord> fused;
  fuse::JoinQuality quality;
  fuse::OverlayStats overlay_stats;
  std::vector<Period> periods;
  std::map<std::string, geom::MultiPolygon> district_geometry;  // by unit key
};

/// fuse: ingests the configured inputs and builds the fused table in memory.
FuseResult build_fused(const RunConfig& config);

/// fuse command: also writes fused.csv and join_quality.csv under out_dir.
FuseResult run_fuse(const RunConfig& config);

struct CorrelateResult {
  std::map<stats::Level, std::vector<stats::CorrelationResult>> by_level;
};

/// correlate command: writes correlations_<level>.csv and .geojson per level.
CorrelateResult run_correlate(const RunConfig& config);

struct ModelRow {
  std::string type;   // Rule-based | ML-based
  int index = 0;      // 1..7
  std::string model;  // pps, sply, max2pp, logistic-chs, ...
  predict::MetricsReport metrics;
  size_t evaluated = 0;  // examples actually scored
  size_t eligible = 0;   // test examples offered to the model
};

struct TrainEvalResult {
  std::vector<ModelRow> rows;
  predict::Importance forest_importance;    // conflict-augmented forest
  predict::Importance logistic_importance;  // conflict-augmented logistic
  Period cutoff{};
  size_t train_examples = 0;
  size_t test_examples = 0;
};

/// train-eval command: writes metrics.csv, importance.csv and manifest.json.
TrainEvalResult run_train_eval(const RunConfig& config);

/// report command: runs every stage into out_dir and writes index.json.
void run_report(const RunConfig& config);

}  // namespace ipcfuse::pipeline
