#include "ipcfuse/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <regex>
#include <set>

#include <json.hpp>

#include "ipcfuse/csv.hpp"
#include "ipcfuse/errors.hpp"
#include "ipcfuse/geojson.hpp"
#include "ipcfuse/names.hpp"

namespace ipcfuse::pipeline {

namespace {

void log_kv(const std::string& line) { std::cerr << line << "\n"; }

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::string unit_key(const fuse::AdminUnit& u) {
  return u.country + "/" + u.admin1 + "/" + u.admin2;
}

}  // namespace

synth::EmittedPaths run_synth(const RunConfig& config) {
  synth::SynthConfig sc = config.synth;
  sc.seed = config.seed;  // all randomness flows from the run seed
  synth::World world = synth::generate(sc);
  const auto paths = synth::emit(world, config.dataset_dir());
  log_kv("stage=synth districts=" + std::to_string(world.districts.size()) +
         " periods=" + std::to_string(world.periods.size()) +
         " events=" + std::to_string(world.events.size()) + " out=" +
         config.dataset_dir().string());
  return paths;
}

FuseResult build_fused(const RunConfig& config) {
  const auto admin_path = config.admin_path();
  if (!std::filesystem::exists(admin_path))
    throw TruncatedFile("admin shapefile not found: " + admin_path.string());
  ingest::GeoLayer admin = ingest::load_shapefile(admin_path);

  const auto fs_dir = config.fs_dir_path();
  if (!std::filesystem::is_directory(fs_dir))
    throw TruncatedFile("FS directory not found: " + fs_dir.string());
  std::vector<std::pair<Period, std::filesystem::path>> fs_files;
  const std::regex name_re(R"(fs_(\d{6})\.shp)");
  for (const auto& entry : std::filesystem::directory_iterator(fs_dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, m, name_re)) continue;
    const auto p = Period::from_code(std::stoi(m[1].str()));
    if (!p) continue;
    fs_files.push_back({*p, entry.path()});
  }
  if (fs_files.empty())
    throw SchemaError("no fs_<period>.shp files under " + fs_dir.string());
  std::sort(fs_files.begin(), fs_files.end());

  const auto conflict_path = config.conflict_path();
  std::ifstream csv_in(conflict_path, std::ios::binary);
  if (!csv_in) throw TruncatedFile("conflict CSV not found: " + conflict_path.string());
  ingest::AcledReport acled_report;
  const auto events = ingest::parse_acled(csv_in, config.strict_acled, &acled_report);
  log_kv("stage=ingest events=" + std::to_string(events.size()) +
         " skipped_rows=" + std::to_string(acled_report.rows_skipped));

  fuse::OverlayOptions overlay_options;
  overlay_options.sliver_threshold = config.sliver_threshold;

  FuseResult result;
  std::vector<fuse::FSRecord> all;
  for (const auto& [period, path] : fs_files) {
    ingest::GeoLayer fs = ingest::load_shapefile(path);
    fuse::OverlayStats stats;
    auto records = fuse::overlay(fs, admin, period, overlay_options, config.exec(), &stats);
    records = fuse::dedup_worst(std::move(records));
    all.insert(all.end(), records.begin(), records.end());
    result.overlay_stats.pairs_intersected += stats.pairs_intersected;
    result.overlay_stats.records += stats.records;
    result.overlay_stats.dropped_out_of_range_phase += stats.dropped_out_of_range_phase;
    result.overlay_stats.area_unfiltered += stats.area_unfiltered;
    result.overlay_stats.area_kept += stats.area_kept;
    result.periods.push_back(period);
  }

  const auto aggs = fuse::aggregate_conflicts(events);
  result.fused = fuse::lag_join(all, aggs, config.lag_months, config.cumulative_window,
                                &result.quality);
  log_kv("stage=fuse records=" + std::to_string(result.fused.size()) +
         " zero_filled=" + std::to_string(result.quality.records_zero_filled) +
         " dropped_phase=" + std::to_string(result.overlay_stats.dropped_out_of_range_phase));

  // geometries for the GeoJSON companions
  for (const auto& f : admin.features) {
    fuse::AdminUnit u{
        normalize_name(ingest::attr_to_string(*f.attr("COUNTRY"))),
        normalize_name(ingest::attr_to_string(*f.attr("ADMIN1"))),
        normalize_name(ingest::attr_to_string(*f.attr("ADMIN2")))};
    geom::MultiPolygon& district = result.district_geometry[unit_key(u)];
    geom::MultiPolygon& region = result.district_geometry[u.country + "/" + u.admin1];
    geom::MultiPolygon& country = result.district_geometry[u.country];
    for (const auto& part : f.geometry.parts) {
      district.parts.push_back(part);
      region.parts.push_back(part);
      country.parts.push_back(part);
    }
  }
  return result;
}

FuseResult run_fuse(const RunConfig& config) {
  FuseResult result = build_fused(config);
  std::filesystem::create_directories(config.out_dir);
  {
    auto out = open_out(config.out_dir / "fused.csv");
    fuse::write_fused_csv(out, result.fused);
  }
  {
    auto out = open_out(config.out_dir / "join_quality.csv");
    fuse::write_join_quality_csv(out, result.quality);
  }
  return result;
}

namespace {

CorrelateResult correlate_stage(const RunConfig& config, const FuseResult& fused) {
  CorrelateResult result;
  stats::CorrelateOptions options;
  options.alpha = config.alpha;
  options.include_all = config.include_all_correlations;
  std::filesystem::create_directories(config.out_dir);
  for (stats::Level level :
       {stats::Level::Country, stats::Level::Region, stats::Level::District}) {
    auto rows = stats::correlate(fused.fused, level, options, config.exec());
    const std::string stem = "correlations_" + std::string(stats::to_string(level));
    {
      auto out = open_out(config.out_dir / (stem + ".csv"));
      stats::write_correlations_csv(out, rows);
    }
    {
      auto out = open_out(config.out_dir / (stem + ".geojson"));
      geojson::write_correlations(out, rows, fused.district_geometry);
    }
    log_kv("stage=correlate level=" + std::string(stats::to_string(level)) +
           " significant=" + std::to_string(rows.size()));
    result.by_level[level] = std::move(rows);
  }
  return result;
}

Period default_cutoff(const std::vector<fuse::FusedRecord>& fused) {
  std::set<Period> periods;
  for (const auto& r : fused) periods.insert(r.period);
  if (periods.size() < 2) throw SplitError("need at least two periods to split");
  std::vector<Period> sorted(periods.begin(), periods.end());
  size_t test_count = std::max<size_t>(1, sorted.size() / 5);  // last 20%
  return sorted[sorted.size() - test_count];
}

struct BaselineScores {
  std::vector<int> predictions, labels;
  size_t eligible = 0;
};

template <typename Fn>
BaselineScores score_baseline(const predict::Dataset& test,
                              const std::map<fuse::AdminUnit, predict::History>& histories,
                              Fn&& fn) {
  BaselineScores s;
  for (size_t i = 0; i < test.size(); ++i) {
    ++s.eligible;
    const auto pred = fn(histories.at(test.units[i]), test.periods[i]);
    if (!pred) continue;  // not predictable: excluded, reported as coverage
    s.predictions.push_back(*pred);
    s.labels.push_back(test.labels[i]);
  }
  return s;
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

TrainEvalResult train_eval_stage(const RunConfig& config, const FuseResult& fused) {
  TrainEvalResult result;
  const Period cutoff = config.split_cutoff ? *config.split_cutoff
                                            : default_cutoff(fused.fused);
  result.cutoff = cutoff;

  predict::Dataset chs = predict::build_dataset(fused.fused, false);
  predict::Dataset aug = predict::build_dataset(fused.fused, true);
  auto [chs_train, chs_test] = predict::temporal_split(chs, cutoff);
  auto [aug_train, aug_test] = predict::temporal_split(aug, cutoff);
  result.train_examples = chs_train.size();
  result.test_examples = chs_test.size();
  const auto weights = predict::class_weights(chs_train.labels);

  // rule-based baselines replayed over the full per-unit histories
  std::map<fuse::AdminUnit, predict::History> histories;
  for (const auto& r : fused.fused) histories[r.unit][r.period] = r.phase;

  auto add_baseline = [&](int index, const std::string& name, auto fn) {
    const BaselineScores s = score_baseline(chs_test, histories, fn);
    ModelRow row;
    row.type = "Rule-based";
    row.index = index;
    row.model = name;
    row.eligible = s.eligible;
    row.evaluated = s.predictions.size();
    if (!s.predictions.empty()) row.metrics = predict::evaluate(s.predictions, s.labels);
    result.rows.push_back(std::move(row));
  };
  add_baseline(1, "pps", [](const predict::History& h, Period t) {
    return predict::baseline_pps(h, t);
  });
  add_baseline(2, "sply", [](const predict::History& h, Period t) {
    return predict::baseline_sply(h, t);
  });
  add_baseline(3, "max2pp", [](const predict::History& h, Period t) {
    return predict::baseline_max2pp(h, t);
  });

  predict::LogisticConfig logistic_config;
  logistic_config.l2 = config.l2;
  predict::ForestConfig forest_config;
  forest_config.n_trees = config.n_trees;
  forest_config.seed = config.seed;

  auto add_ml = [&](int index, const std::string& name, const predict::Dataset& train,
                    const predict::Dataset& test, bool forest) {
    ModelRow row;
    row.type = "ML-based";
    row.index = index;
    row.model = name;
    row.eligible = test.size();
    row.evaluated = test.size();
    if (forest) {
      auto model = predict::train_forest(train, weights, forest_config, config.exec());
      row.metrics = predict::evaluate(model.predict(test, config.exec()), test.labels);
      if (train.with_conflict) result.forest_importance = model.feature_importance();
    } else {
      auto model = predict::train_logistic(train, weights, logistic_config);
      row.metrics = predict::evaluate(model.predict(test), test.labels);
      if (train.with_conflict) result.logistic_importance = model.feature_importance();
    }
    result.rows.push_back(std::move(row));
    log_kv("stage=train-eval model=" + name + " accuracy=" + fmt6(row.metrics.accuracy));
  };
  if (config.run_logistic) add_ml(4, "logistic-chs", chs_train, chs_test, false);
  if (config.run_forest) add_ml(5, "forest-chs", chs_train, chs_test, true);
  if (config.run_logistic) add_ml(6, "logistic-conflict", aug_train, aug_test, false);
  if (config.run_forest) add_ml(7, "forest-conflict", aug_train, aug_test, true);

  // artifacts
  std::filesystem::create_directories(config.out_dir);
  {
    auto out = open_out(config.out_dir / "metrics.csv");
    csv::write_row(out, std::vector<std::string>{"Type", "Index", "Model", "Test Accuracy",
                                                 "Test Precision", "Test Recall", "F1"});
    for (const auto& row : result.rows) {
      csv::write_row(out, std::vector<std::string>{
                              row.type, std::to_string(row.index), row.model,
                              fmt6(row.metrics.accuracy), fmt6(row.metrics.precision_weighted),
                              fmt6(row.metrics.recall_weighted), fmt6(row.metrics.f1_weighted)});
    }
  }
  {
    auto out = open_out(config.out_dir / "importance.csv");
    csv::write_row(out, std::vector<std::string>{"model", "feature", "score", "rank"});
    auto dump = [&](const std::string& model, const predict::Importance& importance) {
      int rank = 1;
      for (const auto& [feature, score] : importance) {
        csv::write_row(out, std::vector<std::string>{model, feature, fmt6(score),
                                                     std::to_string(rank++)});
      }
    };
    if (config.run_logistic) dump("logistic-conflict", result.logistic_importance);
    if (config.run_forest) dump("forest-conflict", result.forest_importance);
  }
  {
    nlohmann::json manifest;
    char stamp[32];
    const std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    manifest["timestamp"] = stamp;  // the single non-deterministic field
    manifest["seed"] = config.seed;
    manifest["split_cutoff"] = cutoff.code();
    manifest["n_trees"] = config.n_trees;
    manifest["l2"] = config.l2;
    manifest["alpha"] = config.alpha;
    manifest["sliver_threshold"] = config.sliver_threshold;
    manifest["lag_months"] = config.lag_months;
    manifest["cumulative_window"] = config.cumulative_window;
    manifest["train_examples"] = result.train_examples;
    manifest["test_examples"] = result.test_examples;
    manifest["features_chs"] = chs.feature_names;
    manifest["features_conflict"] = aug.feature_names;
    nlohmann::json cw = nlohmann::json::object();
    for (const auto& [label, w] : weights) cw[std::to_string(label)] = w;
    manifest["class_weights"] = cw;
    nlohmann::json coverage = nlohmann::json::object();
    for (const auto& row : result.rows) {
      if (row.type != "Rule-based") continue;
      coverage[row.model] = {{"eligible", row.eligible}, {"evaluated", row.evaluated}};
    }
    manifest["baseline_coverage"] = coverage;
    auto out = open_out(config.out_dir / "manifest.json");
    out << manifest.dump(2) << "\n";
  }
  return result;
}

}  // namespace

CorrelateResult run_correlate(const RunConfig& config) {
  return correlate_stage(config, build_fused(config));
}

TrainEvalResult run_train_eval(const RunConfig& config) {
  return train_eval_stage(config, build_fused(config));
}

void run_report(const RunConfig& config) {
  FuseResult fused = run_fuse(config);
  correlate_stage(config, fused);
  train_eval_stage(config, fused);

  nlohmann::json index;
  index["artifacts"] = nlohmann::json::array();
  static const char* kArtifacts[] = {
      "fused.csv",          "join_quality.csv",
      "correlations_country.csv",  "correlations_country.geojson",
      "correlations_region.csv",   "correlations_region.geojson",
      "correlations_district.csv", "correlations_district.geojson",
      "metrics.csv",        "importance.csv",
      "manifest.json"};
  for (const char* name : kArtifacts) {
    const auto path = config.out_dir / name;
    index["artifacts"].push_back(
        {{"file", name},
         {"bytes", std::filesystem::exists(path) ? std::filesystem::file_size(path) : 0}});
  }
  index["fused_records"] = fused.fused.size();
  index["periods"] = fused.periods.size();
  auto out = open_out(config.out_dir / "index.json");
  out << index.dump(2) << "\n";
  log_kv("stage=report out=" + config.out_dir.string());
}

}  // namespace ipcfuse::pipeline
