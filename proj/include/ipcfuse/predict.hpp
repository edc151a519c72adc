#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ipcfuse/fuse.hpp"
#include "ipcfuse/period.hpp"

namespace ipcfuse::predict {

/// Ordered phase history of one unit (publication periods only).
using History = std::map<Period, int>;

/// Previous period's score: the phase at the latest observed period strictly
/// before the target. nullopt when no prior period exists.
std::optional<int> baseline_pps(const History& history, Period target);

/// Same period last year: the phase at (year-1, same month); nullopt when
/// that exact period is missing.
std::optional<int> baseline_sply(const History& history, Period target);

/// Highest (worst) phase of the two most recent observed prior periods;
/// nullopt with fewer than two.
std::optional<int> baseline_max2pp(const History& history, Period target);

/// Number of flips of (phase >= crisis_threshold) between consecutive
/// observations.
int count_transitions(std::span<const int> phases, int crisis_threshold = 3);

/// Dense labeled dataset with named feature columns.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;  // phase 1..5 at the target period
  std::vector<fuse::AdminUnit> units;
  std::vector<Period> periods;
  bool with_conflict = false;

  size_t size() const { return rows.size(); }
  size_t n_features() const { return feature_names.size(); }
};

inline constexpr std::array<const char*, 4> kConflictFeatures = {
    "lag3_conflicts", "lag3_fatalities", "cum24_conflicts", "cum24_fatalities"};

struct DatasetOptions {
  int n_lags = 3;                   // phase lags cs_lag1..cs_lagN
  bool impute_missing_lags = true;  // earliest observed phase + indicator; else drop rows
  int crisis_threshold = 3;
};

/// One example per (unit, period) with an observed phase at the immediately
/// preceding publication period. Conflict columns are included only in
/// conflict-augmented mode; everything else is identical between modes.
Dataset build_dataset(std::span<const fuse::FusedRecord> fused, bool with_conflict,
                      const DatasetOptions& options = {});

/// train = periods strictly before cutoff, test = periods at or after it.
/// Throws SplitError when either side would be empty.
std::pair<Dataset, Dataset> temporal_split(const Dataset& examples, Period cutoff);

/// Balanced weights: n_total / (n_classes_present * n_c).
std::map<int, double> class_weights(std::span<const int> labels);

struct MetricsReport {
  double accuracy = 0.0;
  double precision_weighted = 0.0;
  double recall_weighted = 0.0;  // equals accuracy by the support-weighting identity
  double f1_weighted = 0.0;
  std::array<std::array<long, 5>, 5> confusion{};  // [label-1][prediction-1]
};

/// Support-weighted multi-class metrics; classes absent from the labels
/// contribute zero support. Throws EvalError on length mismatch or empty
/// input.
MetricsReport evaluate(std::span<const int> predictions, std::span<const int> labels);

/// (feature, score) ranking, descending score, ties broken alphabetically.
using Importance = std::vector<std::pair<std::string, double>>;
Importance rank_importance(const std::map<std::string, double>& scores);

}  // namespace ipcfuse::predict
