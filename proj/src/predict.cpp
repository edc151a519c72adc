#include "ipcfuse/predict.hpp"

#include <algorithm>
#include <set>

#include "ipcfuse/errors.hpp"

namespace ipcfuse::predict {

std::optional<int> baseline_pps(const History& history, Period target) {
  auto it = history.lower_bound(target);
  if (it == history.begin()) return std::nullopt;
  return std::prev(it)->second;
}

std::optional<int> baseline_sply(const History& history, Period target) {
  auto it = history.find(target.last_year());
  if (it == history.end()) return std::nullopt;
  return it->second;
}

std::optional<int> baseline_max2pp(const History& history, Period target) {
  auto it = history.lower_bound(target);
  if (it == history.begin()) return std::nullopt;
  --it;
  const int latest = it->second;
  if (it == history.begin()) return std::nullopt;
  --it;
  return std::max(latest, it->second);
}

int count_transitions(std::span<const int> phases, int crisis_threshold) {
  int flips = 0;
  for (size_t i = 0; i + 1 < phases.size(); ++i) {
    const bool a = phases[i] >= crisis_threshold;
    const bool b = phases[i + 1] >= crisis_threshold;
    if (a != b) ++flips;
  }
  return flips;
}

Dataset build_dataset(std::span<const fuse::FusedRecord> fused, bool with_conflict,
                      const DatasetOptions& options) {
  // index per-unit series
  std::map<fuse::AdminUnit, std::map<Period, const fuse::FusedRecord*>> by_unit;
  std::set<std::string> regions;
  for (const auto& r : fused) {
    by_unit[r.unit][r.period] = &r;
    regions.insert(r.unit.country + "/" + r.unit.admin1);
  }

  Dataset ds;
  ds.with_conflict = with_conflict;
  std::map<std::string, size_t> region_col;
  for (const auto& reg : regions) {
    region_col[reg] = ds.feature_names.size();
    ds.feature_names.push_back("region:" + reg);
  }
  const size_t lag_base = ds.feature_names.size();
  for (int l = 1; l <= options.n_lags; ++l)
    ds.feature_names.push_back("cs_lag" + std::to_string(l));
  ds.feature_names.push_back("sply");
  ds.feature_names.push_back("transitions");
  ds.feature_names.push_back("lag_imputed");
  const size_t conflict_base = ds.feature_names.size();
  if (with_conflict) {
    for (const char* name : kConflictFeatures) ds.feature_names.push_back(name);
  }

  for (const auto& [unit, series] : by_unit) {
    const int earliest_phase = series.begin()->second->phase;
    std::vector<int> phases_so_far;
    phases_so_far.reserve(series.size());
    for (const auto& [period, rec] : series) {
      // phases strictly before `period`, in period order
      const auto prev_it = series.find(period.prev());
      if (prev_it == series.end()) {
        phases_so_far.push_back(rec->phase);
        continue;  // no lag-1 history: not an example
      }

      std::vector<double> row(ds.feature_names.size(), 0.0);
      row[region_col.at(unit.country + "/" + unit.admin1)] = 1.0;

      bool imputed = false;
      bool drop = false;
      Period lag = period;
      for (int l = 1; l <= options.n_lags; ++l) {
        lag = lag.prev();
        const auto it = series.find(lag);
        if (it != series.end()) {
          row[lag_base + static_cast<size_t>(l - 1)] = it->second->phase;
        } else if (options.impute_missing_lags) {
          row[lag_base + static_cast<size_t>(l - 1)] = earliest_phase;
          imputed = true;
        } else {
          drop = true;
        }
      }
      const auto sply_it = series.find(period.last_year());
      if (sply_it != series.end()) {
        row[lag_base + static_cast<size_t>(options.n_lags)] = sply_it->second->phase;
      } else if (options.impute_missing_lags) {
        row[lag_base + static_cast<size_t>(options.n_lags)] = earliest_phase;
        imputed = true;
      } else {
        drop = true;
      }
      row[lag_base + static_cast<size_t>(options.n_lags) + 1] =
          count_transitions(phases_so_far, options.crisis_threshold);
      row[lag_base + static_cast<size_t>(options.n_lags) + 2] = imputed ? 1.0 : 0.0;
      if (with_conflict) {
        row[conflict_base + 0] = rec->lag3_conflicts;
        row[conflict_base + 1] = rec->lag3_fatalities;
        row[conflict_base + 2] = static_cast<double>(rec->cum24_conflicts);
        row[conflict_base + 3] = static_cast<double>(rec->cum24_fatalities);
      }

      phases_so_far.push_back(rec->phase);
      if (drop) continue;
      ds.rows.push_back(std::move(row));
      ds.labels.push_back(rec->phase);
      ds.units.push_back(unit);
      ds.periods.push_back(period);
    }
  }
  return ds;
}

std::pair<Dataset, Dataset> temporal_split(const Dataset& examples, Period cutoff) {
  Dataset train, test;
  train.feature_names = test.feature_names = examples.feature_names;
  train.with_conflict = test.with_conflict = examples.with_conflict;
  for (size_t i = 0; i < examples.size(); ++i) {
    Dataset& side = examples.periods[i] < cutoff ? train : test;
    side.rows.push_back(examples.rows[i]);
    side.labels.push_back(examples.labels[i]);
    side.units.push_back(examples.units[i]);
    side.periods.push_back(examples.periods[i]);
  }
  if (train.rows.empty()) throw SplitError("no examples before the cutoff");
  if (test.rows.empty()) throw SplitError("no examples at or after the cutoff");
  return {std::move(train), std::move(test)};
}

std::map<int, double> class_weights(std::span<const int> labels) {
  if (labels.empty()) throw EvalError("class_weights: empty labels");
  std::map<int, long> counts;
  for (int l : labels) ++counts[l];
  const double total = static_cast<double>(labels.size());
  const double k = static_cast<double>(counts.size());
  std::map<int, double> weights;
  for (const auto& [label, n] : counts) {
    weights[label] = total / (k * static_cast<double>(n));
  }
  return weights;
}

MetricsReport evaluate(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) throw EvalError("prediction/label length mismatch");
  if (labels.empty()) throw EvalError("empty evaluation");
  MetricsReport m;
  const double total = static_cast<double>(labels.size());
  long correct = 0;
  std::map<int, long> support, predicted, true_pos;
  for (size_t i = 0; i < labels.size(); ++i) {
    ++support[labels[i]];
    ++predicted[predictions[i]];
    if (labels[i] == predictions[i]) {
      ++correct;
      ++true_pos[labels[i]];
    }
    if (labels[i] >= 1 && labels[i] <= 5 && predictions[i] >= 1 && predictions[i] <= 5) {
      ++m.confusion[static_cast<size_t>(labels[i] - 1)][static_cast<size_t>(predictions[i] - 1)];
    }
  }
  m.accuracy = static_cast<double>(correct) / total;
  // support-weighted recall simplifies to sum(tp)/total, the same quantity
  // as accuracy; computing it in that form keeps the identity exact
  m.recall_weighted = static_cast<double>(correct) / total;
  for (const auto& [cls, sup] : support) {
    const double w = static_cast<double>(sup) / total;
    const long tp = true_pos.count(cls) ? true_pos[cls] : 0;
    const long pred = predicted.count(cls) ? predicted[cls] : 0;
    const double prec = pred > 0 ? static_cast<double>(tp) / static_cast<double>(pred) : 0.0;
    const double rec = static_cast<double>(tp) / static_cast<double>(sup);
    const double f1 = (prec + rec) > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    m.precision_weighted += w * prec;
    m.f1_weighted += w * f1;
  }
  return m;
}

Importance rank_importance(const std::map<std::string, double>& scores) {
  Importance out(scores.begin(), scores.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

}  // namespace ipcfuse::predict
