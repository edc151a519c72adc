#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ipcfuse/errors.hpp"
#include "ipcfuse/forest.hpp"
#include "ipcfuse/logistic.hpp"
#include "ipcfuse/predict.hpp"
#include "ipcfuse/rng.hpp"

using namespace ipcfuse;
using namespace ipcfuse::predict;

namespace {

History hist(std::initializer_list<std::pair<int, int>> entries) {
  History h;
  for (const auto& [code, phase] : entries) h[*Period::from_code(code)] = phase;
  return h;
}

Dataset toy_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                    std::vector<std::string> names) {
  Dataset ds;
  ds.feature_names = std::move(names);
  ds.rows = rows;
  ds.labels = labels;
  ds.units.resize(rows.size());
  ds.periods.assign(rows.size(), Period{2022, 2});
  return ds;
}

}  // namespace

TEST_CASE("baseline_pps: previous period, gap-tolerant, empty history fails") {
  CHECK(*baseline_pps(hist({{202202, 2}, {202206, 3}}), {2022, 10}) == 3);
  CHECK(*baseline_pps(hist({{202202, 1}}), {2022, 6}) == 1);
  CHECK(*baseline_pps(hist({{202202, 1}}), {2022, 10}) == 1);  // gap before target
  CHECK(!baseline_pps({}, {2022, 10}).has_value());
  CHECK(!baseline_pps(hist({{202206, 3}}), {2022, 6}).has_value());  // nothing strictly before
}

TEST_CASE("baseline_sply: same period last year, exact match required") {
  CHECK(*baseline_sply(hist({{202110, 4}}), {2022, 10}) == 4);
  CHECK(!baseline_sply(hist({{202106, 4}}), {2022, 10}).has_value());
  CHECK(*baseline_sply(hist({{202106, 2}, {202110, 4}}), {2022, 10}) == 4);
}

TEST_CASE("baseline_max2pp: worst of the two most recent priors") {
  CHECK(*baseline_max2pp(hist({{202202, 2}, {202206, 4}}), {2022, 10}) == 4);
  CHECK(*baseline_max2pp(hist({{202202, 3}, {202206, 3}}), {2022, 10}) == 3);
  CHECK(!baseline_max2pp(hist({{202206, 3}}), {2022, 10}).has_value());
}

TEST_CASE("baselines: replay oracle on random histories") {
  CounterRng rng(88, 1);
  for (int trial = 0; trial < 100; ++trial) {
    History h;
    Period p{2016, 2};
    std::vector<std::pair<Period, int>> observed;
    for (int i = 0; i < 20; ++i) {
      if (rng.uniform() < 0.7) {
        const int phase = 1 + (int)rng.uniform_int(5);
        h[p] = phase;
        observed.push_back({p, phase});
      }
      p = p.next();
    }
    const Period target{2019 + (int)rng.uniform_int(3), (int[]){2, 6, 10}[rng.uniform_int(3)]};

    // direct single-pass replay
    std::optional<int> last, second_last, sply;
    for (const auto& [period, phase] : observed) {
      if (period < target) {
        second_last = last;
        last = phase;
      }
      if (period == target.last_year()) sply = phase;
    }
    auto expected_pps = last;
    auto expected_sply = sply;
    std::optional<int> expected_max2;
    if (last && second_last) expected_max2 = std::max(*last, *second_last);

    CHECK(baseline_pps(h, target) == expected_pps);
    CHECK(baseline_sply(h, target) == expected_sply);
    CHECK(baseline_max2pp(h, target) == expected_max2);
  }
}

TEST_CASE("count_transitions: crisis boundary flips") {
  CHECK(count_transitions(std::vector<int>{2, 3, 2}) == 2);
  CHECK(count_transitions(std::vector<int>{1, 1, 1}) == 0);
  CHECK(count_transitions(std::vector<int>{4}) == 0);
  CHECK(count_transitions(std::vector<int>{1, 5, 1, 5}) == 3);
  CHECK(count_transitions(std::vector<int>{2, 3, 2}, 4) == 0);
}

TEST_CASE("class_weights: balanced formula") {
  auto w1 = class_weights(std::vector<int>{1, 1, 2, 2});
  CHECK(w1[1] == doctest::Approx(1.0));
  CHECK(w1[2] == doctest::Approx(1.0));
  auto w2 = class_weights(std::vector<int>{1, 1, 1, 2});
  CHECK(w2[1] == doctest::Approx(4.0 / 6.0));
  CHECK(w2[2] == doctest::Approx(2.0));
  auto w3 = class_weights(std::vector<int>{3, 3, 3, 3});
  CHECK(w3[3] == doctest::Approx(1.0));
}

namespace {

std::vector<fuse::FusedRecord> straight_series(int n_periods, int conflicts_at_each = 0) {
  std::vector<fuse::FusedRecord> fused;
  Period p{2020, 2};
  for (int i = 0; i < n_periods; ++i) {
    fuse::FusedRecord r;
    r.unit = {"k", "r1", "d1"};
    r.period = p;
    r.phase = 1 + (i % 5);
    r.lag3_conflicts = conflicts_at_each;
    r.lag3_fatalities = 2 * conflicts_at_each;
    r.cum24_conflicts = 10 * conflicts_at_each;
    r.cum24_fatalities = 20 * conflicts_at_each;
    r.area = 1.0;
    fused.push_back(r);
    p = p.next();
  }
  return fused;
}

}  // namespace

TEST_CASE("build_dataset: first period has no lag-1, so n-1 examples") {
  auto fused = straight_series(5);
  Dataset ds = build_dataset(fused, false);
  CHECK(ds.size() == 4);
}

TEST_CASE("build_dataset: conflict fields present only in augmented mode") {
  auto fused = straight_series(5, 7);
  Dataset chs = build_dataset(fused, false);
  Dataset aug = build_dataset(fused, true);
  for (const char* name : kConflictFeatures) {
    CHECK(std::find(chs.feature_names.begin(), chs.feature_names.end(), name) ==
          chs.feature_names.end());
    CHECK(std::find(aug.feature_names.begin(), aug.feature_names.end(), name) !=
          aug.feature_names.end());
  }
  // pass-through of the lagged conflict count
  const size_t col = std::find(aug.feature_names.begin(), aug.feature_names.end(),
                               std::string("lag3_conflicts")) -
                     aug.feature_names.begin();
  for (const auto& row : aug.rows) CHECK(row[col] == 7.0);
}

TEST_CASE("build_dataset: stripping conflict columns reproduces the CHS dataset") {
  auto fused = straight_series(8, 3);
  Dataset chs = build_dataset(fused, false);
  Dataset aug = build_dataset(fused, true);
  REQUIRE(chs.size() == aug.size());
  REQUIRE(aug.n_features() == chs.n_features() + 4);
  for (size_t i = 0; i < chs.size(); ++i) {
    CHECK(chs.labels[i] == aug.labels[i]);
    for (size_t j = 0; j < chs.n_features(); ++j) {
      CHECK(chs.rows[i][j] == aug.rows[i][j]);  // identical prefix, bitwise
    }
  }
}

TEST_CASE("build_dataset: imputation flag marks edge rows") {
  auto fused = straight_series(5);
  Dataset ds = build_dataset(fused, false);
  const size_t flag_col = std::find(ds.feature_names.begin(), ds.feature_names.end(),
                                    std::string("lag_imputed")) -
                          ds.feature_names.begin();
  // earliest example lacks lag2/lag3/sply, latest has everything
  bool any_imputed = false, any_clean = false;
  for (const auto& row : ds.rows) {
    (row[flag_col] > 0 ? any_imputed : any_clean) = true;
  }
  CHECK(any_imputed);
  CHECK(any_clean);

  DatasetOptions drop;
  drop.impute_missing_lags = false;
  Dataset strict = build_dataset(fused, false, drop);
  CHECK(strict.size() < ds.size());  // edge rows dropped instead
}

TEST_CASE("temporal_split: boundary membership and errors") {
  std::vector<fuse::FusedRecord> fused;
  Period p{2016, 2};
  while (p.code() <= 202306) {
    fuse::FusedRecord r;
    r.unit = {"k", "r1", "d1"};
    r.period = p;
    r.phase = 2;
    fused.push_back(r);
    p = p.next();
  }
  // enough history that every period from 201606 becomes an example
  Dataset ds = build_dataset(fused, false);
  auto [train, test] = temporal_split(ds, *Period::from_code(202202));
  std::set<int> test_periods;
  for (const auto& tp : test.periods) test_periods.insert(tp.code());
  CHECK(test_periods == std::set<int>{202202, 202206, 202210, 202302, 202306});
  for (const auto& tp : train.periods) CHECK(tp.code() < 202202);

  CHECK_THROWS_AS(temporal_split(ds, *Period::from_code(201602)), SplitError);
  CHECK_THROWS_AS(temporal_split(ds, *Period::from_code(202410)), SplitError);
}

TEST_CASE("evaluate: direct computation and identities") {
  MetricsReport perfect = evaluate(std::vector<int>{1, 2, 3}, std::vector<int>{1, 2, 3});
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.precision_weighted == doctest::Approx(1.0));
  CHECK(perfect.f1_weighted == doctest::Approx(1.0));

  MetricsReport m = evaluate(std::vector<int>{1, 2, 2}, std::vector<int>{1, 1, 2});
  CHECK(m.accuracy == doctest::Approx(2.0 / 3.0));
  CHECK(m.recall_weighted == m.accuracy);  // exact identity
  CHECK(m.confusion[0][0] == 1);
  CHECK(m.confusion[0][1] == 1);
  CHECK(m.confusion[1][1] == 1);

  CounterRng rng(5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    const size_t n = 1 + rng.uniform_int(200);
    std::vector<int> labels(n), preds(n);
    for (auto& v : labels) v = 1 + (int)rng.uniform_int(5);
    for (auto& v : preds) v = 1 + (int)rng.uniform_int(5);
    MetricsReport r = evaluate(preds, labels);
    CHECK(r.recall_weighted == r.accuracy);  // exact, every time
  }

  CHECK_THROWS_AS(evaluate(std::vector<int>{1}, std::vector<int>{1, 2}), EvalError);
  CHECK_THROWS_AS(evaluate(std::vector<int>{}, std::vector<int>{}), EvalError);
}

TEST_CASE("train_logistic: separable toy set reaches full training accuracy") {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 20; ++i) {
    const double x = i < 10 ? -1.0 - 0.1 * i : 1.0 + 0.1 * (i - 10);
    rows.push_back({x});
    labels.push_back(i < 10 ? 1 : 2);
  }
  Dataset ds = toy_dataset(rows, labels, {"x"});
  LogisticConfig config;
  config.l2 = 1e-6;  // effectively unregularized for separability
  LogisticModel model = train_logistic(ds, class_weights(ds.labels), config);
  auto preds = model.predict(ds);
  CHECK(evaluate(preds, ds.labels).accuracy == 1.0);
}

TEST_CASE("train_logistic: loss trace is non-increasing") {
  CounterRng rng(9, 2);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 120; ++i) {
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    rows.push_back({a, b, rng.uniform(-1, 1)});
    labels.push_back(a + 0.5 * b + rng.uniform(-0.5, 0.5) > 0 ? 2 : (a < -1 ? 3 : 1));
  }
  Dataset ds = toy_dataset(rows, labels, {"a", "b", "noise"});
  LogisticModel model = train_logistic(ds, class_weights(ds.labels), {});
  const auto& trace = model.loss_trace();
  REQUIRE(trace.size() > 2);
  for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-15);
}

TEST_CASE("train_logistic: duplicating every row leaves the decision function unchanged") {
  CounterRng rng(14, 3);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) {
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    rows.push_back({a, b});
    labels.push_back(a - b > 0.3 ? 3 : 1);
  }
  Dataset ds = toy_dataset(rows, labels, {"a", "b"});
  std::vector<std::vector<double>> doubled = rows;
  doubled.insert(doubled.end(), rows.begin(), rows.end());
  std::vector<int> doubled_labels = labels;
  doubled_labels.insert(doubled_labels.end(), labels.begin(), labels.end());
  Dataset ds2 = toy_dataset(doubled, doubled_labels, {"a", "b"});

  LogisticModel m1 = train_logistic(ds, class_weights(ds.labels), {});
  LogisticModel m2 = train_logistic(ds2, class_weights(ds2.labels), {});
  CHECK(m1.predict(ds) == m2.predict(ds));
  REQUIRE(m1.parameters().size() == m2.parameters().size());
  for (size_t p = 0; p < m1.parameters().size(); ++p) {
    CHECK(m1.parameters()[p] == doctest::Approx(m2.parameters()[p]).epsilon(1e-6));
  }
}

TEST_CASE("logistic gradient matches central finite differences") {
  CounterRng rng(21, 4);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 50; ++i) {
    rows.push_back({rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)});
    labels.push_back(1 + (int)rng.uniform_int(3));
  }
  Dataset ds = toy_dataset(rows, labels, {"a", "b", "c"});
  LogisticConfig config;
  LogisticProblem problem(ds, class_weights(ds.labels), config);
  std::vector<double> params(problem.n_params());
  for (auto& p : params) p = rng.uniform(-0.8, 0.8);

  const auto grad = problem.gradient(params);
  const double h = 1e-6;
  double worst = 0.0;
  for (size_t p = 0; p < params.size(); ++p) {
    std::vector<double> lo = params, hi = params;
    lo[p] -= h;
    hi[p] += h;
    const double fd = (problem.loss(hi) - problem.loss(lo)) / (2 * h);
    worst = std::max(worst, std::fabs(fd - grad[p]));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("train_logistic: single-class training is degenerate") {
  Dataset ds = toy_dataset({{1.0}, {2.0}}, {3, 3}, {"x"});
  CHECK_THROWS_AS(train_logistic(ds, class_weights(ds.labels), {}), DegenerateTraining);
}

TEST_CASE("train_forest: identical seeds give identical predictions") {
  CounterRng rng(33, 6);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(0, 1), b = rng.uniform(0, 1);
    rows.push_back({a, b});
    labels.push_back(a > b ? 2 : 4);
  }
  Dataset ds = toy_dataset(rows, labels, {"a", "b"});
  ForestConfig config;
  config.n_trees = 40;
  ForestModel f1 = train_forest(ds, class_weights(ds.labels), config, Exec::Parallel);
  ForestModel f2 = train_forest(ds, class_weights(ds.labels), config, Exec::Serial);
  CHECK(f1.predict(ds, Exec::Serial) == f2.predict(ds, Exec::Parallel));
  // importance is schedule-independent too
  auto i1 = f1.feature_importance();
  auto i2 = f2.feature_importance();
  REQUIRE(i1.size() == i2.size());
  for (size_t k = 0; k < i1.size(); ++k) {
    CHECK(i1[k].first == i2[k].first);
    CHECK(i1[k].second == i2[k].second);
  }
}

TEST_CASE("train_forest: captures XOR structure that logistic regression cannot") {
  CounterRng rng(55, 7);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 400; ++i) {
    const double a = rng.uniform(0, 1), b = rng.uniform(0, 1);
    rows.push_back({a, b});
    labels.push_back(((a < 0.5) != (b < 0.5)) ? 2 : 1);
  }
  Dataset all = toy_dataset(rows, labels, {"a", "b"});
  Dataset train = toy_dataset({rows.begin(), rows.begin() + 300},
                              {labels.begin(), labels.begin() + 300}, {"a", "b"});
  Dataset test = toy_dataset({rows.begin() + 300, rows.end()},
                             {labels.begin() + 300, labels.end()}, {"a", "b"});

  ForestConfig config;
  config.n_trees = 100;
  ForestModel forest = train_forest(train, class_weights(train.labels), config);
  const double forest_acc = evaluate(forest.predict(test), test.labels).accuracy;
  CHECK(forest_acc >= 0.95);

  LogisticModel logistic = train_logistic(train, class_weights(train.labels), {});
  const double logistic_acc = evaluate(logistic.predict(test), test.labels).accuracy;
  CHECK(logistic_acc <= 0.70);  // no linear separation exists
}

TEST_CASE("train_forest: more trees do not hurt on noisy data") {
  double acc1 = 0.0, acc200 = 0.0;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    CounterRng rng(seed, 8);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 300; ++i) {
      const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1);
      rows.push_back({a, b});
      const double signal = a + 0.7 * b + rng.uniform(-0.8, 0.8);
      labels.push_back(signal > 0.3 ? 3 : (signal < -0.3 ? 1 : 2));
    }
    Dataset train = toy_dataset({rows.begin(), rows.begin() + 200},
                                {labels.begin(), labels.begin() + 200}, {"a", "b"});
    Dataset test = toy_dataset({rows.begin() + 200, rows.end()},
                               {labels.begin() + 200, labels.end()}, {"a", "b"});
    ForestConfig one;
    one.n_trees = 1;
    one.seed = seed;
    ForestConfig many;
    many.n_trees = 200;
    many.seed = seed;
    acc1 += evaluate(train_forest(train, class_weights(train.labels), one).predict(test),
                     test.labels)
                .accuracy;
    acc200 += evaluate(train_forest(train, class_weights(train.labels), many).predict(test),
                       test.labels)
                  .accuracy;
  }
  CHECK(acc200 / 5.0 >= acc1 / 5.0);
}

TEST_CASE("feature importance: signal outranks noise, forest scores sum to one") {
  CounterRng rng(66, 9);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 240; ++i) {
    const double signal = rng.uniform(-1, 1);
    rows.push_back({signal, rng.uniform(-1, 1)});
    labels.push_back(signal > 0 ? 2 : 1);
  }
  Dataset ds = toy_dataset(rows, labels, {"signal", "noise"});

  ForestConfig config;
  config.n_trees = 60;
  ForestModel forest = train_forest(ds, class_weights(ds.labels), config);
  auto fi = forest.feature_importance();
  REQUIRE(fi.size() == 2);
  CHECK(fi[0].first == "signal");
  double total = 0.0;
  for (const auto& [name, score] : fi) total += score;
  CHECK(std::fabs(total - 1.0) <= 1e-9);

  LogisticModel logistic = train_logistic(ds, class_weights(ds.labels), {});
  auto li = logistic.feature_importance();
  REQUIRE(li.size() == 2);
  CHECK(li[0].first == "signal");
}

TEST_CASE("train_forest: single-class training is degenerate") {
  Dataset ds = toy_dataset({{1.0}, {2.0}}, {2, 2}, {"x"});
  CHECK_THROWS_AS(train_forest(ds, class_weights(ds.labels), {}), DegenerateTraining);
}
