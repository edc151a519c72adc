#include "ipcfuse/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ipcfuse/errors.hpp"
#include "ipcfuse/rng.hpp"

namespace ipcfuse::predict {

namespace {

constexpr uint64_t kForestStream = 0x464f52455354ULL;

double gini(const std::array<double, 5>& w, double total) {
  if (total <= 0.0) return 0.0;
  double acc = 1.0;
  for (double v : w) {
    const double p = v / total;
    acc -= p * p;
  }
  return acc;
}

struct TreeBuilder {
  const Dataset& data;
  const std::array<double, 5>& label_weight;  // weight per phase
  const ForestConfig& config;
  CounterRng rng;
  ForestModel::Tree tree;
  std::map<size_t, double> importance;  // feature index -> gini decrease

  TreeBuilder(const Dataset& d, const std::array<double, 5>& lw, const ForestConfig& c,
              uint64_t tree_seed)
      : data(d), label_weight(lw), config(c), rng(tree_seed, kForestStream) {}

  int build(std::vector<size_t>& samples) {
    std::array<double, 5> hist{};
    double total_w = 0.0;
    int first_label = data.labels[samples.front()];
    bool pure = true;
    for (size_t i : samples) {
      const int label = data.labels[i];
      hist[static_cast<size_t>(label - 1)] += label_weight[static_cast<size_t>(label - 1)];
      total_w += label_weight[static_cast<size_t>(label - 1)];
      if (label != first_label) pure = false;
    }
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[node_id].class_weight = hist;
    if (pure || samples.size() < 2 * static_cast<size_t>(config.min_samples_leaf)) {
      return node_id;
    }

    const double parent_gini = gini(hist, total_w);
    const size_t d = data.n_features();
    const size_t mtry = config.max_features > 0
                            ? std::min<size_t>(config.max_features, d)
                            : static_cast<size_t>(std::ceil(std::sqrt(static_cast<double>(d))));

    // partial Fisher-Yates draw of mtry distinct features
    std::vector<size_t> feats(d);
    std::iota(feats.begin(), feats.end(), size_t{0});
    for (size_t k = 0; k < mtry; ++k) {
      const size_t j = k + rng.uniform_int(d - k);
      std::swap(feats[k], feats[j]);
    }

    struct Split {
      double score = 0.0;
      size_t feature = 0;
      double threshold = 0.0;
      bool found = false;
    } best;

    std::vector<std::pair<double, size_t>> vals(samples.size());
    for (size_t k = 0; k < mtry; ++k) {
      const size_t f = feats[k];
      for (size_t s = 0; s < samples.size(); ++s) {
        vals[s] = {data.rows[samples[s]][f], samples[s]};
      }
      std::sort(vals.begin(), vals.end());
      std::array<double, 5> left{};
      double left_w = 0.0;
      for (size_t s = 0; s + 1 < vals.size(); ++s) {
        const int label = data.labels[vals[s].second];
        left[static_cast<size_t>(label - 1)] += label_weight[static_cast<size_t>(label - 1)];
        left_w += label_weight[static_cast<size_t>(label - 1)];
        if (vals[s].first == vals[s + 1].first) continue;  // not a boundary
        const size_t n_left = s + 1, n_right = vals.size() - n_left;
        if (n_left < static_cast<size_t>(config.min_samples_leaf) ||
            n_right < static_cast<size_t>(config.min_samples_leaf))
          continue;
        std::array<double, 5> right{};
        for (size_t c = 0; c < 5; ++c) right[c] = hist[c] - left[c];
        const double right_w = total_w - left_w;
        const double score = total_w * parent_gini - left_w * gini(left, left_w) -
                             right_w * gini(right, right_w);
        if (!best.found || score > best.score) {
          best = {score, f, 0.5 * (vals[s].first + vals[s + 1].first), true};
        }
      }
    }

    if (!best.found || best.score <= 1e-12) return node_id;

    std::vector<size_t> left_samples, right_samples;
    for (size_t i : samples) {
      (data.rows[i][best.feature] <= best.threshold ? left_samples : right_samples).push_back(i);
    }
    if (left_samples.empty() || right_samples.empty()) return node_id;  // numeric edge

    importance[best.feature] += best.score;
    samples.clear();
    samples.shrink_to_fit();
    const int left_id = build(left_samples);
    const int right_id = build(right_samples);
    tree.nodes[node_id].feature = static_cast<int>(best.feature);
    tree.nodes[node_id].threshold = best.threshold;
    tree.nodes[node_id].left = left_id;
    tree.nodes[node_id].right = right_id;
    return node_id;
  }
};

const ForestModel::Node& leaf_for(const ForestModel::Tree& tree, std::span<const double> row) {
  int id = 0;
  while (tree.nodes[static_cast<size_t>(id)].feature >= 0) {
    const auto& n = tree.nodes[static_cast<size_t>(id)];
    id = row[static_cast<size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return tree.nodes[static_cast<size_t>(id)];
}

}  // namespace

ForestModel train_forest(const Dataset& train, const std::map<int, double>& weights,
                         const ForestConfig& config, Exec exec) {
  if (train.rows.empty()) throw DegenerateTraining("empty training set");
  std::set<int> distinct(train.labels.begin(), train.labels.end());
  if (distinct.size() < 2) throw DegenerateTraining("training labels contain a single class");

  std::array<double, 5> label_weight;
  label_weight.fill(1.0);
  for (const auto& [label, w] : weights) {
    if (label >= 1 && label <= 5) label_weight[static_cast<size_t>(label - 1)] = w;
  }

  ForestModel model;
  model.feature_names_ = train.feature_names;
  model.trees_.resize(static_cast<size_t>(config.n_trees));
  std::vector<std::map<size_t, double>> importances(static_cast<size_t>(config.n_trees));

  auto build_tree = [&](size_t t) {
    TreeBuilder builder(train, label_weight, config, config.seed + t);
    const size_t n = train.size();
    std::vector<size_t> samples(n);
    for (auto& s : samples) s = builder.rng.uniform_int(n);
    std::sort(samples.begin(), samples.end());  // stable node statistics
    builder.build(samples);
    model.trees_[t] = std::move(builder.tree);
    importances[t] = std::move(builder.importance);
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (size_t t = 0; t < model.trees_.size(); ++t) build_tree(t);
  } else {
    for (size_t t = 0; t < model.trees_.size(); ++t) build_tree(t);
  }

  // merge importances in tree order so the result is schedule-independent
  for (const auto& imp : importances) {
    for (const auto& [feature, score] : imp) {
      model.raw_importance_[model.feature_names_[feature]] += score;
    }
  }
  return model;
}

std::vector<int> ForestModel::predict(const Dataset& data, Exec exec) const {
  std::vector<int> out(data.size());
  auto classify = [&](size_t i) {
    std::array<double, 5> acc{};
    for (const Tree& tree : trees_) {
      const Node& leaf = leaf_for(tree, data.rows[i]);
      double total = 0.0;
      for (double v : leaf.class_weight) total += v;
      if (total <= 0.0) continue;
      for (size_t c = 0; c < 5; ++c) acc[c] += leaf.class_weight[c] / total;
    }
    size_t best = 0;
    for (size_t c = 1; c < 5; ++c) {
      if (acc[c] > acc[best]) best = c;  // ties keep the lowest phase
    }
    out[i] = static_cast<int>(best + 1);
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (size_t i = 0; i < out.size(); ++i) classify(i);
  } else {
    for (size_t i = 0; i < out.size(); ++i) classify(i);
  }
  return out;
}

Importance ForestModel::feature_importance() const {
  double total = 0.0;
  for (const auto& [name, score] : raw_importance_) total += score;
  std::map<std::string, double> normalized;
  for (const auto& name : feature_names_) normalized[name] = 0.0;
  for (const auto& [name, score] : raw_importance_) {
    normalized[name] = total > 0.0 ? score / total : 0.0;
  }
  return rank_importance(normalized);
}

}  // namespace ipcfuse::predict
