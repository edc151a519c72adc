#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ipcfuse/parallel.hpp"
#include "ipcfuse/predict.hpp"

namespace ipcfuse::predict {

struct ForestConfig {
  int n_trees = 200;
  uint64_t seed = 5;
  int min_samples_leaf = 1;
  int max_features = 0;  // 0 = ceil(sqrt(n_features)) per split
};

class ForestModel {
 public:
  /// Soft-vote prediction: leaf class distributions summed over trees in
  /// tree-index order, so the result never depends on evaluation order.
  std::vector<int> predict(const Dataset& data, Exec exec = Exec::Parallel) const;

  /// Total class-weighted Gini decrease per feature, normalized to sum 1,
  /// descending with alphabetical tie-break.
  Importance feature_importance() const;

  int n_trees() const { return static_cast<int>(trees_.size()); }

  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::array<double, 5> class_weight{};  // leaf histogram over phases 1..5
  };
  struct Tree {
    std::vector<Node> nodes;
  };

 private:
  friend ForestModel train_forest(const Dataset&, const std::map<int, double>&,
                                  const ForestConfig&, Exec);
  std::vector<Tree> trees_;
  std::vector<std::string> feature_names_;
  std::map<std::string, double> raw_importance_;
};

/// Bootstrap-sampled, feature-subsampled trees on class-weighted Gini
/// impurity. Randomness for tree t comes from a counter generator keyed by
/// seed + t, making results independent of build order. Throws
/// DegenerateTraining when fewer than two classes are present.
ForestModel train_forest(const Dataset& train, const std::map<int, double>& weights,
                         const ForestConfig& config = {}, Exec exec = Exec::Parallel);

}  // namespace ipcfuse::predict
