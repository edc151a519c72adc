#pragma once

#include <map>
#include <span>
#include <vector>

#include "ipcfuse/predict.hpp"

namespace ipcfuse::predict {

struct LogisticConfig {
  double l2 = 1.0;          // ridge strength on non-intercept weights
  double tol = 1e-8;        // stop when the gradient norm falls below this
  int max_iter = 10000;
  double armijo_c = 1e-4;   // sufficient-decrease constant for backtracking
};

/// Weighted multinomial cross-entropy with an L2 penalty, over standardized
/// features. Parameter layout: per class, n_features weights then one
/// intercept. Exposed so tests can difference the loss against the gradient.
class LogisticProblem {
 public:
  LogisticProblem(const Dataset& data, const std::map<int, double>& weights,
                  const LogisticConfig& config);

  double loss(std::span<const double> params) const;
  std::vector<double> gradient(std::span<const double> params) const;

  size_t n_params() const { return (n_features_ + 1) * classes_.size(); }
  size_t n_features() const { return n_features_; }
  const std::vector<int>& classes() const { return classes_; }
  const std::vector<double>& feature_means() const { return means_; }
  const std::vector<double>& feature_scales() const { return scales_; }

 private:
  friend class LogisticModel;
  std::vector<double> scores(std::span<const double> params, size_t row) const;

  std::vector<std::vector<double>> x_;  // standardized rows
  std::vector<size_t> y_;               // class indices
  std::vector<double> row_weight_;
  std::vector<int> classes_;
  std::vector<double> means_, scales_;
  double total_weight_ = 0.0;
  size_t n_features_ = 0;
  double l2_ = 1.0;
};

class LogisticModel {
 public:
  std::vector<int> predict(const Dataset& data) const;
  Importance feature_importance() const;

  const std::vector<double>& parameters() const { return params_; }
  const std::vector<int>& classes() const { return classes_; }
  /// Loss recorded at every accepted optimizer step, non-increasing.
  const std::vector<double>& loss_trace() const { return loss_trace_; }
  int iterations() const { return iterations_; }

 private:
  friend LogisticModel train_logistic(const Dataset&, const std::map<int, double>&,
                                      const LogisticConfig&);
  std::vector<double> params_;
  std::vector<int> classes_;
  std::vector<double> means_, scales_;
  std::vector<std::string> feature_names_;
  std::vector<double> loss_trace_;
  int iterations_ = 0;
};

/// Deterministic full-batch gradient descent with backtracking line search.
/// Throws DegenerateTraining when fewer than two classes are present.
LogisticModel train_logistic(const Dataset& train, const std::map<int, double>& weights,
                             const LogisticConfig& config = {});

}  // namespace ipcfuse::predict
