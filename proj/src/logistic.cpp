#include "ipcfuse/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ipcfuse/errors.hpp"

namespace ipcfuse::predict {

LogisticProblem::LogisticProblem(const Dataset& data, const std::map<int, double>& weights,
                                 const LogisticConfig& config)
    : l2_(config.l2) {
  n_features_ = data.n_features();
  std::set<int> labels(data.labels.begin(), data.labels.end());
  classes_.assign(labels.begin(), labels.end());

  // standardization parameters from the training data
  means_.assign(n_features_, 0.0);
  scales_.assign(n_features_, 1.0);
  const double n = static_cast<double>(data.size());
  for (size_t j = 0; j < n_features_; ++j) {
    double m = 0.0;
    for (const auto& row : data.rows) m += row[j];
    m /= n;
    double var = 0.0;
    for (const auto& row : data.rows) var += (row[j] - m) * (row[j] - m);
    var /= n;
    means_[j] = m;
    scales_[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }

  x_.reserve(data.size());
  y_.reserve(data.size());
  row_weight_.reserve(data.size());
  for (size_t i = 0; i < data.size(); ++i) {
    std::vector<double> row(n_features_);
    for (size_t j = 0; j < n_features_; ++j) row[j] = (data.rows[i][j] - means_[j]) / scales_[j];
    x_.push_back(std::move(row));
    const auto cls = std::lower_bound(classes_.begin(), classes_.end(), data.labels[i]);
    y_.push_back(static_cast<size_t>(cls - classes_.begin()));
    const double w = weights.count(data.labels[i]) ? weights.at(data.labels[i]) : 1.0;
    row_weight_.push_back(w);
    total_weight_ += w;
  }
}

std::vector<double> LogisticProblem::scores(std::span<const double> params, size_t row) const {
  const size_t k = classes_.size();
  const size_t stride = n_features_ + 1;
  std::vector<double> z(k);
  for (size_t c = 0; c < k; ++c) {
    double acc = params[c * stride + n_features_];  // intercept
    const double* w = params.data() + c * stride;
    const double* x = x_[row].data();
    for (size_t j = 0; j < n_features_; ++j) acc += w[j] * x[j];
    z[c] = acc;
  }
  return z;
}

double LogisticProblem::loss(std::span<const double> params) const {
  const size_t k = classes_.size();
  const size_t stride = n_features_ + 1;
  double data_term = 0.0;
  for (size_t i = 0; i < x_.size(); ++i) {
    std::vector<double> z = scores(params, i);
    const double zmax = *std::max_element(z.begin(), z.end());
    double lse = 0.0;
    for (double v : z) lse += std::exp(v - zmax);
    lse = zmax + std::log(lse);
    data_term += row_weight_[i] * (lse - z[y_[i]]);
  }
  data_term /= total_weight_;
  double penalty = 0.0;
  for (size_t c = 0; c < k; ++c) {
    for (size_t j = 0; j < n_features_; ++j) {
      const double w = params[c * stride + j];
      penalty += w * w;
    }
  }
  return data_term + 0.5 * l2_ * penalty;
}

std::vector<double> LogisticProblem::gradient(std::span<const double> params) const {
  const size_t k = classes_.size();
  const size_t stride = n_features_ + 1;
  std::vector<double> grad(params.size(), 0.0);
  for (size_t i = 0; i < x_.size(); ++i) {
    std::vector<double> z = scores(params, i);
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
      v = std::exp(v - zmax);
      sum += v;
    }
    for (size_t c = 0; c < k; ++c) {
      const double p = z[c] / sum;
      const double delta = row_weight_[i] * (p - (y_[i] == c ? 1.0 : 0.0));
      double* g = grad.data() + c * stride;
      const double* x = x_[i].data();
      for (size_t j = 0; j < n_features_; ++j) g[j] += delta * x[j];
      g[n_features_] += delta;
    }
  }
  for (double& g : grad) g /= total_weight_;
  for (size_t c = 0; c < k; ++c) {
    for (size_t j = 0; j < n_features_; ++j) {
      grad[c * stride + j] += l2_ * params[c * stride + j];
    }
  }
  return grad;
}

LogisticModel train_logistic(const Dataset& train, const std::map<int, double>& weights,
                             const LogisticConfig& config) {
  if (train.rows.empty()) throw DegenerateTraining("empty training set");
  LogisticProblem problem(train, weights, config);
  if (problem.classes().size() < 2)
    throw DegenerateTraining("training labels contain a single class");

  std::vector<double> params(problem.n_params(), 0.0);
  double f = problem.loss(params);
  std::vector<double> loss_trace{f};
  double step = 1.0;
  int iter = 0;
  for (; iter < config.max_iter; ++iter) {
    const std::vector<double> grad = problem.gradient(params);
    double g2 = 0.0;
    for (double g : grad) g2 += g * g;
    if (std::sqrt(g2) <= config.tol) break;

    // backtracking line search along the negative gradient
    step = std::min(step * 2.0, 1e6);
    std::vector<double> trial(params.size());
    double f_new = f;
    while (true) {
      for (size_t p = 0; p < params.size(); ++p) trial[p] = params[p] - step * grad[p];
      f_new = problem.loss(trial);
      if (f_new <= f - config.armijo_c * step * g2) break;
      step *= 0.5;
      if (step < 1e-18) break;  // no decrease possible at double precision
    }
    if (f_new > f) break;  // converged to machine limits
    params.swap(trial);
    f = f_new;
    loss_trace.push_back(f);
    if (step < 1e-18) break;
  }

  LogisticModel model;
  model.params_ = std::move(params);
  model.classes_ = problem.classes();
  model.means_ = problem.feature_means();
  model.scales_ = problem.feature_scales();
  model.feature_names_ = train.feature_names;
  model.loss_trace_ = std::move(loss_trace);
  model.iterations_ = iter;
  return model;
}

std::vector<int> LogisticModel::predict(const Dataset& data) const {
  const size_t k = classes_.size();
  const size_t d = means_.size();
  const size_t stride = d + 1;
  std::vector<int> out;
  out.reserve(data.size());
  for (const auto& raw : data.rows) {
    size_t best = 0;
    double best_z = -1e300;
    for (size_t c = 0; c < k; ++c) {
      double z = params_[c * stride + d];
      for (size_t j = 0; j < d; ++j) {
        z += params_[c * stride + j] * ((raw[j] - means_[j]) / scales_[j]);
      }
      if (z > best_z + 0.0) {  // ties keep the lowest class
        best_z = z;
        best = c;
      }
    }
    out.push_back(classes_[best]);
  }
  return out;
}

Importance LogisticModel::feature_importance() const {
  const size_t k = classes_.size();
  const size_t d = means_.size();
  const size_t stride = d + 1;
  std::map<std::string, double> scores;
  for (size_t j = 0; j < d; ++j) {
    double acc = 0.0;
    for (size_t c = 0; c < k; ++c) acc += std::fabs(params_[c * stride + j]);
    scores[feature_names_[j]] = acc / static_cast<double>(k);
  }
  return rank_importance(scores);
}

}  // namespace ipcfuse::predict
