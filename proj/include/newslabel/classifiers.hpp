#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "newslabel/autolabel.hpp"

namespace newslabel {

enum class LossKind { log, hinge };
enum class KnnMetric { cosine, euclidean };

LossKind loss_kind_from_string(const std::string& name);
KnnMetric knn_metric_from_string(const std::string& name);

struct LinearModel {
  int num_classes = 0;
  int num_features = 0;
  LossKind loss = LossKind::log;
  double l2 = 0.0;
  std::vector<double> weights;  // num_classes x num_features
  std::vector<double> bias;     // num_classes

  std::span<const double> row(int c) const {
    return {weights.data() + static_cast<std::size_t>(c) * num_features,
            static_cast<std::size_t>(num_features)};
  }
};

struct LinearFitParams {
  LossKind loss = LossKind::log;
  double l2 = 1e-4;
  int epochs = 30;
  double initial_lr = 0.1;
  std::uint64_t seed = 1;
};

// Multinomial softmax + cross-entropy for log loss, one-vs-rest hinge for
// hinge loss. SGD over seeded shuffles with lr_t = lr0 / (1 + l2 lr0 t).
// Deterministic for a fixed seed.
LinearModel fit_linear(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                       const LinearFitParams& params);

std::vector<double> decision_scores(const LinearModel& model, std::span<const double> x);
int predict(const LinearModel& model, std::span<const double> x);
// softmax probabilities; hinge models have none and throw
std::vector<double> predict_proba(const LinearModel& model, std::span<const double> x);

// Batch softmax loss (mean cross-entropy + l2/2 ||W||^2) and its analytic
// gradients; the SGD step applies exactly this per-sample gradient.
double softmax_loss_and_grad(const LinearModel& model, const std::vector<std::vector<double>>& X,
                             const std::vector<int>& y, std::vector<double>& grad_weights,
                             std::vector<double>& grad_bias);

struct KnnModel {
  std::vector<std::vector<double>> vectors;
  std::vector<int> labels;
  int k = 5;
  KnnMetric metric = KnnMetric::cosine;
};

KnnModel fit_knn(std::vector<std::vector<double>> X, std::vector<int> y, int k, KnnMetric metric);

// Majority vote among the k nearest; distance ties resolve to the lower
// stored index, vote ties to the smallest class id.
int knn_predict(const KnnModel& model, std::span<const double> x);

enum class BrBaseKind { linear, knn };

struct BinaryRelevanceConfig {
  BrBaseKind base = BrBaseKind::linear;
  LinearFitParams linear;  // used with base = linear (loss applies per member)
  int knn_k = 5;
  KnnMetric knn_metric = KnnMetric::cosine;
};

struct BrMember {
  std::optional<int> constant;  // degenerate class: always 0 or always 1
  std::optional<LinearModel> linear;
  std::optional<KnnModel> knn;

  bool decide(std::span<const double> x) const;
};

struct BinaryRelevanceModel {
  std::vector<std::string> class_names;
  std::vector<BrMember> members;  // one per class, class order
};

// One independent binary classifier per label; classes without both a
// positive and a negative example are fit as constant predictors (warned).
BinaryRelevanceModel fit_binary_relevance(const std::vector<std::vector<double>>& X,
                                          std::span<const MultiLabelSet> Y,
                                          std::span<const std::string> class_names,
                                          const BinaryRelevanceConfig& config);

MultiLabelSet predict_multilabel(const BinaryRelevanceModel& model, std::span<const double> x);

}  // namespace newslabel
