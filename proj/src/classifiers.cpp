#include "newslabel/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "newslabel/errors.hpp"
#include "newslabel/log.hpp"
#include "newslabel/rng.hpp"

namespace newslabel {

LossKind loss_kind_from_string(const std::string& name) {
  if (name == "log" || name == "logistic") return LossKind::log;
  if (name == "hinge") return LossKind::hinge;
  throw ConfigError("unknown loss kind '" + name + "'");
}

KnnMetric knn_metric_from_string(const std::string& name) {
  if (name == "cosine") return KnnMetric::cosine;
  if (name == "euclidean") return KnnMetric::euclidean;
  throw ConfigError("unknown knn metric '" + name + "'");
}

namespace {

void check_matrix(const std::vector<std::vector<double>>& X) {
  if (X.empty()) throw DataError("empty training set");
  const std::size_t dim = X.front().size();
  for (const auto& row : X) {
    if (row.size() != dim) throw DataError("feature dimension mismatch in training data");
  }
}

void softmax_inplace(std::vector<double>& scores) {
  const double m = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - m);
    sum += s;
  }
  for (double& s : scores) s /= sum;
}

}  // namespace

LinearModel fit_linear(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                       const LinearFitParams& params) {
  check_matrix(X);
  if (X.size() != y.size()) throw DataError("feature/label count mismatch");
  if (params.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (params.l2 < 0.0) throw ConfigError("l2 must be >= 0");

  int num_classes = 0;
  std::set<int> distinct;
  for (int label : y) {
    if (label < 0) throw DataError("class ids must be >= 0");
    distinct.insert(label);
    num_classes = std::max(num_classes, label + 1);
  }
  if (distinct.size() < 2) throw DataError("training data contains a single class");

  LinearModel model;
  model.num_classes = num_classes;
  model.num_features = static_cast<int>(X.front().size());
  model.loss = params.loss;
  model.l2 = params.l2;
  model.weights.assign(static_cast<std::size_t>(num_classes) * model.num_features, 0.0);
  model.bias.assign(num_classes, 0.0);

  Rng rng(params.seed);
  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> scores(num_classes);
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(order);
    for (const std::size_t idx : order) {
      const double lr = params.initial_lr / (1.0 + params.l2 * params.initial_lr * t);
      ++t;
      const auto& x = X[idx];
      const int target = y[idx];

      if (params.loss == LossKind::log) {
        for (int c = 0; c < num_classes; ++c) {
          double s = model.bias[c];
          const double* w = model.weights.data() + static_cast<std::size_t>(c) * model.num_features;
          for (int f = 0; f < model.num_features; ++f) s += w[f] * x[f];
          scores[c] = s;
        }
        softmax_inplace(scores);
        for (int c = 0; c < num_classes; ++c) {
          const double err = scores[c] - (c == target ? 1.0 : 0.0);
          double* w = model.weights.data() + static_cast<std::size_t>(c) * model.num_features;
          for (int f = 0; f < model.num_features; ++f) {
            w[f] -= lr * (err * x[f] + params.l2 * w[f]);
          }
          model.bias[c] -= lr * err;
        }
      } else {
        for (int c = 0; c < num_classes; ++c) {
          double s = model.bias[c];
          double* w = model.weights.data() + static_cast<std::size_t>(c) * model.num_features;
          for (int f = 0; f < model.num_features; ++f) s += w[f] * x[f];
          const double sign = c == target ? 1.0 : -1.0;
          const bool in_margin = sign * s < 1.0;
          for (int f = 0; f < model.num_features; ++f) {
            const double grad = (in_margin ? -sign * x[f] : 0.0) + params.l2 * w[f];
            w[f] -= lr * grad;
          }
          if (in_margin) model.bias[c] += lr * sign;
        }
      }
    }
  }
  return model;
}

std::vector<double> decision_scores(const LinearModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.num_features) {
    throw DataError("feature dimension mismatch (got " + std::to_string(x.size()) + ", expected " +
                    std::to_string(model.num_features) + ")");
  }
  std::vector<double> scores(model.num_classes);
  for (int c = 0; c < model.num_classes; ++c) {
    double s = model.bias[c];
    const auto w = model.row(c);
    for (int f = 0; f < model.num_features; ++f) s += w[f] * x[f];
    scores[c] = s;
  }
  return scores;
}

int predict(const LinearModel& model, std::span<const double> x) {
  const auto scores = decision_scores(model, x);
  int best = 0;
  for (int c = 1; c < model.num_classes; ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return best;
}

std::vector<double> predict_proba(const LinearModel& model, std::span<const double> x) {
  if (model.loss == LossKind::hinge) {
    throw NumericError("hinge-loss models have no class probabilities");
  }
  auto scores = decision_scores(model, x);
  softmax_inplace(scores);
  return scores;
}

double softmax_loss_and_grad(const LinearModel& model, const std::vector<std::vector<double>>& X,
                             const std::vector<int>& y, std::vector<double>& grad_weights,
                             std::vector<double>& grad_bias) {
  check_matrix(X);
  if (X.size() != y.size()) throw DataError("feature/label count mismatch");
  const int C = model.num_classes;
  const int F = model.num_features;
  grad_weights.assign(static_cast<std::size_t>(C) * F, 0.0);
  grad_bias.assign(C, 0.0);

  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(X.size());
  std::vector<double> scores(C);
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (int c = 0; c < C; ++c) {
      double s = model.bias[c];
      const auto w = model.row(c);
      for (int f = 0; f < F; ++f) s += w[f] * X[i][f];
      scores[c] = s;
    }
    softmax_inplace(scores);
    loss -= std::log(std::max(scores[y[i]], 1e-300)) * inv_n;
    for (int c = 0; c < C; ++c) {
      const double err = (scores[c] - (c == y[i] ? 1.0 : 0.0)) * inv_n;
      double* gw = grad_weights.data() + static_cast<std::size_t>(c) * F;
      for (int f = 0; f < F; ++f) gw[f] += err * X[i][f];
      grad_bias[c] += err;
    }
  }
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    loss += 0.5 * model.l2 * model.weights[j] * model.weights[j];
    grad_weights[j] += model.l2 * model.weights[j];
  }
  return loss;
}

KnnModel fit_knn(std::vector<std::vector<double>> X, std::vector<int> y, int k, KnnMetric metric) {
  check_matrix(X);
  if (X.size() != y.size()) throw DataError("feature/label count mismatch");
  if (k < 1 || static_cast<std::size_t>(k) > X.size()) {
    throw ConfigError("k must be in [1, number of stored examples]");
  }
  return KnnModel{std::move(X), std::move(y), k, metric};
}

namespace {

double knn_distance(const KnnModel& model, std::span<const double> a, std::span<const double> b) {
  if (model.metric == KnnMetric::cosine) {
    double num = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      num += a[i] * b[i];
      na += a[i] * a[i];
      nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 1.0;
    return 1.0 - num / (std::sqrt(na) * std::sqrt(nb));
  }
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d2 += diff * diff;
  }
  return std::sqrt(d2);
}

}  // namespace

int knn_predict(const KnnModel& model, std::span<const double> x) {
  if (model.vectors.empty()) throw DataError("empty training set");
  if (x.size() != model.vectors.front().size()) throw DataError("feature dimension mismatch");

  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(model.vectors.size());
  for (std::size_t i = 0; i < model.vectors.size(); ++i) {
    dist.emplace_back(knn_distance(model, model.vectors[i], x), i);
  }
  // ties on distance go to the lower stored index
  std::sort(dist.begin(), dist.end());

  std::unordered_map<int, int> votes;
  for (int i = 0; i < model.k; ++i) votes[model.labels[dist[i].second]] += 1;
  int best_class = -1, best_votes = -1;
  for (const auto& [cls, n] : votes) {
    if (n > best_votes || (n == best_votes && cls < best_class)) {
      best_class = cls;
      best_votes = n;
    }
  }
  return best_class;
}

bool BrMember::decide(std::span<const double> x) const {
  if (constant) return *constant != 0;
  if (linear) return predict(*linear, x) == 1;
  return knn_predict(*knn, x) == 1;
}

BinaryRelevanceModel fit_binary_relevance(const std::vector<std::vector<double>>& X,
                                          std::span<const MultiLabelSet> Y,
                                          std::span<const std::string> class_names,
                                          const BinaryRelevanceConfig& config) {
  check_matrix(X);
  if (X.size() != Y.size()) throw DataError("feature/label count mismatch");
  const std::size_t L = class_names.size();
  for (const auto& set : Y) {
    if (set.bits.size() != L) throw DataError("label set length does not match class count");
  }

  BinaryRelevanceModel model;
  model.class_names.assign(class_names.begin(), class_names.end());
  model.members.resize(L);

  for (std::size_t c = 0; c < L; ++c) {
    std::vector<int> bits(X.size());
    std::size_t positives = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      bits[i] = Y[i].bits[c] != 0 ? 1 : 0;
      positives += bits[i];
    }
    if (positives == 0 || positives == X.size()) {
      const int value = positives == 0 ? 0 : 1;
      warn("class '" + model.class_names[c] + "' has only " +
           (value == 0 ? std::string("negative") : std::string("positive")) +
           " examples; fitting a constant predictor");
      model.members[c].constant = value;
      continue;
    }
    if (config.base == BrBaseKind::linear) {
      LinearFitParams p = config.linear;
      // stagger member seeds so shuffles differ per class but stay reproducible
      p.seed = config.linear.seed + c;
      model.members[c].linear = fit_linear(X, bits, p);
    } else {
      const int k = std::min<int>(config.knn_k, static_cast<int>(X.size()));
      model.members[c].knn = fit_knn(X, bits, k, config.knn_metric);
    }
  }
  return model;
}

MultiLabelSet predict_multilabel(const BinaryRelevanceModel& model, std::span<const double> x) {
  MultiLabelSet set;
  set.bits.reserve(model.members.size());
  for (const auto& member : model.members) {
    set.bits.push_back(member.decide(x) ? 1 : 0);
  }
  return set;
}

}  // namespace newslabel
