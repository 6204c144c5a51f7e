#include "newslabel/autolabel.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "newslabel/errors.hpp"
#include "newslabel/log.hpp"

namespace newslabel {

std::size_t AutoLabeledRecord::dominant_index() const {
  std::size_t best = 0;
  for (std::size_t c = 1; c < class_probs.size(); ++c) {
    if (class_probs[c].second > class_probs[best].second) best = c;
  }
  return best;
}

double AutoLabeledRecord::max_probability() const {
  return class_probs[dominant_index()].second;
}

std::size_t MultiLabelSet::cardinality() const {
  std::size_t n = 0;
  for (auto b : bits) n += b;
  return n;
}

// Shortest-augmenting-path assignment with potentials (minimizing form
// internally; scores are negated).
std::vector<int> hungarian_max_assignment(const std::vector<std::vector<double>>& score) {
  const int n = static_cast<int>(score.size());
  if (n == 0) throw DataError("empty assignment problem");
  for (const auto& row : score) {
    if (static_cast<int>(row.size()) != n) throw DataError("assignment matrix must be square");
  }
  const double INF = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> min_slack(n + 1, INF);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = INF;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -score[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (match[j] != 0) assignment[match[j] - 1] = j - 1;
  }
  return assignment;
}

TopicClassMap assign_topic_names(const LdaModel& model,
                                 std::span<const std::string> original_labels,
                                 std::span<const std::string> class_names) {
  const int K = model.num_topics;
  const int L = static_cast<int>(class_names.size());
  if (K != L) {
    throw ConfigError("automatic topic naming needs as many topics as classes (K=" +
                      std::to_string(K) + ", L=" + std::to_string(L) + ")");
  }
  if (original_labels.size() != model.doc_topic_counts.size()) {
    throw DataError("original labels must align with the LDA training documents");
  }

  std::unordered_map<std::string, int> class_index;
  for (int l = 0; l < L; ++l) class_index[std::string(class_names[l])] = l;

  std::vector<std::vector<double>> contingency(K, std::vector<double>(L, 0.0));
  std::vector<std::size_t> docs_per_topic(K, 0);
  for (std::size_t d = 0; d < original_labels.size(); ++d) {
    if (model.doc_token_total(d) == 0) continue;
    auto it = class_index.find(original_labels[d]);
    if (it == class_index.end()) {
      throw DataError("label '" + original_labels[d] + "' is not in class_names");
    }
    const int topic = dominant_topic(doc_topic_distribution(model, d));
    contingency[topic][it->second] += 1.0;
    ++docs_per_topic[topic];
  }
  for (int k = 0; k < K; ++k) {
    if (docs_per_topic[k] == 0) {
      throw DataError("degenerate contingency: topic " + std::to_string(k) +
                      " is dominant for no document");
    }
  }

  const std::vector<int> assignment = hungarian_max_assignment(contingency);
  TopicClassMap map;
  map.topic_to_class.resize(K);
  for (int k = 0; k < K; ++k) map.topic_to_class[k] = class_names[assignment[k]];
  return map;
}

TopicClassMap make_topic_map(std::vector<std::string> topic_to_class,
                             std::span<const std::string> class_names) {
  if (topic_to_class.size() != class_names.size()) {
    throw ConfigError("topic map must name every class exactly once");
  }
  std::unordered_set<std::string> expected(class_names.begin(), class_names.end());
  std::unordered_set<std::string> seen;
  for (const auto& name : topic_to_class) {
    if (!expected.count(name)) throw ConfigError("topic map names unknown class '" + name + "'");
    if (!seen.insert(name).second) {
      throw ConfigError("topic map assigns class '" + name + "' to two topics");
    }
  }
  return TopicClassMap{std::move(topic_to_class)};
}

std::vector<AutoLabeledRecord> build_auto_dataset(const LdaModel& model, const TopicClassMap& map,
                                                  std::span<const ProcessedDoc> docs,
                                                  std::span<const std::string> class_names) {
  if (docs.size() != model.doc_topic_counts.size()) {
    throw DataError("docs must align with the LDA training documents");
  }
  if (map.topic_to_class.size() != static_cast<std::size_t>(model.num_topics)) {
    throw ConfigError("topic map size does not match the model topic count");
  }
  std::unordered_map<std::string, std::size_t> class_index;
  for (std::size_t l = 0; l < class_names.size(); ++l) {
    class_index[std::string(class_names[l])] = l;
  }
  // topic -> position in class_names order
  std::vector<std::size_t> topic_to_slot(model.num_topics);
  for (int k = 0; k < model.num_topics; ++k) {
    topic_to_slot[k] = class_index.at(map.topic_to_class[k]);
  }

  std::vector<AutoLabeledRecord> records;
  records.reserve(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (model.doc_token_total(d) == 0) {
      warn("auto-label: document '" + docs[d].id + "' was skipped by LDA, skipping");
      continue;
    }
    if (!docs[d].label) {
      throw DataError("document '" + docs[d].id + "' has no original label to retain");
    }
    const TopicDistribution theta = doc_topic_distribution(model, d);
    AutoLabeledRecord rec;
    rec.id = docs[d].id;
    rec.class_probs.reserve(class_names.size());
    for (const auto& name : class_names) rec.class_probs.emplace_back(name, 0.0);
    for (int k = 0; k < model.num_topics; ++k) {
      rec.class_probs[topic_to_slot[k]].second += theta.probs[k];
    }
    rec.dominant_class = rec.class_probs[rec.dominant_index()].first;
    rec.original_label = *docs[d].label;
    rec.tokens = docs[d].tokens;
    records.push_back(std::move(rec));
  }
  return records;
}

std::pair<std::vector<AutoLabeledRecord>, std::vector<AutoLabeledRecord>> threshold_split(
    std::span<const AutoLabeledRecord> records, double th) {
  if (records.empty()) throw DataError("threshold_split needs at least one record");
  if (th <= 0.0 || th > 1.0) throw ConfigError("threshold must be in (0, 1]");
  std::vector<AutoLabeledRecord> train, test;
  for (const auto& rec : records) {
    if (rec.max_probability() >= th) {
      train.push_back(rec);
    } else {
      test.push_back(rec);
    }
  }
  if (train.empty()) {
    throw DataError("threshold " + std::to_string(th) + " leaves the training side empty");
  }
  return {std::move(train), std::move(test)};
}

std::vector<MultiLabelSet> multilabel_binarize(std::span<const AutoLabeledRecord> records,
                                               double th) {
  if (th <= 0.0 || th >= 1.0) throw ConfigError("multi-label threshold must be in (0, 1)");
  std::vector<MultiLabelSet> sets;
  sets.reserve(records.size());
  for (const auto& rec : records) {
    MultiLabelSet set;
    set.bits.reserve(rec.class_probs.size());
    for (const auto& [name, p] : rec.class_probs) {
      set.bits.push_back(p >= th ? 1 : 0);
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

std::map<std::size_t, std::size_t> label_cardinality_histogram(
    std::span<const MultiLabelSet> sets) {
  std::map<std::size_t, std::size_t> histogram;
  for (const auto& set : sets) ++histogram[set.cardinality()];
  return histogram;
}

MultiLabelSet onehot_from_single(const std::string& label,
                                 std::span<const std::string> class_names) {
  MultiLabelSet set;
  set.bits.assign(class_names.size(), 0);
  for (std::size_t l = 0; l < class_names.size(); ++l) {
    if (class_names[l] == label) {
      set.bits[l] = 1;
      return set;
    }
  }
  throw DataError("unknown class '" + label + "'");
}

}  // namespace newslabel
