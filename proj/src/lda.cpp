#include "newslabel/lda.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "newslabel/errors.hpp"
#include "newslabel/log.hpp"
#include "newslabel/rng.hpp"

namespace newslabel {

namespace {

std::vector<std::uint32_t> expand_tokens(const SparseVector& bow) {
  std::vector<std::uint32_t> tokens;
  for (std::size_t i = 0; i < bow.indices.size(); ++i) {
    const double v = bow.values[i];
    const auto count = static_cast<std::uint64_t>(v);
    if (v < 0.0 || static_cast<double>(count) != v) {
      throw DataError("LDA input must be integer bag-of-words counts");
    }
    for (std::uint64_t c = 0; c < count; ++c) tokens.push_back(bow.indices[i]);
  }
  return tokens;
}

int sample_discrete(const std::vector<double>& cumulative, double total, Rng& rng) {
  const double u = rng.uniform() * total;
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const auto k = static_cast<int>(it - cumulative.begin());
  return std::min<int>(k, static_cast<int>(cumulative.size()) - 1);
}

}  // namespace

std::uint64_t LdaModel::doc_token_total(std::size_t d) const {
  const auto& row = doc_topic_counts.at(d);
  return std::accumulate(row.begin(), row.end(), std::uint64_t{0});
}

void LdaModel::validate_counts() const {
  const std::size_t V = vocab_size();
  for (int k = 0; k < num_topics; ++k) {
    std::uint64_t row_sum = 0;
    for (std::size_t v = 0; v < V; ++v) row_sum += word_count(k, static_cast<std::uint32_t>(v));
    if (row_sum != topic_totals[k]) {
      throw NumericError("LDA count invariant broken: topic " + std::to_string(k) +
                         " row sum != topic total");
    }
  }
  // token streams are only present on freshly trained models
  if (doc_tokens.size() == doc_topic_counts.size()) {
    for (std::size_t d = 0; d < doc_topic_counts.size(); ++d) {
      const std::uint64_t doc_sum = std::accumulate(doc_topic_counts[d].begin(),
                                                    doc_topic_counts[d].end(), std::uint64_t{0});
      if (doc_sum != doc_tokens[d].size()) {
        throw NumericError("LDA count invariant broken: doc " + std::to_string(d) +
                           " topic counts != token count");
      }
    }
  }
}

LdaModel train_lda(std::span<const SparseVector> corpus_bow, const LdaParams& params,
                   std::shared_ptr<const Vocabulary> vocab) {
  if (!vocab) throw ConfigError("train_lda needs a vocabulary");
  if (params.num_topics < 2) throw ConfigError("LDA needs at least 2 topics");
  if (params.alpha <= 0.0 || params.beta <= 0.0) throw ConfigError("LDA priors must be positive");
  if (corpus_bow.empty()) throw DataError("LDA corpus is empty");

  const int K = params.num_topics;
  const std::size_t V = vocab->size();
  const std::size_t D = corpus_bow.size();

  LdaModel model;
  model.num_topics = K;
  model.alpha = params.alpha;
  model.beta = params.beta;
  model.seed = params.seed;
  model.vocab = std::move(vocab);
  model.topic_word_counts.assign(static_cast<std::size_t>(K) * V, 0);
  model.topic_totals.assign(K, 0);
  model.doc_topic_counts.assign(D, std::vector<std::uint32_t>(K, 0));
  model.doc_tokens.resize(D);
  model.assignments.resize(D);

  Rng rng(params.seed);

  for (std::size_t d = 0; d < D; ++d) {
    model.doc_tokens[d] = expand_tokens(corpus_bow[d]);
    if (model.doc_tokens[d].empty()) {
      warn("LDA: document " + std::to_string(d) + " has no in-vocabulary tokens, skipped");
      continue;
    }
    auto& z = model.assignments[d];
    z.resize(model.doc_tokens[d].size());
    for (std::size_t j = 0; j < z.size(); ++j) {
      const auto topic = static_cast<std::uint16_t>(rng.uniform_index(K));
      const std::uint32_t w = model.doc_tokens[d][j];
      z[j] = topic;
      ++model.doc_topic_counts[d][topic];
      ++model.topic_word_counts[static_cast<std::size_t>(topic) * V + w];
      ++model.topic_totals[topic];
    }
  }

  const long total_sweeps = static_cast<long>(params.passes) * params.iterations;
  const double v_beta = static_cast<double>(V) * params.beta;
  std::vector<double> cumulative(K);

  for (long sweep = 0; sweep < total_sweeps; ++sweep) {
    for (std::size_t d = 0; d < D; ++d) {
      auto& z = model.assignments[d];
      auto& n_dk = model.doc_topic_counts[d];
      const auto& tokens = model.doc_tokens[d];
      for (std::size_t j = 0; j < tokens.size(); ++j) {
        const std::uint32_t w = tokens[j];
        const int old_topic = z[j];
        --n_dk[old_topic];
        --model.topic_word_counts[static_cast<std::size_t>(old_topic) * V + w];
        --model.topic_totals[old_topic];

        double total = 0.0;
        for (int k = 0; k < K; ++k) {
          const double p =
              (n_dk[k] + params.alpha) *
              (model.topic_word_counts[static_cast<std::size_t>(k) * V + w] + params.beta) /
              (static_cast<double>(model.topic_totals[k]) + v_beta);
          total += p;
          cumulative[k] = total;
        }
        const int new_topic = sample_discrete(cumulative, total, rng);

        z[j] = static_cast<std::uint16_t>(new_topic);
        ++n_dk[new_topic];
        ++model.topic_word_counts[static_cast<std::size_t>(new_topic) * V + w];
        ++model.topic_totals[new_topic];
      }
    }
#ifndef NDEBUG
    model.validate_counts();
#endif
  }
  return model;
}

TopicDistribution doc_topic_distribution(const LdaModel& model, std::size_t train_doc_index) {
  if (train_doc_index >= model.doc_topic_counts.size()) {
    throw DataError("training document index out of range");
  }
  const auto& n_dk = model.doc_topic_counts[train_doc_index];
  const double n_d = static_cast<double>(
      std::accumulate(n_dk.begin(), n_dk.end(), std::uint64_t{0}));
  if (n_d == 0.0) throw DataError("document has no tokens");
  TopicDistribution dist;
  dist.probs.resize(model.num_topics);
  const double denom = n_d + model.num_topics * model.alpha;
  for (int k = 0; k < model.num_topics; ++k) {
    dist.probs[k] = (n_dk[k] + model.alpha) / denom;
  }
  return dist;
}

TopicDistribution infer_topic_distribution(const LdaModel& model, const SparseVector& doc_bow,
                                           std::uint64_t seed, int sweeps) {
  const auto tokens = expand_tokens(doc_bow);
  if (tokens.empty()) throw DataError("document has no tokens");
  const int K = model.num_topics;
  const std::size_t V = model.vocab_size();
  const double v_beta = static_cast<double>(V) * model.beta;

  Rng rng(seed);
  std::vector<std::uint32_t> n_dk(K, 0);
  std::vector<std::uint16_t> z(tokens.size());
  for (std::size_t j = 0; j < tokens.size(); ++j) {
    const auto topic = static_cast<std::uint16_t>(rng.uniform_index(K));
    z[j] = topic;
    ++n_dk[topic];
  }

  std::vector<double> cumulative(K);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (std::size_t j = 0; j < tokens.size(); ++j) {
      const std::uint32_t w = tokens[j];
      --n_dk[z[j]];
      double total = 0.0;
      for (int k = 0; k < K; ++k) {
        // phi frozen: trained topic-word counts are not decremented
        const double phi =
            (model.topic_word_counts[static_cast<std::size_t>(k) * V + w] + model.beta) /
            (static_cast<double>(model.topic_totals[k]) + v_beta);
        const double p = (n_dk[k] + model.alpha) * phi;
        total += p;
        cumulative[k] = total;
      }
      const int new_topic = sample_discrete(cumulative, total, rng);
      z[j] = static_cast<std::uint16_t>(new_topic);
      ++n_dk[new_topic];
    }
  }

  TopicDistribution dist;
  dist.probs.resize(K);
  const double denom = static_cast<double>(tokens.size()) + K * model.alpha;
  for (int k = 0; k < K; ++k) dist.probs[k] = (n_dk[k] + model.alpha) / denom;
  return dist;
}

std::vector<std::pair<std::string, double>> top_keywords(const LdaModel& model, int topic, int k) {
  if (topic < 0 || topic >= model.num_topics) throw ConfigError("topic index out of range");
  const std::size_t V = model.vocab_size();
  if (k < 0 || static_cast<std::size_t>(k) > V) {
    throw ConfigError("keyword count exceeds vocabulary size");
  }
  const double v_beta = static_cast<double>(V) * model.beta;
  const double denom = static_cast<double>(model.topic_totals[topic]) + v_beta;

  std::vector<std::uint32_t> ids(V);
  std::iota(ids.begin(), ids.end(), 0);
  const auto phi = [&](std::uint32_t v) {
    return (model.word_count(topic, v) + model.beta) / denom;
  };
  std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double pa = phi(a), pb = phi(b);
    if (pa != pb) return pa > pb;
    return model.vocab->id_to_term[a] < model.vocab->id_to_term[b];
  });

  std::vector<std::pair<std::string, double>> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) {
    out.emplace_back(model.vocab->id_to_term[ids[i]], phi(ids[i]));
  }
  return out;
}

double perplexity(const LdaModel& model, std::span<const SparseVector> held_out_bow) {
  if (held_out_bow.empty()) throw DataError("perplexity needs a non-empty held-out set");
  const int K = model.num_topics;
  const std::size_t V = model.vocab_size();
  const double v_beta = static_cast<double>(V) * model.beta;

  double log_likelihood = 0.0;
  std::uint64_t token_count = 0;
  for (std::size_t d = 0; d < held_out_bow.size(); ++d) {
    const auto& bow = held_out_bow[d];
    if (bow.indices.empty()) {
      warn("perplexity: document " + std::to_string(d) + " has no in-vocabulary tokens, skipped");
      continue;
    }
    // per-document seed fixed by the model seed and position, so scoring is reproducible
    const std::uint64_t doc_seed = model.seed ^ (0x9E3779B97F4A7C15ull * (d + 1));
    const TopicDistribution theta = infer_topic_distribution(model, bow, doc_seed);
    for (std::size_t i = 0; i < bow.indices.size(); ++i) {
      const std::uint32_t w = bow.indices[i];
      const auto count = static_cast<std::uint64_t>(bow.values[i]);
      double p = 0.0;
      for (int k = 0; k < K; ++k) {
        const double phi =
            (model.topic_word_counts[static_cast<std::size_t>(k) * V + w] + model.beta) /
            (static_cast<double>(model.topic_totals[k]) + v_beta);
        p += theta.probs[k] * phi;
      }
      log_likelihood += static_cast<double>(count) * std::log(p);
      token_count += count;
    }
  }
  if (token_count == 0) throw DataError("perplexity: every document was skipped");
  return std::exp(-log_likelihood / static_cast<double>(token_count));
}

int dominant_topic(const TopicDistribution& dist) {
  if (dist.probs.empty()) throw DataError("empty topic distribution");
  int best = 0;
  for (int k = 1; k < static_cast<int>(dist.probs.size()); ++k) {
    if (dist.probs[k] > dist.probs[best]) best = k;
  }
  return best;
}

}  // namespace newslabel
