#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "newslabel/features.hpp"

namespace newslabel {

struct TopicDistribution {
  std::vector<double> probs;  // length K, simplex
};

struct LdaParams {
  int num_topics = 8;
  double alpha = 50.0 / 8.0;  // symmetric doc-topic prior
  double beta = 0.01;         // symmetric topic-word prior
  int passes = 10;
  int iterations = 20;  // sweeps per pass; passes * iterations full Gibbs sweeps
  std::uint64_t seed = 1;
};

// Collapsed Gibbs LDA state. Count invariants:
//   sum_v topic_word_counts[k][v] == topic_totals[k]
//   sum_k doc_topic_counts[d][k] == token count of doc d
struct LdaModel {
  int num_topics = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::shared_ptr<const Vocabulary> vocab;

  std::vector<std::uint32_t> topic_word_counts;       // K x V, row-major
  std::vector<std::uint64_t> topic_totals;            // K
  std::vector<std::vector<std::uint32_t>> doc_topic_counts;  // D x K
  std::vector<std::vector<std::uint32_t>> doc_tokens;        // expanded term ids per doc
  std::vector<std::vector<std::uint16_t>> assignments;       // per-token topic ids

  std::size_t vocab_size() const { return vocab ? vocab->size() : 0; }
  std::uint32_t word_count(int topic, std::uint32_t term) const {
    return topic_word_counts[static_cast<std::size_t>(topic) * vocab_size() + term];
  }
  // token count of training doc d; 0 means LDA skipped it
  std::uint64_t doc_token_total(std::size_t d) const;
  // throws NumericError when a count invariant is violated
  void validate_counts() const;
};

// passes * iterations full sweeps of p(z=k) ~ (n_dk + alpha) (n_kw + beta) / (n_k + V beta),
// current token excluded. Deterministic for a fixed seed. Empty docs are skipped with a warning
// (their doc_topic_counts rows stay zero).
LdaModel train_lda(std::span<const SparseVector> corpus_bow, const LdaParams& params,
                   std::shared_ptr<const Vocabulary> vocab);

// theta_dk = (n_dk + alpha) / (n_d + K alpha) from the stored training counts.
TopicDistribution doc_topic_distribution(const LdaModel& model, std::size_t train_doc_index);

// Unseen documents: `sweeps` Gibbs passes with the topic-word counts frozen,
// then the same theta formula on the held-out counts. Out-of-vocabulary terms
// carry no probability mass (callers pass bow vectors, already in-vocab).
TopicDistribution infer_topic_distribution(const LdaModel& model, const SparseVector& doc_bow,
                                           std::uint64_t seed, int sweeps = 20);

// k terms with highest phi_kv = (n_kv + beta) / (n_k + V beta), descending, ties lexicographic.
std::vector<std::pair<std::string, double>> top_keywords(const LdaModel& model, int topic, int k);

// exp(- sum_d sum_w n_dw log sum_k theta_dk phi_kw / sum_d n_d) with theta from the
// frozen-phi inference above; documents with no in-model mass are skipped with a warning.
double perplexity(const LdaModel& model, std::span<const SparseVector> held_out_bow);

// argmax index, ties to the lowest index
int dominant_topic(const TopicDistribution& dist);

}  // namespace newslabel
