#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "newslabel/features.hpp"
#include "newslabel/preprocess.hpp"

namespace newslabel {

struct SgnsParams {
  int dim = 300;
  int window = 5;
  int negatives = 5;
  int epochs = 30;
  double initial_lr = 0.025;
  std::uint64_t seed = 1;
};

struct SubwordParams {
  SgnsParams sgns;
  int minn = 3;
  int maxn = 6;
  std::uint32_t bucket_count = 20000;
};

struct EmbeddingModel {
  Vocabulary vocab;
  int dim = 0;
  SgnsParams params;                   // echo of the training configuration
  std::vector<double> input_vectors;   // V x dim
  std::vector<double> output_vectors;  // V x dim
  std::vector<double> negative_cdf;    // cumulative unigram^0.75 mass, length V
  std::vector<double> epoch_losses;    // mean pair loss per epoch (not persisted)

  std::span<const double> input_vector(std::uint32_t id) const {
    return {input_vectors.data() + static_cast<std::size_t>(id) * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const double> output_vector(std::uint32_t id) const {
    return {output_vectors.data() + static_cast<std::size_t>(id) * dim, static_cast<std::size_t>(dim)};
  }
};

struct SubwordEmbeddingModel {
  EmbeddingModel base;
  int minn = 0;
  int maxn = 0;
  std::uint32_t bucket_count = 0;
  std::vector<double> ngram_vectors;  // bucket_count x dim

  // Mean of the word vector (when in vocabulary) and its gram-bucket vectors;
  // out-of-vocabulary words fall back to their gram buckets alone.
  std::vector<double> word_vector(std::string_view word) const;
};

struct DocEmbeddingModel {
  EmbeddingModel base;
  std::vector<std::string> doc_ids;
  std::vector<double> doc_vectors;  // D x dim
  std::unordered_map<std::string, std::size_t> doc_index;

  std::span<const double> doc_vector(std::size_t row) const {
    return {doc_vectors.data() + row * base.dim, static_cast<std::size_t>(base.dim)};
  }
};

// Skip-gram with negative sampling: for each (center, context) pair within the
// window, maximize log s(u_o . v_c) + sum_k log s(-u_k . v_c) with negatives
// drawn from the unigram distribution raised to 0.75. Learning rate decays
// linearly from initial_lr to initial_lr / 100. Deterministic for a fixed seed.
EmbeddingModel train_sgns(std::span<const ProcessedDoc> docs, const SgnsParams& params);

// Same objective, but the center-word vector is the mean of the word vector
// and its character-gram bucket vectors; each contributor receives its exact
// gradient share.
SubwordEmbeddingModel train_subword(std::span<const ProcessedDoc> docs,
                                    const SubwordParams& params);

// Distributed memory: predict the center word from the mean of the document
// vector and the context word vectors; doc vectors train jointly with words.
DocEmbeddingModel train_pvdm(std::span<const ProcessedDoc> docs, const SgnsParams& params);

// Freezes word and output vectors and runs `steps` gradient passes on a fresh
// doc vector. Deterministic for a fixed seed.
std::vector<double> infer_doc_vector(const DocEmbeddingModel& model,
                                     std::span<const std::string> tokens, int steps,
                                     std::uint64_t seed);

// Mean of in-vocabulary token vectors; zero vector when none are in vocabulary.
std::vector<double> average_embedding_features(const EmbeddingModel& model,
                                               std::span<const std::string> tokens);

// Character n-grams of the word wrapped in '<' and '>', lengths in
// [minn, maxn] counted in code points, every occurrence kept, text order.
std::vector<std::string> char_ngrams(std::string_view word, int minn, int maxn);

// Loss here and below is the negative log-likelihood of the pair.
struct SgnsGradients {
  double loss = 0.0;
  std::vector<double> d_input;
  std::vector<double> d_positive;
  std::vector<std::vector<double>> d_negatives;
};

// Reference gradients for the pair objective; the fused training update applies
// exactly these (tested for equivalence).
SgnsGradients sgns_loss_and_grads(std::span<const double> input, std::span<const double> positive,
                                  const std::vector<std::vector<double>>& negatives);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace newslabel
