#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "newslabel/preprocess.hpp"

namespace newslabel {

// indices strictly increasing, values parallel and > 0
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
};

struct Vocabulary {
  std::unordered_map<std::string, std::uint32_t> term_to_id;
  std::vector<std::string> id_to_term;       // dense ids 0..V-1
  std::vector<std::uint32_t> doc_freq;       // per-term document counts
  std::vector<std::uint64_t> total_freq;     // per-term corpus occurrence counts
  std::uint64_t num_docs = 0;
  std::optional<std::uint32_t> max_features;

  std::size_t size() const { return id_to_term.size(); }
  std::optional<std::uint32_t> id_of(const std::string& term) const {
    auto it = term_to_id.find(term);
    if (it == term_to_id.end()) return std::nullopt;
    return it->second;
  }
};

// Retains terms with doc_freq >= min_df; with max_features set, keeps the top
// terms by total corpus frequency (ties lexicographic). Ids are assigned in
// lexicographic term order, so two builds from the same docs are identical.
Vocabulary build_vocabulary(std::span<const ProcessedDoc> docs,
                            std::optional<std::uint32_t> max_features = std::nullopt,
                            std::uint32_t min_df = 1);

// Raw in-vocabulary term counts; out-of-vocabulary terms ignored.
SparseVector bow_vector(const ProcessedDoc& doc, const Vocabulary& vocab);

// value_w = (count_w / doc_tokens) * ln(num_docs / doc_freq_w), no smoothing;
// zero-weight terms (doc_freq == num_docs) are omitted from the sparse output.
SparseVector tfidf_vector(const ProcessedDoc& doc, const Vocabulary& vocab,
                          bool l2_normalize = false);

// Same counts as bow_vector; integer values, the LDA input representation.
SparseVector doc2bow(const ProcessedDoc& doc, const Vocabulary& vocab);

std::vector<double> to_dense(const SparseVector& sv, std::size_t dim);

}  // namespace newslabel
