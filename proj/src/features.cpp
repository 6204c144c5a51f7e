#include "newslabel/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "newslabel/errors.hpp"

namespace newslabel {

Vocabulary build_vocabulary(std::span<const ProcessedDoc> docs,
                            std::optional<std::uint32_t> max_features, std::uint32_t min_df) {
  if (docs.empty()) throw DataError("cannot build a vocabulary from an empty document set");
  if (min_df < 1) throw ConfigError("min_df must be >= 1");

  struct TermStats {
    std::uint32_t doc_freq = 0;
    std::uint64_t total_freq = 0;
  };
  std::unordered_map<std::string, TermStats> stats;
  std::unordered_map<std::string, std::uint64_t> in_doc;
  for (const auto& doc : docs) {
    in_doc.clear();
    for (const auto& t : doc.tokens) ++in_doc[t];
    for (const auto& [term, count] : in_doc) {
      auto& s = stats[term];
      s.doc_freq += 1;
      s.total_freq += count;
    }
  }

  std::vector<const std::pair<const std::string, TermStats>*> retained;
  retained.reserve(stats.size());
  for (const auto& entry : stats) {
    if (entry.second.doc_freq >= min_df) retained.push_back(&entry);
  }
  if (retained.empty()) throw DataError("all terms were filtered out (min_df too high?)");

  if (max_features && retained.size() > *max_features) {
    std::sort(retained.begin(), retained.end(), [](const auto* a, const auto* b) {
      if (a->second.total_freq != b->second.total_freq)
        return a->second.total_freq > b->second.total_freq;
      return a->first < b->first;
    });
    retained.resize(*max_features);
  }
  std::sort(retained.begin(), retained.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });

  Vocabulary vocab;
  vocab.num_docs = docs.size();
  vocab.max_features = max_features;
  vocab.id_to_term.reserve(retained.size());
  vocab.doc_freq.reserve(retained.size());
  vocab.total_freq.reserve(retained.size());
  for (const auto* entry : retained) {
    const auto id = static_cast<std::uint32_t>(vocab.id_to_term.size());
    vocab.term_to_id.emplace(entry->first, id);
    vocab.id_to_term.push_back(entry->first);
    vocab.doc_freq.push_back(entry->second.doc_freq);
    vocab.total_freq.push_back(entry->second.total_freq);
  }
  return vocab;
}

namespace {

// term id -> in-document count, ordered by id
std::map<std::uint32_t, std::uint64_t> count_in_vocab(const ProcessedDoc& doc,
                                                      const Vocabulary& vocab) {
  std::map<std::uint32_t, std::uint64_t> counts;
  for (const auto& t : doc.tokens) {
    if (auto id = vocab.id_of(t)) ++counts[*id];
  }
  return counts;
}

}  // namespace

SparseVector bow_vector(const ProcessedDoc& doc, const Vocabulary& vocab) {
  SparseVector sv;
  for (const auto& [id, count] : count_in_vocab(doc, vocab)) {
    sv.indices.push_back(id);
    sv.values.push_back(static_cast<double>(count));
  }
  return sv;
}

SparseVector tfidf_vector(const ProcessedDoc& doc, const Vocabulary& vocab, bool l2_normalize) {
  if (doc.tokens.empty()) {
    throw DataError("cannot compute tf-idf of empty document '" + doc.id + "'");
  }
  const double doc_len = static_cast<double>(doc.tokens.size());
  SparseVector sv;
  for (const auto& [id, count] : count_in_vocab(doc, vocab)) {
    const double tf = static_cast<double>(count) / doc_len;
    const double idf = std::log(static_cast<double>(vocab.num_docs) /
                                static_cast<double>(vocab.doc_freq[id]));
    const double value = tf * idf;
    if (value > 0.0) {
      sv.indices.push_back(id);
      sv.values.push_back(value);
    }
  }
  if (l2_normalize && !sv.values.empty()) {
    double norm_sq = 0.0;
    for (double v : sv.values) norm_sq += v * v;
    const double norm = std::sqrt(norm_sq);
    if (norm > 0.0) {
      for (double& v : sv.values) v /= norm;
    }
  }
  return sv;
}

SparseVector doc2bow(const ProcessedDoc& doc, const Vocabulary& vocab) {
  return bow_vector(doc, vocab);
}

std::vector<double> to_dense(const SparseVector& sv, std::size_t dim) {
  std::vector<double> dense(dim, 0.0);
  for (std::size_t i = 0; i < sv.indices.size(); ++i) {
    if (sv.indices[i] >= dim) throw DataError("sparse index out of range for dense conversion");
    dense[sv.indices[i]] = sv.values[i];
  }
  return dense;
}

}  // namespace newslabel
