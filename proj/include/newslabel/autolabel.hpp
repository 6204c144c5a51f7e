#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "newslabel/lda.hpp"
#include "newslabel/preprocess.hpp"

namespace newslabel {

// topic id -> class name, bijective onto the K class names
struct TopicClassMap {
  std::vector<std::string> topic_to_class;
};

struct AutoLabeledRecord {
  std::string id;
  // (class name, probability) ordered by class_names; sums to 1
  std::vector<std::pair<std::string, double>> class_probs;
  std::string dominant_class;  // argmax of class_probs, lowest index on ties
  std::string original_label;  // the manual label, kept for comparison
  std::vector<std::string> tokens;

  std::size_t dominant_index() const;
  double max_probability() const;
};

struct MultiLabelSet {
  std::vector<std::uint8_t> bits;  // length L, entries in {0,1}

  std::size_t cardinality() const;
};

// Maximum-score assignment (Hungarian method), O(n^3); returns row -> column.
std::vector<int> hungarian_max_assignment(const std::vector<std::vector<double>>& score);

// Automatic topic naming: builds the K x L contingency matrix of
// (dominant training topic, original label) and picks the bijection with
// maximal total agreement. Throws on a topic with zero documents.
TopicClassMap assign_topic_names(const LdaModel& model,
                                 std::span<const std::string> original_labels,
                                 std::span<const std::string> class_names);

// Explicit-map path: validates the bijection onto class_names.
TopicClassMap make_topic_map(std::vector<std::string> topic_to_class,
                             std::span<const std::string> class_names);

// One record per doc: per-class probabilities from the trained model, the
// dominant class, and the retained manual label. docs must be the LDA
// training documents in training order; docs skipped by LDA (no tokens in
// vocabulary) are skipped here with a warning.
std::vector<AutoLabeledRecord> build_auto_dataset(const LdaModel& model,
                                                  const TopicClassMap& map,
                                                  std::span<const ProcessedDoc> docs,
                                                  std::span<const std::string> class_names);

// max class probability >= th -> training example labelled dominant_class;
// the rest become test examples scored against original_label later.
std::pair<std::vector<AutoLabeledRecord>, std::vector<AutoLabeledRecord>> threshold_split(
    std::span<const AutoLabeledRecord> records, double th);

// bit_c = 1 iff class_probs[c] >= th; empty sets are permitted.
std::vector<MultiLabelSet> multilabel_binarize(std::span<const AutoLabeledRecord> records,
                                               double th);

std::map<std::size_t, std::size_t> label_cardinality_histogram(
    std::span<const MultiLabelSet> sets);

MultiLabelSet onehot_from_single(const std::string& label,
                                 std::span<const std::string> class_names);

}  // namespace newslabel
