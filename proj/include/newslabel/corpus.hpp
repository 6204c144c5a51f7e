#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace newslabel {

struct Document {
  std::string id;
  std::string text;
  std::optional<std::string> label;
  std::optional<std::string> headline;
  std::optional<std::string> source;
  std::optional<std::string> publish_date;
};

struct Corpus {
  std::vector<Document> documents;
  std::vector<std::string> class_names;  // ordered, distinct
};

enum class CorpusFormat { jsonl, csv };

CorpusFormat corpus_format_from_string(const std::string& name);

// Loads documents in file order. class_names defaults to the sorted distinct
// labels encountered; pass class_names to override (extra labels in the file
// are then a data error).
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const std::vector<std::string>& class_names = {});

void save_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path);

// Stratified, disjoint, seed-deterministic split.
std::pair<Corpus, Corpus> split_train_test(const Corpus& corpus, std::size_t per_class_train,
                                           std::size_t per_class_test, std::uint64_t seed);

}  // namespace newslabel
