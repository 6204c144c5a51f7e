#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "newslabel/corpus.hpp"

namespace newslabel {

struct PreprocessConfig {
  std::vector<std::string> stopwords;         // unique, non-empty
  std::vector<std::string> stemmer_suffixes;  // ordered longest-first (code points)
  int ngram_order = 1;                        // in {1, 2, 3}
  std::vector<char32_t> strip_code_points = {0xF06C, 0x200C, 0x09E5, 0x009D};
};

struct ProcessedDoc {
  std::string id;
  std::vector<std::string> tokens;
  std::optional<std::string> label;
};

// Stopword file: UTF-8, one word per line, '#' comments allowed.
std::vector<std::string> load_stopwords(const std::filesystem::path& path);

// Suffix table: UTF-8, one suffix per line; sorted longest-first here.
std::vector<std::string> load_suffixes(const std::filesystem::path& path);

// Removes Basic-Latin letters, ASCII digits, newlines, Bangla digits
// (U+09E6..U+09EF), ASCII punctuation and the configured stray code points,
// then collapses space runs and trims. Idempotent.
std::string clean_text(std::string_view raw, const PreprocessConfig& config);

// Splits on whitespace runs, order preserved.
std::vector<std::string> tokenize(std::string_view cleaned);

// Strips the longest matching suffix once, if the remaining stem keeps at
// least 2 code points; otherwise returns the token unchanged.
std::string stem(std::string_view token, const PreprocessConfig& config);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const std::unordered_set<std::string>& stoplist);

// n = 1 keeps the tokens; n > 1 appends every contiguous k-gram (2 <= k <= n)
// joined with '_', in text order per gram length.
std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int n);

// clean -> tokenize -> stem -> remove stopwords -> ngrams.
// Throws EmptyAfterPreprocess when nothing survives.
ProcessedDoc preprocess_pipeline(const Document& doc, const PreprocessConfig& config);

struct PreprocessCorpusResult {
  std::vector<ProcessedDoc> docs;
  std::vector<std::string> dropped_ids;  // empty-after-preprocess, dropped and logged
};

PreprocessCorpusResult preprocess_corpus(const Corpus& corpus, const PreprocessConfig& config);

void save_processed_jsonl(const std::vector<ProcessedDoc>& docs, const std::filesystem::path& path);
std::vector<ProcessedDoc> load_processed_jsonl(const std::filesystem::path& path);

}  // namespace newslabel
