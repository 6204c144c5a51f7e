#include "newslabel/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "newslabel/errors.hpp"
#include "newslabel/io_util.hpp"
#include "newslabel/log.hpp"
#include "newslabel/utf8.hpp"

namespace newslabel {

namespace {

bool is_ascii_letter_or_digit(char32_t cp) {
  return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z') || (cp >= '0' && cp <= '9');
}

bool is_ascii_punct(char32_t cp) {
  return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
         (cp >= 0x7B && cp <= 0x7E);
}

bool is_bangla_digit(char32_t cp) { return cp >= 0x09E6 && cp <= 0x09EF; }

std::vector<std::string> read_word_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open word list '" + path.string() + "'");
  std::vector<std::string> words;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t')) line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
    line.erase(0, start);
    if (line.empty()) continue;
    if (!utf8::validate(line)) {
      throw ConfigError("invalid UTF-8 on line " + std::to_string(line_no) + " of '" +
                        path.string() + "'");
    }
    words.push_back(line);
  }
  return words;
}

}  // namespace

std::vector<std::string> load_stopwords(const std::filesystem::path& path) {
  auto words = read_word_file(path);
  std::unordered_set<std::string> seen;
  std::vector<std::string> unique;
  for (auto& w : words) {
    if (seen.insert(w).second) {
      unique.push_back(std::move(w));
    } else {
      warn("duplicate stopword '" + w + "' in '" + path.string() + "' ignored");
    }
  }
  return unique;
}

std::vector<std::string> load_suffixes(const std::filesystem::path& path) {
  auto suffixes = read_word_file(path);
  std::unordered_set<std::string> seen;
  std::vector<std::string> unique;
  for (auto& s : suffixes) {
    if (seen.insert(s).second) unique.push_back(std::move(s));
  }
  std::stable_sort(unique.begin(), unique.end(), [](const std::string& a, const std::string& b) {
    const std::size_t la = utf8::length(a), lb = utf8::length(b);
    if (la != lb) return la > lb;
    return a < b;
  });
  return unique;
}

std::string clean_text(std::string_view raw, const PreprocessConfig& config) {
  const std::unordered_set<char32_t> strip(config.strip_code_points.begin(),
                                           config.strip_code_points.end());
  std::string kept;
  kept.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    const char32_t cp = utf8::decode(raw, i);
    if (is_ascii_letter_or_digit(cp) || is_ascii_punct(cp) || is_bangla_digit(cp) ||
        cp == '\n' || cp == '\r' || strip.count(cp)) {
      continue;
    }
    utf8::append(kept, cp);
  }

  // collapse space runs, trim
  std::string out;
  out.reserve(kept.size());
  bool pending_space = false;
  for (std::size_t j = 0; j < kept.size();) {
    const char32_t cp = utf8::decode(kept, j);
    if (cp == ' ') {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    utf8::append(out, cp);
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view cleaned) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    const std::size_t start = i;
    const char32_t cp = utf8::decode(cleaned, i);
    if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v') {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.append(cleaned.substr(start, i - start));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string stem(std::string_view token, const PreprocessConfig& config) {
  const std::size_t token_len = utf8::length(token);
  for (const auto& suffix : config.stemmer_suffixes) {
    if (suffix.empty() || suffix.size() >= token.size()) continue;
    if (token.substr(token.size() - suffix.size()) != suffix) continue;
    if (token_len - utf8::length(suffix) < 2) continue;
    return std::string(token.substr(0, token.size() - suffix.size()));
  }
  return std::string(token);
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const std::unordered_set<std::string>& stoplist) {
  std::vector<std::string> kept;
  kept.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stoplist.count(t)) kept.push_back(t);
  }
  return kept;
}

std::vector<std::string> ngrams(const std::vector<std::string>& tokens, int n) {
  if (n < 1) throw ConfigError("ngram order must be >= 1");
  std::vector<std::string> grams = tokens;
  for (int k = 2; k <= n; ++k) {
    if (tokens.size() < static_cast<std::size_t>(k)) break;
    for (std::size_t i = 0; i + k <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (int j = 1; j < k; ++j) {
        gram += '_';
        gram += tokens[i + j];
      }
      grams.push_back(std::move(gram));
    }
  }
  return grams;
}

namespace {

ProcessedDoc run_pipeline(const Document& doc, const PreprocessConfig& config,
                          const std::unordered_set<std::string>& stoplist) {
  const std::string cleaned = clean_text(doc.text, config);
  std::vector<std::string> tokens = tokenize(cleaned);
  for (auto& t : tokens) t = stem(t, config);
  tokens = remove_stopwords(tokens, stoplist);
  tokens = ngrams(tokens, config.ngram_order);
  if (tokens.empty()) throw EmptyAfterPreprocess(doc.id);
  return ProcessedDoc{doc.id, std::move(tokens), doc.label};
}

}  // namespace

ProcessedDoc preprocess_pipeline(const Document& doc, const PreprocessConfig& config) {
  const std::unordered_set<std::string> stoplist(config.stopwords.begin(), config.stopwords.end());
  return run_pipeline(doc, config, stoplist);
}

PreprocessCorpusResult preprocess_corpus(const Corpus& corpus, const PreprocessConfig& config) {
  const std::unordered_set<std::string> stoplist(config.stopwords.begin(), config.stopwords.end());
  PreprocessCorpusResult result;
  result.docs.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) {
    try {
      result.docs.push_back(run_pipeline(doc, config, stoplist));
    } catch (const EmptyAfterPreprocess&) {
      warn("dropping document '" + doc.id + "': empty after preprocessing");
      result.dropped_ids.push_back(doc.id);
    }
  }
  return result;
}

void save_processed_jsonl(const std::vector<ProcessedDoc>& docs,
                          const std::filesystem::path& path) {
  std::string out;
  for (const auto& doc : docs) {
    nlohmann::ordered_json rec;
    rec["id"] = doc.id;
    rec["tokens"] = doc.tokens;
    if (doc.label) rec["label"] = *doc.label;
    out += rec.dump();
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::vector<ProcessedDoc> load_processed_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<ProcessedDoc> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError("malformed record on line " + std::to_string(line_no) + ": " + e.what());
    }
    ProcessedDoc doc;
    doc.id = rec.at("id").get<std::string>();
    doc.tokens = rec.at("tokens").get<std::vector<std::string>>();
    if (rec.contains("label") && rec["label"].is_string()) {
      doc.label = rec["label"].get<std::string>();
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace newslabel
