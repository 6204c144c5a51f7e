#include "newslabel/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "newslabel/errors.hpp"
#include "newslabel/io_util.hpp"
#include "newslabel/rng.hpp"
#include "newslabel/utf8.hpp"

namespace newslabel {

namespace {

using nlohmann::json;

std::optional<std::string> opt_field(const json& rec, const char* key) {
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) return std::nullopt;
  const std::string& v = it->get_ref<const std::string&>();
  if (v.empty()) return std::nullopt;  // missing optionals never become empty-string labels
  return v;
}

void check_utf8(const std::string& s, std::size_t line_no, const char* what) {
  if (!utf8::validate(s)) {
    throw DataError("invalid UTF-8 in " + std::string(what) + " on line " + std::to_string(line_no));
  }
}

std::vector<Document> load_jsonl(const std::filesystem::path& path,
                                 std::vector<std::size_t>& doc_lines) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("malformed record on line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec.contains("text")) {
      throw DataError("malformed record on line " + std::to_string(line_no) +
                      ": need at least 'id' and 'text' fields");
    }
    Document doc;
    doc.id = rec["id"].is_string() ? rec["id"].get<std::string>() : rec["id"].dump();
    if (!rec["text"].is_string()) {
      throw DataError("malformed record on line " + std::to_string(line_no) + ": 'text' must be a string");
    }
    doc.text = rec["text"].get<std::string>();
    check_utf8(doc.text, line_no, "'text'");
    doc.label = opt_field(rec, "label");
    doc.headline = opt_field(rec, "headline");
    doc.source = opt_field(rec, "source");
    doc.publish_date = opt_field(rec, "date");
    docs.push_back(std::move(doc));
    doc_lines.push_back(line_no);
  }
  return docs;
}

// Minimal RFC 4180 reader: first row is a header, quoted fields may contain
// commas, newlines and doubled quotes.
std::vector<std::vector<std::string>> parse_csv(const std::string& content,
                                                std::vector<std::size_t>& record_lines) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line_no = 1;
  std::size_t record_start_line = 1;

  auto end_field = [&] {
    row.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(row);
    record_lines.push_back(record_start_line);
    row.clear();
    record_start_line = line_no;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_no;
        field.push_back(c);
      }
    } else if (c == '"' && !field_started && field.empty()) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() || !row.empty() || field_started) {
        ++line_no;
        end_row();
      } else {
        ++line_no;
        record_start_line = line_no;
      }
    } else if (c == '\r') {
      // swallow; \r\n handled by the \n branch
    } else {
      field_started = true;
      field.push_back(c);
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field in CSV");
  if (!field.empty() || !row.empty() || field_started) end_row();
  return rows;
}

std::vector<Document> load_csv(const std::filesystem::path& path,
                               std::vector<std::size_t>& doc_lines) {
  const std::string content = read_file(path);
  std::vector<std::size_t> record_lines;
  auto rows = parse_csv(content, record_lines);
  if (rows.empty()) throw DataError("CSV file '" + path.string() + "' has no header row");

  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) col[rows[0][i]] = i;
  if (!col.count("id") || !col.count("text")) {
    throw DataError("CSV header must contain 'id' and 'text' columns");
  }

  auto cell = [&](const std::vector<std::string>& row, const char* name) -> std::optional<std::string> {
    auto it = col.find(name);
    if (it == col.end() || it->second >= row.size()) return std::nullopt;
    const std::string& v = row[it->second];
    if (v.empty()) return std::nullopt;
    return v;
  };

  std::vector<Document> docs;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::size_t line_no = record_lines[r];
    const auto& row = rows[r];
    auto id = cell(row, "id");
    auto text = cell(row, "text");
    if (!id || !text) {
      throw DataError("malformed record on line " + std::to_string(line_no) +
                      ": need at least 'id' and 'text' fields");
    }
    Document doc;
    doc.id = *id;
    doc.text = *text;
    check_utf8(doc.text, line_no, "'text'");
    doc.label = cell(row, "label");
    doc.headline = cell(row, "headline");
    doc.source = cell(row, "source");
    doc.publish_date = cell(row, "date");
    docs.push_back(std::move(doc));
    doc_lines.push_back(line_no);
  }
  return docs;
}

}  // namespace

CorpusFormat corpus_format_from_string(const std::string& name) {
  if (name == "jsonl") return CorpusFormat::jsonl;
  if (name == "csv") return CorpusFormat::csv;
  throw ConfigError("unknown corpus format '" + name + "' (expected jsonl or csv)");
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const std::vector<std::string>& class_names) {
  if (!std::filesystem::exists(path)) {
    throw DataError("corpus file '" + path.string() + "' does not exist");
  }
  Corpus corpus;
  std::vector<std::size_t> doc_lines;
  corpus.documents =
      format == CorpusFormat::jsonl ? load_jsonl(path, doc_lines) : load_csv(path, doc_lines);

  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    auto [it, inserted] = seen.emplace(corpus.documents[i].id, i);
    if (!inserted) {
      throw DataError("duplicate id '" + corpus.documents[i].id + "' on line " +
                      std::to_string(doc_lines[i]) + " (first seen on line " +
                      std::to_string(doc_lines[it->second]) + ")");
    }
  }

  if (!class_names.empty()) {
    corpus.class_names = class_names;
    std::unordered_set<std::string> allowed(class_names.begin(), class_names.end());
    if (allowed.size() != class_names.size()) throw ConfigError("class_names contains duplicates");
    for (const auto& doc : corpus.documents) {
      if (doc.label && !allowed.count(*doc.label)) {
        throw DataError("label '" + *doc.label + "' of document '" + doc.id +
                        "' is not in the configured class names");
      }
    }
  } else {
    std::set<std::string> labels;
    for (const auto& doc : corpus.documents) {
      if (doc.label) labels.insert(*doc.label);
    }
    corpus.class_names.assign(labels.begin(), labels.end());
  }
  return corpus;
}

void save_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
  std::string out;
  for (const auto& doc : corpus.documents) {
    nlohmann::ordered_json rec;
    rec["id"] = doc.id;
    rec["text"] = doc.text;
    if (doc.label) rec["label"] = *doc.label;
    if (doc.headline) rec["headline"] = *doc.headline;
    if (doc.source) rec["source"] = *doc.source;
    if (doc.publish_date) rec["date"] = *doc.publish_date;
    out += rec.dump();
    out += '\n';
  }
  atomic_write_file(path, out);
}

std::pair<Corpus, Corpus> split_train_test(const Corpus& corpus, std::size_t per_class_train,
                                           std::size_t per_class_test, std::uint64_t seed) {
  std::unordered_map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    const auto& doc = corpus.documents[i];
    if (doc.label) by_class[*doc.label].push_back(i);
  }

  for (const auto& name : corpus.class_names) {
    const std::size_t have = by_class.count(name) ? by_class[name].size() : 0;
    if (have < per_class_train + per_class_test) {
      throw DataError("class '" + name + "' has " + std::to_string(have) + " documents, needs " +
                      std::to_string(per_class_train + per_class_test));
    }
  }

  Rng rng(seed);
  std::vector<std::size_t> train_idx, test_idx;
  for (const auto& name : corpus.class_names) {
    auto& indices = by_class[name];
    rng.shuffle(indices);
    train_idx.insert(train_idx.end(), indices.begin(), indices.begin() + per_class_train);
    test_idx.insert(test_idx.end(), indices.begin() + per_class_train,
                    indices.begin() + per_class_train + per_class_test);
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());

  Corpus train, test;
  train.class_names = corpus.class_names;
  test.class_names = corpus.class_names;
  for (std::size_t i : train_idx) train.documents.push_back(corpus.documents[i]);
  for (std::size_t i : test_idx) test.documents.push_back(corpus.documents[i]);
  return {std::move(train), std::move(test)};
}

}  // namespace newslabel
