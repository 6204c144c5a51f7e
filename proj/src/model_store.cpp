#include "newslabel/model_store.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "newslabel/errors.hpp"
#include "newslabel/io_util.hpp"

namespace newslabel {

namespace {

using nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

std::string checksum_hex(std::string_view body) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a64(body));
  return buf;
}

std::string exact_real(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_artifact(const std::filesystem::path& path, const std::string& kind,
                    ordered_json params, const std::string& body) {
  ordered_json header;
  header["kind"] = kind;
  header["version"] = kFormatVersion;
  header["checksum"] = checksum_hex(body);
  header["params"] = std::move(params);
  atomic_write_file(path, header.dump() + "\n" + body);
}

struct LoadedArtifact {
  ArtifactHeader header;
  std::string body;
};

ArtifactHeader parse_header_line(const std::string& line, const std::filesystem::path& path) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw DataError("'" + path.string() + "' has no artifact header line");
  }
  if (!j.is_object() || !j.contains("kind") || !j.contains("version")) {
    throw DataError("'" + path.string() + "' has no artifact header line");
  }
  ArtifactHeader header;
  header.kind = j["kind"].get<std::string>();
  header.format_version = j["version"].get<int>();
  if (j.contains("params")) header.params = j["params"];
  return header;
}

LoadedArtifact read_artifact(const std::filesystem::path& path, const std::string& expected_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  LoadedArtifact artifact;
  artifact.header = parse_header_line(line, path);
  if (artifact.header.kind != expected_kind) {
    throw DataError("'" + path.string() + "' holds a '" + artifact.header.kind +
                    "' artifact, expected '" + expected_kind + "'");
  }
  if (artifact.header.format_version != kFormatVersion) {
    throw DataError("unsupported " + expected_kind + " format version " +
                    std::to_string(artifact.header.format_version));
  }

  std::ostringstream rest;
  rest << in.rdbuf();
  artifact.body = rest.str();

  ordered_json j = ordered_json::parse(line);
  if (j.contains("checksum")) {
    const std::string expected = j["checksum"].get<std::string>();
    const std::string actual = checksum_hex(artifact.body);
    if (expected != actual) {
      throw DataError("checksum failure in '" + path.string() + "' (file truncated or edited?)");
    }
  }
  return artifact;
}

// whitespace-separated reader with line tracking for error messages
class BodyReader {
 public:
  explicit BodyReader(const std::string& body, std::string name)
      : stream_(body), name_(std::move(name)) {}

  std::string next_token() {
    std::string tok;
    if (!(stream_ >> tok)) throw DataError("truncated artifact '" + name_ + "'");
    return tok;
  }
  std::uint64_t next_u64() {
    const std::string tok = next_token();
    try {
      return std::stoull(tok);
    } catch (...) {
      throw DataError("bad integer '" + tok + "' in '" + name_ + "'");
    }
  }
  std::int64_t next_i64() {
    const std::string tok = next_token();
    try {
      return std::stoll(tok);
    } catch (...) {
      throw DataError("bad integer '" + tok + "' in '" + name_ + "'");
    }
  }
  double next_real() {
    const std::string tok = next_token();
    try {
      return std::stod(tok);
    } catch (...) {
      throw DataError("bad number '" + tok + "' in '" + name_ + "'");
    }
  }
  void expect(const std::string& literal) {
    const std::string tok = next_token();
    if (tok != literal) {
      throw DataError("expected '" + literal + "' in '" + name_ + "', found '" + tok + "'");
    }
  }

 private:
  std::istringstream stream_;
  std::string name_;
};

void append_row(std::string& out, std::span<const double> row) {
  for (double v : row) {
    out += ' ';
    out += format_real(v);
  }
  out += '\n';
}

// doc ids can hold whitespace; escape them inside __doc__ keys
std::string escape_key(const std::string& id) {
  std::string out;
  out.reserve(id.size());
  for (char c : id) {
    if (c == '%' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "%%%02X", static_cast<unsigned char>(c));
      out += buf;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string unescape_key(const std::string& key) {
  std::string out;
  out.reserve(key.size());
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (key[i] == '%' && i + 2 < key.size()) {
      const std::string hex = key.substr(i + 1, 2);
      out.push_back(static_cast<char>(std::stoi(hex, nullptr, 16)));
      i += 2;
    } else {
      out.push_back(key[i]);
    }
  }
  return out;
}

std::string vocab_body(const Vocabulary& vocab) {
  std::string body;
  body += std::to_string(vocab.size());
  body += ' ';
  body += std::to_string(vocab.num_docs);
  body += '\n';
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    body += vocab.id_to_term[v];
    body += ' ';
    body += std::to_string(v);
    body += ' ';
    body += std::to_string(vocab.doc_freq[v]);
    body += ' ';
    body += std::to_string(vocab.total_freq[v]);
    body += '\n';
  }
  return body;
}

Vocabulary vocab_from_reader(BodyReader& reader) {
  Vocabulary vocab;
  const std::uint64_t V = reader.next_u64();
  vocab.num_docs = reader.next_u64();
  vocab.id_to_term.reserve(V);
  vocab.doc_freq.reserve(V);
  vocab.total_freq.reserve(V);
  for (std::uint64_t v = 0; v < V; ++v) {
    std::string term = reader.next_token();
    const std::uint64_t id = reader.next_u64();
    if (id != v) throw DataError("vocabulary ids must be dense and ordered");
    vocab.doc_freq.push_back(static_cast<std::uint32_t>(reader.next_u64()));
    vocab.total_freq.push_back(reader.next_u64());
    vocab.term_to_id.emplace(term, static_cast<std::uint32_t>(v));
    vocab.id_to_term.push_back(std::move(term));
  }
  return vocab;
}

ordered_json sgns_params_json(const SgnsParams& p) {
  ordered_json j;
  j["dim"] = p.dim;
  j["window"] = p.window;
  j["negatives"] = p.negatives;
  j["epochs"] = p.epochs;
  j["initial_lr"] = p.initial_lr;
  j["seed"] = p.seed;
  return j;
}

SgnsParams sgns_params_from_json(const nlohmann::ordered_json& j) {
  SgnsParams p;
  p.dim = j.at("dim").get<int>();
  p.window = j.at("window").get<int>();
  p.negatives = j.at("negatives").get<int>();
  p.epochs = j.at("epochs").get<int>();
  p.initial_lr = j.at("initial_lr").get<double>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

// shared by embedding/subword/docvec: the word2vec-convention main block with
// optional doc rows, then marked sections for outputs and vocabulary counts
std::string embedding_body(const EmbeddingModel& model, const DocEmbeddingModel* docs) {
  const std::size_t V = model.vocab.size();
  const std::size_t extra = docs ? docs->doc_ids.size() : 0;
  std::string body;
  body += std::to_string(V + extra);
  body += ' ';
  body += std::to_string(model.dim);
  body += '\n';
  for (std::size_t v = 0; v < V; ++v) {
    body += model.vocab.id_to_term[v];
    append_row(body, model.input_vector(static_cast<std::uint32_t>(v)));
  }
  if (docs) {
    for (std::size_t d = 0; d < docs->doc_ids.size(); ++d) {
      body += "__doc__" + escape_key(docs->doc_ids[d]);
      append_row(body, docs->doc_vector(d));
    }
  }
  body += "#output\n";
  for (std::size_t v = 0; v < V; ++v) {
    body += model.vocab.id_to_term[v];
    append_row(body, model.output_vector(static_cast<std::uint32_t>(v)));
  }
  body += "#counts ";
  body += std::to_string(model.vocab.num_docs);
  body += '\n';
  for (std::size_t v = 0; v < V; ++v) {
    body += model.vocab.id_to_term[v];
    body += ' ';
    body += std::to_string(model.vocab.doc_freq[v]);
    body += ' ';
    body += std::to_string(model.vocab.total_freq[v]);
    body += '\n';
  }
  return body;
}

std::vector<double> unigram_cdf_copy(const Vocabulary& vocab) {
  std::vector<double> cdf(vocab.size());
  double total = 0.0;
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    total += std::pow(static_cast<double>(vocab.total_freq[v]), 0.75);
    cdf[v] = total;
  }
  return cdf;
}

void embedding_from_reader(BodyReader& reader, EmbeddingModel& model,
                           std::vector<std::string>* doc_ids, std::vector<double>* doc_vectors) {
  const std::uint64_t rows = reader.next_u64();
  const int dim = static_cast<int>(reader.next_u64());
  model.dim = dim;

  std::vector<std::string> words;
  std::vector<double> vectors;
  vectors.reserve(rows * dim);
  for (std::uint64_t r = 0; r < rows; ++r) {
    std::string key = reader.next_token();
    if (key.rfind("__doc__", 0) == 0) {
      if (!doc_ids) throw DataError("unexpected doc vector row in a word embedding artifact");
      doc_ids->push_back(unescape_key(key.substr(7)));
      for (int i = 0; i < dim; ++i) doc_vectors->push_back(reader.next_real());
    } else {
      words.push_back(std::move(key));
      for (int i = 0; i < dim; ++i) vectors.push_back(reader.next_real());
    }
  }
  model.input_vectors = std::move(vectors);

  reader.expect("#output");
  model.output_vectors.resize(words.size() * dim);
  for (std::size_t v = 0; v < words.size(); ++v) {
    const std::string key = reader.next_token();
    if (key != words[v]) throw DataError("output section key mismatch at '" + key + "'");
    for (int i = 0; i < dim; ++i) model.output_vectors[v * dim + i] = reader.next_real();
  }

  reader.expect("#counts");
  model.vocab.num_docs = reader.next_u64();
  model.vocab.id_to_term = words;
  model.vocab.doc_freq.resize(words.size());
  model.vocab.total_freq.resize(words.size());
  for (std::size_t v = 0; v < words.size(); ++v) {
    const std::string key = reader.next_token();
    if (key != words[v]) throw DataError("counts section key mismatch at '" + key + "'");
    model.vocab.doc_freq[v] = static_cast<std::uint32_t>(reader.next_u64());
    model.vocab.total_freq[v] = reader.next_u64();
    model.vocab.term_to_id.emplace(words[v], static_cast<std::uint32_t>(v));
  }
  model.negative_cdf = unigram_cdf_copy(model.vocab);
}

}  // namespace

ArtifactHeader peek_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path.string() + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return parse_header_line(line, path);
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  ordered_json params;
  params["num_docs"] = vocab.num_docs;
  if (vocab.max_features) params["max_features"] = *vocab.max_features;
  write_artifact(path, "vocab", std::move(params), vocab_body(vocab));
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  const auto artifact = read_artifact(path, "vocab");
  BodyReader reader(artifact.body, path.string());
  Vocabulary vocab = vocab_from_reader(reader);
  if (artifact.header.params.contains("max_features")) {
    vocab.max_features = artifact.header.params["max_features"].get<std::uint32_t>();
  }
  return vocab;
}

void save_embedding(const EmbeddingModel& model, const std::filesystem::path& path) {
  write_artifact(path, "embedding", sgns_params_json(model.params), embedding_body(model, nullptr));
}

EmbeddingModel load_embedding(const std::filesystem::path& path) {
  const auto artifact = read_artifact(path, "embedding");
  BodyReader reader(artifact.body, path.string());
  EmbeddingModel model;
  model.params = sgns_params_from_json(artifact.header.params);
  embedding_from_reader(reader, model, nullptr, nullptr);
  return model;
}

void save_subword(const SubwordEmbeddingModel& model, const std::filesystem::path& path) {
  ordered_json params = sgns_params_json(model.base.params);
  params["minn"] = model.minn;
  params["maxn"] = model.maxn;
  params["bucket_count"] = model.bucket_count;

  std::string body = embedding_body(model.base, nullptr);
  body += "#ngrams ";
  body += std::to_string(model.bucket_count);
  body += ' ';
  body += std::to_string(model.base.dim);
  body += '\n';
  for (std::size_t b = 0; b < model.bucket_count; ++b) {
    body += std::to_string(b);
    append_row(body, {model.ngram_vectors.data() + b * model.base.dim,
                      static_cast<std::size_t>(model.base.dim)});
  }
  write_artifact(path, "subword", std::move(params), body);
}

SubwordEmbeddingModel load_subword(const std::filesystem::path& path) {
  const auto artifact = read_artifact(path, "subword");
  BodyReader reader(artifact.body, path.string());
  SubwordEmbeddingModel model;
  model.base.params = sgns_params_from_json(artifact.header.params);
  model.minn = artifact.header.params.at("minn").get<int>();
  model.maxn = artifact.header.params.at("maxn").get<int>();
  model.bucket_count = artifact.header.params.at("bucket_count").get<std::uint32_t>();
  embedding_from_reader(reader, model.base, nullptr, nullptr);

  reader.expect("#ngrams");
  const std::uint64_t buckets = reader.next_u64();
  const std::uint64_t dim = reader.next_u64();
  if (buckets != model.bucket_count || dim != static_cast<std::uint64_t>(model.base.dim)) {
    throw DataError("ngram section shape mismatch in '" + path.string() + "'");
  }
  model.ngram_vectors.resize(buckets * dim);
  for (std::uint64_t b = 0; b < buckets; ++b) {
    if (reader.next_u64() != b) throw DataError("ngram bucket rows out of order");
    for (std::uint64_t i = 0; i < dim; ++i) {
      model.ngram_vectors[b * dim + i] = reader.next_real();
    }
  }
  return model;
}

void save_docvec(const DocEmbeddingModel& model, const std::filesystem::path& path) {
  write_artifact(path, "docvec", sgns_params_json(model.base.params),
                 embedding_body(model.base, &model));
}

DocEmbeddingModel load_docvec(const std::filesystem::path& path) {
  const auto artifact = read_artifact(path, "docvec");
  BodyReader reader(artifact.body, path.string());
  DocEmbeddingModel model;
  model.base.params = sgns_params_from_json(artifact.header.params);
  embedding_from_reader(reader, model.base, &model.doc_ids, &model.doc_vectors);
  for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
    model.doc_index.emplace(model.doc_ids[d], d);
  }
  return model;
}

void save_lda(const LdaModel& model, const std::filesystem::path& path) {
  ordered_json params;
  params["num_topics"] = model.num_topics;
  params["alpha"] = model.alpha;
  params["beta"] = model.beta;
  params["seed"] = model.seed;

  std::string body;
  body += std::to_string(model.num_topics);
  body += ' ';
  body += std::to_string(model.vocab_size());
  body += ' ';
  body += exact_real(model.alpha);
  body += ' ';
  body += exact_real(model.beta);
  body += ' ';
  body += std::to_string(model.seed);
  body += '\n';
  const std::size_t V = model.vocab_size();
  for (int k = 0; k < model.num_topics; ++k) {
    for (std::size_t v = 0; v < V; ++v) {
      if (v > 0) body += ' ';
      body += std::to_string(model.word_count(k, static_cast<std::uint32_t>(v)));
    }
    body += '\n';
  }
  body += "#doctopics ";
  body += std::to_string(model.doc_topic_counts.size());
  body += '\n';
  for (const auto& row : model.doc_topic_counts) {
    for (int k = 0; k < model.num_topics; ++k) {
      if (k > 0) body += ' ';
      body += std::to_string(row[k]);
    }
    body += '\n';
  }
  write_artifact(path, "lda", std::move(params), body);
}

LdaModel load_lda(const std::filesystem::path& path, std::shared_ptr<const Vocabulary> vocab) {
  if (!vocab) throw ConfigError("load_lda needs the vocabulary the model was trained with");
  const auto artifact = read_artifact(path, "lda");
  BodyReader reader(artifact.body, path.string());

  LdaModel model;
  model.num_topics = static_cast<int>(reader.next_u64());
  const std::uint64_t V = reader.next_u64();
  model.alpha = reader.next_real();
  model.beta = reader.next_real();
  model.seed = reader.next_u64();
  if (V != vocab->size()) {
    throw DataError("LDA artifact was trained with a different vocabulary (V=" +
                    std::to_string(V) + ", vocabulary has " + std::to_string(vocab->size()) + ")");
  }
  model.vocab = std::move(vocab);

  model.topic_word_counts.resize(static_cast<std::size_t>(model.num_topics) * V);
  model.topic_totals.assign(model.num_topics, 0);
  for (int k = 0; k < model.num_topics; ++k) {
    std::uint64_t total = 0;
    for (std::uint64_t v = 0; v < V; ++v) {
      const auto count = static_cast<std::uint32_t>(reader.next_u64());
      model.topic_word_counts[static_cast<std::size_t>(k) * V + v] = count;
      total += count;
    }
    model.topic_totals[k] = total;
  }
  reader.expect("#doctopics");
  const std::uint64_t D = reader.next_u64();
  model.doc_topic_counts.assign(D, std::vector<std::uint32_t>(model.num_topics, 0));
  for (std::uint64_t d = 0; d < D; ++d) {
    for (int k = 0; k < model.num_topics; ++k) {
      model.doc_topic_counts[d][k] = static_cast<std::uint32_t>(reader.next_u64());
    }
  }
  return model;
}

void save_linear(const LinearModel& model, const std::filesystem::path& path) {
  ordered_json params;
  params["classes"] = model.num_classes;
  params["features"] = model.num_features;
  params["loss"] = model.loss == LossKind::log ? "log" : "hinge";
  params["l2"] = model.l2;

  std::string body;
  body += std::to_string(model.num_classes);
  body += ' ';
  body += std::to_string(model.num_features);
  body += ' ';
  body += model.loss == LossKind::log ? "log" : "hinge";
  body += ' ';
  body += exact_real(model.l2);
  body += '\n';
  for (int c = 0; c < model.num_classes; ++c) {
    body += "w" + std::to_string(c);
    append_row(body, model.row(c));
  }
  body += "bias";
  append_row(body, model.bias);
  write_artifact(path, "linear", std::move(params), body);
}

LinearModel load_linear(const std::filesystem::path& path) {
  const auto artifact = read_artifact(path, "linear");
  BodyReader reader(artifact.body, path.string());
  LinearModel model;
  model.num_classes = static_cast<int>(reader.next_u64());
  model.num_features = static_cast<int>(reader.next_u64());
  model.loss = loss_kind_from_string(reader.next_token());
  model.l2 = reader.next_real();
  model.weights.resize(static_cast<std::size_t>(model.num_classes) * model.num_features);
  for (int c = 0; c < model.num_classes; ++c) {
    reader.expect("w" + std::to_string(c));
    for (int f = 0; f < model.num_features; ++f) {
      model.weights[static_cast<std::size_t>(c) * model.num_features + f] = reader.next_real();
    }
  }
  reader.expect("bias");
  model.bias.resize(model.num_classes);
  for (int c = 0; c < model.num_classes; ++c) model.bias[c] = reader.next_real();
  return model;
}

void save_knn(const KnnModel& model, const std::filesystem::path& path) {
  ordered_json params;
  params["k"] = model.k;
  params["metric"] = model.metric == KnnMetric::cosine ? "cosine" : "euclidean";
  params["examples"] = model.vectors.size();

  const std::size_t dim = model.vectors.empty() ? 0 : model.vectors.front().size();
  std::string body;
  body += std::to_string(model.vectors.size());
  body += ' ';
  body += std::to_string(dim);
  body += '\n';
  for (std::size_t i = 0; i < model.vectors.size(); ++i) {
    body += std::to_string(model.labels[i]);
    append_row(body, model.vectors[i]);
  }
  write_artifact(path, "knn", std::move(params), body);
}

KnnModel load_knn(const std::filesystem::path& path) {
  const auto artifact = read_artifact(path, "knn");
  BodyReader reader(artifact.body, path.string());
  KnnModel model;
  model.k = artifact.header.params.at("k").get<int>();
  model.metric = knn_metric_from_string(artifact.header.params.at("metric").get<std::string>());
  const std::uint64_t n = reader.next_u64();
  const std::uint64_t dim = reader.next_u64();
  model.vectors.reserve(n);
  model.labels.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    model.labels.push_back(static_cast<int>(reader.next_i64()));
    std::vector<double> row(dim);
    for (std::uint64_t f = 0; f < dim; ++f) row[f] = reader.next_real();
    model.vectors.push_back(std::move(row));
  }
  return model;
}

void save_auto_dataset(std::span<const AutoLabeledRecord> records,
                       const std::filesystem::path& path) {
  ordered_json params;
  params["records"] = records.size();

  std::string body;
  for (const auto& rec : records) {
    ordered_json j;
    j["id"] = rec.id;
    ordered_json probs;
    for (const auto& [name, p] : rec.class_probs) probs[name] = p;
    j["probs"] = std::move(probs);
    j["dominant"] = rec.dominant_class;
    j["original"] = rec.original_label;
    j["tokens"] = rec.tokens;
    body += j.dump();
    body += '\n';
  }
  write_artifact(path, "autodata", std::move(params), body);
}

std::vector<AutoLabeledRecord> load_auto_dataset(const std::filesystem::path& path) {
  const auto artifact = read_artifact(path, "autodata");
  std::vector<AutoLabeledRecord> records;
  std::istringstream in(artifact.body);
  std::string line;
  std::size_t line_no = 1;  // header consumed
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError("malformed record on line " + std::to_string(line_no) + ": " + e.what());
    }
    AutoLabeledRecord rec;
    rec.id = j.at("id").get<std::string>();
    for (const auto& [name, p] : j.at("probs").items()) {
      rec.class_probs.emplace_back(name, p.get<double>());
    }
    rec.dominant_class = j.at("dominant").get<std::string>();
    rec.original_label = j.at("original").get<std::string>();
    rec.tokens = j.at("tokens").get<std::vector<std::string>>();
    if (!records.empty() && records.front().class_probs.size() != rec.class_probs.size()) {
      throw DataError("inconsistent class count on line " + std::to_string(line_no));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace newslabel
