#include "newslabel/pipeline.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <unordered_map>

#include "newslabel/autolabel.hpp"
#include "newslabel/classifiers.hpp"
#include "newslabel/corpus.hpp"
#include "newslabel/embeddings.hpp"
#include "newslabel/errors.hpp"
#include "newslabel/eval.hpp"
#include "newslabel/io_util.hpp"
#include "newslabel/lda.hpp"
#include "newslabel/log.hpp"
#include "newslabel/model_store.hpp"
#include "newslabel/preprocess.hpp"
#include "newslabel/rng.hpp"

namespace newslabel::pipeline {

namespace {

using nlohmann::ordered_json;

std::filesystem::path ensure_output_dir(const PipelineConfig& config) {
  const auto dir = config.output_dir();
  std::filesystem::create_directories(dir);
  return dir;
}

void write_report(const PipelineConfig& config, const std::string& command,
                  const std::filesystem::path& path, ordered_json payload) {
  ordered_json report;
  report["command"] = command;
  report["seed"] = config.seed();
  report["config"] = config.echo();
  report["results"] = std::move(payload);
  atomic_write_file(path, report.dump(2) + "\n");
}

PreprocessConfig preprocess_config(const PipelineConfig& config) {
  PreprocessConfig pc;
  if (config.has("paths.stopwords")) {
    pc.stopwords = load_stopwords(config.require_string("paths.stopwords"));
  }
  if (config.has("paths.suffixes")) {
    pc.stemmer_suffixes = load_suffixes(config.require_string("paths.suffixes"));
  }
  pc.ngram_order = static_cast<int>(config.get_int("preprocess.ngram_order", 1));
  if (pc.ngram_order < 1 || pc.ngram_order > 3) {
    throw ConfigError("preprocess.ngram_order must be 1, 2 or 3");
  }
  if (config.has("preprocess.strip_code_points")) {
    pc.strip_code_points.clear();
    for (const auto& item : config.get_list("preprocess.strip_code_points")) {
      try {
        pc.strip_code_points.push_back(static_cast<char32_t>(std::stoul(item, nullptr, 16)));
      } catch (...) {
        throw ConfigError("preprocess.strip_code_points entries must be hex code points");
      }
    }
  }
  return pc;
}

std::vector<ProcessedDoc> load_processed(const PipelineConfig& config) {
  const auto path = config.output_dir() / "processed.jsonl";
  if (!std::filesystem::exists(path)) {
    throw DataError("'" + path.string() + "' not found; run the preprocess stage first");
  }
  return load_processed_jsonl(path);
}

std::vector<std::string> class_names_of(std::span<const ProcessedDoc> docs) {
  std::set<std::string> names;
  for (const auto& doc : docs) {
    if (doc.label) names.insert(*doc.label);
  }
  return {names.begin(), names.end()};
}

SgnsParams embedding_params(const PipelineConfig& config) {
  SgnsParams p;
  p.dim = static_cast<int>(config.get_int("embeddings.dim", 100));
  p.window = static_cast<int>(config.get_int("embeddings.window", 5));
  p.negatives = static_cast<int>(config.get_int("embeddings.negatives", 5));
  p.epochs = static_cast<int>(config.get_int("embeddings.epochs", 30));
  p.initial_lr = config.get_real("embeddings.initial_lr", 0.025);
  p.seed = config.seed();
  return p;
}

// Stratified seed-deterministic split of processed docs; mirrors
// split_train_test but is applied post-preprocessing.
std::pair<std::vector<ProcessedDoc>, std::vector<ProcessedDoc>> split_processed(
    std::span<const ProcessedDoc> docs, std::span<const std::string> class_names,
    std::size_t per_class_train, std::size_t per_class_test, std::uint64_t seed) {
  std::unordered_map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].label) by_class[*docs[i].label].push_back(i);
  }
  Rng rng(seed);
  std::vector<std::size_t> train_idx, test_idx;
  for (const auto& name : class_names) {
    auto& indices = by_class[name];
    if (indices.size() < per_class_train + per_class_test) {
      throw DataError("class '" + name + "' has " + std::to_string(indices.size()) +
                      " processed documents, needs " +
                      std::to_string(per_class_train + per_class_test));
    }
    rng.shuffle(indices);
    train_idx.insert(train_idx.end(), indices.begin(), indices.begin() + per_class_train);
    test_idx.insert(test_idx.end(), indices.begin() + per_class_train,
                    indices.begin() + per_class_train + per_class_test);
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::pair<std::vector<ProcessedDoc>, std::vector<ProcessedDoc>> out;
  for (std::size_t i : train_idx) out.first.push_back(docs[i]);
  for (std::size_t i : test_idx) out.second.push_back(docs[i]);
  return out;
}

struct FeatureSet {
  std::vector<std::vector<double>> train;
  std::vector<std::vector<double>> test;
  std::string description;
};

// bow | tfidf | docvec | avg-embedding, fit on train only
FeatureSet build_features(const PipelineConfig& config, const std::string& representation,
                          std::span<const ProcessedDoc> train, std::span<const ProcessedDoc> test,
                          const std::filesystem::path& out_dir) {
  FeatureSet features;
  features.description = representation;
  if (representation == "bow" || representation == "tfidf") {
    std::optional<std::uint32_t> max_features;
    if (config.get_int("features.max_features", 300) > 0) {
      max_features = static_cast<std::uint32_t>(config.get_int("features.max_features", 300));
    }
    const auto min_df = static_cast<std::uint32_t>(config.get_int("features.min_df", 1));
    const bool l2_normalize = config.get_bool("features.l2_normalize", false);
    const Vocabulary vocab = build_vocabulary(train, max_features, min_df);
    save_vocabulary(vocab, out_dir / "features_vocab.txt");
    const auto vectorize = [&](const ProcessedDoc& doc) {
      const SparseVector sv = representation == "bow" ? bow_vector(doc, vocab)
                                                      : tfidf_vector(doc, vocab, l2_normalize);
      return to_dense(sv, vocab.size());
    };
    for (const auto& doc : train) features.train.push_back(vectorize(doc));
    for (const auto& doc : test) features.test.push_back(vectorize(doc));
  } else if (representation == "docvec") {
    std::vector<ProcessedDoc> train_docs(train.begin(), train.end());
    const DocEmbeddingModel model = train_pvdm(train_docs, embedding_params(config));
    save_docvec(model, out_dir / "features_docvec.txt");
    const int steps = static_cast<int>(config.get_int("embeddings.infer_steps", 20));
    for (std::size_t d = 0; d < train.size(); ++d) {
      const auto row = model.doc_vector(d);
      features.train.emplace_back(row.begin(), row.end());
    }
    for (std::size_t d = 0; d < test.size(); ++d) {
      features.test.push_back(
          infer_doc_vector(model, test[d].tokens, steps, config.seed() + 1 + d));
    }
  } else if (representation == "avg-embedding") {
    std::vector<ProcessedDoc> train_docs(train.begin(), train.end());
    const EmbeddingModel model = train_sgns(train_docs, embedding_params(config));
    save_embedding(model, out_dir / "features_embedding.txt");
    for (const auto& doc : train) {
      features.train.push_back(average_embedding_features(model, doc.tokens));
    }
    for (const auto& doc : test) {
      features.test.push_back(average_embedding_features(model, doc.tokens));
    }
  } else {
    throw ConfigError("unknown representation '" + representation +
                      "' (expected bow, tfidf, docvec or avg-embedding)");
  }
  return features;
}

ordered_json report_json(const SingleLabelReport& report) {
  ordered_json j;
  j["accuracy"] = report.accuracy;
  j["macro_precision"] = report.macro_precision;
  j["macro_recall"] = report.macro_recall;
  j["macro_f1"] = report.macro_f1;
  ordered_json per_class = ordered_json::object();
  for (std::size_t c = 0; c < report.class_names.size(); ++c) {
    ordered_json entry;
    entry["precision"] = report.precision[c];
    entry["recall"] = report.recall[c];
    entry["f1"] = report.f1[c];
    entry["support"] = report.support[c];
    if (report.zero_predicted[c]) entry["zero_predicted"] = true;
    if (report.zero_actual[c]) entry["zero_actual"] = true;
    per_class[report.class_names[c]] = std::move(entry);
  }
  j["per_class"] = std::move(per_class);
  j["confusion"] = report.confusion;
  j["confusion_classes"] = report.class_names;
  return j;
}

ordered_json report_json(const MultiLabelReport& report) {
  ordered_json j;
  j["accuracy"] = report.accuracy;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["hamming_loss"] = report.hamming;
  j["instances"] = report.n;
  j["empty_set_convention_triggered"] = report.empty_set_convention_triggered;
  return j;
}

std::unordered_map<std::string, int> class_id_map(std::span<const std::string> class_names) {
  std::unordered_map<std::string, int> ids;
  for (std::size_t i = 0; i < class_names.size(); ++i) ids[std::string(class_names[i])] = static_cast<int>(i);
  return ids;
}

}  // namespace

void cmd_preprocess(const PipelineConfig& config) {
  const auto out_dir = ensure_output_dir(config);
  const auto format = corpus_format_from_string(config.get_string("paths.format", "jsonl"));
  const Corpus corpus = load_corpus(config.require_string("paths.corpus"), format,
                                    config.get_list("corpus.class_names"));
  const PreprocessConfig pc = preprocess_config(config);
  const PreprocessCorpusResult result = preprocess_corpus(corpus, pc);

  save_processed_jsonl(result.docs, out_dir / "processed.jsonl");

  ordered_json payload;
  payload["documents_in"] = corpus.documents.size();
  payload["documents_out"] = result.docs.size();
  payload["dropped"] = result.dropped_ids;
  payload["class_names"] = corpus.class_names;
  payload["ngram_order"] = pc.ngram_order;
  write_report(config, "preprocess", out_dir / "preprocess_report.json", std::move(payload));
}

void cmd_train_embeddings(const PipelineConfig& config) {
  const auto out_dir = ensure_output_dir(config);
  const auto docs = load_processed(config);
  const SgnsParams params = embedding_params(config);

  std::vector<std::string> kinds = config.get_list("embeddings.kinds");
  if (kinds.empty()) kinds = {"sgns"};

  ordered_json payload;
  for (const auto& kind : kinds) {
    if (kind == "sgns") {
      const EmbeddingModel model = train_sgns(docs, params);
      save_embedding(model, out_dir / "embedding_sgns.txt");
      payload["sgns"] = {{"vocab", model.vocab.size()}, {"epoch_losses", model.epoch_losses}};
    } else if (kind == "subword") {
      SubwordParams sp;
      sp.sgns = params;
      sp.minn = static_cast<int>(config.get_int("embeddings.minn", 3));
      sp.maxn = static_cast<int>(config.get_int("embeddings.maxn", 6));
      sp.bucket_count = static_cast<std::uint32_t>(config.get_int("embeddings.bucket_count", 20000));
      const SubwordEmbeddingModel model = train_subword(docs, sp);
      save_subword(model, out_dir / "embedding_subword.txt");
      payload["subword"] = {{"vocab", model.base.vocab.size()},
                            {"epoch_losses", model.base.epoch_losses}};
    } else if (kind == "pvdm") {
      const DocEmbeddingModel model = train_pvdm(docs, params);
      save_docvec(model, out_dir / "embedding_pvdm.txt");
      payload["pvdm"] = {{"vocab", model.base.vocab.size()},
                         {"docs", model.doc_ids.size()},
                         {"epoch_losses", model.base.epoch_losses}};
    } else {
      throw ConfigError("unknown embedding kind '" + kind + "' (expected sgns, subword or pvdm)");
    }
  }
  write_report(config, "train-embeddings", out_dir / "embeddings_report.json", std::move(payload));
}

void cmd_train_lda(const PipelineConfig& config) {
  const auto out_dir = ensure_output_dir(config);
  const auto docs = load_processed(config);

  std::optional<std::uint32_t> max_features;
  if (config.get_int("features.max_features", 0) > 0) {
    max_features = static_cast<std::uint32_t>(config.get_int("features.max_features", 0));
  }
  const auto min_df = static_cast<std::uint32_t>(config.get_int("features.min_df", 1));
  auto vocab = std::make_shared<const Vocabulary>(build_vocabulary(docs, max_features, min_df));
  save_vocabulary(*vocab, out_dir / "lda_vocab.txt");

  std::vector<SparseVector> bows;
  bows.reserve(docs.size());
  for (const auto& doc : docs) bows.push_back(doc2bow(doc, *vocab));

  // model selection on a held-out slice, final training on everything
  const double holdout_fraction = config.get_real("lda.holdout_fraction", 0.1);
  if (holdout_fraction <= 0.0 || holdout_fraction >= 1.0) {
    throw ConfigError("lda.holdout_fraction must be in (0, 1)");
  }
  std::vector<std::size_t> order(bows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(config.seed());
  rng.shuffle(order);
  const std::size_t holdout_n =
      std::max<std::size_t>(1, static_cast<std::size_t>(holdout_fraction * bows.size()));
  if (holdout_n >= bows.size()) throw DataError("corpus too small for the LDA holdout split");
  std::vector<SparseVector> fit_bows, holdout_bows;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < holdout_n ? holdout_bows : fit_bows).push_back(bows[order[i]]);
  }

  const int K = static_cast<int>(config.get_int("lda.topics", 8));
  const auto alphas = config.get_real_list("lda.alpha_grid", {50.0 / K});
  const auto betas = config.get_real_list("lda.beta_grid", {0.01});
  const auto passes_grid = config.get_int_list("lda.passes_grid", {10});
  const auto iterations_grid = config.get_int_list("lda.iterations_grid", {20});
  if (config.has("lda.chunksize")) {
    warn("lda.chunksize is accepted for config compatibility but ignored by the Gibbs sampler");
  }

  ordered_json grid_table = ordered_json::array();
  LdaParams best_params;
  double best_perplexity = std::numeric_limits<double>::infinity();
  for (const double alpha : alphas) {
    for (const double beta : betas) {
      for (const std::int64_t passes : passes_grid) {
        for (const std::int64_t iterations : iterations_grid) {
          LdaParams params;
          params.num_topics = K;
          params.alpha = alpha;
          params.beta = beta;
          params.passes = static_cast<int>(passes);
          params.iterations = static_cast<int>(iterations);
          params.seed = config.seed();
          const LdaModel candidate = train_lda(fit_bows, params, vocab);
          const double pp = perplexity(candidate, holdout_bows);
          ordered_json row;
          row["alpha"] = alpha;
          row["beta"] = beta;
          row["passes"] = passes;
          row["iterations"] = iterations;
          row["holdout_perplexity"] = pp;
          grid_table.push_back(std::move(row));
          if (pp < best_perplexity) {
            best_perplexity = pp;
            best_params = params;
          }
        }
      }
    }
  }

  const LdaModel model = train_lda(bows, best_params, vocab);
  save_lda(model, out_dir / "lda_model.txt");

  const int keyword_count =
      static_cast<int>(config.get_int("lda.keyword_count", std::min<std::int64_t>(5, vocab->size())));
  std::string keyword_report;
  ordered_json keywords_json = ordered_json::object();
  for (int k = 0; k < model.num_topics; ++k) {
    keyword_report += "topic " + std::to_string(k) + "\n";
    ordered_json list = ordered_json::array();
    for (const auto& [term, prob] : top_keywords(model, k, keyword_count)) {
      keyword_report += "  " + term + " " + format_real(prob) + "\n";
      list.push_back({{"term", term}, {"prob", prob}});
    }
    keywords_json[std::to_string(k)] = std::move(list);
  }
  atomic_write_file(out_dir / "lda_keywords.txt", keyword_report);

  ordered_json payload;
  payload["vocab_size"] = vocab->size();
  payload["documents"] = bows.size();
  payload["grid"] = std::move(grid_table);
  payload["best"] = {{"alpha", best_params.alpha},
                     {"beta", best_params.beta},
                     {"passes", best_params.passes},
                     {"iterations", best_params.iterations},
                     {"holdout_perplexity", best_perplexity}};
  payload["keywords"] = std::move(keywords_json);
  write_report(config, "train-lda", out_dir / "lda_report.json", std::move(payload));
}

void cmd_autolabel(const PipelineConfig& config) {
  const auto out_dir = ensure_output_dir(config);
  const auto docs = load_processed(config);
  auto vocab = std::make_shared<const Vocabulary>(load_vocabulary(out_dir / "lda_vocab.txt"));
  const LdaModel model = load_lda(out_dir / "lda_model.txt", vocab);
  if (model.doc_topic_counts.size() != docs.size()) {
    throw DataError("LDA model does not match processed.jsonl (document counts differ)");
  }

  const std::vector<std::string> class_names = class_names_of(docs);
  if (class_names.size() != static_cast<std::size_t>(model.num_topics)) {
    throw DataError("LDA topic count " + std::to_string(model.num_topics) +
                    " does not match the " + std::to_string(class_names.size()) +
                    " labelled classes");
  }

  TopicClassMap map;
  const auto explicit_map = config.get_list("autolabel.topic_map");
  if (!explicit_map.empty()) {
    map = make_topic_map(explicit_map, class_names);
  } else {
    std::vector<std::string> labels;
    labels.reserve(docs.size());
    for (const auto& doc : docs) {
      if (!doc.label) throw DataError("document '" + doc.id + "' has no label for topic naming");
      labels.push_back(*doc.label);
    }
    map = assign_topic_names(model, labels, class_names);
  }

  const auto records = build_auto_dataset(model, map, docs, class_names);
  save_auto_dataset(records, out_dir / "autolabel.jsonl");

  const SingleLabelReport comparison = cluster_vs_original(records);
  atomic_write_file(out_dir / "cluster_vs_original.txt", render_text(comparison));

  ordered_json histograms = ordered_json::object();
  for (const double th : config.get_real_list("autolabel.thresholds", {0.1, 0.2, 0.3, 0.4, 0.5})) {
    const auto sets = multilabel_binarize(records, th);
    ordered_json h = ordered_json::object();
    for (const auto& [cardinality, count] : label_cardinality_histogram(sets)) {
      h[std::to_string(cardinality)] = count;
    }
    histograms[format_real(th)] = std::move(h);
  }

  const double split_th = config.get_real("autolabel.split_threshold", 0.5);
  const auto [train_records, test_records] = threshold_split(records, split_th);

  ordered_json payload;
  payload["records"] = records.size();
  payload["topic_map"] = map.topic_to_class;
  payload["cluster_vs_original"] = report_json(comparison);
  payload["cardinality_histograms"] = std::move(histograms);
  payload["split_threshold"] = split_th;
  payload["split_train"] = train_records.size();
  payload["split_test"] = test_records.size();
  write_report(config, "autolabel", out_dir / "autolabel_report.json", std::move(payload));
}

void cmd_train_classifier(const PipelineConfig& config) {
  const auto out_dir = ensure_output_dir(config);
  const std::string representation = config.get_string("features.representation", "tfidf");
  const std::string kind = config.get_string("classifier.kind", "logistic");
  const std::string source = config.get_string("classifier.source", "manual");

  std::vector<ProcessedDoc> train_docs, test_docs;
  std::vector<std::string> class_names;
  std::vector<std::string> test_truth;  // labels the test side is scored against

  if (source == "manual") {
    const auto docs = load_processed(config);
    class_names = class_names_of(docs);
    if (class_names.size() < 2) throw DataError("need at least two labelled classes");
    const auto per_class_train = static_cast<std::size_t>(config.get_int("corpus.per_class_train", 0));
    const auto per_class_test = static_cast<std::size_t>(config.get_int("corpus.per_class_test", 0));
    if (per_class_train == 0 || per_class_test == 0) {
      throw ConfigError("corpus.per_class_train and corpus.per_class_test must be positive");
    }
    auto split = split_processed(docs, class_names, per_class_train, per_class_test, config.seed());
    train_docs = std::move(split.first);
    test_docs = std::move(split.second);
    for (const auto& doc : test_docs) test_truth.push_back(*doc.label);
  } else if (source == "auto") {
    const auto records = load_auto_dataset(out_dir / "autolabel.jsonl");
    if (records.empty()) throw DataError("auto-labelled dataset is empty");
    for (const auto& [name, p] : records.front().class_probs) class_names.push_back(name);
    const double th = config.get_real("autolabel.split_threshold", 0.5);
    const auto [train_records, test_records] = threshold_split(records, th);
    if (test_records.empty()) throw DataError("threshold split left no test records");
    for (const auto& rec : train_records) {
      train_docs.push_back(ProcessedDoc{rec.id, rec.tokens, rec.dominant_class});
    }
    for (const auto& rec : test_records) {
      test_docs.push_back(ProcessedDoc{rec.id, rec.tokens, rec.original_label});
      test_truth.push_back(rec.original_label);
    }
  } else {
    throw ConfigError("classifier.source must be manual or auto");
  }

  const FeatureSet features = build_features(config, representation, train_docs, test_docs, out_dir);
  const auto ids = class_id_map(class_names);
  std::vector<int> y_train;
  y_train.reserve(train_docs.size());
  for (const auto& doc : train_docs) y_train.push_back(ids.at(*doc.label));

  std::vector<int> predictions(test_docs.size());
  ordered_json model_info;
  if (kind == "logistic" || kind == "hinge") {
    LinearFitParams params;
    params.loss = kind == "logistic" ? LossKind::log : LossKind::hinge;
    params.l2 = config.get_real("classifier.l2", 1e-4);
    params.epochs = static_cast<int>(config.get_int("classifier.epochs", 30));
    params.initial_lr = config.get_real("classifier.initial_lr", 0.1);
    params.seed = config.seed();
    const LinearModel model = fit_linear(features.train, y_train, params);
    save_linear(model, out_dir / "classifier_linear.txt");
    for (std::size_t i = 0; i < features.test.size(); ++i) {
      predictions[i] = predict(model, features.test[i]);
    }
    model_info = {{"kind", kind}, {"epochs", params.epochs}, {"l2", params.l2}};
  } else if (kind == "knn") {
    const int k = static_cast<int>(config.get_int("classifier.knn_k", 5));
    const KnnMetric metric =
        knn_metric_from_string(config.get_string("classifier.knn_metric", "cosine"));
    const KnnModel model = fit_knn(features.train, y_train, k, metric);
    save_knn(model, out_dir / "classifier_knn.txt");
    for (std::size_t i = 0; i < features.test.size(); ++i) {
      predictions[i] = knn_predict(model, features.test[i]);
    }
    model_info = {{"kind", "knn"}, {"k", k}};
  } else {
    throw ConfigError("classifier.kind must be logistic, hinge or knn");
  }

  std::vector<std::string> y_pred;
  y_pred.reserve(predictions.size());
  for (const int p : predictions) y_pred.push_back(class_names[p]);
  const SingleLabelReport report = single_label_report(test_truth, y_pred, class_names);
  atomic_write_file(out_dir / "classifier_report.txt", render_text(report));

  ordered_json payload;
  payload["source"] = source;
  payload["representation"] = features.description;
  payload["model"] = std::move(model_info);
  payload["train_size"] = train_docs.size();
  payload["test_size"] = test_docs.size();
  payload["report"] = report_json(report);
  write_report(config, "train-classifier", out_dir / "classifier_report.json", std::move(payload));
}

void cmd_multilabel(const PipelineConfig& config) {
  const auto out_dir = ensure_output_dir(config);
  const auto records = load_auto_dataset(out_dir / "autolabel.jsonl");
  if (records.empty()) throw DataError("auto-labelled dataset is empty");

  std::vector<std::string> class_names;
  for (const auto& [name, p] : records.front().class_probs) class_names.push_back(name);

  const double th = config.get_real("multilabel.threshold", 0.3);
  const auto label_sets = multilabel_binarize(records, th);

  // seeded example split; empty label sets never train, always evaluate
  const double test_fraction = config.get_real("multilabel.test_fraction", 0.2);
  if (test_fraction <= 0.0 || test_fraction >= 1.0) {
    throw ConfigError("multilabel.test_fraction must be in (0, 1)");
  }
  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(config.seed());
  rng.shuffle(order);
  const std::size_t test_n =
      std::max<std::size_t>(1, static_cast<std::size_t>(test_fraction * records.size()));
  if (test_n >= records.size()) throw DataError("corpus too small for the multilabel split");
  std::vector<std::size_t> test_idx(order.begin(), order.begin() + test_n);
  std::vector<std::size_t> train_idx(order.begin() + test_n, order.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  const std::string representation = config.get_string("features.representation", "docvec");
  std::vector<ProcessedDoc> train_docs, test_docs;
  std::vector<MultiLabelSet> y_train;
  std::size_t empty_excluded = 0;
  for (const std::size_t i : train_idx) {
    if (label_sets[i].cardinality() == 0) {
      ++empty_excluded;  // kept in the dataset, excluded from fitting
      continue;
    }
    train_docs.push_back(ProcessedDoc{records[i].id, records[i].tokens, std::nullopt});
    y_train.push_back(label_sets[i]);
  }
  if (train_docs.empty()) throw DataError("no training examples with non-empty label sets");
  for (const std::size_t i : test_idx) {
    test_docs.push_back(ProcessedDoc{records[i].id, records[i].tokens, std::nullopt});
  }

  const FeatureSet features = build_features(config, representation, train_docs, test_docs, out_dir);

  BinaryRelevanceConfig br;
  const std::string base = config.get_string("multilabel.base", "hinge");
  if (base == "knn") {
    br.base = BrBaseKind::knn;
    br.knn_k = static_cast<int>(config.get_int("classifier.knn_k", 5));
    br.knn_metric = knn_metric_from_string(config.get_string("classifier.knn_metric", "cosine"));
  } else {
    br.base = BrBaseKind::linear;
    br.linear.loss = loss_kind_from_string(base == "logistic" ? "log" : base);
    br.linear.l2 = config.get_real("classifier.l2", 1e-4);
    br.linear.epochs = static_cast<int>(config.get_int("classifier.epochs", 30));
    br.linear.initial_lr = config.get_real("classifier.initial_lr", 0.1);
    br.linear.seed = config.seed();
  }
  const BinaryRelevanceModel model = fit_binary_relevance(features.train, y_train, class_names, br);

  std::vector<MultiLabelSet> predicted;
  std::vector<MultiLabelSet> auto_truth;
  std::vector<MultiLabelSet> onehot_truth;
  for (std::size_t j = 0; j < test_idx.size(); ++j) {
    predicted.push_back(predict_multilabel(model, features.test[j]));
    auto_truth.push_back(label_sets[test_idx[j]]);
    onehot_truth.push_back(onehot_from_single(records[test_idx[j]].original_label, class_names));
  }

  ordered_json histogram = ordered_json::object();
  for (const auto& [cardinality, count] : label_cardinality_histogram(label_sets)) {
    histogram[std::to_string(cardinality)] = count;
  }

  const MultiLabelReport vs_multi = multilabel_report(auto_truth, predicted);
  const MultiLabelReport vs_onehot = multilabel_report(onehot_truth, predicted);
  atomic_write_file(out_dir / "multilabel_report.txt",
                    "vs automatic multi-label truth\n" + render_text(vs_multi) +
                        "\nvs one-hot original labels\n" + render_text(vs_onehot));

  ordered_json payload;
  payload["threshold"] = th;
  payload["base"] = base;
  payload["representation"] = features.description;
  payload["train_size"] = train_docs.size();
  payload["test_size"] = test_docs.size();
  payload["empty_sets_excluded_from_training"] = empty_excluded;
  payload["cardinality_histogram"] = std::move(histogram);
  payload["vs_multilabel"] = report_json(vs_multi);
  payload["vs_original_onehot"] = report_json(vs_onehot);
  write_report(config, "multilabel", out_dir / "multilabel_report.json", std::move(payload));
}

void cmd_report(const PipelineConfig& config) {
  const auto out_dir = ensure_output_dir(config);
  ordered_json summary = ordered_json::object();
  std::string table;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(out_dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 12 &&
        name.substr(name.size() - 12) == "_report.json" && name != "summary.json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    ordered_json j;
    try {
      j = ordered_json::parse(read_file(file));
    } catch (const nlohmann::json::parse_error&) {
      warn("skipping unparsable report '" + file.string() + "'");
      continue;
    }
    const std::string key = file.filename().string();
    summary[key] = j.contains("results") ? j["results"] : j;
    table += key + "\n";
    if (j.contains("results")) {
      const auto& r = j["results"];
      if (r.contains("report") && r["report"].contains("accuracy")) {
        table += "  accuracy " + format_real(r["report"]["accuracy"].get<double>()) + "\n";
      }
      if (r.contains("cluster_vs_original")) {
        table += "  cluster_vs_original accuracy " +
                 format_real(r["cluster_vs_original"]["accuracy"].get<double>()) + "\n";
      }
      if (r.contains("vs_multilabel")) {
        table += "  multilabel accuracy " +
                 format_real(r["vs_multilabel"]["accuracy"].get<double>()) + "\n";
        table += "  hamming loss " +
                 format_real(r["vs_multilabel"]["hamming_loss"].get<double>()) + "\n";
      }
      if (r.contains("best")) {
        table += "  best holdout perplexity " +
                 format_real(r["best"]["holdout_perplexity"].get<double>()) + "\n";
      }
    }
  }
  ordered_json wrapper;
  wrapper["command"] = "report";
  wrapper["seed"] = config.seed();
  wrapper["config"] = config.echo();
  wrapper["reports"] = std::move(summary);
  atomic_write_file(out_dir / "summary.json", wrapper.dump(2) + "\n");
  atomic_write_file(out_dir / "summary.txt", table);
}

void run_command(const std::string& name, const PipelineConfig& config) {
  config.validate();
  if (name == "preprocess") {
    cmd_preprocess(config);
  } else if (name == "train-embeddings") {
    cmd_train_embeddings(config);
  } else if (name == "train-lda") {
    cmd_train_lda(config);
  } else if (name == "autolabel") {
    cmd_autolabel(config);
  } else if (name == "train-classifier") {
    cmd_train_classifier(config);
  } else if (name == "multilabel") {
    cmd_multilabel(config);
  } else if (name == "report") {
    cmd_report(config);
  } else {
    throw ConfigError("unknown subcommand '" + name + "'");
  }
}

}  // namespace newslabel::pipeline
