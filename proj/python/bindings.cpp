#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <memory>
#include <optional>

#include "newslabel/autolabel.hpp"
#include "newslabel/classifiers.hpp"
#include "newslabel/corpus.hpp"
#include "newslabel/embeddings.hpp"
#include "newslabel/errors.hpp"
#include "newslabel/eval.hpp"
#include "newslabel/features.hpp"
#include "newslabel/lda.hpp"
#include "newslabel/model_store.hpp"
#include "newslabel/preprocess.hpp"

namespace py = pybind11;
using namespace newslabel;

namespace {

MultiLabelSet set_from_bits(const std::vector<int>& bits) {
  MultiLabelSet set;
  set.bits.reserve(bits.size());
  for (int b : bits) set.bits.push_back(b ? 1 : 0);
  return set;
}

std::vector<MultiLabelSet> sets_from_bits(const std::vector<std::vector<int>>& rows) {
  std::vector<MultiLabelSet> sets;
  sets.reserve(rows.size());
  for (const auto& row : rows) sets.push_back(set_from_bits(row));
  return sets;
}

std::vector<int> bits_of(const MultiLabelSet& set) {
  return {set.bits.begin(), set.bits.end()};
}

py::dict report_dict(const SingleLabelReport& report) {
  py::dict d;
  d["accuracy"] = report.accuracy;
  d["macro_precision"] = report.macro_precision;
  d["macro_recall"] = report.macro_recall;
  d["macro_f1"] = report.macro_f1;
  py::dict per_class;
  for (std::size_t c = 0; c < report.class_names.size(); ++c) {
    py::dict entry;
    entry["precision"] = report.precision[c];
    entry["recall"] = report.recall[c];
    entry["f1"] = report.f1[c];
    entry["support"] = report.support[c];
    per_class[py::str(report.class_names[c])] = entry;
  }
  d["per_class"] = per_class;
  d["confusion"] = report.confusion;
  d["classes"] = report.class_names;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "news classification pipeline: preprocessing, features, embeddings, "
            "LDA auto-labelling, classifiers and metrics";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  // ----------------------------------------------------------- corpus
  py::class_<Document>(m, "Document")
      .def(py::init([](std::string id, std::string text, std::optional<std::string> label) {
             return Document{std::move(id), std::move(text), std::move(label), std::nullopt,
                             std::nullopt, std::nullopt};
           }),
           py::arg("id"), py::arg("text"), py::arg("label") = std::nullopt)
      .def_readwrite("id", &Document::id)
      .def_readwrite("text", &Document::text)
      .def_readwrite("label", &Document::label);

  py::class_<Corpus>(m, "Corpus")
      .def(py::init<>())
      .def_readwrite("documents", &Corpus::documents)
      .def_readwrite("class_names", &Corpus::class_names);

  m.def("load_corpus",
        [](const std::filesystem::path& path, const std::string& format,
           const std::vector<std::string>& class_names) {
          return load_corpus(path, corpus_format_from_string(format), class_names);
        },
        py::arg("path"), py::arg("format") = "jsonl",
        py::arg("class_names") = std::vector<std::string>{});
  m.def("save_corpus_jsonl", &save_corpus_jsonl, py::arg("corpus"), py::arg("path"));
  m.def("split_train_test", &split_train_test, py::arg("corpus"), py::arg("per_class_train"),
        py::arg("per_class_test"), py::arg("seed"));

  // ------------------------------------------------------- preprocess
  py::class_<PreprocessConfig>(m, "PreprocessConfig")
      .def(py::init<>())
      .def_readwrite("stopwords", &PreprocessConfig::stopwords)
      .def_readwrite("stemmer_suffixes", &PreprocessConfig::stemmer_suffixes)
      .def_readwrite("ngram_order", &PreprocessConfig::ngram_order)
      .def_property(
          "strip_code_points",
          [](const PreprocessConfig& c) {
            return std::vector<std::uint32_t>(c.strip_code_points.begin(),
                                              c.strip_code_points.end());
          },
          [](PreprocessConfig& c, const std::vector<std::uint32_t>& points) {
            c.strip_code_points.assign(points.begin(), points.end());
          });

  py::class_<ProcessedDoc>(m, "ProcessedDoc")
      .def(py::init([](std::string id, std::vector<std::string> tokens,
                       std::optional<std::string> label) {
             return ProcessedDoc{std::move(id), std::move(tokens), std::move(label)};
           }),
           py::arg("id"), py::arg("tokens"), py::arg("label") = std::nullopt)
      .def_readwrite("id", &ProcessedDoc::id)
      .def_readwrite("tokens", &ProcessedDoc::tokens)
      .def_readwrite("label", &ProcessedDoc::label);

  m.def("load_stopwords", &load_stopwords, py::arg("path"));
  m.def("load_suffixes", &load_suffixes, py::arg("path"));
  m.def("clean_text",
        [](const std::string& raw, const PreprocessConfig& config) {
          return clean_text(raw, config);
        },
        py::arg("raw"), py::arg("config") = PreprocessConfig{});
  m.def("tokenize", [](const std::string& cleaned) { return tokenize(cleaned); },
        py::arg("cleaned"));
  m.def("stem",
        [](const std::string& token, const PreprocessConfig& config) {
          return stem(token, config);
        },
        py::arg("token"), py::arg("config"));
  m.def("remove_stopwords",
        [](const std::vector<std::string>& tokens, const std::vector<std::string>& stoplist) {
          return remove_stopwords(tokens, {stoplist.begin(), stoplist.end()});
        },
        py::arg("tokens"), py::arg("stoplist"));
  m.def("ngrams", &ngrams, py::arg("tokens"), py::arg("n"));
  m.def("preprocess_pipeline", &preprocess_pipeline, py::arg("doc"), py::arg("config"));
  m.def("preprocess_corpus",
        [](const Corpus& corpus, const PreprocessConfig& config) {
          auto result = preprocess_corpus(corpus, config);
          return py::make_tuple(result.docs, result.dropped_ids);
        },
        py::arg("corpus"), py::arg("config"));

  // --------------------------------------------------------- features
  py::class_<SparseVector>(m, "SparseVector")
      .def_readonly("indices", &SparseVector::indices)
      .def_readonly("values", &SparseVector::values)
      .def("__len__", [](const SparseVector& sv) { return sv.nnz(); });

  py::class_<Vocabulary, std::shared_ptr<Vocabulary>>(m, "Vocabulary")
      .def_property_readonly("size", [](const Vocabulary& v) { return v.size(); })
      .def_readonly("num_docs", &Vocabulary::num_docs)
      .def_readonly("id_to_term", &Vocabulary::id_to_term)
      .def_readonly("doc_freq", &Vocabulary::doc_freq)
      .def_readonly("total_freq", &Vocabulary::total_freq)
      .def("id_of", [](const Vocabulary& v, const std::string& term) { return v.id_of(term); });

  m.def("build_vocabulary",
        [](const std::vector<ProcessedDoc>& docs, std::uint32_t max_features,
           std::uint32_t min_df) {
          return std::make_shared<Vocabulary>(build_vocabulary(
              docs, max_features == 0 ? std::nullopt : std::optional<std::uint32_t>(max_features),
              min_df));
        },
        py::arg("docs"), py::arg("max_features") = 0, py::arg("min_df") = 1);
  m.def("bow_vector", &bow_vector, py::arg("doc"), py::arg("vocab"));
  m.def("tfidf_vector", &tfidf_vector, py::arg("doc"), py::arg("vocab"),
        py::arg("l2_normalize") = false);
  m.def("doc2bow", &doc2bow, py::arg("doc"), py::arg("vocab"));
  m.def("to_dense", &to_dense, py::arg("sparse"), py::arg("dim"));

  // ------------------------------------------------------- embeddings
  py::class_<SgnsParams>(m, "SgnsParams")
      .def(py::init<>())
      .def_readwrite("dim", &SgnsParams::dim)
      .def_readwrite("window", &SgnsParams::window)
      .def_readwrite("negatives", &SgnsParams::negatives)
      .def_readwrite("epochs", &SgnsParams::epochs)
      .def_readwrite("initial_lr", &SgnsParams::initial_lr)
      .def_readwrite("seed", &SgnsParams::seed);

  py::class_<SubwordParams>(m, "SubwordParams")
      .def(py::init<>())
      .def_readwrite("sgns", &SubwordParams::sgns)
      .def_readwrite("minn", &SubwordParams::minn)
      .def_readwrite("maxn", &SubwordParams::maxn)
      .def_readwrite("bucket_count", &SubwordParams::bucket_count);

  py::class_<EmbeddingModel>(m, "EmbeddingModel")
      .def_readonly("dim", &EmbeddingModel::dim)
      .def_readonly("epoch_losses", &EmbeddingModel::epoch_losses)
      .def_property_readonly("vocab_size",
                             [](const EmbeddingModel& m_) { return m_.vocab.size(); })
      .def("word_vector",
           [](const EmbeddingModel& m_, const std::string& word) {
             std::vector<double> out(m_.dim, 0.0);
             if (auto id = m_.vocab.id_of(word)) {
               const auto row = m_.input_vector(*id);
               out.assign(row.begin(), row.end());
             }
             return out;
           })
      .def("average_features", [](const EmbeddingModel& m_, const std::vector<std::string>& t) {
        return average_embedding_features(m_, t);
      });

  py::class_<SubwordEmbeddingModel>(m, "SubwordEmbeddingModel")
      .def_readonly("base", &SubwordEmbeddingModel::base)
      .def_readonly("minn", &SubwordEmbeddingModel::minn)
      .def_readonly("maxn", &SubwordEmbeddingModel::maxn)
      .def("word_vector", [](const SubwordEmbeddingModel& m_, const std::string& word) {
        return m_.word_vector(word);
      });

  py::class_<DocEmbeddingModel>(m, "DocEmbeddingModel")
      .def_readonly("base", &DocEmbeddingModel::base)
      .def_readonly("doc_ids", &DocEmbeddingModel::doc_ids)
      .def("doc_vector", [](const DocEmbeddingModel& m_, std::size_t row) {
        if (row >= m_.doc_ids.size()) throw DataError("doc row out of range");
        const auto v = m_.doc_vector(row);
        return std::vector<double>(v.begin(), v.end());
      });

  m.def("train_sgns",
        [](const std::vector<ProcessedDoc>& docs, const SgnsParams& p) {
          return train_sgns(docs, p);
        },
        py::arg("docs"), py::arg("params") = SgnsParams{});
  m.def("train_subword",
        [](const std::vector<ProcessedDoc>& docs, const SubwordParams& p) {
          return train_subword(docs, p);
        },
        py::arg("docs"), py::arg("params") = SubwordParams{});
  m.def("train_pvdm",
        [](const std::vector<ProcessedDoc>& docs, const SgnsParams& p) {
          return train_pvdm(docs, p);
        },
        py::arg("docs"), py::arg("params") = SgnsParams{});
  m.def("infer_doc_vector",
        [](const DocEmbeddingModel& model, const std::vector<std::string>& tokens, int steps,
           std::uint64_t seed) { return infer_doc_vector(model, tokens, steps, seed); },
        py::arg("model"), py::arg("tokens"), py::arg("steps") = 20, py::arg("seed") = 1);
  m.def("char_ngrams", &char_ngrams, py::arg("word"), py::arg("minn"), py::arg("maxn"));
  m.def("cosine_similarity",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          return cosine_similarity(a, b);
        });

  // -------------------------------------------------------------- lda
  py::class_<LdaParams>(m, "LdaParams")
      .def(py::init<>())
      .def_readwrite("num_topics", &LdaParams::num_topics)
      .def_readwrite("alpha", &LdaParams::alpha)
      .def_readwrite("beta", &LdaParams::beta)
      .def_readwrite("passes", &LdaParams::passes)
      .def_readwrite("iterations", &LdaParams::iterations)
      .def_readwrite("seed", &LdaParams::seed);

  py::class_<LdaModel>(m, "LdaModel")
      .def_readonly("num_topics", &LdaModel::num_topics)
      .def_readonly("alpha", &LdaModel::alpha)
      .def_readonly("beta", &LdaModel::beta)
      .def_property_readonly("num_docs",
                             [](const LdaModel& m_) { return m_.doc_topic_counts.size(); })
      .def("validate_counts", &LdaModel::validate_counts);

  m.def("train_lda",
        [](const std::vector<SparseVector>& bows, const LdaParams& params,
           std::shared_ptr<Vocabulary> vocab) {
          return train_lda(bows, params, std::move(vocab));
        },
        py::arg("corpus_bow"), py::arg("params"), py::arg("vocab"));
  m.def("doc_topic_distribution",
        [](const LdaModel& model, std::size_t index) {
          return doc_topic_distribution(model, index).probs;
        },
        py::arg("model"), py::arg("train_doc_index"));
  m.def("infer_topic_distribution",
        [](const LdaModel& model, const SparseVector& bow, std::uint64_t seed, int sweeps) {
          return infer_topic_distribution(model, bow, seed, sweeps).probs;
        },
        py::arg("model"), py::arg("doc_bow"), py::arg("seed") = 1, py::arg("sweeps") = 20);
  m.def("top_keywords", &top_keywords, py::arg("model"), py::arg("topic"), py::arg("k"));
  m.def("perplexity",
        [](const LdaModel& model, const std::vector<SparseVector>& held_out) {
          return perplexity(model, held_out);
        },
        py::arg("model"), py::arg("held_out_bow"));
  m.def("dominant_topic",
        [](const std::vector<double>& probs) { return dominant_topic(TopicDistribution{probs}); },
        py::arg("probs"));

  // -------------------------------------------------------- autolabel
  py::class_<TopicClassMap>(m, "TopicClassMap")
      .def_readonly("topic_to_class", &TopicClassMap::topic_to_class);

  py::class_<AutoLabeledRecord>(m, "AutoLabeledRecord")
      .def_readonly("id", &AutoLabeledRecord::id)
      .def_readonly("class_probs", &AutoLabeledRecord::class_probs)
      .def_readonly("dominant_class", &AutoLabeledRecord::dominant_class)
      .def_readonly("original_label", &AutoLabeledRecord::original_label)
      .def_readonly("tokens", &AutoLabeledRecord::tokens)
      .def_property_readonly("max_probability", &AutoLabeledRecord::max_probability);

  m.def("hungarian_max_assignment", &hungarian_max_assignment, py::arg("score"));
  m.def("assign_topic_names",
        [](const LdaModel& model, const std::vector<std::string>& labels,
           const std::vector<std::string>& class_names) {
          return assign_topic_names(model, labels, class_names);
        },
        py::arg("model"), py::arg("original_labels"), py::arg("class_names"));
  m.def("make_topic_map",
        [](std::vector<std::string> topic_to_class, const std::vector<std::string>& class_names) {
          return make_topic_map(std::move(topic_to_class), class_names);
        },
        py::arg("topic_to_class"), py::arg("class_names"));
  m.def("build_auto_dataset",
        [](const LdaModel& model, const TopicClassMap& map, const std::vector<ProcessedDoc>& docs,
           const std::vector<std::string>& class_names) {
          return build_auto_dataset(model, map, docs, class_names);
        },
        py::arg("model"), py::arg("map"), py::arg("docs"), py::arg("class_names"));
  m.def("threshold_split",
        [](const std::vector<AutoLabeledRecord>& records, double th) {
          return threshold_split(records, th);
        },
        py::arg("records"), py::arg("th"));
  m.def("multilabel_binarize",
        [](const std::vector<AutoLabeledRecord>& records, double th) {
          std::vector<std::vector<int>> out;
          for (const auto& set : multilabel_binarize(records, th)) out.push_back(bits_of(set));
          return out;
        },
        py::arg("records"), py::arg("th"));
  m.def("label_cardinality_histogram",
        [](const std::vector<std::vector<int>>& sets) {
          return label_cardinality_histogram(sets_from_bits(sets));
        },
        py::arg("sets"));
  m.def("onehot_from_single",
        [](const std::string& label, const std::vector<std::string>& class_names) {
          return bits_of(onehot_from_single(label, class_names));
        },
        py::arg("label"), py::arg("class_names"));

  // ------------------------------------------------------ classifiers
  py::class_<LinearFitParams>(m, "LinearFitParams")
      .def(py::init<>())
      .def_property(
          "loss",
          [](const LinearFitParams& p) {
            return p.loss == LossKind::log ? "log" : "hinge";
          },
          [](LinearFitParams& p, const std::string& name) {
            p.loss = loss_kind_from_string(name);
          })
      .def_readwrite("l2", &LinearFitParams::l2)
      .def_readwrite("epochs", &LinearFitParams::epochs)
      .def_readwrite("initial_lr", &LinearFitParams::initial_lr)
      .def_readwrite("seed", &LinearFitParams::seed);

  py::class_<LinearModel>(m, "LinearModel")
      .def_readonly("num_classes", &LinearModel::num_classes)
      .def_readonly("num_features", &LinearModel::num_features);

  py::class_<KnnModel>(m, "KnnModel").def_readonly("k", &KnnModel::k);

  m.def("fit_linear", &fit_linear, py::arg("X"), py::arg("y"),
        py::arg("params") = LinearFitParams{});
  m.def("predict",
        [](const LinearModel& model, const std::vector<double>& x) { return predict(model, x); },
        py::arg("model"), py::arg("x"));
  m.def("predict_proba",
        [](const LinearModel& model, const std::vector<double>& x) {
          return predict_proba(model, x);
        },
        py::arg("model"), py::arg("x"));
  m.def("fit_knn",
        [](std::vector<std::vector<double>> X, std::vector<int> y, int k,
           const std::string& metric) {
          return fit_knn(std::move(X), std::move(y), k, knn_metric_from_string(metric));
        },
        py::arg("X"), py::arg("y"), py::arg("k") = 5, py::arg("metric") = "cosine");
  m.def("knn_predict",
        [](const KnnModel& model, const std::vector<double>& x) { return knn_predict(model, x); },
        py::arg("model"), py::arg("x"));

  py::class_<BinaryRelevanceModel>(m, "BinaryRelevanceModel")
      .def_readonly("class_names", &BinaryRelevanceModel::class_names);

  m.def("fit_binary_relevance",
        [](const std::vector<std::vector<double>>& X, const std::vector<std::vector<int>>& Y,
           const std::vector<std::string>& class_names, const std::string& base,
           const LinearFitParams& linear, int knn_k, const std::string& knn_metric) {
          BinaryRelevanceConfig config;
          if (base == "knn") {
            config.base = BrBaseKind::knn;
            config.knn_k = knn_k;
            config.knn_metric = knn_metric_from_string(knn_metric);
          } else {
            config.base = BrBaseKind::linear;
            config.linear = linear;
            config.linear.loss = loss_kind_from_string(base == "logistic" ? "log" : base);
          }
          return fit_binary_relevance(X, sets_from_bits(Y), class_names, config);
        },
        py::arg("X"), py::arg("Y"), py::arg("class_names"), py::arg("base") = "hinge",
        py::arg("linear") = LinearFitParams{}, py::arg("knn_k") = 5,
        py::arg("knn_metric") = "cosine");
  m.def("predict_multilabel",
        [](const BinaryRelevanceModel& model, const std::vector<double>& x) {
          return bits_of(predict_multilabel(model, x));
        },
        py::arg("model"), py::arg("x"));

  // ------------------------------------------------------------- eval
  m.def("single_label_report",
        [](const std::vector<std::string>& y_true, const std::vector<std::string>& y_pred,
           const std::vector<std::string>& class_names) {
          return report_dict(single_label_report(y_true, y_pred, class_names));
        },
        py::arg("y_true"), py::arg("y_pred"), py::arg("class_names"));
  m.def("multilabel_accuracy",
        [](const std::vector<std::vector<int>>& Y, const std::vector<std::vector<int>>& Z) {
          return multilabel_accuracy(sets_from_bits(Y), sets_from_bits(Z));
        });
  m.def("multilabel_precision",
        [](const std::vector<std::vector<int>>& Y, const std::vector<std::vector<int>>& Z) {
          return multilabel_precision(sets_from_bits(Y), sets_from_bits(Z));
        });
  m.def("multilabel_recall",
        [](const std::vector<std::vector<int>>& Y, const std::vector<std::vector<int>>& Z) {
          return multilabel_recall(sets_from_bits(Y), sets_from_bits(Z));
        });
  m.def("multilabel_f1",
        [](const std::vector<std::vector<int>>& Y, const std::vector<std::vector<int>>& Z) {
          return multilabel_f1(sets_from_bits(Y), sets_from_bits(Z));
        });
  m.def("hamming_loss",
        [](const std::vector<std::vector<int>>& Y, const std::vector<std::vector<int>>& Z) {
          return hamming_loss(sets_from_bits(Y), sets_from_bits(Z));
        });
  m.def("cluster_vs_original",
        [](const std::vector<AutoLabeledRecord>& records) {
          return report_dict(cluster_vs_original(records));
        },
        py::arg("records"));

  // ------------------------------------------------------ model store
  m.def("save_vocabulary",
        [](std::shared_ptr<Vocabulary> vocab, const std::filesystem::path& path) {
          save_vocabulary(*vocab, path);
        });
  m.def("load_vocabulary", [](const std::filesystem::path& path) {
    return std::make_shared<Vocabulary>(load_vocabulary(path));
  });
  m.def("save_lda", &save_lda, py::arg("model"), py::arg("path"));
  m.def("load_lda",
        [](const std::filesystem::path& path, std::shared_ptr<Vocabulary> vocab) {
          return load_lda(path, std::move(vocab));
        },
        py::arg("path"), py::arg("vocab"));
  m.def("save_docvec", &save_docvec, py::arg("model"), py::arg("path"));
  m.def("load_docvec", &load_docvec, py::arg("path"));
  m.def("save_linear", &save_linear, py::arg("model"), py::arg("path"));
  m.def("load_linear", &load_linear, py::arg("path"));
}
