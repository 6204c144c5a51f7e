#include "newslabel/embeddings.hpp"

#include <algorithm>
#include <cmath>

#include "newslabel/errors.hpp"
#include "newslabel/io_util.hpp"
#include "newslabel/rng.hpp"
#include "newslabel/utf8.hpp"

namespace newslabel {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double log_sigmoid(double x) {
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Shared trainer state. The "input" of one update is either a single word row
// (plain skip-gram), a word row plus its gram buckets (subword), or a doc row
// plus context word rows (distributed memory); the composed vector is their
// mean and every contributor receives grad/contributor_count.
struct Trainer {
  int dim;
  int negatives;
  double* output_vectors;
  const std::vector<double>* negative_cdf;
  double cdf_total;
  Rng* rng;
  bool update_outputs = true;

  double loss_accum = 0.0;
  std::uint64_t pair_count = 0;

  std::uint32_t sample_negative(std::uint32_t positive) {
    for (int attempt = 0; attempt < 128; ++attempt) {
      const double u = rng->uniform() * cdf_total;
      const auto it = std::upper_bound(negative_cdf->begin(), negative_cdf->end(), u);
      auto id = static_cast<std::uint32_t>(it - negative_cdf->begin());
      if (id >= negative_cdf->size()) id = static_cast<std::uint32_t>(negative_cdf->size() - 1);
      if (id != positive) return id;
    }
    return positive == 0 ? 1 : 0;  // vocab >= negatives + 1 >= 2 guarantees another id
  }

  // One negative-sampling step for a composed input vector. Accumulates the
  // log-likelihood gradient w.r.t. the composed vector into grad_h and applies
  // output-side updates in place.
  void step(std::span<const double> h, std::uint32_t target, double lr, double* grad_h) {
    std::fill(grad_h, grad_h + dim, 0.0);
    double loss = 0.0;
    {
      double* u = output_vectors + static_cast<std::size_t>(target) * dim;
      const double s = dot(h, {u, static_cast<std::size_t>(dim)});
      const double g = 1.0 - sigmoid(s);
      loss -= log_sigmoid(s);
      for (int i = 0; i < dim; ++i) grad_h[i] += g * u[i];
      if (update_outputs) {
        for (int i = 0; i < dim; ++i) u[i] += lr * g * h[i];
      }
    }
    for (int n = 0; n < negatives; ++n) {
      const std::uint32_t neg = sample_negative(target);
      double* u = output_vectors + static_cast<std::size_t>(neg) * dim;
      const double s = dot(h, {u, static_cast<std::size_t>(dim)});
      const double g = -sigmoid(s);
      loss -= log_sigmoid(-s);
      for (int i = 0; i < dim; ++i) grad_h[i] += g * u[i];
      if (update_outputs) {
        for (int i = 0; i < dim; ++i) u[i] += lr * g * h[i];
      }
    }
    loss_accum += loss;
    ++pair_count;
  }
};

Vocabulary embedding_vocabulary(std::span<const ProcessedDoc> docs) {
  return build_vocabulary(docs, std::nullopt, 1);
}

std::vector<double> unigram_cdf(const Vocabulary& vocab) {
  std::vector<double> cdf(vocab.size());
  double total = 0.0;
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    total += std::pow(static_cast<double>(vocab.total_freq[v]), 0.75);
    cdf[v] = total;
  }
  return cdf;
}

void init_uniform(std::vector<double>& vec, int dim, Rng& rng) {
  const double half = 0.5 / static_cast<double>(dim);
  for (double& x : vec) x = rng.uniform(-half, half);
}

std::vector<std::vector<std::uint32_t>> token_ids(std::span<const ProcessedDoc> docs,
                                                  const Vocabulary& vocab,
                                                  std::uint64_t* total_tokens) {
  std::vector<std::vector<std::uint32_t>> ids(docs.size());
  *total_tokens = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    ids[d].reserve(docs[d].tokens.size());
    for (const auto& t : docs[d].tokens) {
      if (auto id = vocab.id_of(t)) ids[d].push_back(*id);
    }
    *total_tokens += ids[d].size();
  }
  return ids;
}

// Initialization and negative sampling draw from distinct streams so that
// models differing only in extra initialized tables (gram buckets, doc rows)
// still see identical negative-sample sequences for a tied seed.
constexpr std::uint64_t kTrainStreamSalt = 0xD1B54A32D192ED03ull;

double decayed_lr(double initial_lr, std::uint64_t processed, std::uint64_t total) {
  const double progress = total == 0 ? 0.0 : static_cast<double>(processed) / static_cast<double>(total);
  return initial_lr * std::max(1.0 - progress, 0.01);
}

void check_params(const SgnsParams& p, std::size_t vocab_size) {
  if (p.dim <= 0 || p.window <= 0 || p.negatives <= 0 || p.epochs < 0) {
    throw ConfigError("embedding hyperparameters must be positive");
  }
  if (p.initial_lr <= 0.0) throw ConfigError("initial learning rate must be positive");
  if (vocab_size < static_cast<std::size_t>(p.negatives) + 1) {
    throw DataError("vocabulary smaller than negatives + 1");
  }
}

}  // namespace

std::vector<std::string> char_ngrams(std::string_view word, int minn, int maxn) {
  if (minn < 1 || minn > maxn) throw ConfigError("need 1 <= minn <= maxn");
  std::string wrapped = "<";
  wrapped += word;
  wrapped += '>';
  const std::vector<char32_t> cps = utf8::decode_all(wrapped);
  std::vector<std::string> grams;
  const int n = static_cast<int>(cps.size());
  for (int len = minn; len <= maxn; ++len) {
    for (int start = 0; start + len <= n; ++start) {
      std::string gram;
      for (int i = 0; i < len; ++i) utf8::append(gram, cps[start + i]);
      grams.push_back(std::move(gram));
    }
  }
  return grams;
}

SgnsGradients sgns_loss_and_grads(std::span<const double> input, std::span<const double> positive,
                                  const std::vector<std::vector<double>>& negatives) {
  const std::size_t dim = input.size();
  SgnsGradients g;
  g.d_input.assign(dim, 0.0);
  g.d_positive.assign(dim, 0.0);
  g.d_negatives.assign(negatives.size(), std::vector<double>(dim, 0.0));

  const double s_pos = dot(input, positive);
  g.loss -= log_sigmoid(s_pos);
  const double coef_pos = sigmoid(s_pos) - 1.0;  // d(-log s(x))/dx
  for (std::size_t i = 0; i < dim; ++i) {
    g.d_input[i] += coef_pos * positive[i];
    g.d_positive[i] = coef_pos * input[i];
  }
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    const double s = dot(input, {negatives[k].data(), dim});
    g.loss -= log_sigmoid(-s);
    const double coef = sigmoid(s);
    for (std::size_t i = 0; i < dim; ++i) {
      g.d_input[i] += coef * negatives[k][i];
      g.d_negatives[k][i] = coef * input[i];
    }
  }
  return g;
}

EmbeddingModel train_sgns(std::span<const ProcessedDoc> docs, const SgnsParams& params) {
  if (docs.empty()) throw DataError("cannot train embeddings on an empty corpus");
  EmbeddingModel model;
  model.vocab = embedding_vocabulary(docs);
  check_params(params, model.vocab.size());
  model.dim = params.dim;
  model.params = params;

  const std::size_t V = model.vocab.size();
  Rng init_rng(params.seed);
  Rng train_rng(params.seed ^ kTrainStreamSalt);
  model.input_vectors.resize(V * params.dim);
  init_uniform(model.input_vectors, params.dim, init_rng);
  model.output_vectors.assign(V * params.dim, 0.0);
  model.negative_cdf = unigram_cdf(model.vocab);

  std::uint64_t total_tokens = 0;
  const auto ids = token_ids(docs, model.vocab, &total_tokens);
  const std::uint64_t total_updates = total_tokens * static_cast<std::uint64_t>(params.epochs);

  Trainer trainer{params.dim,
                  params.negatives,
                  model.output_vectors.data(),
                  &model.negative_cdf,
                  model.negative_cdf.back(),
                  &train_rng};
  std::vector<double> grad_h(params.dim);
  std::uint64_t processed = 0;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    trainer.loss_accum = 0.0;
    trainer.pair_count = 0;
    for (const auto& doc : ids) {
      const int len = static_cast<int>(doc.size());
      for (int t = 0; t < len; ++t) {
        const double lr = decayed_lr(params.initial_lr, processed, total_updates);
        double* center =
            model.input_vectors.data() + static_cast<std::size_t>(doc[t]) * params.dim;
        const int lo = std::max(0, t - params.window);
        const int hi = std::min(len - 1, t + params.window);
        for (int c = lo; c <= hi; ++c) {
          if (c == t) continue;
          trainer.step({center, static_cast<std::size_t>(params.dim)}, doc[c], lr, grad_h.data());
          for (int i = 0; i < params.dim; ++i) center[i] += lr * grad_h[i];
        }
        ++processed;
      }
    }
    model.epoch_losses.push_back(
        trainer.pair_count == 0 ? 0.0 : trainer.loss_accum / static_cast<double>(trainer.pair_count));
  }
  return model;
}

std::vector<double> SubwordEmbeddingModel::word_vector(std::string_view word) const {
  const int dim = base.dim;
  std::vector<double> vec(dim, 0.0);
  std::size_t contributors = 0;
  if (auto id = base.vocab.id_of(std::string(word))) {
    const auto row = base.input_vector(*id);
    for (int i = 0; i < dim; ++i) vec[i] += row[i];
    ++contributors;
  }
  for (const auto& gram : char_ngrams(word, minn, maxn)) {
    const std::uint32_t bucket = fnv1a32(gram) % bucket_count;
    const double* row = ngram_vectors.data() + static_cast<std::size_t>(bucket) * dim;
    for (int i = 0; i < dim; ++i) vec[i] += row[i];
    ++contributors;
  }
  if (contributors > 0) {
    for (double& x : vec) x /= static_cast<double>(contributors);
  }
  return vec;
}

SubwordEmbeddingModel train_subword(std::span<const ProcessedDoc> docs,
                                    const SubwordParams& params) {
  if (params.minn < 1 || params.minn > params.maxn) throw ConfigError("need 1 <= minn <= maxn");
  if (params.bucket_count == 0) throw ConfigError("bucket_count must be positive");
  if (docs.empty()) throw DataError("cannot train embeddings on an empty corpus");

  SubwordEmbeddingModel model;
  model.base.vocab = embedding_vocabulary(docs);
  check_params(params.sgns, model.base.vocab.size());
  const int dim = params.sgns.dim;
  model.base.dim = dim;
  model.base.params = params.sgns;
  model.minn = params.minn;
  model.maxn = params.maxn;
  model.bucket_count = params.bucket_count;

  const std::size_t V = model.base.vocab.size();
  Rng init_rng(params.sgns.seed);
  Rng train_rng(params.sgns.seed ^ kTrainStreamSalt);
  model.base.input_vectors.resize(V * dim);
  init_uniform(model.base.input_vectors, dim, init_rng);
  model.ngram_vectors.resize(static_cast<std::size_t>(params.bucket_count) * dim);
  init_uniform(model.ngram_vectors, dim, init_rng);
  model.base.output_vectors.assign(V * dim, 0.0);
  model.base.negative_cdf = unigram_cdf(model.base.vocab);

  // gram buckets per vocabulary word, fixed for the whole run
  std::vector<std::vector<std::uint32_t>> word_buckets(V);
  for (std::size_t v = 0; v < V; ++v) {
    for (const auto& gram : char_ngrams(model.base.vocab.id_to_term[v], params.minn, params.maxn)) {
      word_buckets[v].push_back(fnv1a32(gram) % params.bucket_count);
    }
  }

  std::uint64_t total_tokens = 0;
  const auto ids = token_ids(docs, model.base.vocab, &total_tokens);
  const std::uint64_t total_updates = total_tokens * static_cast<std::uint64_t>(params.sgns.epochs);

  Trainer trainer{dim,
                  params.sgns.negatives,
                  model.base.output_vectors.data(),
                  &model.base.negative_cdf,
                  model.base.negative_cdf.back(),
                  &train_rng};
  std::vector<double> h(dim), grad_h(dim);
  std::uint64_t processed = 0;

  for (int epoch = 0; epoch < params.sgns.epochs; ++epoch) {
    trainer.loss_accum = 0.0;
    trainer.pair_count = 0;
    for (const auto& doc : ids) {
      const int len = static_cast<int>(doc.size());
      for (int t = 0; t < len; ++t) {
        const double lr = decayed_lr(params.sgns.initial_lr, processed, total_updates);
        const std::uint32_t w = doc[t];
        double* word_row = model.base.input_vectors.data() + static_cast<std::size_t>(w) * dim;
        const auto& buckets = word_buckets[w];
        const double count = static_cast<double>(1 + buckets.size());

        const int lo = std::max(0, t - params.sgns.window);
        const int hi = std::min(len - 1, t + params.sgns.window);
        for (int c = lo; c <= hi; ++c) {
          if (c == t) continue;
          for (int i = 0; i < dim; ++i) h[i] = word_row[i];
          for (std::uint32_t b : buckets) {
            const double* row = model.ngram_vectors.data() + static_cast<std::size_t>(b) * dim;
            for (int i = 0; i < dim; ++i) h[i] += row[i];
          }
          for (int i = 0; i < dim; ++i) h[i] /= count;

          trainer.step(h, doc[c], lr, grad_h.data());
          const double share = lr / count;
          for (int i = 0; i < dim; ++i) word_row[i] += share * grad_h[i];
          for (std::uint32_t b : buckets) {
            double* row = model.ngram_vectors.data() + static_cast<std::size_t>(b) * dim;
            for (int i = 0; i < dim; ++i) row[i] += share * grad_h[i];
          }
        }
        ++processed;
      }
    }
    model.base.epoch_losses.push_back(
        trainer.pair_count == 0 ? 0.0 : trainer.loss_accum / static_cast<double>(trainer.pair_count));
  }
  return model;
}

DocEmbeddingModel train_pvdm(std::span<const ProcessedDoc> docs, const SgnsParams& params) {
  if (docs.empty()) throw DataError("cannot train embeddings on an empty corpus");
  DocEmbeddingModel model;
  model.base.vocab = embedding_vocabulary(docs);
  check_params(params, model.base.vocab.size());
  const int dim = params.dim;
  model.base.dim = dim;
  model.base.params = params;

  const std::size_t V = model.base.vocab.size();
  const std::size_t D = docs.size();
  Rng init_rng(params.seed);
  Rng train_rng(params.seed ^ kTrainStreamSalt);
  model.base.input_vectors.resize(V * dim);
  init_uniform(model.base.input_vectors, dim, init_rng);
  model.doc_vectors.resize(D * dim);
  init_uniform(model.doc_vectors, dim, init_rng);
  model.base.output_vectors.assign(V * dim, 0.0);
  model.base.negative_cdf = unigram_cdf(model.base.vocab);

  model.doc_ids.reserve(D);
  for (std::size_t d = 0; d < D; ++d) {
    model.doc_ids.push_back(docs[d].id);
    if (!model.doc_index.emplace(docs[d].id, d).second) {
      throw DataError("duplicate document id '" + docs[d].id + "'");
    }
  }

  std::uint64_t total_tokens = 0;
  const auto ids = token_ids(docs, model.base.vocab, &total_tokens);
  const std::uint64_t total_updates = total_tokens * static_cast<std::uint64_t>(params.epochs);

  Trainer trainer{dim,
                  params.negatives,
                  model.base.output_vectors.data(),
                  &model.base.negative_cdf,
                  model.base.negative_cdf.back(),
                  &train_rng};
  std::vector<double> h(dim), grad_h(dim);
  std::vector<double*> context_rows;
  std::uint64_t processed = 0;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    trainer.loss_accum = 0.0;
    trainer.pair_count = 0;
    for (std::size_t d = 0; d < ids.size(); ++d) {
      double* doc_row = model.doc_vectors.data() + d * dim;
      const auto& doc = ids[d];
      const int len = static_cast<int>(doc.size());
      for (int t = 0; t < len; ++t) {
        const double lr = decayed_lr(params.initial_lr, processed, total_updates);
        ++processed;

        context_rows.clear();
        const int lo = std::max(0, t - params.window);
        const int hi = std::min(len - 1, t + params.window);
        for (int c = lo; c <= hi; ++c) {
          if (c == t) continue;
          context_rows.push_back(model.base.input_vectors.data() +
                                 static_cast<std::size_t>(doc[c]) * dim);
        }
        const double count = static_cast<double>(1 + context_rows.size());
        for (int i = 0; i < dim; ++i) h[i] = doc_row[i];
        for (const double* row : context_rows) {
          for (int i = 0; i < dim; ++i) h[i] += row[i];
        }
        for (int i = 0; i < dim; ++i) h[i] /= count;

        trainer.step(h, doc[t], lr, grad_h.data());
        const double share = lr / count;
        for (int i = 0; i < dim; ++i) doc_row[i] += share * grad_h[i];
        for (double* row : context_rows) {
          for (int i = 0; i < dim; ++i) row[i] += share * grad_h[i];
        }
      }
    }
    model.base.epoch_losses.push_back(
        trainer.pair_count == 0 ? 0.0 : trainer.loss_accum / static_cast<double>(trainer.pair_count));
  }
  return model;
}

std::vector<double> infer_doc_vector(const DocEmbeddingModel& model,
                                     std::span<const std::string> tokens, int steps,
                                     std::uint64_t seed) {
  if (tokens.empty()) throw DataError("cannot infer a vector for an empty token sequence");
  if (steps < 0) throw ConfigError("steps must be >= 0");
  const int dim = model.base.dim;

  std::vector<std::uint32_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (auto id = model.base.vocab.id_of(t)) ids.push_back(*id);
  }

  Rng rng(seed);
  std::vector<double> doc_row(dim);
  init_uniform(doc_row, dim, rng);
  if (ids.empty()) return doc_row;  // nothing in vocabulary to fit against

  const int window = model.base.params.window;
  const int negatives = model.base.params.negatives;
  const double initial_lr = model.base.params.initial_lr;

  // word and output vectors stay frozen; only the fresh doc vector moves
  Trainer trainer{dim,
                  negatives,
                  const_cast<double*>(model.base.output_vectors.data()),
                  &model.base.negative_cdf,
                  model.base.negative_cdf.back(),
                  &rng,
                  /*update_outputs=*/false};
  std::vector<double> h(dim), grad_h(dim);
  const int len = static_cast<int>(ids.size());
  const std::uint64_t total_updates = static_cast<std::uint64_t>(steps) * len;
  std::uint64_t processed = 0;

  for (int step_i = 0; step_i < steps; ++step_i) {
    for (int t = 0; t < len; ++t) {
      const double lr = decayed_lr(initial_lr, processed, total_updates);
      ++processed;
      std::size_t count = 1;
      for (int i = 0; i < dim; ++i) h[i] = doc_row[i];
      const int lo = std::max(0, t - window);
      const int hi = std::min(len - 1, t + window);
      for (int c = lo; c <= hi; ++c) {
        if (c == t) continue;
        const auto row = model.base.input_vector(ids[c]);
        for (int i = 0; i < dim; ++i) h[i] += row[i];
        ++count;
      }
      for (int i = 0; i < dim; ++i) h[i] /= static_cast<double>(count);

      // output updates land on the frozen copy and are discarded
      trainer.step(h, ids[t], lr, grad_h.data());
      const double share = lr / static_cast<double>(count);
      for (int i = 0; i < dim; ++i) doc_row[i] += share * grad_h[i];
    }
  }
  return doc_row;
}

std::vector<double> average_embedding_features(const EmbeddingModel& model,
                                               std::span<const std::string> tokens) {
  std::vector<double> mean(model.dim, 0.0);
  std::size_t found = 0;
  for (const auto& t : tokens) {
    if (auto id = model.vocab.id_of(t)) {
      const auto row = model.input_vector(*id);
      for (int i = 0; i < model.dim; ++i) mean[i] += row[i];
      ++found;
    }
  }
  if (found > 0) {
    for (double& x : mean) x /= static_cast<double>(found);
  }
  return mean;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("cosine of vectors with different dimensions");
  double num = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return num / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace newslabel
