#include <doctest.h>

#include <cmath>
#include <memory>
#include <numeric>
#include <set>

#include "../support/synthetic.hpp"
#include "newslabel/errors.hpp"
#include "newslabel/lda.hpp"

using namespace newslabel;

namespace {

struct BowCorpus {
  std::shared_ptr<const Vocabulary> vocab;
  std::vector<SparseVector> bows;
};

BowCorpus bow_corpus(const std::vector<ProcessedDoc>& docs) {
  BowCorpus out;
  out.vocab = std::make_shared<const Vocabulary>(build_vocabulary(docs));
  for (const auto& doc : docs) out.bows.push_back(doc2bow(doc, *out.vocab));
  return out;
}

// planted 3-topic corpus: disjoint 30-word vocabularies, 300 docs, 100 tokens
testsupport::SyntheticCorpus planted3(std::uint64_t seed) {
  return testsupport::make_labeled_corpus(3, 100, 100, 30, 0, 0.0, seed);
}

// uniform-phi model: zero counts make phi_kv = beta/(V beta) = 1/V
LdaModel uniform_model(std::shared_ptr<const Vocabulary> vocab, int K) {
  LdaModel model;
  model.num_topics = K;
  model.alpha = 1.0;
  model.beta = 0.01;
  model.seed = 3;
  model.vocab = std::move(vocab);
  model.topic_word_counts.assign(static_cast<std::size_t>(K) * model.vocab->size(), 0);
  model.topic_totals.assign(K, 0);
  return model;
}

}  // namespace

TEST_CASE("training keeps count invariants and is seed-deterministic") {
  const auto corpus = planted3(11);
  const auto data = bow_corpus(corpus.docs);
  LdaParams params;
  params.num_topics = 3;
  params.alpha = 0.5;
  params.beta = 0.01;
  params.passes = 2;
  params.iterations = 5;
  params.seed = 42;

  const LdaModel a = train_lda(data.bows, params, data.vocab);
  a.validate_counts();
  const LdaModel b = train_lda(data.bows, params, data.vocab);
  CHECK(a.assignments == b.assignments);
  CHECK(a.topic_word_counts == b.topic_word_counts);

  SUBCASE("theta and phi rows are simplexes") {
    for (std::size_t d = 0; d < data.bows.size(); ++d) {
      const auto theta = doc_topic_distribution(a, d);
      double sum = 0.0;
      for (double p : theta.probs) {
        CHECK(p >= 0.0);
        sum += p;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
    for (int k = 0; k < a.num_topics; ++k) {
      const auto keywords = top_keywords(a, k, static_cast<int>(a.vocab_size()));
      double sum = 0.0;
      for (const auto& [term, p] : keywords) {
        CHECK(p > 0.0);
        CHECK(p <= 1.0);
        sum += p;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("single shared token corpus keeps phi rows valid") {
  std::vector<ProcessedDoc> docs;
  for (int i = 0; i < 20; ++i) {
    docs.push_back(ProcessedDoc{"d" + std::to_string(i), {"কথা", "কথা"}, std::nullopt});
  }
  const auto data = bow_corpus(docs);
  LdaParams params;
  params.num_topics = 2;
  params.alpha = 0.5;
  params.passes = 5;
  params.iterations = 4;
  const LdaModel model = train_lda(data.bows, params, data.vocab);
  for (int k = 0; k < model.num_topics; ++k) {
    double sum = 0.0;
    for (const auto& [term, p] : top_keywords(model, k, static_cast<int>(model.vocab_size()))) {
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("empty documents are skipped; their theta is an error") {
  std::vector<ProcessedDoc> docs = {ProcessedDoc{"a", {"শব্দ", "শব্দ"}, std::nullopt},
                                    ProcessedDoc{"b", {"কথা"}, std::nullopt}};
  const auto data = bow_corpus(docs);
  std::vector<SparseVector> bows = data.bows;
  bows.push_back(SparseVector{});  // a doc with no in-vocabulary tokens
  LdaParams params;
  params.num_topics = 2;
  params.passes = 1;
  params.iterations = 2;
  const LdaModel model = train_lda(bows, params, data.vocab);
  CHECK(model.doc_token_total(2) == 0);
  CHECK_THROWS_AS(doc_topic_distribution(model, 2), DataError);
  CHECK_THROWS_AS(
      infer_topic_distribution(model, SparseVector{}, 1), DataError);
}

TEST_CASE("doc_topic_distribution matches hand evaluation of the counts formula") {
  const auto corpus = planted3(13);
  const auto data = bow_corpus(corpus.docs);
  LdaParams params;
  params.num_topics = 3;
  params.alpha = 0.7;
  params.passes = 1;
  params.iterations = 3;
  const LdaModel model = train_lda(data.bows, params, data.vocab);

  const std::size_t d = 5;
  const auto theta = doc_topic_distribution(model, d);
  const auto& row = model.doc_topic_counts[d];
  const double n_d = std::accumulate(row.begin(), row.end(), 0.0);
  for (int k = 0; k < 3; ++k) {
    const double expected = (row[k] + params.alpha) / (n_d + 3 * params.alpha);
    CHECK(theta.probs[k] == doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("huge alpha pushes theta toward uniform") {
    LdaParams flat = params;
    flat.alpha = 1e9;
    const LdaModel smooth = train_lda(data.bows, flat, data.vocab);
    const auto uniform = doc_topic_distribution(smooth, d);
    for (double p : uniform.probs) CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  }
}

TEST_CASE("top_keywords ordering and bounds") {
  const auto corpus = planted3(17);
  const auto data = bow_corpus(corpus.docs);
  LdaParams params;
  params.num_topics = 3;
  params.passes = 2;
  params.iterations = 5;
  const LdaModel model = train_lda(data.bows, params, data.vocab);

  SUBCASE("k = V returns the fully sorted vocabulary") {
    const auto all = top_keywords(model, 0, static_cast<int>(model.vocab_size()));
    CHECK(all.size() == model.vocab_size());
    for (std::size_t i = 1; i < all.size(); ++i) {
      const bool descending = all[i - 1].second > all[i].second;
      const bool tie_lexicographic =
          all[i - 1].second == all[i].second && all[i - 1].first < all[i].first;
      CHECK((descending || tie_lexicographic));
    }
  }
  SUBCASE("k > V is an error") {
    CHECK_THROWS_AS(top_keywords(model, 0, static_cast<int>(model.vocab_size()) + 1), ConfigError);
  }
  SUBCASE("ties break lexicographically") {
    auto vocab = std::make_shared<const Vocabulary>(
        build_vocabulary(std::vector<ProcessedDoc>{ProcessedDoc{"d", {"ক", "খ"}, std::nullopt}}));
    const LdaModel uniform = uniform_model(vocab, 2);
    const auto keywords = top_keywords(uniform, 0, 2);
    CHECK(keywords[0].first == "ক");
    CHECK(keywords[1].first == "খ");
    CHECK(keywords[0].second == keywords[1].second);
  }
}

TEST_CASE("perplexity of the uniform model is V") {
  const auto corpus = planted3(19);
  const auto data = bow_corpus(corpus.docs);
  const LdaModel uniform = uniform_model(data.vocab, 3);
  const std::vector<SparseVector> held(data.bows.begin(), data.bows.begin() + 20);
  const double pp = perplexity(uniform, held);
  CHECK(pp == doctest::Approx(static_cast<double>(data.vocab->size())).epsilon(1e-9));

  SUBCASE("all-oov documents are skipped, not fatal") {
    std::vector<SparseVector> with_empty = held;
    with_empty.push_back(SparseVector{});
    CHECK(perplexity(uniform, with_empty) == doctest::Approx(pp).epsilon(1e-12));
  }
  SUBCASE("an entirely skipped held-out set is an error") {
    const std::vector<SparseVector> empty_docs = {SparseVector{}, SparseVector{}};
    CHECK_THROWS_AS(perplexity(uniform, empty_docs), DataError);
    CHECK_THROWS_AS(perplexity(uniform, {}), DataError);
  }
}

TEST_CASE("trained model beats the uniform model on generator output") {
  const auto corpus = planted3(23);
  const auto data = bow_corpus(corpus.docs);
  const std::vector<SparseVector> held(data.bows.end() - 30, data.bows.end());
  const std::vector<SparseVector> train(data.bows.begin(), data.bows.end() - 30);

  LdaParams params;
  params.num_topics = 3;
  params.alpha = 0.5;
  params.passes = 10;
  params.iterations = 10;
  const LdaModel model = train_lda(train, params, data.vocab);
  const double trained_pp = perplexity(model, held);
  CHECK(trained_pp > 0.0);
  CHECK(trained_pp < static_cast<double>(data.vocab->size()));

  SUBCASE("more sweeps do not hurt held-out perplexity by more than 5%") {
    LdaParams quick = params;
    quick.passes = 1;
    quick.iterations = 1;
    const double quick_pp = perplexity(train_lda(train, quick, data.vocab), held);
    LdaParams longer = params;
    longer.passes = 10;
    longer.iterations = 1;
    const double longer_pp = perplexity(train_lda(train, longer, data.vocab), held);
    CHECK(longer_pp <= quick_pp * 1.05);
  }
}

TEST_CASE("planted topics are recovered (single cheap seed)") {
  const auto corpus = planted3(29);
  const auto data = bow_corpus(corpus.docs);
  LdaParams params;
  params.num_topics = 3;
  params.alpha = 0.5;
  params.beta = 0.01;
  params.passes = 10;
  params.iterations = 10;
  params.seed = 4;
  const LdaModel model = train_lda(data.bows, params, data.vocab);

  int pure_topics = 0;
  for (int k = 0; k < 3; ++k) {
    std::set<int> sources;
    for (const auto& [term, p] : top_keywords(model, k, 5)) {
      for (std::size_t c = 0; c < corpus.class_vocabs.size(); ++c) {
        for (const auto& w : corpus.class_vocabs[c]) {
          if (w == term) sources.insert(static_cast<int>(c));
        }
      }
    }
    if (sources.size() == 1) ++pure_topics;
  }
  CHECK(pure_topics >= 2);
}

TEST_CASE("dominant_topic") {
  CHECK(dominant_topic(TopicDistribution{{0.75, 0.23, 0.02}}) == 0);
  CHECK(dominant_topic(TopicDistribution{{0.25, 0.25, 0.25, 0.25}}) == 0);  // tie rule
  CHECK(dominant_topic(TopicDistribution{{0.1, 0.2, 0.7}}) == 2);

  SUBCASE("argmax invariant under positive scaling") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      TopicDistribution dist;
      for (int k = 0; k < 5; ++k) dist.probs.push_back(rng.uniform());
      TopicDistribution scaled = dist;
      const double c = 0.1 + rng.uniform() * 10.0;
      for (double& p : scaled.probs) p *= c;
      CHECK(dominant_topic(dist) == dominant_topic(scaled));
    }
  }
}

TEST_CASE("parameter validation") {
  const auto corpus = planted3(31);
  const auto data = bow_corpus(corpus.docs);
  LdaParams params;
  params.num_topics = 1;
  CHECK_THROWS_AS(train_lda(data.bows, params, data.vocab), ConfigError);
  params.num_topics = 2;
  params.alpha = 0.0;
  CHECK_THROWS_AS(train_lda(data.bows, params, data.vocab), ConfigError);
  params.alpha = 0.5;
  CHECK_THROWS_AS(train_lda({}, params, data.vocab), DataError);
}
