#include <doctest.h>

#include <cmath>

#include "../support/synthetic.hpp"
#include "newslabel/embeddings.hpp"
#include "newslabel/errors.hpp"
#include "newslabel/io_util.hpp"

using namespace newslabel;

namespace {

SgnsParams small_params(int dim, int epochs, std::uint64_t seed) {
  SgnsParams p;
  p.dim = dim;
  p.window = 3;
  p.negatives = 3;
  p.epochs = epochs;
  p.initial_lr = 0.05;
  p.seed = seed;
  return p;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("char_ngrams") {
  SUBCASE("enumeration oracle for minn=3 maxn=4") {
    const auto grams = char_ngrams("word", 3, 4);
    // brute-force enumeration over the wrapped string
    const std::string wrapped = "<word>";
    std::vector<std::string> expected;
    for (int len = 3; len <= 4; ++len) {
      for (std::size_t start = 0; start + len <= wrapped.size(); ++start) {
        expected.push_back(wrapped.substr(start, len));
      }
    }
    CHECK(grams == expected);
  }
  SUBCASE("minn = maxn = word length + 2 keeps only the whole wrapped word") {
    const auto grams = char_ngrams("word", 6, 6);
    CHECK(grams == std::vector<std::string>{"<word>"});
  }
  SUBCASE("lengths count code points, not bytes") {
    const auto grams = char_ngrams("কখ", 4, 4);  // wrapped length is 4 code points
    CHECK(grams == std::vector<std::string>{"<কখ>"});
  }
  SUBCASE("bounds") {
    CHECK_THROWS_AS(char_ngrams("word", 0, 3), ConfigError);
    CHECK_THROWS_AS(char_ngrams("word", 4, 3), ConfigError);
  }
}

TEST_CASE("sgns analytic gradients match central finite differences") {
  Rng rng(12);
  const std::size_t dim = 7;
  std::vector<double> input(dim), positive(dim);
  std::vector<std::vector<double>> negatives(3, std::vector<double>(dim));
  for (auto& x : input) x = rng.uniform(-1.0, 1.0);
  for (auto& x : positive) x = rng.uniform(-1.0, 1.0);
  for (auto& row : negatives) {
    for (auto& x : row) x = rng.uniform(-1.0, 1.0);
  }

  const auto grads = sgns_loss_and_grads(input, positive, negatives);
  const double h = 1e-5;
  const auto loss_at = [&](const std::vector<double>& in, const std::vector<double>& pos,
                           const std::vector<std::vector<double>>& negs) {
    return sgns_loss_and_grads(in, pos, negs).loss;
  };

  for (std::size_t i = 0; i < dim; ++i) {
    auto in_hi = input, in_lo = input;
    in_hi[i] += h;
    in_lo[i] -= h;
    const double fd = (loss_at(in_hi, positive, negatives) - loss_at(in_lo, positive, negatives)) /
                      (2.0 * h);
    CHECK(grads.d_input[i] == doctest::Approx(fd).epsilon(1e-4));

    auto pos_hi = positive, pos_lo = positive;
    pos_hi[i] += h;
    pos_lo[i] -= h;
    const double fd_pos =
        (loss_at(input, pos_hi, negatives) - loss_at(input, pos_lo, negatives)) / (2.0 * h);
    CHECK(grads.d_positive[i] == doctest::Approx(fd_pos).epsilon(1e-4));

    for (std::size_t k = 0; k < negatives.size(); ++k) {
      auto negs_hi = negatives, negs_lo = negatives;
      negs_hi[k][i] += h;
      negs_lo[k][i] -= h;
      const double fd_neg =
          (loss_at(input, positive, negs_hi) - loss_at(input, positive, negs_lo)) / (2.0 * h);
      CHECK(grads.d_negatives[k][i] == doctest::Approx(fd_neg).epsilon(1e-4));
    }
  }
}

TEST_CASE("zero epochs return the seeded initialization") {
  const auto corpus = testsupport::make_labeled_corpus(2, 10, 20, 10, 0, 0.0, 41);
  const auto a = train_sgns(corpus.docs, small_params(16, 0, 9));
  const auto b = train_sgns(corpus.docs, small_params(16, 0, 9));
  CHECK(a.input_vectors == b.input_vectors);
  CHECK(a.epoch_losses.empty());
  for (double x : a.output_vectors) CHECK(x == 0.0);
  const double half = 0.5 / 16.0;
  for (double x : a.input_vectors) {
    CHECK(x >= -half);
    CHECK(x < half);
  }
}

TEST_CASE("skip-gram separates two disjoint topic vocabularies") {
  const auto corpus = testsupport::make_labeled_corpus(2, 30, 40, 12, 0, 0.0, 7);
  const auto model = train_sgns(corpus.docs, small_params(24, 8, 3));
  CHECK(all_finite(model.input_vectors));
  CHECK(all_finite(model.output_vectors));

  // mean intra-topic vs inter-topic cosine, computed directly from the matrix
  double intra = 0.0, inter = 0.0;
  std::size_t intra_n = 0, inter_n = 0;
  for (int c = 0; c < 2; ++c) {
    for (const auto& w1 : corpus.class_vocabs[c]) {
      for (const auto& w2 : corpus.class_vocabs[c]) {
        if (w1 >= w2) continue;
        intra += cosine_similarity(model.input_vector(*model.vocab.id_of(w1)),
                                   model.input_vector(*model.vocab.id_of(w2)));
        ++intra_n;
      }
    }
  }
  for (const auto& w1 : corpus.class_vocabs[0]) {
    for (const auto& w2 : corpus.class_vocabs[1]) {
      inter += cosine_similarity(model.input_vector(*model.vocab.id_of(w1)),
                                 model.input_vector(*model.vocab.id_of(w2)));
      ++inter_n;
    }
  }
  CHECK(intra / static_cast<double>(intra_n) > inter / static_cast<double>(inter_n));

  SUBCASE("mean loss at epoch 10 is below epoch 1") {
    const auto ten = train_sgns(corpus.docs, small_params(24, 10, 3));
    REQUIRE(ten.epoch_losses.size() == 10);
    CHECK(ten.epoch_losses[9] < ten.epoch_losses[0]);
  }
  SUBCASE("training is deterministic for a fixed seed") {
    const auto again = train_sgns(corpus.docs, small_params(24, 8, 3));
    CHECK(model.input_vectors == again.input_vectors);
    CHECK(model.output_vectors == again.output_vectors);
  }
}

TEST_CASE("vocabulary smaller than negatives + 1 is an error") {
  const std::vector<ProcessedDoc> docs = {ProcessedDoc{"d", {"ক", "ক", "ক"}, std::nullopt}};
  SgnsParams p = small_params(4, 1, 1);
  p.negatives = 3;  // vocab has one term
  CHECK_THROWS_WITH_AS(train_sgns(docs, p), doctest::Contains("negatives"), DataError);
}

TEST_CASE("subword model") {
  const auto corpus = testsupport::make_labeled_corpus(2, 12, 25, 10, 0, 0.0, 21);
  SubwordParams sp;
  sp.sgns = small_params(12, 3, 5);
  sp.minn = 2;
  sp.maxn = 3;
  sp.bucket_count = 512;

  SUBCASE("minn beyond every word degenerates to plain sgns with tied seeds") {
    SubwordParams degenerate = sp;
    std::size_t longest = 0;
    for (const auto& doc : corpus.docs) {
      for (const auto& t : doc.tokens) longest = std::max(longest, utf8::length(t));
    }
    degenerate.minn = static_cast<int>(longest) + 3;
    degenerate.maxn = degenerate.minn;
    const auto sub = train_subword(corpus.docs, degenerate);
    const auto plain = train_sgns(corpus.docs, sp.sgns);
    CHECK(sub.base.input_vectors == plain.input_vectors);
    CHECK(sub.base.output_vectors == plain.output_vectors);
  }
  SUBCASE("word vector is the mean of the word and its gram buckets") {
    const auto model = train_subword(corpus.docs, sp);
    const std::string word = model.base.vocab.id_to_term.front();
    const auto composed = model.word_vector(word);
    const auto grams = char_ngrams(word, sp.minn, sp.maxn);
    std::vector<double> expected(model.base.dim, 0.0);
    const auto row = model.base.input_vector(*model.base.vocab.id_of(word));
    for (int i = 0; i < model.base.dim; ++i) expected[i] += row[i];
    for (const auto& gram : grams) {
      const auto bucket = fnv1a32(gram) % sp.bucket_count;
      for (int i = 0; i < model.base.dim; ++i) {
        expected[i] += model.ngram_vectors[bucket * model.base.dim + i];
      }
    }
    for (int i = 0; i < model.base.dim; ++i) {
      expected[i] /= static_cast<double>(1 + grams.size());
      CHECK(composed[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
  }
  SUBCASE("oov word sharing every gram bucket differs only by the word-vector term") {
    // single-character grams of "<ab>" and "<ba>" hit the same buckets
    SubwordParams tiny = sp;
    tiny.minn = 1;
    tiny.maxn = 1;
    std::vector<ProcessedDoc> docs = corpus.docs;
    docs.push_back(ProcessedDoc{"extra", {"ab", "ab", "cd", "cd"}, std::nullopt});
    const auto model = train_subword(docs, tiny);
    REQUIRE(model.base.vocab.id_of("ab").has_value());
    REQUIRE(!model.base.vocab.id_of("ba").has_value());

    const auto in_vocab = model.word_vector("ab");
    const auto oov = model.word_vector("ba");
    const auto word_row = model.base.input_vector(*model.base.vocab.id_of("ab"));
    const double gram_count = 4.0;  // <, a, b, >
    for (int i = 0; i < model.base.dim; ++i) {
      const double gram_sum_from_oov = oov[i] * gram_count;
      const double gram_sum_from_word = in_vocab[i] * (gram_count + 1.0) - word_row[i];
      CHECK(gram_sum_from_oov == doctest::Approx(gram_sum_from_word).epsilon(1e-9));
    }
  }
}

TEST_CASE("pvdm doc vectors") {
  const auto corpus = testsupport::make_labeled_corpus(8, 25, 30, 15, 10, 0.2, 31);
  SgnsParams p = small_params(32, 20, 13);
  const auto model = train_pvdm(corpus.docs, p);
  CHECK(all_finite(model.doc_vectors));
  REQUIRE(model.doc_ids.size() == corpus.docs.size());

  SUBCASE("1-nn purity over doc vectors respects the planted classes") {
    std::size_t pure = 0;
    for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
      double best = -2.0;
      std::size_t best_j = 0;
      for (std::size_t j = 0; j < corpus.docs.size(); ++j) {
        if (j == d) continue;
        const double sim = cosine_similarity(model.doc_vector(d), model.doc_vector(j));
        if (sim > best) {
          best = sim;
          best_j = j;
        }
      }
      if (*corpus.docs[d].label == *corpus.docs[best_j].label) ++pure;
    }
    CHECK(static_cast<double>(pure) / static_cast<double>(corpus.docs.size()) >= 0.9);
  }
  SUBCASE("identical token sequences with tied draws give identical doc vectors") {
    const std::vector<ProcessedDoc> one = {corpus.docs[0]};
    std::vector<ProcessedDoc> renamed = one;
    renamed[0].id = "other";
    const auto m1 = train_pvdm(one, small_params(8, 3, 51));
    const auto m2 = train_pvdm(renamed, small_params(8, 3, 51));
    CHECK(m1.doc_vectors == m2.doc_vectors);
  }
  SUBCASE("zero epochs keep the doc-vector initialization") {
    const auto frozen = train_pvdm(corpus.docs, small_params(32, 0, 13));
    for (double x : frozen.base.output_vectors) CHECK(x == 0.0);
    const double half = 0.5 / 32.0;
    for (double x : frozen.doc_vectors) {
      CHECK(x >= -half);
      CHECK(x < half);
    }
  }

  SUBCASE("inference") {
    SUBCASE("steps = 0 returns the seeded initialization") {
      const auto vec = infer_doc_vector(model, corpus.docs[0].tokens, 0, 99);
      Rng rng(99);
      for (int i = 0; i < model.base.dim; ++i) {
        CHECK(vec[i] == rng.uniform(-0.5 / model.base.dim, 0.5 / model.base.dim));
      }
    }
    SUBCASE("re-inferring a training document lands near its stored vector") {
      // distinctive documents (one per planted vocabulary), so the stored
      // vector is the natural rank-1 neighbour
      const auto distinct = testsupport::make_labeled_corpus(40, 1, 40, 12, 0, 0.0, 71);
      const auto m = train_pvdm(distinct.docs, small_params(32, 30, 19));
      const std::size_t d = 3;
      const auto inferred = infer_doc_vector(m, distinct.docs[d].tokens, 40, 7);
      const double self = cosine_similarity(inferred, m.doc_vector(d));
      std::size_t beaten = 0;
      for (std::size_t j = 0; j < distinct.docs.size(); ++j) {
        if (j == d) continue;
        if (self > cosine_similarity(inferred, m.doc_vector(j))) ++beaten;
      }
      const double fraction =
          static_cast<double>(beaten) / static_cast<double>(distinct.docs.size() - 1);
      CHECK(fraction > 0.95);
    }
    SUBCASE("empty token sequence is an error") {
      CHECK_THROWS_AS(infer_doc_vector(model, std::vector<std::string>{}, 5, 1), DataError);
    }
    SUBCASE("inference never mutates the model") {
      const auto outputs_before = model.base.output_vectors;
      (void)infer_doc_vector(model, corpus.docs[1].tokens, 5, 3);
      CHECK(model.base.output_vectors == outputs_before);
    }
  }
}

TEST_CASE("average_embedding_features") {
  const auto corpus = testsupport::make_labeled_corpus(2, 6, 12, 8, 0, 0.0, 61);
  const auto model = train_sgns(corpus.docs, small_params(8, 2, 3));

  SUBCASE("all tokens out of vocabulary give the zero vector") {
    const auto mean = average_embedding_features(model, std::vector<std::string>{"xyz"});
    for (double x : mean) CHECK(x == 0.0);
  }
  SUBCASE("single in-vocab token returns that token's vector") {
    const std::string word = model.vocab.id_to_term.front();
    const auto mean = average_embedding_features(model, std::vector<std::string>{word});
    const auto row = model.input_vector(*model.vocab.id_of(word));
    for (int i = 0; i < model.dim; ++i) CHECK(mean[i] == row[i]);
  }
  SUBCASE("two tokens give the componentwise mean") {
    const std::string w1 = model.vocab.id_to_term[0];
    const std::string w2 = model.vocab.id_to_term[1];
    const auto mean = average_embedding_features(model, std::vector<std::string>{w1, w2});
    const auto r1 = model.input_vector(0);
    const auto r2 = model.input_vector(1);
    for (int i = 0; i < model.dim; ++i) {
      CHECK(mean[i] == doctest::Approx((r1[i] + r2[i]) / 2.0).epsilon(1e-15));
    }
  }
}
