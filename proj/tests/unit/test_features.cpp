#include <doctest.h>

#include <cmath>
#include <map>

#include "newslabel/errors.hpp"
#include "newslabel/features.hpp"
#include "newslabel/rng.hpp"

using namespace newslabel;

namespace {

ProcessedDoc doc_of(std::string id, std::vector<std::string> tokens) {
  return ProcessedDoc{std::move(id), std::move(tokens), std::nullopt};
}

const std::vector<ProcessedDoc> kTwoDocFixture = {doc_of("d1", {"a", "a", "b"}),
                                                  doc_of("d2", {"b", "c"})};

}  // namespace

TEST_CASE("build_vocabulary basics") {
  SUBCASE("min_df 1, no cap: every distinct term") {
    const Vocabulary vocab = build_vocabulary(kTwoDocFixture);
    CHECK(vocab.size() == 3);
    CHECK(vocab.num_docs == 2);
    // dense lexicographic ids
    CHECK(*vocab.id_of("a") == 0);
    CHECK(*vocab.id_of("b") == 1);
    CHECK(*vocab.id_of("c") == 2);
    CHECK(vocab.doc_freq[*vocab.id_of("a")] == 1);
    CHECK(vocab.doc_freq[*vocab.id_of("b")] == 2);
    CHECK(vocab.total_freq[*vocab.id_of("a")] == 2);
  }
  SUBCASE("cap 2 keeps the top terms by total corpus frequency") {
    // frequency-count oracle: a:2, b:2, c:1
    std::map<std::string, int> counts;
    for (const auto& doc : kTwoDocFixture) {
      for (const auto& t : doc.tokens) ++counts[t];
    }
    CHECK(counts["a"] == 2);
    CHECK(counts["b"] == 2);
    CHECK(counts["c"] == 1);

    const Vocabulary vocab = build_vocabulary(kTwoDocFixture, 2u);
    CHECK(vocab.size() == 2);
    CHECK(vocab.id_of("a").has_value());
    CHECK(vocab.id_of("b").has_value());
    CHECK(!vocab.id_of("c").has_value());
  }
  SUBCASE("cap ties break lexicographically") {
    // x and y both appear once; cap 1 keeps x
    const std::vector<ProcessedDoc> docs = {doc_of("d", {"y", "x"})};
    const Vocabulary vocab = build_vocabulary(docs, 1u);
    CHECK(vocab.size() == 1);
    CHECK(vocab.id_of("x").has_value());
  }
  SUBCASE("maxfeature-style cap bounds V") {
    std::vector<ProcessedDoc> docs;
    for (int i = 0; i < 400; ++i) {
      docs.push_back(doc_of("d" + std::to_string(i), {"t" + std::to_string(i)}));
    }
    const Vocabulary vocab = build_vocabulary(docs, 300u);
    CHECK(vocab.size() <= 300);
  }
  SUBCASE("min_df filters; everything filtered is an error") {
    const Vocabulary vocab = build_vocabulary(kTwoDocFixture, std::nullopt, 2);
    CHECK(vocab.size() == 1);  // only b appears in two documents
    CHECK(vocab.id_of("b").has_value());
    CHECK_THROWS_AS(build_vocabulary(kTwoDocFixture, std::nullopt, 3), DataError);
  }
  SUBCASE("building twice yields identical vocabularies") {
    const Vocabulary v1 = build_vocabulary(kTwoDocFixture, 2u);
    const Vocabulary v2 = build_vocabulary(kTwoDocFixture, 2u);
    CHECK(v1.id_to_term == v2.id_to_term);
    CHECK(v1.doc_freq == v2.doc_freq);
    CHECK(v1.total_freq == v2.total_freq);
    CHECK(v1.num_docs == v2.num_docs);
  }
  SUBCASE("empty document set") {
    CHECK_THROWS_AS(build_vocabulary({}), DataError);
  }
}

TEST_CASE("bow_vector") {
  const Vocabulary vocab = build_vocabulary(kTwoDocFixture);
  SUBCASE("counts with out-of-vocabulary terms ignored") {
    const auto sv = bow_vector(doc_of("q", {"a", "a", "b", "zzz"}), vocab);
    CHECK(sv.indices == std::vector<std::uint32_t>{0, 1});
    CHECK(sv.values == std::vector<double>{2.0, 1.0});
  }
  SUBCASE("no in-vocab terms gives the empty vector") {
    const auto sv = bow_vector(doc_of("q", {"zzz"}), vocab);
    CHECK(sv.nnz() == 0);
  }
  SUBCASE("duplicate-free doc has all-ones values") {
    const auto sv = bow_vector(doc_of("q", {"c", "a", "b"}), vocab);
    for (double v : sv.values) CHECK(v == 1.0);
  }
  SUBCASE("doc2bow is the integer bow") {
    const auto a = bow_vector(kTwoDocFixture[0], vocab);
    const auto b = doc2bow(kTwoDocFixture[0], vocab);
    CHECK(a.indices == b.indices);
    CHECK(a.values == b.values);
    for (double v : b.values) CHECK(v == std::floor(v));
  }
}

TEST_CASE("tfidf matches direct evaluation of the tf * ln(N/df) formula") {
  const Vocabulary vocab = build_vocabulary(kTwoDocFixture);

  // direct evaluation oracle, coded independently
  const auto oracle = [&](const ProcessedDoc& doc, const std::string& term) {
    double count = 0;
    for (const auto& t : doc.tokens) {
      if (t == term) ++count;
    }
    const double tf = count / static_cast<double>(doc.tokens.size());
    double df = 0;
    for (const auto& d : kTwoDocFixture) {
      bool has = false;
      for (const auto& t : d.tokens) has = has || t == term;
      df += has ? 1 : 0;
    }
    return tf * std::log(2.0 / df);
  };

  const auto d1 = tfidf_vector(kTwoDocFixture[0], vocab);
  SUBCASE("tfidf(a in d1) = (2/3) ln 2") {
    REQUIRE(d1.nnz() == 1);  // b has df = N, weight 0, omitted
    CHECK(d1.indices[0] == *vocab.id_of("a"));
    CHECK(d1.values[0] == doctest::Approx(oracle(kTwoDocFixture[0], "a")).epsilon(1e-12));
    CHECK(d1.values[0] == doctest::Approx((2.0 / 3.0) * std::log(2.0)).epsilon(1e-12));
    CHECK(d1.values[0] == doctest::Approx(0.46209812037329684).epsilon(1e-9));
  }
  SUBCASE("tfidf(b in d2) = 0 and is omitted from the sparse output") {
    const auto d2 = tfidf_vector(kTwoDocFixture[1], vocab);
    REQUIRE(d2.nnz() == 1);
    CHECK(d2.indices[0] == *vocab.id_of("c"));
    CHECK(d2.values[0] == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
    CHECK(oracle(kTwoDocFixture[1], "b") == 0.0);
  }
  SUBCASE("word present in every document carries zero weight") {
    for (const auto& doc : kTwoDocFixture) {
      const auto sv = tfidf_vector(doc, vocab);
      for (std::size_t i = 0; i < sv.indices.size(); ++i) {
        CHECK(vocab.id_to_term[sv.indices[i]] != "b");
      }
    }
  }
  SUBCASE("empty document is an error") {
    CHECK_THROWS_AS(tfidf_vector(doc_of("e", {}), vocab), DataError);
  }
}

TEST_CASE("tfidf properties on random corpora") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<ProcessedDoc> docs;
    const std::size_t n_docs = 2 + rng.uniform_index(5);
    for (std::size_t d = 0; d < n_docs; ++d) {
      std::vector<std::string> tokens;
      const std::size_t len = 1 + rng.uniform_index(8);
      for (std::size_t t = 0; t < len; ++t) {
        tokens.push_back("w" + std::to_string(rng.uniform_index(6)));
      }
      docs.push_back(doc_of("d" + std::to_string(d), std::move(tokens)));
    }
    const Vocabulary vocab = build_vocabulary(docs);
    for (const auto& doc : docs) {
      // sum of tf over the doc's distinct terms is 1
      std::map<std::string, double> counts;
      for (const auto& t : doc.tokens) counts[t] += 1.0;
      double tf_sum = 0.0;
      for (const auto& [term, c] : counts) tf_sum += c / static_cast<double>(doc.tokens.size());
      CHECK(tf_sum == doctest::Approx(1.0).epsilon(1e-12));

      const auto bow = bow_vector(doc, vocab);
      const auto tfidf = tfidf_vector(doc, vocab);
      // tfidf >= 0 and value = 0 iff df = N (those ids drop out of the pattern)
      for (double v : tfidf.values) CHECK(v > 0.0);
      std::vector<std::uint32_t> expected_pattern;
      for (const auto id : bow.indices) {
        if (vocab.doc_freq[id] != vocab.num_docs) expected_pattern.push_back(id);
      }
      CHECK(tfidf.indices == expected_pattern);
    }
  }
}

TEST_CASE("optional l2 normalization") {
  const Vocabulary vocab = build_vocabulary(kTwoDocFixture);
  const auto sv = tfidf_vector(kTwoDocFixture[1], vocab, true);
  double norm = 0.0;
  for (double v : sv.values) norm += v * v;
  CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("to_dense") {
  SparseVector sv;
  sv.indices = {1, 3};
  sv.values = {2.0, 4.0};
  const auto dense = to_dense(sv, 5);
  CHECK(dense == std::vector<double>{0.0, 2.0, 0.0, 4.0, 0.0});
  CHECK_THROWS_AS(to_dense(sv, 3), DataError);
}
