#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "newslabel/errors.hpp"
#include "newslabel/preprocess.hpp"
#include "newslabel/rng.hpp"
#include "newslabel/utf8.hpp"

using namespace newslabel;

namespace {

// Independent character-by-character oracle for the cleaning contract:
// works on decoded code points and rebuilds the string via split/join.
bool oracle_removed(char32_t cp, const PreprocessConfig& config) {
  if ((cp >= U'A' && cp <= U'Z') || (cp >= U'a' && cp <= U'z') || (cp >= U'0' && cp <= U'9')) {
    return true;
  }
  static const std::u32string punct = U"!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";
  if (punct.find(cp) != std::u32string::npos) return true;
  if (cp >= 0x09E6 && cp <= 0x09EF) return true;
  if (cp == U'\n' || cp == U'\r') return true;
  return std::find(config.strip_code_points.begin(), config.strip_code_points.end(), cp) !=
         config.strip_code_points.end();
}

std::string clean_oracle(const std::string& raw, const PreprocessConfig& config) {
  std::vector<char32_t> kept;
  for (char32_t cp : utf8::decode_all(raw)) {
    if (!oracle_removed(cp, config)) kept.push_back(cp);
  }
  // split on single spaces, join non-empty segments with one space
  std::vector<std::vector<char32_t>> segments(1);
  for (char32_t cp : kept) {
    if (cp == U' ') {
      segments.emplace_back();
    } else {
      segments.back().push_back(cp);
    }
  }
  std::string out;
  for (const auto& seg : segments) {
    if (seg.empty()) continue;
    if (!out.empty()) out += ' ';
    out += utf8::encode(seg);
  }
  return out;
}

std::filesystem::path write_lines(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("clean_text removes latin letters and ascii digits") {
  PreprocessConfig config;
  CHECK(clean_text("abcXYZ0123456789", config) == "");
}

TEST_CASE("clean_text removes ascii punctuation") {
  PreprocessConfig config;
  CHECK(clean_text("!#$%&()*+", config) == "");
  CHECK(clean_text("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~", config) == "");
}

TEST_CASE("clean_text on a mixed fixture matches the character-filter oracle") {
  PreprocessConfig config;
  const std::string fixture =
      "আজ সংবাদ ১২৩ abc! মাঠে,  খেলা\nহবে। XYZ ৪৫‌নতুন খবর (সূত্র: portal99) শেষ।";
  const std::string cleaned = clean_text(fixture, config);
  CHECK(cleaned == clean_oracle(fixture, config));
  CHECK(cleaned.find("abc") == std::string::npos);
  CHECK(cleaned.find('(') == std::string::npos);
  CHECK(cleaned.find('\n') == std::string::npos);
}

TEST_CASE("clean_text is idempotent on random unicode strings") {
  PreprocessConfig config;
  Rng rng(99);
  const std::u32string pool = U"অআইকখগঘচছজঝstructures09!:,.ាি ুে\n\r()[]৫৬৭<>~`|­ ";
  for (int trial = 0; trial < 200; ++trial) {
    std::string s;
    const std::size_t len = rng.uniform_index(60);
    for (std::size_t i = 0; i < len; ++i) {
      utf8::append(s, pool[rng.uniform_index(pool.size())]);
    }
    const std::string once = clean_text(s, config);
    CHECK(clean_text(once, config) == once);
    CHECK(once == clean_oracle(s, config));
  }
}

TEST_CASE("tokenize") {
  CHECK(tokenize("").empty());
  CHECK(tokenize("শব্দ") == std::vector<std::string>{"শব্দ"});

  const std::string sentence = "এক দুই তিন চার পাঁচ ছয় সাত";
  // whitespace-split oracle
  std::size_t oracle_count = 0;
  {
    std::istringstream in(sentence);
    std::string w;
    while (in >> w) ++oracle_count;
  }
  const auto tokens = tokenize(sentence);
  CHECK(tokens.size() == oracle_count);
  CHECK(tokens.size() == 7);
  CHECK(tokens.front() == "এক");
  CHECK(tokens.back() == "সাত");
}

TEST_CASE("stem strips the longest configured suffix once") {
  PreprocessConfig config;
  config.stemmer_suffixes = load_suffixes(
      write_lines("suffixes_test.txt", "ের\nরা\nগুলো\nে\n"));
  REQUIRE(config.stemmer_suffixes.front() == "গুলো");  // longest-first ordering

  SUBCASE("no listed suffix fires") {
    CHECK(stem("কলম", config) == "কলম");
  }
  SUBCASE("token shorter than shortest suffix + 2 is unchanged") {
    CHECK(stem("কে", config) == "কে");   // stripping "ে" would leave 1 code point
    CHECK(stem("ছেলে", config) == "ছেল"); // 4 cps, stripping "ে" leaves 3
  }
  SUBCASE("fixture token minus suffix via direct comparison oracle") {
    const std::string token = "বইগুলো";
    std::string expected = token;
    for (const auto& suffix : config.stemmer_suffixes) {
      if (token.size() > suffix.size() &&
          token.compare(token.size() - suffix.size(), suffix.size(), suffix) == 0 &&
          utf8::length(token) - utf8::length(suffix) >= 2) {
        expected = token.substr(0, token.size() - suffix.size());
        break;
      }
    }
    CHECK(stem(token, config) == expected);
    CHECK(stem(token, config) == "বই");
  }
  SUBCASE("stripping happens at most once per call") {
    // nested suffixes: only the outermost strip fires
    const std::string once = stem("বাড়িগুলোের", config);
    CHECK(once == "বাড়িগুলো");  // "ের" stripped, "গুলো" left in place
  }
}

TEST_CASE("remove_stopwords") {
  const std::unordered_set<std::string> stoplist = {"এবং", "ও", "যে", "না"};
  SUBCASE("all tokens in stoplist") {
    CHECK(remove_stopwords({"এবং", "ও"}, stoplist).empty());
  }
  SUBCASE("empty stoplist keeps input") {
    const std::vector<std::string> tokens = {"এক", "দুই"};
    CHECK(remove_stopwords(tokens, {}) == tokens);
  }
  SUBCASE("10 tokens with 4 stopwords keep 6 in order") {
    const std::vector<std::string> tokens = {"খবর", "এবং", "মাঠ", "ও",  "খেলা",
                                             "যে",  "দল",  "না",  "জয়", "হার"};
    std::vector<std::string> expected;
    for (const auto& t : tokens) {
      if (!stoplist.count(t)) expected.push_back(t);  // set-membership oracle
    }
    const auto kept = remove_stopwords(tokens, stoplist);
    CHECK(kept == expected);
    CHECK(kept.size() == 6);
  }
  SUBCASE("filtering is idempotent") {
    const std::vector<std::string> tokens = {"খবর", "এবং", "মাঠ"};
    const auto once = remove_stopwords(tokens, stoplist);
    CHECK(remove_stopwords(once, stoplist) == once);
  }
}

TEST_CASE("ngrams enumeration") {
  CHECK(ngrams({"a"}, 3) == std::vector<std::string>{"a"});
  CHECK(ngrams({"a", "b"}, 2) == std::vector<std::string>{"a", "b", "a_b"});
  CHECK(ngrams({"a", "b", "c"}, 3) ==
        std::vector<std::string>{"a", "b", "c", "a_b", "b_c", "a_b_c"});
  CHECK(ngrams({"a", "b", "c"}, 1) == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("ngram count identity") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t len = rng.uniform_index(12);
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < len; ++i) tokens.push_back("t" + std::to_string(i));
    for (int n = 1; n <= 3; ++n) {
      std::size_t expected = 0;
      for (int k = 1; k <= n; ++k) {
        expected += len + 1 >= static_cast<std::size_t>(k) ? len - k + 1 : 0;
      }
      CHECK(ngrams(tokens, n).size() == expected);
    }
  }
}

TEST_CASE("pipeline composition and ngram settings") {
  PreprocessConfig config;
  config.stopwords = {"এবং"};
  Document doc{"d1", "খেলা এবং খবর আজ!", std::nullopt, std::nullopt, std::nullopt, std::nullopt};

  SUBCASE("manual-labelling setting: unigrams only") {
    config.ngram_order = 1;
    const auto processed = preprocess_pipeline(doc, config);
    CHECK(processed.tokens == std::vector<std::string>{"খেলা", "খবর", "আজ"});
    for (const auto& t : processed.tokens) CHECK(t.find('_') == std::string::npos);
  }
  SUBCASE("automatic-labelling setting: grams up to order 3") {
    config.ngram_order = 3;
    const auto processed = preprocess_pipeline(doc, config);
    CHECK(processed.tokens == std::vector<std::string>{"খেলা", "খবর", "আজ", "খেলা_খবর",
                                                       "খবর_আজ", "খেলা_খবর_আজ"});
  }
}

TEST_CASE("punctuation-only document is empty after preprocessing") {
  PreprocessConfig config;
  Document doc{"p", "!!! ??? ,,,", std::nullopt, std::nullopt, std::nullopt, std::nullopt};
  CHECK_THROWS_AS(preprocess_pipeline(doc, config), EmptyAfterPreprocess);

  Corpus corpus;
  corpus.documents = {doc,
                      Document{"q", "ভালো খবর", std::nullopt, std::nullopt, std::nullopt,
                               std::nullopt}};
  const auto result = preprocess_corpus(corpus, config);
  CHECK(result.docs.size() == 1);
  CHECK(result.dropped_ids == std::vector<std::string>{"p"});
}

TEST_CASE("no pipeline output token contains removal-class characters") {
  // the underscore gram joiner is exempt by construction (grams are built
  // after cleaning), so the removal-class invariant is over unigram output
  PreprocessConfig config;
  config.ngram_order = 1;
  Rng rng(17);
  const std::u32string pool = U"কখগঘঙচছজabzAZ09!.,;ाি ুে\n১২৩‌ ";
  for (int trial = 0; trial < 100; ++trial) {
    std::string text;
    for (int i = 0; i < 40; ++i) utf8::append(text, pool[rng.uniform_index(pool.size())]);
    Document doc{"r", text, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
    try {
      const auto processed = preprocess_pipeline(doc, config);
      for (const auto& token : processed.tokens) {
        CHECK(!token.empty());
        for (char32_t cp : utf8::decode_all(token)) {
          const bool forbidden = oracle_removed(cp, config) || cp == U' ';
          CHECK(!forbidden);
        }
      }
      // higher orders only add underscore-joined grams of those tokens
      PreprocessConfig bigram = config;
      bigram.ngram_order = 2;
      const auto grams = preprocess_pipeline(doc, bigram);
      for (const auto& token : grams.tokens) {
        for (char32_t cp : utf8::decode_all(token)) {
          const bool forbidden = cp != U'_' && (oracle_removed(cp, config) || cp == U' ');
          CHECK(!forbidden);
        }
      }
    } catch (const EmptyAfterPreprocess&) {
      // acceptable outcome for noise-only inputs
    }
  }
}

TEST_CASE("stopword file loader: comments, duplicates, blank lines") {
  const auto path = write_lines("stop_test.txt",
                                "# comment\nএবং\n\nও  \nএবং\nকিন্তু # trailing comment\n");
  const auto words = load_stopwords(path);
  CHECK(words == std::vector<std::string>{"এবং", "ও", "কিন্তু"});
}

TEST_CASE("suffix loader orders longest-first by code points") {
  const auto path = write_lines("suffix_order.txt", "ে\nগুলোতে\nদের\nরা\n");
  const auto suffixes = load_suffixes(path);
  REQUIRE(suffixes.size() == 4);
  CHECK(suffixes[0] == "গুলোতে");
  CHECK(suffixes[1] == "দের");
  CHECK(suffixes[2] == "রা");
  CHECK(suffixes[3] == "ে");
}

TEST_CASE("shipped stopword and suffix tables load") {
  const auto root = std::filesystem::path(NEWSLABEL_SOURCE_DIR);
  const auto stopwords = load_stopwords(root / "data" / "stopwords_bn.txt");
  CHECK(stopwords.size() > 100);
  const auto suffixes = load_suffixes(root / "data" / "suffixes_bn.txt");
  CHECK(suffixes.size() > 20);
  for (std::size_t i = 1; i < suffixes.size(); ++i) {
    CHECK(utf8::length(suffixes[i - 1]) >= utf8::length(suffixes[i]));
  }
}
