#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "citesent/corpus.hpp"
#include "citesent/error.hpp"
#include "test_support.hpp"

using namespace citesent;
using Strings = std::vector<std::string>;

TEST_SUITE("corpus") {

TEST_CASE("segment_sentences splits at sentence-final punctuation") {
  CHECK(segment_sentences("This works. It is fast.").sentences ==
        Strings{"This works.", "It is fast."});
  CHECK(segment_sentences("Really? Yes! 3 cases remain.").sentences ==
        Strings{"Really?", "Yes!", "3 cases remain."});
  CHECK(segment_sentences("").sentences.empty());
  CHECK(segment_sentences("   \n\t ").sentences.empty());
}

TEST_CASE("segment_sentences respects abbreviations and initials") {
  CHECK(segment_sentences("Cutting et al. , 1992 improved tagging.").sentences ==
        Strings{"Cutting et al. , 1992 improved tagging."});
  CHECK(segment_sentences("As shown by Cutting et al. The tagger is fast.").sentences.size() == 1);
  CHECK(segment_sentences("See Fig. 3 for details. Results follow.").sentences ==
        Strings{"See Fig. 3 for details.", "Results follow."});
  CHECK(segment_sentences("Many taggers (e.g. HMMs) exist. We use one.").sentences ==
        Strings{"Many taggers (e.g. HMMs) exist.", "We use one."});
  CHECK(segment_sentences("This was shown by J. Smith in 1990.").sentences.size() == 1);
}

TEST_CASE("segment_sentences needs whitespace and an uppercase or digit start") {
  CHECK(segment_sentences("Accuracy was 96.5 percent. next word lowercase.").sentences.size() == 1);
  CHECK(segment_sentences("It ends.\"Then\" more.").sentences.size() == 1);
  CHECK(segment_sentences("He said \"stop.\" Then he left.").sentences ==
        Strings{"He said \"stop.\"", "Then he left."});
  CHECK(segment_sentences("First part. (Second part) follows.").sentences.size() == 2);
}

TEST_CASE("segment_sentences replaces invalid UTF-8 and counts it") {
  const std::string bad = std::string("Bad \xff byte. Next one \xc3(.");
  const SegmentedText seg = segment_sentences(bad);
  CHECK(seg.invalid_sequences == 2);
  REQUIRE(seg.sentences.size() == 2);
  CHECK(seg.sentences[0] == "Bad \xEF\xBF\xBD byte.");
}

TEST_CASE("segment_sentences preserves token content and never emits empty sentences") {
  std::mt19937 rng(11);
  const Strings words = {"The", "model", "et", "al.", "e.g.", "works.", "Fig.", "3.", "Yes!",
                         "why?", "A.", "Data", "(see", "x)", "1992.", "\"Quoted.\""};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const int n = static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      text += words[rng() % words.size()];
      text += (rng() % 5 == 0) ? "\n" : " ";
    }
    const auto seg = segment_sentences(text);
    std::string joined;
    for (const auto& s : seg.sentences) {
      CHECK_FALSE(s.empty());
      joined += s + " ";
    }
    CHECK(tokenize(joined) == tokenize(text));
  }
}

TEST_CASE("tokenize lowercases and splits punctuation") {
  CHECK(tokenize("HMM-based POS tagging.") == Strings{"hmm", "based", "pos", "tagging"});
  CHECK(tokenize("(Cutting et al., 1992)") == Strings{"cutting", "et", "al", "1992"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("Brill's tagger isn't bad") == Strings{"brill", "s", "tagger", "isn", "t", "bad"});
  CHECK(tokenize("--- ... ;;") == Strings{});
  CHECK(tokenize("\xC3\x89T\xC3\x89 \xE2\x80\x94 ok") == Strings{"\xC3\xA9t\xC3\xA9", "ok"});
}

TEST_CASE("tokenize output has no uppercase ASCII and no empty tokens") {
  std::mt19937 rng(3);
  const std::string alphabet = "aZ9 -.,'()\"!?QxY\t";
  for (int trial = 0; trial < 300; ++trial) {
    std::string s;
    for (int i = 0, n = static_cast<int>(rng() % 40); i < n; ++i) s += alphabet[rng() % alphabet.size()];
    for (const auto& t : tokenize(s)) {
      CHECK_FALSE(t.empty());
      CHECK(std::none_of(t.begin(), t.end(), [](char c) { return c >= 'A' && c <= 'Z'; }));
    }
  }
}

TEST_CASE("filter_short keeps sentences with at least min_tokens tokens") {
  const std::vector<Sentence> in = {
      {"d", 0, {"publication", "year"}},
      {"d", 1, {"a", "b", "c"}},
      {"d", 2, {"x"}},
      {"d", 3, {"a", "b", "c", "d"}},
  };
  const auto out = filter_short(in);
  REQUIRE(out.size() == 2);
  CHECK(out[0].index == 1);
  CHECK(out[1].index == 3);
  CHECK(filter_short(std::vector<Sentence>{{"d", 0, {"publication", "year"}}}).empty());
  CHECK(filter_short(std::vector<Sentence>{}).empty());
  CHECK(filter_short(out) == out);  // idempotent
}

TEST_CASE("build_vocabulary applies min_count and orders by frequency then token") {
  const std::vector<Sentence> s1 = {{"d", 0, {"a", "b", "a"}}};
  const Vocabulary v1 = build_vocabulary(s1, 2);
  CHECK(v1.size() == 1);
  CHECK(v1.find("a") == 0u);
  CHECK_FALSE(v1.contains("b"));

  const std::vector<Sentence> s2 = {{"d", 0, {"b", "a", "b", "a", "b", "a"}}};
  const Vocabulary v2 = build_vocabulary(s2, 1);
  CHECK(v2.tokens() == Strings{"a", "b"});
  CHECK(v2.count(0) == 3);

  CHECK_THROWS_WITH_AS(build_vocabulary(std::vector<Sentence>{}, 1), "empty vocabulary", Error);
  CHECK_THROWS_AS(build_vocabulary(s1, 0), Error);
}

TEST_CASE("vocabulary indices and tokens are mutually inverse") {
  std::mt19937 rng(5);
  std::vector<Sentence> sentences;
  for (int i = 0; i < 50; ++i) {
    Sentence s{"d", static_cast<std::size_t>(i), {}};
    for (int j = 0; j < 8; ++j) s.tokens.push_back("w" + std::to_string(rng() % 40));
    sentences.push_back(s);
  }
  const Vocabulary v = build_vocabulary(sentences, 3);
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(v.find(v.token(i)) == i);
    CHECK(v.count(i) >= 3);
    if (i > 0) CHECK(v.count(i - 1) >= v.count(i));
  }
}

TEST_CASE("preprocess pipeline over files") {
  const auto dir = test_support::temp_dir("corpus");
  {
    std::ofstream(dir / "b.txt") << "Publication Year. The tagger works well here. Fig. 2 shows it.";
    std::ofstream(dir / "a.txt") << "We trained the model. It converged quickly after all.";
  }
  const auto docs = load_corpus(dir);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].doc_id == "a.txt");

  PreprocessStats stats;
  const auto sentences = preprocess_documents(docs, 3, 1, &stats);
  CHECK(stats.segmented == 5);
  CHECK(stats.kept == 4);
  REQUIRE(sentences.size() == 4);
  CHECK(sentences[2].doc_id == "b.txt");
  CHECK(sentences[2].index == 1);
  CHECK(preprocess_documents(docs, 3, 4) == sentences);

  write_sentences(dir / "out.txt", sentences);
  const auto back = read_sentences(dir / "out.txt");
  REQUIRE(back.size() == sentences.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i].tokens == sentences[i].tokens);

  std::filesystem::create_directory(dir / "empty");
  CHECK_THROWS_AS(load_corpus(dir / "empty"), Error);
  CHECK_THROWS_AS(load_corpus(dir / "missing"), Error);
}

TEST_CASE("single-file corpus holds one document per line") {
  const auto dir = test_support::temp_dir("corpus_file");
  std::ofstream(dir / "docs.txt") << "First doc here. Second sentence.\n\nAnother document line.\n";
  const auto docs = load_corpus(dir / "docs.txt");
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].doc_id == "1");
  CHECK(docs[1].doc_id == "3");
}

}  // TEST_SUITE
