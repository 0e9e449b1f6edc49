#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "citesent/error.hpp"
#include "citesent/eval.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace citesent;
using Strings = std::vector<std::string>;

TEST_SUITE("eval") {

TEST_CASE("load_dataset") {
  const auto ds = parse_dataset("o\tWe use the tagger.\nn\tIt fails badly.\np\tGreat results here.\n",
                                {"o", "n", "p"});
  REQUIRE(ds.examples.size() == 3);
  CHECK(ds.examples[1].label == "n");
  CHECK(ds.examples[1].tokens == Strings{"it", "fails", "badly"});
  CHECK(ds.name == "custom");

  CHECK_THROWS_WITH_AS(parse_dataset("o\tfine\nq\tbad label\n", {"o", "n", "p"}, "", "d.tsv"),
                       doctest::Contains("d.tsv:2: unknown label 'q'"), ParseError);
  CHECK_THROWS_WITH_AS(parse_dataset("o fine\n", {"o"}, "", "d.tsv"),
                       doctest::Contains("d.tsv:1:"), ParseError);
  CHECK_THROWS_AS(parse_dataset("# only a comment\n", {"o"}), Error);
}

TEST_CASE("dataset label sets from header, name or data") {
  const auto hdr = parse_dataset("#labels: p=positive,n=negative\npositive\tgood\nn\tbad\n");
  CHECK(hdr.label_set == Strings{"p", "n"});
  CHECK(hdr.examples[0].label == "p");

  CHECK(parse_dataset("p\ta\nn\tb\n", {}, "dataset-basic").label_set == Strings{"o", "n", "p"});
  CHECK(parse_dataset("x\ta\n", {}, "dataset-implicit").label_set == Strings{"x", "o", "n", "p"});
  CHECK(parse_dataset("z\ta\ny\tb\nz\tc\n").label_set == Strings{"z", "y"});

  const auto mini = load_dataset(test_support::data_dir() / "mini_citations.tsv");
  CHECK(mini.label_set == Strings{"o", "n", "p"});
  CHECK(mini.examples.size() == 150);
}

TEST_CASE("stratified_kfold invariants") {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10 + rng() % 90;
    const std::size_t k = 2 + rng() % 9;
    Strings labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::string(1, static_cast<char>('a' + rng() % 4)));
    const auto fa = stratified_kfold(labels, k, trial);
    REQUIRE(fa.fold.size() == n);
    std::vector<std::size_t> size(k, 0);
    std::map<std::string, std::vector<std::size_t>> per_label;
    for (std::size_t i = 0; i < n; ++i) {
      REQUIRE(fa.fold[i] < k);
      ++size[fa.fold[i]];
      per_label[labels[i]].resize(k, 0);
      ++per_label[labels[i]][fa.fold[i]];
    }
    CHECK(*std::max_element(size.begin(), size.end()) - *std::min_element(size.begin(), size.end()) <= 1);
    for (const auto& [label, counts] : per_label) {
      CHECK(*std::max_element(counts.begin(), counts.end()) -
                *std::min_element(counts.begin(), counts.end()) <= 1);
    }
    std::size_t total = 0;
    for (std::size_t f = 0; f < k; ++f) total += fa.members(f).size();
    CHECK(total == n);
    CHECK(stratified_kfold(labels, k, trial).fold == fa.fold);
  }
}

TEST_CASE("stratified_kfold examples") {
  const Strings ten(10, "a");
  const auto single = stratified_kfold(ten, 10, 1);
  for (std::size_t f = 0; f < 10; ++f) CHECK(single.members(f).size() == 1);

  Strings skewed(8, "a");
  skewed.push_back("b");
  skewed.push_back("b");
  const auto two = stratified_kfold(skewed, 2, 5);
  for (std::size_t f = 0; f < 2; ++f) {
    std::size_t a = 0, b = 0;
    for (std::size_t i : two.members(f)) (skewed[i] == "a" ? a : b)++;
    CHECK(a == 4);
    CHECK(b == 1);
  }

  CHECK_THROWS_AS(stratified_kfold(Strings(5, "a"), 10, 1), Error);
  CHECK_THROWS_AS(stratified_kfold(Strings(5, "a"), 1, 1), Error);

  const auto plain = stratified_kfold(skewed, 5, 3, false);
  CHECK_FALSE(plain.stratified);
  for (std::size_t f = 0; f < 5; ++f) CHECK(plain.members(f).size() == 2);
}

TEST_CASE("f1_scores examples") {
  const Strings labels{"a", "b"};
  const Strings t{"a", "a", "b"}, p{"a", "b", "b"};
  const auto r = f1_scores(t, p, labels);
  CHECK(r.per_class_f1.at("a") == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.per_class_f1.at("b") == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.micro_f == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.macro_f == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.weighted_f == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(r.support.at("a") == 2);

  const auto perfect = f1_scores(t, t, labels);
  CHECK(perfect.micro_f == 1.0);
  CHECK(perfect.macro_f == 1.0);
  CHECK(perfect.weighted_f == 1.0);

  const Strings three{"a", "b", "c"};
  const auto absent = f1_scores(t, t, three);
  CHECK(absent.per_class_f1.at("c") == 0.0);
  CHECK(absent.macro_f == doctest::Approx(2.0 / 3.0));

  CHECK_THROWS_AS(f1_scores(t, Strings{"a"}, labels), Error);
  CHECK_THROWS_AS(f1_scores(Strings{"z"}, Strings{"a"}, labels), Error);
}

TEST_CASE("f1_scores agrees with the counting oracle") {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + rng() % 5;
    Strings labels;
    for (std::size_t c = 0; c < k; ++c) labels.push_back("c" + std::to_string(c));
    const std::size_t n = 1 + rng() % 50;
    Strings t, p;
    for (std::size_t i = 0; i < n; ++i) {
      t.push_back(labels[rng() % k]);
      p.push_back(labels[rng() % k]);
    }
    const auto r = f1_scores(t, p, labels);
    const auto o = oracle::brute_force_f1(t, p, labels);
    for (const auto& l : labels) CHECK(std::abs(r.per_class_f1.at(l) - o.f1.at(l)) < 1e-12);
    CHECK(std::abs(r.micro_f - o.micro) < 1e-12);
    CHECK(std::abs(r.macro_f - o.macro) < 1e-12);
    CHECK(std::abs(r.weighted_f - o.weighted) < 1e-12);

    // single-label multiclass: micro-F equals accuracy
    double correct = 0;
    for (std::size_t i = 0; i < n; ++i) correct += t[i] == p[i];
    CHECK(std::abs(r.micro_f - correct / static_cast<double>(n)) < 1e-12);

    double lo = 1, hi = 0;
    for (const auto& l : labels) lo = std::min(lo, r.per_class_f1.at(l)), hi = std::max(hi, r.per_class_f1.at(l));
    CHECK(r.macro_f >= lo - 1e-15);
    CHECK(r.macro_f <= hi + 1e-15);
  }
}

TEST_CASE("x_vs_rest_score") {
  const Strings t{"x", "o", "n", "p", "x"};
  CHECK(x_vs_rest_score(t, t) == 1.0);
  // 98 x and 2 o, everything predicted x: tp=98 fp=2 fn=0 -> F1 = 196/198
  Strings truth(98, "x"), pred(100, "x");
  truth.push_back("o");
  truth.push_back("o");
  CHECK(x_vs_rest_score(truth, pred) == doctest::Approx(98.0 / 99.0).epsilon(1e-14));
  // confusion among the rest classes does not matter
  CHECK(x_vs_rest_score(Strings{"x", "o", "n"}, Strings{"x", "n", "p"}) == 1.0);
}

TEST_CASE("run_experiment on a separable synthetic dataset") {
  const EmbeddingMatrix m(Vocabulary::from_ordered({"good", "great", "bad", "awful", "the"}), 2,
                          {1, 0.1f, 0.9f, 0, -1, 0, -0.8f, 0.1f, 0, 1});
  LabeledDataset ds;
  ds.name = "synthetic";
  ds.label_set = {"p", "n"};
  std::mt19937 rng(4);
  for (int i = 0; i < 60; ++i) {
    const bool pos = i % 2 == 0;
    DatasetExample e{{"the"}, pos ? "p" : "n"};
    for (int j = 0, n = 1 + static_cast<int>(rng() % 3); j < n; ++j) {
      e.tokens.push_back(pos ? (rng() % 2 ? "good" : "great") : (rng() % 2 ? "bad" : "awful"));
    }
    ds.examples.push_back(e);
  }
  ds.examples.push_back({{"unknown", "words"}, "n"});

  ExperimentOptions opt;
  opt.k = 5;
  const auto r = run_experiment(ds, Sent2VecFeatures{&m}, opt);
  CHECK(r.predictions.size() == ds.examples.size());
  CHECK(r.report.degenerate_vector_count == 1);
  CHECK(r.report.macro_f >= 0.95);
  CHECK_FALSE(r.x_vs_rest.has_value());
  CHECK(r.feature_dim == 2);

  opt.workers = 3;
  const auto parallel = run_experiment(ds, Sent2VecFeatures{&m}, opt);
  CHECK(parallel.predictions == r.predictions);

  const auto bow = run_experiment(ds, BagOfWordsFeatures{}, ExperimentOptions{5, 1, true, {}, 1});
  CHECK(bow.report.macro_f >= 0.95);
  CHECK(bow.feature_dim == 7);

  const std::string text = format_report(r, "synthetic");
  CHECK(text.find("Micro-F") != std::string::npos);
  CHECK(text.find("macro_f=") != std::string::npos);
  CHECK(text.find("weighted_f=") != std::string::npos);
}

TEST_CASE("run_experiment reports X vs rest for implicit-style label sets") {
  const EmbeddingMatrix m(Vocabulary::from_ordered({"cite", "other", "good"}), 2, {1, 0, -1, 0, 0, 1});
  LabeledDataset ds;
  ds.label_set = {"x", "o", "n", "p"};
  for (int i = 0; i < 40; ++i) ds.examples.push_back({{"other"}, "x"});
  for (int i = 0; i < 10; ++i) ds.examples.push_back({{"cite"}, "o"});
  for (int i = 0; i < 5; ++i) ds.examples.push_back({{"cite", "good"}, "p"});
  ExperimentOptions opt;
  opt.k = 5;
  const auto r = run_experiment(ds, Sent2VecFeatures{&m}, opt);
  REQUIRE(r.x_vs_rest.has_value());
  CHECK(*r.x_vs_rest == 1.0);
  CHECK(r.report.support.at("n") == 0);
  CHECK(format_report(r).find("X vs O,N,P") != std::string::npos);
}

}  // TEST_SUITE
