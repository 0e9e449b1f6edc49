// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "citesent/classify.hpp"
#include "citesent/config.hpp"
#include "citesent/corpus.hpp"
#include "citesent/error.hpp"
#include "citesent/eval.hpp"
#include "citesent/sent2vec.hpp"
#include "citesent/word2vec.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace citesent;
using Strings = std::vector<std::string>;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  enum Kind { pass, fail, skip } kind;
  std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Outcome::pass : Outcome::fail, std::move(detail)}; }

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Outcome metric_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + rng() % 5, n = 1 + rng() % 50;
    Strings labels;
    for (std::size_t c = 0; c < k; ++c) labels.push_back("l" + std::to_string(c));
    Strings t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = labels[rng() % k];
      p[i] = labels[rng() % k];
    }
    const auto r = f1_scores(t, p, labels);
    const auto o = oracle::brute_force_f1(t, p, labels);
    for (const auto& l : labels) worst = std::max(worst, std::abs(r.per_class_f1.at(l) - o.f1.at(l)));
    worst = std::max({worst, std::abs(r.micro_f - o.micro), std::abs(r.macro_f - o.macro),
                      std::abs(r.weighted_f - o.weighted)});
  }
  const double s = seconds_since(t0);
  return verdict(worst <= 1e-12 && s < 5, fmt("max abs diff %.3g over 100 instances, %.2fs", worst, s));
}

Outcome gradient_check() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  std::normal_distribution<double> g(0.0, 0.7);
  double worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t dim = 1 + rng() % 16;
    const int label = trial % 2;
    std::vector<double> c(dim), x(dim);
    for (auto& v : c) v = g(rng);
    for (auto& v : x) v = g(rng);
    const auto grad = pair_gradient(c, x, label);
    for (std::size_t i = 0; i < dim; ++i) {
      const double fd_c = oracle::central_difference(
          [&](const std::vector<double>& cc) { return oracle::pair_loss(cc, x, label); }, c, i, 1e-5);
      const double fd_x = oracle::central_difference(
          [&](const std::vector<double>& xx) { return oracle::pair_loss(c, xx, label); }, x, i, 1e-5);
      // below ~1e-6 the difference quotient is round-off, so floor the scale there
      auto rel = [](double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); };
      worst = std::max({worst, rel(grad.grad_center[i], fd_c), rel(grad.grad_context[i], fd_x)});
    }
  }
  const double s = seconds_since(t0);
  return verdict(worst < 1e-4 && s < 5, fmt("max relative error %.3g at 1000 points, %.2fs", worst, s));
}

Outcome topic_separation() {
  const auto t0 = Clock::now();
  const auto corpus = test_support::two_topic_corpus(5000, 50, 10, 303);
  const auto m = train_embeddings(corpus, TrainingConfig{});
  const auto cos = test_support::topic_cosines(m);
  const double s = seconds_since(t0);
  return verdict(cos.intra - cos.cross >= 0.2 && s < 60,
                 fmt("intra %.3f, cross %.3f, %.1fs", cos.intra, cos.cross, s));
}

Outcome mean_conformance() {
  std::mt19937_64 rng(404);
  const std::size_t V = 300, D = 24;
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < V; ++i) tokens.push_back("t" + std::to_string(i));
  std::normal_distribution<float> g;
  std::vector<float> values(V * D);
  for (auto& v : values) v = g(rng);
  const EmbeddingMatrix m(Vocabulary::from_ordered(tokens), D, values);

  double worst = 0;
  bool permutation_ok = true, single_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    Strings sentence;
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0, n = 1 + rng() % 30; j < n; ++j) {
      if (rng() % 5 == 0) {
        sentence.push_back("oov" + std::to_string(j));
        continue;
      }
      const std::size_t id = rng() % V;
      sentence.push_back(tokens[id]);
      const auto r = m.row(id);
      rows.emplace_back(r.begin(), r.end());
    }
    const auto v = embed_sentence(sentence, m);
    const auto o = oracle::componentwise_mean(rows, D);
    for (std::size_t c = 0; c < D; ++c) worst = std::max(worst, std::abs(v.values[c] - o[c]));
    if (v.n_in_vocab != rows.size() || v.n_total != sentence.size()) permutation_ok = false;

    Strings shuffled = sentence;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto w = embed_sentence(shuffled, m);
    for (std::size_t c = 0; c < D; ++c) {
      if (std::abs(w.values[c] - v.values[c]) > 1e-12) permutation_ok = false;
    }
    const std::size_t id = rng() % V;
    const auto single = embed_sentence(Strings{tokens[id]}, m);
    for (std::size_t c = 0; c < D; ++c) {
      if (single.values[c] != static_cast<double>(m.row(id)[c])) single_ok = false;
    }
  }
  return verdict(worst <= 1e-12 && permutation_ok && single_ok,
                 fmt("max abs diff %.3g over 1000 sentences", worst) +
                     "; permutation invariance " + (permutation_ok ? "ok" : "broken") +
                     "; single token identity " + (single_ok ? "ok" : "broken"));
}

Outcome classifier_sanity() {
  LabeledDataset sep;
  sep.label_set = {"p", "n"};
  for (auto& e : test_support::separable_2d(200, 505)) {
    sep.examples.push_back({{}, e.label});
  }
  // The featurizers work on tokens, so feed the 2-D points through a tiny
  // embedding: each example gets a unique token whose vector is the point.
  std::vector<std::string> tokens;
  std::vector<float> values;
  const auto points = test_support::separable_2d(200, 505);
  for (std::size_t i = 0; i < points.size(); ++i) {
    tokens.push_back("pt" + std::to_string(i));
    values.push_back(static_cast<float>(points[i].features[0]));
    values.push_back(static_cast<float>(points[i].features[1]));
    sep.examples[i].tokens = {tokens.back()};
  }
  const EmbeddingMatrix m(Vocabulary::from_ordered(tokens), 2, values);
  ExperimentOptions opt;
  opt.k = 10;
  const auto r = run_experiment(sep, Sent2VecFeatures{&m}, opt);

  LabeledDataset one = sep;
  for (auto& e : one.examples) e.label = "p";
  bool degenerate_ok = true;
  double one_macro = 0;
  try {
    const auto d = run_experiment(one, Sent2VecFeatures{&m}, opt);
    one_macro = d.report.macro_f;
    degenerate_ok = std::all_of(d.predictions.begin(), d.predictions.end(),
                                [](const std::string& p) { return p == "p"; });
  } catch (const std::exception&) {
    degenerate_ok = false;
  }
  return verdict(r.report.macro_f >= 0.99 && degenerate_ok,
                 fmt("separable macro-F %.4f; one-class set macro-F %.3f", r.report.macro_f, one_macro) +
                     (degenerate_ok ? "" : " (one-class set failed)"));
}

struct PipelineRun {
  std::string embeddings;
  MetricsReport report;
};

PipelineRun run_pipeline() {
  PipelineConfig cfg;
  cfg.seed = 42;
  cfg.workers = 1;
  cfg.training.dim = 50;
  cfg.k = 5;
  const auto docs = load_corpus(test_support::data_dir() / "mini_corpus");
  const auto sentences = preprocess_documents(docs, cfg.min_tokens);
  const auto matrix = train_embeddings(sentences, cfg.training_config());
  std::ostringstream out;
  write_embeddings(matrix, out);
  const auto ds = load_dataset(test_support::data_dir() / "mini_citations.tsv");
  return {out.str(), run_experiment(ds, Sent2VecFeatures{&matrix}, cfg.experiment_options()).report};
}

Outcome determinism() {
  const auto a = run_pipeline();
  const auto b = run_pipeline();
  return verdict(a.embeddings == b.embeddings && a.report == b.report,
                 fmt("%.0f embedding bytes, macro-F %.4f", static_cast<double>(a.embeddings.size()),
                     a.report.macro_f));
}

Outcome format_interop() {
  std::mt19937_64 rng(606);
  std::normal_distribution<float> g(0.0f, 3.0f);
  std::vector<std::string> tokens;
  std::vector<float> values;
  for (int i = 0; i < 200; ++i) {
    tokens.push_back("w" + std::to_string(i));
    for (int c = 0; c < 30; ++c) values.push_back(g(rng) * std::pow(10.0f, static_cast<float>(i % 7 - 3)));
  }
  const EmbeddingMatrix m(Vocabulary::from_ordered(tokens), 30, values);
  const auto dir = test_support::temp_dir("acceptance_io");
  save_embeddings(m, dir / "e.txt");
  const auto back = load_embeddings(dir / "e.txt");
  double worst = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t c = 0; c < m.dim(); ++c) {
      worst = std::max(worst, static_cast<double>(std::abs(back.row(i)[c] - m.row(i)[c])));
    }
  }
  const bool tokens_ok = back.vocab().tokens() == m.vocab().tokens();

  std::string message;
  std::istringstream bad("two 3\na 1 2 3\n");
  try {
    read_embeddings(bad, "bad.txt");
  } catch (const ParseError& e) {
    message = e.what();
  }
  const bool rejected = message.rfind("bad.txt:1:", 0) == 0;
  return verdict(worst <= 1e-6 && tokens_ok && rejected,
                 fmt("max abs diff %.3g", worst) + "; malformed header: " + (rejected ? message : "not rejected"));
}

Outcome published_numbers() {
  const char* data = std::getenv("CITESENT_CITATION_DATA");
  const char* emb = std::getenv("CITESENT_ACL_EMBEDDINGS");
  if (!data || !emb) {
    return {Outcome::skip, "set CITESENT_CITATION_DATA (dir with dataset-{basic,implicit,pn}.tsv) and "
                           "CITESENT_ACL_EMBEDDINGS (300-dim embedding file) to run"};
  }
  const auto matrix = load_embeddings(emb);
  const std::filesystem::path dir = data;
  ExperimentOptions opt;
  auto run = [&](const std::string& name) {
    return run_experiment(load_dataset(dir / (name + ".tsv"), {}, name), Sent2VecFeatures{&matrix}, opt);
  };
  const auto pn = run("dataset-pn");
  const auto basic = run("dataset-basic");
  const auto implicit = run("dataset-implicit");
  const double xr = implicit.x_vs_rest.value_or(0);
  const bool ok = std::abs(pn.report.macro_f - 0.85) <= 0.05 && std::abs(pn.report.weighted_f - 0.86) <= 0.05 &&
                  std::abs(basic.report.micro_f - 0.88) <= 0.05 && xr >= 0.99;
  return verdict(ok, fmt("pn macro %.3f weighted %.3f; ", pn.report.macro_f, pn.report.weighted_f) +
                         fmt("basic micro %.3f; implicit X-vs-rest %.3f", basic.report.micro_f, xr));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 metric oracle equivalence", metric_oracle},
      {"2 gradient correctness", gradient_check},
      {"3 two-topic embedding separation", topic_separation},
      {"4 sentence vector is the mean of in-vocabulary word vectors", mean_conformance},
      {"5 classifier sanity", classifier_sanity},
      {"6 pipeline determinism", determinism},
      {"7 embedding format interop", format_interop},
      {"8 published numbers (data-dependent, optional)", published_numbers},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {Outcome::fail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.kind == Outcome::pass ? "PASS" : o.kind == Outcome::fail ? "FAIL" : "SKIP";
    std::printf("%s  %s: %s\n", tag, name.c_str(), o.detail.c_str());
    failures += o.kind == Outcome::fail;
  }
  std::fflush(stdout);
  return failures == 0 ? 0 : 1;
}
