#include "citesent/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <future>
#include <numeric>
#include <sstream>

#include "citesent/error.hpp"
#include "citesent/random.hpp"
#include "citesent/sent2vec.hpp"

namespace citesent {

std::vector<std::string> LabeledDataset::labels() const {
  std::vector<std::string> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(e.label);
  return out;
}

std::vector<std::string> standard_label_set(std::string_view dataset_name) {
  if (dataset_name == "dataset-basic") return {"o", "n", "p"};
  if (dataset_name == "dataset-implicit") return {"x", "o", "n", "p"};
  if (dataset_name == "dataset-pn") return {"p", "n"};
  return {};
}

namespace {

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string join(std::span<const std::string> items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

LabeledDataset parse_dataset(std::string_view content, std::vector<std::string> label_set,
                             std::string name, const std::string& source) {
  struct Pending {
    std::size_t line;
    std::string label;
    std::string text;
  };
  std::vector<Pending> rows;
  std::vector<std::string> header_labels;
  std::map<std::string, std::string> aliases;

  std::istringstream in{std::string(content)};
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view body = strip(line);
    if (body.empty()) continue;
    if (body.front() == '#') {
      constexpr std::string_view kHeader = "#labels:";
      if (body.substr(0, kHeader.size()) == kHeader) {
        std::stringstream spec{std::string(body.substr(kHeader.size()))};
        for (std::string item; std::getline(spec, item, ',');) {
          const std::string_view entry = strip(item);
          if (entry.empty()) continue;
          const auto eq = entry.find('=');
          const std::string code(strip(entry.substr(0, eq)));
          if (code.empty()) throw ParseError(source, n, "empty label in #labels header");
          header_labels.push_back(code);
          if (eq != std::string_view::npos) {
            const std::string alias(strip(entry.substr(eq + 1)));
            if (!alias.empty()) aliases[alias] = code;
          }
        }
      }
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(source, n, "expected 'label<TAB>text'");
    std::string label(strip(std::string_view(line).substr(0, tab)));
    if (label.empty()) throw ParseError(source, n, "empty label");
    rows.push_back({n, std::move(label), line.substr(tab + 1)});
  }

  if (label_set.empty()) label_set = header_labels;
  if (label_set.empty()) label_set = standard_label_set(name);
  if (label_set.empty()) {
    // Order of first appearance.
    for (const auto& r : rows) {
      const std::string& code = aliases.count(r.label) ? aliases[r.label] : r.label;
      if (std::find(label_set.begin(), label_set.end(), code) == label_set.end()) {
        label_set.push_back(code);
      }
    }
  }

  LabeledDataset ds;
  ds.name = name.empty() ? "custom" : std::move(name);
  ds.label_set = std::move(label_set);
  ds.examples.reserve(rows.size());
  for (auto& r : rows) {
    std::string code = r.label;
    if (const auto it = aliases.find(code); it != aliases.end()) code = it->second;
    if (std::find(ds.label_set.begin(), ds.label_set.end(), code) == ds.label_set.end()) {
      throw ParseError(source, r.line,
                       "unknown label '" + r.label + "' (expected one of " +
                           join(ds.label_set, ",") + ")");
    }
    ds.examples.push_back({tokenize(r.text), std::move(code)});
  }
  if (ds.examples.empty()) throw Error(source + ": dataset has no examples");
  return ds;
}

LabeledDataset load_dataset(const std::filesystem::path& path, std::vector<std::string> label_set,
                            std::string name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), std::move(label_set), std::move(name), path.string());
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> FoldAssignment::members(std::size_t fold_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold.size(); ++i) {
    if (fold[i] == fold_id) out.push_back(i);
  }
  return out;
}

FoldAssignment stratified_kfold(std::span<const std::string> labels, std::size_t k,
                                std::uint64_t seed, bool stratify) {
  if (k < 2) throw Error("k-fold: k must be >= 2");
  if (labels.size() < k) {
    throw Error("k-fold: dataset has " + std::to_string(labels.size()) +
                " examples, fewer than k = " + std::to_string(k));
  }
  Rng rng(seed);
  auto shuffle = [&rng](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
  };

  std::vector<std::vector<std::size_t>> groups;
  if (stratify) {
    // groups in order of first appearance
    std::map<std::string, std::size_t> group_of;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      auto [it, inserted] = group_of.emplace(labels[i], groups.size());
      if (inserted) groups.emplace_back();
      groups[it->second].push_back(i);
    }
  } else {
    groups.emplace_back(labels.size());
    std::iota(groups[0].begin(), groups[0].end(), std::size_t{0});
  }

  FoldAssignment fa;
  fa.k = k;
  fa.seed = seed;
  fa.stratified = stratify;
  fa.fold.assign(labels.size(), 0);
  std::size_t deal = 0;
  for (auto& g : groups) {
    shuffle(g);
    for (const std::size_t i : g) fa.fold[i] = deal++ % k;
  }
  return fa;
}

// ---------------------------------------------------------------------------

MetricsReport f1_scores(std::span<const std::string> y_true, std::span<const std::string> y_pred,
                        std::span<const std::string> label_set) {
  if (y_true.size() != y_pred.size()) {
    throw Error("f1_scores: " + std::to_string(y_true.size()) + " true labels but " +
                std::to_string(y_pred.size()) + " predictions");
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t c = 0; c < label_set.size(); ++c) index.emplace(label_set[c], c);
  auto lookup = [&](const std::string& label) {
    const auto it = index.find(label);
    if (it == index.end()) throw Error("f1_scores: label '" + label + "' not in label set");
    return it->second;
  };

  const std::size_t k = label_set.size();
  std::vector<std::size_t> tp(k, 0), fp(k, 0), fn(k, 0), support(k, 0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const std::size_t t = lookup(y_true[i]);
    const std::size_t p = lookup(y_pred[i]);
    ++support[t];
    if (t == p) {
      ++tp[t];
    } else {
      ++fp[p];
      ++fn[t];
    }
  }

  auto ratio = [](double a, double b) { return b == 0 ? 0.0 : a / b; };
  auto f1 = [&](double tp_, double fp_, double fn_) {
    const double p = ratio(tp_, tp_ + fp_);
    const double r = ratio(tp_, tp_ + fn_);
    return ratio(2 * p * r, p + r);
  };

  MetricsReport rep;
  rep.labels.assign(label_set.begin(), label_set.end());
  double macro = 0, weighted = 0;
  std::size_t tp_all = 0, fp_all = 0, fn_all = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const auto& l = label_set[c];
    const double f = f1(static_cast<double>(tp[c]), static_cast<double>(fp[c]),
                        static_cast<double>(fn[c]));
    rep.per_class_f1[l] = f;
    rep.precision[l] = ratio(static_cast<double>(tp[c]), static_cast<double>(tp[c] + fp[c]));
    rep.recall[l] = ratio(static_cast<double>(tp[c]), static_cast<double>(tp[c] + fn[c]));
    rep.support[l] = support[c];
    macro += f;
    weighted += f * static_cast<double>(support[c]);
    tp_all += tp[c];
    fp_all += fp[c];
    fn_all += fn[c];
  }
  rep.macro_f = k ? macro / static_cast<double>(k) : 0.0;
  rep.weighted_f = ratio(weighted, static_cast<double>(y_true.size()));
  rep.micro_f = f1(static_cast<double>(tp_all), static_cast<double>(fp_all),
                   static_cast<double>(fn_all));
  return rep;
}

double x_vs_rest_score(std::span<const std::string> y_true, std::span<const std::string> y_pred,
                       std::string_view excluded_label) {
  const std::string x(excluded_label);
  const std::string rest = x + "-rest";
  auto collapse = [&](std::span<const std::string> ys) {
    std::vector<std::string> out;
    out.reserve(ys.size());
    for (const auto& y : ys) out.push_back(y == x ? x : rest);
    return out;
  };
  const std::vector<std::string> labels = {x, rest};
  return f1_scores(collapse(y_true), collapse(y_pred), labels).per_class_f1.at(x);
}

// ---------------------------------------------------------------------------

std::vector<LabeledExample> featurize(const LabeledDataset& dataset, const Featurizer& featurizer,
                                      std::size_t* degenerate) {
  std::vector<LabeledExample> out;
  out.reserve(dataset.examples.size());
  std::size_t n_degenerate = 0;

  if (const auto* s2v = std::get_if<Sent2VecFeatures>(&featurizer)) {
    if (!s2v->matrix) throw Error("sent2vec featurizer has no embedding matrix");
    for (const auto& e : dataset.examples) {
      SentenceVector v = embed_sentence(e.tokens, *s2v->matrix);
      n_degenerate += v.degenerate();
      out.push_back({std::move(v.values), e.label});
    }
  } else {
    const auto& bow = std::get<BagOfWordsFeatures>(featurizer);
    std::vector<Sentence> sentences;
    sentences.reserve(dataset.examples.size());
    for (const auto& e : dataset.examples) sentences.push_back({"", 0, e.tokens});
    Vocabulary vocab = build_vocabulary(sentences, bow.min_count);
    if (bow.max_features > 0 && vocab.size() > bow.max_features) {
      std::vector<std::string> tokens(vocab.tokens().begin(),
                                      vocab.tokens().begin() + static_cast<std::ptrdiff_t>(bow.max_features));
      std::vector<std::uint64_t> counts(vocab.counts().begin(),
                                        vocab.counts().begin() + static_cast<std::ptrdiff_t>(bow.max_features));
      vocab = Vocabulary::from_ordered(std::move(tokens), std::move(counts), bow.min_count);
    }
    for (const auto& e : dataset.examples) {
      const SparseCounts counts = bag_of_words_baseline(e.tokens, vocab);
      n_degenerate += counts.entries.empty();
      out.push_back({counts.dense(), e.label});
    }
  }
  if (degenerate) *degenerate = n_degenerate;
  return out;
}

ExperimentResult run_experiment(const LabeledDataset& dataset, const Featurizer& featurizer,
                                const ExperimentOptions& options) {
  if (dataset.examples.empty()) throw Error("run_experiment: empty dataset");
  std::size_t degenerate = 0;
  const std::vector<LabeledExample> examples = featurize(dataset, featurizer, &degenerate);
  const std::vector<std::string> labels = dataset.labels();

  ExperimentResult result;
  result.feature_dim = examples.front().features.size();
  result.folds = stratified_kfold(labels, options.k, options.seed, options.stratify);
  result.predictions.assign(examples.size(), std::string());

  auto run_fold = [&](std::size_t f) {
    std::vector<LabeledExample> train;
    std::vector<std::size_t> held_out;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (result.folds.fold[i] == f) {
        held_out.push_back(i);
      } else {
        train.push_back(examples[i]);
      }
    }
    if (held_out.empty()) return;
    SvmConfig svm = options.svm;
    svm.seed = derive_seed(options.svm.seed, "fold" + std::to_string(f));
    svm.workers = 1;
    const LinearModel model = train_ovr(train, dataset.label_set, svm);
    for (const std::size_t i : held_out) result.predictions[i] = predict(model, examples[i].features);
  };

  if (options.workers <= 1) {
    for (std::size_t f = 0; f < options.k; ++f) run_fold(f);
  } else {
    std::vector<std::future<void>> tasks;
    std::exception_ptr failure;
    for (std::size_t f = 0; f < options.k; ++f) {
      tasks.push_back(std::async(std::launch::async, run_fold, f));
      if (tasks.size() == options.workers || f + 1 == options.k) {
        for (auto& t : tasks) {
          try {
            t.get();
          } catch (...) {
            if (!failure) failure = std::current_exception();
          }
        }
        tasks.clear();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  result.report = f1_scores(labels, result.predictions, dataset.label_set);
  result.report.degenerate_vector_count = degenerate;
  if (std::find(dataset.label_set.begin(), dataset.label_set.end(), "x") != dataset.label_set.end()) {
    result.x_vs_rest = x_vs_rest_score(labels, result.predictions, "x");
  }
  return result;
}

// ---------------------------------------------------------------------------

namespace {

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string format_metrics_kv(const MetricsReport& report, std::optional<double> x_vs_rest) {
  std::string out;
  out += "micro_f=" + fixed(report.micro_f, 6) + "\n";
  out += "macro_f=" + fixed(report.macro_f, 6) + "\n";
  out += "weighted_f=" + fixed(report.weighted_f, 6) + "\n";
  for (const auto& l : report.labels) {
    out += "f1." + l + "=" + fixed(report.per_class_f1.at(l), 6) + "\n";
    out += "precision." + l + "=" + fixed(report.precision.at(l), 6) + "\n";
    out += "recall." + l + "=" + fixed(report.recall.at(l), 6) + "\n";
    out += "support." + l + "=" + std::to_string(report.support.at(l)) + "\n";
  }
  if (x_vs_rest) out += "x_vs_rest_f=" + fixed(*x_vs_rest, 6) + "\n";
  out += "degenerate_vectors=" + std::to_string(report.degenerate_vector_count) + "\n";
  return out;
}

std::string format_report(const ExperimentResult& result, std::string_view title) {
  const MetricsReport& r = result.report;
  std::string out;
  if (!title.empty()) out += std::string(title) + "\n";
  out += pad("", 22) + pad("F-score", 10) + pad("Precision", 11) + pad("Recall", 9) + "Support\n";
  for (const auto& l : r.labels) {
    out += pad(upper(l) + " (F-score)", 22) + pad(fixed(r.per_class_f1.at(l), 3), 10) +
           pad(fixed(r.precision.at(l), 3), 11) + pad(fixed(r.recall.at(l), 3), 9) +
           std::to_string(r.support.at(l)) + "\n";
  }
  out += pad("Micro-F", 22) + fixed(r.micro_f, 3) + "\n";
  out += pad("Macro-F", 22) + fixed(r.macro_f, 3) + "\n";
  out += pad("Weighted-F", 22) + fixed(r.weighted_f, 3) + "\n";
  if (result.x_vs_rest) {
    std::vector<std::string> rest;
    for (const auto& l : r.labels) {
      if (l != "x") rest.push_back(upper(l));
    }
    out += pad("X vs " + join(rest, ","), 22) + fixed(*result.x_vs_rest, 3) + "\n";
  }
  out += "folds: " + std::to_string(result.folds.k) +
         (result.folds.stratified ? " (stratified)" : " (not stratified)") +
         ", degenerate sentence vectors: " + std::to_string(r.degenerate_vector_count) + "\n";
  out += "\n";
  out += format_metrics_kv(r, result.x_vs_rest);
  out += "folds=" + std::to_string(result.folds.k) + "\n";
  out += std::string("stratified=") + (result.folds.stratified ? "true" : "false") + "\n";
  return out;
}

}  // namespace citesent
