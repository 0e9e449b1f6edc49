#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "citesent/classify.hpp"
#include "citesent/word2vec.hpp"

namespace citesent {

struct DatasetExample {
  std::vector<std::string> tokens;
  std::string label;
};

struct LabeledDataset {
  std::string name;
  std::vector<DatasetExample> examples;
  std::vector<std::string> label_set;

  std::vector<std::string> labels() const;
};

/// Label sets of the named citation datasets: dataset-basic {o,n,p},
/// dataset-implicit {x,o,n,p}, dataset-pn {p,n}. Empty for other names.
std::vector<std::string> standard_label_set(std::string_view dataset_name);

/// TSV, one "label<TAB>sentence text" per line; blank lines and '#' comments
/// are skipped. A "#labels: p=positive,n=negative" header declares the label
/// order and lets the long names stand in for the short ones.
///
/// An empty `label_set` falls back to the header, then to the standard set for
/// `name`. Throws ParseError on malformed lines or labels outside the set.
LabeledDataset load_dataset(const std::filesystem::path& path,
                            std::vector<std::string> label_set = {}, std::string name = "");
LabeledDataset parse_dataset(std::string_view content, std::vector<std::string> label_set = {},
                             std::string name = "", const std::string& source = "<dataset>");

struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> fold;  ///< example index -> fold id
  std::uint64_t seed = 0;
  bool stratified = true;

  std::vector<std::size_t> members(std::size_t fold_id) const;
};

/// Each class is shuffled and dealt round-robin, continuing the deal position
/// across classes, so fold sizes and per-class counts differ by at most one.
/// With `stratify == false` all examples are shuffled and dealt together.
FoldAssignment stratified_kfold(std::span<const std::string> labels, std::size_t k,
                                std::uint64_t seed, bool stratify = true);

struct MetricsReport {
  std::vector<std::string> labels;  ///< in label-set order
  std::map<std::string, double> per_class_f1;
  std::map<std::string, double> precision;
  std::map<std::string, double> recall;
  std::map<std::string, std::size_t> support;
  double micro_f = 0;
  double macro_f = 0;
  double weighted_f = 0;
  std::size_t degenerate_vector_count = 0;

  bool operator==(const MetricsReport&) const = default;
};

/// 0/0 is taken as 0 for precision, recall and F1.
MetricsReport f1_scores(std::span<const std::string> y_true, std::span<const std::string> y_pred,
                        std::span<const std::string> label_set);

/// F1 of `excluded_label` after collapsing every other label into one class.
double x_vs_rest_score(std::span<const std::string> y_true, std::span<const std::string> y_pred,
                       std::string_view excluded_label = "x");

struct Sent2VecFeatures {
  const EmbeddingMatrix* matrix = nullptr;
};

/// Unigram counts over the dataset's most frequent tokens.
struct BagOfWordsFeatures {
  std::uint64_t min_count = 1;
  std::size_t max_features = 5000;
};

using Featurizer = std::variant<Sent2VecFeatures, BagOfWordsFeatures>;

struct ExperimentOptions {
  std::size_t k = 10;
  std::uint64_t seed = 1;  ///< fold assignment
  bool stratify = true;
  SvmConfig svm;
  unsigned workers = 1;  ///< folds trained concurrently
};

struct ExperimentResult {
  MetricsReport report;
  std::vector<std::string> predictions;  ///< one per example, pooled over folds
  FoldAssignment folds;
  std::optional<double> x_vs_rest;  ///< set when the label set contains "x"
  std::size_t feature_dim = 0;
};

/// Featurize once, then for every fold train one-vs-rest on the remaining
/// folds and predict the held-out fold. Metrics are computed once over the
/// pooled held-out predictions.
ExperimentResult run_experiment(const LabeledDataset& dataset, const Featurizer& featurizer,
                                const ExperimentOptions& options);

/// Feature vectors for every example, plus the number of degenerate
/// (all-OOV) sentence vectors.
std::vector<LabeledExample> featurize(const LabeledDataset& dataset, const Featurizer& featurizer,
                                      std::size_t* degenerate = nullptr);

/// Human-readable table (per-class F rows, micro/macro/weighted, and the
/// "X vs rest" row when present) followed by a key=value block.
std::string format_report(const ExperimentResult& result, std::string_view title = "");
std::string format_metrics_kv(const MetricsReport& report, std::optional<double> x_vs_rest = {});

}  // namespace citesent
