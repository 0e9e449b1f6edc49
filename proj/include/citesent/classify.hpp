#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "citesent/corpus.hpp"

namespace citesent {

struct LabeledExample {
  std::vector<double> features;
  std::string label;
};

struct SvmConfig {
  double lambda = 1e-4;
  std::size_t epochs = 50;
  std::uint64_t seed = 1;
  /// Scale each example's hinge term by m / (2 m_y) so both sides of a
  /// binary problem carry equal total weight.
  bool balanced = false;
  /// Threads used by train_ovr; each binary model is trained on one thread.
  unsigned workers = 1;

  void validate() const;
};

struct BinaryModel {
  std::vector<double> weights;
  double bias = 0;

  double decision(std::span<const double> x) const;
};

/// Linear SVM trained by primal stochastic subgradient descent with step
/// 1/(lambda t) and a reshuffle every epoch. The returned model is the average
/// of the iterates over the second half of training. The bias is learned as
/// the weight of a constant feature.
///
/// Examples whose label equals `positive_label` are +1, all others -1. A
/// problem with only one side present is accepted and yields a model that
/// predicts that side everywhere.
BinaryModel train_binary_svm(std::span<const LabeledExample> examples,
                             std::string_view positive_label, const SvmConfig& config);

/// (lambda/2)|w|^2 + mean hinge loss, bias unregularized.
double svm_objective(const BinaryModel& model, std::span<const LabeledExample> examples,
                     std::string_view positive_label, double lambda);

/// One-vs-rest model: one weight vector and bias per class, in class order.
struct LinearModel {
  std::vector<std::string> classes;
  std::vector<std::vector<double>> weights;
  std::vector<double> biases;
  double lambda = 0;
  std::size_t epochs = 0;
  std::uint64_t seed = 0;

  std::size_t dim() const { return weights.empty() ? 0 : weights.front().size(); }
  std::vector<double> decision_values(std::span<const double> features) const;
};

LinearModel train_ovr(std::span<const LabeledExample> examples,
                      std::span<const std::string> label_set, const SvmConfig& config);

/// Class with the largest decision value; ties go to the earliest class.
/// Throws DimensionMismatch when the feature length differs from the model.
const std::string& predict(const LinearModel& model, std::span<const double> features);

void write_model(const LinearModel& model, std::ostream& out);
void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel read_model(std::istream& in, const std::string& source = "<stream>");
LinearModel load_model(const std::filesystem::path& path);

/// Unigram counts as sorted (index, count) pairs; OOV tokens are ignored.
struct SparseCounts {
  std::size_t dim = 0;
  std::vector<std::pair<std::size_t, double>> entries;

  std::vector<double> dense() const;
};

SparseCounts bag_of_words_baseline(std::span<const std::string> tokens, const Vocabulary& vocab);

}  // namespace citesent
