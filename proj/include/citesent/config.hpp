#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "citesent/classify.hpp"
#include "citesent/eval.hpp"
#include "citesent/word2vec.hpp"

namespace citesent {

/// Flat key=value configuration shared by every pipeline stage. All
/// randomness derives from `seed`; each stage gets its own sub-seed.
struct PipelineConfig {
  TrainingConfig training;
  double lambda = 1e-4;
  std::size_t svm_epochs = 50;
  bool class_weight = false;
  std::size_t k = 10;
  bool stratify = true;
  std::size_t min_tokens = 3;
  std::uint64_t seed = 1;
  unsigned workers = 1;

  std::filesystem::path corpus;
  std::filesystem::path sentences;
  std::filesystem::path lexicon;
  std::filesystem::path dataset;
  std::filesystem::path embeddings;
  std::filesystem::path output;

  static const std::vector<std::string>& keys();

  /// Throws citesent::Error on an unknown key or an unparsable value.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;

  /// "key=value" lines; blank lines and '#' comments ignored.
  void load_file(const std::filesystem::path& path);
  void parse(std::string_view content, const std::string& source = "<config>");
  std::string dump() const;

  /// Numeric ranges, plus existence of every non-empty input path.
  void validate() const;

  TrainingConfig training_config() const;  ///< seed derived for "train"
  std::uint64_t polar_selection_seed() const;
  ExperimentOptions experiment_options() const;
};

}  // namespace citesent
