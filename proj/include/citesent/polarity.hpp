#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "citesent/corpus.hpp"
#include "citesent/word2vec.hpp"

namespace citesent {

using Phrase = std::vector<std::string>;

enum class Polarity { none, positive, negative, both };

std::string_view to_string(Polarity p);

/// Positive and negative polar phrases. Phrases are lowercase token
/// sequences; the two sets must be disjoint and no phrase may be empty.
class PolarLexicon {
 public:
  PolarLexicon(std::vector<Phrase> positive, std::vector<Phrase> negative);

  const std::vector<Phrase>& positive() const noexcept { return positive_; }
  const std::vector<Phrase>& negative() const noexcept { return negative_; }

  /// True if any phrase of the given side occurs as a contiguous run of
  /// whole tokens.
  bool contains_positive(std::span<const std::string> tokens) const;
  bool contains_negative(std::span<const std::string> tokens) const;

 private:
  using FirstTokenIndex = std::unordered_map<std::string, std::vector<std::size_t>>;

  static bool contains_any(std::span<const std::string> tokens, const std::vector<Phrase>& phrases,
                           const FirstTokenIndex& index);

  std::vector<Phrase> positive_;
  std::vector<Phrase> negative_;
  FirstTokenIndex positive_index_;
  FirstTokenIndex negative_index_;
};

/// Lexicon file: "[positive]" / "[negative]" section headers, one phrase per
/// line, '#' starts a comment. Phrases go through `tokenize`.
PolarLexicon load_lexicon(const std::filesystem::path& path);
PolarLexicon parse_lexicon(std::string_view content, const std::string& source = "<lexicon>");

Polarity match_polarity(const Sentence& sentence, const PolarLexicon& lexicon);

struct PolarSubcorpus {
  std::vector<Sentence> positive;
  std::vector<Sentence> negative;
};

/// Sentences matching strictly one polarity; the larger class is downsampled
/// uniformly (seeded) to the size of the smaller one. Original order is kept.
/// Throws citesent::Error("empty polarity class") if either class is empty.
PolarSubcorpus select_polar_sentences(std::span<const Sentence> corpus,
                                      const PolarLexicon& lexicon, std::uint64_t seed);

/// Plain skip-gram training on positive followed by negative sentences.
EmbeddingMatrix train_ps_embeddings(const PolarSubcorpus& subcorpus, const TrainingConfig& config,
                                    TrainingStats* stats = nullptr);

}  // namespace citesent
