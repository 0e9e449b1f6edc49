#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "citesent/corpus.hpp"
#include "citesent/word2vec.hpp"

namespace citesent {

/// Mean of the embeddings of a sentence's in-vocabulary tokens.
struct SentenceVector {
  std::vector<double> values;
  std::size_t n_in_vocab = 0;
  std::size_t n_total = 0;

  /// No token was found in the vocabulary; `values` is the zero vector.
  bool degenerate() const noexcept { return n_in_vocab == 0; }

  bool operator==(const SentenceVector&) const = default;
};

/// Out-of-vocabulary tokens are skipped and do not count towards the mean.
/// Repeated tokens contribute once per occurrence.
SentenceVector embed_sentence(std::span<const std::string> tokens, const EmbeddingMatrix& matrix);

std::vector<SentenceVector> embed_corpus(std::span<const Sentence> sentences,
                                         const EmbeddingMatrix& matrix, unsigned workers = 1);

/// Diagnostic dump: "doc_id:index n_in_vocab v1 ... v_dim" per sentence.
void write_sentence_vectors(std::ostream& out, std::span<const Sentence> sentences,
                            std::span<const SentenceVector> vectors);

}  // namespace citesent
