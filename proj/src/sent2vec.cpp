#include "citesent/sent2vec.hpp"

#include <future>

#include "text_format.hpp"

namespace citesent {

SentenceVector embed_sentence(std::span<const std::string> tokens, const EmbeddingMatrix& matrix) {
  SentenceVector v;
  v.values.assign(matrix.dim(), 0.0);
  v.n_total = tokens.size();
  for (const std::string& t : tokens) {
    const auto idx = matrix.vocab().find(t);
    if (!idx) continue;
    const auto row = matrix.row(*idx);
    for (std::size_t c = 0; c < row.size(); ++c) v.values[c] += row[c];
    ++v.n_in_vocab;
  }
  if (v.n_in_vocab > 0) {
    const auto n = static_cast<double>(v.n_in_vocab);
    for (double& x : v.values) x /= n;
  }
  return v;
}

std::vector<SentenceVector> embed_corpus(std::span<const Sentence> sentences,
                                         const EmbeddingMatrix& matrix, unsigned workers) {
  std::vector<SentenceVector> out(sentences.size());
  if (workers <= 1 || sentences.size() < 2) {
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      out[i] = embed_sentence(sentences[i].tokens, matrix);
    }
    return out;
  }
  std::vector<std::future<void>> tasks;
  for (unsigned w = 0; w < workers; ++w) {
    tasks.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < sentences.size(); i += workers) {
        out[i] = embed_sentence(sentences[i].tokens, matrix);
      }
    }));
  }
  for (auto& t : tasks) t.get();
  return out;
}

void write_sentence_vectors(std::ostream& out, std::span<const Sentence> sentences,
                            std::span<const SentenceVector> vectors) {
  if (sentences.size() != vectors.size()) {
    throw Error("write_sentence_vectors: sentence and vector counts differ");
  }
  std::string line;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    line = sentences[i].doc_id + ":" + std::to_string(sentences[i].index) + " " +
           std::to_string(vectors[i].n_in_vocab);
    for (const double x : vectors[i].values) {
      line.push_back(' ');
      text::append_number(line, x);
    }
    line.push_back('\n');
    out << line;
  }
}

}  // namespace citesent
