#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citesent/corpus.hpp"
#include "citesent/error.hpp"

namespace citesent {

struct TrainingConfig {
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double initial_lr = 0.025;
  std::uint64_t min_count = 5;
  double subsample_t = 1e-3;  ///< 0 disables subsampling
  std::uint64_t seed = 1;
  unsigned workers = 1;

  /// Throws citesent::Error naming the first invalid field.
  void validate() const;
};

/// Word vectors for a vocabulary. Rows of `input` are the word embeddings;
/// `output` holds the context weights and is empty for loaded matrices.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(Vocabulary vocab, std::size_t dim, std::vector<float> input,
                  std::vector<float> output = {});

  const Vocabulary& vocab() const noexcept { return vocab_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t rows() const noexcept { return vocab_.size(); }

  std::span<const float> row(std::size_t index) const {
    return {input_.data() + index * dim_, dim_};
  }
  std::span<const float> output_row(std::size_t index) const {
    return {output_.data() + index * dim_, dim_};
  }
  bool has_output() const noexcept { return !output_.empty(); }

  const std::vector<float>& input() const noexcept { return input_; }
  const std::vector<float>& output() const noexcept { return output_; }

  bool operator==(const EmbeddingMatrix& other) const {
    return dim_ == other.dim_ && vocab_.tokens() == other.vocab_.tokens() &&
           input_ == other.input_ && output_ == other.output_;
  }

 private:
  Vocabulary vocab_;
  std::size_t dim_ = 0;
  std::vector<float> input_;
  std::vector<float> output_;
};

struct TrainingStats {
  std::vector<double> epoch_mean_loss;  ///< mean pair loss per epoch
  std::uint64_t pairs = 0;
  std::uint64_t words_seen = 0;
};

/// Skip-gram with negative sampling. With workers == 1 the result depends
/// only on the corpus and the config (bit-reproducible). With more workers the
/// threads update the shared matrices without locking.
EmbeddingMatrix train_embeddings(std::span<const Sentence> sentences,
                                 const TrainingConfig& config,
                                 TrainingStats* stats = nullptr);

/// p(i) proportional to counts[i]^power.
std::vector<double> noise_distribution(const Vocabulary& vocab, double power = 0.75);

// ---------------------------------------------------------------------------
// Negative-sampling pair objective

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// -log sigmoid(score) for a true pair, -log sigmoid(-score) for noise.
inline double pair_loss(double score, int label) {
  const double z = label == 1 ? score : -score;
  // softplus(-z) without overflow
  return std::log1p(std::exp(-std::abs(z))) + std::max(-z, 0.0);
}

/// d loss / d score = sigmoid(score) - label.
inline double pair_loss_slope(double score, int label) { return sigmoid(score) - label; }

struct PairGradient {
  double loss = 0;
  std::vector<double> grad_center;
  std::vector<double> grad_context;
};

/// Loss and gradients of one (center, context) pair; label 1 = observed pair,
/// 0 = noise sample.
PairGradient pair_gradient(std::span<const double> center, std::span<const double> context,
                           int label);

/// min(1, sqrt(t/f) + t/f); 1 when subsample_t == 0.
double subsample_keep_probability(double token_freq_fraction, double subsample_t);

// ---------------------------------------------------------------------------

struct Neighbor {
  std::string token;
  double cosine = 0;
};

double cosine_similarity(std::span<const float> a, std::span<const float> b);

/// The k most cosine-similar tokens, query excluded, ties by vocabulary index.
std::vector<Neighbor> nearest_neighbors(const EmbeddingMatrix& matrix, std::string_view token,
                                        std::size_t k);

/// Text format: "<vocab_size> <dim>" header, then "token v1 ... v_dim" per
/// line, values with 9 significant digits. Only input vectors are written.
void save_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path);
void write_embeddings(const EmbeddingMatrix& matrix, std::ostream& out);

/// Throws ParseError (with line number) on malformed content and
/// DimensionMismatch when a row length disagrees with the header.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);
EmbeddingMatrix read_embeddings(std::istream& in, const std::string& source = "<stream>");

}  // namespace citesent
