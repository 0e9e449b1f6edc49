#include "citesent/word2vec.hpp"

#include <algorithm>
#include <atomic>
#include <future>
#include <numeric>

#include "citesent/random.hpp"

namespace citesent {

void TrainingConfig::validate() const {
  if (dim < 1) throw Error("config: dim must be >= 1");
  if (window < 1) throw Error("config: window must be >= 1");
  if (negatives < 1) throw Error("config: negatives must be >= 1");
  if (epochs < 1) throw Error("config: epochs must be >= 1");
  if (!(initial_lr > 0) || !std::isfinite(initial_lr)) throw Error("config: lr must be > 0");
  if (min_count < 1) throw Error("config: min_count must be >= 1");
  if (!(subsample_t >= 0) || !std::isfinite(subsample_t)) {
    throw Error("config: subsample must be >= 0");
  }
  if (workers < 1) throw Error("config: workers must be >= 1");
}

EmbeddingMatrix::EmbeddingMatrix(Vocabulary vocab, std::size_t dim, std::vector<float> input,
                                 std::vector<float> output)
    : vocab_(std::move(vocab)), dim_(dim), input_(std::move(input)), output_(std::move(output)) {
  if (dim_ == 0) throw DimensionMismatch("embedding dimension must be positive");
  if (input_.size() != vocab_.size() * dim_) {
    throw DimensionMismatch("embedding matrix has " + std::to_string(input_.size()) +
                            " values, expected " + std::to_string(vocab_.size() * dim_));
  }
  if (!output_.empty() && output_.size() != input_.size()) {
    throw DimensionMismatch("context matrix shape differs from the embedding matrix");
  }
}

std::vector<double> noise_distribution(const Vocabulary& vocab, double power) {
  if (vocab.empty()) throw Error("noise distribution of an empty vocabulary");
  std::vector<double> p(vocab.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::pow(static_cast<double>(vocab.count(i)), power);
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& x : p) x /= total;
  return p;
}

PairGradient pair_gradient(std::span<const double> center, std::span<const double> context,
                           int label) {
  if (center.size() != context.size()) {
    throw DimensionMismatch("pair_gradient: vectors differ in length");
  }
  const double score = std::inner_product(center.begin(), center.end(), context.begin(), 0.0);
  const double slope = pair_loss_slope(score, label);
  PairGradient g;
  g.loss = pair_loss(score, label);
  g.grad_center.resize(center.size());
  g.grad_context.resize(center.size());
  for (std::size_t i = 0; i < center.size(); ++i) {
    g.grad_center[i] = slope * context[i];
    g.grad_context[i] = slope * center[i];
  }
  return g;
}

double subsample_keep_probability(double token_freq_fraction, double subsample_t) {
  if (subsample_t <= 0 || token_freq_fraction <= subsample_t) return 1.0;
  const double r = subsample_t / token_freq_fraction;
  return std::min(1.0, std::sqrt(r) + r);
}

// ---------------------------------------------------------------------------
// Training

namespace {

// Single worker: plain memory access.
struct PlainAccess {
  static float load(float* p) { return *p; }
  static void store(float* p, float v) { *p = v; }
};

// Several workers: unsynchronized (lossy) updates, but free of data races.
struct RelaxedAccess {
  static float load(float* p) { return std::atomic_ref<float>(*p).load(std::memory_order_relaxed); }
  static void store(float* p, float v) {
    std::atomic_ref<float>(*p).store(v, std::memory_order_relaxed);
  }
};

struct Corpus {
  std::vector<std::vector<std::uint32_t>> sentences;
  std::uint64_t words = 0;
};

struct SharedState {
  const TrainingConfig& config;
  const Corpus& corpus;
  std::vector<double> noise_cdf;
  std::vector<double> keep_probability;
  std::vector<float> input;
  std::vector<float> output;
  std::atomic<std::uint64_t> words_processed{0};
  std::uint64_t total_words = 0;
};

struct WorkerResult {
  std::vector<double> loss_sum;
  std::vector<std::uint64_t> pairs;
};

std::uint32_t draw_noise(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto idx = static_cast<std::size_t>(it - cdf.begin());
  return static_cast<std::uint32_t>(std::min(idx, cdf.size() - 1));
}

template <typename Access>
WorkerResult run_worker(SharedState& st, std::size_t begin, std::size_t end, std::uint64_t seed) {
  const TrainingConfig& cfg = st.config;
  const std::size_t dim = cfg.dim;
  Rng rng(seed);
  WorkerResult result;
  result.loss_sum.assign(cfg.epochs, 0.0);
  result.pairs.assign(cfg.epochs, 0);

  std::vector<float> center_update(dim);
  std::vector<std::uint32_t> kept;
  const double min_lr = cfg.initial_lr * 1e-4;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0;
    std::uint64_t pairs = 0;
    for (std::size_t s = begin; s < end; ++s) {
      const auto& sentence = st.corpus.sentences[s];
      const std::uint64_t done =
          st.words_processed.fetch_add(sentence.size(), std::memory_order_relaxed);
      const double progress = static_cast<double>(done) / static_cast<double>(st.total_words + 1);
      const double lr = std::max(min_lr, cfg.initial_lr * (1.0 - progress));

      kept.clear();
      for (std::uint32_t w : sentence) {
        const double keep = st.keep_probability[w];
        if (keep >= 1.0 || rng.uniform() < keep) kept.push_back(w);
      }

      const double sentence_loss_before = loss_sum;
      for (std::size_t i = 0; i < kept.size(); ++i) {
        const std::size_t reach = 1 + rng.below(cfg.window);
        const std::size_t lo = i >= reach ? i - reach : 0;
        const std::size_t hi = std::min(kept.size() - 1, i + reach);
        float* center = st.input.data() + std::size_t{kept[i]} * dim;

        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const std::uint32_t context = kept[j];
          std::fill(center_update.begin(), center_update.end(), 0.0f);

          for (std::size_t d = 0; d <= cfg.negatives; ++d) {
            std::uint32_t target = context;
            int label = 1;
            if (d > 0) {
              label = 0;
              target = draw_noise(st.noise_cdf, rng);
              for (int attempt = 1; target == context && attempt < 8; ++attempt) {
                target = draw_noise(st.noise_cdf, rng);
              }
              if (target == context) continue;
            }
            float* out = st.output.data() + std::size_t{target} * dim;
            double score = 0;
            for (std::size_t c = 0; c < dim; ++c) {
              score += static_cast<double>(Access::load(center + c)) * Access::load(out + c);
            }
            loss_sum += pair_loss(score, label);
            ++pairs;
            const auto step = static_cast<float>(-lr * pair_loss_slope(score, label));
            for (std::size_t c = 0; c < dim; ++c) {
              const float o = Access::load(out + c);
              center_update[c] += step * o;
              Access::store(out + c, o + step * Access::load(center + c));
            }
          }
          for (std::size_t c = 0; c < dim; ++c) {
            Access::store(center + c, Access::load(center + c) + center_update[c]);
          }
        }
      }
      if (!std::isfinite(loss_sum - sentence_loss_before)) {
        throw TrainingDiverged("training diverged (non-finite loss); lower the learning rate");
      }
    }
    result.loss_sum[epoch] = loss_sum;
    result.pairs[epoch] = pairs;
  }
  return result;
}

}  // namespace

EmbeddingMatrix train_embeddings(std::span<const Sentence> sentences, const TrainingConfig& config,
                                 TrainingStats* stats) {
  config.validate();
  Vocabulary vocab = build_vocabulary(sentences, config.min_count);
  const std::size_t dim = config.dim;
  const std::size_t v = vocab.size();

  Corpus corpus;
  corpus.sentences.reserve(sentences.size());
  for (const Sentence& s : sentences) {
    std::vector<std::uint32_t> ids;
    ids.reserve(s.tokens.size());
    for (const std::string& t : s.tokens) {
      if (auto idx = vocab.find(t)) ids.push_back(static_cast<std::uint32_t>(*idx));
    }
    if (ids.empty()) continue;
    corpus.words += ids.size();
    corpus.sentences.push_back(std::move(ids));
  }

  SharedState st{config, corpus, {}, {}, {}, {}};
  st.total_words = corpus.words * config.epochs;

  const std::vector<double> noise = noise_distribution(vocab);
  st.noise_cdf.resize(v);
  std::partial_sum(noise.begin(), noise.end(), st.noise_cdf.begin());

  st.keep_probability.resize(v);
  const auto total = static_cast<double>(vocab.total_count());
  for (std::size_t i = 0; i < v; ++i) {
    st.keep_probability[i] =
        subsample_keep_probability(static_cast<double>(vocab.count(i)) / total, config.subsample_t);
  }

  st.input.resize(v * dim);
  st.output.assign(v * dim, 0.0f);
  {
    Rng init(derive_seed(config.seed, "init"));
    const double scale = 1.0 / static_cast<double>(dim);
    for (float& x : st.input) x = static_cast<float>((init.uniform() - 0.5) * scale);
  }

  const std::size_t n = corpus.sentences.size();
  const unsigned workers =
      static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(config.workers, n)));
  std::vector<WorkerResult> results;
  if (workers == 1) {
    results.push_back(run_worker<PlainAccess>(st, 0, n, derive_seed(config.seed, "worker0")));
  } else {
    std::vector<std::future<WorkerResult>> tasks;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = n * w / workers;
      const std::size_t end = n * (w + 1) / workers;
      const std::uint64_t seed = derive_seed(config.seed, "worker" + std::to_string(w));
      tasks.push_back(std::async(std::launch::async, [&st, begin, end, seed] {
        return run_worker<RelaxedAccess>(st, begin, end, seed);
      }));
    }
    // Collect every future before rethrowing so no thread outlives `st`.
    std::exception_ptr failure;
    for (auto& t : tasks) {
      try {
        results.push_back(t.get());
      } catch (...) {
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  for (const float x : st.input) {
    if (!std::isfinite(x)) throw TrainingDiverged("training produced a non-finite embedding");
  }
  for (const float x : st.output) {
    if (!std::isfinite(x)) throw TrainingDiverged("training produced a non-finite context weight");
  }

  if (stats) {
    stats->epoch_mean_loss.assign(config.epochs, 0.0);
    stats->pairs = 0;
    stats->words_seen = st.words_processed.load();
    for (std::size_t e = 0; e < config.epochs; ++e) {
      double loss = 0;
      std::uint64_t pairs = 0;
      for (const auto& r : results) {
        loss += r.loss_sum[e];
        pairs += r.pairs[e];
      }
      stats->epoch_mean_loss[e] = pairs ? loss / static_cast<double>(pairs) : 0.0;
      stats->pairs += pairs;
    }
  }
  return EmbeddingMatrix(std::move(vocab), dim, std::move(st.input), std::move(st.output));
}

// ---------------------------------------------------------------------------

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingMatrix& matrix, std::string_view token,
                                        std::size_t k) {
  if (k < 1) throw Error("nearest_neighbors: k must be >= 1");
  const auto query = matrix.vocab().find(token);
  if (!query) throw Error("unknown token '" + std::string(token) + "'");

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(matrix.rows());
  const auto q = matrix.row(*query);
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    if (i == *query) continue;
    scored.emplace_back(cosine_similarity(q, matrix.row(i)), i);
  }
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                    scored.end(), [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.push_back({matrix.vocab().token(scored[i].second), scored[i].first});
  }
  return out;
}

}  // namespace citesent
