#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "citesent/corpus.hpp"

#ifndef CITESENT_DATA_DIR
#define CITESENT_DATA_DIR "data"
#endif

namespace test_support {

inline std::filesystem::path data_dir() { return CITESENT_DATA_DIR; }

/// Fresh, empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("citesent_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Two disjoint topics of `per_topic` tokens each ("a0".."aN", "b0".."bN");
/// every sentence draws all of its tokens from a single topic.
inline std::vector<citesent::Sentence> two_topic_corpus(std::size_t sentences, std::size_t per_topic,
                                                        std::size_t length, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<citesent::Sentence> out;
  out.reserve(sentences);
  for (std::size_t i = 0; i < sentences; ++i) {
    const char topic = (i % 2 == 0) ? 'a' : 'b';
    citesent::Sentence s{"synthetic", i, {}};
    for (std::size_t j = 0; j < length; ++j) {
      s.tokens.push_back(std::string(1, topic) + std::to_string(rng() % per_topic));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace test_support

#include "citesent/word2vec.hpp"

namespace test_support {

struct TopicCosines {
  double intra = 0;
  double cross = 0;
};

/// Mean cosine over all same-topic token pairs and over all cross-topic pairs,
/// using the first character of each token as its topic.
inline TopicCosines topic_cosines(const citesent::EmbeddingMatrix& m) {
  double intra = 0, cross = 0;
  std::size_t n_intra = 0, n_cross = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.rows(); ++j) {
      const double c = citesent::cosine_similarity(m.row(i), m.row(j));
      if (m.vocab().token(i)[0] == m.vocab().token(j)[0]) {
        intra += c;
        ++n_intra;
      } else {
        cross += c;
        ++n_cross;
      }
    }
  }
  return {intra / static_cast<double>(n_intra), cross / static_cast<double>(n_cross)};
}

}  // namespace test_support

#include <cmath>

#include "citesent/classify.hpp"

namespace test_support {

/// 2-D points labelled by the side of the line x + 2y = 0.3, margin >= 0.5.
inline std::vector<citesent::LabeledExample> separable_2d(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<citesent::LabeledExample> out;
  const double norm = std::sqrt(5.0);
  while (out.size() < n) {
    const double x = u(rng), y = u(rng);
    const double dist = (x + 2 * y - 0.3) / norm;
    if (std::abs(dist) < 0.5) continue;
    out.push_back({{x, y}, dist > 0 ? "p" : "n"});
  }
  return out;
}

}  // namespace test_support
