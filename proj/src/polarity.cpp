#include "citesent/polarity.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "citesent/error.hpp"
#include "citesent/random.hpp"

namespace citesent {

std::string_view to_string(Polarity p) {
  switch (p) {
    case Polarity::positive: return "positive";
    case Polarity::negative: return "negative";
    case Polarity::both: return "both";
    case Polarity::none: break;
  }
  return "none";
}

PolarLexicon::PolarLexicon(std::vector<Phrase> positive, std::vector<Phrase> negative)
    : positive_(std::move(positive)), negative_(std::move(negative)) {
  const std::set<Phrase> pos(positive_.begin(), positive_.end());
  for (const Phrase& p : positive_) {
    if (p.empty()) throw Error("lexicon: empty positive phrase");
  }
  for (const Phrase& p : negative_) {
    if (p.empty()) throw Error("lexicon: empty negative phrase");
    if (pos.count(p)) {
      std::string joined;
      for (const auto& t : p) joined += (joined.empty() ? "" : " ") + t;
      throw Error("lexicon: phrase '" + joined + "' is both positive and negative");
    }
  }
  for (std::size_t i = 0; i < positive_.size(); ++i) positive_index_[positive_[i][0]].push_back(i);
  for (std::size_t i = 0; i < negative_.size(); ++i) negative_index_[negative_[i][0]].push_back(i);
}

bool PolarLexicon::contains_any(std::span<const std::string> tokens,
                                const std::vector<Phrase>& phrases, const FirstTokenIndex& index) {
  for (std::size_t start = 0; start < tokens.size(); ++start) {
    const auto it = index.find(tokens[start]);
    if (it == index.end()) continue;
    for (const std::size_t p : it->second) {
      const Phrase& phrase = phrases[p];
      if (start + phrase.size() <= tokens.size() &&
          std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(start))) {
        return true;
      }
    }
  }
  return false;
}

bool PolarLexicon::contains_positive(std::span<const std::string> tokens) const {
  return contains_any(tokens, positive_, positive_index_);
}

bool PolarLexicon::contains_negative(std::span<const std::string> tokens) const {
  return contains_any(tokens, negative_, negative_index_);
}

PolarLexicon parse_lexicon(std::string_view content, const std::string& source) {
  std::vector<Phrase> positive, negative;
  std::vector<Phrase>* section = nullptr;
  std::istringstream in{std::string(content)};
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    const std::string body = line.substr(b, e - b + 1);
    if (body == "[positive]") {
      section = &positive;
    } else if (body == "[negative]") {
      section = &negative;
    } else if (body.front() == '[') {
      throw ParseError(source, n, "unknown section '" + body + "'");
    } else if (!section) {
      throw ParseError(source, n, "phrase outside a [positive]/[negative] section");
    } else {
      Phrase phrase = tokenize(body);
      if (phrase.empty()) throw ParseError(source, n, "phrase has no tokens");
      section->push_back(std::move(phrase));
    }
  }
  return PolarLexicon(std::move(positive), std::move(negative));
}

PolarLexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lexicon(buf.str(), path.string());
}

Polarity match_polarity(const Sentence& sentence, const PolarLexicon& lexicon) {
  const bool pos = lexicon.contains_positive(sentence.tokens);
  const bool neg = lexicon.contains_negative(sentence.tokens);
  if (pos && neg) return Polarity::both;
  if (pos) return Polarity::positive;
  if (neg) return Polarity::negative;
  return Polarity::none;
}

namespace {

// Uniform k-subset of [0, n) in increasing order (partial Fisher-Yates).
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

PolarSubcorpus select_polar_sentences(std::span<const Sentence> corpus, const PolarLexicon& lexicon,
                                      std::uint64_t seed) {
  PolarSubcorpus out;
  for (const Sentence& s : corpus) {
    switch (match_polarity(s, lexicon)) {
      case Polarity::positive: out.positive.push_back(s); break;
      case Polarity::negative: out.negative.push_back(s); break;
      default: break;
    }
  }
  if (out.positive.empty() || out.negative.empty()) throw Error("empty polarity class");

  auto& larger = out.positive.size() > out.negative.size() ? out.positive : out.negative;
  const std::size_t target = std::min(out.positive.size(), out.negative.size());
  if (larger.size() > target) {
    Rng rng(seed);
    std::vector<Sentence> kept;
    kept.reserve(target);
    for (const std::size_t i : sample_indices(larger.size(), target, rng)) {
      kept.push_back(std::move(larger[i]));
    }
    larger = std::move(kept);
  }
  return out;
}

EmbeddingMatrix train_ps_embeddings(const PolarSubcorpus& subcorpus, const TrainingConfig& config,
                                    TrainingStats* stats) {
  if (subcorpus.positive.empty() && subcorpus.negative.empty()) {
    throw Error("polar subcorpus is empty");
  }
  std::vector<Sentence> all;
  all.reserve(subcorpus.positive.size() + subcorpus.negative.size());
  all.insert(all.end(), subcorpus.positive.begin(), subcorpus.positive.end());
  all.insert(all.end(), subcorpus.negative.begin(), subcorpus.negative.end());
  return train_embeddings(all, config, stats);
}

}  // namespace citesent
