#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace citesent {

struct RawDocument {
  std::string doc_id;
  std::string text;
};

/// A tokenized sentence and where it came from in its document.
struct Sentence {
  std::string doc_id;
  std::size_t index = 0;
  std::vector<std::string> tokens;

  bool operator==(const Sentence&) const = default;
};

struct SegmentedText {
  std::vector<std::string> sentences;
  /// Number of invalid UTF-8 sequences replaced with U+FFFD.
  std::size_t invalid_sequences = 0;
};

/// Split raw text into sentences.
///
/// A boundary is placed after a run of '.', '!' or '?' (optionally followed by
/// closing quotes or brackets) when the next non-space character is an
/// uppercase letter or a digit, possibly behind an opening quote or bracket.
/// A '.' never ends a sentence when the word it terminates is a known
/// abbreviation ("et al.", "e.g.", "Fig.", ...) or a single capital initial.
/// Returned sentences are trimmed and never empty.
SegmentedText segment_sentences(std::string_view text);

/// True when `word` (including its trailing '.') is on the built-in
/// abbreviation list or is a single-letter initial such as "J.".
bool is_abbreviation(std::string_view word);

/// Lowercase and split on whitespace and punctuation. Hyphens and apostrophes
/// separate tokens, digits are kept, punctuation-only fragments are dropped.
std::vector<std::string> tokenize(std::string_view sentence_text);

/// Keep sentences with at least `min_tokens` tokens, preserving order.
std::vector<Sentence> filter_short(std::span<const Sentence> sentences,
                                   std::size_t min_tokens = 3);

/// Token <-> index mapping with corpus counts. Indices are dense and ordered
/// by descending count, ties broken lexicographically.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Build from an explicit ordered token list (e.g. a loaded embedding file).
  /// Throws on duplicate or empty tokens.
  static Vocabulary from_ordered(std::vector<std::string> tokens,
                                 std::vector<std::uint64_t> counts = {},
                                 std::uint64_t min_count = 1);

  std::size_t size() const noexcept { return index_to_token_.size(); }
  bool empty() const noexcept { return index_to_token_.empty(); }

  std::optional<std::size_t> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }

  const std::string& token(std::size_t index) const { return index_to_token_.at(index); }
  std::uint64_t count(std::size_t index) const { return counts_.at(index); }
  std::uint64_t min_count() const noexcept { return min_count_; }
  std::uint64_t total_count() const noexcept { return total_count_; }

  const std::vector<std::string>& tokens() const noexcept { return index_to_token_; }
  const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> token_to_index_;
  std::vector<std::string> index_to_token_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t min_count_ = 1;
  std::uint64_t total_count_ = 0;
};

/// Throws citesent::Error("empty vocabulary") when nothing reaches min_count.
Vocabulary build_vocabulary(std::span<const Sentence> sentences, std::uint64_t min_count);

// ---------------------------------------------------------------------------
// Corpus files

/// A directory is read as one document per regular file (doc_id = filename,
/// files in lexicographic order). A regular file is read as one document per
/// non-blank line (doc_id = 1-based line number).
std::vector<RawDocument> load_corpus(const std::filesystem::path& path);

struct PreprocessStats {
  std::size_t documents = 0;
  std::size_t segmented = 0;  ///< sentences before the length filter
  std::size_t kept = 0;
  std::size_t invalid_sequences = 0;
};

/// segment -> tokenize -> filter_short over all documents. Documents are
/// processed on up to `workers` threads and merged in (document, index) order.
std::vector<Sentence> preprocess_documents(std::span<const RawDocument> documents,
                                           std::size_t min_tokens = 3,
                                           unsigned workers = 1,
                                           PreprocessStats* stats = nullptr);

/// One sentence per line, tokens separated by single spaces, LF endings.
void write_sentences(const std::filesystem::path& path, std::span<const Sentence> sentences);

/// Inverse of write_sentences. doc_id is the file name, index the 0-based line.
/// Blank lines are skipped.
std::vector<Sentence> read_sentences(const std::filesystem::path& path);

}  // namespace citesent
