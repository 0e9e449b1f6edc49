#include "citesent/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <future>
#include <sstream>

#include "citesent/error.hpp"
#include "utf8.hpp"

namespace citesent {
namespace {

// Lowercase forms, each including the trailing period.
constexpr std::array<std::string_view, 52> kAbbreviations = {
    "al.",    "e.g.",  "i.e.",   "cf.",   "vs.",    "viz.",  "fig.",  "figs.",
    "eq.",    "eqs.",  "sec.",   "secs.", "sect.",  "tab.",  "ch.",   "chap.",
    "app.",   "ref.",  "refs.",  "no.",   "nos.",   "nr.",   "vol.",  "vols.",
    "pp.",    "p.",    "ed.",    "eds.",  "proc.",  "conf.", "int.",  "dept.",
    "univ.",  "dr.",   "mr.",    "mrs.",  "ms.",    "prof.", "jr.",   "sr.",
    "st.",    "inc.",  "ltd.",   "co.",   "corp.",  "approx.", "resp.", "ca.",
    "u.s.",   "a.k.a.", "def.",  "thm.",
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

// Closing quote/bracket at pos: returns byte length or 0.
std::size_t closer_length(std::string_view s, std::size_t pos) {
  const char c = s[pos];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  if (s.substr(pos, 3) == "’" || s.substr(pos, 3) == "”") return 3;
  return 0;
}

std::size_t opener_length(std::string_view s, std::size_t pos) {
  const char c = s[pos];
  if (c == '"' || c == '\'' || c == '(' || c == '[') return 1;
  if (s.substr(pos, 3) == "‘" || s.substr(pos, 3) == "“") return 3;
  return 0;
}

bool starts_sentence(std::string_view s, std::size_t pos) {
  if (const std::size_t open = opener_length(s, pos); open != 0 && pos + open < s.size()) {
    pos += open;
  }
  const utf8::Decoded d = utf8::decode(s, pos);
  return (d.code_point >= '0' && d.code_point <= '9') || utf8::is_upper(d.code_point);
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

// Word ending at (and including) position `dot`, without leading openers.
std::string_view word_ending_at(std::string_view s, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_space(s[b - 1])) --b;
  while (b < dot && opener_length(s, b) != 0) b += opener_length(s, b);
  return s.substr(b, dot + 1 - b);
}

}  // namespace

bool is_abbreviation(std::string_view word) {
  if (word.size() == 2 && word[0] >= 'A' && word[0] <= 'Z' && word[1] == '.') return true;
  std::string lower(word);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; });
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end();
}

SegmentedText segment_sentences(std::string_view text) {
  SegmentedText result;
  std::string clean;
  result.invalid_sequences = utf8::sanitize(text, clean);
  const std::string_view s = clean;

  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    if (const auto piece = trim(s.substr(start, end - start)); !piece.empty()) {
      result.sentences.emplace_back(piece);
    }
    start = end;
  };

  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!is_terminal(s[i])) continue;
    const std::size_t run_start = i;
    std::size_t run_end = i;
    while (run_end < s.size() && is_terminal(s[run_end])) ++run_end;
    std::size_t end = run_end;
    while (end < s.size()) {
      const std::size_t n = closer_length(s, end);
      if (n == 0) break;
      end += n;
    }
    i = end - 1;

    if (end >= s.size() || !is_space(s[end])) continue;
    std::size_t next = end;
    while (next < s.size() && is_space(s[next])) ++next;
    if (next >= s.size() || !starts_sentence(s, next)) continue;
    // A lone period may terminate an abbreviation rather than the sentence.
    if (run_end - run_start == 1 && s[run_start] == '.' &&
        is_abbreviation(word_ending_at(s, run_start))) {
      continue;
    }
    emit(end);
  }
  emit(s.size());
  return result;
}

std::vector<std::string> tokenize(std::string_view sentence_text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t pos = 0; pos < sentence_text.size();) {
    const utf8::Decoded d = utf8::decode(sentence_text, pos);
    pos += d.length;
    if (!d.valid || utf8::is_separator(d.code_point)) {
      flush();
      continue;
    }
    utf8::append(current, utf8::to_lower(d.code_point));
  }
  flush();
  return tokens;
}

std::vector<Sentence> filter_short(std::span<const Sentence> sentences, std::size_t min_tokens) {
  std::vector<Sentence> kept;
  kept.reserve(sentences.size());
  for (const Sentence& s : sentences) {
    if (s.tokens.size() >= min_tokens) kept.push_back(s);
  }
  return kept;
}

Vocabulary Vocabulary::from_ordered(std::vector<std::string> tokens,
                                    std::vector<std::uint64_t> counts,
                                    std::uint64_t min_count) {
  if (counts.empty()) counts.assign(tokens.size(), min_count);
  if (counts.size() != tokens.size()) {
    throw Error("vocabulary: token and count lists differ in length");
  }
  Vocabulary v;
  v.min_count_ = min_count;
  v.token_to_index_.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].empty()) throw Error("vocabulary: empty token");
    if (!v.token_to_index_.emplace(tokens[i], i).second) {
      throw Error("vocabulary: duplicate token '" + tokens[i] + "'");
    }
    v.total_count_ += counts[i];
  }
  v.index_to_token_ = std::move(tokens);
  v.counts_ = std::move(counts);
  return v;
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
  if (auto it = token_to_index_.find(token); it != token_to_index_.end()) return it->second;
  return std::nullopt;
}

Vocabulary build_vocabulary(std::span<const Sentence> sentences, std::uint64_t min_count) {
  if (min_count < 1) throw Error("min_count must be >= 1");
  std::unordered_map<std::string_view, std::uint64_t> freq;
  for (const Sentence& s : sentences) {
    for (const std::string& t : s.tokens) ++freq[t];
  }
  std::vector<std::pair<std::string_view, std::uint64_t>> kept;
  for (const auto& [token, count] : freq) {
    if (count >= min_count) kept.emplace_back(token, count);
  }
  if (kept.empty()) throw Error("empty vocabulary");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  tokens.reserve(kept.size());
  counts.reserve(kept.size());
  for (const auto& [token, count] : kept) {
    tokens.emplace_back(token);
    counts.push_back(count);
  }
  return Vocabulary::from_ordered(std::move(tokens), std::move(counts), min_count);
}

// ---------------------------------------------------------------------------

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

struct DocumentResult {
  std::vector<Sentence> sentences;
  std::size_t segmented = 0;
  std::size_t invalid = 0;
};

DocumentResult process_document(const RawDocument& doc, std::size_t min_tokens) {
  DocumentResult r;
  SegmentedText seg = segment_sentences(doc.text);
  r.segmented = seg.sentences.size();
  r.invalid = seg.invalid_sequences;
  for (std::size_t i = 0; i < seg.sentences.size(); ++i) {
    auto tokens = tokenize(seg.sentences[i]);
    if (tokens.size() >= min_tokens && !tokens.empty()) {
      r.sentences.push_back(Sentence{doc.doc_id, i, std::move(tokens)});
    }
  }
  return r;
}

}  // namespace

std::vector<RawDocument> load_corpus(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<RawDocument> docs;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) docs.push_back({f.filename().string(), read_file(f)});
    if (docs.empty()) throw Error("corpus directory '" + path.string() + "' contains no files");
  } else if (fs::is_regular_file(path)) {
    std::istringstream in(read_file(path));
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
      if (trim(line).empty()) continue;
      docs.push_back({std::to_string(n), line});
    }
  } else {
    throw Error("corpus path '" + path.string() + "' does not exist");
  }
  return docs;
}

std::vector<Sentence> preprocess_documents(std::span<const RawDocument> documents,
                                           std::size_t min_tokens, unsigned workers,
                                           PreprocessStats* stats) {
  std::vector<DocumentResult> results(documents.size());
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(documents.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < documents.size(); ++i) {
      results[i] = process_document(documents[i], min_tokens);
    }
  } else {
    std::vector<std::future<void>> tasks;
    for (unsigned w = 0; w < workers; ++w) {
      tasks.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < documents.size(); i += workers) {
          results[i] = process_document(documents[i], min_tokens);
        }
      }));
    }
    for (auto& t : tasks) t.get();
  }

  std::vector<Sentence> out;
  PreprocessStats local;
  local.documents = documents.size();
  for (auto& r : results) {
    local.segmented += r.segmented;
    local.invalid_sequences += r.invalid;
    for (auto& s : r.sentences) out.push_back(std::move(s));
  }
  local.kept = out.size();
  if (stats) *stats = local;
  return out;
}

void write_sentences(const std::filesystem::path& path, std::span<const Sentence> sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  for (const Sentence& s : sentences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (i) out << ' ';
      out << s.tokens[i];
    }
    out << '\n';
  }
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::vector<Sentence> read_sentences(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  const std::string doc_id = path.filename().string();
  std::vector<Sentence> out;
  std::istringstream in(content);
  std::string line;
  for (std::size_t n = 0; std::getline(in, line); ++n) {
    Sentence s{doc_id, n, {}};
    std::istringstream words(line);
    for (std::string w; words >> w;) s.tokens.push_back(std::move(w));
    if (!s.tokens.empty()) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace citesent
