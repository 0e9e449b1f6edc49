#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "citesent/word2vec.hpp"
#include "text_format.hpp"

namespace citesent {

void write_embeddings(const EmbeddingMatrix& matrix, std::ostream& out) {
  std::string line;
  out << matrix.rows() << ' ' << matrix.dim() << '\n';
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    line = matrix.vocab().token(i);
    for (const float x : matrix.row(i)) {
      line.push_back(' ');
      text::append_number(line, x);
    }
    line.push_back('\n');
    out << line;
  }
}

void save_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_embeddings(matrix, out);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

EmbeddingMatrix read_embeddings(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
  const auto header = text::split_fields(line);
  if (header.size() != 2) throw ParseError(source, 1, "header must be '<vocab_size> <dim>'");
  const auto rows = text::parse_number<std::size_t>(header[0]);
  const auto dim = text::parse_number<std::size_t>(header[1]);
  if (!rows || !dim) throw ParseError(source, 1, "header must be '<vocab_size> <dim>'");
  if (*dim == 0) throw ParseError(source, 1, "dimension must be positive");

  std::vector<std::string> tokens;
  std::vector<float> values;
  std::unordered_set<std::string> seen;
  tokens.reserve(*rows);
  values.reserve(*rows * *dim);
  while (tokens.size() < *rows) {
    ++line_no;
    if (!std::getline(in, line)) {
      throw ParseError(source, line_no,
                       "unexpected end of file: header declares " + std::to_string(*rows) +
                           " vectors, found " + std::to_string(tokens.size()));
    }
    const auto fields = text::split_fields(line);
    if (fields.empty()) throw ParseError(source, line_no, "empty line");
    if (fields.size() != *dim + 1) {
      throw DimensionMismatch(source + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(*dim) + " values, found " +
                              std::to_string(fields.size() - 1));
    }
    if (!seen.emplace(fields[0]).second) {
      throw ParseError(source, line_no, "duplicate token '" + std::string(fields[0]) + "'");
    }
    tokens.emplace_back(fields[0]);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const auto v = text::parse_number<float>(fields[c]);
      if (!v) {
        throw ParseError(source, line_no, "invalid number '" + std::string(fields[c]) + "'");
      }
      values.push_back(*v);
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!text::split_fields(line).empty()) {
      throw ParseError(source, line_no,
                       "more vectors than the header declares (" + std::to_string(*rows) + ")");
    }
  }

  return EmbeddingMatrix(Vocabulary::from_ordered(std::move(tokens)), *dim, std::move(values));
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read_embeddings(in, path.string());
}

}  // namespace citesent
