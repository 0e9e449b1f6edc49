#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace citesent::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

struct Decoded {
  char32_t code_point;
  std::size_t length;  ///< bytes consumed, always >= 1
  bool valid;
};

/// Decode one code point at `pos`. Invalid sequences consume one byte.
Decoded decode(std::string_view s, std::size_t pos);

void append(std::string& out, char32_t cp);

/// Replace invalid sequences with U+FFFD; returns the number replaced.
std::size_t sanitize(std::string_view in, std::string& out);

/// Simple case mapping for ASCII, Latin-1, Greek and Cyrillic.
char32_t to_lower(char32_t cp);
bool is_upper(char32_t cp);

/// Code points that never form part of a token.
bool is_separator(char32_t cp);

}  // namespace citesent::utf8
