#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace scholrec {

// Lowercases, splits on every non-alphanumeric code point and drops tokens
// shorter than two code points. Invalid UTF-8 bytes act as separators.
std::vector<std::string> tokenize(std::string_view text);

// Canonical key for titles and author names: lowercase, punctuation and
// symbols become spaces, whitespace runs collapse, ends trimmed.
std::string normalize_title(std::string_view title);

// Trims ASCII and Unicode whitespace from both ends.
std::string_view trim(std::string_view text);

// ASCII-only lowercase; used for DOIs and enum-like keys.
std::string ascii_lower(std::string_view text);

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace scholrec
