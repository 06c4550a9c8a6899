#include "scholrec/text.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cstdint>
#include <cstdio>

namespace scholrec {
namespace {

void append_utf8(std::string& out, UChar32 cp) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, cp);
  out.append(buf, static_cast<std::size_t>(len));
}

bool is_punct_or_symbol(UChar32 cp) {
  const uint32_t mask = U_GET_GC_MASK(cp);
  return (mask & (U_GC_P_MASK | U_GC_S_MASK)) != 0;
}

bool is_space(UChar32 cp) { return u_isUWhiteSpace(cp) != 0; }

// Decodes one code point at offset i; malformed sequences yield a negative value.
UChar32 next_code_point(std::string_view text, int32_t& i) {
  UChar32 cp = 0;
  const auto length = static_cast<int32_t>(text.size());
  U8_NEXT(reinterpret_cast<const uint8_t*>(text.data()), i, length, cp);
  return cp;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t current_len = 0;  // in code points

  auto flush = [&] {
    if (current_len >= 2) tokens.push_back(std::move(current));
    current.clear();
    current_len = 0;
  };

  int32_t i = 0;
  const auto length = static_cast<int32_t>(text.size());
  while (i < length) {
    const auto byte = static_cast<unsigned char>(text[static_cast<std::size_t>(i)]);
    if (byte < 0x80) {
      ++i;
      if ((byte >= 'a' && byte <= 'z') || (byte >= '0' && byte <= '9')) {
        current.push_back(static_cast<char>(byte));
        ++current_len;
      } else if (byte >= 'A' && byte <= 'Z') {
        current.push_back(static_cast<char>(byte - 'A' + 'a'));
        ++current_len;
      } else {
        flush();
      }
      continue;
    }
    const UChar32 cp = next_code_point(text, i);
    if (cp < 0 || !u_isalnum(cp)) {
      flush();
      continue;
    }
    append_utf8(current, u_tolower(cp));
    ++current_len;
  }
  flush();
  return tokens;
}

std::string normalize_title(std::string_view title) {
  std::string out;
  out.reserve(title.size());
  bool pending_space = false;

  int32_t i = 0;
  const auto length = static_cast<int32_t>(title.size());
  while (i < length) {
    const UChar32 cp = next_code_point(title, i);
    if (cp < 0 || is_space(cp) || is_punct_or_symbol(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    append_utf8(out, u_tolower(cp));
  }
  return out;
}

std::string_view trim(std::string_view text) {
  const auto length = static_cast<int32_t>(text.size());
  int32_t first = -1;
  int32_t end = 0;
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    const UChar32 cp = next_code_point(text, i);
    if (cp >= 0 && is_space(cp)) continue;
    if (first < 0) first = start;
    end = i;
  }
  if (first < 0) return {};
  return text.substr(static_cast<std::size_t>(first), static_cast<std::size_t>(end - first));
}

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string fnv1a_hex(std::string_view bytes) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf, 16);
}

}  // namespace scholrec
