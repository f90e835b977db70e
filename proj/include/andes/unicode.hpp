#pragma once

// UTF-8 helpers and thin wrappers over ICU for the Unicode operations the
// normalizers, filters and metrics share.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <unicode/errorcode.h>
#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "andes/error.hpp"

namespace andes::unicode {

enum class Form { NFC, NFKC };

/// Byte offset of the first ill-formed UTF-8 sequence, if any.
inline std::optional<std::size_t> find_invalid_utf8(std::string_view bytes) {
  const auto* s = reinterpret_cast<const uint8_t*>(bytes.data());
  const auto length = static_cast<int32_t>(bytes.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) return static_cast<std::size_t>(start);
  }
  return std::nullopt;
}

/// Decodes UTF-8 into code points; ill-formed sequences become U+FFFD.
inline std::u32string decode(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  const auto* s = reinterpret_cast<const uint8_t*>(bytes.data());
  const auto length = static_cast<int32_t>(bytes.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
  }
  return out;
}

inline void append_utf8(std::string& out, char32_t c) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
  if (error) {
    U8_APPEND_UNSAFE(buf, n, 0xFFFD);
  }
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

inline std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) append_utf8(out, c);
  return out;
}

inline std::string encode(char32_t c) {
  std::string out;
  append_utf8(out, c);
  return out;
}

inline bool is_letter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }

inline bool is_mark(char32_t c) {
  return (U_GET_GC_MASK(static_cast<UChar32>(c)) & U_GC_M_MASK) != 0;
}

inline bool is_digit(char32_t c) { return u_isdigit(static_cast<UChar32>(c)); }

inline bool is_alphanumeric(char32_t c) {
  return u_hasBinaryProperty(static_cast<UChar32>(c), UCHAR_ALPHABETIC) || is_digit(c);
}

inline bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

inline bool is_upper(char32_t c) {
  return u_hasBinaryProperty(static_cast<UChar32>(c), UCHAR_UPPERCASE);
}

/// The whitespace set used by Python's str.split(), which the chrF++
/// reference implementation relies on. It differs from Unicode White_Space
/// in a few control characters (U+001C..U+001F count, U+180E does not).
inline bool is_python_space(char32_t c) {
  switch (c) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x1C: case 0x1D: case 0x1E: case 0x1F: case 0x20:
    case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

namespace detail {

inline icu::UnicodeString to_icu(std::string_view s) {
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
}

inline std::string from_icu(const icu::UnicodeString& s) {
  std::string out;
  s.toUTF8String(out);
  return out;
}

}  // namespace detail

inline std::string normalize_form(std::string_view text, Form form) {
  icu::ErrorCode status;
  const icu::Normalizer2* normalizer = form == Form::NFKC
                                           ? icu::Normalizer2::getNFKCInstance(status)
                                           : icu::Normalizer2::getNFCInstance(status);
  if (status.isFailure()) {
    throw Error(std::string("ICU normalizer unavailable: ") + status.errorName());
  }
  icu::UnicodeString result = normalizer->normalize(detail::to_icu(text), status);
  if (status.isFailure()) {
    throw Error(std::string("ICU normalization failed: ") + status.errorName());
  }
  return detail::from_icu(result);
}

/// Locale-independent (root) full lowercase mapping.
inline std::string to_lower(std::string_view text) {
  icu::UnicodeString s = detail::to_icu(text);
  s.toLower(icu::Locale::getRoot());
  return detail::from_icu(s);
}

/// Number of maximal runs of non-whitespace code points.
inline std::size_t count_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (char32_t c : decode(text)) {
    if (is_space(c)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++count;
    }
  }
  return count;
}

/// Splits on single U+0020 separators. Intended for text that has already
/// been whitespace-canonicalized.
inline std::vector<std::string> split_spaces(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find(' ', start);
    const std::size_t stop = end == std::string_view::npos ? text.size() : end;
    if (stop > start) tokens.emplace_back(text.substr(start, stop - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return tokens;
}

inline std::string join_spaces(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

/// ASCII-only case folding, for matching fixed markers such as URL prefixes.
inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return out;
}

}  // namespace andes::unicode
