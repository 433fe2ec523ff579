#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scripttax::unicode {

/// Decodes UTF-8 into Unicode scalar values. Throws ParseError on
/// ill-formed input (overlong forms, surrogates, truncated sequences).
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);
std::string encode(char32_t cp);

/// Unicode White_Space property (tab, LF, NBSP, U+3000, ...).
bool is_whitespace(char32_t cp);

/// Byte offsets of every code point start, plus a final entry equal to
/// `utf8.size()`. Throws ParseError on ill-formed input.
std::vector<std::size_t> code_point_offsets(std::string_view utf8);

/// Maximal runs of non-whitespace code points, in order.
std::vector<std::string> split_whitespace(std::string_view utf8);

/// Canonical composition (NFC).
std::string normalize_nfc(std::string_view utf8);

}  // namespace scripttax::unicode
