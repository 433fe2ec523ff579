#include "scripttax/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "scripttax/errors.hpp"

namespace scripttax::unicode {

namespace {

// Walks `utf8`, calling fn(offset, cp) for each scalar value.
template <typename Fn>
void for_each_code_point(std::string_view utf8, Fn&& fn) {
  const auto* s = reinterpret_cast<const std::uint8_t*>(utf8.data());
  const auto length = static_cast<std::int32_t>(utf8.size());
  std::int32_t i = 0;
  while (i < length) {
    const std::int32_t start = i;
    UChar32 cp = 0;
    U8_NEXT(s, i, length, cp);
    if (cp < 0) {
      throw ParseError("invalid UTF-8 at byte offset " + std::to_string(start));
    }
    fn(static_cast<std::size_t>(start), static_cast<char32_t>(cp));
  }
}

}  // namespace

std::u32string decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  for_each_code_point(utf8, [&](std::size_t, char32_t cp) { out.push_back(cp); });
  return out;
}

std::string encode(char32_t cp) {
  char buf[U8_MAX_LENGTH];
  std::int32_t n = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<std::uint8_t*>(buf), n, U8_MAX_LENGTH,
            static_cast<UChar32>(cp), error);
  if (error) throw ParseError("code point not encodable as UTF-8");
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) out += encode(cp);
  return out;
}

bool is_whitespace(char32_t cp) {
  return u_isUWhiteSpace(static_cast<UChar32>(cp));
}

std::vector<std::size_t> code_point_offsets(std::string_view utf8) {
  std::vector<std::size_t> offsets;
  offsets.reserve(utf8.size() + 1);
  for_each_code_point(utf8,
                      [&](std::size_t off, char32_t) { offsets.push_back(off); });
  offsets.push_back(utf8.size());
  return offsets;
}

std::vector<std::string> split_whitespace(std::string_view utf8) {
  std::vector<std::string> words;
  std::size_t run_start = 0;
  bool in_run = false;
  for_each_code_point(utf8, [&](std::size_t off, char32_t cp) {
    if (is_whitespace(cp)) {
      if (in_run) words.emplace_back(utf8.substr(run_start, off - run_start));
      in_run = false;
    } else if (!in_run) {
      run_start = off;
      in_run = true;
    }
  });
  if (in_run) words.emplace_back(utf8.substr(run_start));
  return words;
}

std::string normalize_nfc(std::string_view utf8) {
  // Validate first so ICU never silently substitutes U+FFFD.
  decode(utf8);
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw InvariantError("ICU NFC normalizer unavailable");
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<std::int32_t>(utf8.size())));
  icu::UnicodeString out = nfc->normalize(in, status);
  if (U_FAILURE(status)) throw InvariantError("ICU NFC normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

}  // namespace scripttax::unicode
