#include "scripttax/unicode.hpp"

#include <gtest/gtest.h>

#include "scripttax/digest.hpp"
#include "scripttax/errors.hpp"

namespace scripttax {
namespace {

TEST(Unicode, DecodeEncodeRoundTrip) {
  const std::string text = "a\xC3\xA1\xE0\xA4\x95\xF0\x9F\x98\x80";  // a á क 😀
  const auto cps = unicode::decode(text);
  ASSERT_EQ(cps.size(), 4u);
  EXPECT_EQ(cps[1], U'á');
  EXPECT_EQ(cps[3], U'\U0001F600');
  EXPECT_EQ(unicode::encode(cps), text);
}

TEST(Unicode, RejectsIllFormedUtf8) {
  EXPECT_THROW(unicode::decode("\xC3"), ParseError);          // truncated
  EXPECT_THROW(unicode::decode("\xC0\xAF"), ParseError);      // overlong
  EXPECT_THROW(unicode::decode("\xED\xA0\x80"), ParseError);  // surrogate
}

TEST(Unicode, WhitespaceProperty) {
  for (char32_t cp : {U' ', U'\t', U'\n', U' ', U' ', U'　', U'\u0085'}) {
    EXPECT_TRUE(unicode::is_whitespace(cp)) << static_cast<unsigned>(cp);
  }
  for (char32_t cp : {U'a', U'​', U'क', U'_'}) {
    EXPECT_FALSE(unicode::is_whitespace(cp)) << static_cast<unsigned>(cp);
  }
}

TEST(Unicode, SplitWhitespace) {
  EXPECT_EQ(unicode::split_whitespace("  a  b\tc\xC2\xA0" "d "),
            (std::vector<std::string>{"a", "b", "c", "d"}));
  EXPECT_TRUE(unicode::split_whitespace(" \t ").empty());
}

TEST(Unicode, NfcComposesCombiningMarks) {
  EXPECT_EQ(unicode::normalize_nfc("a\xCC\x81"), "\xC3\xA1");
  EXPECT_EQ(unicode::normalize_nfc("plain"), "plain");
}

TEST(Digest, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace scripttax
