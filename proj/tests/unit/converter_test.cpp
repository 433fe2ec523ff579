#include "scripttax/converter.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "scripttax/errors.hpp"
#include "test_util.hpp"

namespace scripttax {
namespace {

TEST(LoadMapping, ParsesRulesInOrder) {
  testing::TempDir dir;
  const auto p = dir.write("a2b.tsv", "# comment\nkh\tx\nsh\ts\n\na\t\xC3\xA4\n");
  const auto t = load_mapping(p);
  ASSERT_EQ(t.rules().size(), 3u);
  EXPECT_EQ(t.rules()[0].source, "kh");
  EXPECT_EQ(t.rules()[2].target, "\xC3\xA4");
  EXPECT_EQ(t.default_policy(), DefaultPolicy::kCopy);
  EXPECT_EQ(t.direction_label(), "a2b");
}

TEST(LoadMapping, Errors) {
  testing::TempDir dir;
  try {
    load_mapping(dir.write("dup.tsv", "kh\tx\na\tb\nkh\ty\n"));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("lines 1 and 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_mapping(dir.write("empty_src.tsv", "\tx\n")), ValidationError);
  EXPECT_THROW(load_mapping(dir.write("notab.tsv", "abc\n")), ParseError);
  EXPECT_THROW(load_mapping(dir.write("ws.tsv", "a b\tx\n")), ValidationError);
  EXPECT_THROW(load_mapping(dir.path() / "missing.tsv"), IoError);
}

TEST(LoadMapping, EmptyFileIsIdentity) {
  testing::TempDir dir;
  const auto t = load_mapping(dir.write("e.tsv", ""));
  EXPECT_TRUE(t.rules().empty());
  EXPECT_EQ(apply_mapping(t, "any text á"), "any text á");
}

TEST(ApplyMapping, LongestMatchWins) {
  const MappingTable t("t", {{"a", "1"}, {"ab", "2"}});
  EXPECT_EQ(apply_mapping(t, "aba"), "21");
  EXPECT_EQ(apply_mapping(t, "ab"), "2");
}

TEST(ApplyMapping, DeletionRule) {
  const MappingTable t("t", {{"x", ""}});
  EXPECT_EQ(apply_mapping(t, "axa"), "aa");
}

TEST(ApplyMapping, DefaultPolicies) {
  const MappingTable copy("t", {{"a", "b"}}, DefaultPolicy::kCopy);
  const MappingTable drop("t", {{"a", "b"}}, DefaultPolicy::kDrop);
  EXPECT_EQ(apply_mapping(copy, "a?a"), "b?b");
  EXPECT_EQ(apply_mapping(drop, "a?a"), "bb");
}

TEST(ApplyMapping, WhitespaceAlwaysCopied) {
  const MappingTable drop("t", {{"a", "b"}}, DefaultPolicy::kDrop);
  EXPECT_EQ(apply_mapping(drop, "a a\ta\xC2\xA0z"), "b b\tb\xC2\xA0");
}

TEST(ApplyMapping, MultiByteSources) {
  const MappingTable t("t", {{"\xE0\xA4\x95", "k"}, {"\xE0\xA4\x95\xE0\xA5\x8D", "k-"}});
  EXPECT_EQ(apply_mapping(t, "\xE0\xA4\x95\xE0\xA5\x8D\xE0\xA4\x95"), "k-k");
}

TEST(RoundTrip, ExactInverse) {
  const MappingTable fwd("f", {{"a", "b"}});
  const MappingTable bwd("b", {{"b", "a"}});
  EXPECT_EQ(round_trip(fwd, bwd, "aa"), "aa");
}

TEST(RoundTrip, ManyToOneCollapses) {
  const MappingTable fwd("f", {{"a", "b"}, {"\xC3\xA1", "b"}});
  const MappingTable bwd("b", {{"b", "a"}});
  EXPECT_EQ(round_trip(fwd, bwd, "\xC3\xA1"), "a");
}

TEST(RoundTrip, EmptyTablesAreIdentity) {
  const MappingTable e("e", {});
  EXPECT_EQ(round_trip(e, e, "abc def"), "abc def");
}

// Prefix-free code from single letters {a..e} to two-letter codes over a
// disjoint alphabet; the rule-wise inverse must restore the input.
TEST(RoundTripProperty, PrefixFreeInverseIsIdentity) {
  std::mt19937 rng(4242);
  const std::string src = "abcde";
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<std::string> codes;
    std::set<std::string> used;
    std::uniform_int_distribution<int> up(0, 3);
    while (codes.size() < src.size()) {
      std::string c = {static_cast<char>('V' + up(rng)), static_cast<char>('V' + up(rng)),
                       static_cast<char>('V' + up(rng))};
      if (used.insert(c).second) codes.push_back(c);
    }
    std::vector<MappingRule> f, b;
    for (std::size_t i = 0; i < src.size(); ++i) {
      f.push_back({std::string(1, src[i]), codes[i]});
      b.push_back({codes[i], std::string(1, src[i])});
    }
    const MappingTable fwd("f", f), bwd("b", b);
    std::uniform_int_distribution<int> pick(0, 5), len(1, 20);
    std::string text;
    for (int l = len(rng); l > 0; --l) {
      const int k = pick(rng);
      text += k == 5 ? ' ' : src[static_cast<std::size_t>(k)];
    }
    EXPECT_EQ(round_trip(fwd, bwd, text), text);
  }
}

}  // namespace
}  // namespace scripttax
