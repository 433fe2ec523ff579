#include "scripttax/corpus.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "scripttax/errors.hpp"
#include "scripttax/unicode.hpp"
#include "test_util.hpp"

namespace scripttax {
namespace {

PairedCorpus parse(const std::string& text, CorpusFormat f = CorpusFormat::kTsv) {
  std::istringstream in(text);
  return parse_paired_corpus(in, f);
}

TEST(Corpus, LoadsTwoRowTsv) {
  testing::TempDir dir;
  auto path = dir.write("c.tsv", "s1\tthe cat\tdha kat\ns2\ta dog\tu dog\n");
  const auto c = load_paired_corpus(path, CorpusFormat::kTsv);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].id, "s1");
  EXPECT_EQ(c[1].text_b, "u dog");
  EXPECT_EQ(c.label_a(), "A");
}

TEST(Corpus, WrongColumnCountNamesLine) {
  try {
    parse("s1\ta\tb\ns2\tonly-two\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(Corpus, DuplicateIdCitesBothLines) {
  try {
    parse("s1\ta\tb\ns2\ta\tb\ns3\ta\tb\ns4\ta\tb\ns1\tc\td\n");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("lines 1 and 5"), std::string::npos) << e.what();
  }
}

TEST(Corpus, EmptySideRejected) {
  EXPECT_THROW(parse("s1\t   \tb\n"), ValidationError);
  EXPECT_THROW(parse("s1\ta\t\n"), ValidationError);
}

TEST(Corpus, ReportsEveryRejectedLine) {
  try {
    parse("s1\ta\tb\nbad\ns2\ta\tb\nalso bad\n");
    FAIL();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 2"), std::string::npos);
    EXPECT_NE(msg.find("line 4"), std::string::npos);
  }
}

TEST(Corpus, EmptyFileRejected) { EXPECT_THROW(parse(""), ValidationError); }

TEST(Corpus, MissingFileIsIoError) {
  EXPECT_THROW(load_paired_corpus("/nonexistent/c.tsv", CorpusFormat::kTsv), IoError);
}

TEST(Corpus, RecordsFormat) {
  const auto c = parse(R"({"id":"s1","text_a":"x y","text_b":"z"})"
                       "\n"
                       R"({"id":"s2","text_a":"tab\there","text_b":"q"})"
                       "\n",
                       CorpusFormat::kRecords);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1].text_a, "tab\there");
  EXPECT_THROW(parse(R"({"id":"s1","text_a":"x"})", CorpusFormat::kRecords), ParseError);
  EXPECT_THROW(parse("not json", CorpusFormat::kRecords), ParseError);
}

TEST(Corpus, NfcOptionComposesBeforeCounting) {
  std::istringstream in("s1\ta\xCC\x81\tb\n");
  const auto raw = parse("s1\ta\xCC\x81\tb\n");
  const auto nfc = parse_paired_corpus(in, CorpusFormat::kTsv, {.normalize_nfc = true});
  EXPECT_EQ(count_chars(raw[0].text_a), 2u);
  EXPECT_EQ(count_chars(nfc[0].text_a), 1u);
  EXPECT_TRUE(nfc.nfc_applied());
  EXPECT_FALSE(raw.nfc_applied());
}

TEST(CountWords, Examples) {
  EXPECT_EQ(count_words("the unbelievable"), 2u);
  EXPECT_EQ(count_words("a  b\tc"), 3u);
  EXPECT_EQ(count_words(""), 0u);
  EXPECT_EQ(count_words("a\xC2\xA0" "b"), 2u);  // NBSP separates
}

TEST(CountChars, Examples) {
  EXPECT_EQ(count_chars("the unbelievable"), 15u);
  EXPECT_EQ(count_chars("a b c"), 3u);
  EXPECT_EQ(count_chars(""), 0u);
  EXPECT_EQ(count_chars("\xE0\xA4\x95\xE0\xA4\xBF \xE0\xA4\xB5"), 3u);  // कि व
  EXPECT_EQ(count_chars("x\xE3\x80\x80y\t"), 2u);                      // ideographic space
}

// Random strings over a small alphabet mixing letters and several
// whitespace classes.
std::string random_text(std::mt19937& rng) {
  static const std::vector<std::string> pieces = {"a", "b", "\xC3\xA1", " ", "  ", "\t",
                                                  "\xC2\xA0", "\xE0\xA4\x95", "\n"};
  std::uniform_int_distribution<std::size_t> len(0, 12), pick(0, pieces.size() - 1);
  std::string s;
  for (std::size_t i = len(rng); i > 0; --i) s += pieces[pick(rng)];
  return s;
}

TEST(CountProperties, CharsBoundedAndWordsInvariantUnderWhitespace) {
  std::mt19937 rng(7);
  for (int iter = 0; iter < 2000; ++iter) {
    const std::string t = random_text(rng);
    EXPECT_LE(count_chars(t), unicode::decode(t).size());
    std::string doubled;
    for (char c : t) {
      doubled += c;
      if (c == ' ' || c == '\t') doubled += c;
    }
    EXPECT_EQ(count_words(doubled), count_words(t));
    EXPECT_EQ(count_words("  \t" + t + "\xC2\xA0 "), count_words(t));
  }
}

TEST(Corpus, SerializeReloadRoundTrip) {
  std::mt19937 rng(11);
  for (auto fmt : {CorpusFormat::kTsv, CorpusFormat::kRecords}) {
    std::vector<SentencePair> pairs;
    for (int i = 0; i < 50; ++i) {
      std::string a, b;
      while (count_words(a) == 0) a = random_text(rng);
      while (count_words(b) == 0) b = random_text(rng);
      if (fmt == CorpusFormat::kTsv) {
        for (auto* s : {&a, &b}) std::erase_if(*s, [](char c) { return c == '\t' || c == '\n'; });
        if (count_words(a) == 0) a = "x";
        if (count_words(b) == 0) b = "y";
      }
      pairs.push_back({"id" + std::to_string(i), a, b});
    }
    const PairedCorpus original(pairs);
    std::stringstream buf;
    write_paired_corpus(original, buf, fmt);
    const auto reloaded = parse_paired_corpus(buf, fmt);
    EXPECT_EQ(reloaded, original);
    EXPECT_EQ(reloaded.content_hash(), original.content_hash());
  }
}

TEST(Corpus, TsvWriterRejectsEmbeddedTabs) {
  const PairedCorpus c({{"s1", "a\tb", "c"}});
  std::ostringstream out;
  EXPECT_THROW(write_paired_corpus(c, out, CorpusFormat::kTsv), ValidationError);
}

TEST(Corpus, ContentHashSeesTextChanges) {
  const PairedCorpus a({{"s1", "ab", "c"}});
  const PairedCorpus b({{"s1", "a", "bc"}});
  EXPECT_NE(a.content_hash(), b.content_hash());
}

}  // namespace
}  // namespace scripttax
