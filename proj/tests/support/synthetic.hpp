#pragma once

// Paired corpora with a known relationship between the two sides: side B is
// a letter-for-letter transliteration of side A into Greek.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "scripttax/converter.hpp"
#include "scripttax/corpus.hpp"
#include "scripttax/tokenizers.hpp"

namespace scripttax::synthetic {

inline const std::vector<std::string>& latin_letters() {
  static const std::vector<std::string> v = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "k"};
  return v;
}
inline const std::vector<std::string>& greek_letters() {
  static const std::vector<std::string> v = {"α", "β", "γ", "δ", "ε", "ζ", "η", "θ", "ι", "κ"};
  return v;
}

inline std::vector<MappingRule> latin_to_greek_rules() {
  std::vector<MappingRule> rules;
  for (std::size_t i = 0; i < latin_letters().size(); ++i) {
    rules.push_back({latin_letters()[i], greek_letters()[i]});
  }
  return rules;
}

inline std::vector<MappingRule> greek_to_latin_rules() {
  std::vector<MappingRule> rules;
  for (const auto& r : latin_to_greek_rules()) rules.push_back({r.target, r.source});
  return rules;
}

/// `count` distinct Latin words of 3..7 letters.
inline std::vector<std::string> word_list(std::size_t count, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::vector<std::string> words;
  while (words.size() < count) {
    std::string w;
    const std::size_t len = 3 + rng() % 5;
    for (std::size_t i = 0; i < len; ++i) w += latin_letters()[rng() % latin_letters().size()];
    if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
  }
  return words;
}

/// Side A: random sentences over `words`; side B: transliteration of A.
inline PairedCorpus transliterated_corpus(const std::vector<std::string>& words,
                                          std::size_t sentences, std::size_t min_words,
                                          std::size_t max_words, std::uint32_t seed) {
  const MappingTable fwd("latin-greek", latin_to_greek_rules());
  std::mt19937 rng(seed);
  std::vector<SentencePair> pairs;
  for (std::size_t s = 0; s < sentences; ++s) {
    const std::size_t n = min_words + rng() % (max_words - min_words + 1);
    std::string a;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) a += ' ';
      a += words[rng() % words.size()];
    }
    pairs.push_back({"s" + std::to_string(s), a, apply_mapping(fwd, a)});
  }
  return PairedCorpus(std::move(pairs), "latin", "greek");
}

/// Whole Latin words plus single Greek letters (word-initial and
/// continuation), so side A tokenizes one token per word and side B one
/// token per letter.
inline TokenizerSpec split_vocab_tokenizer(const std::vector<std::string>& words) {
  std::vector<std::string> vocab = {"[UNK]"};
  vocab.insert(vocab.end(), words.begin(), words.end());
  for (const auto& g : greek_letters()) {
    vocab.push_back(g);
    vocab.push_back("##" + g);
  }
  return TokenizerSpec::wordpiece("split-vocab", vocab);
}

}  // namespace scripttax::synthetic
