#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scripttax/corpus.hpp"

namespace scripttax {

enum class TokenizerKind { kWordPiece, kBpe };

std::string_view to_string(TokenizerKind kind);

struct MergeRule {
  std::string left;
  std::string right;
  friend bool operator==(const MergeRule&, const MergeRule&) = default;
};

struct TokenizerOptions {
  std::string unk_token = "[UNK]";
  std::string continuation_prefix = "##";
  std::size_t max_word_chars = 100;
};

/// Declarative segmenter definition: vocabulary (id = position), optional
/// BPE merge ranks (rank = position), and unknown-token policy. Immutable
/// and validated on construction.
class TokenizerSpec {
 public:
  static TokenizerSpec wordpiece(std::string name, std::vector<std::string> vocab,
                                 TokenizerOptions options = {});
  static TokenizerSpec bpe(std::string name, std::vector<std::string> vocab,
                           std::vector<MergeRule> merges,
                           TokenizerOptions options = {});

  const std::string& name() const { return name_; }
  TokenizerKind kind() const { return kind_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  const std::vector<MergeRule>& merges() const { return merges_; }
  const std::string& unk_token() const { return options_.unk_token; }
  const std::string& continuation_prefix() const {
    return options_.continuation_prefix;
  }
  std::size_t max_word_chars() const { return options_.max_word_chars; }

  bool contains(std::string_view token) const;
  std::optional<std::uint32_t> id(std::string_view token) const;
  std::uint32_t unk_id() const { return unk_id_; }
  /// Rank of merging (left, right), if such a rule exists.
  std::optional<std::size_t> merge_rank(std::string_view left,
                                        std::string_view right) const;

  /// SHA-256 over kind, options, vocab and merges.
  std::string content_hash() const;

 private:
  TokenizerSpec() = default;
  void build_and_validate();

  std::string name_;
  TokenizerKind kind_ = TokenizerKind::kWordPiece;
  std::vector<std::string> vocab_;
  std::vector<MergeRule> merges_;
  TokenizerOptions options_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  std::unordered_map<std::string, std::size_t> ranks_;
  std::uint32_t unk_id_ = 0;
};

/// Reads a `key=value` manifest (name, kind, unk_token, continuation_prefix,
/// max_word_chars, vocab_file | bpe_file). File paths resolve relative to the
/// manifest's directory.
TokenizerSpec load_tokenizer_spec(const std::filesystem::path& manifest);

/// One token per line, id = zero-based line index.
std::vector<std::string> load_vocab_file(const std::filesystem::path& path);

struct BpeModel {
  std::vector<std::string> vocab;
  std::vector<MergeRule> merges;
};
/// `#vocab` section then `#merges` section (`left right`, rank = order).
BpeModel load_bpe_file(const std::filesystem::path& path);

/// Greedy longest-match-first. `word` must contain no whitespace.
std::vector<std::string> segment_wordpiece(const TokenizerSpec& spec,
                                           std::string_view word);
/// Lowest-rank-first merging from code points; leftmost occurrence wins.
std::vector<std::string> segment_bpe(const TokenizerSpec& spec,
                                     std::string_view word);
/// Dispatches on spec.kind().
std::vector<std::string> segment_word(const TokenizerSpec& spec,
                                      std::string_view word);

struct TokenizationResult {
  std::string sentence_id;
  Orthography orthography = Orthography::A;
  std::vector<std::string> tokens;
  std::size_t token_count = 0;
  std::size_t word_count = 0;
  std::size_t char_count = 0;
  double fertility = 0.0;
};

/// Whitespace-pretokenizes, segments every word and fills L, W, C and
/// F = L / W. No special tokens are counted.
TokenizationResult tokenize_sentence(const TokenizerSpec& spec,
                                     std::string_view text,
                                     std::string sentence_id,
                                     Orthography orthography);

/// Tokenizes one side of a corpus, preserving corpus order.
std::vector<TokenizationResult> tokenize_side(const TokenizerSpec& spec,
                                              const PairedCorpus& corpus,
                                              Orthography orthography);

}  // namespace scripttax
