#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scripttax/corpus.hpp"
#include "scripttax/tokenizers.hpp"

namespace scripttax {

inline constexpr double kDefaultMaskRate = 0.15;

/// Masked token positions M(x) for one sentence.
struct MaskPlan {
  std::string sentence_id;
  std::vector<std::size_t> masked_positions;  // sorted, unique
  std::uint64_t seed = 0;
  double mask_rate = kDefaultMaskRate;
};

/// Number of positions masked for `token_count` tokens:
/// max(1, round_half_up(mask_rate * token_count)).
std::size_t mask_count(std::size_t token_count, double mask_rate);

/// Seeded draw keyed on (seed, sentence_id); a pure function of
/// (seed, sentence_id, token_count, mask_rate).
MaskPlan plan_masks(const TokenizationResult& result, std::uint64_t seed,
                    double mask_rate = kDefaultMaskRate);

struct ScoreRecord {
  std::string sentence_id;
  Orthography orthography = Orthography::A;
  std::string model_name;
  double mean_nll_nats = 0.0;
  std::size_t masked_count = 1;
};

/// Add-k smoothed left-context n-gram model over token strings. Contexts
/// shorter than order-1 at sentence start are padded with kBos. Unseen
/// tokens (and unseen contexts) fall back to smoothing mass; the unknown
/// token is part of the vocabulary, so every conditional distribution sums
/// to one.
class NGramScorer {
 public:
  static constexpr std::string_view kBos = "<s>";

  static NGramScorer train(std::span<const std::vector<std::string>> sentences,
                           std::size_t order, double smoothing_k);

  std::size_t order() const { return order_; }
  double smoothing_k() const { return k_; }
  /// Distinct training tokens plus one for unknown.
  std::size_t vocab_size() const { return vocab_.size() + 1; }
  bool knows(std::string_view token) const;

  /// P(tokens[pos] | the order-1 tokens to its left).
  double probability(std::span<const std::string> tokens, std::size_t pos) const;
  double probability(std::span<const std::string> context,
                     std::string_view token) const;

  /// All stored contexts, as they appear in probability() lookups.
  std::vector<std::vector<std::string>> contexts() const;
  /// Training tokens (without the unknown slot).
  std::vector<std::string> known_tokens() const;

 private:
  struct ContextCounts {
    std::unordered_map<std::string, std::size_t> next;
    std::size_t total = 0;
  };
  std::string context_key(std::span<const std::string> context) const;

  std::size_t order_ = 1;
  double k_ = 1.0;
  std::unordered_map<std::string, std::size_t> vocab_;
  std::unordered_map<std::string, ContextCounts> counts_;
  std::unordered_map<std::string, std::vector<std::string>> context_tokens_;
};

/// Mean over masked positions of -ln P(token | left context), in nats.
double mean_masked_nll(const NGramScorer& scorer, std::span<const std::string> tokens,
                       std::span<const std::size_t> positions);

ScoreRecord score_masked(const NGramScorer& scorer, const TokenizationResult& result,
                         const MaskPlan& plan, std::string model_name);

/// Line-delimited records {sentence_id, orthography, model, mean_nll_nats,
/// masked_count}. Every bad record is reported in one ValidationError.
std::vector<ScoreRecord> ingest_external_scores(const std::filesystem::path& path,
                                                const PairedCorpus& corpus);
std::vector<ScoreRecord> parse_external_scores(std::istream& in,
                                               const PairedCorpus& corpus);
void write_score_records(std::span<const ScoreRecord> records, std::ostream& out);

}  // namespace scripttax
