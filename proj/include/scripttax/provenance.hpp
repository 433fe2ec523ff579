#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "scripttax/corpus.hpp"

namespace scripttax {

/// Everything needed to audit how a report's numbers were produced.
struct Provenance {
  std::string mode = "audit";  // audit | replay
  std::string corpus_hash;
  std::string tokenizer_name;
  std::string tokenizer_hash;
  std::string scorer_source;  // builtin-ngram(...) | external:<file> | summary
  std::optional<std::uint64_t> mask_seed;
  std::optional<double> mask_rate;
  std::string char_unit = std::string(kCharCountingUnit);
  std::string char_exclusion = std::string(kExcludedFromCharCount);
  std::string word_boundary = std::string(kWordBoundary);
  bool nfc_applied = false;
  std::string bpc_aggregation = "per-sentence-mean";
  std::string special_tokens_in_fertility = "excluded";
  std::optional<std::uint64_t> encoder_seed;
  std::optional<bool> special_tokens_in_latency;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

void to_json(nlohmann::ordered_json& j, const Provenance& p);
void from_json(const nlohmann::ordered_json& j, Provenance& p);

}  // namespace scripttax
