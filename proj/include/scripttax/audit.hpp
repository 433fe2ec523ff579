#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scripttax/converter.hpp"
#include "scripttax/corpus.hpp"
#include "scripttax/latency.hpp"
#include "scripttax/report.hpp"
#include "scripttax/scorer.hpp"
#include "scripttax/tokenizers.hpp"

namespace scripttax {

/// Where masked NLL comes from: the built-in n-gram (trained per model and
/// orthography on that side's tokens) or externally computed records.
struct ScorerSource {
  std::size_t order = 2;
  double smoothing_k = 1.0;
  std::optional<std::vector<ScoreRecord>> external;
  std::string external_label;  // recorded in provenance

  static ScorerSource builtin(std::size_t order = 2, double smoothing_k = 1.0);
  static ScorerSource from_records(std::vector<ScoreRecord> records, std::string label);
  std::string describe() const;
};

struct Conversion {
  MappingTable forward;
  MappingTable backward;
};

struct AuditOptions {
  std::uint64_t seed = 13;
  double mask_rate = kDefaultMaskRate;
  BenchmarkOptions bench{};
  bool add_special_tokens = true;
  std::optional<Conversion> conversion;
};

struct AuditOutcome {
  std::string model_name;
  std::optional<ScriptTaxReport> report;
  std::string error;  // set when report is absent
  int error_code = 0;
  std::optional<BenchmarkResult> benchmark;
};

/// Full pipeline per tokenizer spec. A failure aborts only that model's
/// report. Latency is measured when `latency` is set; otherwise the block
/// is absent.
std::vector<AuditOutcome> run_audit(const PairedCorpus& corpus,
                                    std::span<const TokenizerSpec> specs,
                                    const ScorerSource& scorer,
                                    const std::optional<EncoderConfig>& latency,
                                    const AuditOptions& options);

/// Single-model building blocks, exposed for the CLI subcommands.
std::vector<ScoreRecord> builtin_scores(const TokenizerSpec& spec,
                                        std::span<const TokenizationResult> results,
                                        const ScorerSource& scorer, std::uint64_t seed,
                                        double mask_rate);

std::vector<BenchSequence> bench_sequences(const TokenizerSpec& spec,
                                           std::span<const TokenizationResult> results_a,
                                           std::span<const TokenizationResult> results_b,
                                           const EncoderConfig& config,
                                           bool add_special_tokens);

}  // namespace scripttax
