#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scripttax/corpus.hpp"
#include "scripttax/tokenizers.hpp"

namespace scripttax {

struct EncoderConfig {
  std::size_t layers = 4;
  std::size_t hidden_dim = 256;
  std::size_t heads = 4;
  std::size_t ffn_dim = 1024;
  std::size_t vocab_size = 8192;
  std::uint64_t seed = 1234;

  /// Throws ValidationError unless all dims >= 1 and heads divides hidden_dim.
  void validate() const;
  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

/// 4 layers, hidden 256, 4 heads, FFN 1024.
EncoderConfig reference_encoder_config();

struct ForwardResult {
  double seconds = 0.0;
  double checksum = 0.0;
};

/// Post-LN transformer encoder with seeded random weights. forward() runs
/// embedding + sinusoidal positions and `layers` blocks of multi-head
/// self-attention (explicit L x L score matrix per head) and a ReLU FFN,
/// single-threaded. The checksum is the sum of the final hidden states.
class Encoder {
 public:
  explicit Encoder(EncoderConfig config);
  ~Encoder();
  Encoder(Encoder&&) noexcept;
  Encoder& operator=(Encoder&&) noexcept;

  const EncoderConfig& config() const { return config_; }
  ForwardResult forward(std::span<const std::int32_t> token_ids) const;

 private:
  struct Weights;
  EncoderConfig config_;
  std::unique_ptr<Weights> weights_;
};

ForwardResult encoder_forward(const Encoder& encoder,
                              std::span<const std::int32_t> token_ids);

/// FLOP model of one forward pass (multiply-adds count 2). Softmax,
/// layer norm and embedding terms are linear in L and left out.
///   attention = layers * 4 * L^2 * hidden        (Q K^T and P V)
///   dense     = layers * 4 * L * hidden * (2 * hidden + ffn)
///               (Q, K, V, O projections: 8 L h^2; FFN: 4 L h f)
struct CostBreakdown {
  std::uint64_t attention = 0;
  std::uint64_t dense = 0;
  std::uint64_t total() const { return attention + dense; }
};

CostBreakdown analytic_cost(const EncoderConfig& config, std::size_t seq_len);

struct BenchSequence {
  std::string sentence_id;
  Orthography orthography = Orthography::A;
  std::vector<std::int32_t> token_ids;
};

struct BenchmarkOptions {
  std::size_t warmup = 1;
  std::size_t repeats = 5;
};

struct TimerInfo {
  double nominal_resolution_s = 0.0;
  double measured_resolution_s = 0.0;
  /// Timed runs shorter than this (100 ticks) are rejected.
  double min_reliable_s = 0.0;
};

/// Probes std::chrono::steady_clock.
TimerInfo probe_timer();

struct SentenceTiming {
  std::string sentence_id;
  Orthography orthography = Orthography::A;
  std::size_t token_len = 0;
  double median_seconds = 0.0;
  std::size_t repeats = 0;
};

struct LatencySummary {
  Orthography orthography = Orthography::A;
  std::size_t n = 0;
  double median_seconds = 0.0;
  double throughput_sps = 0.0;  // 1 / median_seconds (unit batches)
  double mean_token_len = 0.0;
  std::size_t warmup_discarded = 0;
};

struct BenchmarkResult {
  std::vector<SentenceTiming> sentences;  // input order
  std::optional<LatencySummary> summary_a;
  std::optional<LatencySummary> summary_b;
  TimerInfo timer;
  std::string environment;
  std::optional<EncoderConfig> config;
};

/// Returns the duration of one run, in seconds.
using TimedRun = std::function<double(const BenchSequence&)>;

/// Per sentence: `warmup` discarded runs, then `repeats` timed runs reduced
/// to their median. Each orthography's summary is the median of its
/// per-sentence medians. Runs strictly in input order on the calling thread.
BenchmarkResult run_benchmark(const TimedRun& run, std::span<const BenchSequence> sequences,
                              const BenchmarkOptions& options, const TimerInfo& timer);
BenchmarkResult run_benchmark(const Encoder& encoder,
                              std::span<const BenchSequence> sequences,
                              const BenchmarkOptions& options);

/// Maps tokens to encoder ids: 0 and 1 are reserved for the leading and
/// trailing sentinels, vocabulary ids are shifted by 2 (folded into
/// vocab_size). Sentinels are added when `add_special_tokens` is set.
std::vector<std::int32_t> model_input_ids(const TokenizerSpec& spec,
                                          const TokenizationResult& result,
                                          const EncoderConfig& config,
                                          bool add_special_tokens);

/// Host, compiler and SIMD description recorded next to timings.
std::string environment_string();

/// One JSON record per sentence, then a summary record.
void write_benchmark(const BenchmarkResult& result, std::ostream& out);

}  // namespace scripttax
