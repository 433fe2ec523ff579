#include "scripttax/audit.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

#include "scripttax/errors.hpp"
#include "scripttax/metrics.hpp"

namespace scripttax {

ScorerSource ScorerSource::builtin(std::size_t order, double smoothing_k) {
  ScorerSource s;
  s.order = order;
  s.smoothing_k = smoothing_k;
  return s;
}

ScorerSource ScorerSource::from_records(std::vector<ScoreRecord> records,
                                        std::string label) {
  ScorerSource s;
  s.external = std::move(records);
  s.external_label = std::move(label);
  return s;
}

std::string ScorerSource::describe() const {
  if (external) return "external:" + external_label;
  std::ostringstream o;
  o << "builtin-ngram(order=" << order << ",k=" << smoothing_k << ")";
  return o.str();
}

std::vector<ScoreRecord> builtin_scores(const TokenizerSpec& spec,
                                        std::span<const TokenizationResult> results,
                                        const ScorerSource& scorer, std::uint64_t seed,
                                        double mask_rate) {
  std::vector<std::vector<std::string>> training;
  training.reserve(results.size());
  for (const auto& r : results) training.push_back(r.tokens);
  const auto model = NGramScorer::train(training, scorer.order, scorer.smoothing_k);
  std::vector<ScoreRecord> records;
  records.reserve(results.size());
  for (const auto& r : results) {
    records.push_back(score_masked(model, r, plan_masks(r, seed, mask_rate), spec.name()));
  }
  return records;
}

std::vector<BenchSequence> bench_sequences(const TokenizerSpec& spec,
                                           std::span<const TokenizationResult> results_a,
                                           std::span<const TokenizationResult> results_b,
                                           const EncoderConfig& config,
                                           bool add_special_tokens) {
  // Interleaved A/B per pair so slow drift in machine state hits both sides.
  std::vector<BenchSequence> seqs;
  seqs.reserve(results_a.size() + results_b.size());
  const std::size_t n = std::max(results_a.size(), results_b.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto* side : {&results_a, &results_b}) {
      if (i >= side->size()) continue;
      const auto& r = (*side)[i];
      seqs.push_back({r.sentence_id, r.orthography,
                      model_input_ids(spec, r, config, add_special_tokens)});
    }
  }
  return seqs;
}

namespace {

struct BpcSide {
  double mean = 0.0;
  double pooled = 0.0;
};

BpcSide side_bpc(std::span<const TokenizationResult> results,
                 const std::map<std::string, const ScoreRecord*>& by_id,
                 const std::string& model) {
  std::vector<double> per_sentence;
  double total_bits = 0.0;
  double total_chars = 0.0;
  for (const auto& r : results) {
    auto it = by_id.find(r.sentence_id);
    if (it == by_id.end()) {
      throw ValidationError("no score for sentence \"" + r.sentence_id + "\" (" +
                            std::string(to_string(r.orthography)) + ") under model " +
                            model);
    }
    const ScoreRecord& s = *it->second;
    per_sentence.push_back(bpc(s.mean_nll_nats, s.masked_count, r.char_count));
    total_bits += s.mean_nll_nats * static_cast<double>(s.masked_count) / std::numbers::ln2;
    total_chars += static_cast<double>(r.char_count);
  }
  return {mean(per_sentence), total_bits / total_chars};
}

std::map<std::string, const ScoreRecord*> index_scores(std::span<const ScoreRecord> records,
                                                       const std::string& model,
                                                       Orthography o) {
  std::map<std::string, const ScoreRecord*> out;
  for (const auto& r : records) {
    if (r.model_name == model && r.orthography == o) out.emplace(r.sentence_id, &r);
  }
  return out;
}

double mean_analytic_cost(const EncoderConfig& config, const BenchmarkResult& bench,
                          Orthography o) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& t : bench.sentences) {
    if (t.orthography != o) continue;
    total += static_cast<double>(analytic_cost(config, t.token_len).total());
    ++n;
  }
  return total / static_cast<double>(n);
}

ScriptTaxReport audit_one(const PairedCorpus& corpus, const TokenizerSpec& spec,
                          const ScorerSource& scorer,
                          const std::optional<EncoderConfig>& latency,
                          const AuditOptions& options, const std::optional<CerSummary>& cer,
                          std::optional<BenchmarkResult>& bench_out) {
  const auto results_a = tokenize_side(spec, corpus, Orthography::A);
  const auto results_b = tokenize_side(spec, corpus, Orthography::B);

  ScriptTaxReport r;
  r.model_name = spec.name();
  r.label_a = corpus.label_a();
  r.label_b = corpus.label_b();
  r.n_pairs = corpus.size();
  r.fertility_a = mean_fertility(results_a);
  r.fertility_b = mean_fertility(results_b);
  r.delta_f = fertility_gap(results_a, results_b);

  std::vector<ScoreRecord> own;
  std::span<const ScoreRecord> records;
  if (scorer.external) {
    records = *scorer.external;
  } else {
    own = builtin_scores(spec, results_a, scorer, options.seed, options.mask_rate);
    auto b = builtin_scores(spec, results_b, scorer, options.seed, options.mask_rate);
    own.insert(own.end(), b.begin(), b.end());
    records = own;
  }
  const auto bpc_a = side_bpc(results_a, index_scores(records, spec.name(), Orthography::A),
                              spec.name());
  const auto bpc_b = side_bpc(results_b, index_scores(records, spec.name(), Orthography::B),
                              spec.name());
  r.bpc_a = bpc_a.mean;
  r.bpc_b = bpc_b.mean;
  r.bpc_pooled_a = bpc_a.pooled;
  r.bpc_pooled_b = bpc_b.pooled;
  r.delta_bpc = bpc_tax(r.bpc_a, r.bpc_b);

  if (latency) {
    const Encoder encoder(*latency);
    const auto seqs =
        bench_sequences(spec, results_a, results_b, *latency, options.add_special_tokens);
    BenchmarkResult bench = run_benchmark(encoder, seqs, options.bench);
    LatencyBlock l;
    l.live = true;
    l.median_a = bench.summary_a->median_seconds;
    l.median_b = bench.summary_b->median_seconds;
    l.throughput_a = bench.summary_a->throughput_sps;
    l.throughput_b = bench.summary_b->throughput_sps;
    l.rho_lat = latency_tax(l.median_a, l.median_b);
    l.mean_len_a = bench.summary_a->mean_token_len;
    l.mean_len_b = bench.summary_b->mean_token_len;
    l.quadratic_ratio = quadratic_cost_ratio(*l.mean_len_a, *l.mean_len_b);
    l.analytic_cost_ratio = mean_analytic_cost(*latency, bench, Orthography::B) /
                            mean_analytic_cost(*latency, bench, Orthography::A);
    l.residual = l.rho_lat / *l.quadratic_ratio;
    r.latency = l;
    r.provenance.encoder_seed = latency->seed;
    r.provenance.special_tokens_in_latency = options.add_special_tokens;
    bench_out = std::move(bench);
  }

  if (cer) {
    r.cer_rt = cer->cer_rt;
    r.cer_source = "measured";
  }

  r.provenance.mode = "audit";
  r.provenance.corpus_hash = corpus.content_hash();
  r.provenance.tokenizer_name = spec.name();
  r.provenance.tokenizer_hash = spec.content_hash();
  r.provenance.scorer_source = scorer.describe();
  if (!scorer.external) {
    r.provenance.mask_seed = options.seed;
    r.provenance.mask_rate = options.mask_rate;
  }
  r.provenance.nfc_applied = corpus.nfc_applied();
  r.check_consistency();
  return r;
}

}  // namespace

std::vector<AuditOutcome> run_audit(const PairedCorpus& corpus,
                                    std::span<const TokenizerSpec> specs,
                                    const ScorerSource& scorer,
                                    const std::optional<EncoderConfig>& latency,
                                    const AuditOptions& options) {
  std::optional<CerSummary> cer;
  if (options.conversion) {
    std::map<std::string, std::string> recon;
    for (const auto& p : corpus.pairs()) {
      recon.emplace(p.id, round_trip(options.conversion->forward,
                                     options.conversion->backward, p.text_a));
    }
    cer = cer_round_trip(corpus, recon);
  }

  std::vector<AuditOutcome> outcomes;
  for (const auto& spec : specs) {
    AuditOutcome o;
    o.model_name = spec.name();
    try {
      o.report = audit_one(corpus, spec, scorer, latency, options, cer, o.benchmark);
    } catch (const Error& e) {
      o.error = e.what();
      o.error_code = e.exit_code();
    }
    outcomes.push_back(std::move(o));
  }
  return outcomes;
}

}  // namespace scripttax
