#include "scripttax/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "scripttax/errors.hpp"
#include "scripttax/unicode.hpp"

namespace scripttax {

namespace {

template <typename T>
std::optional<T> optional_field(const nlohmann::ordered_json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

void to_json(nlohmann::ordered_json& j, const Provenance& p) {
  j = nlohmann::ordered_json::object();
  j["mode"] = p.mode;
  j["corpus_hash"] = p.corpus_hash;
  j["tokenizer_name"] = p.tokenizer_name;
  j["tokenizer_hash"] = p.tokenizer_hash;
  j["scorer_source"] = p.scorer_source;
  j["mask_seed"] = p.mask_seed ? nlohmann::ordered_json(*p.mask_seed) : nullptr;
  j["mask_rate"] = p.mask_rate ? nlohmann::ordered_json(*p.mask_rate) : nullptr;
  j["char_unit"] = p.char_unit;
  j["char_exclusion"] = p.char_exclusion;
  j["word_boundary"] = p.word_boundary;
  j["nfc_applied"] = p.nfc_applied;
  j["bpc_aggregation"] = p.bpc_aggregation;
  j["special_tokens_in_fertility"] = p.special_tokens_in_fertility;
  j["encoder_seed"] = p.encoder_seed ? nlohmann::ordered_json(*p.encoder_seed) : nullptr;
  j["special_tokens_in_latency"] =
      p.special_tokens_in_latency ? nlohmann::ordered_json(*p.special_tokens_in_latency)
                                  : nullptr;
}

void from_json(const nlohmann::ordered_json& j, Provenance& p) {
  p.mode = j.at("mode").get<std::string>();
  p.corpus_hash = j.at("corpus_hash").get<std::string>();
  p.tokenizer_name = j.at("tokenizer_name").get<std::string>();
  p.tokenizer_hash = j.at("tokenizer_hash").get<std::string>();
  p.scorer_source = j.at("scorer_source").get<std::string>();
  p.mask_seed = optional_field<std::uint64_t>(j, "mask_seed");
  p.mask_rate = optional_field<double>(j, "mask_rate");
  p.char_unit = j.at("char_unit").get<std::string>();
  p.char_exclusion = j.at("char_exclusion").get<std::string>();
  p.word_boundary = j.at("word_boundary").get<std::string>();
  p.nfc_applied = j.at("nfc_applied").get<bool>();
  p.bpc_aggregation = j.at("bpc_aggregation").get<std::string>();
  p.special_tokens_in_fertility = j.at("special_tokens_in_fertility").get<std::string>();
  p.encoder_seed = optional_field<std::uint64_t>(j, "encoder_seed");
  p.special_tokens_in_latency = optional_field<bool>(j, "special_tokens_in_latency");
}

double mean(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean of an empty set");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double median(std::vector<double> values) {
  if (values.empty()) throw ValidationError("median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return lower + (upper - lower) / 2.0;
}

double mean_fertility(std::span<const TokenizationResult> results) {
  std::vector<double> f;
  f.reserve(results.size());
  for (const auto& r : results) f.push_back(r.fertility);
  return mean(f);
}

double fertility_gap(std::span<const TokenizationResult> results_a,
                     std::span<const TokenizationResult> results_b) {
  if (results_a.size() != results_b.size()) {
    throw ValidationError("fertility gap needs equally many A and B results (" +
                          std::to_string(results_a.size()) + " vs " +
                          std::to_string(results_b.size()) + ")");
  }
  std::vector<double> diffs;
  diffs.reserve(results_a.size());
  for (std::size_t i = 0; i < results_a.size(); ++i) {
    if (results_a[i].sentence_id != results_b[i].sentence_id) {
      throw ValidationError("fertility gap: pair " + std::to_string(i + 1) +
                            " has mismatched ids \"" + results_a[i].sentence_id +
                            "\" and \"" + results_b[i].sentence_id + "\"");
    }
    diffs.push_back(results_b[i].fertility - results_a[i].fertility);
  }
  return mean(diffs);
}

double bpc(double mean_nll_nats, std::size_t masked_count, std::size_t char_count) {
  if (char_count == 0) throw ValidationError("BPC undefined for zero characters");
  if (masked_count == 0) throw ValidationError("BPC needs at least one masked token");
  if (!std::isfinite(mean_nll_nats) || mean_nll_nats < 0.0) {
    throw ValidationError("mean NLL must be finite and non-negative");
  }
  return (mean_nll_nats / std::numbers::ln2) *
         (static_cast<double>(masked_count) / static_cast<double>(char_count));
}

double bpc_tax(double mean_bpc_a, double mean_bpc_b) {
  if (!(mean_bpc_a > 0.0)) {
    throw ValidationError("BPC tax undefined for non-positive baseline BPC");
  }
  return (mean_bpc_b - mean_bpc_a) / mean_bpc_a;
}

double latency_tax(double median_a, double median_b) {
  if (!(median_a > 0.0)) {
    throw ValidationError("latency tax undefined for non-positive baseline latency");
  }
  return median_b / median_a;
}

double quadratic_cost_ratio(double len_a, double len_b) {
  if (!(len_a > 0.0)) throw ValidationError("cost ratio undefined for zero length");
  const double r = len_b / len_a;
  return r * r;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  // row[j] = distance between the current prefix of a and b[0, j).
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

EditDistanceResult edit_distance(std::string_view reference, std::string_view hypothesis) {
  const auto ref = unicode::decode(reference);
  const auto hyp = unicode::decode(hypothesis);
  return {levenshtein(ref, hyp), ref.size()};
}

CerSummary cer_round_trip(const PairedCorpus& corpus,
                          const std::map<std::string, std::string>& reconstructions) {
  std::vector<double> rates;
  rates.reserve(corpus.size());
  for (const auto& p : corpus.pairs()) {
    auto it = reconstructions.find(p.id);
    if (it == reconstructions.end()) {
      throw ValidationError("no round-trip reconstruction for id \"" + p.id + "\"");
    }
    const std::size_t chars = count_chars(p.text_a);
    if (chars == 0) {
      throw ValidationError("CER undefined for id \"" + p.id +
                            "\": text_a has no non-space characters");
    }
    rates.push_back(static_cast<double>(edit_distance(p.text_a, it->second).distance) /
                    static_cast<double>(chars));
  }
  return {mean(rates), corpus.size()};
}

ScriptTaxTriple script_tax_triple(std::string model_name, double delta_f, double rho_lat,
                                  double delta_bpc, Provenance provenance) {
  return {std::move(model_name), delta_f, rho_lat, delta_bpc, std::move(provenance)};
}

void to_json(nlohmann::ordered_json& j, const ScriptTaxTriple& t) {
  j = nlohmann::ordered_json::object();
  j["model"] = t.model_name;
  j["delta_f"] = t.delta_f;
  j["rho_lat"] = t.rho_lat;
  j["delta_bpc"] = t.delta_bpc;
  j["provenance"] = t.provenance;
}

void from_json(const nlohmann::ordered_json& j, ScriptTaxTriple& t) {
  t.model_name = j.at("model").get<std::string>();
  t.delta_f = j.at("delta_f").get<double>();
  t.rho_lat = j.at("rho_lat").get<double>();
  t.delta_bpc = j.at("delta_bpc").get<double>();
  t.provenance = j.at("provenance").get<Provenance>();
}

}  // namespace scripttax
