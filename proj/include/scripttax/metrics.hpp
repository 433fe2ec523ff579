#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scripttax/corpus.hpp"
#include "scripttax/provenance.hpp"
#include "scripttax/tokenizers.hpp"

namespace scripttax {

double mean(std::span<const double> values);
/// Median; mean of the two middle order statistics for even sizes.
double median(std::vector<double> values);

double mean_fertility(std::span<const TokenizationResult> results);

/// Mean over pairs of F(x_B) - F(x_A). Both lists must be aligned by
/// sentence id.
double fertility_gap(std::span<const TokenizationResult> results_a,
                     std::span<const TokenizationResult> results_b);

/// Bits per character: (nll / ln 2) * (masked_count / char_count).
double bpc(double mean_nll_nats, std::size_t masked_count, std::size_t char_count);

/// Relative BPC increase of B over A.
double bpc_tax(double mean_bpc_a, double mean_bpc_b);

/// Ratio of median latencies B / A.
double latency_tax(double median_a, double median_b);

/// (len_b / len_a)^2, the attention-dominated cost prediction.
double quadratic_cost_ratio(double len_a, double len_b);

struct EditDistanceResult {
  std::size_t distance = 0;
  std::size_t ref_len = 0;  // code points in the reference
};

/// Unit-cost Levenshtein distance over code points.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
EditDistanceResult edit_distance(std::string_view reference, std::string_view hypothesis);

struct CerSummary {
  double cer_rt = 0.0;
  std::size_t n = 0;
};

/// Mean over pairs of ED(x_A, reconstruction) / C(x_A).
CerSummary cer_round_trip(const PairedCorpus& corpus,
                          const std::map<std::string, std::string>& reconstructions);

struct ScriptTaxTriple {
  std::string model_name;
  double delta_f = 0.0;
  double rho_lat = 1.0;
  double delta_bpc = 0.0;
  Provenance provenance;

  friend bool operator==(const ScriptTaxTriple&, const ScriptTaxTriple&) = default;
};

ScriptTaxTriple script_tax_triple(std::string model_name, double delta_f, double rho_lat,
                                  double delta_bpc, Provenance provenance = {});

void to_json(nlohmann::ordered_json& j, const ScriptTaxTriple& t);
void from_json(const nlohmann::ordered_json& j, ScriptTaxTriple& t);

}  // namespace scripttax
