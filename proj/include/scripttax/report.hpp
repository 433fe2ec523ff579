#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scripttax/metrics.hpp"
#include "scripttax/provenance.hpp"

namespace scripttax {

inline constexpr std::string_view kReportSchemaVersion = "scripttax.report/1";
inline constexpr std::string_view kSummariesSchemaVersion = "scripttax.summaries/1";

/// Latency comparison for one model. Absent from a report when no timing
/// was run or ingested.
struct LatencyBlock {
  double median_a = 0.0;  // seconds
  double median_b = 0.0;
  double rho_lat = 1.0;
  double throughput_a = 0.0;  // sentences / second
  double throughput_b = 0.0;
  std::optional<double> mean_len_a;  // tokens fed to the encoder
  std::optional<double> mean_len_b;
  std::optional<double> quadratic_ratio;      // (len_b / len_a)^2
  std::optional<double> analytic_cost_ratio;  // full FLOP model
  std::optional<double> residual;             // rho_lat / quadratic_ratio
  bool live = false;  // measured in this run (environment dependent)

  friend bool operator==(const LatencyBlock&, const LatencyBlock&) = default;
};

struct ScriptTaxReport {
  std::string model_name;
  std::string label_a = "A";
  std::string label_b = "B";
  std::optional<std::size_t> n_pairs;
  double fertility_a = 0.0;
  double fertility_b = 0.0;
  double delta_f = 0.0;
  std::optional<LatencyBlock> latency;
  double bpc_a = 0.0;
  double bpc_b = 0.0;
  double delta_bpc = 0.0;
  std::optional<double> bpc_pooled_a;
  std::optional<double> bpc_pooled_b;
  std::optional<double> cer_rt;
  std::optional<std::string> cer_source;  // measured | summary
  Provenance provenance;

  ScriptTaxTriple triple() const;
  /// Throws InvariantError if delta_f, rho_lat or delta_bpc disagree with
  /// their recomputation from the per-orthography values by more than 1e-12.
  void check_consistency() const;

  friend bool operator==(const ScriptTaxReport&, const ScriptTaxReport&) = default;
};

void to_json(nlohmann::ordered_json& j, const ScriptTaxReport& r);
void from_json(const nlohmann::ordered_json& j, ScriptTaxReport& r);

enum class ReportFormat { kStructured, kTabular };

/// Single JSON document: schema version plus one entry per model.
std::string serialize_structured(std::span<const ScriptTaxReport> reports);
/// Inverse of serialize_structured. Rejects a different schema version and
/// re-checks report consistency.
std::vector<ScriptTaxReport> parse_structured(std::string_view text);

/// TSV with a header, two orthography rows and one delta row per model.
std::string serialize_tabular(std::span<const ScriptTaxReport> reports);

void emit_report(std::span<const ScriptTaxReport> reports,
                 const std::filesystem::path& path, ReportFormat format);
std::vector<ScriptTaxReport> load_report(const std::filesystem::path& path);

/// Structured report with every live latency block removed; what remains
/// must be byte-identical across runs with identical inputs and seeds.
std::string without_live_timing(std::string_view structured);

struct PlotFiles {
  std::filesystem::path fertility;
  std::filesystem::path bpc_latency;
};
std::string fertility_series(std::span<const ScriptTaxReport> reports);
std::string bpc_latency_series(std::span<const ScriptTaxReport> reports);
/// Writes fertility.tsv and bpc_latency.tsv into `dir`.
PlotFiles emit_plot_data(std::span<const ScriptTaxReport> reports,
                         const std::filesystem::path& dir);

/// Summary-ingestion mode: pre-aggregated per-orthography values in, only
/// the delta/ratio layer computed.
std::vector<ScriptTaxReport> replay_summaries(const nlohmann::ordered_json& summaries);
std::vector<ScriptTaxReport> replay_summaries_file(const std::filesystem::path& path);

}  // namespace scripttax
