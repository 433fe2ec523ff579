#include "scripttax/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "scripttax/errors.hpp"

namespace scripttax {

namespace {

constexpr double kConsistencyTolerance = 1e-12;

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw InvariantError("number formatting failed");
  return std::string(buf, ptr);
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : "NA"; }

template <typename T>
nlohmann::ordered_json opt(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

template <typename T>
std::optional<T> read_opt(const nlohmann::ordered_json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

void check_close(const char* what, const std::string& model, double stored,
                 double recomputed) {
  if (!(std::fabs(stored - recomputed) <= kConsistencyTolerance)) {
    throw InvariantError("report for " + model + ": " + what + " = " + num(stored) +
                         " but recomputes to " + num(recomputed));
  }
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

double positive(const nlohmann::ordered_json& m, const char* key, const std::string& model) {
  if (!m.contains(key) || !m.at(key).is_number()) {
    throw ValidationError("summary for " + model + " lacks numeric \"" + key + "\"");
  }
  const double v = m.at(key).get<double>();
  if (!std::isfinite(v) || v < 0.0) {
    throw ValidationError("summary for " + model + ": \"" + key +
                          "\" must be finite and non-negative");
  }
  return v;
}

}  // namespace

ScriptTaxTriple ScriptTaxReport::triple() const {
  return script_tax_triple(model_name, delta_f, latency ? latency->rho_lat : std::nan(""),
                           delta_bpc, provenance);
}

void ScriptTaxReport::check_consistency() const {
  check_close("delta_f", model_name, delta_f, fertility_b - fertility_a);
  check_close("delta_bpc", model_name, delta_bpc, bpc_tax(bpc_a, bpc_b));
  if (latency) {
    check_close("rho_lat", model_name, latency->rho_lat,
                latency_tax(latency->median_a, latency->median_b));
  }
}

void to_json(nlohmann::ordered_json& j, const ScriptTaxReport& r) {
  j = nlohmann::ordered_json::object();
  j["model"] = r.model_name;
  j["label_a"] = r.label_a;
  j["label_b"] = r.label_b;
  j["n_pairs"] = opt(r.n_pairs);
  j["fertility"] = {{"a", r.fertility_a}, {"b", r.fertility_b}, {"delta_f", r.delta_f}};
  j["bpc"] = {{"a", r.bpc_a},
              {"b", r.bpc_b},
              {"delta_bpc", r.delta_bpc},
              {"pooled_a", opt(r.bpc_pooled_a)},
              {"pooled_b", opt(r.bpc_pooled_b)}};
  if (r.latency) {
    const auto& l = *r.latency;
    j["latency"] = {{"live", l.live},
                    {"median_a_s", l.median_a},
                    {"median_b_s", l.median_b},
                    {"rho_lat", l.rho_lat},
                    {"throughput_a_sps", l.throughput_a},
                    {"throughput_b_sps", l.throughput_b},
                    {"mean_len_a", opt(l.mean_len_a)},
                    {"mean_len_b", opt(l.mean_len_b)},
                    {"quadratic_ratio", opt(l.quadratic_ratio)},
                    {"analytic_cost_ratio", opt(l.analytic_cost_ratio)},
                    {"residual", opt(l.residual)}};
  } else {
    j["latency"] = nullptr;
  }
  if (r.cer_rt) {
    j["cer"] = {{"cer_rt", *r.cer_rt}, {"source", r.cer_source.value_or("measured")}};
  } else {
    j["cer"] = nullptr;
  }
  j["triple"] = {{"delta_f", r.delta_f},
                 {"rho_lat", r.latency ? nlohmann::ordered_json(r.latency->rho_lat)
                                       : nlohmann::ordered_json(nullptr)},
                 {"delta_bpc", r.delta_bpc}};
  j["provenance"] = r.provenance;
}

void from_json(const nlohmann::ordered_json& j, ScriptTaxReport& r) {
  r.model_name = j.at("model").get<std::string>();
  r.label_a = j.at("label_a").get<std::string>();
  r.label_b = j.at("label_b").get<std::string>();
  r.n_pairs = read_opt<std::size_t>(j, "n_pairs");
  const auto& f = j.at("fertility");
  r.fertility_a = f.at("a").get<double>();
  r.fertility_b = f.at("b").get<double>();
  r.delta_f = f.at("delta_f").get<double>();
  const auto& b = j.at("bpc");
  r.bpc_a = b.at("a").get<double>();
  r.bpc_b = b.at("b").get<double>();
  r.delta_bpc = b.at("delta_bpc").get<double>();
  r.bpc_pooled_a = read_opt<double>(b, "pooled_a");
  r.bpc_pooled_b = read_opt<double>(b, "pooled_b");
  r.latency.reset();
  if (const auto& l = j.at("latency"); !l.is_null()) {
    LatencyBlock block;
    block.live = l.at("live").get<bool>();
    block.median_a = l.at("median_a_s").get<double>();
    block.median_b = l.at("median_b_s").get<double>();
    block.rho_lat = l.at("rho_lat").get<double>();
    block.throughput_a = l.at("throughput_a_sps").get<double>();
    block.throughput_b = l.at("throughput_b_sps").get<double>();
    block.mean_len_a = read_opt<double>(l, "mean_len_a");
    block.mean_len_b = read_opt<double>(l, "mean_len_b");
    block.quadratic_ratio = read_opt<double>(l, "quadratic_ratio");
    block.analytic_cost_ratio = read_opt<double>(l, "analytic_cost_ratio");
    block.residual = read_opt<double>(l, "residual");
    r.latency = block;
  }
  r.cer_rt.reset();
  r.cer_source.reset();
  if (const auto& c = j.at("cer"); !c.is_null()) {
    r.cer_rt = c.at("cer_rt").get<double>();
    r.cer_source = c.at("source").get<std::string>();
  }
  r.provenance = j.at("provenance").get<Provenance>();
}

std::string serialize_structured(std::span<const ScriptTaxReport> reports) {
  if (reports.empty()) throw ValidationError("no reports to emit");
  nlohmann::ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    r.check_consistency();
    doc["reports"].push_back(r);
  }
  return doc.dump(2) + "\n";
}

std::vector<ScriptTaxReport> parse_structured(std::string_view text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("report is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema_version")) {
    throw ValidationError("report lacks a schema_version field");
  }
  const auto version = doc["schema_version"].get<std::string>();
  if (version != kReportSchemaVersion) {
    throw ValidationError("report schema version \"" + version + "\" is not supported (expected \"" +
                          std::string(kReportSchemaVersion) + "\")");
  }
  std::vector<ScriptTaxReport> reports;
  try {
    for (const auto& entry : doc.at("reports")) {
      reports.push_back(entry.get<ScriptTaxReport>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed report entry: ") + e.what());
  }
  for (const auto& r : reports) r.check_consistency();
  return reports;
}

std::string serialize_tabular(std::span<const ScriptTaxReport> reports) {
  if (reports.empty()) throw ValidationError("no reports to emit");
  std::ostringstream out;
  out << "model\trow\torthography\tlabel\tfertility\tmedian_latency_s\tthroughput_sps"
         "\tbpc\tbpc_pooled\tdelta_f\trho_lat\tdelta_bpc\tcer_rt\n";
  for (const auto& r : reports) {
    r.check_consistency();
    const auto& l = r.latency;
    out << r.model_name << "\torthography\tA\t" << r.label_a << '\t' << num(r.fertility_a)
        << '\t' << (l ? num(l->median_a) : "NA") << '\t' << (l ? num(l->throughput_a) : "NA")
        << '\t' << num(r.bpc_a) << '\t' << num(r.bpc_pooled_a) << "\tNA\tNA\tNA\tNA\n";
    out << r.model_name << "\torthography\tB\t" << r.label_b << '\t' << num(r.fertility_b)
        << '\t' << (l ? num(l->median_b) : "NA") << '\t' << (l ? num(l->throughput_b) : "NA")
        << '\t' << num(r.bpc_b) << '\t' << num(r.bpc_pooled_b) << "\tNA\tNA\tNA\tNA\n";
    out << r.model_name << "\tdelta\tB-A\tNA\tNA\tNA\tNA\tNA\tNA\t" << num(r.delta_f) << '\t'
        << (l ? num(l->rho_lat) : "NA") << '\t' << num(r.delta_bpc) << '\t'
        << num(r.cer_rt) << '\n';
  }
  return out.str();
}

void emit_report(std::span<const ScriptTaxReport> reports,
                 const std::filesystem::path& path, ReportFormat format) {
  write_file(path, format == ReportFormat::kStructured ? serialize_structured(reports)
                                                       : serialize_tabular(reports));
}

std::vector<ScriptTaxReport> load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open report " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_structured(buf.str());
}

std::string without_live_timing(std::string_view structured) {
  auto doc = nlohmann::ordered_json::parse(structured);
  for (auto& entry : doc.at("reports")) {
    auto& l = entry.at("latency");
    if (!l.is_null() && l.at("live").get<bool>()) {
      l = "<live>";
      entry.at("triple").at("rho_lat") = "<live>";
    }
  }
  return doc.dump(2) + "\n";
}

std::string fertility_series(std::span<const ScriptTaxReport> reports) {
  std::ostringstream out;
  out << "model\torthography\tlabel\tfertility\n";
  for (const auto& r : reports) {
    out << r.model_name << "\tA\t" << r.label_a << '\t' << num(r.fertility_a) << '\n';
    out << r.model_name << "\tB\t" << r.label_b << '\t' << num(r.fertility_b) << '\n';
  }
  return out.str();
}

std::string bpc_latency_series(std::span<const ScriptTaxReport> reports) {
  std::ostringstream out;
  out << "model\torthography\tlabel\tmedian_latency_s\tbpc\n";
  for (const auto& r : reports) {
    const auto& l = r.latency;
    out << r.model_name << "\tA\t" << r.label_a << '\t' << (l ? num(l->median_a) : "NA")
        << '\t' << num(r.bpc_a) << '\n';
    out << r.model_name << "\tB\t" << r.label_b << '\t' << (l ? num(l->median_b) : "NA")
        << '\t' << num(r.bpc_b) << '\n';
  }
  return out.str();
}

PlotFiles emit_plot_data(std::span<const ScriptTaxReport> reports,
                         const std::filesystem::path& dir) {
  if (reports.empty()) throw ValidationError("no reports to plot");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  PlotFiles files{dir / "fertility.tsv", dir / "bpc_latency.tsv"};
  write_file(files.fertility, fertility_series(reports));
  write_file(files.bpc_latency, bpc_latency_series(reports));
  return files;
}

std::vector<ScriptTaxReport> replay_summaries(const nlohmann::ordered_json& summaries) {
  if (!summaries.is_object() || !summaries.contains("schema_version") ||
      summaries["schema_version"] != kSummariesSchemaVersion) {
    throw ValidationError("summaries file must declare schema_version \"" +
                          std::string(kSummariesSchemaVersion) + "\"");
  }
  if (!summaries.contains("models") || !summaries["models"].is_array() ||
      summaries["models"].empty()) {
    throw ValidationError("summaries file has no models");
  }
  const std::string label_a = summaries.value("label_a", std::string("A"));
  const std::string label_b = summaries.value("label_b", std::string("B"));
  std::optional<double> shared_cer;
  if (summaries.contains("cer_rt")) shared_cer = positive(summaries, "cer_rt", "corpus");

  std::vector<ScriptTaxReport> reports;
  for (const auto& m : summaries["models"]) {
    if (!m.contains("model") || !m["model"].is_string()) {
      throw ValidationError("summary entry lacks a model name");
    }
    ScriptTaxReport r;
    r.model_name = m["model"].get<std::string>();
    r.label_a = label_a;
    r.label_b = label_b;
    r.fertility_a = positive(m, "fertility_a", r.model_name);
    r.fertility_b = positive(m, "fertility_b", r.model_name);
    r.delta_f = r.fertility_b - r.fertility_a;
    r.bpc_a = positive(m, "bpc_a", r.model_name);
    r.bpc_b = positive(m, "bpc_b", r.model_name);
    r.delta_bpc = bpc_tax(r.bpc_a, r.bpc_b);

    const bool has_tp = m.contains("throughput_a_sps") || m.contains("throughput_b_sps");
    const bool has_med = m.contains("median_latency_a_s") || m.contains("median_latency_b_s");
    if (has_tp && has_med) {
      throw ValidationError("summary for " + r.model_name +
                            " gives both throughput and median latency");
    }
    if (has_tp || has_med) {
      LatencyBlock l;
      if (has_tp) {
        l.throughput_a = positive(m, "throughput_a_sps", r.model_name);
        l.throughput_b = positive(m, "throughput_b_sps", r.model_name);
        if (l.throughput_a <= 0.0 || l.throughput_b <= 0.0) {
          throw ValidationError("summary for " + r.model_name + ": throughput must be > 0");
        }
        l.median_a = 1.0 / l.throughput_a;
        l.median_b = 1.0 / l.throughput_b;
      } else {
        l.median_a = positive(m, "median_latency_a_s", r.model_name);
        l.median_b = positive(m, "median_latency_b_s", r.model_name);
        if (l.median_a <= 0.0 || l.median_b <= 0.0) {
          throw ValidationError("summary for " + r.model_name + ": latency must be > 0");
        }
        l.throughput_a = 1.0 / l.median_a;
        l.throughput_b = 1.0 / l.median_b;
      }
      l.rho_lat = latency_tax(l.median_a, l.median_b);
      if (m.contains("mean_len_a") && m.contains("mean_len_b")) {
        l.mean_len_a = positive(m, "mean_len_a", r.model_name);
        l.mean_len_b = positive(m, "mean_len_b", r.model_name);
        l.quadratic_ratio = quadratic_cost_ratio(*l.mean_len_a, *l.mean_len_b);
        l.residual = l.rho_lat / *l.quadratic_ratio;
      }
      r.latency = l;
    }
    if (m.contains("cer_rt")) {
      r.cer_rt = positive(m, "cer_rt", r.model_name);
    } else {
      r.cer_rt = shared_cer;
    }
    if (r.cer_rt) r.cer_source = "summary";

    r.provenance.mode = "replay";
    r.provenance.scorer_source = "summary";
    r.provenance.tokenizer_name = r.model_name;
    r.provenance.bpc_aggregation = "as-ingested";
    r.provenance.special_tokens_in_fertility = "as-ingested";
    r.check_consistency();
    reports.push_back(std::move(r));
  }
  return reports;
}

std::vector<ScriptTaxReport> replay_summaries_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open summaries file " + path.string());
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("summaries file " + path.string() + " is not valid JSON: " + e.what());
  }
  return replay_summaries(doc);
}

}  // namespace scripttax
