#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scripttax/audit.hpp"
#include "scripttax/converter.hpp"
#include "scripttax/corpus.hpp"
#include "scripttax/errors.hpp"
#include "scripttax/latency.hpp"
#include "scripttax/metrics.hpp"
#include "scripttax/report.hpp"
#include "scripttax/scorer.hpp"
#include "scripttax/tokenizers.hpp"

namespace scripttax::cli {

namespace {

struct CorpusArgs {
  std::string path;
  std::string format = "tsv";
  bool normalize_nfc = false;
  std::string label_a = "A";
  std::string label_b = "B";

  void add_to(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--corpus", path, "Paired corpus file");
    if (required) opt->required();
    cmd->add_option("--format", format, "Corpus format: tsv | records")
        ->check(CLI::IsMember({"tsv", "records", "jsonl"}));
    cmd->add_flag("--normalize-nfc", normalize_nfc,
                  "Apply canonical composition (NFC) before counting");
    cmd->add_option("--label-a", label_a, "Display name of orthography A");
    cmd->add_option("--label-b", label_b, "Display name of orthography B");
  }
  PairedCorpus load() const {
    return load_paired_corpus(path, parse_corpus_format(format),
                              CorpusOptions{normalize_nfc, label_a, label_b});
  }
};

struct EncoderArgs {
  EncoderConfig config = reference_encoder_config();
  std::size_t vocab_size = 0;
  std::size_t warmup = 1;
  std::size_t repeats = 5;
  bool no_special_tokens = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--layers", config.layers, "Encoder layers")->capture_default_str();
    cmd->add_option("--hidden", config.hidden_dim, "Hidden size")->capture_default_str();
    cmd->add_option("--heads", config.heads, "Attention heads")->capture_default_str();
    cmd->add_option("--ffn", config.ffn_dim, "Feed-forward size")->capture_default_str();
    cmd->add_option("--encoder-vocab", vocab_size,
                    "Embedding rows (default: largest tokenizer vocab + 2)");
    cmd->add_option("--encoder-seed", config.seed, "Weight initialization seed")
        ->capture_default_str();
    cmd->add_option("--warmup", warmup, "Untimed runs per sentence")->capture_default_str();
    cmd->add_option("--repeats", repeats, "Timed runs per sentence")->capture_default_str();
    cmd->add_flag("--no-special-tokens", no_special_tokens,
                  "Do not add sentinel tokens to encoder inputs");
  }
  EncoderConfig resolve(const std::vector<TokenizerSpec>& specs) const {
    EncoderConfig c = config;
    if (vocab_size) {
      c.vocab_size = vocab_size;
    } else {
      std::size_t largest = 1;
      for (const auto& s : specs) largest = std::max(largest, s.vocab().size());
      c.vocab_size = largest + 2;
    }
    c.validate();
    return c;
  }
};

struct ScorerArgs {
  std::uint64_t seed = 13;
  double mask_rate = kDefaultMaskRate;
  std::size_t order = 2;
  double smoothing_k = 1.0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Masking seed")->capture_default_str();
    cmd->add_option("--mask-rate", mask_rate, "Fraction of tokens masked")
        ->capture_default_str();
    cmd->add_option("--order", order, "Built-in n-gram order")->capture_default_str();
    cmd->add_option("--smoothing-k", smoothing_k, "Add-k smoothing constant")
        ->capture_default_str();
  }
};

std::vector<TokenizerSpec> load_specs(const std::vector<std::string>& paths) {
  std::vector<TokenizerSpec> specs;
  for (const auto& p : paths) specs.push_back(load_tokenizer_spec(p));
  return specs;
}

// Writes `content` to `path`, or to `out` when path is empty or "-".
void deliver(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f << content;
  f.close();
  if (!f) throw IoError("failed writing " + path);
}

std::string format_double(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

DefaultPolicy policy(bool drop) { return drop ? DefaultPolicy::kDrop : DefaultPolicy::kCopy; }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"scripttax: audit the tokenization cost of paired orthographies"};
  app.require_subcommand(1);

  CorpusArgs corpus_args;
  EncoderArgs encoder_args;
  ScorerArgs scorer_args;
  std::vector<std::string> tokenizer_paths;
  std::string out_path;

  // tokenize
  auto* tokenize = app.add_subcommand("tokenize", "Dump per-sentence tokenization results");
  corpus_args.add_to(tokenize);
  tokenize->add_option("--tokenizer", tokenizer_paths, "Tokenizer manifest(s)")->required();
  tokenize->add_option("--out", out_path, "Output file (default stdout)");

  // fertility
  auto* fertility = app.add_subcommand("fertility", "Mean fertility per side and the gap");
  corpus_args.add_to(fertility);
  fertility->add_option("--tokenizer", tokenizer_paths, "Tokenizer manifest(s)")->required();
  fertility->add_option("--out", out_path, "Output file (default stdout)");

  // score
  auto* score = app.add_subcommand("score", "Masked NLL records from the built-in n-gram");
  corpus_args.add_to(score);
  scorer_args.add_to(score);
  score->add_option("--tokenizer", tokenizer_paths, "Tokenizer manifest(s)")->required();
  score->add_option("--out", out_path, "Output file (default stdout)");

  // bench
  auto* bench = app.add_subcommand("bench", "Time the built-in encoder on both sides");
  corpus_args.add_to(bench);
  encoder_args.add_to(bench);
  bench->add_option("--tokenizer", tokenizer_paths, "Tokenizer manifest(s)")->required();
  bench->add_option("--out", out_path, "Output file (default stdout)");

  // convert
  std::string mapping_path;
  std::string input_path;
  bool drop_unmapped = false;
  auto* convert = app.add_subcommand(
      "convert", "Apply a mapping to text lines, or build side B of a corpus from side A");
  CorpusArgs convert_corpus;
  convert_corpus.add_to(convert, false);
  convert->add_option("--mapping", mapping_path, "Rule file (source<TAB>target)")
      ->required();
  convert->add_option("--in", input_path, "Text file, one sentence per line (default stdin)");
  convert->add_flag("--drop-unmapped", drop_unmapped, "Drop characters no rule covers");
  convert->add_option("--out", out_path, "Output file (default stdout)");

  // cer
  std::string fwd_path;
  std::string bwd_path;
  std::string recon_path;
  auto* cer = app.add_subcommand("cer", "Round-trip character error rate");
  corpus_args.add_to(cer);
  cer->add_option("--fwd", fwd_path, "A->B rule file");
  cer->add_option("--bwd", bwd_path, "B->A rule file");
  cer->add_option("--reconstructions", recon_path, "TSV id<TAB>reconstructed text_a");
  cer->add_flag("--drop-unmapped", drop_unmapped, "Drop characters no rule covers");
  cer->add_option("--out", out_path, "Output file (default stdout)");

  // audit
  std::string scores_path;
  std::string tabular_path;
  std::string plot_dir;
  bool no_bench = false;
  auto* audit = app.add_subcommand("audit", "Full pipeline: fertility, BPC, latency, CER");
  corpus_args.add_to(audit);
  scorer_args.add_to(audit);
  encoder_args.add_to(audit);
  audit->add_option("--tokenizer", tokenizer_paths, "Tokenizer manifest(s)")->required();
  audit->add_option("--scores", scores_path, "External score records (skips the n-gram)");
  audit->add_flag("--no-bench", no_bench, "Skip latency measurement");
  audit->add_option("--fwd", fwd_path, "A->B rule file for round-trip CER");
  audit->add_option("--bwd", bwd_path, "B->A rule file for round-trip CER");
  audit->add_flag("--drop-unmapped", drop_unmapped, "Drop characters no rule covers");
  audit->add_option("--out", out_path, "Structured report (default stdout)");
  audit->add_option("--tabular", tabular_path, "Also write the tabular report here");
  audit->add_option("--plot-dir", plot_dir, "Also write plot data series here");

  // replay
  std::string summaries_path;
  auto* replay = app.add_subcommand("replay", "Delta/ratio layer over ingested summaries");
  replay->add_option("--summaries", summaries_path, "Summaries JSON")->required();
  replay->add_option("--out", out_path, "Structured report (default stdout)");
  replay->add_option("--tabular", tabular_path, "Also write the tabular report here");
  replay->add_option("--plot-dir", plot_dir, "Also write plot data series here");

  // plot-data
  std::string report_path;
  auto* plot = app.add_subcommand("plot-data", "Fertility and BPC-vs-latency data series");
  plot->add_option("--report", report_path, "Structured report")->required();
  plot->add_option("--out-dir", plot_dir, "Directory for the .tsv series")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*tokenize) {
      const auto corpus = corpus_args.load();
      std::ostringstream o;
      for (const auto& spec : load_specs(tokenizer_paths)) {
        for (auto side : {Orthography::A, Orthography::B}) {
          for (const auto& r : tokenize_side(spec, corpus, side)) {
            nlohmann::ordered_json j;
            j["model"] = spec.name();
            j["sentence_id"] = r.sentence_id;
            j["orthography"] = to_string(r.orthography);
            j["tokens"] = r.tokens;
            j["token_count"] = r.token_count;
            j["word_count"] = r.word_count;
            j["char_count"] = r.char_count;
            j["fertility"] = r.fertility;
            o << j.dump() << '\n';
          }
        }
      }
      deliver(out_path, o.str(), out);
    } else if (*fertility) {
      const auto corpus = corpus_args.load();
      std::ostringstream o;
      o << "model\tfertility_a\tfertility_b\tdelta_f\n";
      for (const auto& spec : load_specs(tokenizer_paths)) {
        const auto a = tokenize_side(spec, corpus, Orthography::A);
        const auto b = tokenize_side(spec, corpus, Orthography::B);
        o << spec.name() << '\t' << format_double(mean_fertility(a)) << '\t'
          << format_double(mean_fertility(b)) << '\t' << format_double(fertility_gap(a, b))
          << '\n';
      }
      deliver(out_path, o.str(), out);
    } else if (*score) {
      const auto corpus = corpus_args.load();
      const auto source = ScorerSource::builtin(scorer_args.order, scorer_args.smoothing_k);
      std::vector<ScoreRecord> records;
      for (const auto& spec : load_specs(tokenizer_paths)) {
        for (auto side : {Orthography::A, Orthography::B}) {
          auto r = builtin_scores(spec, tokenize_side(spec, corpus, side), source,
                                  scorer_args.seed, scorer_args.mask_rate);
          records.insert(records.end(), r.begin(), r.end());
        }
      }
      std::ostringstream o;
      write_score_records(records, o);
      deliver(out_path, o.str(), out);
    } else if (*bench) {
      const auto corpus = corpus_args.load();
      const auto specs = load_specs(tokenizer_paths);
      const auto config = encoder_args.resolve(specs);
      const Encoder encoder(config);
      std::ostringstream o;
      for (const auto& spec : specs) {
        const auto seqs = bench_sequences(spec, tokenize_side(spec, corpus, Orthography::A),
                                          tokenize_side(spec, corpus, Orthography::B), config,
                                          !encoder_args.no_special_tokens);
        const auto result = run_benchmark(
            encoder, seqs, BenchmarkOptions{encoder_args.warmup, encoder_args.repeats});
        o << nlohmann::ordered_json{{"model", spec.name()}}.dump() << '\n';
        write_benchmark(result, o);
      }
      deliver(out_path, o.str(), out);
    } else if (*convert) {
      const auto table = load_mapping(mapping_path, policy(drop_unmapped));
      std::ostringstream o;
      if (!convert_corpus.path.empty()) {
        const auto corpus = convert_corpus.load();
        std::vector<SentencePair> pairs;
        for (const auto& p : corpus.pairs()) {
          pairs.push_back({p.id, p.text_a, apply_mapping(table, p.text_a)});
        }
        write_paired_corpus(PairedCorpus(std::move(pairs), corpus.label_a(),
                                         corpus.label_b(), corpus.nfc_applied()),
                            o, parse_corpus_format(convert_corpus.format));
      } else {
        std::ifstream file;
        std::istream* in = &std::cin;
        if (!input_path.empty() && input_path != "-") {
          file.open(input_path, std::ios::binary);
          if (!file) throw IoError("cannot open " + input_path);
          in = &file;
        }
        std::string line;
        while (std::getline(*in, line)) o << apply_mapping(table, line) << '\n';
      }
      deliver(out_path, o.str(), out);
    } else if (*cer) {
      const auto corpus = corpus_args.load();
      std::map<std::string, std::string> recon;
      if (!recon_path.empty()) {
        std::ifstream f(recon_path, std::ios::binary);
        if (!f) throw IoError("cannot open " + recon_path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(f, line)) {
          ++lineno;
          if (line.empty()) continue;
          const auto tab = line.find('\t');
          if (tab == std::string::npos) {
            throw ParseError("expected id<TAB>text in " + recon_path, lineno);
          }
          recon[line.substr(0, tab)] = line.substr(tab + 1);
        }
      } else if (!fwd_path.empty() && !bwd_path.empty()) {
        const auto fwd = load_mapping(fwd_path, policy(drop_unmapped));
        const auto bwd = load_mapping(bwd_path, policy(drop_unmapped));
        for (const auto& p : corpus.pairs()) recon[p.id] = round_trip(fwd, bwd, p.text_a);
      } else {
        throw ValidationError("cer needs --reconstructions or both --fwd and --bwd");
      }
      const auto summary = cer_round_trip(corpus, recon);
      deliver(out_path,
              "cer_rt\tn\n" + format_double(summary.cer_rt) + "\t" +
                  std::to_string(summary.n) + "\n",
              out);
    } else if (*audit) {
      const auto corpus = corpus_args.load();
      const auto specs = load_specs(tokenizer_paths);
      ScorerSource source = ScorerSource::builtin(scorer_args.order, scorer_args.smoothing_k);
      if (!scores_path.empty()) {
        source = ScorerSource::from_records(ingest_external_scores(scores_path, corpus),
                                            scores_path);
      }
      AuditOptions options;
      options.seed = scorer_args.seed;
      options.mask_rate = scorer_args.mask_rate;
      options.bench = {encoder_args.warmup, encoder_args.repeats};
      options.add_special_tokens = !encoder_args.no_special_tokens;
      if (fwd_path.empty() != bwd_path.empty()) {
        throw ValidationError("--fwd and --bwd must be given together");
      }
      if (!fwd_path.empty()) {
        options.conversion = Conversion{load_mapping(fwd_path, policy(drop_unmapped)),
                                        load_mapping(bwd_path, policy(drop_unmapped))};
      }
      std::optional<EncoderConfig> latency;
      if (!no_bench) latency = encoder_args.resolve(specs);

      const auto outcomes = run_audit(corpus, specs, source, latency, options);
      std::vector<ScriptTaxReport> reports;
      int status = 0;
      for (const auto& o : outcomes) {
        if (o.report) {
          reports.push_back(*o.report);
        } else {
          err << "error: model " << o.model_name << ": " << o.error << "\n";
          status = std::max(status, o.error_code);
        }
      }
      if (!reports.empty()) {
        deliver(out_path, serialize_structured(reports), out);
        if (!tabular_path.empty()) deliver(tabular_path, serialize_tabular(reports), out);
        if (!plot_dir.empty()) emit_plot_data(reports, plot_dir);
      }
      return status;
    } else if (*replay) {
      const auto reports = replay_summaries_file(summaries_path);
      deliver(out_path, serialize_structured(reports), out);
      if (!tabular_path.empty()) deliver(tabular_path, serialize_tabular(reports), out);
      if (!plot_dir.empty()) emit_plot_data(reports, plot_dir);
    } else if (*plot) {
      const auto files = emit_plot_data(load_report(report_path), plot_dir);
      out << files.fertility.string() << '\n' << files.bpc_latency.string() << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace scripttax::cli
