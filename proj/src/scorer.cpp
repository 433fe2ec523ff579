#include "scripttax/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include <json.hpp>

#include "scripttax/digest.hpp"
#include "scripttax/errors.hpp"

namespace scripttax {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::size_t mask_count(std::size_t token_count, double mask_rate) {
  if (!(mask_rate > 0.0 && mask_rate <= 1.0)) {
    throw ValidationError("mask rate must be in (0, 1], got " +
                          std::to_string(mask_rate));
  }
  // Half-up; the epsilon absorbs binary representation error of decimal
  // rates (0.35 * 10 == 3.4999999999999996).
  const double scaled = mask_rate * static_cast<double>(token_count);
  const auto rounded = static_cast<std::size_t>(std::floor(scaled + 0.5 + 1e-9));
  return std::clamp<std::size_t>(rounded, 1, std::max<std::size_t>(token_count, 1));
}

MaskPlan plan_masks(const TokenizationResult& result, std::uint64_t seed,
                    double mask_rate) {
  if (result.token_count == 0 || result.tokens.size() != result.token_count) {
    throw ValidationError("cannot plan masks for sentence \"" + result.sentence_id +
                          "\" with zero tokens");
  }
  const std::size_t n = result.token_count;
  const std::size_t m = mask_count(n, mask_rate);

  // Partial Fisher-Yates on raw engine output; std distributions are
  // implementation-defined and would break cross-platform determinism.
  std::mt19937_64 engine(splitmix64(seed ^ fnv1a64(result.sentence_id)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(engine() % (n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return MaskPlan{result.sentence_id, std::move(idx), seed, mask_rate};
}

std::string NGramScorer::context_key(std::span<const std::string> context) const {
  std::string key;
  for (const auto& t : context) {
    key += std::to_string(t.size());
    key += ':';
    key += t;
  }
  return key;
}

NGramScorer NGramScorer::train(std::span<const std::vector<std::string>> sentences,
                               std::size_t order, double smoothing_k) {
  if (order < 1) throw ValidationError("n-gram order must be >= 1");
  if (!(smoothing_k > 0.0) || !std::isfinite(smoothing_k)) {
    throw ValidationError("smoothing k must be positive and finite");
  }
  NGramScorer s;
  s.order_ = order;
  s.k_ = smoothing_k;
  std::vector<std::string> padded;
  for (const auto& sentence : sentences) {
    if (sentence.empty()) continue;
    padded.assign(order - 1, std::string(kBos));
    padded.insert(padded.end(), sentence.begin(), sentence.end());
    for (std::size_t i = order - 1; i < padded.size(); ++i) {
      std::span<const std::string> ctx(padded.data() + i - (order - 1), order - 1);
      const std::string key = s.context_key(ctx);
      auto& cc = s.counts_[key];
      ++cc.next[padded[i]];
      ++cc.total;
      if (!s.context_tokens_.contains(key)) {
        s.context_tokens_.emplace(key, std::vector<std::string>(ctx.begin(), ctx.end()));
      }
      s.vocab_.emplace(padded[i], s.vocab_.size());
    }
  }
  if (s.vocab_.empty()) throw ValidationError("cannot train n-gram on an empty corpus");
  return s;
}

bool NGramScorer::knows(std::string_view token) const {
  return vocab_.contains(std::string(token));
}

double NGramScorer::probability(std::span<const std::string> context,
                                std::string_view token) const {
  if (context.size() != order_ - 1) {
    throw ValidationError("context length " + std::to_string(context.size()) +
                          " does not match order-1 = " + std::to_string(order_ - 1));
  }
  const double v = static_cast<double>(vocab_size());
  auto it = counts_.find(context_key(context));
  if (it == counts_.end()) return 1.0 / v;
  std::size_t c = 0;
  if (auto t = it->second.next.find(std::string(token)); t != it->second.next.end()) {
    c = t->second;
  }
  return (static_cast<double>(c) + k_) /
         (static_cast<double>(it->second.total) + k_ * v);
}

double NGramScorer::probability(std::span<const std::string> tokens,
                                std::size_t pos) const {
  if (pos >= tokens.size()) throw ValidationError("token position out of range");
  std::vector<std::string> ctx;
  ctx.reserve(order_ - 1);
  for (std::size_t back = order_ - 1; back > 0; --back) {
    ctx.push_back(pos >= back ? tokens[pos - back] : std::string(kBos));
  }
  return probability(std::span<const std::string>(ctx), tokens[pos]);
}

std::vector<std::vector<std::string>> NGramScorer::contexts() const {
  std::vector<std::vector<std::string>> out;
  out.reserve(context_tokens_.size());
  for (const auto& [key, toks] : context_tokens_) out.push_back(toks);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> NGramScorer::known_tokens() const {
  std::vector<std::string> out;
  out.reserve(vocab_.size());
  for (const auto& [tok, id] : vocab_) out.push_back(tok);
  std::sort(out.begin(), out.end());
  return out;
}

double mean_masked_nll(const NGramScorer& scorer, std::span<const std::string> tokens,
                       std::span<const std::size_t> positions) {
  if (positions.empty()) throw ValidationError("mask plan has no positions");
  double total = 0.0;
  for (std::size_t pos : positions) {
    if (pos >= tokens.size()) {
      throw ValidationError("masked position " + std::to_string(pos) +
                            " out of range for " + std::to_string(tokens.size()) +
                            " tokens");
    }
    total -= std::log(scorer.probability(tokens, pos));
  }
  return total / static_cast<double>(positions.size());
}

ScoreRecord score_masked(const NGramScorer& scorer, const TokenizationResult& result,
                         const MaskPlan& plan, std::string model_name) {
  if (plan.sentence_id != result.sentence_id) {
    throw ValidationError("mask plan for \"" + plan.sentence_id +
                          "\" applied to sentence \"" + result.sentence_id + "\"");
  }
  ScoreRecord r;
  r.sentence_id = result.sentence_id;
  r.orthography = result.orthography;
  r.model_name = std::move(model_name);
  r.mean_nll_nats = mean_masked_nll(scorer, result.tokens, plan.masked_positions);
  r.masked_count = plan.masked_positions.size();
  return r;
}

std::vector<ScoreRecord> parse_external_scores(std::istream& in,
                                               const PairedCorpus& corpus) {
  std::vector<ScoreRecord> records;
  std::vector<std::string> issues;
  std::set<std::tuple<std::string, int, std::string>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    ScoreRecord r;
    try {
      auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw std::runtime_error("record is not an object");
      r.sentence_id = j.at("sentence_id").get<std::string>();
      r.orthography = parse_orthography(j.at("orthography").get<std::string>());
      r.model_name = j.at("model").get<std::string>();
      const auto& nll = j.at("mean_nll_nats");
      if (!nll.is_number()) throw std::runtime_error("mean_nll_nats is not a number");
      r.mean_nll_nats = nll.get<double>();
      const auto& mc = j.at("masked_count");
      if (!mc.is_number_integer()) throw std::runtime_error("masked_count is not an integer");
      const auto count = mc.get<std::int64_t>();
      if (count < 1) throw std::runtime_error("masked_count must be >= 1");
      r.masked_count = static_cast<std::size_t>(count);
    } catch (const std::exception& e) {
      issues.push_back(where + e.what());
      continue;
    }
    if (!std::isfinite(r.mean_nll_nats) || r.mean_nll_nats < 0.0) {
      issues.push_back(where + "mean_nll_nats must be finite and >= 0 (sentence \"" +
                       r.sentence_id + "\")");
      continue;
    }
    if (corpus.find(r.sentence_id) == corpus.size()) {
      issues.push_back(where + "unknown sentence_id \"" + r.sentence_id + "\"");
      continue;
    }
    if (!seen.emplace(r.sentence_id, static_cast<int>(r.orthography), r.model_name)
             .second) {
      issues.push_back(where + "duplicate score for (\"" + r.sentence_id + "\", " +
                       std::string(to_string(r.orthography)) + ", \"" +
                       r.model_name + "\")");
      continue;
    }
    records.push_back(std::move(r));
  }
  if (!issues.empty()) {
    std::string msg = "rejected " + std::to_string(issues.size()) + " score record(s): ";
    for (std::size_t i = 0; i < issues.size(); ++i) msg += (i ? "; " : "") + issues[i];
    throw ValidationError(msg);
  }
  return records;
}

std::vector<ScoreRecord> ingest_external_scores(const std::filesystem::path& path,
                                                const PairedCorpus& corpus) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open score file " + path.string());
  return parse_external_scores(in, corpus);
}

void write_score_records(std::span<const ScoreRecord> records, std::ostream& out) {
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["sentence_id"] = r.sentence_id;
    j["orthography"] = to_string(r.orthography);
    j["model"] = r.model_name;
    j["mean_nll_nats"] = r.mean_nll_nats;
    j["masked_count"] = r.masked_count;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("failed writing score records");
}

}  // namespace scripttax
