#include "scripttax/latency.hpp"

#include <sys/utsname.h>

#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <thread>

#include <Eigen/Dense>
#include <json.hpp>

#include "scripttax/errors.hpp"
#include "scripttax/metrics.hpp"

namespace scripttax {

using Matrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<float, 1, Eigen::Dynamic>;
using Clock = std::chrono::steady_clock;

void EncoderConfig::validate() const {
  if (layers == 0 || hidden_dim == 0 || heads == 0 || ffn_dim == 0 || vocab_size == 0) {
    throw ValidationError("encoder dimensions must all be >= 1");
  }
  if (hidden_dim % heads != 0) {
    throw ValidationError("hidden_dim " + std::to_string(hidden_dim) +
                          " is not divisible by heads " + std::to_string(heads));
  }
  if (vocab_size < 3) throw ValidationError("encoder vocab_size must be >= 3");
}

EncoderConfig reference_encoder_config() { return EncoderConfig{}; }

struct Encoder::Weights {
  struct Layer {
    Matrix wq, wk, wv, wo, w1, w2;
    RowVector bq, bk, bv, bo, b1, b2;
    RowVector ln1_gain, ln1_bias, ln2_gain, ln2_bias;
  };
  Matrix embedding;
  std::vector<Layer> layers;
};

namespace {

class WeightInit {
 public:
  explicit WeightInit(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [-scale, scale) from the top 24 bits of each draw.
  Matrix uniform(std::size_t rows, std::size_t cols, float scale) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = next(scale);
    return m;
  }
  RowVector uniform_row(std::size_t cols, float scale) {
    RowVector v(cols);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = next(scale);
    return v;
  }

 private:
  float next(float scale) {
    const float unit = static_cast<float>(engine_() >> 40) * (1.0f / 16777216.0f);
    return (2.0f * unit - 1.0f) * scale;
  }
  std::mt19937_64 engine_;
};

void layer_norm(Matrix& x, const RowVector& gain, const RowVector& bias) {
  constexpr float kEps = 1e-5f;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    auto row = x.row(i);
    const float mu = row.mean();
    row.array() -= mu;
    const float var = row.squaredNorm() / static_cast<float>(row.size());
    row *= 1.0f / std::sqrt(var + kEps);
    row = row.cwiseProduct(gain) + bias;
  }
}

void softmax_rows(Matrix& s) {
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    auto row = s.row(i);
    row.array() = (row.array() - row.maxCoeff()).exp();
    row /= row.sum();
  }
}

}  // namespace

Encoder::Encoder(EncoderConfig config)
    : config_(config), weights_(std::make_unique<Weights>()) {
  config_.validate();
  const std::size_t d = config_.hidden_dim;
  const std::size_t f = config_.ffn_dim;
  WeightInit init(config_.seed);
  const float sd = 1.0f / std::sqrt(static_cast<float>(d));
  const float sf = 1.0f / std::sqrt(static_cast<float>(f));
  weights_->embedding = init.uniform(config_.vocab_size, d, 1.0f);
  for (std::size_t l = 0; l < config_.layers; ++l) {
    Weights::Layer layer;
    layer.wq = init.uniform(d, d, sd);
    layer.wk = init.uniform(d, d, sd);
    layer.wv = init.uniform(d, d, sd);
    layer.wo = init.uniform(d, d, sd);
    layer.w1 = init.uniform(d, f, sd);
    layer.w2 = init.uniform(f, d, sf);
    layer.bq = init.uniform_row(d, sd);
    layer.bk = init.uniform_row(d, sd);
    layer.bv = init.uniform_row(d, sd);
    layer.bo = init.uniform_row(d, sd);
    layer.b1 = init.uniform_row(f, sd);
    layer.b2 = init.uniform_row(d, sf);
    layer.ln1_gain = RowVector::Ones(d);
    layer.ln1_bias = RowVector::Zero(d);
    layer.ln2_gain = RowVector::Ones(d);
    layer.ln2_bias = RowVector::Zero(d);
    weights_->layers.push_back(std::move(layer));
  }
}

Encoder::~Encoder() = default;
Encoder::Encoder(Encoder&&) noexcept = default;
Encoder& Encoder::operator=(Encoder&&) noexcept = default;

ForwardResult Encoder::forward(std::span<const std::int32_t> token_ids) const {
  if (token_ids.empty()) throw ValidationError("encoder input is empty");
  for (auto id : token_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= config_.vocab_size) {
      throw ValidationError("token id " + std::to_string(id) + " outside vocab_size " +
                            std::to_string(config_.vocab_size));
    }
  }
  const auto start = Clock::now();

  const auto n = static_cast<Eigen::Index>(token_ids.size());
  const auto d = static_cast<Eigen::Index>(config_.hidden_dim);
  const auto dh = d / static_cast<Eigen::Index>(config_.heads);
  const float scale = 1.0f / std::sqrt(static_cast<float>(dh));

  Matrix x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = weights_->embedding.row(token_ids[static_cast<std::size_t>(i)]);
    for (Eigen::Index k = 0; k < d; k += 2) {
      const double angle =
          static_cast<double>(i) / std::pow(10000.0, static_cast<double>(k) / d);
      x(i, k) += static_cast<float>(std::sin(angle));
      if (k + 1 < d) x(i, k + 1) += static_cast<float>(std::cos(angle));
    }
  }

  Matrix context(n, d);
  Matrix scores(n, n);
  for (const auto& layer : weights_->layers) {
    Matrix q = (x * layer.wq).rowwise() + layer.bq;
    Matrix k = (x * layer.wk).rowwise() + layer.bk;
    Matrix v = (x * layer.wv).rowwise() + layer.bv;
    for (Eigen::Index h = 0; h < static_cast<Eigen::Index>(config_.heads); ++h) {
      scores.noalias() = q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose();
      scores *= scale;
      softmax_rows(scores);
      context.middleCols(h * dh, dh).noalias() = scores * v.middleCols(h * dh, dh);
    }
    x += (context * layer.wo).rowwise() + layer.bo;
    layer_norm(x, layer.ln1_gain, layer.ln1_bias);

    Matrix hidden = ((x * layer.w1).rowwise() + layer.b1).cwiseMax(0.0f);
    x += (hidden * layer.w2).rowwise() + layer.b2;
    layer_norm(x, layer.ln2_gain, layer.ln2_bias);
  }

  const double checksum = x.cast<double>().sum();
  const std::chrono::duration<double> elapsed = Clock::now() - start;
  return {elapsed.count(), checksum};
}

ForwardResult encoder_forward(const Encoder& encoder,
                              std::span<const std::int32_t> token_ids) {
  return encoder.forward(token_ids);
}

CostBreakdown analytic_cost(const EncoderConfig& config, std::size_t seq_len) {
  config.validate();
  if (seq_len == 0) throw ValidationError("analytic cost needs L >= 1");
  const std::uint64_t layers = config.layers;
  const std::uint64_t l = seq_len;
  const std::uint64_t h = config.hidden_dim;
  const std::uint64_t f = config.ffn_dim;
  return {layers * 4 * l * l * h, layers * 4 * l * h * (2 * h + f)};
}

TimerInfo probe_timer() {
  TimerInfo info;
  info.nominal_resolution_s =
      static_cast<double>(Clock::period::num) / static_cast<double>(Clock::period::den);
  double smallest = 1.0;
  for (int i = 0; i < 1000; ++i) {
    const auto a = Clock::now();
    auto b = Clock::now();
    while (b == a) b = Clock::now();
    smallest = std::min(smallest, std::chrono::duration<double>(b - a).count());
  }
  info.measured_resolution_s = smallest;
  info.min_reliable_s = 100.0 * std::max(info.nominal_resolution_s, smallest);
  return info;
}

namespace {

LatencySummary summarize(Orthography o, const std::vector<SentenceTiming>& timings,
                         std::size_t warmup) {
  std::vector<double> medians;
  double total_len = 0.0;
  for (const auto& t : timings) {
    if (t.orthography != o) continue;
    medians.push_back(t.median_seconds);
    total_len += static_cast<double>(t.token_len);
  }
  LatencySummary s;
  s.orthography = o;
  s.n = medians.size();
  s.median_seconds = median(std::move(medians));
  s.throughput_sps = 1.0 / s.median_seconds;
  s.mean_token_len = total_len / static_cast<double>(s.n);
  s.warmup_discarded = warmup * s.n;
  return s;
}

}  // namespace

BenchmarkResult run_benchmark(const TimedRun& run, std::span<const BenchSequence> sequences,
                              const BenchmarkOptions& options, const TimerInfo& timer) {
  if (sequences.empty()) throw ValidationError("benchmark needs at least one sequence");
  if (options.repeats == 0) throw ValidationError("benchmark repeats must be >= 1");
  BenchmarkResult result;
  result.timer = timer;
  result.environment = environment_string();
  bool has_a = false;
  bool has_b = false;
  std::vector<double> samples;
  for (const auto& seq : sequences) {
    if (seq.token_ids.empty()) {
      throw ValidationError("benchmark sequence \"" + seq.sentence_id + "\" is empty");
    }
    for (std::size_t w = 0; w < options.warmup; ++w) run(seq);
    samples.clear();
    for (std::size_t r = 0; r < options.repeats; ++r) {
      const double t = run(seq);
      if (!(t >= timer.min_reliable_s) || !std::isfinite(t)) {
        throw ValidationError("timed run of \"" + seq.sentence_id + "\" took " +
                              std::to_string(t) +
                              " s, below the 100-tick reliability floor of " +
                              std::to_string(timer.min_reliable_s) + " s");
      }
      samples.push_back(t);
    }
    result.sentences.push_back({seq.sentence_id, seq.orthography, seq.token_ids.size(),
                                median(samples), options.repeats});
    (seq.orthography == Orthography::A ? has_a : has_b) = true;
  }
  if (has_a) result.summary_a = summarize(Orthography::A, result.sentences, options.warmup);
  if (has_b) result.summary_b = summarize(Orthography::B, result.sentences, options.warmup);
  return result;
}

BenchmarkResult run_benchmark(const Encoder& encoder,
                              std::span<const BenchSequence> sequences,
                              const BenchmarkOptions& options) {
  volatile double sink = 0.0;
  auto run = [&](const BenchSequence& seq) {
    const ForwardResult r = encoder.forward(seq.token_ids);
    sink = sink + r.checksum;
    return r.seconds;
  };
  BenchmarkResult result = run_benchmark(run, sequences, options, probe_timer());
  result.config = encoder.config();
  return result;
}

std::vector<std::int32_t> model_input_ids(const TokenizerSpec& spec,
                                          const TokenizationResult& result,
                                          const EncoderConfig& config,
                                          bool add_special_tokens) {
  config.validate();
  const std::size_t span = config.vocab_size - 2;
  std::vector<std::int32_t> ids;
  ids.reserve(result.tokens.size() + 2);
  if (add_special_tokens) ids.push_back(0);
  for (const auto& tok : result.tokens) {
    const std::uint32_t vid = spec.id(tok).value_or(spec.unk_id());
    ids.push_back(static_cast<std::int32_t>(2 + vid % span));
  }
  if (add_special_tokens) ids.push_back(1);
  return ids;
}

std::string environment_string() {
  std::string env;
  utsname u{};
  if (uname(&u) == 0) {
    env += std::string(u.sysname) + " " + u.release + " " + u.machine;
  }
#if defined(__clang__)
  env += "; clang " __clang_version__;
#elif defined(__GNUC__)
  env += "; gcc " __VERSION__;
#endif
  env += "; eigen " + std::to_string(EIGEN_WORLD_VERSION) + "." +
         std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION);
  env += " simd=" + std::string(Eigen::SimdInstructionSetsInUse());
  env += "; hw_threads=" + std::to_string(std::thread::hardware_concurrency());
  env += "; bench_threads=1";
  return env;
}

void write_benchmark(const BenchmarkResult& result, std::ostream& out) {
  for (const auto& t : result.sentences) {
    nlohmann::ordered_json j;
    j["sentence_id"] = t.sentence_id;
    j["orthography"] = to_string(t.orthography);
    j["token_len"] = t.token_len;
    j["median_seconds"] = t.median_seconds;
    j["repeats"] = t.repeats;
    out << j.dump() << '\n';
  }
  nlohmann::ordered_json s;
  s["summary"] = true;
  for (const auto* sum : {&result.summary_a, &result.summary_b}) {
    if (!*sum) continue;
    nlohmann::ordered_json o;
    o["n"] = (*sum)->n;
    o["median_seconds"] = (*sum)->median_seconds;
    o["throughput_sps"] = (*sum)->throughput_sps;
    o["mean_token_len"] = (*sum)->mean_token_len;
    o["warmup_discarded"] = (*sum)->warmup_discarded;
    s[std::string(to_string((*sum)->orthography))] = o;
  }
  if (result.summary_a && result.summary_b) {
    s["rho_lat"] = latency_tax(result.summary_a->median_seconds,
                               result.summary_b->median_seconds);
  }
  if (result.config) {
    const auto& c = *result.config;
    s["config"] = {{"layers", c.layers},       {"hidden_dim", c.hidden_dim},
                   {"heads", c.heads},         {"ffn_dim", c.ffn_dim},
                   {"vocab_size", c.vocab_size}, {"seed", c.seed}};
  }
  s["timer_resolution_s"] = std::max(result.timer.nominal_resolution_s,
                                     result.timer.measured_resolution_s);
  s["environment"] = result.environment;
  out << s.dump() << '\n';
  if (!out) throw IoError("failed writing benchmark output");
}

}  // namespace scripttax
