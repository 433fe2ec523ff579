#include "scripttax/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "scripttax/errors.hpp"
#include "scripttax/unicode.hpp"

namespace scripttax {
namespace {

TokenizationResult with_fertility(std::string id, double f) {
  TokenizationResult r;
  r.sentence_id = std::move(id);
  r.fertility = f;
  return r;
}

TEST(FertilityGap, ReportedEndpoints) {
  const std::vector<TokenizationResult> a1 = {with_fertility("s", 2.35)};
  const std::vector<TokenizationResult> b1 = {with_fertility("s", 6.73)};
  const std::vector<TokenizationResult> a2 = {with_fertility("s", 2.10)};
  const std::vector<TokenizationResult> b2 = {with_fertility("s", 6.85)};
  EXPECT_NEAR(fertility_gap(a1, b1), 4.38, 1e-12);
  EXPECT_NEAR(fertility_gap(a2, b2), 4.75, 1e-12);
}

TEST(FertilityGap, MeanOfDifferences) {
  const std::vector<TokenizationResult> a = {with_fertility("x", 1.0), with_fertility("y", 2.0)};
  const std::vector<TokenizationResult> b = {with_fertility("x", 2.0), with_fertility("y", 5.0)};
  EXPECT_DOUBLE_EQ(fertility_gap(a, b), 2.0);
  EXPECT_DOUBLE_EQ(fertility_gap(a, a), 0.0);
  EXPECT_DOUBLE_EQ(fertility_gap(b, a), -2.0);
}

TEST(FertilityGap, MismatchedIds) {
  const std::vector<TokenizationResult> a = {with_fertility("x", 1.0)};
  const std::vector<TokenizationResult> b = {with_fertility("y", 1.0)};
  EXPECT_THROW(fertility_gap(a, b), ValidationError);
  EXPECT_THROW(fertility_gap(a, {}), ValidationError);
}

TEST(FertilityGap, AntisymmetryProperty) {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> f(1.0, 8.0);
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<TokenizationResult> a, b;
    for (int i = 0; i < 1 + iter % 7; ++i) {
      a.push_back(with_fertility(std::to_string(i), f(rng)));
      b.push_back(with_fertility(std::to_string(i), f(rng)));
    }
    EXPECT_NEAR(fertility_gap(a, b), -fertility_gap(b, a), 1e-12);
  }
}

TEST(Bpc, Examples) {
  EXPECT_DOUBLE_EQ(bpc(std::numbers::ln2, 4, 8), 0.5);
  EXPECT_DOUBLE_EQ(bpc(0.0, 4, 8), 0.0);
  EXPECT_DOUBLE_EQ(bpc(2 * std::numbers::ln2, 3, 6), 1.0);
}

TEST(Bpc, Errors) {
  EXPECT_THROW(bpc(1.0, 1, 0), ValidationError);
  EXPECT_THROW(bpc(1.0, 0, 4), ValidationError);
  EXPECT_THROW(bpc(-1.0, 1, 4), ValidationError);
  EXPECT_THROW(bpc(std::nan(""), 1, 4), ValidationError);
}

TEST(BpcProperty, RedistributionInvariance) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> total(0.0, 200.0);
  std::uniform_int_distribution<std::size_t> chars(1, 500);
  for (int iter = 0; iter < 500; ++iter) {
    const double t = total(rng);
    const std::size_t c = chars(rng);
    const double ref = bpc(t, 1, c);
    for (std::size_t m = 1; m <= 20; ++m) {
      EXPECT_NEAR(bpc(t / static_cast<double>(m), m, c), ref, 1e-12);
    }
  }
}

TEST(BpcProperty, ScalingLinearity) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> nll(0.01, 10.0);
  std::uniform_int_distribution<std::size_t> small(1, 30);
  for (int iter = 0; iter < 200; ++iter) {
    const double x = nll(rng);
    const std::size_t m = small(rng), c = small(rng);
    const double base = bpc(x, m, c);
    EXPECT_NEAR(bpc(3 * x, m, c), 3 * base, 1e-12 * (1 + base));
    EXPECT_NEAR(bpc(x, 2 * m, c), 2 * base, 1e-12 * (1 + base));
    EXPECT_NEAR(bpc(x, m, 4 * c), base / 4, 1e-12 * (1 + base));
  }
}

TEST(BpcTax, ReportedValues) {
  EXPECT_NEAR(bpc_tax(8.06, 9.65), 0.1973, 5e-5);
  EXPECT_NEAR(bpc_tax(12.19, 17.94), 0.4717, 5e-5);
  EXPECT_DOUBLE_EQ(bpc_tax(3.0, 3.0), 0.0);
  EXPECT_THROW(bpc_tax(0.0, 1.0), ValidationError);
  EXPECT_THROW(bpc_tax(-1.0, 1.0), ValidationError);
}

TEST(BpcTaxProperty, SwapRelation) {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> v(0.01, 50.0);
  for (int iter = 0; iter < 500; ++iter) {
    const double a = v(rng), b = v(rng);
    const double ab = bpc_tax(a, b);
    const double ba = -ab / (1 + ab);
    // Rounding in ab is amplified by d(ba)/d(ab) = -1 / (1 + ab)^2, about ba^2.
    EXPECT_NEAR(bpc_tax(b, a), ba, 1e-12 * (1 + ba * ba));
  }
}

TEST(LatencyTax, Examples) {
  EXPECT_NEAR(latency_tax(1 / 3.8, 1 / 0.23), 16.52, 0.01);
  EXPECT_EQ(latency_tax(0.7, 0.7), 1.0);
  EXPECT_DOUBLE_EQ(latency_tax(2.0, 5.0), 2.5);
  EXPECT_THROW(latency_tax(0.0, 1.0), ValidationError);
}

TEST(QuadraticCostRatio, Examples) {
  EXPECT_NEAR(quadratic_cost_ratio(1.0, 3.4), 11.56, 1e-12);
  EXPECT_EQ(quadratic_cost_ratio(7.0, 7.0), 1.0);
  EXPECT_EQ(quadratic_cost_ratio(10, 20), 4.0);
  for (double l : {1.0, 3.0, 17.0, 512.0}) EXPECT_EQ(quadratic_cost_ratio(l, 2 * l), 4.0);
  EXPECT_THROW(quadratic_cost_ratio(0.0, 5.0), ValidationError);
}

TEST(Median, OddEvenAndOutlier) {
  EXPECT_EQ(median({5, 4, 6}), 5);
  EXPECT_EQ(median({1, 2, 3, 4}), 2.5);
  EXPECT_THROW(median({}), ValidationError);
  const std::vector<double> base = {3, 1, 4, 1.5, 9, 2.6};
  auto spiked = base;
  *std::max_element(spiked.begin(), spiked.end()) *= 100;
  EXPECT_EQ(median(spiked), median(base));
}

TEST(EditDistance, Examples) {
  EXPECT_EQ(edit_distance("kitten", "sitting").distance, 3u);
  EXPECT_EQ(edit_distance("same", "same").distance, 0u);
  EXPECT_EQ(edit_distance("", "abc").distance, 3u);
  EXPECT_EQ(edit_distance("abc", "").ref_len, 3u);
  // Code points, not bytes: á vs a is one substitution.
  EXPECT_EQ(edit_distance("\xC3\xA1", "a").distance, 1u);
  EXPECT_EQ(oracle::edit_distance(U"kitten", U"sitting"), 3u);
}

std::vector<std::u32string> all_strings(std::size_t max_len) {
  std::vector<std::u32string> out = {U""};
  std::size_t begin = 0;
  for (std::size_t len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (char32_t c : {U'a', U'b', U'c'}) out.push_back(out[i] + c);
    }
    begin = end;
  }
  return out;
}

TEST(EditDistanceProperty, OracleAgreementAndMetricAxiomsLen3) {
  const auto strings = all_strings(3);
  ASSERT_EQ(strings.size(), 40u);
  for (const auto& a : strings) {
    for (const auto& b : strings) {
      const auto d = levenshtein(a, b);
      EXPECT_EQ(d, oracle::edit_distance(a, b));
      EXPECT_EQ(d, levenshtein(b, a));
      EXPECT_EQ(d == 0, a == b);
      EXPECT_LE(d, std::max(a.size(), b.size()));
      for (const auto& c : strings) {
        EXPECT_LE(levenshtein(a, c), d + levenshtein(b, c));
      }
    }
  }
}

TEST(Cer, Examples) {
  const PairedCorpus c({{"s1", "abcd", "x"}});
  EXPECT_DOUBLE_EQ(cer_round_trip(c, {{"s1", "abcd"}}).cer_rt, 0.0);
  EXPECT_DOUBLE_EQ(cer_round_trip(c, {{"s1", "abxd"}}).cer_rt, 0.25);
  EXPECT_EQ(cer_round_trip(c, {{"s1", "abxd"}}).n, 1u);
}

TEST(Cer, DenominatorExcludesSpacesAndMayExceedOne) {
  const PairedCorpus c({{"s1", "a b", "x"}, {"s2", "z", "y"}});
  // s1: ED("a b","a c") = 1 over C = 2; s2: ED("z","zzz") = 2 over C = 1.
  const auto s = cer_round_trip(c, {{"s1", "a c"}, {"s2", "zzz"}});
  EXPECT_DOUBLE_EQ(s.cer_rt, (0.5 + 2.0) / 2);
}

TEST(Cer, MissingReconstruction) {
  const PairedCorpus c({{"s1", "abcd", "x"}});
  EXPECT_THROW(cer_round_trip(c, {{"other", "abcd"}}), ValidationError);
}

TEST(ScriptTaxTriple, JsonRoundTrip) {
  Provenance p;
  p.mask_seed = 13;
  p.mask_rate = 0.15;
  p.tokenizer_name = "mbert-like";
  const auto t = script_tax_triple("mbert-like", 4.38, 16.52, 0.197, p);
  nlohmann::ordered_json j = t;
  EXPECT_EQ(j.get<ScriptTaxTriple>(), t);
  const auto none = script_tax_triple("same", 0, 1.0, 0);
  EXPECT_EQ(none.delta_f, 0.0);
  EXPECT_EQ(none.rho_lat, 1.0);
  nlohmann::ordered_json j2 = none;
  EXPECT_EQ(nlohmann::ordered_json::parse(j2.dump()).get<ScriptTaxTriple>(), none);
}

}  // namespace
}  // namespace scripttax
