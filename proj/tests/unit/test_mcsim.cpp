#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cqrl/gf.hpp"
#include "cqrl/mcsim.hpp"
#include "cqrl/scalar.hpp"
#include "expect_kind.hpp"

using namespace cqrl;
using namespace cqrl::mcsim;

TEST(LikelihoodEncoder, WeightsFollowTargetMass) {
  const auto code = gf::random_nested_code(6, 3, 1, 3, 4);
  const std::vector<double> p = {0.5, 0.3, 0.2};
  const gf::Vector m = {2};
  const auto w = likelihood_weights(code, m, p);
  const auto words = gf::enumerate_coset(code, m);
  ASSERT_EQ(w.size(), words.size());
  std::vector<double> mass;
  double tot = 0;
  for (const auto& u : words) {
    double q = 1;
    for (int s : u) q *= p[static_cast<size_t>(s)];
    mass.push_back(q);
    tot += q;
  }
  double sum = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    EXPECT_NEAR(w[i], mass[i] / tot, 1e-14);
    sum += w[i];
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(LikelihoodEncoder, EmpiricalFrequenciesMatchWeights) {
  const auto code = gf::random_nested_code(5, 2, 1, 2, 8);
  const std::vector<double> p = {0.7, 0.3};
  const gf::Vector m = {1};
  const auto w = likelihood_weights(code, m, p);
  Rng rng(3);
  std::vector<int> counts(w.size(), 0);
  const int draws = 40000;
  for (int i = 0; i < draws; ++i) ++counts[likelihood_encode(code, m, p, rng)];
  for (size_t a = 0; a < w.size(); ++a) EXPECT_NEAR(counts[a] / static_cast<double>(draws), w[a], 0.01);
}

TEST(LikelihoodEncoder, ZeroMassCosetAndResampling) {
  gf::NestedCosetCode code;
  code.n = 3;
  code.modulus = 2;
  code.g_I = gf::Matrix(0, 3);
  code.g_OI = gf::Matrix(0, 3);
  code.bias = {1, 0, 0};
  const std::vector<double> p = {1.0, 0.0};
  EXPECT_KIND(likelihood_weights(code, {}, p), ErrorKind::ZeroMassCoset);
  Rng rng(1);
  uint64_t retries = 0;
  likelihood_encode_resampling(code, {}, p, rng, retries);
  EXPECT_GT(retries, 0u);
  EXPECT_EQ(code.bias, (gf::Vector{0, 0, 0}));
  EXPECT_KIND(likelihood_weights(code, {}, {0.5, 0.25, 0.25}), ErrorKind::LengthMismatch);
}

TEST(Wilson, MatchesClosedForm) {
  const double z = 1.959963984540054;
  for (auto [e, n] : {std::pair<uint64_t, uint64_t>{0, 10}, {3, 40}, {500, 1000}, {10, 10}}) {
    const double ph = static_cast<double>(e) / n, nn = static_cast<double>(n);
    const double c = (ph + z * z / (2 * nn)) / (1 + z * z / nn);
    const double h = z / (1 + z * z / nn) * std::sqrt(ph * (1 - ph) / nn + z * z / (4 * nn * nn));
    const auto w = wilson(e, n);
    EXPECT_DOUBLE_EQ(w.estimate, ph);
    EXPECT_NEAR(w.lo, std::max(0.0, c - h), 1e-14);
    EXPECT_NEAR(w.hi, std::min(1.0, c + h), 1e-14);
  }
  EXPECT_KIND(wilson(0, 0), ErrorKind::DomainError);
}

TEST(Ex1Sim, DeterministicAcrossThreadCounts) {
  auto c = ex1_config_below_threshold(12, {0.05, 0.05, 0.05}, 0.2, 0.25);
  c.trials = 300;
  c.seed = 17;
  const auto a = run_ex1_sim(c);
  c.threads = 3;
  const auto b = run_ex1_sim(c);
  EXPECT_EQ(a.errors, b.errors);
  EXPECT_EQ(csv_row(a), csv_row(b));
  c.decoder = Decoder::SumCoset;
  c.threads = 1;
  const auto s1 = run_ex1_sim(c);
  c.threads = 2;
  EXPECT_EQ(run_ex1_sim(c).errors, s1.errors);
}

TEST(Ex1Sim, NoiselessChannelsRarelyErr) {
  SimConfig c;
  c.n = 10;
  c.l = {3, 2, 2};
  c.delta = {0.0, 0.0, 0.0};
  c.tau = 0.3;
  c.trials = 200;
  c.seed = 2;
  const auto r = run_ex1_sim(c);
  // Clean channels: errors only come from singular generators or colliding
  // codewords, which are rare at these sizes.
  EXPECT_LE(r.error_rate[1].estimate, 0.02);
  EXPECT_LE(r.error_rate[2].estimate, 0.02);
  EXPECT_LT(r.error_rate[0].estimate, 0.2);
}

TEST(Ex1Sim, ThresholdsAndConfig) {
  const auto t = ex1_thresholds({0.1, 0.1, 0.1}, 0.2);
  EXPECT_NEAR(t.r1, binary_entropy(binary_convolve(0.2, 0.1)) - binary_entropy(0.1), 1e-14);
  EXPECT_NEAR(t.sum, 1 - binary_entropy(0.1), 1e-14);
  const auto c = ex1_config_below_threshold(20, {0.1, 0.1, 0.1}, 0.2, 0.25);
  EXPECT_EQ(c.l[0], static_cast<int>(std::floor(0.75 * t.r1 * 20 + 1e-9)));
  EXPECT_LT(sim_rates(c)[0], t.r1);
  EXPECT_LT(sim_rates(c)[0] + sim_rates(c)[1], t.sum);
}

TEST(Ex1Sim, ValidationAndBudget) {
  SimConfig c;
  c.n = 0;
  EXPECT_KIND(run_ex1_sim(c), ErrorKind::DomainError);
  c.n = 40;
  c.l = {12, 12, 12};
  EXPECT_KIND(run_ex1_sim(c), ErrorKind::BudgetExceeded);
  c.l = {1, 1, 1};
  c.delta = {0.7, 0.1, 0.1};
  EXPECT_KIND(run_ex1_sim(c), ErrorKind::DomainError);
  EXPECT_KIND(decoder_from_string("bogus"), ErrorKind::ParseError);
  EXPECT_EQ(decoder_from_string(to_string(Decoder::SumCoset)), Decoder::SumCoset);
}

TEST(Ex1Sim, CsvShape) {
  auto c = ex1_config_below_threshold(12, {0.05, 0.05, 0.05}, 0.2, 0.25);
  c.trials = 20;
  const auto row = csv_row(run_ex1_sim(c));
  auto count = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  EXPECT_EQ(count(row), count(csv_header()));
}

TEST(SoftCovering, EndpointsAndUniformTarget) {
  const std::vector<double> p = {0.7, 0.3};
  const int n = 4;
  // k = 0: every coset is one word, so TV = ½ Σ_u |2⁻ⁿ − pⁿ(u)|.
  double tv0 = 0;
  for (int w = 0; w <= n; ++w) {
    const double pu = std::pow(0.7, n - w) * std::pow(0.3, w);
    const double binom = std::tgamma(n + 1) / (std::tgamma(w + 1) * std::tgamma(n - w + 1));
    tv0 += 0.5 * binom * std::abs(1.0 / 16 - pu);
  }
  EXPECT_NEAR(soft_covering_tv(n, 0, 2, p, 1, 5), tv0, 1e-14);
  EXPECT_EQ(soft_covering_tv(n, n, 2, p, 1, 5), 0.0);
  for (int k = 0; k <= 3; ++k) EXPECT_NEAR(soft_covering_tv(3, k, 3, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 2, 4), 0.0, 1e-14);
  const auto curve = soft_covering_curve(8, 2, {0.8, 0.2}, 3, 10);
  ASSERT_EQ(curve.size(), 9u);
  for (size_t k = 1; k < curve.size(); ++k) EXPECT_LE(curve[k], curve[k - 1] + 1e-12);
  for (int k = 0; k <= 8; ++k) EXPECT_NEAR(soft_covering_tv(8, k, 2, {0.8, 0.2}, 3, 10), curve[static_cast<size_t>(k)], 1e-14);
  EXPECT_KIND(soft_covering_tv(17, 3, 2, p, 1, 1), ErrorKind::TooLarge);
  EXPECT_KIND(soft_covering_tv(4, 5, 2, p, 1, 1), ErrorKind::DomainError);
}
