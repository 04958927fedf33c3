#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cqrl/gf.hpp"
#include "cqrl/rng.hpp"

namespace cqrl::mcsim {

// Normalized selection probabilities over the υ^k indices of coset m, weight
// of index a ∝ Π_t p(u_t) / q(u_t) with q uniform. ZeroMassCoset when every
// codeword has zero target mass.
std::vector<double> likelihood_weights(const gf::NestedCosetCode& code, const gf::Vector& m, const std::vector<double>& p);
uint64_t likelihood_encode(const gf::NestedCosetCode& code, const gf::Vector& m, const std::vector<double>& p, Rng& rng);
// Redraws the bias (at most `max_retries` times) while the coset has zero
// target mass; the number of redraws is added to `retries`.
uint64_t likelihood_encode_resampling(gf::NestedCosetCode& code, const gf::Vector& m, const std::vector<double>& p,
                                      Rng& rng, uint64_t& retries, int max_retries = 100);

enum class Decoder { MlJoint, SumCoset };
std::string to_string(Decoder d);
Decoder decoder_from_string(const std::string& s);  // ParseError

// Ex. 1 over its classical equivalent: Y₁ = X₁ ⊕ X₂ ⊕ X₃ ⊕ N₁, Y_j = X_j ⊕ N_j.
// User 1 draws an IID Ber(τ) codebook of 2^{l₁} words; users 2, 3 share
// generator rows (binary nested coset codes, dims k_j, l_j).
struct SimConfig {
  int n = 12;
  std::array<int, 3> k{0, 0, 0};  // k[0] unused
  std::array<int, 3> l{1, 1, 1};
  std::array<double, 3> delta{0.0, 0.0, 0.0};
  double tau = 0.5;
  uint64_t trials = 10000;
  uint64_t seed = 0;
  int threads = 1;
  Decoder decoder = Decoder::MlJoint;
};

struct Interval {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};
// Wilson score interval, z = 1.959963984540054 (95%).
Interval wilson(uint64_t errors, uint64_t trials);

struct SimResult {
  SimConfig cfg;
  std::array<uint64_t, 3> errors{};
  std::array<Interval, 3> error_rate{};
  std::array<double, 3> ones_fraction{};  // empirical type of the sent codewords
  uint64_t bias_retries = 0;
};

// Candidates per decoder must stay ≤ gf::enumeration_cap (BudgetExceeded).
SimResult run_ex1_sim(const SimConfig& cfg);
std::array<double, 3> sim_rates(const SimConfig& cfg);
std::string csv_header();
std::string csv_row(const SimResult& r);

// Thresholds of the Ex. 1 coding argument: R₁ < h_b(τ∗δ₁) − h_b(δ₁),
// R₁ + R_j < 1 − h_b(δ₁), R_j < 1 − h_b(δ_j).
struct Ex1Thresholds {
  double r1 = 0.0;
  double sum = 0.0;
  std::array<double, 2> rj{};
};
Ex1Thresholds ex1_thresholds(const std::array<double, 3>& delta, double tau);
// Dimensions at `1 − backoff` of the corner (a, min(c_j, b − a)) of the
// threshold region, rounded down to l/n.
SimConfig ex1_config_below_threshold(int n, const std::array<double, 3>& delta, double tau, double backoff);

// Soft covering with a uniformly drawn coset: each of the N = υ^{n−rank}
// cosets of the inner code is selected with probability 1/N and a codeword is
// then drawn by likelihood encoding, so the induced law is
// Σ_C (1/N) pⁿ(· | C) and its distance to pⁿ equals ½ Σ_C |1/N − pⁿ(C)|.
// Inner codes are the top k rows of a random full-rank n×n generator per
// code index, so the codes are nested in k. TooLarge unless υⁿ ≤ 10⁵.
double soft_covering_tv(int n, int k, int modulus, const std::vector<double>& p, uint64_t seed, int num_codes);
std::vector<double> soft_covering_curve(int n, int modulus, const std::vector<double>& p, uint64_t seed, int num_codes);

}  // namespace cqrl::mcsim
