#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cqrl/channels.hpp"
#include "cqrl/cq_state.hpp"
#include "cqrl/scalar.hpp"
#include "expect_kind.hpp"

using namespace cqrl;
using namespace cqrl::channels;

namespace {

// I(X_j; Y_j) with the other users on symbol 0, from a CqState.
double info_oracle(const ChannelSpec& ch, int j, double t) {
  CqState s({{"X", 2}}, ch.output_dims()[static_cast<size_t>(j)]);
  for (int x = 0; x < 2; ++x) {
    std::array<int, 3> in{0, 0, 0};
    in[static_cast<size_t>(j)] = x;
    s.add_point({x}, x ? t : 1 - t, s.add_operator(ch.marginal(j, in[0], in[1], in[2])));
  }
  return mutual_info(s, {{"X"}, false}, {{}, true});
}

}  // namespace

TEST(States, SigmaAndGamma) {
  const Mat s0 = sigma_state(0.1, 0), s1 = sigma_state(0.1, 1);
  EXPECT_NEAR((s0 + s1).real().trace(), 2.0, 1e-15);
  EXPECT_NEAR(std::abs(s0(0, 1)), 0.0, 1e-15);
  const Mat g1 = gamma_state(std::numbers::pi / 2, 1);
  EXPECT_NEAR(g1(1, 1).real(), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(gamma_state(0.7, 0)(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs((gamma_state(0.7, 0) * gamma_state(0.7, 1)).trace()), std::pow(std::cos(0.7), 2), 1e-15);
  EXPECT_KIND(sigma_state(0.6, 0), ErrorKind::DomainError);
  EXPECT_KIND(gamma_state(2.0, 0), ErrorKind::DomainError);
  EXPECT_KIND(gamma_state(0.5, 2), ErrorKind::DomainError);
}

TEST(Examples, Ex1ClassicalEquivalentIsXorChannel) {
  const auto ch = build_ex1(0.1, 0.2, 0.3, 0.25);
  const auto eq = classical_equivalent(ch);
  ASSERT_TRUE(std::holds_alternative<ClassicalIC>(eq));
  const auto& c = std::get<ClassicalIC>(eq);
  const std::array<double, 3> d = {0.1, 0.2, 0.3};
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int x3 = 0; x3 < 2; ++x3) {
        const int flat = ch.flat_index(x1, x2, x3);
        const int bits[3] = {x1 ^ x2 ^ x3, x2, x3};
        for (int j = 0; j < 3; ++j) {
          const auto& row = c.trans[static_cast<size_t>(j)][static_cast<size_t>(flat)];
          const double dj = d[static_cast<size_t>(j)];
          EXPECT_NEAR(row[static_cast<size_t>(1 - bits[j])], 1 - dj, 1e-12);
          EXPECT_NEAR(row[static_cast<size_t>(bits[j])], dj, 1e-12);
        }
      }
}

TEST(Examples, Ex2IsNotClassical) {
  const auto eq = classical_equivalent(build_ex2(1.2, 0.15, 0.15, 0.125));
  ASSERT_TRUE(std::holds_alternative<NonCommuting>(eq));
  EXPECT_GT(std::get<NonCommuting>(eq).max_commutator, 0.1);
}

TEST(Examples, MarginalsDependOnOwnInputOnly) {
  const auto ch = build_ex3(0.9, 0.1, 0.2, 0.2, 0.3, 0.3);
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int x3 = 0; x3 < 2; ++x3) {
        EXPECT_LT((ch.marginal(1, x1, x2, x3) - sigma_state(0.1, x2)).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_LT((ch.marginal(2, x1, x2, x3) - sigma_state(0.2, x3)).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_LT((ch.marginal(0, x1, x2, x3) - gamma_state(0.9, x1 ^ (x2 | x3))).cwiseAbs().maxCoeff(), 1e-14);
      }
}

TEST(Capacity, UserInformationMatchesCqStateOracle) {
  const auto ch = build_ex2(0.8, 0.2, 0.05, 0.3);
  for (int j = 0; j < 3; ++j)
    for (double t : {0.05, 0.2, 0.5}) EXPECT_NEAR(user_information(ch, j, t), info_oracle(ch, j, t), 1e-12);
}

TEST(Capacity, CostBudgetCapsTheOptimizer) {
  const auto ch = build_ex3(1.0, 0.1, 0.1, 0.2, 0.15, 0.4);
  const auto r = user_capacity_cost(ch, 1, 0.15);
  EXPECT_NEAR(r.p1, 0.15, 1e-9);
  EXPECT_NEAR(r.capacity, binary_entropy(binary_convolve(0.15, 0.1)) - binary_entropy(0.1), 1e-9);
  const auto free = user_capacity_cost(ch, 2, unconstrained);
  EXPECT_NEAR(free.p1, 0.5, 1e-6);
  EXPECT_NEAR(free.capacity, 1 - binary_entropy(0.1), 1e-9);
  // Budget zero: only the zero-cost symbol.
  EXPECT_NEAR(user_capacity_cost(ch, 0, 0.0).capacity, 0.0, 1e-12);
}

TEST(Capacity, ClosedFormsAgree) {
  const auto cf = ex2_closed_form(1.2, 0.15, 0.15, 0.125);
  EXPECT_NEAR(cf.cost_capacity[0], 0.4887060689542704, 1e-12);
  EXPECT_NEAR(cf.c1, binary_entropy((1 + std::cos(1.2)) / 2), 1e-15);
  EXPECT_TRUE(condition_eq1(cf.cost_capacity, cf.c1));
  EXPECT_FALSE(condition_eq1({0.1, 0.1, 0.1}, 0.5));
}

TEST(OrRecovery, TernarySumDeterminesOr) {
  EXPECT_TRUE(or_recovery_check(16));
  for (const auto& r : or_recovery_table()) EXPECT_EQ(r.logical_or, r.ternary_sum > 0 ? 1 : 0);
  // Over F₂ the sum loses (1,1) vs (0,0): H(X₂∨X₃ | X₂⊕₂X₃) > 0.
  const double p = 0.3, q = 0.6;
  const double p00 = (1 - p) * (1 - q), p11 = p * q;
  const double cond = (p00 + p11) * binary_entropy(p11 / (p00 + p11));
  EXPECT_GT(cond, 0.1);
  EXPECT_EQ(or_recovery_entropy(p, q), 0.0);
}

TEST(Theta, PrintedAndRenamedForms) {
  const double phi = 0.9, t1 = 0.1, t2 = 0.2, t3 = 0.3;
  const double beta = t2 + t3 - t2 * t3;
  auto xlogx = [](double x) { return x > 0 ? x * std::log2(x) : 0.0; };
  auto theta = [&](double a, double b) {
    const double neg_h = xlogx((1 - a) * (1 - b)) + xlogx(binary_convolve(a, b)) + xlogx(a * b);
    const double tail = neg_h - binary_entropy(fact1_f(t1, phi)) + binary_entropy(fact1_f(binary_convolve(t1, beta), phi));
    return std::min(binary_entropy(t2) + tail, binary_entropy(t3) + tail) + binary_entropy(fact1_f(t1, phi));
  };
  EXPECT_NEAR(ex3_theta(phi, t1, t2, t3), theta(t1, t2), 1e-12);
  EXPECT_NEAR(ex3_theta_renamed(phi, t1, t2, t3), theta(t2, t3), 1e-12);
}

TEST(Channel, JsonRoundTripAndValidation) {
  const auto ch = build_ex2(1.0, 0.1, 0.2, 0.3);
  nlohmann::json j = ch;
  const auto back = channel_from_json(j);
  for (int i = 0; i < ch.input_count(); ++i) EXPECT_LT((back.state_flat(i) - ch.state_flat(i)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(back.tau(), ch.tau());
  j["states"].erase(0);
  EXPECT_ANY_THROW(channel_from_json(j));
  EXPECT_KIND(ChannelSpec({2, 2, 2}, {2, 2, 2}, {}, {std::vector<double>{0, 1}, {0, 1}, {0, 1}}), ErrorKind::DimensionMismatch);
}
