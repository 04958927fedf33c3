#pragma once

#include <array>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <variant>
#include <vector>

#include "cqrl/cq_state.hpp"
#include "cqrl/linalg.hpp"

namespace cqrl::channels {

constexpr double unconstrained = std::numeric_limits<double>::infinity();

// σ_δ(x) = (1 − δ)|1 − x⟩⟨1 − x| + δ|x⟩⟨x|, δ ∈ [0, 1/2].
Mat sigma_state(double delta, int x);
// γ(0) = |0⟩⟨0|, γ(1) = |v_φ⟩⟨v_φ| with v_φ = (cos φ, sin φ)ᵗ, φ ∈ [0, π/2].
Mat gamma_state(double phi, int x);

using CostVector = std::array<double, 3>;

// Three-user classical-quantum interference channel. States are indexed by
// the flattened input tuple (x₁ slowest) and live on H_{Y₁} ⊗ H_{Y₂} ⊗ H_{Y₃}.
class ChannelSpec {
 public:
  ChannelSpec(std::array<int, 3> inputs, std::array<int, 3> output_dims, std::vector<Mat> states,
              std::array<std::vector<double>, 3> costs, CostVector tau = {unconstrained, unconstrained, unconstrained});

  const std::array<int, 3>& inputs() const { return inputs_; }
  const std::array<int, 3>& output_dims() const { return dims_; }
  const std::array<std::vector<double>, 3>& costs() const { return costs_; }
  const CostVector& tau() const { return tau_; }
  void set_tau(const CostVector& t) { tau_ = t; }
  int input_count() const { return inputs_[0] * inputs_[1] * inputs_[2]; }
  int flat_index(int x1, int x2, int x3) const { return (x1 * inputs_[1] + x2) * inputs_[2] + x3; }

  const Mat& state(int x1, int x2, int x3) const { return states_[static_cast<size_t>(flat_index(x1, x2, x3))]; }
  const Mat& state_flat(int idx) const { return states_[static_cast<size_t>(idx)]; }
  // Reduced state on receiver j ∈ {0, 1, 2}.
  const Mat& marginal(int j, int x1, int x2, int x3) const;
  // Lowest-cost input symbol of user j (first on ties).
  int zero_cost_symbol(int j) const;

 private:
  std::array<int, 3> inputs_;
  std::array<int, 3> dims_;
  std::vector<Mat> states_;
  std::array<std::vector<Mat>, 3> marginals_;
  std::array<std::vector<double>, 3> costs_;
  CostVector tau_;
};

ChannelSpec build_ex1(double delta1, double delta2, double delta3, double tau);
ChannelSpec build_ex2(double phi, double delta2, double delta3, double tau);
ChannelSpec build_ex3(double phi, double delta2, double delta3, double tau1, double tau2, double tau3);

// ρ_{x̲} = A(x₁, x₂, x₃) ⊗ B(x₂) ⊗ C(x₃); rx1_states is indexed by the
// flattened tuple, rx2/rx3 by the user's own input.
ChannelSpec build_3to1(const std::vector<Mat>& rx1_states, int n1, int n2, int n3, const std::vector<Mat>& rx2_states,
                       const std::vector<Mat>& rx3_states, std::array<std::vector<double>, 3> costs);

struct ClassicalIC {
  std::array<int, 3> inputs{};
  std::array<int, 3> outputs{};
  // trans[j][flat x][y] = p(y_j = y | x̲).
  std::array<std::vector<std::vector<double>>, 3> trans;
};
struct NonCommuting {
  double max_commutator = 0.0;
};

std::variant<ClassicalIC, NonCommuting> classical_equivalent(const ChannelSpec& spec);

struct CapacityResult {
  double capacity = 0.0;
  double p1 = 0.0;  // argmax p(X_j = 1)
  Pmf pmf;
};

// Single-user binary-input information I(X_j; Y_j) at p(X_j = 1) = t, other
// users on their zero-cost symbol.
double user_information(const ChannelSpec& spec, int j, double t);

// max I(X_j; Y_j) over p(1) ∈ [0, min(t_max, 1/2)] where t_max is the largest
// p(1) meeting E κ_j ≤ τ_j: grid of step `grid`, then golden-section to 1e−9
// around the best grid point.
CapacityResult user_capacity_cost(const ChannelSpec& spec, int j, double tau_j, double grid = 1e-3);

// 𝒞₁ + 𝒞₂ + 𝒞₃ > C₁ with margin tol_rate.
bool condition_eq1(const std::array<double, 3>& caps, double c1_unconstrained);

// Map (x₂, x₃) ↦ (x₂ ⊕₃ x₃, x₂ ∨ x₃) for binary inputs embedded in F₃.
struct OrRow {
  int x2, x3, ternary_sum, logical_or;
};
std::vector<OrRow> or_recovery_table();
// H(X₂ ∨ X₃ | X₂ ⊕₃ X₃) for independent inputs with P(X₂ = 1) = p2,
// P(X₃ = 1) = p3 (P(2) = 0 on F₃).
double or_recovery_entropy(double p2, double p3);
// Checks the table is a function of the ternary sum and that the conditional
// entropy vanishes for every pmf on the denominator-`denominator` grid.
bool or_recovery_check(int denominator = 16);

// Threshold of the Ex. 3 sufficiency condition, transcribed term by term:
//   min_{j=2,3} { h_b(τ_j) + (1−τ₁)(1−τ₂)log((1−τ₁)(1−τ₂)) + (τ₁∗τ₂)log(τ₁∗τ₂)
//                 + τ₁τ₂ log(τ₁τ₂) − h_b(f(τ₁)) + h_b(f(τ₁∗β)) } + h_b(f(τ₁)),
// β = τ₂ + τ₃ − τ₂τ₃, logs base 2. The three log terms equal −H(U₂ ⊕₃ U₃)
// only after renaming (τ₁, τ₂) → (τ₂, τ₃); the printed indices are kept and
// `ex3_theta_renamed` gives the renamed variant for comparison.
double ex3_theta(double phi, double tau1, double tau2, double tau3);
double ex3_theta_renamed(double phi, double tau1, double tau2, double tau3);

// Closed forms used by the examples.
struct ExampleCapacities {
  std::array<double, 3> cost_capacity{};  // 𝒞₁, 𝒞₂, 𝒞₃
  double c1 = 0.0;                        // unconstrained / reference C₁
};
ExampleCapacities ex2_closed_form(double phi, double delta2, double delta3, double tau);
ExampleCapacities ex3_closed_form(double phi, double delta2, double delta3, double tau1, double tau2, double tau3);

void to_json(nlohmann::json& j, const ChannelSpec& c);
ChannelSpec channel_from_json(const nlohmann::json& j);
nlohmann::json classical_to_json(const ClassicalIC& c);

}  // namespace cqrl::channels
