#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <vector>

#include "cqrl/linalg.hpp"
#include "cqrl/rng.hpp"

namespace cqrl::tiltlab {

// Extended space H^G ⊕ ⨁_b (H^G ⊗ D_b^{⊗n}) with H^G = H ⊗ C², dim H =
// base_dim. Block b tilts with amplitude η^{powers[b]}.
struct TiltSpace {
  int base_dim = 2;
  std::vector<int> aux_dims;  // |D_b|
  std::vector<int> powers;    // same length as aux_dims
  int n = 1;

  int ground_dim() const { return 2 * base_dim; }
  int block_size(int b) const;  // |D_b|^n
  int extended_dim() const;
  int block_offset(int b) const;  // first row of block b in the extended space
  void validate() const;          // DimOverflow beyond 4096, DomainError otherwise

  // Two directions, amplitude η each.
  static TiltSpace three_to_one(int base_dim, int d1, int d2, int n = 1);
  // One block per S ⊂ [4], S ∉ {∅, [4]}, in bitmask order 1..14, amplitude η^{|S|}.
  static TiltSpace four_user(int base_dim, const std::vector<int>& aux_dims, int n = 1);
};

constexpr int max_extended_dim = 4096;

// 1 + Σ_b η^{2 powers[b]}: the squared norm of the unnormalized tilt.
double omega(const TiltSpace& s, double eta);
// 1 + η^{2k}
double omega_subset(int k, double eta);
// The all-direction four-user constant in its published form. It does not
// normalize the fourteen-direction map, whose exact value is
// 1 + 4η² + 6η⁴ + 4η⁶ (see omega()).
double omega_printed(double eta);

// dirs[b] ∈ [0, block_size(b)) tilts along block b; −1 leaves it out. The
// result is (h + Σ η^{p_b} h ⊗ |d_b⟩) / √(1 + Σ η^{2 p_b}).
// NotUnit when ‖h‖ differs from 1 by more than 1e−9.
Vec tilt_vector(const TiltSpace& s, const Vec& h, const std::vector<int>& dirs, double eta);
// Matrix of the same map (extended_dim × ground_dim).
Mat tilt_isometry(const TiltSpace& s, const std::vector<int>& dirs, double eta);

// ρ ⊗ |0⟩⟨0| placed in the ground block of the extended space.
Mat embed_ground(const TiltSpace& s, const Mat& rho);

struct TiltedState {
  Mat op;        // on the extended space
  Mat original;  // ρ on H
  std::vector<int> dirs;
  double eta = 0.0;
};

// The map acts on each eigenvector of ρ ⊗ |0⟩⟨0|, which for a linear
// isometry V is V (ρ ⊗ |0⟩⟨0|) V†.
TiltedState tilt_state(const TiltSpace& s, const Mat& rho, const std::vector<int>& dirs, double eta);
// ‖θ − ρ ⊗ |0⟩⟨0|‖₁
double closeness(const TiltSpace& s, const TiltedState& t);

// 2√(2 − 2/√(1+2η²)): twice the vector distance of the two-direction tilt.
double pure_case_bound(double eta);

struct SmoothingResult {
  Mat average;     // mean over the averaged directions and the family
  Mat structured;  // (Ω_kept / Ω) · T_kept(ρ̄ ⊗ |0⟩⟨0|)
  Mat residual;    // average − structured
  double scale = 0.0;
  double residual_norm = 0.0;  // operator norm
  int averaged_size = 0;       // smallest |D_b|^n among averaged blocks
  double bound_3 = 0.0;        // 3η / √averaged_size
  double bound_21 = 0.0;       // 21η / √averaged_size
};

// Averages V_d (ρ_i ⊗ |0⟩⟨0|) V_d† over the family (weights w_i) and over every
// direction of each block other than `kept_block`, which stays at `kept_dir`.
// kept_block = −1 averages all blocks; the structured part is then
// (ρ̄ ⊗ |0⟩⟨0|) / Ω.
SmoothingResult smoothing_residual(const TiltSpace& s, const std::vector<Mat>& family, const std::vector<double>& weights,
                                   int kept_block, int kept_dir, double eta);

struct HnResult {
  bool holds = false;
  double min_eig = 0.0;
  double herm_defect = 0.0;
};
// 2(I − S) + 4T − (I − A^{−1/2} S A^{−1/2}) ⪰ −1e−9 with A = S + T and the
// inverse root taken on supp A. InvalidOperands unless 0 ⪯ S ⪯ I, T ⪰ 0.
HnResult hayashi_nagaoka_check(const Mat& S, const Mat& T);

struct SrmResult {
  std::vector<Mat> povm;
  Mat support;  // projector onto supp Σ p_i ρ_i
  double success = 0.0;
  double completeness_defect = 0.0;  // ‖Σ μ_i − support‖_max
};
// μ_i = Θ^{−1/2} p_i ρ_i Θ^{−1/2}, Θ = Σ p_i ρ_i. At most 16 states of
// dimension ≤ 64 (DimOverflow); DegenerateEnsemble when Θ = 0.
SrmResult tiny_srm(const std::vector<Mat>& states, const std::vector<double>& priors);

// Randomized batches; case c uses Rng::stream(seed, c).
struct ClosenessCase {
  double eta = 0.0;
  int d1 = 0, d2 = 0;
  double distance = 0.0;
  double bound = 0.0;        // 4η
  double pure_bound = 0.0;   // 2√(2 − 2/√(1+2η²))
  bool pass = false;         // distance ≤ 4η and ≤ pure_bound
};
std::vector<ClosenessCase> closeness_suite(int cases, const std::vector<double>& etas, uint64_t seed, int threads = 1);

struct HnCase {
  int dim = 0;
  double min_eig = 0.0;
  bool pass = false;
};
std::vector<HnCase> hn_suite(int cases, int max_dim, uint64_t seed, int threads = 1);

struct SmoothingCase {
  int aux = 0;
  double eta = 0.0;
  double residual_norm = 0.0;
  double bound_3 = 0.0;
  double bound_21 = 0.0;
  bool within_3 = false;
  bool within_21 = false;
};
// Two-direction residual at n = 1 for each |D₁| in `sizes` (|D₂| = 2), plus
// the four-user residual with every |D_S| = s at base dimension 2.
std::vector<SmoothingCase> smoothing_suite(const std::vector<int>& sizes, double eta, uint64_t seed);
std::vector<SmoothingCase> four_user_smoothing_suite(const std::vector<int>& sizes, double eta, uint64_t seed);

void to_json(nlohmann::json& j, const ClosenessCase& c);
void to_json(nlohmann::json& j, const HnCase& c);
void to_json(nlohmann::json& j, const SmoothingCase& c);

// Random inputs shared by the suites and the tests.
Mat random_density(int dim, Rng& rng);  // Haar eigenbasis, uniform simplex spectrum
Vec random_unit(int dim, Rng& rng);
Mat random_unitary(int dim, Rng& rng);

}  // namespace cqrl::tiltlab
