#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cqrl/channels.hpp"
#include "cqrl/cq_state.hpp"

namespace cqrl::regions {

using channels::ChannelSpec;
using channels::CostVector;
using Rates = std::array<double, 3>;

// One evaluated inequality. slack = rhs − lhs for "<"/"≤" rows and
// lhs − rhs for ">" rows; equality rows carry −|lhs − rhs|.
struct Inequality {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool strict = true;
};

// Auxiliary rates by name: S12, T12, beta12, nu12, K1, L1, ...
struct RateAllocation {
  std::map<std::string, double> values;
};

// feasible ⇔ every strict slack > tol_rate, every cost slack ≥ −tol_prob and
// every equality residual ≤ lp_residual.
struct RegionReport {
  std::string system;
  Rates rates{};
  bool feasible = false;
  std::vector<Inequality> records;
  std::optional<RateAllocation> witness;
};

void to_json(nlohmann::json& j, const RegionReport& r);
std::string to_csv(const RegionReport& r);

// ---------------------------------------------------------------------------
// Coset-code bound with U = U₂ ⊕ U₃.
struct Thm1Config {
  int field = 2;
  Pmf p_x1;
  Pmf p_u2;
  Pmf p_u3;
  std::vector<int> f2;  // F_υ → X₂
  std::vector<int> f3;  // F_υ → X₃
};

struct Thm1Bounds {
  double r1 = 0;           // I(X₁;Y₁|U)
  double r2 = 0, r3 = 0;   // I(U_j;Y_j)
  double sum_coset = 0;    // I(U;Y₁|X₁) − H(U) + min{H(U₂),H(U₃)}
  double pair = 0;         // I(U,X₁;Y₁) − H(U) + min{H(U₂),H(U₃)}
  CostVector cost{};       // E κ₁(X₁), Σ p_{U_j} κ_j(f_j(u))
};

Thm1Bounds thm1_bounds(const ChannelSpec& ch, const Thm1Config& cfg);
RegionReport thm1_check(const ChannelSpec& ch, const Thm1Config& cfg, const Rates& rates, const CostVector& tau);
RegionReport thm1_check(const ChannelSpec& ch, const Thm1Config& cfg, const Rates& rates);
// Supremum of R₁ with (R₁, r2, r3) feasible; nullopt when no R₁ ≥ 0 works.
std::optional<double> thm1_r1_sup(const ChannelSpec& ch, const Thm1Config& cfg, double r2, double r3);

// ---------------------------------------------------------------------------
// Unstructured IID bound for 3-to-1 channels (users 2, 3 interference free).
struct UnstructuredPmf {
  Pmf p_x1;
  int u2 = 1;
  int u3 = 1;
  std::vector<double> p_u2x2;  // [u][x] row-major
  std::vector<double> p_u3x3;
};

struct UnstructuredBounds {
  double r1 = 0;       // I(X₁;Y₁|U₂,U₃)
  double r2 = 0;       // I(U₂X₂;Y₂)
  double r3 = 0;
  double r12 = 0;      // I(U₂X₁;Y₁|U₃) + I(X₂;Y₂|U₂)
  double r13 = 0;
  double r123 = 0;     // I(U₂U₃X₁;Y₁) + I(X₂;Y₂|U₂) + I(X₃;Y₃|U₃)
  CostVector cost{};
};

// Not3to1 unless the Y₂ marginal depends on x₂ only and Y₃ on x₃ only.
void require_3to1(const ChannelSpec& ch);
UnstructuredBounds unstructured_bounds(const ChannelSpec& ch, const UnstructuredPmf& pmf);
RegionReport unstructured_3to1_check(const ChannelSpec& ch, const UnstructuredPmf& pmf, const Rates& rates,
                                     const CostVector& tau);
RegionReport unstructured_3to1_check(const ChannelSpec& ch, const UnstructuredPmf& pmf, const Rates& rates);
std::optional<double> unstructured_r1_sup(const ChannelSpec& ch, const UnstructuredPmf& pmf, double r2, double r3);

// ---------------------------------------------------------------------------
// Layered configurations. Transmitter j owns the coset layers U_{ji}, U_{jk}
// and the IID layers V_{ji}, V_{jk} with i < k the other two users; "first"
// is ji and "second" is jk. Alphabet size 1 means the layer is absent (φ):
// its rate variables and every inequality whose index set touches it are
// dropped. U_{ji} lives in F_{υ_i}, so U_{ji} and U_{ki} share a size unless
// one of them is absent.
struct TxLayers {
  int u_first = 1;
  int u_second = 1;
  int v_first = 1;
  int v_second = 1;
  // joint pmf over (v_first, v_second, u_first, u_second, x), x fastest.
  std::vector<double> joint;
};

struct LayeredConfig {
  std::array<TxLayers, 3> tx;
};

struct Thm2Config {
  LayeredConfig layers;  // V layers must be absent
};
struct Thm3Config {
  LayeredConfig layers;
};

struct LayeredOptions {
  bool drop_dont_care = false;  // remove the A_j = ∅ variants adding S_{ij} / S_{kj}
};

// p_{U_{ji} U_{jk} X_j} as [u_first][u_second][x].
TxLayers coset_layers(int u_first, int u_second, std::vector<double> joint);

void validate_layers(const ChannelSpec& ch, const LayeredConfig& cfg);  // ConfigMismatch

// Indices of user j's partners: first < second.
std::array<int, 2> partners(int j);
// Layer name "12" etc. for the pair (owner, target), 0-based inputs.
std::string pair_name(int owner, int target);

// Receiver-j state over the registers U_{ji}, U_{jk}, V_{ji}, V_{jk}, X_j and
// U_j^⊕ = U_{ij} ⊕ U_{kj} (names like "U12", "V12", "X1", "U1+"), with the
// other transmitters averaged out given U_j^⊕.
CqState layered_receiver_state(const ChannelSpec& ch, const LayeredConfig& cfg, int j);
// Same quantities from the full product over all three transmitters.
CqState layered_full_state(const ChannelSpec& ch, const LayeredConfig& cfg, int j);
// Four-user relabeling at receiver j: Z1 = U_{ji}, Z2 = U_{jk}, Z3 = X_j,
// Z4 = U_j^⊕, quantum register Y.
CqState effective_cqmac_state(const ChannelSpec& ch, const LayeredConfig& cfg, int j);

// D(r_{Z_A} ‖ q_{Z_A}) with q = uniform × uniform × p_{X_j}, computed directly
// from the pmf; subset bits: 1 = U_{ji}, 2 = U_{jk}, 4 = X_j.
double source_bound_divergence(const TxLayers& tx, unsigned subset);

RegionReport thm2_feasible(const ChannelSpec& ch, const Thm2Config& cfg, const Rates& rates,
                           const LayeredOptions& opt = {});
RegionReport thm3_feasible(const ChannelSpec& ch, const Thm3Config& cfg, const Rates& rates,
                           const LayeredOptions& opt = {});

// ---------------------------------------------------------------------------
using RegionConfig = std::variant<Thm1Config, UnstructuredPmf, Thm2Config, Thm3Config>;
enum class EvaluatorKind { Thm1, Unstructured, Thm2, Thm3 };

EvaluatorKind kind_of(const RegionConfig& cfg);
std::string to_string(EvaluatorKind k);
EvaluatorKind evaluator_from_string(const std::string& s);  // ParseError
RegionReport evaluate(const ChannelSpec& ch, const RegionConfig& cfg, const Rates& rates,
                      const LayeredOptions& opt = {});

void to_json(nlohmann::json& j, const Thm1Config& c);
void to_json(nlohmann::json& j, const UnstructuredPmf& c);
void to_json(nlohmann::json& j, const LayeredConfig& c);
nlohmann::json config_to_json(const RegionConfig& c);
// {"evaluator": "thm1" | "unstructured" | "thm2" | "thm3", ...}
RegionConfig config_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
struct GridSpec {
  int denominator = 32;
  int max_aux = 4;           // |U_j| bound for the unstructured scan
  int field = 2;             // υ for the Thm-1 scan
  std::vector<int> f2, f3;   // Thm-1 maps; empty means u mod |X_j|
  uint64_t scan_cap = 20'000'000'000ULL;
  int threads = 1;
  bool refine = true;
};

struct ScanResult {
  double max_r1 = 0.0;       // supremum of R₁ (best of grid and refinement)
  double grid_max_r1 = 0.0;
  bool found = false;        // false when no grid point admits R₁ ≥ 0
  uint64_t grid_points = 0;
  uint64_t refine_steps = 0;
  std::optional<RegionConfig> argmax;
};

// Exhaustive lattice scan (first maximum in lexicographic grid order wins)
// followed by pairwise mass-moving refinement. BudgetExceeded when the number
// of grid points exceeds scan_cap.
ScanResult max_r1_scan(const ChannelSpec& ch, EvaluatorKind kind, double r2, double r3, const GridSpec& grid);
nlohmann::json to_json(const ScanResult& r);

struct SliceSpec {
  double r3 = 0.0;
  int rays = 32;
  double tol = 1e-6;
};
struct SlicePoint {
  double theta = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
};
// Bisection along rays θ ∈ [0, π/2] of the (R₁, R₂) plane at fixed R₃.
std::vector<SlicePoint> boundary_slice(const ChannelSpec& ch, const RegionConfig& cfg, const SliceSpec& spec,
                                       const LayeredOptions& opt = {});
std::string slice_to_csv(const std::vector<SlicePoint>& pts);

// Shared helpers for building reports.
namespace detail {
Inequality less(std::string label, double lhs, double rhs, bool strict = true);
Inequality greater(std::string label, double lhs, double rhs, bool strict = true);
bool verdict(const std::vector<Inequality>& recs);
void add_costs(std::vector<Inequality>& recs, const CostVector& used, const CostVector& tau);
}  // namespace detail

}  // namespace cqrl::regions
